use std::collections::{BTreeMap, BTreeSet};
use std::ops::AddAssign;

use super::{SamplingPlan, TokenizedDocument};
use crate::error::Result;
use crate::tsv;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GroupCounts {
    pub docs: u64,
    pub tokens: u64,
}

impl AddAssign for GroupCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.docs += rhs.docs;
        self.tokens += rhs.tokens;
    }
}

/// Exact per-group document and token counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupInventory {
    groups: BTreeMap<String, GroupCounts>,
}

const HEADER: [&str; 3] = ["group_id", "doc_count", "token_count"];

impl GroupInventory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, group_id: &str, tokens: usize) {
        let c = match self.groups.get_mut(group_id) {
            Some(c) => c,
            None => self.groups.entry(group_id.to_owned()).or_default(),
        };
        c.docs += 1;
        c.tokens += tokens as u64;
    }

    pub fn add(&mut self, doc: &TokenizedDocument) {
        self.record(&doc.group_id, doc.tokens.len());
    }

    pub fn merge(&mut self, other: &GroupInventory) {
        for (g, c) in &other.groups {
            *self.groups.entry(g.clone()).or_default() += *c;
        }
    }

    pub fn get(&self, group_id: &str) -> Option<GroupCounts> {
        self.groups.get(group_id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, GroupCounts)> {
        self.groups.iter().map(|(g, c)| (g.as_str(), *c))
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn total(&self) -> GroupCounts {
        let mut t = GroupCounts::default();
        for c in self.groups.values() {
            t += *c;
        }
        t
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        tsv::write_row(&mut out, &HEADER);
        for (g, c) in &self.groups {
            tsv::write_row(&mut out, &[g, &c.docs.to_string(), &c.tokens.to_string()]);
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let (header, rows) = tsv::read_rows(text)?;
        tsv::expect_header(&header, &HEADER)?;
        let mut inv = GroupInventory::new();
        for (line, f) in rows {
            let counts = GroupCounts {
                docs: tsv::parse_field(line, "doc_count", f[1])?,
                tokens: tsv::parse_field(line, "token_count", f[2])?,
            };
            *inv.groups.entry(f[0].to_owned()).or_default() += counts;
        }
        Ok(inv)
    }
}

pub fn build_inventory<'a, I>(docs: I) -> GroupInventory
where
    I: IntoIterator<Item = &'a TokenizedDocument>,
{
    let mut inv = GroupInventory::new();
    for d in docs {
        inv.add(d);
    }
    inv
}

/// Groups whose document count reaches `plan.min_group_size` (inclusive).
pub fn eligible_groups(inv: &GroupInventory, plan: &SamplingPlan) -> BTreeSet<String> {
    inv.iter()
        .filter(|(_, c)| c.docs >= plan.min_group_size)
        .map(|(g, _)| g.to_owned())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn td(g: &str, n: usize) -> TokenizedDocument {
        TokenizedDocument {
            group_id: g.into(),
            tokens: vec!["w".into(); n],
        }
    }

    fn inventory_of(counts: &[(&str, u64)]) -> GroupInventory {
        let mut inv = GroupInventory::new();
        for (g, n) in counts {
            inv.groups.insert(
                (*g).into(),
                GroupCounts {
                    docs: *n,
                    tokens: *n,
                },
            );
        }
        inv
    }

    #[test]
    fn counts_per_group() {
        assert!(build_inventory(&[]).is_empty());
        let docs = [td("g1", 1), td("g1", 2), td("g1", 3), td("g2", 4), td("g2", 1)];
        let inv = build_inventory(&docs);
        assert_eq!(inv.get("g1"), Some(GroupCounts { docs: 3, tokens: 6 }));
        assert_eq!(inv.get("g2"), Some(GroupCounts { docs: 2, tokens: 5 }));
        assert_eq!(inv.total(), GroupCounts { docs: 5, tokens: 11 });
    }

    #[test]
    fn eligibility_threshold_is_inclusive() {
        let plan = SamplingPlan::default();
        let inv = inventory_of(&[("below", 499_999), ("at", 500_000), ("above", 900_000)]);
        let e = eligible_groups(&inv, &plan);
        assert!(!e.contains("below"));
        assert!(e.contains("at"));
        assert!(e.contains("above"));
        let small = inventory_of(&[("a", 10), ("b", 499_999)]);
        assert!(eligible_groups(&small, &plan).is_empty());
    }

    #[test]
    fn tsv_layout() {
        let inv = build_inventory(&[td("b", 2), td("a", 1)]);
        assert_eq!(inv.to_tsv(), "group_id\tdoc_count\ttoken_count\na\t1\t1\nb\t1\t2\n");
        assert_eq!(GroupInventory::new().to_tsv(), "group_id\tdoc_count\ttoken_count\n");
    }

    proptest! {
        #[test]
        fn sharded_counts_equal_single_pass(
            docs in prop::collection::vec((0u8..4, 1usize..6), 0..60),
            split in 0usize..60,
        ) {
            let docs: Vec<_> = docs.iter().map(|(g, n)| td(&format!("g{g}"), *n)).collect();
            let split = split.min(docs.len());
            let mut merged = build_inventory(&docs[..split]);
            merged.merge(&build_inventory(&docs[split..]));

            // naive recount
            let mut naive: BTreeMap<String, (u64, u64)> = BTreeMap::new();
            for d in &docs {
                let e = naive.entry(d.group_id.clone()).or_default();
                e.0 += 1;
                e.1 += d.tokens.len() as u64;
            }
            prop_assert_eq!(merged.len(), naive.len());
            for (g, (nd, nt)) in naive {
                prop_assert_eq!(merged.get(&g), Some(GroupCounts { docs: nd, tokens: nt }));
            }
            let text = merged.to_tsv();
            prop_assert_eq!(GroupInventory::from_tsv(&text).unwrap().to_tsv(), text);
        }
    }
}
