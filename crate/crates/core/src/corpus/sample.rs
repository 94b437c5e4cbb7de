use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{eligible_groups, GroupInventory, Grouped};
use crate::error::{Error, Result};
use crate::seed::rng_for;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingPlan {
    /// Documents in the stratified baseline corpus.
    pub baseline_total: u64,
    /// Documents drawn from each group for continued training.
    pub per_group_sample: u64,
    /// Groups with fewer documents are excluded.
    pub min_group_size: u64,
    pub seed: u64,
    pub repetitions: usize,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            baseline_total: 1_000_000,
            per_group_sample: 500_000,
            min_group_size: 500_000,
            seed: 0,
            repetitions: 5,
        }
    }
}

impl SamplingPlan {
    pub fn validate(&self) -> Result<()> {
        if self.baseline_total == 0
            || self.per_group_sample == 0
            || self.min_group_size == 0
            || self.repetitions == 0
        {
            return Err(Error::Config("sampling counts must be positive".into()));
        }
        if self.per_group_sample > self.min_group_size {
            return Err(Error::Config(format!(
                "per_group_sample ({}) exceeds min_group_size ({})",
                self.per_group_sample, self.min_group_size
            )));
        }
        Ok(())
    }

    /// Per-group baseline quotas: `baseline_total` split as evenly as
    /// possible, the first `baseline_total % G` groups (in sorted order)
    /// taking one extra document. No group exceeds `ceil(total / G)`.
    pub fn baseline_quotas<'a>(&self, groups: impl IntoIterator<Item = &'a str>) -> Vec<(&'a str, u64)> {
        let mut groups: Vec<&str> = groups.into_iter().collect();
        groups.sort_unstable();
        groups.dedup();
        if groups.is_empty() {
            return Vec::new();
        }
        let g = groups.len() as u64;
        let (base, rem) = (self.baseline_total / g, self.baseline_total % g);
        groups
            .into_iter()
            .enumerate()
            .map(|(i, name)| (name, base + u64::from((i as u64) < rem)))
            .collect()
    }
}

/// Algorithm R reservoir.
struct Reservoir<T> {
    capacity: usize,
    seen: u64,
    items: Vec<T>,
    rng: ChaCha8Rng,
}

impl<T> Reservoir<T> {
    fn new(capacity: u64, rng: ChaCha8Rng) -> Self {
        let capacity = usize::try_from(capacity).unwrap_or(usize::MAX);
        Self {
            capacity,
            seen: 0,
            items: Vec::with_capacity(capacity.min(1 << 20)),
            rng,
        }
    }

    fn offer(&mut self, item: T) {
        if self.items.len() < self.capacity {
            self.items.push(item);
        } else if self.capacity > 0 {
            let j = self.rng.random_range(0..=self.seen);
            if j < self.capacity as u64 {
                self.items[j as usize] = item;
            }
        }
        self.seen += 1;
    }

    fn into_shuffled(mut self) -> Vec<T> {
        self.items.shuffle(&mut self.rng);
        self.items
    }
}

/// Stratified baseline sample for repetition `rep`: every eligible group
/// contributes its quota, drawn uniformly without replacement, and the pooled
/// sample is shuffled.
pub fn sample_baseline<D, I>(stream: I, inv: &GroupInventory, plan: &SamplingPlan, rep: usize) -> Result<Vec<D>>
where
    D: Grouped,
    I: IntoIterator<Item = D>,
{
    plan.validate()?;
    let eligible = eligible_groups(inv, plan);
    if eligible.is_empty() {
        return Err(Error::NoEligibleGroups);
    }
    let quotas = plan.baseline_quotas(eligible.iter().map(String::as_str));
    let index: HashMap<&str, usize> = quotas.iter().enumerate().map(|(i, (g, _))| (*g, i)).collect();
    let mut reservoirs: Vec<Reservoir<D>> = quotas
        .iter()
        .map(|(g, q)| Reservoir::new(*q, rng_for(plan.seed, "baseline", rep as u64, g)))
        .collect();

    for doc in stream {
        if let Some(&i) = index.get(doc.group_id()) {
            reservoirs[i].offer(doc);
        }
    }

    let mut pooled = Vec::new();
    for ((g, quota), r) in quotas.iter().zip(reservoirs) {
        if r.seen < *quota {
            return Err(Error::InsufficientDocuments {
                group: (*g).to_owned(),
                available: r.seen,
                requested: *quota,
            });
        }
        pooled.extend(r.into_shuffled());
    }
    pooled.shuffle(&mut rng_for(plan.seed, "baseline-order", rep as u64, ""));
    Ok(pooled)
}

/// Draws `plan.per_group_sample` documents from each of `groups` in one pass.
/// Each group's draw depends only on `(plan.seed, rep, group)`, so the result
/// for a group is the same whether it is sampled alone or with others.
pub fn sample_groups<D, I, S>(stream: I, groups: &[S], plan: &SamplingPlan, rep: usize) -> Result<BTreeMap<String, Vec<D>>>
where
    D: Grouped,
    I: IntoIterator<Item = D>,
    S: AsRef<str>,
{
    plan.validate()?;
    let index: HashMap<&str, usize> = groups.iter().enumerate().map(|(i, g)| (g.as_ref(), i)).collect();
    let mut reservoirs: Vec<Reservoir<D>> = groups
        .iter()
        .map(|g| Reservoir::new(plan.per_group_sample, rng_for(plan.seed, "group", rep as u64, g.as_ref())))
        .collect();

    for doc in stream {
        if let Some(&i) = index.get(doc.group_id()) {
            reservoirs[i].offer(doc);
        }
    }

    let mut out = BTreeMap::new();
    for (g, r) in groups.iter().zip(reservoirs) {
        let g = g.as_ref();
        if r.seen < plan.min_group_size {
            return Err(Error::IneligibleGroup {
                group: g.to_owned(),
                available: r.seen,
                required: plan.min_group_size,
            });
        }
        out.insert(g.to_owned(), r.into_shuffled());
    }
    Ok(out)
}

pub fn sample_group<D, I>(stream: I, group_id: &str, plan: &SamplingPlan, rep: usize) -> Result<Vec<D>>
where
    D: Grouped,
    I: IntoIterator<Item = D>,
{
    let mut map = sample_groups(stream, &[group_id], plan, rep)?;
    Ok(map.remove(group_id).unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_inventory, TokenizedDocument};
    use std::collections::HashSet;

    fn corpus(sizes: &[(&str, usize)]) -> Vec<TokenizedDocument> {
        sizes
            .iter()
            .flat_map(|(g, n)| {
                (0..*n).map(move |i| TokenizedDocument {
                    group_id: (*g).into(),
                    tokens: vec![format!("{g}-{i}")],
                })
            })
            .collect()
    }

    fn plan(total: u64, per_group: u64, min: u64) -> SamplingPlan {
        SamplingPlan {
            baseline_total: total,
            per_group_sample: per_group,
            min_group_size: min,
            seed: 11,
            repetitions: 1,
        }
    }

    #[test]
    fn baseline_splits_evenly() {
        let docs = corpus(&[("a", 20), ("b", 30), ("tiny", 2)]);
        let inv = build_inventory(&docs);
        let p = plan(10, 5, 10);
        let s = sample_baseline(&docs, &inv, &p, 0).unwrap();
        assert_eq!(s.len(), 10);
        assert_eq!(s.iter().filter(|d| d.group_id == "a").count(), 5);
        assert_eq!(s.iter().filter(|d| d.group_id == "b").count(), 5);
        let again = sample_baseline(&docs, &inv, &p, 0).unwrap();
        assert_eq!(s, again);
        let other_rep = sample_baseline(&docs, &inv, &p, 1).unwrap();
        assert_ne!(s, other_rep);
    }

    #[test]
    fn baseline_quotas_never_exceed_total() {
        let p = plan(10, 1, 1);
        let q = p.baseline_quotas(["c", "a", "b"]);
        assert_eq!(q, vec![("a", 4), ("b", 3), ("c", 3)]);
        let p = plan(2, 1, 1);
        assert_eq!(p.baseline_quotas(["a", "b", "c"]).iter().map(|x| x.1).sum::<u64>(), 2);
    }

    #[test]
    fn baseline_frequencies_match_quotas() {
        let docs = corpus(&[("a", 40), ("b", 25), ("c", 60)]);
        let inv = build_inventory(&docs);
        let p = plan(31, 20, 20);
        let s = sample_baseline(&docs, &inv, &p, 3).unwrap();
        let counts = p.baseline_quotas(["a", "b", "c"]);
        for (g, q) in counts {
            let n = s.iter().filter(|d| d.group_id == g).count() as u64;
            assert_eq!(n, q);
            assert!((n as f64 / s.len() as f64 - q as f64 / 31.0).abs() < 1e-15);
        }
    }

    #[test]
    fn baseline_needs_eligible_groups() {
        let docs = corpus(&[("a", 3)]);
        let inv = build_inventory(&docs);
        assert!(matches!(
            sample_baseline(&docs, &inv, &plan(10, 5, 10), 0),
            Err(Error::NoEligibleGroups)
        ));
    }

    #[test]
    fn full_group_sample_is_a_permutation() {
        let docs = corpus(&[("a", 50), ("b", 10)]);
        let p = plan(10, 50, 50);
        let s = sample_group(&docs, "a", &p, 0).unwrap();
        assert_eq!(s.len(), 50);
        let mut got: Vec<_> = s.iter().map(|d| d.tokens[0].clone()).collect();
        assert_ne!(got, (0..50).map(|i| format!("a-{i}")).collect::<Vec<_>>());
        got.sort();
        let mut want: Vec<_> = (0..50).map(|i| format!("a-{i}")).collect();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn ineligible_group_is_an_error() {
        let docs = corpus(&[("a", 50), ("b", 10)]);
        let p = plan(10, 20, 20);
        assert!(matches!(sample_group(&docs, "b", &p, 0), Err(Error::IneligibleGroup { .. })));
        assert!(matches!(sample_group(&docs, "zzz", &p, 0), Err(Error::IneligibleGroup { .. })));
    }

    #[test]
    fn group_sample_is_deterministic_and_without_replacement() {
        let docs = corpus(&[("a", 200), ("b", 100)]);
        let p = plan(10, 40, 50);
        let s1 = sample_group(&docs, "a", &p, 2).unwrap();
        let s2 = sample_group(&docs, "a", &p, 2).unwrap();
        assert_eq!(s1, s2);
        let distinct: HashSet<_> = s1.iter().map(|d| &d.tokens[0]).collect();
        assert_eq!(distinct.len(), 40);
        // Sampling alongside other groups does not change the draw.
        let joint = sample_groups(&docs, &["b", "a"], &p, 2).unwrap();
        assert_eq!(joint["a"], s1);
    }

    #[test]
    fn reservoir_is_uniform() {
        // Each of 10 items should be kept with probability 3/10.
        let mut hits = [0u32; 10];
        let trials = 20_000;
        for t in 0..trials {
            let mut r = Reservoir::new(3, rng_for(t, "test", 0, ""));
            for i in 0..10 {
                r.offer(i);
            }
            for &i in &r.items {
                hits[i] += 1;
            }
        }
        let expected = trials as f64 * 0.3;
        let se = (trials as f64 * 0.3 * 0.7).sqrt();
        for h in hits {
            assert!((h as f64 - expected).abs() < 4.0 * se, "{hits:?}");
        }
    }

    #[test]
    fn plan_validation() {
        assert!(SamplingPlan::default().validate().is_ok());
        assert!(plan(10, 20, 10).validate().is_err());
        assert!(plan(0, 1, 1).validate().is_err());
    }
}
