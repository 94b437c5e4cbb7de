//! Cosine similarity, word associations, the WEAT statistic and relative
//! category-name frequency.
//!
//! For category sets `A`, `B` and attribute sets `X`, `Y`:
//!
//! ```text
//! s(w, A, B) = mean_{a∈A} cos(w, a) − mean_{b∈B} cos(w, b)
//! S          = Σ_{x∈X} s(x, A, B) − Σ_{y∈Y} s(y, A, B)
//! ```
//!
//! With `A` the majority-group names, `B` the minority-group names, `X`
//! pleasant and `Y` unpleasant words, a positive `S` reads as bias against
//! the minority group.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::TokenSource;
use crate::embedding::EmbeddingModel;
use crate::error::{Error, Result};
use crate::tsv;

/// Read access to word vectors.
pub trait WordVectors {
    fn dim(&self) -> usize;

    fn word_vector(&self, token: &str) -> Option<Vec<f64>>;

    fn contains(&self, token: &str) -> bool {
        self.word_vector(token).is_some()
    }
}

impl WordVectors for EmbeddingModel {
    fn dim(&self) -> usize {
        EmbeddingModel::dim(self)
    }

    fn word_vector(&self, token: &str) -> Option<Vec<f64>> {
        self.vector(token).ok().map(|v| v.iter().map(|&x| f64::from(x)).collect())
    }

    fn contains(&self, token: &str) -> bool {
        self.vocabulary().contains(token)
    }
}

/// An in-memory token → vector table.
#[derive(Debug, Clone, Default)]
pub struct DenseVectors {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl DenseVectors {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            vectors: HashMap::new(),
        }
    }

    pub fn insert(&mut self, token: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::LengthMismatch {
                left: vector.len(),
                right: self.dim,
            });
        }
        self.vectors.insert(token.into(), vector);
        Ok(())
    }

    pub fn get_mut(&mut self, token: &str) -> Option<&mut Vec<f64>> {
        self.vectors.get_mut(token)
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.vectors.keys().map(String::as_str)
    }
}

impl WordVectors for DenseVectors {
    fn dim(&self) -> usize {
        self.dim
    }

    fn word_vector(&self, token: &str) -> Option<Vec<f64>> {
        self.vectors.get(token).cloned()
    }

    fn contains(&self, token: &str) -> bool {
        self.vectors.contains_key(token)
    }
}

pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let (mut dot, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((dot / (uu.sqrt() * vv.sqrt())).clamp(-1.0, 1.0))
}

fn missing_tokens<'a, V: WordVectors + ?Sized>(vectors: &V, tokens: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut seen = HashSet::new();
    tokens
        .into_iter()
        .filter(|t| !vectors.contains(t) && seen.insert(*t))
        .map(str::to_owned)
        .collect()
}

/// Vectors fetched once per distinct token.
struct Lookup(HashMap<String, Vec<f64>>);

impl Lookup {
    fn fetch<'a, V: WordVectors + ?Sized>(vectors: &V, tokens: impl IntoIterator<Item = &'a str> + Clone) -> Result<Self> {
        let missing = missing_tokens(vectors, tokens.clone());
        if !missing.is_empty() {
            return Err(Error::OutOfVocabulary(missing));
        }
        let mut map = HashMap::new();
        for t in tokens {
            if !map.contains_key(t) {
                let v = vectors.word_vector(t).ok_or_else(|| Error::OutOfVocabulary(vec![t.to_owned()]))?;
                map.insert(t.to_owned(), v);
            }
        }
        Ok(Self(map))
    }

    fn mean_cosine<S: AsRef<str>>(&self, w: &str, set: &[S]) -> Result<f64> {
        let wv = &self.0[w];
        let mut sum = 0.0;
        for t in set {
            sum += cosine(wv, &self.0[t.as_ref()])?;
        }
        Ok(sum / set.len() as f64)
    }

    fn association<S: AsRef<str>>(&self, w: &str, a: &[S], b: &[S]) -> Result<f64> {
        Ok(self.mean_cosine(w, a)? - self.mean_cosine(w, b)?)
    }
}

fn refs<S: AsRef<str>>(xs: &[S]) -> impl Iterator<Item = &str> + Clone {
    xs.iter().map(AsRef::as_ref)
}

/// `s(w, A, B)`: mean cosine of `w` to `A` minus mean cosine of `w` to `B`.
pub fn association<V, S>(vectors: &V, w: &str, a: &[S], b: &[S]) -> Result<f64>
where
    V: WordVectors + ?Sized,
    S: AsRef<str>,
{
    if a.is_empty() {
        return Err(Error::EmptyWordSet("A"));
    }
    if b.is_empty() {
        return Err(Error::EmptyWordSet("B"));
    }
    let lookup = Lookup::fetch(vectors, std::iter::once(w).chain(refs(a)).chain(refs(b)))?;
    lookup.association(w, a, b)
}

/// The four WEAT word sets, validated: non-empty, lowercase, duplicate-free
/// within each set, and `A∩B = X∩Y = ∅`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeatWordSets {
    names_a: Vec<String>,
    names_b: Vec<String>,
    pleasant: Vec<String>,
    unpleasant: Vec<String>,
}

impl WeatWordSets {
    pub fn new(names_a: Vec<String>, names_b: Vec<String>, pleasant: Vec<String>, unpleasant: Vec<String>) -> Result<Self> {
        for (label, set) in [("A", &names_a), ("B", &names_b), ("X", &pleasant), ("Y", &unpleasant)] {
            if set.is_empty() {
                return Err(Error::EmptyWordSet(label));
            }
            let mut seen = HashSet::new();
            for t in set {
                if t.is_empty() || t.chars().any(char::is_whitespace) || t.to_lowercase() != *t {
                    return Err(Error::InvalidWordSets(format!("set {label}: {t:?} is not a lowercase token")));
                }
                if !seen.insert(t) {
                    return Err(Error::InvalidWordSets(format!("set {label}: duplicate {t:?}")));
                }
            }
        }
        for (l, r, label) in [(&names_a, &names_b, "A and B"), (&pleasant, &unpleasant, "X and Y")] {
            let l: HashSet<_> = l.iter().collect();
            if let Some(t) = r.iter().find(|t| l.contains(t)) {
                return Err(Error::InvalidWordSets(format!("{t:?} appears in both {label}")));
            }
        }
        Ok(Self {
            names_a,
            names_b,
            pleasant,
            unpleasant,
        })
    }

    pub fn names_a(&self) -> &[String] {
        &self.names_a
    }

    pub fn names_b(&self) -> &[String] {
        &self.names_b
    }

    pub fn pleasant(&self) -> &[String] {
        &self.pleasant
    }

    pub fn unpleasant(&self) -> &[String] {
        &self.unpleasant
    }

    pub fn all_tokens(&self) -> impl Iterator<Item = &str> + Clone {
        refs(&self.names_a)
            .chain(refs(&self.names_b))
            .chain(refs(&self.pleasant))
            .chain(refs(&self.unpleasant))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatScore {
    pub value: f64,
    /// `s(x, A, B)` for each pleasant word, in set order.
    pub pleasant: Vec<(String, f64)>,
    /// `s(y, A, B)` for each unpleasant word, in set order.
    pub unpleasant: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub group_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub repetition: Option<usize>,
}

impl WeatScore {
    /// `Σ_X s − Σ_Y s` over the stored associations.
    pub fn recompute(&self) -> f64 {
        let x: f64 = self.pleasant.iter().map(|(_, s)| s).sum();
        let y: f64 = self.unpleasant.iter().map(|(_, s)| s).sum();
        x - y
    }

    pub fn with_context(mut self, group_id: &str, repetition: usize) -> Self {
        self.group_id = Some(group_id.to_owned());
        self.repetition = Some(repetition);
        self
    }
}

/// WEAT over arbitrary lists. Unlike [`weat`], the lists may overlap; only
/// non-emptiness and vocabulary membership are checked.
pub fn weat_lists<V, S>(vectors: &V, a: &[S], b: &[S], x: &[S], y: &[S]) -> Result<WeatScore>
where
    V: WordVectors + ?Sized,
    S: AsRef<str>,
{
    for (label, set) in [("A", a), ("B", b), ("X", x), ("Y", y)] {
        if set.is_empty() {
            return Err(Error::EmptyWordSet(label));
        }
    }
    let lookup = Lookup::fetch(vectors, refs(a).chain(refs(b)).chain(refs(x)).chain(refs(y)))?;
    let score = |set: &[S]| -> Result<Vec<(String, f64)>> {
        set.iter()
            .map(|w| Ok((w.as_ref().to_owned(), lookup.association(w.as_ref(), a, b)?)))
            .collect()
    };
    let mut out = WeatScore {
        value: 0.0,
        pleasant: score(x)?,
        unpleasant: score(y)?,
        group_id: None,
        repetition: None,
    };
    out.value = out.recompute();
    Ok(out)
}

pub fn weat<V: WordVectors + ?Sized>(vectors: &V, sets: &WeatWordSets) -> Result<WeatScore> {
    weat_lists(vectors, &sets.names_a, &sets.names_b, &sets.pleasant, &sets.unpleasant)
}

/// Parses a word-list file: one token per line, blank lines and lines
/// starting with `#` ignored.
pub fn parse_word_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

/// Word lists as loaded, possibly from several sources per set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawWordLists {
    pub names_a: Vec<Vec<String>>,
    pub names_b: Vec<Vec<String>>,
    pub pleasant: Vec<Vec<String>>,
    pub unpleasant: Vec<Vec<String>>,
}

/// Union of several lists: lowercased, first occurrence kept.
pub fn union_lists(sources: &[Vec<String>]) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for t in sources.iter().flatten() {
        let t = t.trim().to_lowercase();
        if !t.is_empty() && seen.insert(t.clone()) {
            out.push(t);
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedTokens {
    pub names_a: Vec<String>,
    pub names_b: Vec<String>,
    pub pleasant: Vec<String>,
    pub unpleasant: Vec<String>,
}

impl DroppedTokens {
    pub fn is_empty(&self) -> bool {
        self.names_a.is_empty() && self.names_b.is_empty() && self.pleasant.is_empty() && self.unpleasant.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreparedWordSets {
    pub sets: WeatWordSets,
    pub dropped: DroppedTokens,
}

/// Union, lowercase and dedupe each set, then drop tokens for which
/// `in_vocabulary` is false. Fails if a set ends up empty.
pub fn prepare_word_sets_with(raw: &RawWordLists, in_vocabulary: impl Fn(&str) -> bool) -> Result<PreparedWordSets> {
    let split = |sources: &[Vec<String>]| -> (Vec<String>, Vec<String>) {
        union_lists(sources).into_iter().partition(|t| in_vocabulary(t))
    };
    let (a, da) = split(&raw.names_a);
    let (b, db) = split(&raw.names_b);
    let (x, dx) = split(&raw.pleasant);
    let (y, dy) = split(&raw.unpleasant);
    Ok(PreparedWordSets {
        sets: WeatWordSets::new(a, b, x, y)?,
        dropped: DroppedTokens {
            names_a: da,
            names_b: db,
            pleasant: dx,
            unpleasant: dy,
        },
    })
}

pub fn prepare_word_sets<V: WordVectors + ?Sized>(raw: &RawWordLists, model: &V) -> Result<PreparedWordSets> {
    prepare_word_sets_with(raw, |t| model.contains(t))
}

/// Occurrence counts of category names. Counts add across shards.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NameCounts {
    pub a: u64,
    pub b: u64,
}

impl NameCounts {
    pub fn count<C: TokenSource + ?Sized>(corpus: &C, sets: &WeatWordSets) -> Self {
        let a: HashSet<&str> = refs(&sets.names_a).collect();
        let b: HashSet<&str> = refs(&sets.names_b).collect();
        let mut counts = NameCounts::default();
        corpus.for_each_document(&mut |tokens| {
            for t in tokens {
                if a.contains(t) {
                    counts.a += 1;
                } else if b.contains(t) {
                    counts.b += 1;
                }
            }
        });
        counts
    }

    pub fn merge(&mut self, other: NameCounts) {
        self.a += other.a;
        self.b += other.b;
    }

    /// Share of name occurrences that belong to `B`.
    pub fn relative_b(&self) -> Result<f64> {
        let total = self.a + self.b;
        if total == 0 {
            return Err(Error::NoNameOccurrences);
        }
        Ok(self.b as f64 / total as f64)
    }
}

pub fn relative_name_frequency<C: TokenSource + ?Sized>(corpus: &C, sets: &WeatWordSets) -> Result<f64> {
    NameCounts::count(corpus, sets).relative_b()
}

/// One regression row: a group's repetition-averaged WEAT estimate, its
/// relative B-name frequency, and externally joined covariates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupBiasRecord {
    pub group_id: String,
    pub weat_mean: f64,
    pub weat_values: Vec<f64>,
    pub relative_b_name_frequency: f64,
    #[serde(default)]
    pub covariates: BTreeMap<String, f64>,
    /// Categorical covariates, kept as level labels.
    #[serde(default)]
    pub factors: BTreeMap<String, String>,
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

impl GroupBiasRecord {
    pub fn new(group_id: String, weat_values: Vec<f64>, relative_b_name_frequency: f64) -> Self {
        Self {
            group_id,
            weat_mean: mean(&weat_values),
            weat_values,
            relative_b_name_frequency,
            covariates: BTreeMap::new(),
            factors: BTreeMap::new(),
        }
    }
}

/// Writes `group_id, weat_mean, weat_rep_1..k, rel_b_name_freq`.
pub fn records_to_tsv(records: &[GroupBiasRecord]) -> Result<String> {
    let k = records.first().map_or(0, |r| r.weat_values.len());
    if records.iter().any(|r| r.weat_values.len() != k) {
        return Err(Error::InvalidArgument("records have differing repetition counts".into()));
    }
    let mut header = vec!["group_id".to_owned(), "weat_mean".to_owned()];
    header.extend((1..=k).map(|i| format!("weat_rep_{i}")));
    header.push("rel_b_name_freq".to_owned());
    let mut out = String::new();
    tsv::write_row(&mut out, &header.iter().map(String::as_str).collect::<Vec<_>>());
    for r in records {
        let mut fields = vec![r.group_id.clone(), r.weat_mean.to_string()];
        fields.extend(r.weat_values.iter().map(f64::to_string));
        fields.push(r.relative_b_name_frequency.to_string());
        tsv::write_row(&mut out, &fields.iter().map(String::as_str).collect::<Vec<_>>());
    }
    Ok(out)
}

pub fn records_from_tsv(text: &str) -> Result<Vec<GroupBiasRecord>> {
    let (header, rows) = tsv::read_rows(text)?;
    let n = header.len();
    if n < 3 || header[0] != "group_id" || header[1] != "weat_mean" || header[n - 1] != "rel_b_name_freq" {
        return Err(Error::parse(1, "unexpected group bias header"));
    }
    for (i, h) in header[2..n - 1].iter().enumerate() {
        if *h != format!("weat_rep_{}", i + 1) {
            return Err(Error::parse(1, format!("unexpected column {h:?}")));
        }
    }
    rows.into_iter()
        .map(|(line, f)| {
            let weat_values = f[2..n - 1]
                .iter()
                .map(|v| tsv::parse_field(line, "weat value", v))
                .collect::<Result<Vec<f64>>>()?;
            Ok(GroupBiasRecord {
                group_id: f[0].to_owned(),
                weat_mean: tsv::parse_field(line, "weat_mean", f[1])?,
                weat_values,
                relative_b_name_frequency: tsv::parse_field(line, "rel_b_name_freq", f[n - 1])?,
                covariates: BTreeMap::new(),
                factors: BTreeMap::new(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::TokenizedDocument;

    fn s(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|x| x.to_string()).collect()
    }

    fn crafted() -> DenseVectors {
        let mut v = DenseVectors::new(2);
        v.insert("a", vec![1.0, 0.0]).unwrap();
        v.insert("b", vec![0.0, 1.0]).unwrap();
        v.insert("x", vec![1.0, 0.0]).unwrap();
        v.insert("y", vec![0.0, 1.0]).unwrap();
        v
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!((cosine(&[1.0, 1.0], &[1.0, 0.0]).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(matches!(cosine(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::ZeroNorm)));
        assert!(matches!(cosine(&[1.0], &[1.0, 0.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn association_examples() {
        let v = crafted();
        assert_eq!(association(&v, "x", &["a"], &["b"]).unwrap(), 1.0);
        assert_eq!(association(&v, "x", &["a", "b"], &["a", "b"]).unwrap(), 0.0);
        let mut same = DenseVectors::new(2);
        for t in ["a", "b", "w"] {
            same.insert(t, vec![0.3, -0.7]).unwrap();
        }
        assert_eq!(association(&same, "w", &["a"], &["b"]).unwrap(), 0.0);
        match association(&v, "q", &["a", "zz"], &["b"]) {
            Err(Error::OutOfVocabulary(m)) => assert_eq!(m, s(&["q", "zz"])),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weat_crafted_model_scores_two() {
        let sets = WeatWordSets::new(s(&["a"]), s(&["b"]), s(&["x"]), s(&["y"])).unwrap();
        let score = weat(&crafted(), &sets).unwrap();
        assert_eq!(score.value, 2.0);
        assert_eq!(score.pleasant, vec![("x".to_string(), 1.0)]);
        assert_eq!(score.unpleasant, vec![("y".to_string(), -1.0)]);
        assert_eq!(score.recompute(), score.value);
    }

    #[test]
    fn weat_identical_vectors_is_zero() {
        let mut v = DenseVectors::new(3);
        for t in ["a", "b", "x", "y"] {
            v.insert(t, vec![1.0, 2.0, 3.0]).unwrap();
        }
        let sets = WeatWordSets::new(s(&["a"]), s(&["b"]), s(&["x"]), s(&["y"])).unwrap();
        assert_eq!(weat(&v, &sets).unwrap().value, 0.0);
    }

    #[test]
    fn weat_reports_all_missing_tokens() {
        let sets = WeatWordSets::new(s(&["a", "m1"]), s(&["b"]), s(&["x", "m2"]), s(&["y"])).unwrap();
        match weat(&crafted(), &sets) {
            Err(Error::OutOfVocabulary(m)) => assert_eq!(m, s(&["m1", "m2"])),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn word_set_validation() {
        assert!(WeatWordSets::new(s(&[]), s(&["b"]), s(&["x"]), s(&["y"])).is_err());
        assert!(WeatWordSets::new(s(&["a", "a"]), s(&["b"]), s(&["x"]), s(&["y"])).is_err());
        assert!(WeatWordSets::new(s(&["a"]), s(&["a"]), s(&["x"]), s(&["y"])).is_err());
        assert!(WeatWordSets::new(s(&["a"]), s(&["b"]), s(&["x"]), s(&["x"])).is_err());
        assert!(WeatWordSets::new(s(&["A"]), s(&["b"]), s(&["x"]), s(&["y"])).is_err());
    }

    #[test]
    fn prepare_unions_and_filters() {
        assert_eq!(union_lists(&[s(&["Emily"]), s(&["emily", "Claire"])]), s(&["emily", "claire"]));
        let raw = RawWordLists {
            names_a: vec![s(&["A"]), s(&["a", "rare"])],
            names_b: vec![s(&["b"])],
            pleasant: vec![s(&["x"])],
            unpleasant: vec![s(&["Y", "gone"])],
        };
        let prepared = prepare_word_sets(&raw, &crafted()).unwrap();
        assert_eq!(prepared.sets.names_a(), s(&["a"]));
        assert_eq!(prepared.dropped.names_a, s(&["rare"]));
        assert_eq!(prepared.dropped.unpleasant, s(&["gone"]));

        let raw = RawWordLists {
            unpleasant: vec![s(&["gone"])],
            ..raw
        };
        assert!(matches!(prepare_word_sets(&raw, &crafted()), Err(Error::EmptyWordSet("Y"))));
    }

    #[test]
    fn word_list_files_skip_comments() {
        assert_eq!(parse_word_list("# pleasant\nlove\n\n  peace \n#x\n"), s(&["love", "peace"]));
    }

    fn name_doc(tokens: &[&str]) -> TokenizedDocument {
        TokenizedDocument {
            group_id: "g".into(),
            tokens: s(tokens),
        }
    }

    #[test]
    fn relative_frequency_examples() {
        let sets = WeatWordSets::new(s(&["a1", "a2"]), s(&["b1"]), s(&["x"]), s(&["y"])).unwrap();
        let mut tokens = vec!["b1"; 3];
        tokens.extend(["a1"; 4]);
        tokens.extend(["a2"; 3]);
        tokens.extend(["x", "other"]);
        let corpus = vec![name_doc(&tokens)];
        assert!((relative_name_frequency(&corpus, &sets).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(relative_name_frequency(&vec![name_doc(&["a1", "x"])], &sets).unwrap(), 0.0);
        assert!(matches!(
            relative_name_frequency(&vec![name_doc(&["x", "y"])], &sets),
            Err(Error::NoNameOccurrences)
        ));
        // Order and sharding do not matter.
        let shards = [name_doc(&["b1", "a1"]), name_doc(&["a2", "a2", "b1"])];
        let mut merged = NameCounts::count(&shards[..1].to_vec(), &sets);
        merged.merge(NameCounts::count(&shards[1..].to_vec(), &sets));
        let reversed: Vec<_> = shards.iter().rev().cloned().collect();
        assert_eq!(merged, NameCounts::count(&reversed, &sets));
    }

    #[test]
    fn record_mean_and_tsv() {
        let r = GroupBiasRecord::new("g1".into(), vec![1.0, 2.0, 3.0, 4.0, 5.0], 0.25);
        assert_eq!(r.weat_mean, 3.0);
        let single = GroupBiasRecord::new("g2".into(), vec![0.7], 0.1);
        assert_eq!(single.weat_mean, 0.7);
        let text = records_to_tsv(&[r.clone()]).unwrap();
        assert_eq!(
            text,
            "group_id\tweat_mean\tweat_rep_1\tweat_rep_2\tweat_rep_3\tweat_rep_4\tweat_rep_5\trel_b_name_freq\n\
             g1\t3\t1\t2\t3\t4\t5\t0.25\n"
        );
        let back = records_from_tsv(&text).unwrap();
        assert_eq!(back, vec![r]);
        assert_eq!(records_to_tsv(&back).unwrap(), text);
    }
}
