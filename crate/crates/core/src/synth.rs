//! Synthetic grouped corpora with a linguistic positivity bias and
//! group-varying name prevalence, plus outcomes tied to that prevalence.
//!
//! Each token position is independently a category name, a sentiment word or
//! a Zipf-distributed background token. Unless `association_strength` is
//! positive, sentiment words are drawn without regard to nearby names.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson, Zipf};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Document, TokenizedDocument};
use crate::error::{Error, Result};
use crate::seed::rng_for;
use crate::stats::standardize;
use crate::tsv;

/// Names of the first category in the public WEAT name lists.
pub const DEFAULT_NAMES_A: &[&str] = &[
    "adam", "harry", "josh", "roger", "alan", "frank", "justin", "ryan", "andrew", "jack", "matthew", "stephen",
    "brad", "greg", "paul", "jonathan", "peter", "amanda", "courtney", "heather", "melanie", "katie", "betsy",
    "kristin", "nancy", "stephanie", "ellen", "lauren", "colleen", "emily", "megan", "rachel",
];

/// Names of the second category.
pub const DEFAULT_NAMES_B: &[&str] = &[
    "alonzo", "jamel", "theo", "alphonse", "jerome", "leroy", "torrance", "darnell", "lamar", "lionel", "tyree",
    "deion", "lamont", "malik", "terrence", "tyrone", "lavon", "marcellus", "wardell", "nichelle", "shereen",
    "ebony", "latisha", "shaniqua", "jasmine", "tanisha", "tia", "lakisha", "latoya", "yolanda", "malika", "yvette",
];

pub const DEFAULT_PLEASANT: &[&str] = &[
    "caress", "freedom", "health", "love", "peace", "cheer", "friend", "heaven", "loyal", "pleasure", "diamond",
    "gentle", "honest", "lucky", "rainbow", "diploma", "gift", "honor", "miracle", "sunrise", "family", "happy",
    "laughter", "paradise", "vacation",
];

pub const DEFAULT_UNPLEASANT: &[&str] = &[
    "abuse", "crash", "filth", "murder", "sickness", "accident", "death", "grief", "poison", "stink", "assault",
    "disaster", "hatred", "pollute", "tragedy", "bomb", "divorce", "jail", "poverty", "ugly", "cancer", "evil",
    "kill", "rotten", "vomit",
];

/// How far back a sentiment position looks for names when
/// `association_strength` is positive.
const ASSOCIATION_WINDOW: usize = 5;

fn owned(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_groups: usize,
    pub docs_per_group: usize,
    /// Poisson mean of the document length; lengths below 3 are raised to 3.
    pub tokens_per_doc: usize,
    pub vocab_size: usize,
    pub zipf_exponent: f64,
    pub names_a: Vec<String>,
    pub names_b: Vec<String>,
    pub pleasant: Vec<String>,
    pub unpleasant: Vec<String>,
    pub name_rate: f64,
    pub sentiment_rate: f64,
    /// Odds of a sentiment position being pleasant rather than unpleasant.
    pub positivity_ratio: f64,
    /// Log-odds tilt toward pleasant after an A name and toward unpleasant
    /// after a B name.
    pub association_strength: f64,
    /// Share of B names among name positions, one per group. When absent the
    /// shares are log-spaced between `rel_b_freq_min` and `rel_b_freq_max`.
    pub rel_b_freq_per_group: Option<Vec<f64>>,
    pub rel_b_freq_min: f64,
    pub rel_b_freq_max: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_groups: 50,
            docs_per_group: 10_000,
            tokens_per_doc: 20,
            vocab_size: 5_000,
            zipf_exponent: 1.0,
            names_a: owned(DEFAULT_NAMES_A),
            names_b: owned(DEFAULT_NAMES_B),
            pleasant: owned(DEFAULT_PLEASANT),
            unpleasant: owned(DEFAULT_UNPLEASANT),
            name_rate: 0.02,
            sentiment_rate: 0.05,
            positivity_ratio: 2.0,
            association_strength: 0.0,
            rel_b_freq_per_group: None,
            rel_b_freq_min: 0.01,
            rel_b_freq_max: 0.5,
            seed: 0,
        }
    }
}

fn probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")));
    }
    Ok(())
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_groups == 0 || self.docs_per_group == 0 || self.tokens_per_doc == 0 || self.vocab_size == 0 {
            return Err(Error::Config("synth sizes must be positive".into()));
        }
        if !(self.zipf_exponent >= 0.0) {
            return Err(Error::Config("zipf_exponent must be non-negative".into()));
        }
        probability("name_rate", self.name_rate)?;
        probability("sentiment_rate", self.sentiment_rate)?;
        if self.name_rate + self.sentiment_rate >= 1.0 {
            return Err(Error::Config("name_rate + sentiment_rate must be below 1".into()));
        }
        if !(self.positivity_ratio > 0.0 && self.positivity_ratio.is_finite()) {
            return Err(Error::Config("positivity_ratio must be positive".into()));
        }
        if !(self.association_strength >= 0.0 && self.association_strength.is_finite()) {
            return Err(Error::Config("association_strength must be non-negative".into()));
        }
        for (label, list) in [
            ("names_a", &self.names_a),
            ("names_b", &self.names_b),
            ("pleasant", &self.pleasant),
            ("unpleasant", &self.unpleasant),
        ] {
            if list.is_empty() {
                return Err(Error::Config(format!("{label} is empty")));
            }
            if let Some(bad) = list.iter().find(|t| t.is_empty() || !t.chars().all(|c| c.is_alphanumeric() && !c.is_uppercase())) {
                return Err(Error::Config(format!("{label} token {bad:?} must be lowercase alphanumeric")));
            }
        }
        match &self.rel_b_freq_per_group {
            Some(v) => {
                if v.len() != self.n_groups {
                    return Err(Error::Config(format!(
                        "rel_b_freq_per_group has {} entries for {} groups",
                        v.len(),
                        self.n_groups
                    )));
                }
                for &p in v {
                    probability("rel_b_freq_per_group entry", p)?;
                }
            }
            None => {
                if !(self.rel_b_freq_min > 0.0 && self.rel_b_freq_min <= self.rel_b_freq_max && self.rel_b_freq_max < 1.0) {
                    return Err(Error::Config("need 0 < rel_b_freq_min <= rel_b_freq_max < 1".into()));
                }
            }
        }
        Ok(())
    }

    /// Configured B-name share of every group.
    pub fn rel_b_freqs(&self) -> Vec<f64> {
        if let Some(v) = &self.rel_b_freq_per_group {
            return v.clone();
        }
        let (lo, hi) = (self.rel_b_freq_min.ln(), self.rel_b_freq_max.ln());
        let n = self.n_groups;
        (0..n)
            .map(|i| {
                if n == 1 {
                    self.rel_b_freq_min
                } else {
                    (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()
                }
            })
            .collect()
    }

    pub fn group_id(&self, index: usize) -> String {
        let width = (self.n_groups.saturating_sub(1)).to_string().len().max(3);
        format!("g{index:0width$}")
    }
}

/// Per-group generation summary. Counts are over the emitted tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub group_id: String,
    pub true_rel_b_freq: f64,
    pub docs: u64,
    pub tokens: u64,
    pub a_count: u64,
    pub b_count: u64,
    pub pleasant_count: u64,
    pub unpleasant_count: u64,
}

impl GroundTruth {
    pub fn realized_rel_b_freq(&self) -> Option<f64> {
        let n = self.a_count + self.b_count;
        (n > 0).then(|| self.b_count as f64 / n as f64)
    }
}

const TRUTH_HEADER: &[&str] = &[
    "group_id",
    "true_rel_b_freq",
    "docs",
    "tokens",
    "a_count",
    "b_count",
    "pleasant_count",
    "unpleasant_count",
];

pub fn ground_truth_to_tsv(rows: &[GroundTruth]) -> String {
    let mut out = String::new();
    tsv::write_row(&mut out, TRUTH_HEADER);
    for r in rows {
        let f = [
            r.group_id.clone(),
            r.true_rel_b_freq.to_string(),
            r.docs.to_string(),
            r.tokens.to_string(),
            r.a_count.to_string(),
            r.b_count.to_string(),
            r.pleasant_count.to_string(),
            r.unpleasant_count.to_string(),
        ];
        tsv::write_row(&mut out, &f.iter().map(String::as_str).collect::<Vec<_>>());
    }
    out
}

pub fn ground_truth_from_tsv(text: &str) -> Result<Vec<GroundTruth>> {
    let (header, rows) = tsv::read_rows(text)?;
    tsv::expect_header(&header, TRUTH_HEADER)?;
    rows.into_iter()
        .map(|(line, f)| {
            Ok(GroundTruth {
                group_id: f[0].to_owned(),
                true_rel_b_freq: tsv::parse_field(line, "true_rel_b_freq", f[1])?,
                docs: tsv::parse_field(line, "docs", f[2])?,
                tokens: tsv::parse_field(line, "tokens", f[3])?,
                a_count: tsv::parse_field(line, "a_count", f[4])?,
                b_count: tsv::parse_field(line, "b_count", f[5])?,
                pleasant_count: tsv::parse_field(line, "pleasant_count", f[6])?,
                unpleasant_count: tsv::parse_field(line, "unpleasant_count", f[7])?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    /// Documents in group order.
    pub docs: Vec<TokenizedDocument>,
    pub ground_truth: Vec<GroundTruth>,
}

impl SynthCorpus {
    /// The corpus as raw documents, tokens joined by single spaces.
    pub fn documents(&self) -> impl Iterator<Item = Document> + '_ {
        self.docs.iter().map(|d| Document {
            group_id: d.group_id.clone(),
            text: d.tokens.join(" "),
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    NameA,
    NameB,
    Other,
}

struct Generator<'a> {
    cfg: &'a SynthConfig,
    zipf: Zipf<f64>,
    length: Poisson<f64>,
    background: Vec<String>,
}

impl<'a> Generator<'a> {
    fn new(cfg: &'a SynthConfig) -> Result<Self> {
        let zipf = Zipf::new(cfg.vocab_size as f64, cfg.zipf_exponent)
            .map_err(|e| Error::Config(format!("zipf: {e}")))?;
        let length = Poisson::new(cfg.tokens_per_doc as f64).map_err(|e| Error::Config(format!("poisson: {e}")))?;
        let background = (1..=cfg.vocab_size).map(|r| format!("w{r}")).collect();
        Ok(Self {
            cfg,
            zipf,
            length,
            background,
        })
    }

    fn pleasant_probability(&self, recent: &[Slot]) -> f64 {
        let mut log_odds = self.cfg.positivity_ratio.ln();
        if self.cfg.association_strength > 0.0 {
            let start = recent.len().saturating_sub(ASSOCIATION_WINDOW);
            let window = &recent[start..];
            if window.contains(&Slot::NameA) {
                log_odds += self.cfg.association_strength;
            }
            if window.contains(&Slot::NameB) {
                log_odds -= self.cfg.association_strength;
            }
        }
        1.0 / (1.0 + (-log_odds).exp())
    }

    fn group(&self, index: usize, rel_b: f64) -> (Vec<TokenizedDocument>, GroundTruth) {
        let cfg = self.cfg;
        let group_id = cfg.group_id(index);
        let mut rng: ChaCha8Rng = rng_for(cfg.seed, "synth-group", 0, &group_id);
        let mut truth = GroundTruth {
            group_id: group_id.clone(),
            true_rel_b_freq: rel_b,
            docs: cfg.docs_per_group as u64,
            tokens: 0,
            a_count: 0,
            b_count: 0,
            pleasant_count: 0,
            unpleasant_count: 0,
        };
        let pick = |rng: &mut ChaCha8Rng, list: &[String]| list[rng.random_range(0..list.len())].clone();
        let mut docs = Vec::with_capacity(cfg.docs_per_group);
        let mut slots = Vec::new();
        for _ in 0..cfg.docs_per_group {
            let len = (self.length.sample(&mut rng) as usize).max(3);
            let mut tokens = Vec::with_capacity(len);
            slots.clear();
            for _ in 0..len {
                let u: f64 = rng.random();
                let (token, slot) = if u < cfg.name_rate {
                    if rng.random_bool(rel_b) {
                        truth.b_count += 1;
                        (pick(&mut rng, &cfg.names_b), Slot::NameB)
                    } else {
                        truth.a_count += 1;
                        (pick(&mut rng, &cfg.names_a), Slot::NameA)
                    }
                } else if u < cfg.name_rate + cfg.sentiment_rate {
                    if rng.random_bool(self.pleasant_probability(&slots)) {
                        truth.pleasant_count += 1;
                        (pick(&mut rng, &cfg.pleasant), Slot::Other)
                    } else {
                        truth.unpleasant_count += 1;
                        (pick(&mut rng, &cfg.unpleasant), Slot::Other)
                    }
                } else {
                    let rank = self.zipf.sample(&mut rng) as usize;
                    (self.background[rank - 1].clone(), Slot::Other)
                };
                tokens.push(token);
                slots.push(slot);
            }
            truth.tokens += len as u64;
            docs.push(TokenizedDocument {
                group_id: group_id.clone(),
                tokens,
            });
        }
        (docs, truth)
    }
}

/// Generates every group from its own sub-seed, in parallel, and returns the
/// documents in group order. The result depends only on `cfg`.
pub fn generate_corpus(cfg: &SynthConfig) -> Result<SynthCorpus> {
    cfg.validate()?;
    let generator = Generator::new(cfg)?;
    let parts: Vec<_> = cfg
        .rel_b_freqs()
        .into_par_iter()
        .enumerate()
        .map(|(i, p)| generator.group(i, p))
        .collect();
    let mut docs = Vec::with_capacity(cfg.n_groups * cfg.docs_per_group);
    let mut ground_truth = Vec::with_capacity(cfg.n_groups);
    for (d, t) in parts {
        docs.extend(d);
        ground_truth.push(t);
    }
    Ok(SynthCorpus { docs, ground_truth })
}

/// Recounts names and sentiment words per group over `docs`, using the word
/// lists of `cfg`.
pub fn recount(cfg: &SynthConfig, docs: &[TokenizedDocument]) -> Vec<GroundTruth> {
    use std::collections::{BTreeMap, HashSet};
    let sets: [HashSet<&str>; 4] = [&cfg.names_a, &cfg.names_b, &cfg.pleasant, &cfg.unpleasant]
        .map(|l| l.iter().map(String::as_str).collect());
    let mut by_group: BTreeMap<&str, GroundTruth> = BTreeMap::new();
    for d in docs {
        let t = by_group.entry(&d.group_id).or_insert_with(|| GroundTruth {
            group_id: d.group_id.clone(),
            true_rel_b_freq: f64::NAN,
            docs: 0,
            tokens: 0,
            a_count: 0,
            b_count: 0,
            pleasant_count: 0,
            unpleasant_count: 0,
        });
        t.docs += 1;
        t.tokens += d.tokens.len() as u64;
        for tok in &d.tokens {
            let tok = tok.as_str();
            if sets[0].contains(tok) {
                t.a_count += 1;
            } else if sets[1].contains(tok) {
                t.b_count += 1;
            } else if sets[2].contains(tok) {
                t.pleasant_count += 1;
            } else if sets[3].contains(tok) {
                t.unpleasant_count += 1;
            }
        }
    }
    by_group.into_values().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthOutcomeSpec {
    pub loading_on_prevalence: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for SynthOutcomeSpec {
    fn default() -> Self {
        Self {
            loading_on_prevalence: 0.8,
            noise_sd: 0.6,
            seed: 0,
        }
    }
}

/// Column holding the configured B-name share in the outcome table.
pub const PREVALENCE_COLUMN: &str = "prevalence";
pub const OUTCOME_COLUMN: &str = "outcome";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRow {
    pub group_id: String,
    pub prevalence: f64,
    pub outcome: f64,
}

/// `outcome = loading * z(prevalence) + Normal(0, noise_sd)` per group, the
/// prevalence being the configured B-name share.
pub fn generate_outcomes(truth: &[GroundTruth], spec: &SynthOutcomeSpec) -> Result<Vec<OutcomeRow>> {
    if !(spec.noise_sd > 0.0 && spec.noise_sd.is_finite()) {
        return Err(Error::Config("noise_sd must be positive".into()));
    }
    let prevalence: Vec<f64> = truth.iter().map(|t| t.true_rel_b_freq).collect();
    let z = standardize(&prevalence)?;
    let noise = Normal::new(0.0, spec.noise_sd).map_err(|e| Error::Config(format!("noise: {e}")))?;
    let mut rng = rng_for(spec.seed, "outcome", 0, "");
    Ok(truth
        .iter()
        .zip(z)
        .map(|(t, z)| OutcomeRow {
            group_id: t.group_id.clone(),
            prevalence: t.true_rel_b_freq,
            outcome: spec.loading_on_prevalence * z + noise.sample(&mut rng),
        })
        .collect())
}

pub fn outcomes_to_tsv(rows: &[OutcomeRow]) -> String {
    let mut out = String::new();
    tsv::write_row(&mut out, &["group_id", PREVALENCE_COLUMN, OUTCOME_COLUMN]);
    for r in rows {
        tsv::write_row(&mut out, &[&r.group_id, &r.prevalence.to_string(), &r.outcome.to_string()]);
    }
    out
}
