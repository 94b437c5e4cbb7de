use std::collections::HashMap;

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use super::TrainerConfig;
use crate::corpus::TokenSource;
use crate::error::{Error, Result};

/// Exponent applied to unigram counts for the noise distribution.
pub const NOISE_EXPONENT: f64 = 0.75;

/// Retained tokens ordered by descending count (ties by token), with the
/// negative-sampling noise distribution.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
    noise: Vec<f64>,
    sampler: WeightedAliasIndex<f64>,
    total: u64,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.words == other.words && self.counts == other.counts
    }
}

impl Vocabulary {
    /// Builds a vocabulary from `(token, count)` pairs, keeping the given
    /// order. Counts must be positive and tokens unique.
    pub fn from_counts(entries: Vec<(String, u64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVocabulary { min_count: 0 });
        }
        let mut index = HashMap::with_capacity(entries.len());
        let mut words = Vec::with_capacity(entries.len());
        let mut counts = Vec::with_capacity(entries.len());
        for (i, (w, c)) in entries.into_iter().enumerate() {
            if c == 0 {
                return Err(Error::ModelFormat(format!("token {w:?} has zero count")));
            }
            if index.insert(w.clone(), i as u32).is_some() {
                return Err(Error::ModelFormat(format!("duplicate token {w:?}")));
            }
            words.push(w);
            counts.push(c);
        }
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(NOISE_EXPONENT)).collect();
        let z: f64 = weights.iter().sum();
        let noise = weights.iter().map(|w| w / z).collect();
        let sampler = WeightedAliasIndex::new(weights).map_err(|e| Error::ModelFormat(e.to_string()))?;
        Ok(Self {
            total: counts.iter().sum(),
            words,
            counts,
            index,
            noise,
            sampler,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn word(&self, i: u32) -> &str {
        &self.words[i as usize]
    }

    pub fn count(&self, i: u32) -> u64 {
        self.counts[i as usize]
    }

    pub fn total_count(&self) -> u64 {
        self.total
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.words.iter().map(String::as_str).zip(self.counts.iter().copied())
    }

    /// Noise probability of each word, proportional to `count^0.75`.
    pub fn noise_distribution(&self) -> &[f64] {
        &self.noise
    }

    pub fn sample_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.sampler.sample(rng) as u32
    }

    /// Probability of keeping each occurrence under frequent-word
    /// subsampling: `min(1, sqrt(t / f(w)))`.
    pub fn keep_probabilities(&self, threshold: f64) -> Vec<f64> {
        let total = self.total as f64;
        self.counts
            .iter()
            .map(|&c| {
                let f = c as f64 / total;
                if threshold > 0.0 && f > threshold {
                    (threshold / f).sqrt()
                } else {
                    1.0
                }
            })
            .collect()
    }

    /// Maps each document to vocabulary ids, dropping out-of-vocabulary
    /// tokens and documents left empty.
    pub fn encode<C: TokenSource + ?Sized>(&self, corpus: &C) -> Vec<Vec<u32>> {
        let mut docs = Vec::new();
        corpus.for_each_document(&mut |tokens| {
            let ids: Vec<u32> = tokens.filter_map(|t| self.index_of(t)).collect();
            if !ids.is_empty() {
                docs.push(ids);
            }
        });
        docs
    }
}

/// Counts every token and keeps those reaching `config.min_count`.
pub fn build_vocabulary<C: TokenSource + ?Sized>(corpus: &C, config: &TrainerConfig) -> Result<Vocabulary> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    corpus.for_each_document(&mut |tokens| {
        for t in tokens {
            match counts.get_mut(t) {
                Some(c) => *c += 1,
                None => {
                    counts.insert(t.to_owned(), 1);
                }
            }
        }
    });
    let mut kept: Vec<(String, u64)> = counts.into_iter().filter(|(_, c)| *c >= config.min_count).collect();
    if kept.is_empty() {
        return Err(Error::EmptyVocabulary {
            min_count: config.min_count,
        });
    }
    kept.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Vocabulary::from_counts(kept)
}
