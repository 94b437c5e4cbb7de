//! CBOW word embeddings with negative sampling.
//!
//! A *baseline* model is trained from scratch on a pooled corpus; an
//! *updated* model is a copy of a baseline trained further on one group's
//! sample, with the baseline vocabulary frozen.

mod io;
mod matrix;
pub mod sgd;
mod train;
mod vocab;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{read_binary, write_binary, write_text, MAGIC, FORMAT_VERSION};
pub use matrix::Matrix;
pub use train::{evaluate_loss, train_baseline, train_baseline_observed, train_updated};
pub use vocab::{build_vocabulary, Vocabulary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainerConfig {
    pub vector_dim: usize,
    pub min_count: u64,
    pub initial_lr: f64,
    /// Maximum context half-width; the effective width is drawn from
    /// `1..=window` at every position.
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub subsample_threshold: f64,
    pub seed: u64,
    /// Single-threaded, bit-reproducible training. When false, `threads`
    /// workers update the shared tables without synchronization.
    pub deterministic: bool,
    pub threads: usize,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            vector_dim: 100,
            min_count: 10,
            initial_lr: 0.025,
            window: 5,
            negatives: 5,
            epochs: 5,
            subsample_threshold: 1e-3,
            seed: 1,
            deterministic: true,
            threads: 1,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.vector_dim == 0 {
            return bad("vector_dim must be at least 1");
        }
        if self.min_count == 0 {
            return bad("min_count must be at least 1");
        }
        if self.negatives == 0 {
            return bad("negatives must be at least 1");
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if self.window == 0 {
            return bad("window must be at least 1");
        }
        if !(self.initial_lr > 0.0 && self.initial_lr.is_finite()) {
            return bad("initial_lr must be positive");
        }
        if !(0.0..=1.0).contains(&self.subsample_threshold) {
            return bad("subsample_threshold must lie in [0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub corpus: String,
    pub epochs: usize,
}

#[derive(Debug, Clone)]
pub struct EmbeddingModel {
    pub(crate) vocab: Arc<Vocabulary>,
    /// Word vectors; the rows WEAT operates on.
    pub(crate) input: Matrix<f32>,
    pub(crate) output: Matrix<f32>,
    pub(crate) config: TrainerConfig,
    pub(crate) provenance: Vec<Provenance>,
}

impl EmbeddingModel {
    /// Fresh model: inputs uniform in `[-0.5/dim, 0.5/dim]`, outputs zero.
    pub(crate) fn initialize(vocab: Arc<Vocabulary>, config: TrainerConfig, rng: &mut impl rand::Rng) -> Self {
        let dim = config.vector_dim;
        let half = 0.5 / dim as f32;
        let mut input = Matrix::zeros(vocab.len(), dim);
        for v in input.as_mut_slice() {
            *v = rng.random_range(-half..half);
        }
        Self {
            output: Matrix::zeros(vocab.len(), dim),
            vocab,
            input,
            config,
            provenance: Vec::new(),
        }
    }

    /// Assembles a model from raw parts, e.g. when loading from disk.
    pub fn from_parts(vocab: Vocabulary, input: Matrix<f32>, output: Matrix<f32>, config: TrainerConfig) -> Result<Self> {
        if input.rows() != vocab.len() || output.rows() != vocab.len() {
            return Err(Error::ModelFormat("matrix rows do not match vocabulary size".into()));
        }
        if input.cols() != output.cols() || input.cols() != config.vector_dim {
            return Err(Error::ModelFormat("matrix width does not match vector_dim".into()));
        }
        Ok(Self {
            vocab: Arc::new(vocab),
            input,
            output,
            config,
            provenance: Vec::new(),
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn shares_vocabulary_with(&self, other: &EmbeddingModel) -> bool {
        Arc::ptr_eq(&self.vocab, &other.vocab)
    }

    pub fn dim(&self) -> usize {
        self.input.cols()
    }

    pub fn config(&self) -> &TrainerConfig {
        &self.config
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn input_vectors(&self) -> &Matrix<f32> {
        &self.input
    }

    pub fn output_vectors(&self) -> &Matrix<f32> {
        &self.output
    }

    pub fn vector(&self, token: &str) -> Result<&[f32]> {
        match self.vocab.index_of(token) {
            Some(i) => Ok(self.input.row(i as usize)),
            None => Err(Error::OutOfVocabulary(vec![token.to_owned()])),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.input.as_slice().iter().chain(self.output.as_slice()).all(|v| v.is_finite())
    }
}
