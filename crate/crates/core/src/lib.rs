//! Measuring group-level linguistic bias with the word embedding association
//! test (WEAT), and the statistics needed to show when such estimates are
//! driven by category-word frequency rather than by bias.
//!
//! The crate is organised by pipeline stage:
//!
//! * [`corpus`]: ingestion, retweet filtering, tokenization, group inventories
//!   and seeded stratified sampling.
//! * [`embedding`]: CBOW with negative sampling, trained from scratch
//!   (baseline) or continued on a group sample (updated model).
//! * [`bias`]: cosine similarity, word associations, the WEAT statistic and
//!   relative category-name frequency.
//! * [`pipeline`]: the repeated baseline/update/score loop over groups.
//! * [`stats`]: standardization, OLS, partialling out, LOWESS and the
//!   association table.
//! * [`synth`]: synthetic grouped corpora with a positivity bias and varying
//!   name prevalence.

pub mod bias;
pub mod corpus;
pub mod covariates;
pub mod embedding;
mod error;
pub mod pipeline;
pub mod seed;
pub mod stats;
pub mod synth;
pub(crate) mod tsv;

pub use bias::{GroupBiasRecord, WeatScore, WeatWordSets, WordVectors};
pub use corpus::{Document, GroupInventory, SamplingPlan, TokenizedDocument};
pub use embedding::{EmbeddingModel, TrainerConfig, Vocabulary};
pub use error::{Error, ErrorKind, Result};
pub use stats::{AssociationTable, DataMatrix, RegressionResult};
pub use synth::{SynthConfig, SynthOutcomeSpec};
