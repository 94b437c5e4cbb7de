//! Fixtures shared by the benchmarks.

use weatlab_core::corpus::TokenizedDocument;
use weatlab_core::synth::{generate_corpus, SynthConfig};

/// A small synthetic corpus, fixed by `seed`.
pub fn corpus(groups: usize, docs_per_group: usize, seed: u64) -> Vec<TokenizedDocument> {
    let cfg = SynthConfig {
        n_groups: groups,
        docs_per_group,
        vocab_size: 2000,
        seed,
        ..SynthConfig::default()
    };
    generate_corpus(&cfg).expect("valid config").docs
}
