use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::sgd::{cbow_step, ns_loss, Example, Scratch};
use super::{build_vocabulary, EmbeddingModel, Provenance, TrainerConfig, Vocabulary};
use crate::corpus::TokenSource;
use crate::error::{Error, Result};
use crate::seed::rng_for;

/// Learning rate never decays below this fraction of the initial rate.
const MIN_LR_FRACTION: f64 = 1e-4;

struct Schedule {
    initial_lr: f64,
    total: u64,
}

impl Schedule {
    fn lr(&self, processed: u64) -> f32 {
        let progress = processed as f64 / (self.total as f64 + 1.0);
        (self.initial_lr * (1.0 - progress).max(MIN_LR_FRACTION)) as f32
    }
}

struct Worker<'a> {
    vocab: &'a Vocabulary,
    keep: &'a [f64],
    config: &'a TrainerConfig,
    schedule: &'a Schedule,
    processed: &'a AtomicU64,
}

impl Worker<'_> {
    fn run(&self, input: &mut [f32], output: &mut [f32], docs: &[Vec<u32>], rng: &mut ChaCha8Rng) {
        let dim = self.config.vector_dim;
        let mut scratch = Scratch::new(dim);
        let mut sentence = Vec::new();
        let mut context = Vec::with_capacity(2 * self.config.window);
        let mut targets = Vec::with_capacity(self.config.negatives + 1);

        for doc in docs {
            let lr = self.schedule.lr(self.processed.load(Ordering::Relaxed));
            sentence.clear();
            for &w in doc {
                let p = self.keep[w as usize];
                if p >= 1.0 || rng.random::<f64>() < p {
                    sentence.push(w as usize);
                }
            }
            for pos in 0..sentence.len() {
                let span = rng.random_range(1..=self.config.window);
                let lo = pos.saturating_sub(span);
                let hi = (pos + span).min(sentence.len() - 1);
                context.clear();
                context.extend((lo..=hi).filter(|&j| j != pos).map(|j| sentence[j]));
                if context.is_empty() {
                    continue;
                }
                let word = sentence[pos];
                targets.clear();
                targets.push((word, true));
                for _ in 0..self.config.negatives {
                    let t = self.vocab.sample_noise(rng) as usize;
                    if t != word {
                        targets.push((t, false));
                    }
                }
                let ex = Example {
                    context: &context,
                    targets: &targets,
                };
                cbow_step(input, output, dim, ex, lr, &mut scratch);
            }
            self.processed.fetch_add(doc.len() as u64, Ordering::Relaxed);
        }
    }
}

/// Raw table pointers handed to hogwild workers.
#[derive(Clone, Copy)]
struct SharedTables {
    input: *mut f32,
    output: *mut f32,
    len: usize,
}

// Workers race on the tables on purpose (hogwild SGD); updates may be lost
// but every access stays in bounds.
unsafe impl Send for SharedTables {}
unsafe impl Sync for SharedTables {}

fn train_encoded(
    model: &mut EmbeddingModel,
    docs: &[Vec<u32>],
    config: &TrainerConfig,
    observer: &mut dyn FnMut(usize, &EmbeddingModel),
) {
    let vocab = Arc::clone(&model.vocab);
    let keep = vocab.keep_probabilities(config.subsample_threshold);
    let words: u64 = docs.iter().map(|d| d.len() as u64).sum();
    let schedule = Schedule {
        initial_lr: config.initial_lr,
        total: words * config.epochs as u64,
    };
    let processed = AtomicU64::new(0);
    let worker = Worker {
        vocab: &vocab,
        keep: &keep,
        config,
        schedule: &schedule,
        processed: &processed,
    };

    let threads = config.threads.max(1).min(docs.len().max(1));
    if config.deterministic || threads == 1 {
        let mut rng = rng_for(config.seed, "sgd", 0, "");
        for epoch in 1..=config.epochs {
            worker.run(model.input.as_mut_slice(), model.output.as_mut_slice(), docs, &mut rng);
            observer(epoch, model);
        }
        return;
    }

    let tables = SharedTables {
        input: model.input.as_mut_slice().as_mut_ptr(),
        output: model.output.as_mut_slice().as_mut_ptr(),
        len: model.input.as_slice().len(),
    };
    for epoch in 1..=config.epochs {
        std::thread::scope(|s| {
            for t in 0..threads {
                let chunk = &docs[t * docs.len() / threads..(t + 1) * docs.len() / threads];
                let worker = &worker;
                s.spawn(move || {
                    let tables = tables;
                    // SAFETY: the pointers come from live matrices of `len`
                    // elements that outlive the scope. Concurrent writes are
                    // the accepted hogwild race.
                    let (input, output) = unsafe {
                        (
                            std::slice::from_raw_parts_mut(tables.input, tables.len),
                            std::slice::from_raw_parts_mut(tables.output, tables.len),
                        )
                    };
                    let mut rng = rng_for(config.seed, "sgd-hogwild", epoch as u64, &t.to_string());
                    worker.run(input, output, chunk, &mut rng);
                });
            }
        });
        observer(epoch, model);
    }
}

pub fn train_baseline<C: TokenSource + ?Sized>(corpus: &C, config: &TrainerConfig) -> Result<EmbeddingModel> {
    train_baseline_observed(corpus, config, &mut |_, _| {})
}

/// Like [`train_baseline`], calling `observer` with the model after every
/// epoch.
pub fn train_baseline_observed<C: TokenSource + ?Sized>(
    corpus: &C,
    config: &TrainerConfig,
    observer: &mut dyn FnMut(usize, &EmbeddingModel),
) -> Result<EmbeddingModel> {
    config.validate()?;
    let vocab = Arc::new(build_vocabulary(corpus, config)?);
    let docs = vocab.encode(corpus);
    let mut model = EmbeddingModel::initialize(vocab, config.clone(), &mut rng_for(config.seed, "init", 0, ""));
    train_encoded(&mut model, &docs, config, observer);
    model.provenance.push(Provenance {
        corpus: "baseline".into(),
        epochs: config.epochs,
    });
    Ok(model)
}

/// Continues training a copy of `base` on `group_corpus`. The vocabulary,
/// including its noise distribution, stays that of the baseline; tokens
/// outside it are skipped. The learning-rate schedule restarts.
pub fn train_updated<C: TokenSource + ?Sized>(
    base: &EmbeddingModel,
    group_corpus: &C,
    config: &TrainerConfig,
) -> Result<EmbeddingModel> {
    config.validate()?;
    if config.vector_dim != base.dim() {
        return Err(Error::Config(format!(
            "vector_dim {} does not match the base model's {}",
            config.vector_dim,
            base.dim()
        )));
    }
    let docs = base.vocab.encode(group_corpus);
    if docs.is_empty() {
        return Err(Error::NoTrainableTokens);
    }
    let mut model = base.clone();
    model.config = config.clone();
    train_encoded(&mut model, &docs, config, &mut |_, _| {});
    model.provenance.push(Provenance {
        corpus: "updated".into(),
        epochs: config.epochs,
    });
    Ok(model)
}

/// Mean negative-sampling loss per position over `corpus`, without updates
/// or subsampling. Contexts and noise words are drawn from `seed`, so two
/// evaluations with the same seed see identical examples.
pub fn evaluate_loss<C: TokenSource + ?Sized>(model: &EmbeddingModel, corpus: &C, seed: u64) -> Result<f64> {
    let docs = model.vocab.encode(corpus);
    let cfg = &model.config;
    let dim = model.dim();
    let mut rng = rng_for(seed, "evaluate", 0, "");
    let (mut total, mut n) = (0.0f64, 0u64);
    let mut context = Vec::new();
    let mut targets = Vec::new();
    for doc in &docs {
        for pos in 0..doc.len() {
            let span = rng.random_range(1..=cfg.window);
            let lo = pos.saturating_sub(span);
            let hi = (pos + span).min(doc.len() - 1);
            context.clear();
            context.extend((lo..=hi).filter(|&j| j != pos).map(|j| doc[j] as usize));
            if context.is_empty() {
                continue;
            }
            let word = doc[pos] as usize;
            targets.clear();
            targets.push((word, true));
            for _ in 0..cfg.negatives {
                let t = model.vocab.sample_noise(&mut rng) as usize;
                if t != word {
                    targets.push((t, false));
                }
            }
            let ex = Example {
                context: &context,
                targets: &targets,
            };
            total += f64::from(ns_loss(model.input.as_slice(), model.output.as_slice(), dim, ex));
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::NoTrainableTokens);
    }
    Ok(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::TokenizedDocument;

    fn toy_corpus(docs: usize, seed: u64) -> Vec<TokenizedDocument> {
        let mut rng = rng_for(seed, "toy", 0, "");
        (0..docs)
            .map(|_| TokenizedDocument {
                group_id: "g".into(),
                tokens: (0..12).map(|_| format!("w{}", rng.random_range(0..30))).collect(),
            })
            .collect()
    }

    fn small_config() -> TrainerConfig {
        TrainerConfig {
            vector_dim: 8,
            min_count: 2,
            epochs: 2,
            ..Default::default()
        }
    }

    #[test]
    fn deterministic_training_is_reproducible() {
        let corpus = toy_corpus(200, 1);
        let a = train_baseline(&corpus, &small_config()).unwrap();
        let b = train_baseline(&corpus, &small_config()).unwrap();
        assert_eq!(a.input, b.input);
        assert_eq!(a.output, b.output);
        let c = train_baseline(&corpus, &TrainerConfig { seed: 99, ..small_config() }).unwrap();
        assert_ne!(a.input, c.input);
    }

    #[test]
    fn vectors_are_finite_and_nonzero() {
        let corpus = toy_corpus(200, 2);
        let m = train_baseline(&corpus, &small_config()).unwrap();
        assert!(m.is_finite());
        for (w, _) in m.vocabulary().iter() {
            let v = m.vector(w).unwrap();
            assert_eq!(v.len(), 8);
            assert!(v.iter().map(|x| x * x).sum::<f32>() > 0.0);
        }
        assert_eq!(m.provenance()[0].corpus, "baseline");
    }

    #[test]
    fn default_dimension_is_one_hundred() {
        let corpus = toy_corpus(50, 3);
        let cfg = TrainerConfig { min_count: 2, epochs: 1, ..Default::default() };
        let m = train_baseline(&corpus, &cfg).unwrap();
        assert_eq!(m.vector("w1").unwrap().len(), 100);
        assert_eq!(m.vector("w1").unwrap(), m.vector("w1").unwrap());
        match m.vector("nope") {
            Err(Error::OutOfVocabulary(t)) => assert_eq!(t, vec!["nope".to_string()]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn updated_training_leaves_base_untouched() {
        let corpus = toy_corpus(200, 4);
        let base = train_baseline(&corpus, &small_config()).unwrap();
        let snapshot = base.clone();
        let group = toy_corpus(50, 5);
        let updated = train_updated(&base, &group, &small_config()).unwrap();
        assert_eq!(base.input, snapshot.input);
        assert_eq!(base.output, snapshot.output);
        assert_ne!(updated.input, base.input);
        assert!(updated.shares_vocabulary_with(&base));
        assert_eq!(updated.vocabulary(), base.vocabulary());
        assert_eq!(updated.provenance().len(), 2);
    }

    #[test]
    fn updated_training_needs_known_tokens() {
        let corpus = toy_corpus(100, 6);
        let base = train_baseline(&corpus, &small_config()).unwrap();
        let empty: Vec<TokenizedDocument> = Vec::new();
        assert!(matches!(train_updated(&base, &empty, &small_config()), Err(Error::NoTrainableTokens)));
        let unknown = vec![TokenizedDocument {
            group_id: "g".into(),
            tokens: vec!["zzz".into(); 5],
        }];
        assert!(matches!(train_updated(&base, &unknown, &small_config()), Err(Error::NoTrainableTokens)));
    }

    #[test]
    fn hogwild_mode_trains_finite_vectors() {
        let corpus = toy_corpus(400, 7);
        let cfg = TrainerConfig {
            deterministic: false,
            threads: 4,
            ..small_config()
        };
        let m = train_baseline(&corpus, &cfg).unwrap();
        assert!(m.is_finite());
    }

    #[test]
    fn learning_rate_decays_linearly_to_floor() {
        let s = Schedule { initial_lr: 0.025, total: 1000 };
        assert!((s.lr(0) - 0.025).abs() < 1e-9);
        assert!((f64::from(s.lr(500)) - 0.025 * (1.0 - 500.0 / 1001.0)).abs() < 1e-8);
        assert!((f64::from(s.lr(5000)) - 0.025e-4).abs() < 1e-10);
    }
}
