//! The repeated baseline/update/score loop.
//!
//! For every repetition a stratified baseline sample is drawn and a baseline
//! model trained on it; each eligible group then gets its own sample, a copy
//! of the baseline continued on that sample, and a WEAT score. Per-group
//! scores are averaged over repetitions.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bias::{weat, GroupBiasRecord, NameCounts, PreparedWordSets, RawWordLists, WeatScore};
use crate::corpus::{eligible_groups, sample_baseline, sample_groups, CorpusStore, DocRef, SamplingPlan, StoreSample};
use crate::embedding::{build_vocabulary, train_baseline, train_updated, TrainerConfig};
use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// Which documents relative name frequency is counted over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NameFrequencySource {
    /// Every document of the group.
    #[default]
    Full,
    /// The group samples of all repetitions, pooled.
    Sample,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineConfig {
    /// `plan.seed` is the master seed for sampling and training.
    pub plan: SamplingPlan,
    /// Its `seed` field is replaced by per-model seeds derived from the
    /// master seed.
    pub trainer: TrainerConfig,
    /// Group jobs run concurrently on this many threads; 0 uses rayon's
    /// default.
    pub workers: usize,
    pub name_frequency: NameFrequencySource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Progress<'a> {
    BaselineTrained { rep: usize, vocabulary: usize },
    GroupScored { rep: usize, group: &'a str },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    /// Sorted by group id.
    pub records: Vec<GroupBiasRecord>,
    pub word_sets: PreparedWordSets,
    /// Every (group, repetition) score, sorted by group then repetition.
    pub scores: Vec<WeatScore>,
}

fn annotate(group: &str, rep: usize) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::Pipeline {
        group: group.to_owned(),
        rep,
        source: Box::new(e),
    }
}

pub fn run_group_pipeline(store: &CorpusStore, raw: &RawWordLists, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    run_group_pipeline_with(store, raw, cfg, &|_| {})
}

/// [`run_group_pipeline`] reporting progress to `progress`, which may be
/// called from worker threads.
pub fn run_group_pipeline_with(
    store: &CorpusStore,
    raw: &RawWordLists,
    cfg: &PipelineConfig,
    progress: &(dyn Fn(Progress<'_>) + Sync),
) -> Result<PipelineOutput> {
    let plan = &cfg.plan;
    plan.validate()?;
    cfg.trainer.validate()?;
    let groups: Vec<String> = eligible_groups(store.inventory(), plan).into_iter().collect();
    if groups.is_empty() {
        return Err(Error::NoEligibleGroups);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;

    // Baseline samples come first so that every repetition scores the same
    // word sets: those in all baseline vocabularies.
    let reps = plan.repetitions;
    let mut baselines: Vec<Vec<DocRef<'_>>> = Vec::with_capacity(reps);
    let mut vocabularies = Vec::with_capacity(reps);
    for rep in 0..reps {
        let sample = sample_baseline(store.iter(), store.inventory(), plan, rep).map_err(annotate("", rep))?;
        vocabularies.push(build_vocabulary(&sample, &cfg.trainer).map_err(annotate("", rep))?);
        baselines.push(sample);
    }
    let word_sets = crate::bias::prepare_word_sets_with(raw, |t| vocabularies.iter().all(|v| v.contains(t)))?;
    drop(vocabularies);
    let sets = &word_sets.sets;

    let mut per_group: BTreeMap<String, Vec<WeatScore>> = BTreeMap::new();
    let mut sample_counts: BTreeMap<String, NameCounts> = BTreeMap::new();
    for (rep, baseline_docs) in baselines.into_iter().enumerate() {
        let mut base_cfg = cfg.trainer.clone();
        base_cfg.seed = derive_seed(plan.seed, "baseline-train", rep as u64, "");
        let base = train_baseline(&baseline_docs, &base_cfg).map_err(annotate("", rep))?;
        drop(baseline_docs);
        progress(Progress::BaselineTrained {
            rep,
            vocabulary: base.vocabulary().len(),
        });

        let samples = sample_groups(store.iter(), &groups, plan, rep).map_err(annotate("", rep))?;
        if cfg.name_frequency == NameFrequencySource::Sample {
            for (g, docs) in &samples {
                sample_counts.entry(g.clone()).or_default().merge(NameCounts::count(docs, sets));
            }
        }
        let jobs: Vec<(&String, &Vec<DocRef<'_>>)> = samples.iter().collect();
        let scores: Vec<Result<WeatScore>> = pool.install(|| {
            jobs.par_iter()
                .map(|(g, docs)| {
                    let mut upd_cfg = cfg.trainer.clone();
                    upd_cfg.seed = derive_seed(plan.seed, "update-train", rep as u64, g);
                    let model = train_updated(&base, *docs, &upd_cfg)?;
                    let score = weat(&model, sets)?.with_context(g, rep);
                    progress(Progress::GroupScored { rep, group: g });
                    Ok(score)
                })
                .collect()
        });
        for ((g, _), score) in jobs.iter().zip(scores) {
            let score = score.map_err(annotate(g, rep))?;
            per_group.entry((*g).clone()).or_default().push(score);
        }
    }

    let mut records = Vec::with_capacity(groups.len());
    let mut all_scores = Vec::with_capacity(groups.len() * reps);
    for (g, scores) in per_group {
        let counts = match cfg.name_frequency {
            NameFrequencySource::Full => NameCounts::count(
                &StoreSample {
                    store,
                    group_id: &g,
                },
                sets,
            ),
            NameFrequencySource::Sample => sample_counts.get(&g).copied().unwrap_or_default(),
        };
        let rel = counts.relative_b().map_err(annotate(&g, 0))?;
        records.push(GroupBiasRecord::new(g, scores.iter().map(|s| s.value).collect(), rel));
        all_scores.extend(scores);
    }
    Ok(PipelineOutput {
        records,
        word_sets,
        scores: all_scores,
    })
}
