//! Subcommand implementations. Each writes its files under the configured
//! output directory and a short human-readable summary to `out`.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use weatlab_core::bias::{self, records_to_tsv, weat, PreparedWordSets, RawWordLists, WeatScore};
use weatlab_core::corpus::{self, eligible_groups, load_store, sample_baseline, sample_group, CorpusStore, IngestStats};
use weatlab_core::covariates::{join_covariates, CovariateTable, JoinReport};
use weatlab_core::embedding::{read_binary, train_baseline, train_updated, write_binary, write_text};
use weatlab_core::pipeline::{run_group_pipeline_with, PipelineConfig, Progress};
use weatlab_core::seed::derive_seed;
use weatlab_core::stats::{
    build_association_table, lowess, lowess_to_tsv, partial_out, standardize_with, DataMatrix, LowessPoint,
    TableOptions, VAR_REL_B_FREQ,
};
use weatlab_core::synth::{generate_corpus, generate_outcomes, ground_truth_to_tsv, outcomes_to_tsv};
use weatlab_core::{EmbeddingModel, Error, GroupBiasRecord, Result};

use crate::config::RunConfig;

pub const INVENTORY_FILE: &str = "inventory.tsv";
pub const GROUP_BIAS_FILE: &str = "group_bias.tsv";
pub const SCORES_FILE: &str = "weat_scores.json";
pub const WORD_SETS_FILE: &str = "word_sets.json";
pub const TABLE_TSV_FILE: &str = "association_table.tsv";
pub const TABLE_JSON_FILE: &str = "association_table.json";
pub const LOWESS_FILE: &str = "lowess.tsv";
pub const PARTIAL_FILE: &str = "partial.tsv";
pub const RUN_REPORT_FILE: &str = "run_report.json";
pub const SYNTH_CORPUS_FILE: &str = "corpus.jsonl";
pub const GROUND_TRUTH_FILE: &str = "ground_truth.tsv";
pub const OUTCOMES_FILE: &str = "outcomes.tsv";

fn io_at(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn out_dir(cfg: &RunConfig) -> Result<&Path> {
    let dir = cfg.paths.out_dir.as_path();
    fs::create_dir_all(dir).map_err(io_at(dir))?;
    Ok(dir)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(io_at(path))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

fn corpus_path(cfg: &RunConfig) -> Result<&Path> {
    cfg.paths
        .corpus
        .as_deref()
        .ok_or_else(|| Error::Config("no corpus path configured".into()))
}

pub fn load_corpus(path: &Path) -> Result<(CorpusStore, IngestStats)> {
    let file = File::open(path).map_err(io_at(path))?;
    load_store(BufReader::new(file))
}

/// Reads the four word-list groups; each may come from several files.
pub fn load_word_lists(cfg: &RunConfig) -> Result<RawWordLists> {
    let read = |label: &str, files: &[PathBuf]| -> Result<Vec<Vec<String>>> {
        if files.is_empty() {
            return Err(Error::Config(format!("no {label} word list configured")));
        }
        files
            .iter()
            .map(|p| Ok(bias::parse_word_list(&fs::read_to_string(p).map_err(io_at(p))?)))
            .collect()
    };
    Ok(RawWordLists {
        names_a: read("names_a", &cfg.paths.names_a)?,
        names_b: read("names_b", &cfg.paths.names_b)?,
        pleasant: read("pleasant", &cfg.paths.pleasant)?,
        unpleasant: read("unpleasant", &cfg.paths.unpleasant)?,
    })
}

fn pipeline_config(cfg: &RunConfig) -> PipelineConfig {
    PipelineConfig {
        plan: cfg.sampling.clone(),
        trainer: cfg.trainer.clone(),
        workers: cfg.run.workers,
        name_frequency: cfg.run.name_frequency,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InventorySummary {
    pub ingest: IngestStats,
    pub groups: usize,
    pub eligible: usize,
}

pub fn cmd_inventory(cfg: &RunConfig, out: &mut dyn Write) -> Result<InventorySummary> {
    let (store, ingest) = load_corpus(corpus_path(cfg)?)?;
    let dir = out_dir(cfg)?;
    write_file(&dir.join(INVENTORY_FILE), &store.inventory().to_tsv())?;
    let summary = InventorySummary {
        ingest,
        groups: store.inventory().len(),
        eligible: eligible_groups(store.inventory(), &cfg.sampling).len(),
    };
    writeln!(
        out,
        "{} groups, {} eligible at min_group_size {} ({} records, {} retweets, {} empty)",
        summary.groups,
        summary.eligible,
        cfg.sampling.min_group_size,
        ingest.records,
        ingest.retweets,
        ingest.empty
    )?;
    Ok(summary)
}

pub fn cmd_synth(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let synth = cfg
        .synth
        .as_ref()
        .ok_or_else(|| Error::Config("synth config required".into()))?;
    let corpus = generate_corpus(synth)?;
    let dir = out_dir(cfg)?;
    let path = dir.join(SYNTH_CORPUS_FILE);
    let mut w = BufWriter::new(File::create(&path).map_err(io_at(&path))?);
    for doc in corpus.documents() {
        writeln!(w, "{}", corpus::document_to_json(&doc)).map_err(io_at(&path))?;
    }
    w.flush().map_err(io_at(&path))?;
    write_file(&dir.join(GROUND_TRUTH_FILE), &ground_truth_to_tsv(&corpus.ground_truth))?;
    let outcomes = generate_outcomes(&corpus.ground_truth, &cfg.outcome)?;
    write_file(&dir.join(OUTCOMES_FILE), &outcomes_to_tsv(&outcomes))?;
    writeln!(out, "group\tconfigured_rel_b\trealized_rel_b\tname_tokens")?;
    for t in &corpus.ground_truth {
        let realized = t.realized_rel_b_freq().map_or("NA".to_owned(), |r| format!("{r:.4}"));
        writeln!(
            out,
            "{}\t{:.4}\t{realized}\t{}",
            t.group_id,
            t.true_rel_b_freq,
            t.a_count + t.b_count
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct PartialRow {
    outcome: String,
    beta: Option<f64>,
    se: Option<f64>,
    p: Option<f64>,
    n: usize,
    error: Option<String>,
}

/// WEAT coefficient on each outcome after partialling out relative name
/// frequency, all variables standardized.
fn partial_fits(records: &[GroupBiasRecord], outcomes: &[String], cfg: &RunConfig) -> Vec<PartialRow> {
    outcomes
        .iter()
        .map(|o| {
            let rows: Vec<&GroupBiasRecord> = records.iter().filter(|r| r.covariates.contains_key(o)).collect();
            let fit = || -> Result<_> {
                let d = cfg.run.sd_denominator;
                let y = standardize_with(&rows.iter().map(|r| r.covariates[o]).collect::<Vec<_>>(), d)?;
                let x = standardize_with(&rows.iter().map(|r| r.weat_mean).collect::<Vec<_>>(), d)?;
                let z = standardize_with(&rows.iter().map(|r| r.relative_b_name_frequency).collect::<Vec<_>>(), d)?;
                partial_out(&y, &x, &DataMatrix::new(vec![VAR_REL_B_FREQ.into()], vec![z])?)
            };
            match fit() {
                Ok(p) => PartialRow {
                    outcome: o.clone(),
                    beta: Some(p.beta),
                    se: Some(p.se),
                    p: Some(p.p),
                    n: rows.len(),
                    error: None,
                },
                Err(e) => PartialRow {
                    outcome: o.clone(),
                    beta: None,
                    se: None,
                    p: None,
                    n: rows.len(),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

fn partial_tsv(rows: &[PartialRow]) -> String {
    let fmt = |v: Option<f64>| v.map_or("NA".to_owned(), |x| x.to_string());
    let mut s = String::from("outcome\tbeta\tse\tp\tn\n");
    for r in rows {
        s.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", r.outcome, fmt(r.beta), fmt(r.se), fmt(r.p), r.n));
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub ingest: IngestStats,
    pub groups: usize,
    pub word_sets: PreparedWordSets,
    pub join: Option<JoinReport>,
    pub outcomes: Vec<String>,
    pub cell_errors: Vec<String>,
}

pub fn cmd_run(cfg: &RunConfig, out: &mut dyn Write) -> Result<RunReport> {
    let raw = load_word_lists(cfg)?;
    let covariates = match &cfg.paths.covariates {
        Some(p) => Some(CovariateTable::read(File::open(p).map_err(io_at(p))?)?),
        None => None,
    };
    let (store, ingest) = load_corpus(corpus_path(cfg)?)?;
    let dir = out_dir(cfg)?;

    let show = cfg.run.progress;
    let progress = move |p: Progress<'_>| {
        if show {
            match p {
                Progress::BaselineTrained { rep, vocabulary } => {
                    eprintln!("repetition {}: baseline trained, {vocabulary} words", rep + 1)
                }
                Progress::GroupScored { rep, group } => eprintln!("repetition {}: scored {group}", rep + 1),
            }
        }
    };
    let output = run_group_pipeline_with(&store, &raw, &pipeline_config(cfg), &progress)?;
    let mut records = output.records;
    write_file(&dir.join(GROUP_BIAS_FILE), &records_to_tsv(&records)?)?;
    write_file(&dir.join(SCORES_FILE), &json(&output.scores))?;
    write_file(&dir.join(WORD_SETS_FILE), &json(&output.word_sets))?;
    writeln!(out, "scored {} groups over {} repetitions", records.len(), cfg.sampling.repetitions)?;
    if !output.word_sets.dropped.is_empty() {
        writeln!(out, "dropped out-of-vocabulary tokens: {:?}", output.word_sets.dropped)?;
    }

    let mut report = RunReport {
        ingest,
        groups: records.len(),
        word_sets: output.word_sets,
        join: None,
        outcomes: Vec::new(),
        cell_errors: Vec::new(),
    };
    if let Some(table) = covariates {
        let join = join_covariates(&mut records, &table);
        let control_sets = cfg.control_sets();
        let outcomes = if cfg.run.outcomes.is_empty() {
            table
                .columns
                .iter()
                .filter(|c| !table.categorical.contains(*c))
                .filter(|c| Some(*c) != cfg.run.prevalence_column.as_ref())
                .filter(|c| !control_sets.iter().any(|s| s.covariates.contains(c)))
                .cloned()
                .collect()
        } else {
            cfg.run.outcomes.clone()
        };
        let assoc = build_association_table(
            &records,
            &outcomes,
            &control_sets,
            TableOptions {
                denominator: cfg.run.sd_denominator,
            },
        );
        for row in &assoc.rows {
            for (label, cell) in assoc.columns.iter().zip(&row.cells) {
                if let Some(e) = &cell.error {
                    let msg = format!("{} / {label}: {e}", row.outcome);
                    writeln!(out, "regression failed: {msg}")?;
                    report.cell_errors.push(msg);
                }
            }
        }
        write_file(&dir.join(TABLE_TSV_FILE), &assoc.to_tsv())?;
        write_file(&dir.join(TABLE_JSON_FILE), &assoc.to_json())?;
        write_file(&dir.join(PARTIAL_FILE), &partial_tsv(&partial_fits(&records, &outcomes, cfg)))?;

        if let Some(col) = &cfg.run.prevalence_column {
            let pts: Vec<(f64, f64)> = records
                .iter()
                .filter_map(|r| r.covariates.get(col).map(|&x| (x, r.relative_b_name_frequency)))
                .collect();
            let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            let fitted = lowess(&x, &y, cfg.run.lowess_fraction)?;
            let points: Vec<LowessPoint> = x
                .iter()
                .zip(&y)
                .zip(fitted)
                .map(|((&x, &y), fitted)| LowessPoint { x, y, fitted })
                .collect();
            write_file(&dir.join(LOWESS_FILE), &lowess_to_tsv(&points))?;
        }
        writeln!(out, "{}", assoc.to_tsv().trim_end())?;
        report.join = Some(join);
        report.outcomes = outcomes;
    }
    write_file(&dir.join(RUN_REPORT_FILE), &json(&report))?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct WeatReport {
    #[serde(flatten)]
    pub score: WeatScore,
    pub dropped: bias::DroppedTokens,
}

pub fn cmd_weat(model_path: &Path, cfg: &RunConfig, out: &mut dyn Write) -> Result<WeatReport> {
    let raw = load_word_lists(cfg)?;
    let model = read_model(model_path)?;
    let prepared = bias::prepare_word_sets(&raw, &model)?;
    let report = WeatReport {
        score: weat(&model, &prepared.sets)?,
        dropped: prepared.dropped,
    };
    write!(out, "{}", json(&report))?;
    Ok(report)
}

pub fn read_model(path: &Path) -> Result<EmbeddingModel> {
    read_binary(BufReader::new(File::open(path).map_err(io_at(path))?))
}

fn save_model(model: &EmbeddingModel, path: &Path, text: bool) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(io_at(path))?);
    write_binary(model, &mut w)?;
    w.flush().map_err(io_at(path))?;
    if text {
        let txt = path.with_extension("txt");
        let mut w = BufWriter::new(File::create(&txt).map_err(io_at(&txt))?);
        write_text(model, &mut w)?;
        w.flush().map_err(io_at(&txt))?;
    }
    Ok(())
}

/// Trains the baseline of repetition `rep` exactly as `run` does and saves it
/// as `baseline_rep<rep>.bin`.
pub fn cmd_train_baseline(cfg: &RunConfig, rep: usize, text: bool, out: &mut dyn Write) -> Result<PathBuf> {
    let (store, _) = load_corpus(corpus_path(cfg)?)?;
    let sample = sample_baseline(store.iter(), store.inventory(), &cfg.sampling, rep)?;
    let mut trainer = cfg.trainer.clone();
    trainer.seed = derive_seed(cfg.sampling.seed, "baseline-train", rep as u64, "");
    let model = train_baseline(&sample, &trainer)?;
    let path = out_dir(cfg)?.join(format!("baseline_rep{rep}.bin"));
    save_model(&model, &path, text)?;
    writeln!(
        out,
        "trained baseline on {} documents, {} words: {}",
        sample.len(),
        model.vocabulary().len(),
        path.display()
    )?;
    Ok(path)
}

/// Continues `base` on the repetition-`rep` sample of `group`, as `run`
/// does, and saves `updated_<group>_rep<rep>.bin`.
pub fn cmd_train_updated(
    cfg: &RunConfig,
    base: &Path,
    group: &str,
    rep: usize,
    text: bool,
    out: &mut dyn Write,
) -> Result<PathBuf> {
    let base = read_model(base)?;
    let (store, _) = load_corpus(corpus_path(cfg)?)?;
    let sample = sample_group(store.iter(), group, &cfg.sampling, rep)?;
    let mut trainer = cfg.trainer.clone();
    trainer.seed = derive_seed(cfg.sampling.seed, "update-train", rep as u64, group);
    let model = train_updated(&base, &sample, &trainer)?;
    let path = out_dir(cfg)?.join(format!("updated_{group}_rep{rep}.bin"));
    save_model(&model, &path, text)?;
    writeln!(out, "continued training on {} documents: {}", sample.len(), path.display())?;
    Ok(path)
}
