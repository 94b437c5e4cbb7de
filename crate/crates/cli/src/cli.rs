//! Argument parsing. Generic `--section.key=value` overrides are pulled out
//! before clap sees the arguments.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use toml::Value;
use weatlab_core::Result;

use crate::commands;
use crate::config::{parse_value, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "weatlab", version, about = "WEAT bias estimates per group and their confounds")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed for sampling, training and synthesis.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Concurrent group jobs (0 = one per core).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Single-threaded, bit-reproducible training.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub deterministic: Option<bool>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Corpus in JSONL format.
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    #[arg(long, global = true)]
    pub names_a: Vec<PathBuf>,
    #[arg(long, global = true)]
    pub names_b: Vec<PathBuf>,
    #[arg(long, global = true)]
    pub pleasant: Vec<PathBuf>,
    #[arg(long, global = true)]
    pub unpleasant: Vec<PathBuf>,
    /// Covariate table (TSV or CSV, first column `group_id`).
    #[arg(long, global = true)]
    pub covariates: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count documents and tokens per group.
    Inventory,
    /// Generate a synthetic corpus, ground truth and outcomes.
    Synth,
    /// Run the full pipeline and the regressions.
    Run,
    /// Score a saved model.
    Weat {
        #[arg(long)]
        model: PathBuf,
    },
    /// Train and save the baseline model of one repetition.
    TrainBaseline {
        #[arg(long, default_value_t = 0)]
        rep: usize,
        /// Also write the word2vec text format.
        #[arg(long)]
        text: bool,
    },
    /// Continue a saved baseline on one group's sample.
    TrainUpdated {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 0)]
        rep: usize,
        #[arg(long)]
        text: bool,
    },
}

/// Splits `--section.key=value` arguments from the rest.
pub fn extract_overrides(args: Vec<OsString>) -> (Vec<OsString>, Vec<(String, Value)>) {
    let mut rest = Vec::new();
    let mut overrides = Vec::new();
    for arg in args {
        let parsed = arg.to_str().and_then(|s| s.strip_prefix("--")).and_then(|s| {
            let (key, value) = s.split_once('=')?;
            key.contains('.').then(|| (key.replace('-', "_"), parse_value(value)))
        });
        match parsed {
            Some(kv) => overrides.push(kv),
            None => rest.push(arg),
        }
    }
    (rest, overrides)
}

impl Cli {
    /// Named flags as overrides; they are applied after the generic ones.
    fn flag_overrides(&self) -> Vec<(String, Value)> {
        let path = |p: &PathBuf| Value::String(p.to_string_lossy().into_owned());
        let paths = |ps: &[PathBuf]| Value::Array(ps.iter().map(path).collect());
        let mut o = Vec::new();
        if let Some(s) = self.seed {
            o.push(("run.seed".to_owned(), Value::Integer(s as i64)));
        }
        if let Some(w) = self.workers {
            o.push(("run.workers".to_owned(), Value::Integer(w as i64)));
        }
        if let Some(d) = self.deterministic {
            o.push(("trainer.deterministic".to_owned(), Value::Boolean(d)));
        }
        if let Some(p) = &self.out_dir {
            o.push(("paths.out_dir".to_owned(), path(p)));
        }
        if let Some(p) = &self.corpus {
            o.push(("paths.corpus".to_owned(), path(p)));
        }
        if let Some(p) = &self.covariates {
            o.push(("paths.covariates".to_owned(), path(p)));
        }
        for (key, list) in [
            ("paths.names_a", &self.names_a),
            ("paths.names_b", &self.names_b),
            ("paths.pleasant", &self.pleasant),
            ("paths.unpleasant", &self.unpleasant),
        ] {
            if !list.is_empty() {
                o.push((key.to_owned(), paths(list)));
            }
        }
        o
    }
}

/// Parses `args` (without the program name), runs the subcommand and returns
/// the exit code. Errors are reported as JSON on `err`.
pub fn main_with_args(args: Vec<OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (rest, mut overrides) = extract_overrides(args);
    let cli = match Cli::try_parse_from(std::iter::once(OsString::from("weatlab")).chain(rest)) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { crate::EXIT_CONFIG } else { crate::EXIT_OK };
            let _ = if code == crate::EXIT_OK {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    overrides.extend(cli.flag_overrides());
    match run(&cli, &overrides, out) {
        Ok(()) => crate::EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "{}", crate::error_report(&e));
            crate::exit_code(&e)
        }
    }
}

fn run(cli: &Cli, overrides: &[(String, Value)], out: &mut dyn Write) -> Result<()> {
    let cfg = RunConfig::load(cli.config.as_deref(), overrides)?;
    match &cli.command {
        Command::Inventory => commands::cmd_inventory(&cfg, out).map(drop),
        Command::Synth => commands::cmd_synth(&cfg, out),
        Command::Run => commands::cmd_run(&cfg, out).map(drop),
        Command::Weat { model } => commands::cmd_weat(model, &cfg, out).map(drop),
        Command::TrainBaseline { rep, text } => commands::cmd_train_baseline(&cfg, *rep, *text, out).map(drop),
        Command::TrainUpdated { base, group, rep, text } => {
            commands::cmd_train_updated(&cfg, base, group, *rep, *text, out).map(drop)
        }
    }
}
