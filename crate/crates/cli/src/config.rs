//! Run configuration: a sectioned TOML file plus `--section.key=value`
//! overrides.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};
use weatlab_core::pipeline::NameFrequencySource;
use weatlab_core::stats::{ControlSet, SdDenominator, DEFAULT_FRACTION, VAR_REL_B_FREQ};
use weatlab_core::{Error, Result, SamplingPlan, SynthConfig, SynthOutcomeSpec, TrainerConfig};

pub const LABEL_NO_CONTROLS: &str = "No controls";
pub const LABEL_STANDARD: &str = "Standard controls";
pub const LABEL_PREVALENCE: &str = "Percent black";
pub const LABEL_REL_FREQ: &str = "Relative black name freq.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub corpus: Option<PathBuf>,
    pub names_a: Vec<PathBuf>,
    pub names_b: Vec<PathBuf>,
    pub pleasant: Vec<PathBuf>,
    pub unpleasant: Vec<PathBuf>,
    pub covariates: Option<PathBuf>,
    pub out_dir: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Self {
            corpus: None,
            names_a: Vec::new(),
            names_b: Vec::new(),
            pleasant: Vec::new(),
            unpleasant: Vec::new(),
            covariates: None,
            out_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Master seed. When set it replaces the seeds of every other section.
    pub seed: Option<u64>,
    /// Concurrent group jobs; 0 means one per core.
    pub workers: usize,
    /// Outcome columns of the covariate file. Empty means every numeric
    /// column not used as a control or as the prevalence column.
    pub outcomes: Vec<String>,
    /// Covariate plotted against relative name frequency.
    pub prevalence_column: Option<String>,
    /// Optional standard-controls column list; used for the default control
    /// sets.
    pub standard_controls: Vec<String>,
    pub lowess_fraction: f64,
    pub name_frequency: NameFrequencySource,
    pub sd_denominator: SdDenominator,
    /// Print pipeline progress to stderr.
    pub progress: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: None,
            workers: 0,
            outcomes: Vec::new(),
            prevalence_column: None,
            standard_controls: Vec::new(),
            lowess_fraction: DEFAULT_FRACTION,
            name_frequency: NameFrequencySource::Full,
            sd_denominator: SdDenominator::Sample,
            progress: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub paths: Paths,
    pub run: RunSection,
    pub sampling: SamplingPlan,
    pub trainer: TrainerConfig,
    pub controls: Vec<ControlSet>,
    pub synth: Option<SynthConfig>,
    pub outcome: SynthOutcomeSpec,
}

fn config_error(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

/// Parses an override value as a TOML value, falling back to a bare string.
pub fn parse_value(raw: &str) -> Value {
    match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.to_owned())),
        Err(_) => Value::String(raw.to_owned()),
    }
}

/// Sets `section.key` (or a top-level `key`) in `table`.
pub fn set_key(table: &mut Table, key: &str, value: Value) -> Result<()> {
    match key.split_once('.') {
        None => {
            table.insert(key.to_owned(), value);
        }
        Some((section, rest)) => {
            if rest.contains('.') {
                return Err(Error::Config(format!("override key {key:?} is nested too deeply")));
            }
            let entry = table
                .entry(section.to_owned())
                .or_insert_with(|| Value::Table(Table::new()));
            match entry {
                Value::Table(t) => {
                    t.insert(rest.to_owned(), value);
                }
                _ => return Err(Error::Config(format!("{section} is not a section"))),
            }
        }
    }
    Ok(())
}

const PATH_KEYS: &[&str] = &["corpus", "names_a", "names_b", "pleasant", "unpleasant", "covariates", "out_dir"];

/// Makes relative paths in the `[paths]` section relative to `base`.
fn resolve_paths(table: &mut Table, base: &Path) {
    let Some(Value::Table(paths)) = table.get_mut("paths") else {
        return;
    };
    let fix = |v: &mut Value| {
        if let Value::String(s) = v {
            if Path::new(s.as_str()).is_relative() {
                *s = base.join(s.as_str()).to_string_lossy().into_owned();
            }
        }
    };
    for key in PATH_KEYS {
        match paths.get_mut(*key) {
            Some(Value::Array(items)) => items.iter_mut().for_each(fix),
            Some(v) => fix(v),
            None => {}
        }
    }
}

impl RunConfig {
    /// Reads `file` (if any), applies `overrides` in order, and validates.
    /// Relative paths in the file are taken relative to the file's directory;
    /// paths given as overrides are used as is.
    pub fn load(file: Option<&Path>, overrides: &[(String, Value)]) -> Result<Self> {
        let mut table = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                let mut t: Table = text.parse().map_err(config_error)?;
                resolve_paths(&mut t, path.parent().unwrap_or(Path::new("")));
                t
            }
            None => Table::new(),
        };
        for (key, value) in overrides {
            set_key(&mut table, key, value.clone())?;
        }
        let mut cfg: RunConfig = Value::Table(table).try_into().map_err(config_error)?;
        cfg.apply_master_seed();
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_master_seed(&mut self) {
        if let Some(seed) = self.run.seed {
            self.sampling.seed = seed;
            self.trainer.seed = seed;
            self.outcome.seed = seed;
            if let Some(s) = &mut self.synth {
                s.seed = seed;
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sampling.validate()?;
        self.trainer.validate()?;
        if let Some(s) = &self.synth {
            s.validate()?;
        }
        if !(self.run.lowess_fraction > 0.0 && self.run.lowess_fraction <= 1.0) {
            return Err(Error::Config("lowess_fraction must lie in (0, 1]".into()));
        }
        let mut labels = BTreeSet::new();
        for c in &self.controls {
            if !labels.insert(c.label.as_str()) {
                return Err(Error::Config(format!("duplicate control-set label {:?}", c.label)));
            }
        }
        Ok(())
    }

    /// Configured control sets, or the canonical columns when none are
    /// configured. Columns that need an unset covariate are left out.
    pub fn control_sets(&self) -> Vec<ControlSet> {
        if !self.controls.is_empty() {
            return self.controls.clone();
        }
        let mut sets = vec![ControlSet::new(LABEL_NO_CONTROLS, &[])];
        if !self.run.standard_controls.is_empty() {
            sets.push(ControlSet {
                label: LABEL_STANDARD.into(),
                covariates: self.run.standard_controls.clone(),
            });
        }
        if let Some(p) = &self.run.prevalence_column {
            sets.push(ControlSet {
                label: LABEL_PREVALENCE.into(),
                covariates: vec![p.clone()],
            });
        }
        sets.push(ControlSet::new(LABEL_REL_FREQ, &[VAR_REL_B_FREQ]));
        sets
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
