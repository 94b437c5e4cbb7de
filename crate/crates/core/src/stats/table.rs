//! Association table: one regression per (outcome, control set), reporting
//! the standardized WEAT coefficient.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{ols, standardize_with, DataMatrix, SdDenominator};
use crate::bias::GroupBiasRecord;
use crate::error::{Error, Result};
use crate::tsv;

/// Variable name of the repetition-averaged WEAT estimate.
pub const PREDICTOR_WEAT: &str = "weat_mean";
/// Variable name of the relative B-name frequency.
pub const VAR_REL_B_FREQ: &str = "rel_b_name_freq";

/// Minimum complete rows for a table cell.
const MIN_ROWS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlSet {
    pub label: String,
    pub covariates: Vec<String>,
}

impl ControlSet {
    pub fn new(label: impl Into<String>, covariates: &[&str]) -> Self {
        Self {
            label: label.into(),
            covariates: covariates.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TableOptions {
    pub denominator: SdDenominator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub beta: Option<f64>,
    pub se: Option<f64>,
    pub p: Option<f64>,
    pub stars: String,
    /// Rows used in the regression.
    pub n: usize,
    /// Rows dropped for missing values.
    pub dropped: usize,
    pub error: Option<String>,
}

impl CellResult {
    fn failed(error: &Error, n: usize, dropped: usize) -> Self {
        Self {
            beta: None,
            se: None,
            p: None,
            stars: String::new(),
            n,
            dropped,
            error: Some(error.to_string()),
        }
    }

    /// Two-decimal coefficient with significance stars, or `NA`.
    pub fn display(&self) -> String {
        match self.beta {
            Some(b) => format!("{b:.2}{}", self.stars),
            None => "NA".to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub outcome: String,
    pub cells: Vec<CellResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationTable {
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

/// `*` for p < 0.05, `**` for p < 0.01, `***` for p < 0.001.
pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

enum Value<'a> {
    Number(f64),
    Level(&'a str),
}

fn lookup<'a>(r: &'a GroupBiasRecord, name: &str) -> Option<Value<'a>> {
    match name {
        PREDICTOR_WEAT => Some(Value::Number(r.weat_mean)),
        VAR_REL_B_FREQ => Some(Value::Number(r.relative_b_name_frequency)),
        _ => {
            if let Some(&v) = r.covariates.get(name) {
                return v.is_finite().then_some(Value::Number(v));
            }
            r.factors.get(name).map(|l| Value::Level(l.as_str()))
        }
    }
}

fn known(records: &[GroupBiasRecord], name: &str) -> bool {
    matches!(name, PREDICTOR_WEAT | VAR_REL_B_FREQ)
        || records
            .iter()
            .any(|r| r.covariates.contains_key(name) || r.factors.contains_key(name))
}

struct Cell {
    beta: f64,
    se: f64,
    p: f64,
}

fn fit_cell(
    rows: &[&GroupBiasRecord],
    outcome: &str,
    controls: &[String],
    opts: TableOptions,
) -> Result<Cell> {
    let numeric = |name: &str| -> Vec<f64> {
        rows.iter()
            .map(|r| match lookup(r, name) {
                Some(Value::Number(v)) => v,
                _ => f64::NAN,
            })
            .collect()
    };
    let named = |e: Error, name: &str| match e {
        Error::ConstantColumn(_) => Error::ConstantColumn(name.to_owned()),
        other => other,
    };
    let y = standardize_with(&numeric(outcome), opts.denominator).map_err(|e| named(e, outcome))?;
    let mut design = DataMatrix::empty(rows.len());
    let weat = standardize_with(&numeric(PREDICTOR_WEAT), opts.denominator).map_err(|e| named(e, PREDICTOR_WEAT))?;
    design.push(PREDICTOR_WEAT, weat)?;

    for c in controls {
        let is_factor = rows.iter().any(|r| matches!(lookup(r, c), Some(Value::Level(_))));
        if is_factor {
            // One-hot, first level as reference, left unstandardized.
            let levels: BTreeSet<&str> = rows
                .iter()
                .filter_map(|r| match lookup(r, c) {
                    Some(Value::Level(l)) => Some(l),
                    _ => None,
                })
                .collect();
            for level in levels.iter().skip(1) {
                let col: Vec<f64> = rows
                    .iter()
                    .map(|r| match lookup(r, c) {
                        Some(Value::Level(l)) if l == *level => 1.0,
                        _ => 0.0,
                    })
                    .collect();
                design.push(format!("{c}={level}"), col)?;
            }
        } else {
            let z = standardize_with(&numeric(c), opts.denominator).map_err(|e| named(e, c))?;
            design.push(c.clone(), z)?;
        }
    }
    let fit = ols(&y, &design, true)?;
    let i = fit.coefficient(PREDICTOR_WEAT).expect("predictor column");
    Ok(Cell {
        beta: fit.beta[i],
        se: fit.se[i],
        p: fit.p[i],
    })
}

fn build_cell(records: &[GroupBiasRecord], outcome: &str, controls: &[String], opts: TableOptions) -> CellResult {
    let mut vars: Vec<&str> = vec![outcome, PREDICTOR_WEAT];
    vars.extend(controls.iter().map(String::as_str));
    if let Some(missing) = vars.iter().find(|v| !known(records, v)) {
        return CellResult::failed(&Error::MissingVariable((*missing).to_owned()), 0, records.len());
    }
    let complete: Vec<&GroupBiasRecord> = records
        .iter()
        .filter(|r| vars.iter().all(|v| lookup(r, v).is_some()))
        .collect();
    let dropped = records.len() - complete.len();
    if complete.len() < MIN_ROWS {
        let e = Error::InsufficientRows {
            rows: complete.len(),
            params: MIN_ROWS,
        };
        return CellResult::failed(&e, complete.len(), dropped);
    }
    match fit_cell(&complete, outcome, controls, opts) {
        Ok(c) => CellResult {
            beta: Some(c.beta),
            se: Some(c.se),
            p: Some(c.p),
            stars: stars(c.p).to_owned(),
            n: complete.len(),
            dropped,
            error: None,
        },
        Err(e) => CellResult::failed(&e, complete.len(), dropped),
    }
}

/// For every outcome and control set, regresses the standardized outcome on
/// the standardized WEAT estimate plus the set's covariates. Cells fail
/// independently.
pub fn build_association_table(
    records: &[GroupBiasRecord],
    outcomes: &[String],
    control_sets: &[ControlSet],
    opts: TableOptions,
) -> AssociationTable {
    let rows = outcomes
        .iter()
        .map(|o| TableRow {
            outcome: o.clone(),
            cells: control_sets
                .iter()
                .map(|cs| build_cell(records, o, &cs.covariates, opts))
                .collect(),
        })
        .collect();
    AssociationTable {
        columns: control_sets.iter().map(|c| c.label.clone()).collect(),
        rows,
    }
}

impl AssociationTable {
    pub fn cell(&self, outcome: &str, column: &str) -> Option<&CellResult> {
        let c = self.columns.iter().position(|l| l == column)?;
        self.rows.iter().find(|r| r.outcome == outcome).map(|r| &r.cells[c])
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let mut header = vec!["outcome"];
        header.extend(self.columns.iter().map(String::as_str));
        tsv::write_row(&mut out, &header);
        for row in &self.rows {
            let cells: Vec<String> = row.cells.iter().map(CellResult::display).collect();
            let mut fields = vec![row.outcome.as_str()];
            fields.extend(cells.iter().map(String::as_str));
            tsv::write_row(&mut out, &fields);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// Parses the TSV layout back into `(columns, rows of cell strings)`.
    pub fn parse_tsv(text: &str) -> Result<(Vec<String>, Vec<(String, Vec<String>)>)> {
        let (header, rows) = tsv::read_rows(text)?;
        if header.first() != Some(&"outcome") {
            return Err(Error::parse(1, "first column must be \"outcome\""));
        }
        let columns = header[1..].iter().map(|s| s.to_string()).collect();
        let rows = rows
            .into_iter()
            .map(|(_, f)| (f[0].to_owned(), f[1..].iter().map(|s| s.to_string()).collect()))
            .collect();
        Ok((columns, rows))
    }

    pub fn tsv_from_parts(columns: &[String], rows: &[(String, Vec<String>)]) -> String {
        let mut out = String::new();
        let mut header = vec!["outcome"];
        header.extend(columns.iter().map(String::as_str));
        tsv::write_row(&mut out, &header);
        for (outcome, cells) in rows {
            let mut fields = vec![outcome.as_str()];
            fields.extend(cells.iter().map(String::as_str));
            tsv::write_row(&mut out, &fields);
        }
        out
    }
}
