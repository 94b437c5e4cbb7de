//! Group-level covariate tables joined onto bias records by `group_id`.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::Serialize;

use crate::bias::GroupBiasRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CovariateValue {
    Number(f64),
    Level(String),
    Missing,
}

/// One row per group. Columns whose every present value parses as a number
/// are numeric; anything else is categorical.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CovariateTable {
    pub columns: Vec<String>,
    pub categorical: BTreeSet<String>,
    pub rows: BTreeMap<String, Vec<CovariateValue>>,
}

fn is_missing(s: &str) -> bool {
    matches!(s.trim().to_ascii_lowercase().as_str(), "" | "na" | "nan" | "null")
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::parse(line, format!("{other:?}")),
    }
}

impl CovariateTable {
    /// Reads a delimited table. The delimiter is a tab if the header line
    /// contains one, a comma otherwise. The first column must be `group_id`.
    pub fn parse(text: &str) -> Result<Self> {
        let header_line = text.lines().next().unwrap_or("");
        let delimiter = if header_line.contains('\t') { b'\t' } else { b',' };
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers().map_err(csv_error)?.iter().map(str::to_owned).collect();
        if header.first().map(String::as_str) != Some("group_id") {
            return Err(Error::parse(1, "first column must be \"group_id\""));
        }
        let columns: Vec<String> = header[1..].to_vec();
        let unique: BTreeSet<&String> = columns.iter().collect();
        if unique.len() != columns.len() {
            return Err(Error::parse(1, "duplicate column names"));
        }

        let mut raw: Vec<(usize, Vec<String>)> = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(csv_error)?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            raw.push((line, rec.iter().map(str::to_owned).collect()));
        }
        let categorical: BTreeSet<String> = columns
            .iter()
            .enumerate()
            .filter(|(j, _)| {
                raw.iter()
                    .map(|(_, f)| f[j + 1].as_str())
                    .any(|v| !is_missing(v) && v.parse::<f64>().is_err())
            })
            .map(|(_, c)| c.clone())
            .collect();

        let mut rows = BTreeMap::new();
        for (line, fields) in raw {
            let values = columns
                .iter()
                .zip(&fields[1..])
                .map(|(c, v)| {
                    if is_missing(v) {
                        CovariateValue::Missing
                    } else if categorical.contains(c) {
                        CovariateValue::Level(v.clone())
                    } else {
                        CovariateValue::Number(v.parse().expect("numeric column"))
                    }
                })
                .collect();
            if rows.insert(fields[0].clone(), values).is_some() {
                return Err(Error::parse(line, format!("duplicate group_id {:?}", fields[0])));
            }
        }
        Ok(Self {
            columns,
            categorical,
            rows,
        })
    }

    pub fn read<R: Read>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        Self::parse(&text)
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.columns.iter().any(|c| c == name)
    }

    pub fn value(&self, group_id: &str, column: &str) -> Option<&CovariateValue> {
        let j = self.columns.iter().position(|c| c == column)?;
        self.rows.get(group_id).map(|r| &r[j])
    }

    /// Numeric column values in group order, `None` for missing entries.
    pub fn numeric_column(&self, column: &str) -> Option<Vec<(String, Option<f64>)>> {
        let j = self.columns.iter().position(|c| c == column)?;
        Some(
            self.rows
                .iter()
                .map(|(g, r)| {
                    let v = match r[j] {
                        CovariateValue::Number(x) => Some(x),
                        _ => None,
                    };
                    (g.clone(), v)
                })
                .collect(),
        )
    }
}

/// What a join could not attach.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct JoinReport {
    /// Records with no covariate row.
    pub unmatched_records: Vec<String>,
    /// Covariate rows with no record.
    pub unmatched_covariates: Vec<String>,
    /// Missing cells per column among matched records.
    pub missing: BTreeMap<String, usize>,
}

/// Attaches covariates to records in place. Missing values are left absent
/// so that each regression can drop incomplete rows on its own.
pub fn join_covariates(records: &mut [GroupBiasRecord], table: &CovariateTable) -> JoinReport {
    let mut report = JoinReport::default();
    let mut seen = BTreeSet::new();
    for r in records.iter_mut() {
        let Some(values) = table.rows.get(&r.group_id) else {
            report.unmatched_records.push(r.group_id.clone());
            continue;
        };
        seen.insert(r.group_id.as_str().to_owned());
        for (c, v) in table.columns.iter().zip(values) {
            match v {
                CovariateValue::Number(x) => {
                    r.covariates.insert(c.clone(), *x);
                }
                CovariateValue::Level(l) => {
                    r.factors.insert(c.clone(), l.clone());
                }
                CovariateValue::Missing => *report.missing.entry(c.clone()).or_default() += 1,
            }
        }
    }
    report.unmatched_covariates = table.rows.keys().filter(|g| !seen.contains(*g)).cloned().collect();
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_delimiter_and_types() {
        for text in [
            "group_id\tincome\tdivision\na\t1.5\tnorth\nb\tNA\tsouth\n",
            "group_id,income,division\na,1.5,north\nb,NA,south\n",
        ] {
            let t = CovariateTable::parse(text).unwrap();
            assert_eq!(t.columns, ["income", "division"]);
            assert!(t.categorical.contains("division"));
            assert_eq!(t.value("a", "income"), Some(&CovariateValue::Number(1.5)));
            assert_eq!(t.value("b", "income"), Some(&CovariateValue::Missing));
            assert_eq!(t.value("b", "division"), Some(&CovariateValue::Level("south".into())));
        }
    }

    #[test]
    fn rejects_bad_headers_and_duplicates() {
        assert!(CovariateTable::parse("id,x\na,1\n").is_err());
        assert!(CovariateTable::parse("group_id,x,x\na,1,2\n").is_err());
        let e = CovariateTable::parse("group_id,x\na,1\na,2\n").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        assert!(CovariateTable::parse("group_id,x\na,1,2\n").is_err());
    }

    #[test]
    fn join_reports_gaps() {
        let t = CovariateTable::parse("group_id,x,d\na,1,p\nb,,q\nz,3,r\n").unwrap();
        let mut recs = vec![
            GroupBiasRecord::new("a".into(), vec![0.1], 0.2),
            GroupBiasRecord::new("b".into(), vec![0.1], 0.2),
            GroupBiasRecord::new("c".into(), vec![0.1], 0.2),
        ];
        let rep = join_covariates(&mut recs, &t);
        assert_eq!(rep.unmatched_records, ["c"]);
        assert_eq!(rep.unmatched_covariates, ["z"]);
        assert_eq!(rep.missing["x"], 1);
        assert_eq!(recs[0].covariates["x"], 1.0);
        assert_eq!(recs[1].factors["d"], "q");
        assert!(!recs[1].covariates.contains_key("x"));
    }
}
