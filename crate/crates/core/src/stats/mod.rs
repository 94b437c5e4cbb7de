//! Regression methodology: standardization, OLS with classical standard
//! errors, Pearson correlation, partialling out, LOWESS and the association
//! table builder.

mod lowess;
mod ols;
mod table;
mod tdist;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use lowess::{lowess, lowess_from_tsv, lowess_to_tsv, LowessPoint, DEFAULT_FRACTION};
pub use ols::{ols, partial_out, PartialResult, RegressionResult, INTERCEPT};
pub use table::{
    build_association_table, stars, AssociationTable, CellResult, ControlSet, TableOptions, TableRow,
    PREDICTOR_WEAT, VAR_REL_B_FREQ,
};
pub use tdist::{ln_gamma, regularized_incomplete_beta, t_sf};

/// Columns whose sample standard deviation is below this are constant.
pub const MIN_SD: f64 = 1e-12;

/// Denominator used for standard deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SdDenominator {
    /// `n - 1`
    #[default]
    Sample,
    /// `n`
    Population,
}

/// Named real-valued columns of equal length.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DataMatrix {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    rows: usize,
}

impl DataMatrix {
    /// A matrix with `rows` rows and no columns.
    pub fn empty(rows: usize) -> Self {
        Self {
            names: Vec::new(),
            columns: Vec::new(),
            rows,
        }
    }

    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Self::empty(rows);
        if names.len() != columns.len() {
            return Err(Error::LengthMismatch {
                left: names.len(),
                right: columns.len(),
            });
        }
        for (n, c) in names.into_iter().zip(columns) {
            m.push(n, c)?;
        }
        Ok(m)
    }

    pub fn push(&mut self, name: impl Into<String>, column: Vec<f64>) -> Result<()> {
        let name = name.into();
        if self.names.contains(&name) {
            return Err(Error::InvalidArgument(format!("duplicate column {name:?}")));
        }
        if column.len() != self.rows {
            return Err(Error::LengthMismatch {
                left: column.len(),
                right: self.rows,
            });
        }
        if column.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument(format!("column {name:?} contains NaN")));
        }
        self.names.push(name);
        self.columns.push(column);
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.columns[i].as_slice())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn centered_sum_squares(x: &[f64], m: f64) -> f64 {
    x.iter().map(|v| (v - m) * (v - m)).sum()
}

pub fn standard_deviation(x: &[f64], denominator: SdDenominator) -> f64 {
    let m = mean(x);
    let d = match denominator {
        SdDenominator::Sample => x.len() as f64 - 1.0,
        SdDenominator::Population => x.len() as f64,
    };
    (centered_sum_squares(x, m) / d).sqrt()
}

pub fn standardize(column: &[f64]) -> Result<Vec<f64>> {
    standardize_with(column, SdDenominator::Sample)
}

pub fn standardize_with(column: &[f64], denominator: SdDenominator) -> Result<Vec<f64>> {
    if column.len() < 2 {
        return Err(Error::InsufficientRows {
            rows: column.len(),
            params: 2,
        });
    }
    let m = mean(column);
    let sd = standard_deviation(column, denominator);
    if !(sd > MIN_SD) {
        return Err(Error::ConstantColumn("column".into()));
    }
    Ok(column.iter().map(|v| (v - m) / sd).collect())
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientRows { rows: x.len(), params: 2 });
    }
    let (mx, my) = (mean(x), mean(y));
    let (sxx, syy) = (centered_sum_squares(x, mx), centered_sum_squares(y, my));
    for (name, ss) in [("x", sxx), ("y", syy)] {
        if !((ss / (x.len() as f64 - 1.0)).sqrt() > MIN_SD) {
            return Err(Error::ConstantColumn(name.into()));
        }
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn standardize_examples() {
        assert_eq!(standardize(&[1.0, 2.0, 3.0]).unwrap(), vec![-1.0, 0.0, 1.0]);
        assert!(matches!(standardize(&[5.0, 5.0, 5.0]), Err(Error::ConstantColumn(_))));
        assert!(standardize(&[1.0]).is_err());
        let pop = standardize_with(&[1.0, 3.0], SdDenominator::Population).unwrap();
        assert_eq!(pop, vec![-1.0, 1.0]);
    }

    #[test]
    fn standardized_random_column_has_unit_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..1000).map(|_| rng.random_range(-50.0..200.0)).collect();
        let z = standardize(&x).unwrap();
        // direct recomputation
        let m = z.iter().sum::<f64>() / 1000.0;
        let sd = (z.iter().map(|v| (v - m).powi(2)).sum::<f64>() / 999.0).sqrt();
        assert!(m.abs() < 1e-10);
        assert!((sd - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 4.0, 7.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(pearson(&x, &[2.0; 4]), Err(Error::ConstantColumn(_))));
    }

    #[test]
    fn pearson_matches_covariance_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let n = rng.random_range(3..100);
            let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let y: Vec<f64> = x.iter().map(|v| v * 0.3 + rng.random::<f64>()).collect();
            let nf = n as f64;
            let (mx, my) = (x.iter().sum::<f64>() / nf, y.iter().sum::<f64>() / nf);
            let cov = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (nf - 1.0);
            let sx = (x.iter().map(|a| (a - mx).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
            let sy = (y.iter().map(|b| (b - my).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
            assert!((pearson(&x, &y).unwrap() - cov / (sx * sy)).abs() < 1e-12);
        }
    }

    #[test]
    fn data_matrix_rejects_bad_columns() {
        let mut m = DataMatrix::empty(2);
        m.push("a", vec![1.0, 2.0]).unwrap();
        assert!(m.push("a", vec![1.0, 2.0]).is_err());
        assert!(m.push("b", vec![1.0]).is_err());
        assert!(m.push("c", vec![f64::NAN, 1.0]).is_err());
        assert_eq!(m.column("a"), Some(&[1.0, 2.0][..]));
    }
}
