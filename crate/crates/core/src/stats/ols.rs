use serde::{Deserialize, Serialize};

use super::{mean, t_sf, DataMatrix};
use crate::error::{Error, Result};

pub const INTERCEPT: &str = "(intercept)";

/// A column whose Householder diagonal falls below this fraction of its
/// original norm is treated as collinear with earlier columns.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub names: Vec<String>,
    pub beta: Vec<f64>,
    pub se: Vec<f64>,
    pub t: Vec<f64>,
    pub p: Vec<f64>,
    pub df_resid: usize,
    pub r_squared: f64,
    pub n: usize,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl RegressionResult {
    pub fn coefficient(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Householder QR of the column-major design, applied to `y` in place.
/// Returns the upper-triangular factor as rows.
fn householder(cols: &mut [Vec<f64>], y: &mut [f64], names: &[String]) -> Result<Vec<Vec<f64>>> {
    let k = cols.len();
    let n = y.len();
    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let mut r = vec![vec![0.0; k]; k];
    for j in 0..k {
        let norm = cols[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > RANK_TOLERANCE * norms[j]) || norms[j] == 0.0 {
            return Err(Error::RankDeficient(names[j].clone()));
        }
        let alpha = if cols[j][j] > 0.0 { -norm } else { norm };
        let mut v = cols[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        let reflect = |target: &mut [f64]| {
            let s: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
            let f = 2.0 * s / vnorm2;
            for (t, a) in target.iter_mut().zip(&v) {
                *t -= f * a;
            }
        };
        for c in cols.iter_mut().skip(j) {
            reflect(&mut c[j..n]);
        }
        reflect(&mut y[j..n]);
        for (i, c) in cols.iter().enumerate().skip(j) {
            r[j][i] = c[j];
        }
    }
    Ok(r)
}

fn upper_inverse(r: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = r.len();
    let mut inv = vec![vec![0.0; k]; k];
    for col in 0..k {
        for i in (0..=col).rev() {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for j in i + 1..=col {
                s -= r[i][j] * inv[j][col];
            }
            inv[i][col] = s / r[i][i];
        }
    }
    inv
}

/// Ordinary least squares with classical standard errors
/// `s²(XᵀX)⁻¹`, `s² = RSS / df_resid`, and two-sided t-test p-values.
pub fn ols(y: &[f64], x: &DataMatrix, intercept: bool) -> Result<RegressionResult> {
    let n = y.len();
    if x.rows() != n {
        return Err(Error::LengthMismatch { left: x.rows(), right: n });
    }
    let mut names = Vec::with_capacity(x.cols() + 1);
    let mut design = Vec::with_capacity(x.cols() + 1);
    if intercept {
        names.push(INTERCEPT.to_owned());
        design.push(vec![1.0; n]);
    }
    names.extend(x.names().iter().cloned());
    design.extend(x.columns().iter().cloned());
    let k = design.len();
    if k == 0 || n <= k {
        return Err(Error::InsufficientRows { rows: n, params: k });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("response contains non-finite values".into()));
    }

    let mut qty = y.to_vec();
    let mut work = design.clone();
    let r = householder(&mut work, &mut qty, &names)?;

    let mut beta = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| r[i][j] * beta[j]).sum();
        beta[i] = (qty[i] - s) / r[i][i];
    }

    let residuals: Vec<f64> = (0..n)
        .map(|row| y[row] - design.iter().zip(&beta).map(|(c, b)| c[row] * b).sum::<f64>())
        .collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let df_resid = n - k;
    let s2 = rss / df_resid as f64;

    let rinv = upper_inverse(&r);
    let se: Vec<f64> = (0..k)
        .map(|i| (s2 * rinv[i][i..].iter().map(|v| v * v).sum::<f64>()).sqrt())
        .collect();
    let t: Vec<f64> = beta
        .iter()
        .zip(&se)
        .map(|(&b, &s)| if s == 0.0 && b == 0.0 { 0.0 } else { b / s })
        .collect();
    let p = t.iter().map(|&t| t_sf(t, df_resid as f64)).collect();

    let tss = if intercept {
        let m = mean(y);
        y.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
    } else {
        y.iter().map(|v| v * v).sum::<f64>()
    };
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };

    Ok(RegressionResult {
        names,
        beta,
        se,
        t,
        p,
        df_resid,
        r_squared,
        n,
        residuals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialResult {
    pub beta: f64,
    pub se: f64,
    pub p: f64,
    pub df_resid: usize,
}

/// Coefficient of `x` in the regression of `y` on `(1, x, Z)`, obtained by
/// regressing the residuals of `y` on `Z` onto the residuals of `x` on `Z`.
///
/// Standard error and p-value use the full model's residual degrees of
/// freedom, so they equal those of the full regression.
pub fn partial_out(y: &[f64], x: &[f64], z: &DataMatrix) -> Result<PartialResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    let n = y.len();
    let params = z.cols() + 2;
    if n <= params {
        return Err(Error::InsufficientRows { rows: n, params });
    }
    let x_res = ols(x, z, true)?.residuals;
    let y_res = ols(y, z, true)?.residuals;

    let xm = mean(x);
    let x_ss: f64 = x.iter().map(|v| (v - xm) * (v - xm)).sum();
    let xr_ss: f64 = x_res.iter().map(|v| v * v).sum();
    if !(xr_ss.sqrt() > RANK_TOLERANCE * x_ss.sqrt()) {
        return Err(Error::RankDeficient("x".into()));
    }
    let beta = x_res.iter().zip(&y_res).map(|(a, b)| a * b).sum::<f64>() / xr_ss;
    let rss: f64 = x_res.iter().zip(&y_res).map(|(a, b)| (b - beta * a).powi(2)).sum();
    let df_resid = n - params;
    let se = (rss / df_resid as f64 / xr_ss).sqrt();
    let t = if se == 0.0 && beta == 0.0 { 0.0 } else { beta / se };
    Ok(PartialResult {
        beta,
        se,
        p: t_sf(t, df_resid as f64),
        df_resid,
    })
}
