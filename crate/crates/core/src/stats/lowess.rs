use crate::error::{Error, Result};
use crate::tsv;

pub const DEFAULT_FRACTION: f64 = 2.0 / 3.0;

fn tricube(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u * u;
        t * t * t
    }
}

/// Locally weighted linear regression without robustness iterations.
///
/// Each point is fitted from its `ceil(fraction·n)` nearest neighbours in
/// `x`, weighted by `(1 − (d/d_max)³)³` where `d_max` is the largest
/// neighbour distance. Points at `d_max` get zero weight, so ties at the
/// neighbourhood edge do not affect the fit and the result is independent of
/// input order. When the weighted `x` spread vanishes the local fit falls
/// back to the weighted mean.
pub fn lowess(x: &[f64], y: &[f64], fraction: f64) -> Result<Vec<f64>> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::LengthMismatch { left: n, right: y.len() });
    }
    if n < 3 {
        return Err(Error::InsufficientRows { rows: n, params: 3 });
    }
    if !(fraction > 0.0 && fraction <= 1.0) || fraction * (n as f64) < 2.0 {
        return Err(Error::InvalidArgument(format!("LOWESS fraction {fraction} is out of range for {n} points")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("LOWESS input must be finite".into()));
    }
    let k = ((fraction * n as f64).ceil() as usize).min(n);

    let mut dist = vec![0.0; n];
    let mut fitted = Vec::with_capacity(n);
    for i in 0..n {
        for (d, xj) in dist.iter_mut().zip(x) {
            *d = (xj - x[i]).abs();
        }
        let mut sorted = dist.clone();
        let (_, &mut d_max, _) = sorted.select_nth_unstable_by(k - 1, f64::total_cmp);
        if d_max == 0.0 {
            return Err(Error::DegenerateNeighborhood(x[i]));
        }

        let (mut sw, mut swx, mut swy) = (0.0, 0.0, 0.0);
        let weights: Vec<f64> = dist.iter().map(|d| tricube(d / d_max)).collect();
        for j in 0..n {
            sw += weights[j];
            swx += weights[j] * x[j];
            swy += weights[j] * y[j];
        }
        let (xm, ym) = (swx / sw, swy / sw);
        let (mut sxx, mut sxy) = (0.0, 0.0);
        for j in 0..n {
            let dx = x[j] - xm;
            sxx += weights[j] * dx * dx;
            sxy += weights[j] * dx * (y[j] - ym);
        }
        if sxx <= 1e-12 * sw * d_max * d_max {
            fitted.push(ym);
        } else {
            fitted.push(ym + sxy / sxx * (x[i] - xm));
        }
    }
    Ok(fitted)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowessPoint {
    pub x: f64,
    pub y: f64,
    pub fitted: f64,
}

const HEADER: [&str; 3] = ["x", "y", "fitted"];

pub fn lowess_to_tsv(points: &[LowessPoint]) -> String {
    let mut out = String::new();
    tsv::write_row(&mut out, &HEADER);
    for p in points {
        tsv::write_row(&mut out, &[&p.x.to_string(), &p.y.to_string(), &p.fitted.to_string()]);
    }
    out
}

pub fn lowess_from_tsv(text: &str) -> Result<Vec<LowessPoint>> {
    let (header, rows) = tsv::read_rows(text)?;
    tsv::expect_header(&header, &HEADER)?;
    rows.into_iter()
        .map(|(line, f)| {
            Ok(LowessPoint {
                x: tsv::parse_field(line, "x", f[0])?,
                y: tsv::parse_field(line, "y", f[1])?,
                fitted: tsv::parse_field(line, "fitted", f[2])?,
            })
        })
        .collect()
}
