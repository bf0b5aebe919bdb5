use serde::Serialize;

use crate::error::{Error, Result};

/// Parameters of `c - b L^(-eta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub c: f64,
    pub b: f64,
    /// `None` when the correction term vanishes.
    pub eta: Option<f64>,
    /// Weighted sum of squared residuals.
    pub residual: f64,
}

const ETA_MIN: f64 = 1e-3;
const ETA_MAX: f64 = 8.0;
const GRID: usize = 400;

/// Weighted least-squares fit of `y(L) = c - b L^(-eta)` with `eta > 0`.
///
/// Weights are inverse variances; if any standard error is zero or missing
/// every point is weighted equally. For `order == 1` the correction is fixed
/// to zero and `c` is the weighted mean. For fixed `eta` the problem is
/// linear in `(c, b)`, so only `eta` is searched: a log grid followed by a
/// golden-section refinement.
pub fn fit_cumulant_scaling(
    sizes: &[usize],
    values: &[f64],
    stderrs: &[f64],
    order: usize,
) -> Result<ScalingFit> {
    let fail = |reason: String| Error::FitFailed {
        residual: f64::NAN,
        reason,
    };
    if sizes.len() != values.len() || (!stderrs.is_empty() && stderrs.len() != values.len()) {
        return Err(fail("sizes, values and errors differ in length".into()));
    }
    let mut distinct = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(fail(format!("need at least 4 distinct sizes, got {}", distinct.len())));
    }
    if sizes.contains(&0) || values.iter().any(|v| !v.is_finite()) {
        return Err(fail("sizes must be positive and values finite".into()));
    }
    let weights: Vec<f64> = if stderrs.len() == values.len() && stderrs.iter().all(|&s| s > 0.0 && s.is_finite()) {
        stderrs.iter().map(|s| 1.0 / (s * s)).collect()
    } else {
        vec![1.0; values.len()]
    };
    let ls: Vec<f64> = sizes.iter().map(|&l| l as f64).collect();

    let wsum: f64 = weights.iter().sum();
    let mean = weights.iter().zip(values).map(|(w, y)| w * y).sum::<f64>() / wsum;
    let flat = weights.iter().zip(values).map(|(w, y)| w * (y - mean).powi(2)).sum::<f64>();
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    if order == 1 || flat <= 1e-24 * scale * scale * wsum {
        return Ok(ScalingFit {
            c: mean,
            b: 0.0,
            eta: None,
            residual: flat,
        });
    }

    let solve = |eta: f64| -> (f64, f64, f64) {
        let x: Vec<f64> = ls.iter().map(|l| l.powf(-eta)).collect();
        let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for ((w, xi), yi) in weights.iter().zip(&x).zip(values) {
            sw += w;
            sx += w * xi;
            sy += w * yi;
            sxx += w * xi * xi;
            sxy += w * xi * yi;
        }
        let det = sw * sxx - sx * sx;
        if det.abs() <= 1e-300 {
            return (mean, 0.0, flat);
        }
        // y = c + s x with s = -b.
        let slope = (sw * sxy - sx * sy) / det;
        let c = (sy - slope * sx) / sw;
        let r: f64 = weights
            .iter()
            .zip(&x)
            .zip(values)
            .map(|((w, xi), yi)| w * (yi - c - slope * xi).powi(2))
            .sum();
        (c, -slope, r)
    };

    let grid: Vec<f64> = (0..GRID)
        .map(|i| ETA_MIN * (ETA_MAX / ETA_MIN).powf(i as f64 / (GRID - 1) as f64))
        .collect();
    let (best, _) = grid
        .iter()
        .enumerate()
        .map(|(i, &e)| (i, solve(e).2))
        .fold((0, f64::INFINITY), |acc, (i, r)| if r < acc.1 { (i, r) } else { acc });
    let mut lo = grid[best.saturating_sub(1)].ln();
    let mut hi = grid[(best + 1).min(GRID - 1)].ln();
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let f = |le: f64| solve(le.exp()).2;
    let (mut a, mut b) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..100 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    let eta = ((lo + hi) / 2.0).exp();
    let (c, bn, residual) = solve(eta);
    if !c.is_finite() || !bn.is_finite() || !residual.is_finite() {
        return Err(Error::FitFailed {
            residual,
            reason: "non-finite parameters".into(),
        });
    }
    if best == 0 || best == GRID - 1 {
        return Err(Error::FitFailed {
            residual,
            reason: format!("exponent ran to the search boundary (eta = {eta:.3e})"),
        });
    }
    Ok(ScalingFit {
        c,
        b: bn,
        eta: Some(eta),
        residual,
    })
}
