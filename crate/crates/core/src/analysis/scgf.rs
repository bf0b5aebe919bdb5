use serde::Serialize;

use super::blocks::{box_counts, BoxShape, SamplingPlan};
use super::field::ErrorField;
use super::fit::ScalingFit;
use crate::error::{Error, Result};
use crate::storage::StreamKey;

/// Share of `sum_i exp(k N_i)` above which a single box is said to dominate.
pub const DOMINANCE_SHARE: f64 = 0.5;

/// `0, 0.1, ..., 3`.
pub fn default_k_grid() -> Vec<f64> {
    (0..=30).map(|i| i as f64 / 10.0).collect()
}

/// `lambda_V(k) = ln <exp(k N_V)> / |V|` from box counts, and the largest
/// single-sample share of the average.
pub fn empirical_scgf(counts: &[u64], volume: usize, k: f64) -> (f64, f64) {
    if counts.is_empty() {
        return (f64::NAN, 1.0);
    }
    let max = counts.iter().copied().max().unwrap_or(0) as f64;
    let sum: f64 = counts.iter().map(|&n| (k * (n as f64 - max)).exp()).sum();
    let lse = k * max + sum.ln();
    let lambda = (lse - (counts.len() as f64).ln()) / volume as f64;
    (lambda, 1.0 / sum)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScgfCurve {
    pub shape: BoxShape,
    pub lambda: Vec<f64>,
    /// Set where one box carries more than half of the exponential average.
    pub dominated: Vec<bool>,
    /// Largest grid `k` below which no point is dominated.
    pub max_trusted_k: f64,
    /// `max_k (k - lambda_V(k))` over the grid; infinite if no box ever
    /// contains an error.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScgfReport {
    pub k: Vec<f64>,
    pub curves: Vec<ScgfCurve>,
    /// `ln(1/eps) = min_V max_k (k - lambda_V(k))`.
    pub bound: f64,
    pub p_e: f64,
    /// `(n, c_n / P_E)` for whatever cumulant fits were supplied.
    pub ratios: Vec<(usize, f64)>,
}

/// Empirical SCGFs of every box geometry and the resulting min-max bound.
pub fn scgf_bound(
    fields: &[ErrorField],
    shapes: &[BoxShape],
    k_grid: &[f64],
    plan: SamplingPlan,
    key: StreamKey,
) -> Result<ScgfReport> {
    if fields.is_empty() || shapes.is_empty() || k_grid.is_empty() {
        return Err(Error::InsufficientSamples("need fields, shapes and a k grid".into()));
    }
    if k_grid.iter().any(|&k| !(k >= 0.0)) {
        return Err(Error::Params("k grid must be non-negative".into()));
    }
    let errors: u64 = fields.iter().map(ErrorField::count).sum();
    let cells: u64 = fields.iter().map(|f| f.len() as u64).sum();
    let mut curves = Vec::with_capacity(shapes.len());
    for (si, &shape) in shapes.iter().enumerate() {
        let mut counts = Vec::new();
        for (fi, f) in fields.iter().enumerate() {
            counts.extend(box_counts(f, shape, plan, key.with(&[si as u64, fi as u64]))?);
        }
        let (lambda, shares): (Vec<f64>, Vec<f64>) = k_grid
            .iter()
            .map(|&k| empirical_scgf(&counts, shape.volume(), k))
            .unzip();
        let dominated: Vec<bool> = shares.iter().map(|&s| s > DOMINANCE_SHARE).collect();
        let max_trusted_k = k_grid
            .iter()
            .zip(&dominated)
            .take_while(|(_, &d)| !d)
            .map(|(&k, _)| k)
            .last()
            .unwrap_or(0.0);
        let bound = if counts.iter().all(|&n| n == 0) {
            f64::INFINITY
        } else {
            k_grid
                .iter()
                .zip(&lambda)
                .map(|(k, l)| k - l)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        curves.push(ScgfCurve {
            shape,
            lambda,
            dominated,
            max_trusted_k,
            bound,
        });
    }
    let bound = curves.iter().map(|c| c.bound).fold(f64::INFINITY, f64::min);
    Ok(ScgfReport {
        k: k_grid.to_vec(),
        curves,
        bound,
        p_e: errors as f64 / cells as f64,
        ratios: Vec::new(),
    })
}

/// `c_n / P_E` for each fitted order.
pub fn cumulant_ratios(fits: &[(usize, ScalingFit)], p_e: f64) -> Vec<(usize, f64)> {
    fits.iter().map(|(n, f)| (*n, f.c / p_e)).collect()
}

/// Cubes plus two flat slabs, one thin in time and one thin in `y`.
pub fn default_geometries(l: usize) -> Vec<BoxShape> {
    vec![
        BoxShape::cube(l),
        BoxShape { lt: 1, lx: 2 * l, ly: 2 * l },
        BoxShape { lt: 2 * l, lx: 2 * l, ly: 1 },
    ]
}
