use rand::Rng;
use serde::Serialize;

use super::blocks::{box_counts, BoxShape, SamplingPlan};
use super::field::ErrorField;
use super::fit::{fit_cumulant_scaling, ScalingFit};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::storage::StreamKey;

/// Highest cumulant order estimated.
pub const MAX_ORDER: usize = 4;

pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Unbiased k-statistics `k_1..k_order` of integer samples.
///
/// Power sums are accumulated exactly on values shifted by the integer
/// nearest the mean, which keeps higher orders free of cancellation and
/// makes the result independent of sample order.
pub fn k_statistics(samples: &[u64], order: usize) -> Result<Vec<f64>> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::Params(format!("cumulant order must be 1..={MAX_ORDER}, got {order}")));
    }
    let n = samples.len();
    if n <= order.max(1) {
        return Err(Error::InsufficientSamples(format!(
            "order-{order} k-statistic needs more than {order} samples, got {n}"
        )));
    }
    let total: u128 = samples.iter().map(|&s| s as u128).sum();
    let shift = ((total + n as u128 / 2) / n as u128) as i128;
    let mut s = [0i128; 5];
    for &x in samples {
        let d = x as i128 - shift;
        let (d2, d3) = (d * d, d * d * d);
        s[1] += d;
        s[2] += d2;
        s[3] += d3;
        s[4] += d2 * d2;
    }
    let nf = n as f64;
    let a = s[1] as f64 / nf;
    let (p2, p3, p4) = (s[2] as f64 / nf, s[3] as f64 / nf, s[4] as f64 / nf);
    let m2 = p2 - a * a;
    let m3 = p3 - 3.0 * a * p2 + 2.0 * a.powi(3);
    let m4 = p4 - 4.0 * a * p3 + 6.0 * a * a * p2 - 3.0 * a.powi(4);
    let mut k = vec![total as f64 / nf];
    if order >= 2 {
        k.push(nf / (nf - 1.0) * m2);
    }
    if order >= 3 {
        k.push(nf * nf / ((nf - 1.0) * (nf - 2.0)) * m3);
    }
    if order >= 4 {
        k.push(
            nf * nf * ((nf + 1.0) * m4 - 3.0 * (nf - 1.0) * m2 * m2)
                / ((nf - 1.0) * (nf - 2.0) * (nf - 3.0)),
        );
    }
    Ok(k)
}

/// Scaled cumulant `<N_V^n>_c / |V|` for one box shape and order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CumulantEstimate {
    pub shape: BoxShape,
    pub order: usize,
    pub scaled: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Scaled cumulants of orders `1..=n_max` for boxes of `shape`, pooled over
/// `fields`. Standard errors are bootstrapped over fields, or over boxes
/// when there is a single field.
///
/// The order-1 value is the box-count total divided once by
/// `boxes * |V|`, so for an exhaustive plan that covers every cell equally
/// it is bit-identical to the field's `P_E`.
pub fn box_cumulants(
    fields: &[ErrorField],
    shape: BoxShape,
    n_max: usize,
    plan: SamplingPlan,
    key: StreamKey,
    exec: Execution,
) -> Result<Vec<CumulantEstimate>> {
    if fields.is_empty() {
        return Err(Error::InsufficientSamples("no error fields".into()));
    }
    let per_field: Vec<Vec<u64>> = par::map_indices(exec, fields.len(), |i| {
        box_counts(&fields[i], shape, plan, key.child(i as u64))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let pooled: Vec<u64> = per_field.iter().flatten().copied().collect();
    let vol = shape.volume() as f64;
    let mut point = k_statistics(&pooled, n_max)?;
    let total: u64 = pooled.iter().sum();
    point[0] = total as f64 / (pooled.len() as u128 * shape.volume() as u128) as f64;
    for k in point.iter_mut().skip(1) {
        *k /= vol;
    }

    let boot_key = key.child_str("bootstrap");
    let resamples: Vec<Vec<f64>> = par::map_indices(exec, BOOTSTRAP_RESAMPLES, |b| {
        let mut rng = boot_key.child(b as u64).stream();
        let sample: Vec<u64> = if per_field.len() > 1 {
            (0..per_field.len())
                .flat_map(|_| per_field[rng.random_range(0..per_field.len())].iter().copied())
                .collect()
        } else {
            (0..pooled.len()).map(|_| pooled[rng.random_range(0..pooled.len())]).collect()
        };
        k_statistics(&sample, n_max)
            .map(|k| k.into_iter().map(|x| x / vol).collect())
            .unwrap_or_default()
    });
    let resamples: Vec<Vec<f64>> = resamples.into_iter().filter(|r| !r.is_empty()).collect();

    Ok((0..n_max)
        .map(|j| {
            let vals: Vec<f64> = resamples.iter().map(|r| r[j]).collect();
            CumulantEstimate {
                shape,
                order: j + 1,
                scaled: point[j],
                stderr: sample_sd(&vals),
                samples: pooled.len(),
            }
        })
        .collect())
}

fn sample_sd(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Scaled cumulants of one order across cube sizes, with the
/// `c - b L^(-eta)` fit when it succeeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulantReport {
    pub order: usize,
    pub sizes: Vec<usize>,
    pub estimates: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub fit: Option<ScalingFit>,
    /// Why the fit is missing, if it is.
    pub fit_error: Option<String>,
}

/// Box cumulants for each cube size in `sizes`, grouped by order.
pub fn cumulant_sweep(
    fields: &[ErrorField],
    sizes: &[usize],
    n_max: usize,
    plan: SamplingPlan,
    key: StreamKey,
    exec: Execution,
) -> Result<Vec<CumulantReport>> {
    let mut by_size = Vec::with_capacity(sizes.len());
    for &l in sizes {
        by_size.push(box_cumulants(fields, BoxShape::cube(l), n_max, plan, key.child(l as u64), exec)?);
    }
    Ok((0..n_max)
        .map(|j| {
            let estimates: Vec<f64> = by_size.iter().map(|e| e[j].scaled).collect();
            let stderrs: Vec<f64> = by_size.iter().map(|e| e[j].stderr).collect();
            let (fit, fit_error) = match fit_cumulant_scaling(sizes, &estimates, &stderrs, j + 1) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            CumulantReport {
                order: j + 1,
                sizes: sizes.to_vec(),
                estimates,
                stderrs,
                fit,
                fit_error,
            }
        })
        .collect())
}
