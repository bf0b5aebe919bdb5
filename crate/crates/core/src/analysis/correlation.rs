use serde::Serialize;

use super::blocks::TimeBoundary;
use super::field::ErrorField;
use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Sum of `E_u E_{u + d}` over admissible `u`, and the number of pairs.
/// Space wraps; time wraps only for [`TimeBoundary::Periodic`].
fn pair_sum(field: &ErrorField, dt: i64, dx: i64, dy: i64, time: TimeBoundary) -> (u64, u64) {
    let (st, w, h) = (field.steps() as i64, field.width() as i64, field.height() as i64);
    let ts: Vec<(usize, usize)> = match time {
        TimeBoundary::Open => (0.max(-dt)..st.min(st - dt))
            .map(|t| (t as usize, (t + dt) as usize))
            .collect(),
        TimeBoundary::Periodic => (0..st).map(|t| (t as usize, (t + dt).rem_euclid(st) as usize)).collect(),
    };
    let bits = field.bits();
    let (mut hits, mut pairs) = (0u64, 0u64);
    for (t, t2) in ts {
        for y in 0..h {
            let y2 = (y + dy).rem_euclid(h) as usize;
            let row = &bits[field.index(t, 0, y as usize)..][..w as usize];
            let row2 = &bits[field.index(t2, 0, y2)..][..w as usize];
            let sx = dx.rem_euclid(w) as usize;
            for (x, &e) in row.iter().enumerate() {
                if e != 0 {
                    hits += row2[(x + sx) % w as usize] as u64;
                }
            }
            pairs += w as u64;
        }
    }
    (hits, pairs)
}

/// `<E_u E_{u + d}> - P_E^2` with `P_E` the field mean.
pub fn connected_covariance(field: &ErrorField, dt: i64, dx: i64, dy: i64, time: TimeBoundary) -> f64 {
    let pe = field.count() as f64 / field.len() as f64;
    let (hits, pairs) = pair_sum(field, dt, dx, dy, time);
    if pairs == 0 {
        return 0.0;
    }
    hits as f64 / pairs as f64 - pe * pe
}

/// Connected two-point function normalized by the error rate,
/// `(<E_u E_{u + d}> - P_E^2) / P_E`, translation averaged with space
/// wrapping and no wrap in time. Zero when the field has no errors.
pub fn connected_correlation(field: &ErrorField, dt: i64, dx: i64, dy: i64) -> Result<f64> {
    if dt.unsigned_abs() as usize >= field.steps() {
        return Err(Error::Params(format!(
            "time offset {dt} outside a field of {} steps",
            field.steps()
        )));
    }
    let pe = field.count() as f64 / field.len() as f64;
    if pe == 0.0 {
        return Ok(0.0);
    }
    Ok(connected_covariance(field, dt, dx, dy, TimeBoundary::Open) / pe)
}

/// One entry of a pooled correlation map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub dt: i64,
    pub dx: i64,
    pub dy: i64,
    /// `<E_1 E_2>_c / P_E`.
    pub value: f64,
    /// Standard deviation of `value` for an independent field with the same
    /// `P_E` and pair count.
    pub null_sigma: f64,
}

/// Correlations pooled over `fields` for `0 <= dt <= max_dt` and
/// `|dx|, |dy| <= radius`.
pub fn correlation_map(
    fields: &[ErrorField],
    max_dt: usize,
    radius: usize,
    exec: Execution,
) -> Result<Vec<CorrelationEstimate>> {
    if fields.is_empty() {
        return Err(Error::InsufficientSamples("no error fields".into()));
    }
    if fields.iter().any(|f| f.steps() <= max_dt) {
        return Err(Error::Params(format!("fields shorter than max_dt + 1 = {}", max_dt + 1)));
    }
    let errors: u64 = fields.iter().map(ErrorField::count).sum();
    let cells: u64 = fields.iter().map(|f| f.len() as u64).sum();
    let pe = errors as f64 / cells as f64;
    let r = radius as i64;
    let offsets: Vec<(i64, i64, i64)> = (0..=max_dt as i64)
        .flat_map(|dt| (-r..=r).flat_map(move |dy| (-r..=r).map(move |dx| (dt, dx, dy))))
        .collect();
    Ok(par::map_slice(exec, &offsets, |&(dt, dx, dy)| {
        let (hits, pairs) = fields
            .iter()
            .map(|f| pair_sum(f, dt, dx, dy, TimeBoundary::Open))
            .fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        let (value, null_sigma) = if pe > 0.0 && pairs > 0 {
            (
                (hits as f64 / pairs as f64 - pe * pe) / pe,
                ((1.0 - pe * pe) / pairs as f64).sqrt(),
            )
        } else {
            (0.0, 0.0)
        };
        CorrelationEstimate {
            dt,
            dx,
            dy,
            value,
            null_sigma,
        }
    }))
}
