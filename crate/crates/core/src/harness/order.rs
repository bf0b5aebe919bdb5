use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};

/// Plateau of the sign-corrected stroboscopic magnetization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub plateau: f64,
    pub stderr: f64,
    pub realizations: usize,
}

/// Mean of `(-1)^c m_c` over `window` and over realizations, where `c`
/// indexes drive periods in every series.
///
/// The standard error is taken across realizations; with a single series
/// it falls back to ten contiguous batches of the window.
pub fn dtc_order_parameter(series: &[Vec<f64>], window: Range<usize>) -> Result<OrderEstimate> {
    if window.is_empty() {
        return Err(Error::InsufficientSamples("empty order-parameter window".into()));
    }
    if series.is_empty() {
        return Err(Error::InsufficientSamples("no magnetization series".into()));
    }
    if let Some(s) = series.iter().find(|s| s.len() < window.end) {
        return Err(Error::InsufficientSamples(format!(
            "series of length {} is shorter than window end {}",
            s.len(),
            window.end
        )));
    }
    let signed = |s: &[f64], r: Range<usize>| -> f64 {
        let n = r.len() as f64;
        r.map(|c| if c % 2 == 0 { s[c] } else { -s[c] }).sum::<f64>() / n
    };
    let means: Vec<f64> = series.iter().map(|s| signed(s, window.clone())).collect();
    let n = means.len();
    let plateau = means.iter().sum::<f64>() / n as f64;
    let spread = if n >= 2 {
        means
    } else {
        let batches = window.len().min(10);
        (0..batches)
            .map(|b| {
                let lo = window.start + b * window.len() / batches;
                let hi = window.start + (b + 1) * window.len() / batches;
                signed(&series[0], lo..hi)
            })
            .collect()
    };
    Ok(OrderEstimate {
        plateau,
        stderr: crate::analysis::stderr_of_means(&spread),
        realizations: n,
    })
}
