use serde::Serialize;

use crate::error::{Error, Result};
use crate::langevin::LangevinTrajectory;
use crate::pca::{apply_rule, RuleSchedule, SpinConfig};

/// Space-time indicator of CA-rule violations.
///
/// Cell `(t, x, y)` is set when the state after CA step `t + 1` differs from
/// the rule applied to the state after step `t`. Storage is time-major, then
/// row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorField {
    steps: usize,
    width: usize,
    height: usize,
    bits: Vec<u8>,
    rules: Vec<String>,
}

impl ErrorField {
    pub fn from_bits(
        steps: usize,
        width: usize,
        height: usize,
        bits: Vec<u8>,
        rules: Vec<String>,
    ) -> Result<Self> {
        if steps == 0 || width == 0 || height == 0 {
            return Err(Error::Trajectory("error field needs non-zero extent".into()));
        }
        if bits.len() != steps * width * height {
            return Err(Error::Trajectory(format!(
                "{} bits for a {steps}x{width}x{height} field",
                bits.len()
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Trajectory("error bits must be 0 or 1".into()));
        }
        Ok(Self {
            steps,
            width,
            height,
            bits,
            rules,
        })
    }

    pub fn from_fn(
        steps: usize,
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize, usize) -> bool,
    ) -> Result<Self> {
        let mut bits = Vec::with_capacity(steps * width * height);
        for t in 0..steps {
            for y in 0..height {
                for x in 0..width {
                    bits.push(f(t, x, y) as u8);
                }
            }
        }
        Self::from_bits(steps, width, height, bits, Vec::new())
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Names of the cyclic rule schedule the field was measured against.
    pub fn rules(&self) -> &[String] {
        &self.rules
    }

    pub fn index(&self, t: usize, x: usize, y: usize) -> usize {
        (t * self.height + y) * self.width + x
    }

    pub fn get(&self, t: usize, x: usize, y: usize) -> bool {
        self.bits[self.index(t, x, y)] != 0
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|&b| b as u64).sum()
    }

    /// Time slices `[from, to)`.
    pub fn window(&self, from: usize, to: usize) -> Result<Self> {
        if from >= to || to > self.steps {
            return Err(Error::Trajectory(format!(
                "window [{from}, {to}) outside {} steps",
                self.steps
            )));
        }
        let plane = self.width * self.height;
        Ok(Self {
            steps: to - from,
            width: self.width,
            height: self.height,
            bits: self.bits[from * plane..to * plane].to_vec(),
            rules: self.rules.clone(),
        })
    }

    /// Keep only the steps whose schedule phase is `phase` (mod `period`).
    pub fn phase(&self, period: usize, phase: usize) -> Result<Self> {
        if period == 0 || phase >= period {
            return Err(Error::Trajectory(format!("phase {phase} of period {period}")));
        }
        let plane = self.width * self.height;
        let kept: Vec<usize> = (0..self.steps).filter(|t| t % period == phase).collect();
        if kept.is_empty() {
            return Err(Error::Trajectory("no steps at requested phase".into()));
        }
        let mut bits = Vec::with_capacity(kept.len() * plane);
        for t in &kept {
            bits.extend_from_slice(&self.bits[t * plane..(t + 1) * plane]);
        }
        let rules = self.rules.get(phase).cloned().into_iter().collect();
        Ok(Self {
            steps: kept.len(),
            width: self.width,
            height: self.height,
            bits,
            rules,
        })
    }
}

/// The CA trajectory encoded by a Langevin run: the initial decode, then the
/// freshly written sublattice after each drive, i.e. B at the read closing
/// sub-step 2 and A at the read closing the next cycle's sub-step 0.
pub fn extract_discrete(traj: &LangevinTrajectory) -> Result<Vec<SpinConfig>> {
    let first = traj
        .reads
        .first()
        .ok_or_else(|| Error::Trajectory("trajectory has no read points".into()))?;
    let mut out = vec![first.a.clone()];
    for r in &traj.reads[1..] {
        match (r.sub_step, r.cycle) {
            (Some(0), 0) => {}
            (Some(0), _) => out.push(r.a.clone()),
            (Some(2), _) => out.push(r.b.clone()),
            (other, _) => {
                return Err(Error::Trajectory(format!("unexpected read at sub-step {other:?}")))
            }
        }
    }
    Ok(out)
}

/// Compare each step with the schedule's rule applied to its predecessor;
/// step `t` (from `configs[t]` to `configs[t + 1]`) uses `schedule.at(t)`.
pub fn detect_errors(configs: &[SpinConfig], schedule: &RuleSchedule) -> Result<ErrorField> {
    if configs.len() < 2 {
        return Err(Error::Trajectory(format!(
            "need at least two configurations, got {}",
            configs.len()
        )));
    }
    let (w, h) = (configs[0].width(), configs[0].height());
    if configs.iter().any(|c| !c.same_dims(&configs[0])) {
        return Err(Error::Trajectory("configurations differ in size".into()));
    }
    let mut bits = Vec::with_capacity((configs.len() - 1) * w * h);
    for (t, pair) in configs.windows(2).enumerate() {
        let predicted = apply_rule(&pair[0], schedule.at(t))?;
        bits.extend(
            predicted
                .cells()
                .iter()
                .zip(pair[1].cells())
                .map(|(p, s)| (p != s) as u8),
        );
    }
    ErrorField::from_bits(configs.len() - 1, w, h, bits, schedule.names())
}

/// Mean error indicator and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRate {
    pub p_e: f64,
    pub stderr: f64,
    pub errors: u64,
    pub cells: u64,
}

const TIME_BATCHES: usize = 10;

/// `P_E` of one field; the standard error comes from up to ten contiguous
/// time batches.
pub fn error_rate(field: &ErrorField) -> ErrorRate {
    let plane = field.width * field.height;
    let batches = field.steps.min(TIME_BATCHES);
    let means: Vec<f64> = (0..batches)
        .map(|b| {
            let (t0, t1) = (b * field.steps / batches, (b + 1) * field.steps / batches);
            let s = &field.bits[t0 * plane..t1 * plane];
            s.iter().map(|&x| x as u64).sum::<u64>() as f64 / s.len() as f64
        })
        .collect();
    let errors = field.count();
    let cells = field.len() as u64;
    ErrorRate {
        p_e: errors as f64 / cells as f64,
        stderr: stderr_of_means(&means),
        errors,
        cells,
    }
}

/// `P_E` pooled over several fields (typically independent trajectories);
/// with two or more fields the standard error is taken across fields.
pub fn error_rate_pooled(fields: &[ErrorField]) -> Result<ErrorRate> {
    match fields {
        [] => Err(Error::InsufficientSamples("no error fields".into())),
        [one] => Ok(error_rate(one)),
        _ => {
            let errors: u64 = fields.iter().map(ErrorField::count).sum();
            let cells: u64 = fields.iter().map(|f| f.len() as u64).sum();
            let means: Vec<f64> = fields.iter().map(|f| error_rate(f).p_e).collect();
            Ok(ErrorRate {
                p_e: errors as f64 / cells as f64,
                stderr: stderr_of_means(&means),
                errors,
                cells,
            })
        }
    }
}

pub(crate) fn stderr_of_means(means: &[f64]) -> f64 {
    let n = means.len();
    if n < 2 {
        return 0.0;
    }
    let mean = means.iter().sum::<f64>() / n as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Boltzmann estimate of the error rate in a single interaction well:
/// the weight of `exp(-(v_I/2) (q + 1)^2 / T)` beyond `q = 0`,
/// `erfc(sqrt(v_I / 2T)) / 2`.
///
/// Zero temperature gives 0 for `v_I > 0`; `v_I = 0` gives 1/2.
pub fn pe_equilibrium(v_interaction: f64, temperature: f64) -> f64 {
    if v_interaction <= 0.0 {
        return 0.5;
    }
    if temperature <= 0.0 {
        return 0.0;
    }
    0.5 * libm::erfc((v_interaction / (2.0 * temperature)).sqrt())
}
