use serde::{Deserialize, Serialize};

use super::spin::Spin;
use crate::error::{Error, Result};

/// Per-cell, per-step independent override noise.
///
/// After the rule is applied each cell is overridden to `Up` with
/// probability `eps_up` and to `Down` with probability `eps_down`, otherwise
/// kept. An override to the value the rule already produced is not an error,
/// so the error probability at a cell is the override rate towards the
/// opposite state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub eps_up: f64,
    pub eps_down: f64,
}

impl NoiseModel {
    pub fn new(eps_up: f64, eps_down: f64) -> Result<Self> {
        let m = Self { eps_up, eps_down };
        m.validate()?;
        Ok(m)
    }

    pub fn none() -> Self {
        Self {
            eps_up: 0.0,
            eps_down: 0.0,
        }
    }

    /// Unbiased noise whose error rate per space-time cell is `p`.
    pub fn with_error_rate(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, e) in [("eps_up", self.eps_up), ("eps_down", self.eps_down)] {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::Noise(format!("{name} = {e} is outside [0, 1]")));
            }
        }
        if self.eps_up + self.eps_down > 1.0 + 1e-12 {
            return Err(Error::Noise(format!(
                "override probabilities sum to {} > 1",
                self.eps_up + self.eps_down
            )));
        }
        Ok(())
    }

    pub fn is_silent(&self) -> bool {
        self.eps_up == 0.0 && self.eps_down == 0.0
    }

    pub fn override_probability(&self, target: Spin) -> f64 {
        match target {
            Spin::Up => self.eps_up,
            Spin::Down => self.eps_down,
        }
    }

    /// Probability that a cell whose rule output is `rule_output` ends up
    /// in the other state.
    pub fn error_probability(&self, rule_output: Spin) -> f64 {
        self.override_probability(-rule_output)
    }

    /// One-cell Markov kernel row: `(P(Up), P(Down))` given the rule output.
    pub fn kernel(&self, rule_output: Spin) -> (f64, f64) {
        let keep = 1.0 - self.eps_up - self.eps_down;
        match rule_output {
            Spin::Up => (keep + self.eps_up, self.eps_down),
            Spin::Down => (self.eps_up, keep + self.eps_down),
        }
    }

    /// Apply the override to one cell given a uniform draw in `[0, 1)`.
    #[inline]
    pub fn perturb(&self, s: Spin, u: f64) -> Spin {
        if u < self.eps_up {
            Spin::Up
        } else if u < self.eps_up + self.eps_down {
            Spin::Down
        } else {
            s
        }
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::none()
    }
}
