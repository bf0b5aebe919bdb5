use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pca::RuleId;

/// Physical and numerical parameters of the driven Langevin dynamics.
///
/// The pinning strength is `v` and the interaction strength is `v / 4`.
/// Friction is chosen per sub-step from the damping ratio `kappa_f`:
/// `kappa_f * 2 sqrt(v_I)` on a driven sublattice and
/// `kappa_f * 4 sqrt(2 v_pin)` on a pinned one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FloquetParams {
    pub v: f64,
    /// Linear symmetry-breaking term added to the pinning potential.
    pub field: f64,
    pub temperature: f64,
    pub kappa_f: f64,
    pub dt: f64,
    pub mass: f64,
    pub step2_rule: RuleId,
    pub step4_rule: RuleId,
    pub divergence_guard: f64,
    pub kick: KickScale,
    /// Duration over which a freshly released sublattice's pinning potential
    /// ramps linearly from zero. Zero means an instantaneous switch.
    pub pin_ramp: f64,
}

impl Default for FloquetParams {
    fn default() -> Self {
        Self {
            v: 50.0,
            field: 1e-4,
            temperature: 0.0,
            kappa_f: 1.0,
            dt: 1e-3,
            mass: 0.5,
            step2_rule: RuleId::Toom,
            step4_rule: RuleId::PiToom,
            divergence_guard: 1e6,
            kick: KickScale::Thermal,
            pin_ramp: 0.0,
        }
    }
}

/// Variance convention for the random momentum kicks.
///
/// With friction `-gamma p` and `dq/dt = p / m`, the stationary momentum
/// variance is `sigma^2 / (2 gamma dt)`. `Thermal` uses `2 gamma m T dt`, so
/// the bath sits at temperature `T`. `Unit` uses `2 gamma T dt`, which for
/// `m != 1` equilibrates at `T / m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KickScale {
    #[default]
    Thermal,
    Unit,
}

/// Floquet period in time units; each of the four sub-steps lasts one unit.
pub const TAU: f64 = 4.0;

impl FloquetParams {
    pub fn with_v(mut self, v: f64) -> Self {
        self.v = v;
        self
    }

    pub fn with_temperature(mut self, t: f64) -> Self {
        self.temperature = t;
        self
    }

    pub fn with_rules(mut self, step2: RuleId, step4: RuleId) -> Self {
        self.step2_rule = step2;
        self.step4_rule = step4;
        self
    }

    pub fn with_kappa(mut self, kappa_f: f64) -> Self {
        self.kappa_f = kappa_f;
        self
    }

    pub fn kick_mass(&self) -> f64 {
        match self.kick {
            KickScale::Thermal => self.mass,
            KickScale::Unit => 1.0,
        }
    }

    pub fn v_pin(&self) -> f64 {
        self.v
    }

    pub fn v_interaction(&self) -> f64 {
        self.v / 4.0
    }

    pub fn gamma_drive(&self) -> f64 {
        self.kappa_f * critical_gamma_drive(self.v_interaction())
    }

    pub fn gamma_relax(&self) -> f64 {
        self.kappa_f * critical_gamma_relax(self.v_pin())
    }

    /// Integration steps per unit-length sub-step.
    pub fn steps_per_unit(&self) -> Result<usize> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::Params(format!("dt must be positive, got {}", self.dt)));
        }
        let n = (1.0 / self.dt).round();
        if n < 1.0 || (n * self.dt - 1.0).abs() > 1e-9 {
            return Err(Error::Params(format!(
                "dt = {} does not divide one time unit",
                self.dt
            )));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("v", self.v),
            ("kappa_f", self.kappa_f),
            ("mass", self.mass),
            ("divergence_guard", self.divergence_guard),
        ];
        for (name, x) in positive {
            if !(x > 0.0) || !x.is_finite() {
                return Err(Error::Params(format!("{name} must be positive, got {x}")));
            }
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(Error::Params(format!(
                "temperature must be non-negative, got {}",
                self.temperature
            )));
        }
        if !self.field.is_finite() {
            return Err(Error::Params("field must be finite".into()));
        }
        if !(0.0..=1.0).contains(&self.pin_ramp) {
            return Err(Error::Params(format!(
                "pin_ramp must lie in [0, 1], got {}",
                self.pin_ramp
            )));
        }
        self.steps_per_unit()?;
        Ok(())
    }
}

/// Critical friction for the interaction well, `2 sqrt(v_I)`.
pub fn critical_gamma_drive(v_interaction: f64) -> f64 {
    2.0 * v_interaction.sqrt()
}

/// Critical friction for the pinning well, `4 sqrt(2 v_pin)`.
pub fn critical_gamma_relax(v_pin: f64) -> f64 {
    4.0 * (2.0 * v_pin).sqrt()
}
