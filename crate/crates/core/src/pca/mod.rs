//! Discrete-state engine: binary spin grids, deterministic local rules, and
//! their noisy (probabilistic) perturbations.

mod dynamics;
pub mod format;
mod noise;
mod rule;
mod spin;

pub use dynamics::{
    apply_noise, apply_noise_with, apply_rule, apply_rule_with, magnetization, pca_magnetizations,
    pca_step, run_pca, PcaTrajectory,
};
pub use noise::NoiseModel;
pub use rule::{CARule, RuleId, RuleSchedule, NEC};
pub use spin::{Boundary, Spin, SpinConfig};
