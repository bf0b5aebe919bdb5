//! Error statistics of discrete trajectories: error fields and rates, box
//! cumulants with finite-size fits, connected correlations and empirical
//! scaled cumulant generating functions.

mod blocks;
mod correlation;
mod cumulants;
mod field;
mod fit;
mod scgf;

pub use blocks::{box_counts, BlockCounter, BoxShape, SamplingPlan, TimeBoundary};
pub use correlation::{connected_correlation, connected_covariance, correlation_map, CorrelationEstimate};
pub use cumulants::{
    box_cumulants, cumulant_sweep, k_statistics, CumulantEstimate, CumulantReport, BOOTSTRAP_RESAMPLES,
    MAX_ORDER,
};
pub use field::{
    detect_errors, error_rate, error_rate_pooled, extract_discrete, pe_equilibrium, ErrorField, ErrorRate,
};
pub use fit::{fit_cumulant_scaling, ScalingFit};
pub use scgf::{
    cumulant_ratios, default_geometries, default_k_grid, empirical_scgf, scgf_bound, ScgfCurve, ScgfReport,
    DOMINANCE_SHARE,
};
pub(crate) use field::stderr_of_means;
