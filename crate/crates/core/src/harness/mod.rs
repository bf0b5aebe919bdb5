//! Scenario construction and the experiment drivers behind the CLI.

mod initial;
mod order;
mod runs;
mod scenario;

pub use initial::{build_initial, InitialState};
pub use order::{dtc_order_parameter, OrderEstimate};
pub use runs::{
    correction_trace, error_bench_point, langevin_error_fields, langevin_phase_point, langevin_sample,
    pca_phase_point, pca_series, point_key, LangevinSample, PeRow, PhasePoint, TraceSample,
};
pub use scenario::{run_scenario, Command, RunSummary};
