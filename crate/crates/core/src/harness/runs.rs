//! Experiment building blocks: single realizations and their aggregation
//! over noise realizations. Realizations run through [`par::map_indices`]
//! with streams derived from the grid point's value and the realization
//! index, so results do not depend on scheduling or on grid order.

use serde::Serialize;

use super::order::{dtc_order_parameter, OrderEstimate};
use crate::analysis::{
    detect_errors, error_rate_pooled, extract_discrete, pe_equilibrium, ErrorField, ErrorRate,
};
use crate::error::{Error, Result};
use crate::langevin::{run_floquet, FloquetEngine, FloquetParams, LangevinTrajectory};
use crate::par::{self, Execution};
use crate::pca::{pca_magnetizations, NoiseModel, RuleId, RuleSchedule, Spin, SpinConfig};
use crate::storage::StreamKey;

/// Key for a grid point identified by its control values.
pub fn point_key(root: StreamKey, values: &[f64]) -> StreamKey {
    values.iter().fold(root, |k, v| k.child(v.to_bits()))
}

/// A single PCA realization's magnetization series, one entry per
/// step (the drive period of the bare rule).
pub fn pca_series(
    initial: &SpinConfig,
    rule: RuleId,
    p_e: f64,
    steps: usize,
    key: StreamKey,
) -> Result<Vec<f64>> {
    let noise = NoiseModel::with_error_rate(p_e)?;
    pca_magnetizations(initial, &RuleSchedule::from(rule.rule()), &noise, steps, key)
}

/// One Langevin realization reduced to its stroboscopic A magnetization
/// (indexed by cycle) and the error field of its CA steps.
pub struct LangevinSample {
    pub strobe: Vec<f64>,
    pub errors: ErrorField,
}

pub fn langevin_sample(
    initial: &SpinConfig,
    params: &FloquetParams,
    cycles: usize,
    key: StreamKey,
) -> Result<LangevinSample> {
    if cycles == 0 {
        return Err(Error::Scenario("need at least one cycle".into()));
    }
    let traj = run_floquet(initial, params, cycles, key)?;
    sample_of(&traj, params)
}

fn sample_of(traj: &LangevinTrajectory, params: &FloquetParams) -> Result<LangevinSample> {
    let configs = extract_discrete(traj)?;
    let schedule = RuleSchedule::floquet(params.step2_rule, params.step4_rule);
    Ok(LangevinSample {
        strobe: traj.stroboscopic_m_a(),
        errors: detect_errors(&configs, &schedule)?,
    })
}

/// Error fields of `realizations` Langevin runs, each covering the CA steps
/// after `warmup` cycles.
pub fn langevin_error_fields(
    initial: &SpinConfig,
    params: &FloquetParams,
    warmup: usize,
    measure: usize,
    realizations: usize,
    key: StreamKey,
    exec: Execution,
) -> Result<Vec<ErrorField>> {
    par::map_indices(exec, realizations, |r| {
        let s = langevin_sample(initial, params, warmup + measure, key.child(r as u64))?;
        s.errors.window(2 * warmup, 2 * (warmup + measure))
    })
    .into_iter()
    .collect()
}

/// One point of a phase scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    /// Temperature (Langevin) or imposed error rate (PCA).
    pub control: f64,
    pub v: Option<f64>,
    /// Measured error rate over the order-parameter window.
    pub p_e: f64,
    pub p_e_stderr: f64,
    pub plateau: f64,
    pub stderr: f64,
    pub realizations: usize,
}

/// PCA scan point at imposed error rate `p_e`.
#[allow(clippy::too_many_arguments)]
pub fn pca_phase_point(
    initial: &SpinConfig,
    rule: RuleId,
    p_e: f64,
    steps: usize,
    window: std::ops::Range<usize>,
    realizations: usize,
    key: StreamKey,
    exec: Execution,
) -> Result<PhasePoint> {
    let series: Vec<Vec<f64>> = par::map_indices(exec, realizations, |r| {
        pca_series(initial, rule, p_e, steps, key.child(r as u64))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let OrderEstimate {
        plateau,
        stderr,
        realizations,
    } = dtc_order_parameter(&series, window)?;
    Ok(PhasePoint {
        control: p_e,
        v: None,
        p_e,
        p_e_stderr: 0.0,
        plateau,
        stderr,
        realizations,
    })
}

/// Langevin scan point; the error rate is measured over the same window
/// as the order parameter.
pub fn langevin_phase_point(
    initial: &SpinConfig,
    params: &FloquetParams,
    cycles: usize,
    window: std::ops::Range<usize>,
    realizations: usize,
    key: StreamKey,
    exec: Execution,
) -> Result<PhasePoint> {
    let samples: Vec<LangevinSample> = par::map_indices(exec, realizations, |r| {
        langevin_sample(initial, params, cycles, key.child(r as u64))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let series: Vec<Vec<f64>> = samples.iter().map(|s| s.strobe.clone()).collect();
    let order = dtc_order_parameter(&series, window.clone())?;
    let steps = samples[0].errors.steps();
    let (from, to) = ((2 * window.start).min(steps - 1), (2 * window.end).min(steps));
    let fields: Vec<ErrorField> = samples
        .iter()
        .map(|s| s.errors.window(from, to))
        .collect::<Result<_>>()?;
    let rate = error_rate_pooled(&fields)?;
    Ok(PhasePoint {
        control: params.temperature,
        v: Some(params.v),
        p_e: rate.p_e,
        p_e_stderr: rate.stderr,
        plateau: order.plateau,
        stderr: order.stderr,
        realizations: order.realizations,
    })
}

/// One row of the error-rate benchmark.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeRow {
    pub rule: String,
    pub v: f64,
    pub temperature: f64,
    pub v_over_t: f64,
    pub p_e: f64,
    pub stderr: f64,
    pub pe_equilibrium: f64,
}

/// Error rate of the Langevin emulation of `rule`, which drives both
/// sub-steps, from a uniform start.
#[allow(clippy::too_many_arguments)]
pub fn error_bench_point(
    rule: RuleId,
    base: &FloquetParams,
    width: usize,
    height: usize,
    warmup: usize,
    measure: usize,
    realizations: usize,
    key: StreamKey,
    exec: Execution,
) -> Result<PeRow> {
    let params = base.clone().with_rules(rule, rule);
    let initial = SpinConfig::uniform(width, height, Spin::Up)?;
    let fields = langevin_error_fields(&initial, &params, warmup, measure, realizations, key, exec)?;
    let ErrorRate { p_e, stderr, .. } = error_rate_pooled(&fields)?;
    Ok(PeRow {
        rule: rule.as_str().to_string(),
        v: params.v,
        temperature: params.temperature,
        v_over_t: params.v / params.temperature,
        p_e,
        stderr,
        pe_equilibrium: pe_equilibrium(params.v_interaction(), params.temperature),
    })
}

/// Dense `(time, q_A, q_B)` samples at one site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSample {
    pub time: f64,
    pub q_a: f64,
    pub q_b: f64,
}

/// Follow the oscillators at `site` from a uniform up state with a single
/// down cell there, sampling every `every` integration steps.
pub fn correction_trace(
    params: &FloquetParams,
    width: usize,
    height: usize,
    site: (usize, usize),
    cycles: usize,
    every: usize,
    key: StreamKey,
) -> Result<Vec<TraceSample>> {
    let (x, y) = site;
    if x >= width || y >= height {
        return Err(Error::Scenario(format!("site ({x}, {y}) outside {width}x{height}")));
    }
    let mut initial = SpinConfig::uniform(width, height, Spin::Up)?;
    initial.set(x, y, Spin::Down);
    let mut engine = FloquetEngine::from_spins(&initial, params.clone(), key)?;
    let i = engine.lattice().index(x, y);
    let mut out = vec![TraceSample {
        time: 0.0,
        q_a: engine.lattice().qa[i],
        q_b: engine.lattice().qb[i],
    }];
    for _ in 0..4 * cycles {
        engine.run_substep_observed(every, |t, lat| {
            out.push(TraceSample {
                time: t,
                q_a: lat.qa[i],
                q_b: lat.qb[i],
            })
        })?;
    }
    Ok(out)
}
