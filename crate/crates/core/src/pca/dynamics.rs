use rand::Rng;

use super::noise::NoiseModel;
use super::rule::{CARule, RuleSchedule};
use super::spin::{Boundary, Spin, SpinConfig};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::storage::seed::StreamKey;

/// A recorded PCA run. `magnetizations[t]` is the magnetization of
/// `configs[t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaTrajectory {
    pub configs: Vec<SpinConfig>,
    pub magnetizations: Vec<f64>,
}

fn check_neighborhood(config: &SpinConfig, rule: &CARule) -> Result<()> {
    if let Boundary::Fixed(_) = config.boundary() {
        for &(dx, dy) in rule.neighborhood() {
            if dx.unsigned_abs() as usize >= config.width()
                || dy.unsigned_abs() as usize >= config.height()
            {
                return Err(Error::NeighborhoodTooLarge {
                    rule: rule.name().to_string(),
                    dx,
                    dy,
                    width: config.width(),
                    height: config.height(),
                });
            }
        }
    }
    Ok(())
}

/// Synchronous update: every output cell reads only the input grid.
pub fn apply_rule(config: &SpinConfig, rule: &CARule) -> Result<SpinConfig> {
    apply_rule_with(config, rule, Execution::Sequential)
}

pub fn apply_rule_with(config: &SpinConfig, rule: &CARule, exec: Execution) -> Result<SpinConfig> {
    check_neighborhood(config, rule)?;
    let (w, h) = (config.width(), config.height());
    let mut out = config.clone();
    match config.boundary() {
        Boundary::Periodic => {
            // Wrapped column index per offset, and the row offset.
            let cols: Vec<Vec<usize>> = rule
                .neighborhood()
                .iter()
                .map(|&(dx, _)| {
                    (0..w)
                        .map(|x| (x as i64 + dx as i64).rem_euclid(w as i64) as usize)
                        .collect()
                })
                .collect();
            let src = config.cells();
            par::for_each_row(exec, out.cells_mut(), w, |y, row| {
                let rows: Vec<&[Spin]> = rule
                    .neighborhood()
                    .iter()
                    .map(|&(_, dy)| {
                        let yy = (y as i64 + dy as i64).rem_euclid(h as i64) as usize;
                        &src[yy * w..(yy + 1) * w]
                    })
                    .collect();
                for (x, cell) in row.iter_mut().enumerate() {
                    let mut mask = 0usize;
                    for (i, (r, c)) in rows.iter().zip(&cols).enumerate() {
                        mask |= (r[c[x]].is_up() as usize) << i;
                    }
                    *cell = rule.apply_mask(mask);
                }
            });
        }
        Boundary::Fixed(_) => {
            par::for_each_row(exec, out.cells_mut(), w, |y, row| {
                for (x, cell) in row.iter_mut().enumerate() {
                    let mut mask = 0usize;
                    for (i, &(dx, dy)) in rule.neighborhood().iter().enumerate() {
                        mask |= (config.get_offset(x, y, dx, dy).is_up() as usize) << i;
                    }
                    *cell = rule.apply_mask(mask);
                }
            });
        }
    }
    Ok(out)
}

/// Independent per-cell overrides. Row `y` draws from `key.child(y)`.
pub fn apply_noise(config: &SpinConfig, noise: &NoiseModel, key: StreamKey) -> Result<SpinConfig> {
    apply_noise_with(config, noise, key, Execution::Sequential)
}

pub fn apply_noise_with(
    config: &SpinConfig,
    noise: &NoiseModel,
    key: StreamKey,
    exec: Execution,
) -> Result<SpinConfig> {
    noise.validate()?;
    let mut out = config.clone();
    if noise.is_silent() {
        return Ok(out);
    }
    let w = config.width();
    par::for_each_row(exec, out.cells_mut(), w, |y, row| {
        let mut rng = key.child(y as u64).stream();
        for cell in row.iter_mut() {
            let u: f64 = rng.random();
            *cell = noise.perturb(*cell, u);
        }
    });
    Ok(out)
}

/// Rule, then noise.
pub fn pca_step(
    config: &SpinConfig,
    rule: &CARule,
    noise: &NoiseModel,
    key: StreamKey,
) -> Result<SpinConfig> {
    let next = apply_rule(config, rule)?;
    apply_noise(&next, noise, key)
}

/// Run `steps` updates; step `t` uses `schedule.at(t)` and draws noise from
/// `key.child(t)`.
pub fn run_pca(
    initial: &SpinConfig,
    schedule: &RuleSchedule,
    noise: &NoiseModel,
    steps: usize,
    key: StreamKey,
) -> Result<PcaTrajectory> {
    let mut configs = Vec::with_capacity(steps + 1);
    let mut magnetizations = Vec::with_capacity(steps + 1);
    configs.push(initial.clone());
    magnetizations.push(magnetization(initial));
    let mut current = initial.clone();
    for t in 0..steps {
        current = pca_step(&current, schedule.at(t), noise, key.child(t as u64))?;
        magnetizations.push(magnetization(&current));
        configs.push(current.clone());
    }
    Ok(PcaTrajectory {
        configs,
        magnetizations,
    })
}

/// Same dynamics as [`run_pca`] but only the magnetization series is kept.
pub fn pca_magnetizations(
    initial: &SpinConfig,
    schedule: &RuleSchedule,
    noise: &NoiseModel,
    steps: usize,
    key: StreamKey,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(magnetization(initial));
    let mut current = initial.clone();
    for t in 0..steps {
        current = pca_step(&current, schedule.at(t), noise, key.child(t as u64))?;
        out.push(magnetization(&current));
    }
    Ok(out)
}

pub fn magnetization(config: &SpinConfig) -> f64 {
    let sum: i64 = config.cells().iter().map(|s| s.value() as i64).sum();
    sum as f64 / config.len() as f64
}
