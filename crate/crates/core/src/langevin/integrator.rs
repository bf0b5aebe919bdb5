//! First-order Langevin stepper.
//!
//! One step drifts every position with the current momentum, evaluates
//! forces at the new positions, then kicks every momentum with force,
//! friction and a Gaussian impulse of variance `2 gamma T dt`.

use rand_distr::{Distribution, StandardNormal};

use super::lattice::OscillatorLattice;
use super::potential::{PinPotential, SmoothedRule};
use crate::error::{Error, Result};
use crate::pca::CARule;
use crate::par::{self, Execution};
use crate::storage::seed::{Stream, StreamKey};

/// Smoothed rule plus neighbor index tables for one lattice geometry.
#[derive(Debug, Clone)]
pub struct Stencil {
    name: String,
    smooth: SmoothedRule,
    k: usize,
    /// `fwd[x * k + i]`: site `x + offset_i`.
    fwd: Vec<u32>,
    /// `bwd[y * k + i]`: site `y - offset_i`.
    bwd: Vec<u32>,
}

impl Stencil {
    pub fn new(rule: &CARule, width: usize, height: usize) -> Self {
        let k = rule.arity();
        let n = width * height;
        let mut fwd = vec![0u32; n * k];
        let mut bwd = vec![0u32; n * k];
        let wrap = |v: i64, m: usize| v.rem_euclid(m as i64) as usize;
        for y in 0..height {
            for x in 0..width {
                let s = y * width + x;
                for (i, &(dx, dy)) in rule.neighborhood().iter().enumerate() {
                    let (dx, dy) = (dx as i64, dy as i64);
                    fwd[s * k + i] = (wrap(y as i64 + dy, height) * width + wrap(x as i64 + dx, width)) as u32;
                    bwd[s * k + i] = (wrap(y as i64 - dy, height) * width + wrap(x as i64 - dx, width)) as u32;
                }
            }
        }
        Self {
            name: rule.name().to_string(),
            smooth: SmoothedRule::new(rule),
            k,
            fwd,
            bwd,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn sites(&self) -> usize {
        self.fwd.len() / self.k
    }

    /// Target of site `s` given the source sublattice.
    pub fn target(&self, source: &[f64], s: usize) -> f64 {
        let mut q = [0.0; 16];
        for i in 0..self.k {
            q[i] = source[self.fwd[s * self.k + i] as usize];
        }
        self.smooth.target(&q[..self.k])
    }
}

/// What acts on one sublattice during a step.
#[derive(Debug, Clone, Copy)]
pub enum Drive<'a> {
    Free,
    Harmonic { stiffness: f64, center: f64 },
    Pin { potential: PinPotential, scale: f64 },
    /// Pulled towards the stencil's target of the *other* sublattice with
    /// strength `coupling`; the other sublattice feels the reaction.
    Driven { stencil: &'a Stencil, coupling: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct SublatticeStep<'a> {
    pub drive: Drive<'a>,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a> {
    pub a: SublatticeStep<'a>,
    pub b: SublatticeStep<'a>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bath {
    pub temperature: f64,
    pub dt: f64,
    pub guard: f64,
    /// Mass entering the kick variance `2 gamma m T dt`. Setting this to the
    /// oscillator mass gives equipartition at `T`; setting it to one gives
    /// the unweighted `2 gamma T dt` kick.
    pub kick_mass: f64,
}

/// One generator per row per sublattice, so a row's draws never depend on
/// how rows are scheduled.
#[derive(Debug, Clone)]
pub struct ThermalNoise {
    rows_a: Vec<Stream>,
    rows_b: Vec<Stream>,
}

impl ThermalNoise {
    pub fn new(key: StreamKey, height: usize) -> Self {
        let rows = |sub: u64| (0..height as u64).map(|y| key.child(sub).child(y).stream()).collect();
        Self {
            rows_a: rows(0),
            rows_b: rows(1),
        }
    }
}

/// Scratch buffers reused across steps.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub fa: Vec<f64>,
    pub fb: Vec<f64>,
    contrib: Vec<f64>,
}

const PARALLEL_MIN_SITES: usize = 64 * 64;

fn lattice_exec(exec: Execution, n: usize) -> Execution {
    if n >= PARALLEL_MIN_SITES {
        exec
    } else {
        Execution::Sequential
    }
}

/// Forces on one sublattice from its own single-site potential (the driven
/// term is handled separately).
fn local_forces(drive: &Drive<'_>, q: &[f64], f: &mut [f64]) {
    match *drive {
        Drive::Free | Drive::Driven { .. } => f.iter_mut().for_each(|x| *x = 0.0),
        Drive::Harmonic { stiffness, center } => {
            for (fi, &qi) in f.iter_mut().zip(q) {
                *fi = -stiffness * (qi - center);
            }
        }
        Drive::Pin { potential, scale } => {
            for (fi, &qi) in f.iter_mut().zip(q) {
                *fi = scale * potential.force(qi);
            }
        }
    }
}

/// Add the driven term for `driven` (positions `qd`, forces `fd`) whose
/// target reads `source` (forces `fs`).
#[allow(clippy::too_many_arguments)]
fn driven_forces(
    exec: Execution,
    width: usize,
    stencil: &Stencil,
    coupling: f64,
    qd: &[f64],
    source: &[f64],
    fd: &mut [f64],
    fs: &mut [f64],
    contrib: &mut Vec<f64>,
) {
    let k = stencil.k;
    contrib.resize(qd.len() * k, 0.0);
    par::for_each_row_zip(exec, fd, width, contrib, width * k, |y, frow, crow| {
        let mut q = [0.0; 16];
        let mut g = [0.0; 16];
        for (xi, fx) in frow.iter_mut().enumerate() {
            let s = y * width + xi;
            let idx = &stencil.fwd[s * k..(s + 1) * k];
            for i in 0..k {
                q[i] = source[idx[i] as usize];
            }
            let target = stencil.smooth.eval(&q[..k], &mut g[..k]);
            let r = coupling * (target - qd[s]);
            *fx += r;
            for i in 0..k {
                crow[xi * k + i] = -r * g[i];
            }
        }
    });
    let contrib = &*contrib;
    par::for_each_row(exec, fs, width, |y, frow| {
        for (xi, fx) in frow.iter_mut().enumerate() {
            let s = y * width + xi;
            let idx = &stencil.bwd[s * k..(s + 1) * k];
            let mut acc = 0.0;
            for i in 0..k {
                acc += contrib[idx[i] as usize * k + i];
            }
            *fx += acc;
        }
    });
}

/// Fill `ws.fa` / `ws.fb` with the forces at the current positions.
pub fn compute_forces(lattice: &OscillatorLattice, ctx: &StepContext<'_>, ws: &mut Workspace, exec: Execution) {
    let n = lattice.len();
    let w = lattice.width();
    let exec = lattice_exec(exec, n);
    ws.fa.resize(n, 0.0);
    ws.fb.resize(n, 0.0);
    local_forces(&ctx.a.drive, &lattice.qa, &mut ws.fa);
    local_forces(&ctx.b.drive, &lattice.qb, &mut ws.fb);
    if let Drive::Driven { stencil, coupling } = ctx.a.drive {
        driven_forces(exec, w, stencil, coupling, &lattice.qa, &lattice.qb, &mut ws.fa, &mut ws.fb, &mut ws.contrib);
    }
    if let Drive::Driven { stencil, coupling } = ctx.b.drive {
        driven_forces(exec, w, stencil, coupling, &lattice.qb, &lattice.qa, &mut ws.fb, &mut ws.fa, &mut ws.contrib);
    }
}

/// Total potential energy of the lattice under `ctx`.
pub fn potential_energy(lattice: &OscillatorLattice, ctx: &StepContext<'_>) -> f64 {
    let part = |drive: &Drive<'_>, q: &[f64], other: &[f64]| -> f64 {
        match *drive {
            Drive::Free => 0.0,
            Drive::Harmonic { stiffness, center } => {
                q.iter().map(|x| 0.5 * stiffness * (x - center).powi(2)).sum()
            }
            Drive::Pin { potential, scale } => q.iter().map(|&x| scale * potential.energy_force(x).0).sum(),
            Drive::Driven { stencil, coupling } => (0..q.len())
                .map(|s| 0.5 * coupling * (stencil.target(other, s) - q[s]).powi(2))
                .sum(),
        }
    };
    part(&ctx.a.drive, &lattice.qa, &lattice.qb) + part(&ctx.b.drive, &lattice.qb, &lattice.qa)
}

fn kick(
    exec: Execution,
    width: usize,
    p: &mut [f64],
    f: &[f64],
    gamma: f64,
    bath: &Bath,
    rows: &mut [Stream],
) {
    let dt = bath.dt;
    let sigma = (2.0 * gamma * bath.kick_mass * bath.temperature * dt).sqrt();
    let damp = 1.0 - gamma * dt;
    if sigma == 0.0 {
        for (pi, fi) in p.iter_mut().zip(f) {
            *pi = *pi * damp + fi * dt;
        }
        return;
    }
    par::for_each_row_zip(exec, p, width, rows, 1, |y, prow, rng| {
        let rng = &mut rng[0];
        let frow = &f[y * width..(y + 1) * width];
        for (pi, fi) in prow.iter_mut().zip(frow) {
            let xi: f64 = StandardNormal.sample(rng);
            *pi = *pi * damp + fi * dt + sigma * xi;
        }
    });
}

fn check_guard(lattice: &OscillatorLattice, guard: f64, time: f64) -> Result<()> {
    let arrays: [(&'static str, &[f64]); 4] = [
        ("qA", &lattice.qa),
        ("pA", &lattice.pa),
        ("qB", &lattice.qb),
        ("pB", &lattice.pb),
    ];
    for (what, a) in arrays {
        // `!(x <= guard)` also catches NaN.
        if a.iter().any(|x| !(x.abs() <= guard)) {
            let value = a.iter().map(|x| x.abs()).find(|x| !(*x <= guard)).unwrap();
            return Err(Error::Divergence {
                time,
                what,
                value,
                guard,
            });
        }
    }
    Ok(())
}

/// Advance the lattice by one timestep. `time` is only used for error
/// reporting.
pub fn langevin_step(
    lattice: &mut OscillatorLattice,
    ctx: &StepContext<'_>,
    bath: &Bath,
    noise: &mut ThermalNoise,
    ws: &mut Workspace,
    exec: Execution,
    time: f64,
) -> Result<()> {
    let n = lattice.len();
    let w = lattice.width();
    let vdt = bath.dt / lattice.mass;
    for (q, p) in lattice.qa.iter_mut().zip(&lattice.pa) {
        *q += p * vdt;
    }
    for (q, p) in lattice.qb.iter_mut().zip(&lattice.pb) {
        *q += p * vdt;
    }
    compute_forces(lattice, ctx, ws, exec);
    let exec = lattice_exec(exec, n);
    kick(exec, w, &mut lattice.pa, &ws.fa, ctx.a.gamma, bath, &mut noise.rows_a);
    kick(exec, w, &mut lattice.pb, &ws.fb, ctx.b.gamma, bath, &mut noise.rows_b);
    check_guard(lattice, bath.guard, time)
}
