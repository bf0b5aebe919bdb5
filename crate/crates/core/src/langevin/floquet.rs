//! The four-step Floquet schedule.
//!
//! With `u = floor(t) mod 4`:
//!
//! | u | A                      | B                      |
//! |---|------------------------|------------------------|
//! | 0 | pinned                 | pinned                 |
//! | 1 | pinned                 | driven by A (step two) |
//! | 2 | pinned                 | pinned                 |
//! | 3 | driven by B (step four)| pinned                 |
//!
//! Both sublattices are decoded at the end of every relaxation sub-step
//! (`u = 0, 2`). Potentials switch instantaneously at integer times.

use std::fmt::Write as _;

use super::integrator::{
    langevin_step, Bath, Drive, StepContext, Stencil, SublatticeStep, ThermalNoise, Workspace,
};
use super::lattice::OscillatorLattice;
use super::params::FloquetParams;
use super::potential::PinPotential;
use crate::error::Result;
use crate::pca::{magnetization, RuleSchedule, SpinConfig};
use crate::par::Execution;
use crate::storage::seed::StreamKey;

/// A decode of both sublattices.
#[derive(Debug, Clone, PartialEq)]
pub struct Read {
    pub time: f64,
    pub cycle: usize,
    /// Relaxation sub-step that just ended, or `None` for the initial read.
    pub sub_step: Option<u8>,
    pub a: SpinConfig,
    pub b: SpinConfig,
}

impl Read {
    pub fn m_a(&self) -> f64 {
        magnetization(&self.a)
    }

    pub fn m_b(&self) -> f64 {
        magnetization(&self.b)
    }
}

#[derive(Debug, Clone, Default)]
pub struct LangevinTrajectory {
    pub snapshots: Vec<(f64, OscillatorLattice)>,
    pub reads: Vec<Read>,
    /// Rules applied by the two drive sub-steps, in order.
    pub schedule: Option<RuleSchedule>,
}

impl LangevinTrajectory {
    /// `cycle,sub_step,time,M_A,M_B`; the initial read has `sub_step = -1`.
    pub fn strobe_csv(&self) -> String {
        let mut s = String::from("cycle,sub_step,time,M_A,M_B\n");
        for r in &self.reads {
            let sub = r.sub_step.map_or(-1, |u| u as i32);
            let _ = writeln!(s, "{},{},{:?},{:?},{:?}", r.cycle, sub, r.time, r.m_a(), r.m_b());
        }
        s
    }

    /// Stroboscopic A magnetization: the A read at the end of each cycle's
    /// first relaxation, indexed by cycle.
    pub fn stroboscopic_m_a(&self) -> Vec<f64> {
        self.reads
            .iter()
            .filter(|r| r.sub_step == Some(0))
            .map(Read::m_a)
            .collect()
    }
}

pub struct FloquetEngine {
    params: FloquetParams,
    lattice: OscillatorLattice,
    step2: Stencil,
    step4: Stencil,
    noise: ThermalNoise,
    ws: Workspace,
    steps_per_unit: usize,
    /// Integration steps taken so far.
    step: u64,
    exec: Execution,
}

impl FloquetEngine {
    pub fn new(lattice: OscillatorLattice, params: FloquetParams, key: StreamKey) -> Result<Self> {
        params.validate()?;
        let (w, h) = (lattice.width(), lattice.height());
        Ok(Self {
            step2: Stencil::new(&params.step2_rule.rule(), w, h),
            step4: Stencil::new(&params.step4_rule.rule(), w, h),
            noise: ThermalNoise::new(key, h),
            ws: Workspace::default(),
            steps_per_unit: params.steps_per_unit()?,
            step: 0,
            exec: Execution::Parallel,
            params,
            lattice,
        })
    }

    /// Oscillators at `(Q(spin), 0)` on both sublattices.
    pub fn from_spins(initial: &SpinConfig, params: FloquetParams, key: StreamKey) -> Result<Self> {
        let lattice = OscillatorLattice::from_spins(initial, params.mass)?;
        Self::new(lattice, params, key)
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn params(&self) -> &FloquetParams {
        &self.params
    }

    pub fn lattice(&self) -> &OscillatorLattice {
        &self.lattice
    }

    pub fn time(&self) -> f64 {
        self.step as f64 / self.steps_per_unit as f64
    }

    /// Index of the unit interval currently being integrated.
    pub fn unit(&self) -> u64 {
        self.step / self.steps_per_unit as u64
    }

    pub fn cycle(&self) -> usize {
        (self.unit() / 4) as usize
    }

    pub fn sub_step(&self) -> u8 {
        (self.unit() % 4) as u8
    }

    pub fn schedule(&self) -> RuleSchedule {
        RuleSchedule::floquet(self.params.step2_rule, self.params.step4_rule)
    }

    pub fn read(&self, sub_step: Option<u8>) -> Result<Read> {
        Ok(Read {
            time: self.time(),
            cycle: self.cycle(),
            sub_step,
            a: self.lattice.decode_a()?,
            b: self.lattice.decode_b()?,
        })
    }

    /// Integrate one unit-length sub-step, calling `observe` after every
    /// `every`-th integration step (never when `every == 0`).
    pub fn run_substep_observed(
        &mut self,
        every: usize,
        mut observe: impl FnMut(f64, &OscillatorLattice),
    ) -> Result<()> {
        let sub = self.sub_step();
        let Self {
            params,
            lattice,
            step2,
            step4,
            noise,
            ws,
            steps_per_unit,
            step,
            exec,
        } = self;
        let bath = Bath {
            temperature: params.temperature,
            dt: params.dt,
            guard: params.divergence_guard,
            kick_mass: params.kick_mass(),
        };
        let spu = *steps_per_unit;
        for i in 0..spu {
            let frac = i as f64 / spu as f64;
            let time = *step as f64 / spu as f64;
            let ctx = context_for(params, step2, step4, sub, frac);
            langevin_step(lattice, &ctx, &bath, noise, ws, *exec, time)?;
            *step += 1;
            if every > 0 && *step % every as u64 == 0 {
                observe(*step as f64 / spu as f64, lattice);
            }
        }
        Ok(())
    }

    pub fn run_substep(&mut self) -> Result<()> {
        self.run_substep_observed(0, |_, _| {})
    }

    /// One full period; returns the reads taken after the two relaxations.
    pub fn run_cycle(&mut self) -> Result<Vec<Read>> {
        let mut reads = Vec::with_capacity(2);
        for _ in 0..4 {
            let sub = self.sub_step();
            self.run_substep()?;
            if sub % 2 == 0 {
                reads.push(Read {
                    time: self.time(),
                    cycle: (self.unit() - 1) as usize / 4,
                    sub_step: Some(sub),
                    a: self.lattice.decode_a()?,
                    b: self.lattice.decode_b()?,
                });
            }
        }
        Ok(reads)
    }

    /// The closing relaxation that makes the last step-four write visible.
    pub fn run_closing_relaxation(&mut self) -> Result<Read> {
        debug_assert_eq!(self.sub_step(), 0);
        self.run_substep()?;
        Ok(Read {
            time: self.time(),
            cycle: self.cycle(),
            sub_step: Some(0),
            a: self.lattice.decode_a()?,
            b: self.lattice.decode_b()?,
        })
    }
}

fn context_for<'a>(
    p: &FloquetParams,
    step2: &'a Stencil,
    step4: &'a Stencil,
    sub_step: u8,
    frac: f64,
) -> StepContext<'a> {
    let pin = PinPotential {
        v_pin: p.v_pin(),
        field: p.field,
    };
    let ramp = if p.pin_ramp > 0.0 { (frac / p.pin_ramp).min(1.0) } else { 1.0 };
    let pinned = |scale: f64| SublatticeStep {
        drive: Drive::Pin { potential: pin, scale },
        gamma: p.gamma_relax(),
    };
    let driven = |stencil| SublatticeStep {
        drive: Drive::Driven {
            stencil,
            coupling: p.v_interaction(),
        },
        gamma: p.gamma_drive(),
    };
    match sub_step {
        0 => StepContext { a: pinned(ramp), b: pinned(1.0) },
        1 => StepContext { a: pinned(1.0), b: driven(step2) },
        2 => StepContext { a: pinned(1.0), b: pinned(ramp) },
        _ => StepContext { a: driven(step4), b: pinned(1.0) },
    }
}

/// Advance one period from the engine's current state.
pub fn run_floquet_cycle(engine: &mut FloquetEngine) -> Result<Vec<Read>> {
    engine.run_cycle()
}

/// Run `cycles` periods from `(Q(initial), 0)`.
///
/// The trajectory starts with the initial decode. Each cycle contributes the
/// two post-relaxation reads; when `cycles > 0` one closing relaxation
/// sub-step follows so the final step-four update is read out too.
pub fn run_floquet(
    initial: &SpinConfig,
    params: &FloquetParams,
    cycles: usize,
    key: StreamKey,
) -> Result<LangevinTrajectory> {
    run_floquet_with(initial, params, cycles, key, 0)
}

/// As [`run_floquet`], also storing a lattice snapshot at the start and
/// every `snapshot_every` cycles (never when zero).
pub fn run_floquet_with(
    initial: &SpinConfig,
    params: &FloquetParams,
    cycles: usize,
    key: StreamKey,
    snapshot_every: usize,
) -> Result<LangevinTrajectory> {
    let mut engine = FloquetEngine::from_spins(initial, params.clone(), key)?;
    let mut traj = LangevinTrajectory {
        schedule: Some(engine.schedule()),
        ..Default::default()
    };
    traj.reads.push(engine.read(None)?);
    if snapshot_every > 0 {
        traj.snapshots.push((0.0, engine.lattice().clone()));
    }
    for c in 0..cycles {
        traj.reads.extend(engine.run_cycle()?);
        if snapshot_every > 0 && (c + 1) % snapshot_every == 0 {
            traj.snapshots.push((engine.time(), engine.lattice().clone()));
        }
    }
    if cycles > 0 {
        traj.reads.push(engine.run_closing_relaxation()?);
    }
    Ok(traj)
}
