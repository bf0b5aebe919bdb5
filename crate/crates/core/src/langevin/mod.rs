//! Driven Langevin emulation of a cellular automaton.
//!
//! Every cell carries two oscillators, A and B. Over one Floquet period the
//! B oscillators are driven to the step-two rule applied to A, then the A
//! oscillators are driven to the step-four rule applied to B, with pinning
//! relaxations in between.

mod floquet;
mod integrator;
mod lattice;
mod params;
mod potential;

pub use floquet::{
    run_floquet, run_floquet_cycle, run_floquet_with, FloquetEngine, LangevinTrajectory, Read,
};
pub use integrator::{
    compute_forces, langevin_step, potential_energy, Bath, Drive, StepContext, Stencil,
    SublatticeStep, ThermalNoise, Workspace,
};
pub use lattice::{OscillatorLattice, DUMP_MAGIC};
pub use params::{critical_gamma_drive, critical_gamma_relax, FloquetParams, KickScale, TAU};
pub use potential::{
    decode_s, encode_q, interaction_potential, interaction_target, pin_potential,
    InteractionTerms, PinPotential, SmoothedRule,
};
