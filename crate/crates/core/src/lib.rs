//! Simulation and analysis of Toom-family probabilistic cellular automata
//! and of their emulation by periodically driven Langevin oscillators.
//!
//! * [`pca`]: exact discrete engine.
//! * [`langevin`]: the Floquet-Langevin oscillator lattice.
//! * [`analysis`]: error fields, rates, cumulants, correlations and SCGFs.
//! * [`harness`]: experiment scenarios and CSV outputs.
//! * [`storage`]: configs, seeding and manifests.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod harness;
pub mod langevin;
pub mod par;
pub mod pca;
pub mod storage;

pub use error::{Error, Result};
