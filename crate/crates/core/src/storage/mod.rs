//! Seeding, configuration and run manifests.

pub mod config;
pub mod manifest;
pub mod seed;

pub use config::{load_config, Engine, LatticeConfig, PcaConfig, RunConfig, ScenarioConfig, Tier};
pub use manifest::{Manifest, PointFailure};
pub use seed::{derive_stream, Stream, StreamKey};
