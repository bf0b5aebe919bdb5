//! TOML run configuration.
//!
//! Every table rejects unknown keys and every missing key takes its default,
//! so a config that loads is complete. A minimal file only needs an engine
//! and the lattice size:
//!
//! ```toml
//! engine = "langevin"
//! [lattice]
//! width = 32
//! height = 32
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::InitialState;
use crate::langevin::FloquetParams;
use crate::par::Execution;
use crate::pca::{NoiseModel, RuleId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Pca,
    #[default]
    Langevin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    #[default]
    Full,
    Quick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub width: usize,
    pub height: usize,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            width: 32,
            height: 32,
        }
    }
}

/// Direct PCA engine settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PcaConfig {
    pub rule: RuleId,
    pub noise: NoiseModel,
}

impl Default for PcaConfig {
    fn default() -> Self {
        Self {
            rule: RuleId::PiToom,
            noise: NoiseModel::none(),
        }
    }
}

/// Grids and budgets for the experiment scenarios. Cycle counts are Floquet
/// periods for the Langevin engine and CA steps for the PCA engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub name: String,
    pub initial: InitialState,
    /// Temperature grid for Langevin scans.
    pub temperatures: Vec<f64>,
    /// Pinning strengths for Langevin scans.
    pub pinning: Vec<f64>,
    /// Per-cell error-rate grid for PCA scans.
    pub error_rates: Vec<f64>,
    pub realizations: usize,
    /// Length of a single run.
    pub cycles: usize,
    /// First cycle of the order-parameter window.
    pub window_start: usize,
    pub window_len: usize,
    /// Error statistics: cycles discarded, then cycles measured.
    pub warmup_cycles: usize,
    pub measure_cycles: usize,
    pub bench_rules: Vec<RuleId>,
    pub box_sizes: Vec<usize>,
    pub blocks_per_field: usize,
    pub max_order: usize,
    pub corr_max_dt: usize,
    pub corr_radius: usize,
    pub trace_kappas: Vec<f64>,
    pub trace_temperatures: Vec<f64>,
    pub trace_cycles: usize,
    /// Integration steps between trace samples.
    pub trace_every: usize,
    /// Cycles between strobe CSV rows in `langevin-run`; snapshots are not
    /// stored when zero.
    pub snapshot_every: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "default".into(),
            initial: InitialState::default(),
            temperatures: vec![2.0, 4.0, 5.17, 6.0, 8.0, 9.6, 11.94, 14.0],
            pinning: vec![50.0],
            error_rates: vec![0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.08, 0.1, 0.15, 0.2],
            realizations: 50,
            cycles: 1250,
            window_start: 750,
            window_len: 500,
            warmup_cycles: 200,
            measure_cycles: 25,
            bench_rules: vec![RuleId::DoNothing, RuleId::Toom, RuleId::PiToom],
            box_sizes: vec![2, 4, 8, 16],
            blocks_per_field: 1000,
            max_order: 4,
            corr_max_dt: 3,
            corr_radius: 4,
            trace_kappas: vec![0.5, 1.0, 1.5],
            trace_temperatures: vec![0.5, 2.0, 10.0],
            trace_cycles: 3,
            trace_every: 10,
            snapshot_every: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub engine: Engine,
    pub seed: u64,
    pub out: PathBuf,
    pub tier: Tier,
    pub execution: Execution,
    pub lattice: LatticeConfig,
    pub langevin: FloquetParams,
    pub pca: PcaConfig,
    pub scenario: ScenarioConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            engine: Engine::default(),
            seed: 1,
            out: PathBuf::from("out"),
            tier: Tier::Full,
            execution: Execution::Parallel,
            lattice: LatticeConfig::default(),
            langevin: FloquetParams::default(),
            pca: PcaConfig::default(),
            scenario: ScenarioConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Box sizes must fit the lattice and the measured CA steps. Only the
    /// cumulant and SCGF commands use them.
    pub fn check_box_sizes(&self) -> std::result::Result<(), String> {
        let (lat, s) = (&self.lattice, &self.scenario);
        if s.box_sizes.iter().all(|&l| l <= lat.width && l <= lat.height && l <= 2 * s.measure_cycles) {
            Ok(())
        } else {
            Err(format!(
                "scenario.box_sizes: {:?} must fit the {}x{} lattice and {} measured steps",
                s.box_sizes,
                lat.width,
                lat.height,
                2 * s.measure_cycles
            ))
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    /// Shrink budgets to the quick tier: 16x16, at most 10 realizations and
    /// an order-parameter window starting at cycle 100.
    pub fn quick(mut self) -> Self {
        let s = &mut self.scenario;
        self.tier = Tier::Quick;
        self.lattice.width = self.lattice.width.min(16);
        self.lattice.height = self.lattice.height.min(16);
        s.realizations = s.realizations.min(10);
        s.window_start = s.window_start.min(100);
        s.window_len = s.window_len.min(100);
        s.cycles = s.cycles.min(s.window_start + s.window_len);
        s.warmup_cycles = s.warmup_cycles.min(20);
        s.measure_cycles = s.measure_cycles.min(16);
        s.box_sizes.retain(|&l| l <= 16);
        s.blocks_per_field = s.blocks_per_field.min(200);
        self
    }

    /// Check every constraint; the message starts with the offending key.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let lat = &self.lattice;
        if lat.width == 0 || lat.height == 0 {
            return Err("lattice.width/height: must be positive".into());
        }
        self.langevin
            .validate()
            .map_err(|e| format!("langevin.{}", e.to_string().trim_start_matches("invalid parameters: ")))?;
        self.pca
            .noise
            .validate()
            .map_err(|e| format!("pca.noise: {e}"))?;
        let s = &self.scenario;
        let check = |ok: bool, key: &str, what: &str| if ok { Ok(()) } else { Err(format!("scenario.{key}: {what}")) };
        check(!s.temperatures.is_empty(), "temperatures", "must not be empty")?;
        check(
            s.temperatures.iter().all(|t| *t >= 0.0 && t.is_finite()),
            "temperatures",
            "must be finite and non-negative",
        )?;
        check(!s.pinning.is_empty() && s.pinning.iter().all(|v| *v > 0.0 && v.is_finite()), "pinning", "must be a non-empty list of positive values")?;
        check(
            !s.error_rates.is_empty() && s.error_rates.iter().all(|p| (0.0..=0.5).contains(p)),
            "error_rates",
            "must be a non-empty list within [0, 0.5]",
        )?;
        check(s.realizations > 0, "realizations", "must be positive")?;
        check(s.window_len > 0, "window_len", "must be positive")?;
        check(
            s.window_start + s.window_len <= s.cycles + 1,
            "window_start",
            "window must lie within the run (window_start + window_len <= cycles + 1)",
        )?;
        check(s.measure_cycles > 0, "measure_cycles", "must be positive")?;
        check(!s.bench_rules.is_empty(), "bench_rules", "must not be empty")?;
        check(!s.box_sizes.is_empty() && !s.box_sizes.contains(&0), "box_sizes", "must be non-empty and positive")?;
        check(s.blocks_per_field > 0, "blocks_per_field", "must be positive")?;
        check((1..=4).contains(&s.max_order), "max_order", "must be 1..=4")?;
        check(s.corr_max_dt < 2 * s.measure_cycles, "corr_max_dt", "must be below the measured steps")?;
        check(!s.trace_kappas.is_empty() && s.trace_kappas.iter().all(|k| *k > 0.0), "trace_kappas", "must be positive")?;
        check(
            !s.trace_temperatures.is_empty() && s.trace_temperatures.iter().all(|t| *t >= 0.0),
            "trace_temperatures",
            "must be non-negative",
        )?;
        check(s.trace_every > 0, "trace_every", "must be positive")?;
        s.initial
            .check(lat.width, lat.height)
            .map_err(|e| format!("scenario.initial: {e}"))?;
        Ok(())
    }
}

/// Read, parse and validate a config file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    RunConfig::from_toml(&text).map_err(|message| Error::Config {
        path: path.to_path_buf(),
        message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_materializes_defaults() {
        let c = RunConfig::from_toml("engine = \"langevin\"\n[lattice]\nwidth = 8\nheight = 8\n").unwrap();
        assert_eq!(c.lattice, LatticeConfig { width: 8, height: 8 });
        assert_eq!(c.langevin.v, 50.0);
        assert_eq!(c.langevin.field, 1e-4);
        assert_eq!(c.langevin.dt, 1e-3);
        assert_eq!(c.langevin.kappa_f, 1.0);
        assert_eq!(c.langevin.mass, 0.5);
    }

    #[test]
    fn negative_temperature_names_key() {
        let e = RunConfig::from_toml("[langevin]\ntemperature = -1.0\n").unwrap_err();
        assert!(e.starts_with("langevin.temperature"), "{e}");
    }

    #[test]
    fn unknown_key_is_rejected_with_line() {
        let e = RunConfig::from_toml("seed = 3\n[langevin]\ntemprature = 1.0\n").unwrap_err();
        assert!(e.contains("temprature"), "{e}");
        assert!(e.contains("line 3"), "{e}");
    }

    #[test]
    fn round_trip_is_identity() {
        let mut c = RunConfig::default();
        c.scenario.initial = InitialState::Island { width: 4, height: 6 };
        c.langevin.temperature = 5.17;
        c.pca.noise = NoiseModel::new(0.01, 0.02).unwrap();
        let text = c.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), c);
        let q = c.quick();
        assert_eq!(RunConfig::from_toml(&q.to_toml().unwrap()).unwrap(), q);
    }

    #[test]
    fn load_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.toml");
        std::fs::write(&p, "[scenario]\nrealizations = 0\n").unwrap();
        let e = load_config(&p).unwrap_err();
        assert!(matches!(e, Error::Config { .. }));
        assert!(e.to_string().contains("scenario.realizations"), "{e}");
    }
}
