use std::path::Path;

use pitoom::harness::{run_scenario, Command, InitialState};
use pitoom::par::Execution;
use pitoom::storage::{LatticeConfig, Manifest, RunConfig};

fn tiny(out: &Path) -> RunConfig {
    let mut c = RunConfig {
        out: out.to_path_buf(),
        seed: 17,
        lattice: LatticeConfig { width: 4, height: 4 },
        ..Default::default()
    };
    c.langevin.dt = 0.01;
    c.langevin.temperature = 4.0;
    let s = &mut c.scenario;
    s.initial = InitialState::DiagonalStripes { period: 4, width: 1 };
    s.temperatures = vec![3.0, 6.0];
    s.realizations = 3;
    s.cycles = 5;
    s.window_start = 2;
    s.window_len = 3;
    s.warmup_cycles = 1;
    s.measure_cycles = 4;
    s.box_sizes = vec![1, 2, 3, 4];
    s.blocks_per_field = 40;
    s.corr_max_dt = 2;
    s.corr_radius = 1;
    s.trace_kappas.truncate(1);
    s.trace_temperatures.truncate(1);
    s.trace_cycles = 1;
    s.trace_every = 25;
    c
}

fn outputs(dir: &Path, files: &[String]) -> Vec<(String, Vec<u8>)> {
    files.iter().map(|f| (f.clone(), std::fs::read(dir.join(f)).unwrap())).collect()
}

#[test]
fn rerun_from_manifest_is_bit_exact() {
    let root = tempfile::tempdir().unwrap();
    for cmd in [Command::LangevinRun, Command::PhaseScan, Command::Cumulants, Command::CorrectTrace] {
        let first = root.path().join(format!("{}-a", cmd.as_str()));
        let summary = run_scenario(cmd, &tiny(&first)).unwrap();
        assert!(summary.failures.is_empty());

        let manifest = Manifest::read(&first.join("manifest.json")).unwrap();
        let mut cfg = manifest.config.clone();
        let second = root.path().join(format!("{}-b", cmd.as_str()));
        cfg.out = second.clone();
        let again = run_scenario(cmd, &cfg).unwrap();
        assert_eq!(summary.files, again.files);
        assert_eq!(outputs(&first, &summary.files), outputs(&second, &again.files), "{cmd:?}");
    }
}

#[test]
fn execution_mode_does_not_change_results() {
    let root = tempfile::tempdir().unwrap();
    for cmd in [Command::PhaseScan, Command::Correlations] {
        let mut a = tiny(&root.path().join(format!("{}-par", cmd.as_str())));
        a.execution = Execution::Parallel;
        let mut b = tiny(&root.path().join(format!("{}-seq", cmd.as_str())));
        b.execution = Execution::Sequential;
        let sa = run_scenario(cmd, &a).unwrap();
        let sb = run_scenario(cmd, &b).unwrap();
        assert_eq!(outputs(&a.out, &sa.files), outputs(&b.out, &sb.files), "{cmd:?}");
    }
}

#[test]
fn seed_changes_noisy_outputs() {
    let root = tempfile::tempdir().unwrap();
    let a = tiny(&root.path().join("a"));
    let mut b = tiny(&root.path().join("b"));
    b.seed = 18;
    let sa = run_scenario(Command::LangevinRun, &a).unwrap();
    let sb = run_scenario(Command::LangevinRun, &b).unwrap();
    assert_ne!(outputs(&a.out, &sa.files), outputs(&b.out, &sb.files));
}
