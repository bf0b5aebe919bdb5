use std::path::Path;
use std::process::Command;

fn pitoom(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_pitoom")).args(args).output().unwrap()
}

fn write_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("run.toml");
    let text = format!(
        "[lattice]\nwidth = 4\nheight = 4\n\n[langevin]\ndt = 0.01\ndivergence_guard = 100.0\n\n\
         [scenario]\nrealizations = 2\ncycles = 5\nwindow_start = 2\nwindow_len = 3\n{extra}"
    );
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn success_writes_outputs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "temperatures = [0.0, 2.0]\n");
    let out = dir.path().join("out");
    let o = pitoom(&["phase-scan", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "5", "--threads", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("phase.csv").exists());
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 5"));
}

#[test]
fn failing_grid_point_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "temperatures = [0.0, 1e9]\n");
    let out = dir.path().join("out");
    let o = pitoom(&["phase-scan", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("T=1000000000"));
    // The good point is still written.
    assert_eq!(std::fs::read_to_string(out.join("phase.csv")).unwrap().lines().count(), 2);
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[langevin]\ntemperature = -1.0\n").unwrap();
    let o = pitoom(&["pca-run", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("langevin.temperature"));

    let o = pitoom(&["pca-run", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    let cfg = write_config(dir.path(), "box_sizes = [8]\n");
    let o = pitoom(&["cumulants", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn quick_tier_shrinks_the_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = pitoom(&["correct-trace", "--quick", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"tier\": \"quick\""));
    assert!(manifest.contains("\"width\": 16"));
}
