//! Scenario dispatch: turns a [`RunConfig`] into CSV files plus a
//! `manifest.json` in the output directory.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::initial::build_initial;
use super::runs::{
    correction_trace, error_bench_point, langevin_error_fields, langevin_phase_point, pca_phase_point,
    point_key, PhasePoint,
};
use crate::analysis::{
    correlation_map, cumulant_ratios, cumulant_sweep, default_geometries, default_k_grid,
    error_rate_pooled, scgf_bound, CumulantReport, ErrorField, SamplingPlan,
};
use crate::error::{Error, Result};
use crate::langevin::{run_floquet_with, FloquetParams};
use crate::pca::{format, run_pca, RuleSchedule};
use crate::storage::{Engine, Manifest, PointFailure, RunConfig, StreamKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    PcaRun,
    LangevinRun,
    PhaseScan,
    ErrorBench,
    Cumulants,
    Correlations,
    Scgf,
    CorrectTrace,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::PcaRun,
        Command::LangevinRun,
        Command::PhaseScan,
        Command::ErrorBench,
        Command::Cumulants,
        Command::Correlations,
        Command::Scgf,
        Command::CorrectTrace,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::PcaRun => "pca-run",
            Command::LangevinRun => "langevin-run",
            Command::PhaseScan => "phase-scan",
            Command::ErrorBench => "error-bench",
            Command::Cumulants => "cumulants",
            Command::Correlations => "correlations",
            Command::Scgf => "scgf",
            Command::CorrectTrace => "correct-trace",
        }
    }
}

/// Notes recorded in every manifest.
const CONVENTIONS: [&str; 3] = [
    "error clock: one space-time slice per CA update, two per Floquet cycle (step-two then step-four rule)",
    "Langevin order parameter: A read after each cycle's first relaxation, sign (-1)^cycle",
    "CSV reals use shortest round-trip formatting",
];

/// Files written and grid points that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub files: Vec<String>,
    pub failures: Vec<PointFailure>,
}

struct Output<'a> {
    dir: &'a Path,
    files: Vec<String>,
    failures: Vec<PointFailure>,
}

impl Output<'_> {
    fn write(&mut self, name: &str, body: String) -> Result<()> {
        std::fs::write(self.dir.join(name), body)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn fail(&mut self, point: String, e: Error) {
        self.failures.push(PointFailure {
            point,
            error: e.to_string(),
        });
    }
}

/// Run `command` with `config`, writing into `config.out`.
///
/// A failing grid point is recorded in the manifest and skipped; the
/// remaining points still run.
pub fn run_scenario(command: Command, config: &RunConfig) -> Result<RunSummary> {
    let uses_boxes = matches!(command, Command::Cumulants | Command::Scgf);
    config
        .validate()
        .and_then(|()| if uses_boxes { config.check_box_sizes() } else { Ok(()) })
        .map_err(|message| Error::Config {
            path: "<config>".into(),
            message,
        })?;
    let start = Instant::now();
    std::fs::create_dir_all(&config.out)?;
    let mut out = Output {
        dir: &config.out,
        files: Vec::new(),
        failures: Vec::new(),
    };
    let root = StreamKey::new(config.seed).child_str(command.as_str());
    match command {
        Command::PcaRun => pca_run(config, root, &mut out)?,
        Command::LangevinRun => langevin_run(config, root, &mut out)?,
        Command::PhaseScan => phase_scan(config, root, &mut out)?,
        Command::ErrorBench => error_bench(config, root, &mut out)?,
        Command::Cumulants | Command::Correlations | Command::Scgf => {
            error_statistics(command, config, root, &mut out)?
        }
        Command::CorrectTrace => trace(config, root, &mut out)?,
    }
    let mut manifest = Manifest::new(command.as_str(), config);
    manifest.files = out.files.clone();
    manifest.failures = out.failures.clone();
    manifest.notes = CONVENTIONS.iter().map(|s| s.to_string()).collect();
    manifest.wall_seconds = start.elapsed().as_secs_f64();
    manifest.write(&config.out.join("manifest.json"))?;
    Ok(RunSummary {
        files: out.files,
        failures: out.failures,
    })
}

fn params_at(config: &RunConfig, v: f64, t: f64) -> FloquetParams {
    FloquetParams {
        v,
        temperature: t,
        ..config.langevin.clone()
    }
}

fn pca_run(config: &RunConfig, root: StreamKey, out: &mut Output) -> Result<()> {
    let initial = build_initial(&config.scenario.initial, config.lattice.width, config.lattice.height)?;
    let schedule = RuleSchedule::from(config.pca.rule.rule());
    let traj = run_pca(&initial, &schedule, &config.pca.noise, config.scenario.cycles, root)?;
    let mut csv = String::from("step,M\n");
    for (t, m) in traj.magnetizations.iter().enumerate() {
        let _ = writeln!(csv, "{t},{m:?}");
    }
    out.write("strobe.csv", csv)?;
    out.write("final.txt", format::to_text(traj.configs.last().unwrap()))
}

fn langevin_run(config: &RunConfig, root: StreamKey, out: &mut Output) -> Result<()> {
    let initial = build_initial(&config.scenario.initial, config.lattice.width, config.lattice.height)?;
    let every = config.scenario.snapshot_every;
    let traj = run_floquet_with(&initial, &config.langevin, config.scenario.cycles, root, every)?;
    out.write("strobe.csv", traj.strobe_csv())?;
    if let Some((_, last)) = traj.snapshots.last() {
        std::fs::write(config.out.join("final.osc"), last.to_dump())?;
        out.files.push("final.osc".into());
    }
    let last = traj.reads.last().expect("run has an initial read");
    out.write("final.txt", format::to_text(&last.a))
}

fn phase_csv(points: &[(String, PhasePoint)]) -> String {
    let mut csv = String::from("engine,v,control,P_E,P_E_stderr,plateau,stderr,realizations\n");
    for (engine, p) in points {
        let v = p.v.map_or(String::new(), |v| format!("{v:?}"));
        let _ = writeln!(
            csv,
            "{engine},{v},{:?},{:?},{:?},{:?},{:?},{}",
            p.control, p.p_e, p.p_e_stderr, p.plateau, p.stderr, p.realizations
        );
    }
    csv
}

fn phase_scan(config: &RunConfig, root: StreamKey, out: &mut Output) -> Result<()> {
    let s = &config.scenario;
    let (w, h) = (config.lattice.width, config.lattice.height);
    let initial = build_initial(&s.initial, w, h)?;
    let window = s.window_start..s.window_start + s.window_len;
    let mut points = Vec::new();
    match config.engine {
        Engine::Pca => {
            for &p in &s.error_rates {
                let key = point_key(root, &[p]);
                match pca_phase_point(&initial, config.pca.rule, p, s.cycles, window.clone(), s.realizations, key, config.execution) {
                    Ok(pt) => points.push(("pca".to_string(), pt)),
                    Err(e) => out.fail(format!("P_E={p}"), e),
                }
            }
        }
        Engine::Langevin => {
            let mut pe = String::from("rule,v,T,v_over_T,P_E,stderr,pe_equilibrium\n");
            for &v in &s.pinning {
                for &t in &s.temperatures {
                    let params = params_at(config, v, t);
                    let key = point_key(root, &[v, t]);
                    match langevin_phase_point(&initial, &params, s.cycles, window.clone(), s.realizations, key, config.execution) {
                        Ok(pt) => {
                            let _ = writeln!(
                                pe,
                                "{}+{},{v:?},{t:?},{:?},{:?},{:?},{:?}",
                                params.step2_rule,
                                params.step4_rule,
                                v / t,
                                pt.p_e,
                                pt.p_e_stderr,
                                crate::analysis::pe_equilibrium(params.v_interaction(), t)
                            );
                            points.push(("langevin".to_string(), pt));
                        }
                        Err(e) => out.fail(format!("v={v},T={t}"), e),
                    }
                }
            }
            out.write("pe.csv", pe)?;
        }
    }
    out.write("phase.csv", phase_csv(&points))
}

fn error_bench(config: &RunConfig, root: StreamKey, out: &mut Output) -> Result<()> {
    let s = &config.scenario;
    let mut csv = String::from("rule,v,T,v_over_T,P_E,stderr,pe_equilibrium\n");
    for &rule in &s.bench_rules {
        for &v in &s.pinning {
            for &t in &s.temperatures {
                let key = point_key(root.child_str(rule.as_str()), &[v, t]);
                let res = error_bench_point(
                    rule,
                    &params_at(config, v, t),
                    config.lattice.width,
                    config.lattice.height,
                    s.warmup_cycles,
                    s.measure_cycles,
                    s.realizations,
                    key,
                    config.execution,
                );
                match res {
                    Ok(r) => {
                        let _ = writeln!(
                            csv,
                            "{},{:?},{:?},{:?},{:?},{:?},{:?}",
                            r.rule, r.v, r.temperature, r.v_over_t, r.p_e, r.stderr, r.pe_equilibrium
                        );
                    }
                    Err(e) => out.fail(format!("rule={rule},v={v},T={t}"), e),
                }
            }
        }
    }
    out.write("pe.csv", csv)
}

fn error_statistics(command: Command, config: &RunConfig, root: StreamKey, out: &mut Output) -> Result<()> {
    let s = &config.scenario;
    let initial = build_initial(&s.initial, config.lattice.width, config.lattice.height)?;
    let plan = SamplingPlan::Random {
        blocks: s.blocks_per_field,
    };
    let mut pe = String::from("rule,v,T,v_over_T,P_E,stderr,pe_equilibrium\n");
    let mut cumulants = String::from("T,v,n,L,scaled_cumulant,stderr\n");
    let mut fits = String::from("T,v,n,c_n,b_n,eta_n,residual\n");
    let mut corr = String::from("T,v,dt,dx,dy,corr_over_PE,null_sigma\n");
    let mut scgf = String::from("T,v,geometry,k,lambda,dominated,bound\n");
    let mut ratios = String::from("T,v,n,c_n,P_E,ratio\n");
    for &v in &s.pinning {
        for &t in &s.temperatures {
            let params = params_at(config, v, t);
            let key = point_key(root, &[v, t]);
            let point = format!("v={v},T={t}");
            let fields = match langevin_error_fields(
                &initial,
                &params,
                s.warmup_cycles,
                s.measure_cycles,
                s.realizations,
                key,
                config.execution,
            ) {
                Ok(f) => f,
                Err(e) => {
                    out.fail(point, e);
                    continue;
                }
            };
            let rate = error_rate_pooled(&fields)?;
            let _ = writeln!(
                pe,
                "{}+{},{v:?},{t:?},{:?},{:?},{:?},{:?}",
                params.step2_rule,
                params.step4_rule,
                v / t,
                rate.p_e,
                rate.stderr,
                crate::analysis::pe_equilibrium(params.v_interaction(), t)
            );
            let mut run = || -> Result<()> {
                match command {
                    Command::Cumulants | Command::Scgf => {
                        let reports = cumulant_sweep(&fields, &s.box_sizes, s.max_order, plan, key.child_str("cumulants"), config.execution)?;
                        if command == Command::Cumulants {
                            write_cumulants(&mut cumulants, &mut fits, t, v, &reports);
                        } else {
                            let fitted: Vec<_> = reports.iter().filter_map(|r| r.fit.map(|f| (r.order, f))).collect();
                            for (n, ratio) in cumulant_ratios(&fitted, rate.p_e) {
                                let c = fitted.iter().find(|(m, _)| *m == n).unwrap().1.c;
                                let _ = writeln!(ratios, "{t:?},{v:?},{n},{c:?},{:?},{ratio:?}", rate.p_e);
                            }
                            write_scgf(&mut scgf, t, v, &fields, s.box_sizes[0], key)?;
                        }
                    }
                    _ => {
                        let map = correlation_map(&fields, s.corr_max_dt, s.corr_radius, config.execution)?;
                        for e in map {
                            let _ = writeln!(
                                corr,
                                "{t:?},{v:?},{},{},{},{:?},{:?}",
                                e.dt, e.dx, e.dy, e.value, e.null_sigma
                            );
                        }
                    }
                }
                Ok(())
            };
            if let Err(e) = run() {
                out.fail(point, e);
            }
        }
    }
    out.write("pe.csv", pe)?;
    match command {
        Command::Cumulants => {
            out.write("cumulants.csv", cumulants)?;
            out.write("fits.csv", fits)
        }
        Command::Scgf => {
            out.write("scgf.csv", scgf)?;
            out.write("ratios.csv", ratios)
        }
        _ => out.write("corr.csv", corr),
    }
}

fn write_cumulants(cumulants: &mut String, fits: &mut String, t: f64, v: f64, reports: &[CumulantReport]) {
    for r in reports {
        for ((l, c), e) in r.sizes.iter().zip(&r.estimates).zip(&r.stderrs) {
            let _ = writeln!(cumulants, "{t:?},{v:?},{},{l},{c:?},{e:?}", r.order);
        }
        match (&r.fit, &r.fit_error) {
            (Some(f), _) => {
                let eta = f.eta.map_or(String::new(), |e| format!("{e:?}"));
                let _ = writeln!(fits, "{t:?},{v:?},{},{:?},{:?},{eta},{:?}", r.order, f.c, f.b, f.residual);
            }
            (None, _) => {
                let _ = writeln!(fits, "{t:?},{v:?},{},,,,", r.order);
            }
        }
    }
}

fn write_scgf(csv: &mut String, t: f64, v: f64, fields: &[ErrorField], l: usize, key: StreamKey) -> Result<()> {
    let shapes: Vec<_> = default_geometries(l)
        .into_iter()
        .filter(|g| fields.iter().all(|f| g.lt <= f.steps() && g.lx <= f.width() && g.ly <= f.height()))
        .collect();
    let report = scgf_bound(
        fields,
        &shapes,
        &default_k_grid(),
        SamplingPlan::Random { blocks: 1000 },
        key.child_str("scgf"),
    )?;
    for c in &report.curves {
        for ((k, lam), dom) in report.k.iter().zip(&c.lambda).zip(&c.dominated) {
            let _ = writeln!(csv, "{t:?},{v:?},{},{k:?},{lam:?},{dom},{:?}", c.shape.label(), c.bound);
        }
    }
    Ok(())
}

fn trace(config: &RunConfig, root: StreamKey, out: &mut Output) -> Result<()> {
    let s = &config.scenario;
    let mut csv = String::from("kappa_f,T,time,q_A,q_B\n");
    for &kappa in &s.trace_kappas {
        for &t in &s.trace_temperatures {
            let params = FloquetParams {
                kappa_f: kappa,
                temperature: t,
                ..config.langevin.clone()
            };
            let key = point_key(root, &[kappa, t]);
            match correction_trace(&params, config.lattice.width, config.lattice.height, (1, 1), s.trace_cycles, s.trace_every, key) {
                Ok(samples) => {
                    for p in samples {
                        let _ = writeln!(csv, "{kappa:?},{t:?},{:?},{:?},{:?}", p.time, p.q_a, p.q_b);
                    }
                }
                Err(e) => out.fail(format!("kappa_f={kappa},T={t}"), e),
            }
        }
    }
    out.write("trace.csv", csv)
}
