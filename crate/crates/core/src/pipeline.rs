//! validate, run, trace and report, as used by the command line.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::characteristics::{self, monotonicity_report, CurveTrace, Family, MonotonicityReport, SpaceTimeField};
use crate::conditions::{self, DataPair, ValidationReport};
use crate::config::RunConfig;
use crate::diagnostics::{self as diag, ClaimReport, ClaimStatus, NormSeries, Tracker, STRICT_NU};
use crate::error::{Error, Result};
use crate::geometry::DuctProfile;
use crate::io;
use crate::model::GasParameters;
use crate::solver::{run_simulation, FieldSnapshot, SimulationRecord};

/// Validate the configuration at one `nu`. A `gamma` outside `(1, 3)`
/// short-circuits to a one-line failing report.
pub fn validate(cfg: &RunConfig, nu: f64) -> Result<ValidationReport> {
    if !cfg.gamma_in_range() {
        return Ok(ValidationReport::gamma_out_of_range(cfg.gas.gamma));
    }
    let gas = cfg.gas(nu)?;
    let profile = cfg.profile()?;
    let data = cfg.data(&profile, &gas)?;
    conditions::validate(&gas, profile.as_ref(), &data, &cfg.validation_settings())
}

/// One traced curve and its monotonicity verdict.
#[derive(Debug, Clone)]
pub struct TracedCurve {
    pub trace: CurveTrace,
    pub report: MonotonicityReport,
}

/// A finished sweep member, held in memory.
#[derive(Debug, Clone)]
pub struct NuRun {
    pub nu: f64,
    pub gas: GasParameters,
    pub profile: Arc<dyn DuctProfile>,
    pub data: DataPair,
    pub record: SimulationRecord,
    pub claims: Vec<ClaimReport>,
    pub traces: Vec<TracedCurve>,
}

impl NuRun {
    pub fn hard_failures(&self) -> Vec<&ClaimReport> {
        self.claims.iter().filter(|c| c.failed()).collect()
    }
}

/// Start points of `count` traces: half on the inflow boundary at evenly
/// spaced times from 0, half on the initial line at evenly spaced interior
/// points.
pub fn trace_starts(x_b: f64, x_c: f64, t_final: f64, count: usize) -> Vec<(f64, f64)> {
    let nb = count.div_ceil(2);
    let ni = count - nb;
    let mut out: Vec<(f64, f64)> = (0..nb).map(|j| (x_b, t_final * j as f64 / nb as f64)).collect();
    out.extend((1..=ni).map(|j| (x_b + (x_c - x_b) * j as f64 / (ni + 1) as f64, 0.0)));
    out
}

/// Simulate one sweep member and evaluate the claims on it.
pub fn simulate(cfg: &RunConfig, nu: f64) -> Result<NuRun> {
    let gas = cfg.gas(nu)?;
    let profile = cfg.profile()?;
    let data = cfg.data(&profile, &gas)?;
    let solver = cfg.solver_config(gas, profile.clone())?;
    let record = run_simulation(&solver, data.initial.as_ref(), data.boundary.as_ref())?;
    let mut run = NuRun { nu, gas, profile, data, record, claims: Vec::new(), traces: Vec::new() };
    if cfg.diagnostics.claims || cfg.diagnostics.traces {
        evaluate_claims(cfg, &mut run)?;
    }
    Ok(run)
}

fn norm_claims(norms: &NormSeries, tol: f64) -> Vec<ClaimReport> {
    let mut finite = Tracker::new("finite-norms", 0.0);
    let mut sup_v = Tracker::new("sup-v-monotone", tol);
    for (j, row) in norms.rows.iter().enumerate() {
        finite.observe(if row.is_finite() { 0.0 } else { f64::NAN }, f64::NAN, row.t);
        if j > 0 {
            sup_v.observe(norms.rows[j - 1].sup_v - row.sup_v, f64::NAN, row.t);
        }
    }
    let mut out = vec![finite.finish(""), sup_v.finish("")];
    if let (Some(first), Some(last)) = (norms.rows.first(), norms.rows.last()) {
        let margin = first.sup_rho - last.sup_rho;
        let status = if margin > 0.0 { ClaimStatus::Pass } else { ClaimStatus::Fail };
        out.push(ClaimReport {
            id: "sup-rho-decrease".into(),
            status,
            worst_margin: margin,
            x: f64::NAN,
            t: last.t,
            note: "sup rho(t_end) strictly below sup rho(0)".into(),
        });
    }
    out
}

fn trace_claims(
    field: &SpaceTimeField,
    starts: &[(f64, f64)],
    gas: &GasParameters,
    m: f64,
    tol: f64,
) -> Result<(Vec<ClaimReport>, Vec<TracedCurve>)> {
    let mut fam = [Tracker::new("char-family-1", tol), Tracker::new("char-family-2", tol)];
    let mut order = Tracker::new("char-ordering", tol);
    let mut vacuum = Tracker::new("vacuum-equivalence", tol);
    let mut vacuum_note = String::new();
    let mut curves = Vec::new();
    for &(x0, t0) in starts {
        let t1 = characteristics::trace(field, x0, t0, Family::First, None)?;
        let t2 = characteristics::trace(field, x0, t0, Family::Second, None)?;
        let tp = characteristics::trace(field, x0, t0, Family::Particle, None)?;
        for (tr, k) in [(&t1, 0), (&t2, 1)] {
            let rep = monotonicity_report(tr, tol);
            if rep.worst.is_finite() {
                fam[k].observe(rep.worst, x0, rep.worst_at);
            }
            match characteristics::vacuum_equivalence_check(tr, gas, m, tol) {
                Ok(c) if c.status != ClaimStatus::NotApplicable => vacuum.observe(c.worst_margin, c.x, c.t),
                Ok(_) => {}
                Err(e) => {
                    vacuum.observe(f64::NEG_INFINITY, x0, t0);
                    vacuum_note = e.to_string();
                }
            }
        }
        // the three curves share the start and the step, so samples align
        for ((a, p), b) in t1.points.iter().zip(&tp.points).zip(&t2.points) {
            order.observe((p.x - a.x).min(b.x - p.x), p.x, p.t);
        }
        for tr in [t1, t2, tp] {
            let report = monotonicity_report(&tr, tol);
            curves.push(TracedCurve { trace: tr, report });
        }
    }
    let n = starts.len();
    let claims = vec![
        fam[0].clone().finish(format!("{n} traces")),
        fam[1].clone().finish(format!("{n} traces")),
        order.finish("particle path between the two families"),
        vacuum.finish(vacuum_note),
    ];
    Ok((claims, curves))
}

/// Fill in `run.claims` and `run.traces`.
pub fn evaluate_claims(cfg: &RunConfig, run: &mut NuRun) -> Result<()> {
    let d = &cfg.diagnostics;
    let snaps = run.record.snapshot_refs();
    let x = snaps[0].x().to_vec();
    let times = run.record.times();
    let (initial, boundary) = (run.data.initial.as_ref(), run.data.boundary.as_ref());
    let m = diag::data_bound_m(initial, boundary, &x, &times);
    let mut claims = Vec::new();
    if d.claims {
        claims.extend(norm_claims(&run.record.norms, d.tol));
        claims.push(diag::max_principle_run(snaps.iter().copied(), m, d.bound_tol));
        let env = diag::xi_envelope(initial, boundary, &x, &times);
        claims.push(diag::xi_bound_check(&run.record.norms, env, d.bound_tol));
        let k = diag::k_on(run.profile.as_ref(), &x);
        claims.extend(diag::slope_inequality_check(snaps.iter().copied(), &k, &run.gas, d.tol));
        let decay = diag::decay_check(&snaps, initial, run.profile.as_ref(), &run.gas, &d.probes, d.tol);
        let soft = run.nu > STRICT_NU;
        claims.extend(decay.into_iter().map(|c| if soft { c.soften() } else { c }));
    }
    if d.traces && d.trace_count > 0 {
        let interp = characteristics::default_registry().get(&d.interpolation)?;
        let field = SpaceTimeField::from_snapshots(&snaps, interp)?;
        let (x0, x1) = field.x_range();
        let (_, t1) = field.t_range();
        let starts = trace_starts(x0, x1, t1, d.trace_count);
        let (c, curves) = trace_claims(&field, &starts, &run.gas, m, d.tol)?;
        claims.extend(c);
        run.traces = curves;
    }
    run.claims = claims;
    Ok(())
}

/// Outcome of `run` over the whole sweep.
#[derive(Debug)]
pub struct SweepOutcome {
    pub out_dir: PathBuf,
    pub runs: Vec<NuRun>,
    /// Validation reports that failed; the sweep is not run unless forced.
    pub rejected: Vec<(f64, ValidationReport)>,
}

impl SweepOutcome {
    pub fn aborted(&self) -> Option<&NuRun> {
        self.runs.iter().find(|r| !r.record.completed())
    }
}

/// Validate every member, run the sweep concurrently and write the output
/// tree under `out`.
pub fn run_sweep(cfg: &RunConfig, out: &Path, force: bool) -> Result<SweepOutcome> {
    let nus = cfg.nu_values()?;
    let mut rejected = Vec::new();
    for &nu in &nus {
        let rep = validate(cfg, nu)?;
        if !rep.passed() {
            rejected.push((nu, rep));
        }
    }
    if !rejected.is_empty() && !force {
        return Ok(SweepOutcome { out_dir: out.to_path_buf(), runs: Vec::new(), rejected });
    }
    let results: Vec<Result<NuRun>> = std::thread::scope(|scope| {
        let handles: Vec<_> = nus
            .iter()
            .map(|&nu| {
                scope.spawn(move || {
                    let run = simulate(cfg, nu)?;
                    write_member(cfg, &run, &out.join(io::nu_dir_name(nu)))?;
                    Ok(run)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep member panicked")).collect()
    });
    let runs = results.into_iter().collect::<Result<Vec<_>>>()?;
    let curves: Vec<(String, PathBuf)> = runs
        .iter()
        .map(|r| (format!("nu = {}", r.nu), PathBuf::from(io::nu_dir_name(r.nu)).join(io::DIAGNOSTICS_FILE)))
        .collect();
    io::write_text(&out.join(io::PLOT_SCRIPT), &io::plot_script(&curves, "norms.png"))?;
    Ok(SweepOutcome { out_dir: out.to_path_buf(), runs, rejected })
}

/// The configuration of one member, as written to its directory.
pub fn member_config(cfg: &RunConfig, nu: f64) -> RunConfig {
    let mut c = cfg.clone();
    c.gas.nu = Some(nu);
    c.gas.eta = None;
    c.sweep.nu.clear();
    c
}

fn write_member(cfg: &RunConfig, run: &NuRun, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    io::write_text(&dir.join(io::RUN_CONFIG_FILE), &member_config(cfg, run.nu).to_toml())?;
    io::write_text(&dir.join(io::DIAGNOSTICS_FILE), &run.record.norms.to_csv())?;
    io::write_text(&dir.join(io::CLAIMS_FILE), &diag::claims_csv(&run.claims))?;
    io::write_snapshots(&dir.join("snapshots"), &run.record.snapshot_refs(), cfg.output.snapshot_every)?;
    let own = vec![(format!("nu = {}", run.nu), PathBuf::from(io::DIAGNOSTICS_FILE))];
    io::write_text(&dir.join(io::PLOT_SCRIPT), &io::plot_script(&own, "norms.png"))?;
    for c in &run.traces {
        io::write_text(&dir.join("traces").join(c.trace.file_name()), &c.trace.to_csv())?;
    }
    Ok(())
}

/// The member directory named by `dir`: itself when it holds `run.toml`,
/// otherwise its only `nu_*` subdirectory.
pub fn member_dir(dir: &Path) -> Result<PathBuf> {
    if dir.join(io::RUN_CONFIG_FILE).exists() {
        return Ok(dir.to_path_buf());
    }
    let members = member_dirs(dir)?;
    match members.as_slice() {
        [one] => Ok(one.clone()),
        [] => Err(Error::Usage(format!("{} is not a run directory", dir.display()))),
        _ => Err(Error::Usage(format!("{} holds several runs; name one of its nu_* directories", dir.display()))),
    }
}

fn member_dirs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).map_err(|e| Error::Usage(format!("{}: {e}", dir.display())))? {
        let p = e?.path();
        let named = p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("nu_"));
        if named && p.join(io::RUN_CONFIG_FILE).exists() {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

/// Trace one curve through the snapshots stored in a run directory and
/// write it to `traces/` there.
pub fn trace_from_dir(dir: &Path, x0: f64, t0: f64, family: Family, interpolation: Option<&str>, tol: f64) -> Result<(TracedCurve, PathBuf)> {
    let dir = member_dir(dir)?;
    let cfg = RunConfig::load(&dir.join(io::RUN_CONFIG_FILE))?;
    let nu = cfg.nu_values()?[0];
    let gas = cfg.gas(nu)?;
    let snaps = io::read_snapshots(&dir.join("snapshots"), gas)?;
    let refs: Vec<&FieldSnapshot> = snaps.iter().collect();
    let name = interpolation.unwrap_or(&cfg.diagnostics.interpolation);
    let field = SpaceTimeField::from_snapshots(&refs, characteristics::default_registry().get(name)?)?;
    let trace = characteristics::trace(&field, x0, t0, family, None)?;
    let report = monotonicity_report(&trace, tol);
    let path = dir.join("traces").join(trace.file_name());
    io::write_text(&path, &trace.to_csv())?;
    Ok((TracedCurve { trace, report }, path))
}

/// Summary of a run directory, built from its files alone.
pub fn report(dir: &Path) -> Result<String> {
    let members = if dir.join(io::RUN_CONFIG_FILE).exists() { vec![dir.to_path_buf()] } else { member_dirs(dir)? };
    if members.is_empty() {
        return Err(Error::Usage(format!("{} is not a run directory", dir.display())));
    }
    let mut out = String::new();
    let mut xi_points = Vec::new();
    for m in &members {
        let cfg = RunConfig::load(&m.join(io::RUN_CONFIG_FILE))?;
        let nu = cfg.nu_values()?[0];
        let norms_path = m.join(io::DIAGNOSTICS_FILE);
        let norms = NormSeries::from_csv(&fs::read_to_string(&norms_path)?)
            .map_err(|e| Error::Parse { path: norms_path.clone(), msg: e.to_string() })?;
        let _ = writeln!(out, "== nu = {nu} ({}, {})", cfg.profile.kind, m.display());
        if let (Some(first), Some(last)) = (norms.rows.first(), norms.last()) {
            let _ = writeln!(out, "t_end {}  sup rho {:.6e} -> {:.6e}  sup v {:.6e} -> {:.6e}", last.t, first.sup_rho, last.sup_rho, first.sup_v, last.sup_v);
        }
        if let Some((xi, x, t)) = norms.sup_xi() {
            let _ = writeln!(out, "sup xi {xi:.6e} at x = {x}, t = {t}");
            xi_points.push((nu, xi));
        }
        let claims_path = m.join(io::CLAIMS_FILE);
        let text = fs::read_to_string(&claims_path)?;
        let mut failed = 0;
        for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 5 {
                return Err(Error::Parse { path: claims_path.clone(), msg: format!("bad row `{line}`") });
            }
            if cols[1] == "false" {
                failed += 1;
            }
            let _ = writeln!(out, "  {:<20} {:<5} margin {}", cols[0], cols[1], cols[2]);
        }
        let _ = writeln!(out, "  failed claims: {failed}");
    }
    if xi_points.len() >= 2 {
        let _ = writeln!(out, "log-log slope of sup xi against nu: {:.4}", diag::xi_scaling_slope(&xi_points));
    }
    Ok(out)
}
