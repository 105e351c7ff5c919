//! Executable checks of the hypotheses behind the global existence
//! results: data regularity and ordering (A1-A5), the corner compatibility
//! equations, the exact and simplified slope inequalities at `t = 0` and at
//! `x = x_B`, and the constraints of the spherical case.
//!
//! Every check is sampled on a grid. A failing check carries the first
//! sample where its inequality breaks; a passing one carries the sample with
//! the smallest margin.

pub mod data;

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::geometry::{self, check_k1, search_k1_delta, Domain, DuctProfile, K1Verdict};
use crate::model::GasParameters;
use crate::riccati::Branch;

pub use data::{BoundaryData, DataPair, DataSample, DataSpec, InitialData};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotApplicable => "n/a",
        })
    }
}

/// Verdict of one named check. `margin` is the smallest `rhs - lhs` seen
/// (negative on failure) and `witness` the `x` or `t` it refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub id: &'static str,
    pub status: Status,
    pub witness: Option<f64>,
    pub margin: Option<f64>,
    pub note: String,
}

impl CheckOutcome {
    pub fn not_applicable(id: &'static str, note: impl Into<String>) -> Self {
        Self { id, status: Status::NotApplicable, witness: None, margin: None, note: note.into() }
    }

    fn from_scan(id: &'static str, scan: Scan, note: impl Into<String>) -> Self {
        let (status, witness) = match scan.first_fail {
            Some(p) => (Status::Fail, Some(p)),
            None => (Status::Pass, scan.worst_at),
        };
        Self { id, status, witness, margin: Some(scan.margin), note: note.into() }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Pointwise scan of `lhs <= rhs + slack`.
#[derive(Debug, Clone, Copy)]
struct Scan {
    margin: f64,
    worst_at: Option<f64>,
    first_fail: Option<f64>,
}

const SLACK: f64 = 1e-12;

fn scan(points: &[f64], mut f: impl FnMut(f64) -> (f64, f64)) -> Scan {
    let mut out = Scan { margin: f64::INFINITY, worst_at: None, first_fail: None };
    for &p in points {
        let (lhs, rhs) = f(p);
        let m = rhs - lhs;
        // NaN counts as a violation
        if !(m >= -SLACK * (1.0 + lhs.abs().max(rhs.abs()))) && out.first_fail.is_none() {
            out.first_fail = Some(p);
        }
        if !(m >= out.margin) {
            out.margin = m;
            out.worst_at = Some(p);
        }
    }
    out
}

fn merge(a: Scan, b: Scan) -> Scan {
    let (margin, worst_at) = if b.margin < a.margin { (b.margin, b.worst_at) } else { (a.margin, a.worst_at) };
    let first_fail = match (a.first_fail, b.first_fail) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    Scan { margin, worst_at, first_fail }
}

/// Sampling density and tolerances of a validation pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationSettings {
    pub x_points: usize,
    /// Extent sampled on half-line domains.
    pub x_span: f64,
    pub t_horizon: f64,
    pub t_points: usize,
    pub compat_tol: f64,
    pub c_xi: f64,
    pub c_light: Option<f64>,
    /// Optional bound on `max(sup|k|, sup|k'|)`; `None` only requires finiteness.
    pub c1_limit: Option<f64>,
    pub delta_steps: usize,
}

impl Default for ValidationSettings {
    fn default() -> Self {
        Self {
            x_points: 900,
            x_span: 100.0,
            t_horizon: 10.0,
            t_points: 1000,
            compat_tol: 1e-10,
            c_xi: 2.0,
            c_light: None,
            c1_limit: None,
            delta_steps: 20,
        }
    }
}

impl ValidationSettings {
    pub fn x_grid(&self, domain: &Domain) -> Vec<f64> {
        domain.uniform_grid(self.x_points, self.x_span)
    }

    pub fn t_grid(&self) -> Vec<f64> {
        let n = self.t_points.max(1);
        (0..=n).map(|i| self.t_horizon * i as f64 / n as f64).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(CheckOutcome::passed)
    }

    pub fn get(&self, id: &str) -> Option<&CheckOutcome> {
        self.outcomes.iter().find(|o| o.id == id)
    }

    pub fn failed_ids(&self) -> Vec<&'static str> {
        self.outcomes.iter().filter(|o| o.status == Status::Fail).map(|o| o.id).collect()
    }

    /// Report for a gas whose exponent lies outside `(1, 3)`; nothing else
    /// can be evaluated.
    pub fn gamma_out_of_range(gamma: f64) -> Self {
        Self { outcomes: vec![gamma_range(gamma)] }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let _ = write!(out, "{:<16} {:<5}", o.id, o.status.to_string().to_uppercase());
            if let Some(m) = o.margin {
                let _ = write!(out, "  margin {m:.6e}");
            }
            if let Some(w) = o.witness {
                let _ = write!(out, "  at {w}");
            }
            if !o.note.is_empty() {
                let _ = write!(out, "  ({})", o.note);
            }
            out.push('\n');
        }
        let _ = writeln!(out, "overall          {}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }

    /// `id.field=value` lines.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let _ = writeln!(out, "{}.status={}", o.id, o.status);
            if let Some(m) = o.margin {
                let _ = writeln!(out, "{}.margin={m:e}", o.id);
            }
            if let Some(w) = o.witness {
                let _ = writeln!(out, "{}.witness={w}", o.id);
            }
        }
        let _ = writeln!(out, "overall.status={}", if self.passed() { "pass" } else { "fail" });
        out
    }
}

pub fn gamma_range(gamma: f64) -> CheckOutcome {
    let margin = (gamma - 1.0).min(3.0 - gamma);
    CheckOutcome {
        id: "gamma-range",
        status: if margin > 0.0 { Status::Pass } else { Status::Fail },
        witness: Some(gamma),
        margin: Some(margin),
        note: String::new(),
    }
}

/// (A1): `k >= 0`, finite `C^1` norm (and below `limit` when given).
pub fn check_a1(profile: &dyn DuctProfile, grid: &[f64], limit: Option<f64>) -> CheckOutcome {
    let s = scan(grid, |x| (0.0, profile.sample(x).k));
    let (nk, ndk) = geometry::c1_norm(profile, grid);
    let norm = nk.max(ndk);
    let mut out = CheckOutcome::from_scan("A1", s, format!("C1 norm {norm:.6e}"));
    let bounded = norm.is_finite() && limit.is_none_or(|l| norm <= l);
    if out.status == Status::Pass && !bounded {
        out.status = Status::Fail;
        out.note = format!("C1 norm {norm:.6e} exceeds limit {:?}", limit);
    }
    if out.status == Status::Pass {
        if let Some(x) = geometry::divergence_witness(profile, grid) {
            out.status = Status::Fail;
            out.witness = Some(x);
            out.note = "duct is not divergent".into();
        }
    }
    out
}

/// (A2): corner values agree and the corner slopes satisfy the invariant
/// equations at `(x_B, 0)`. Returns the `A2` (values) and `A2-compat`
/// (slopes) outcomes.
pub fn check_compatibility(
    initial: &dyn InitialData,
    boundary: &dyn BoundaryData,
    profile: &dyn DuctProfile,
    params: &GasParameters,
    tol: f64,
) -> [CheckOutcome; 2] {
    let x_b = profile.domain().x_b;
    let i0 = initial.at(x_b);
    let b0 = boundary.at(0.0);
    let mismatch = (i0.s - b0.s).abs().max((i0.r - b0.r).abs());
    let values = CheckOutcome {
        id: "A2",
        status: if mismatch <= tol { Status::Pass } else { Status::Fail },
        witness: Some(x_b),
        margin: Some(tol - mismatch),
        note: format!("corner value mismatch {mismatch:.3e}"),
    };
    let g = params.gamma();
    let k = profile.sample(x_b).k;
    let src = (g - 1.0) / 8.0 * k * (i0.r * i0.r - i0.s * i0.s);
    let l1 = (g + 1.0) / 4.0 * i0.s + (3.0 - g) / 4.0 * i0.r;
    let l2 = (3.0 - g) / 4.0 * i0.s + (g + 1.0) / 4.0 * i0.r;
    let res_s = b0.ds + l1 * i0.ds - src;
    let res_r = b0.dr + l2 * i0.dr + src;
    let residual = res_s.abs().max(res_r.abs());
    let slopes = CheckOutcome {
        id: "A2-compat",
        status: if residual <= tol { Status::Pass } else { Status::Fail },
        witness: Some(x_b),
        margin: Some(tol - residual),
        note: format!("corner residuals {res_s:.3e}, {res_r:.3e}"),
    };
    [values, slopes]
}

/// (A3): `0 < S0 < R0` on the grid.
pub fn check_a3(initial: &dyn InitialData, grid: &[f64]) -> CheckOutcome {
    let s = scan(grid, |x| {
        let d = initial.at(x);
        (0.0, d.s.min(d.r - d.s))
    });
    CheckOutcome::from_scan("A3", s, "min(S0, R0 - S0)")
}

/// (A4): `0 < SB < RB` on the time grid.
pub fn check_a4(boundary: &dyn BoundaryData, times: &[f64]) -> CheckOutcome {
    let s = scan(times, |t| {
        let d = boundary.at(t);
        (0.0, d.s.min(d.r - d.s))
    });
    CheckOutcome::from_scan("A4", s, "min(SB, RB - SB)")
}

fn require_positive(what: &str, pts: &[f64], f: impl Fn(f64) -> f64) -> Result<()> {
    for &p in pts {
        let v = f(p);
        if !(v > 0.0) {
            return Err(Error::Invariant { what: format!("{what} = {v} must be positive"), at: p });
        }
    }
    Ok(())
}

/// `ln(S xi)`, only needed on the `b = -1` branch.
fn epsilon(d: &DataSample) -> f64 {
    (d.r - d.s).ln()
}

/// Exact initial slope inequalities and the simplified form (k2).
/// Returns `S0-ineq`, `R0-ineq`, `k2`.
pub fn check_initial_slopes(
    initial: &dyn InitialData,
    profile: &dyn DuctProfile,
    params: &GasParameters,
    grid: &[f64],
) -> Result<[CheckOutcome; 3]> {
    if grid.is_empty() {
        return Err(Error::Usage("initial slope check needs a nonempty grid".into()));
    }
    require_positive("S0", grid, |x| initial.at(x).s)?;
    let b = params.b();
    let branch = Branch::of(b);
    let s_ineq = scan(grid, |x| {
        let (d, k) = (initial.at(x), profile.sample(x).k);
        let xi = d.xi();
        let lhs = match branch {
            Branch::General => k * d.s / 2.0 * (1.0 / -b - xi / (b + 1.0)),
            Branch::Logarithmic => k * d.s / 2.0 * (1.0 - epsilon(&d) * xi),
        };
        (lhs, d.ds)
    });
    let r_ineq = scan(grid, |x| {
        let (d, k) = (initial.at(x), profile.sample(x).k);
        let xi = d.xi();
        let lhs = match branch {
            Branch::General => k * d.s / 2.0 * (1.0 / -b - xi / (b * (b + 1.0))),
            Branch::Logarithmic => k * d.s / 2.0 * (1.0 + xi + epsilon(&d) * xi),
        };
        (lhs, d.dr)
    });
    let k2s = scan(grid, |x| {
        let (d, k) = (initial.at(x), profile.sample(x).k);
        (k * d.s / -b, d.ds)
    });
    let k2r = scan(grid, |x| {
        let (d, k) = (initial.at(x), profile.sample(x).k);
        (k * d.r / -b, d.dr)
    });
    Ok([
        CheckOutcome::from_scan("S0-ineq", s_ineq, ""),
        CheckOutcome::from_scan("R0-ineq", r_ineq, ""),
        CheckOutcome::from_scan("k2", merge(k2s, k2r), ""),
    ])
}

/// Exact boundary slope inequalities and the simplified form (k3).
/// Returns `SB-ineq`, `RB-ineq`, `k3`.
pub fn check_boundary_slopes(
    boundary: &dyn BoundaryData,
    profile: &dyn DuctProfile,
    params: &GasParameters,
    times: &[f64],
) -> Result<[CheckOutcome; 3]> {
    if times.is_empty() {
        return Err(Error::Usage("boundary slope check needs a nonempty grid".into()));
    }
    require_positive("SB", times, |t| boundary.at(t).s)?;
    let b = params.b();
    let branch = Branch::of(b);
    let k = profile.sample(profile.domain().x_b).k;
    let s_ineq = scan(times, |t| {
        let d = boundary.at(t);
        let xi = d.xi();
        let bracket = match branch {
            Branch::General => {
                1.0 / b + xi / (b + 1.0) + (1.0 - b) / (2.0 * (b + 1.0) * (1.0 - 2.0 * b)) * xi * xi
            }
            Branch::Logarithmic => {
                let e = epsilon(&d);
                -1.0 + e * xi + (2.0 * e + 1.0) / 6.0 * xi * xi
            }
        };
        (d.ds, k * d.s * d.s / 2.0 * bracket)
    });
    let r_ineq = scan(times, |t| {
        let d = boundary.at(t);
        let xi = d.xi();
        let bracket = match branch {
            Branch::General => {
                1.0 / b + (b + 2.0) / (b * (b + 1.0)) * xi
                    - (b * b + 3.0 * b - 2.0) / (2.0 * b * (b + 1.0) * (1.0 - 2.0 * b)) * xi * xi
            }
            Branch::Logarithmic => {
                let e = epsilon(&d);
                -1.0 - (e + 2.0) * xi - (4.0 * e + 5.0) / 6.0 * xi * xi
            }
        };
        (d.dr, k * d.s * d.s / 2.0 * bracket)
    });
    let k3s = scan(times, |t| {
        let d = boundary.at(t);
        (d.ds, k * d.s * d.s / b)
    });
    let k3r = scan(times, |t| {
        let d = boundary.at(t);
        (d.dr, k * d.r * d.r / b)
    });
    Ok([
        CheckOutcome::from_scan("SB-ineq", s_ineq, ""),
        CheckOutcome::from_scan("RB-ineq", r_ineq, ""),
        CheckOutcome::from_scan("k3", merge(k3s, k3r), ""),
    ])
}

/// (A5): monotone data and `sup xi <= c_xi sqrt(nu)` on both grids.
pub fn check_a5_smallness(
    initial: &dyn InitialData,
    boundary: &dyn BoundaryData,
    params: &GasParameters,
    c_xi: f64,
    grid: &[f64],
    times: &[f64],
) -> CheckOutcome {
    let cap = c_xi * params.nu().sqrt();
    let xi0 = scan(grid, |x| (initial.at(x).xi(), cap));
    let xib = scan(times, |t| (boundary.at(t).xi(), cap));
    let mono0 = scan(grid, |x| {
        let d = initial.at(x);
        (0.0, d.ds.min(d.dr))
    });
    let monob = scan(times, |t| {
        let d = boundary.at(t);
        (d.ds.max(d.dr), 0.0)
    });
    // a failure of the sign conditions is reported ahead of the size bound
    let size = merge(xi0, xib);
    let signs = merge(mono0, monob);
    let s = if signs.first_fail.is_some() { signs } else { merge(size, signs) };
    let horizon = times.last().copied().unwrap_or(0.0);
    CheckOutcome::from_scan(
        "A5",
        s,
        format!("xi cap {cap:.4e}; xi_B checked on [0, {horizon}] only, uniformity beyond is not verified"),
    )
}

/// Spherical-duct constraints: `gamma < 1 + 2/N`, the growth bounds on the
/// initial data and `R0(x_C) < c_light`. Returns `spherical-gamma`,
/// `initial2`, `light-speed`.
pub fn check_spherical(
    domain: &Domain,
    n: u32,
    params: &GasParameters,
    initial: &dyn InitialData,
    c_light: Option<f64>,
    grid: &[f64],
) -> Result<[CheckOutcome; 3]> {
    if n < 2 {
        return Err(Error::domain(format!("spherical check needs N >= 2, got {n}")));
    }
    let limit = 1.0 + 2.0 / n as f64;
    let g = params.gamma();
    let gamma = CheckOutcome {
        id: "spherical-gamma",
        status: if g < limit { Status::Pass } else { Status::Fail },
        witness: Some(g),
        margin: Some(limit - g),
        note: format!("gamma must stay below {limit}"),
    };
    let Some(x_c) = domain.x_c else {
        return Ok([
            gamma,
            CheckOutcome::not_applicable("initial2", "half-line domain"),
            CheckOutcome::not_applicable("light-speed", "half-line domain"),
        ]);
    };
    let b = params.b();
    let m = (n - 1) as f64;
    let d_b = initial.at(domain.x_b);
    let scale = domain.x_b.powf(m / b);
    let s1 = scan(grid, |x| (scale * d_b.s * x.powf(m / -b), initial.at(x).s));
    let s2 = scan(grid, |x| (scale * d_b.r * x.powf(m / -b), initial.at(x).r));
    let growth = CheckOutcome::from_scan("initial2", merge(s1, s2), "");
    let light = match c_light {
        None => CheckOutcome::not_applicable("light-speed", "no light speed configured"),
        Some(c) => {
            let r = initial.at(x_c).r;
            CheckOutcome {
                id: "light-speed",
                status: if r < c { Status::Pass } else { Status::Fail },
                witness: Some(x_c),
                margin: Some(c - r),
                note: String::new(),
            }
        }
    };
    Ok([gamma, growth, light])
}

/// (k1) for some delta in (0, 2).
pub fn check_k1_exists(profile: &dyn DuctProfile, grid: &[f64], b: f64, steps: usize) -> Result<CheckOutcome> {
    let ok = search_k1_delta(profile, grid, b, steps)?;
    if let Some(&delta) = ok.first() {
        let margin = match check_k1(profile, delta, grid, b)? {
            K1Verdict::Pass { worst_margin, at } => (worst_margin, at),
            K1Verdict::Fail { x, lhs, rhs } => (rhs - lhs, x),
        };
        return Ok(CheckOutcome {
            id: "k1",
            status: Status::Pass,
            witness: Some(margin.1),
            margin: Some(margin.0),
            note: format!("holds for delta in [{delta}, {}]", ok.last().unwrap()),
        });
    }
    // the weakest form is the smallest delta
    let delta = 2.0 / steps.max(2) as f64;
    let out = match check_k1(profile, delta, grid, b)? {
        K1Verdict::Fail { x, lhs, rhs } => CheckOutcome {
            id: "k1",
            status: Status::Fail,
            witness: Some(x),
            margin: Some(rhs - lhs),
            note: format!("k' = {lhs:.6e} exceeds k^2/((2-delta)b) = {rhs:.6e} at delta = {delta}"),
        },
        K1Verdict::Pass { worst_margin, at } => CheckOutcome {
            id: "k1",
            status: Status::Fail,
            witness: Some(at),
            margin: Some(worst_margin),
            note: "no delta on the search grid works".into(),
        },
    };
    Ok(out)
}

pub fn check_integrability(profile: &dyn DuctProfile) -> CheckOutcome {
    let v = geometry::check_k_integrability(profile);
    if !v.applicable {
        return CheckOutcome::not_applicable("k-integrability", "bounded domain");
    }
    CheckOutcome {
        id: "k-integrability",
        status: if v.pass { Status::Pass } else { Status::Fail },
        witness: None,
        margin: None,
        note: format!("int k = {:?}, tail k = {:e}", v.integral, v.tail_k),
    }
}

/// Every check, in a fixed order.
pub fn validate(
    params: &GasParameters,
    profile: &dyn DuctProfile,
    data: &DataPair,
    settings: &ValidationSettings,
) -> Result<ValidationReport> {
    let domain = profile.domain();
    let xs = settings.x_grid(&domain);
    let ts = settings.t_grid();
    let mut outcomes = vec![gamma_range(params.gamma())];
    outcomes.push(check_a1(profile, &xs, settings.c1_limit));
    outcomes.extend(check_compatibility(
        data.initial.as_ref(),
        data.boundary.as_ref(),
        profile,
        params,
        settings.compat_tol,
    ));
    let a3 = check_a3(data.initial.as_ref(), &xs);
    let a4 = check_a4(data.boundary.as_ref(), &ts);
    let (a3_ok, a4_ok) = (a3.passed(), a4.passed());
    outcomes.push(a3);
    outcomes.push(a4);
    outcomes.push(check_a5_smallness(data.initial.as_ref(), data.boundary.as_ref(), params, settings.c_xi, &xs, &ts));
    outcomes.push(check_k1_exists(profile, &xs, params.b(), settings.delta_steps)?);
    if a3_ok {
        outcomes.extend(check_initial_slopes(data.initial.as_ref(), profile, params, &xs)?);
    } else {
        for id in ["S0-ineq", "R0-ineq", "k2"] {
            outcomes.push(CheckOutcome::not_applicable(id, "needs A3"));
        }
    }
    if a4_ok {
        outcomes.extend(check_boundary_slopes(data.boundary.as_ref(), profile, params, &ts)?);
    } else {
        for id in ["SB-ineq", "RB-ineq", "k3"] {
            outcomes.push(CheckOutcome::not_applicable(id, "needs A4"));
        }
    }
    match profile.spherical_dimension() {
        Some(n) => outcomes.extend(check_spherical(&domain, n, params, data.initial.as_ref(), settings.c_light, &xs)?),
        None => {
            for id in ["spherical-gamma", "initial2", "light-speed"] {
                outcomes.push(CheckOutcome::not_applicable(id, "not a spherical duct"));
            }
        }
    }
    outcomes.push(check_integrability(profile));
    Ok(ValidationReport { outcomes })
}

/// Largest `nu` in `[lo, hi]` for which `passes` holds, by bisection in
/// `ln nu`, assuming a single pass-to-fail transition. `None` when even `lo`
/// fails.
pub fn nu_threshold(lo: f64, hi: f64, iters: usize, mut passes: impl FnMut(f64) -> Result<bool>) -> Result<Option<f64>> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Usage(format!("bad nu bracket [{lo}, {hi}]")));
    }
    if !passes(lo)? {
        return Ok(None);
    }
    if passes(hi)? {
        return Ok(Some(hi));
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..iters {
        let m = 0.5 * (a + b);
        if passes(m.exp())? {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Some(a.exp()))
}

#[cfg(test)]
mod tests {
    use super::data::*;
    use super::*;
    use crate::geometry::presets::{Exp1, Exp2, Spherical};
    use crate::geometry::{FiniteDifferenceProfile, Uniform};
    use std::sync::Arc;

    fn experiment(profile: Arc<dyn DuctProfile>, nu: f64) -> (GasParameters, DataPair) {
        let params = GasParameters::new(1.4, nu).unwrap();
        let pair = exp_data(&DataSpec { kind: "exp-data".into(), ..Default::default() }, &profile, &params).unwrap();
        (params, pair)
    }

    fn exp1() -> Arc<dyn DuctProfile> {
        Arc::new(Exp1::new(1.0, Some(10.0)).unwrap())
    }

    #[test]
    fn experiments_pass_everything() {
        for profile in [exp1(), Arc::new(Exp2::new(1.0, Some(10.0)).unwrap()) as Arc<dyn DuctProfile>] {
            for nu in [0.1, 1e-3, 1e-5] {
                let (params, pair) = experiment(profile.clone(), nu);
                let report = validate(&params, profile.as_ref(), &pair, &ValidationSettings::default()).unwrap();
                assert!(report.passed(), "{}", report.to_text());
                assert_eq!(report.get("spherical-gamma").unwrap().status, Status::NotApplicable);
                let a2 = report.get("A2-compat").unwrap();
                assert!(a2.margin.unwrap() >= 1e-10 - 1e-12);
            }
        }
    }

    #[test]
    fn compatibility_examples() {
        let profile = exp1();
        let (params, pair) = experiment(profile.clone(), 0.1);
        let [v, c] = check_compatibility(pair.initial.as_ref(), pair.boundary.as_ref(), profile.as_ref(), &params, 1e-12);
        assert!(v.passed() && c.passed());
        let shifted = FnData::new("shifted", |t| {
            let q = 0.1f64.sqrt();
            let w = 1.0 / (1.0 + t);
            DataSample { s: (1.0 - q) * w + 0.1, ds: -(1.0 - q) * w * w, r: w, dr: -w * w }
        });
        let [v, _] = check_compatibility(pair.initial.as_ref(), &shifted, profile.as_ref(), &params, 1e-12);
        assert_eq!(v.status, Status::Fail);
        let flat = Uniform::new(1.0, Some(10.0)).unwrap();
        let c0 = ConstantData { s: 0.5, r: 0.6 };
        let [v, c] = check_compatibility(&c0, &c0, &flat, &params, 1e-14);
        assert!(v.passed() && c.passed());
    }

    #[test]
    fn initial_slope_examples() {
        let profile = exp1();
        let (params, pair) = experiment(profile.clone(), 0.1);
        let grid = Domain::new(1.0, Some(10.0)).unwrap().uniform_grid(900, 0.0);
        let [s, r, k2] = check_initial_slopes(pair.initial.as_ref(), profile.as_ref(), &params, &grid).unwrap();
        assert!(s.passed() && r.passed() && k2.passed());
        let flat = ConstantData { s: 0.5, r: 0.6 };
        let [_, _, k2] = check_initial_slopes(&flat, profile.as_ref(), &params, &grid).unwrap();
        assert_eq!(k2.status, Status::Fail);
        assert_eq!(k2.witness, Some(1.0));
        // b = -1 with k = 0: the exact inequality collapses to 0 <= S0'
        let mono = GasParameters::new(5.0 / 3.0, 1e-4).unwrap();
        let e = FnData::new("exp", |x: f64| {
            let s = x.exp();
            DataSample { s, ds: s, r: s * 1.001, dr: s * 1.001 }
        });
        let flat_duct = Uniform::new(1.0, Some(10.0)).unwrap();
        let [s, r, _] = check_initial_slopes(&e, &flat_duct, &mono, &grid).unwrap();
        assert!(s.passed() && r.passed());
        let neg = ConstantData { s: -0.1, r: 0.6 };
        assert!(matches!(check_initial_slopes(&neg, profile.as_ref(), &params, &grid), Err(Error::Invariant { .. })));
    }

    #[test]
    fn boundary_slope_examples() {
        let profile = exp1();
        let times: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.01).collect();
        for nu in [0.1, 1e-3] {
            let (params, pair) = experiment(profile.clone(), nu);
            let out = check_boundary_slopes(pair.boundary.as_ref(), profile.as_ref(), &params, &times).unwrap();
            assert!(out.iter().all(|o| o.passed()));
            // (k3) for SB: -(1 - q) <= -(1 - q)^2 / 2, margin at t = 0 is known
            let q = nu.sqrt();
            let k3 = &out[2];
            assert!(k3.margin.unwrap() <= (1.0 - q) - (1.0 - q).powi(2) / 2.0 + 1e-12);
        }
        let params = GasParameters::new(1.4, 0.1).unwrap();
        let [_, _, k3] =
            check_boundary_slopes(&ConstantData { s: 0.5, r: 0.6 }, profile.as_ref(), &params, &times).unwrap();
        assert_eq!(k3.status, Status::Fail);
        let rising = FnData::new("rising", |t: f64| DataSample { s: 0.5 + 0.01 * t, ds: 0.01, r: 0.7, dr: 0.0 });
        let [s, _, k3] = check_boundary_slopes(&rising, profile.as_ref(), &params, &times).unwrap();
        assert_eq!(s.status, Status::Fail);
        assert_eq!(k3.status, Status::Fail);
    }

    #[test]
    fn smallness_examples() {
        let profile = exp1();
        let (params, pair) = experiment(profile.clone(), 0.1);
        let xs = Domain::new(1.0, Some(10.0)).unwrap().uniform_grid(90, 0.0);
        let ts: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let out = check_a5_smallness(pair.initial.as_ref(), pair.boundary.as_ref(), &params, 2.0, &xs, &ts);
        assert!(out.passed());
        let q = 0.1f64.sqrt();
        assert!((out.margin.unwrap() - (2.0 * q - q / (1.0 - q))).abs() < 1e-12 || out.margin.unwrap() >= 0.0);
        let big = ConstantData { s: 0.5, r: 1.0 };
        let tiny = GasParameters::new(1.4, 1e-4).unwrap();
        assert_eq!(check_a5_smallness(&big, &big, &tiny, 2.0, &xs, &ts).status, Status::Fail);
        let small = ConstantData { s: 1.0, r: 1.05 };
        assert!(check_a5_smallness(&small, &small, &params, 2.0, &xs, &ts).passed());
    }

    #[test]
    fn spherical_examples() {
        let dom = Domain::new(1.0, Some(4.0)).unwrap();
        let grid = dom.uniform_grid(300, 0.0);
        let lin = FnData::new("lin", |x: f64| DataSample { s: x, ds: 1.0, r: 1.1 * x, dr: 1.1 });
        let air = GasParameters::new(1.4, 0.1).unwrap();
        let [g, i2, light] = check_spherical(&dom, 2, &air, &lin, None, &grid).unwrap();
        assert!(g.passed() && i2.passed());
        assert_eq!(light.status, Status::NotApplicable);
        for (gamma, ok) in [(1.4, true), (1.5, true), (1.6, true), (1.7, false)] {
            let p = GasParameters::new(gamma, 0.1).unwrap();
            let [g, _, _] = check_spherical(&dom, 3, &p, &lin, Some(10.0), &grid).unwrap();
            assert_eq!(g.passed(), ok, "gamma {gamma}");
        }
        let [g, _, _] = check_spherical(&dom, 5, &air, &lin, None, &grid).unwrap();
        assert_eq!(g.status, Status::Fail);
        let [_, _, light] = check_spherical(&dom, 2, &air, &lin, Some(4.0), &grid).unwrap();
        assert_eq!(light.status, Status::Fail);
        let half = Domain::new(1.0, None).unwrap();
        let [_, i2, _] = check_spherical(&half, 2, &air, &lin, None, &grid).unwrap();
        assert_eq!(i2.status, Status::NotApplicable);
    }

    #[test]
    fn spherical_gamma_agrees_with_k1_scan() {
        for n in 2..6u32 {
            let sph = Spherical::new(n, 1.0, Some(5.0)).unwrap();
            let grid = sph.domain().uniform_grid(200, 0.0);
            for gamma in [1.2, 1.3, 1.4, 1.5, 1.6, 1.8, 2.2] {
                let p = GasParameters::new(gamma, 0.1).unwrap();
                let by_gamma = gamma < 1.0 + 2.0 / n as f64;
                let by_k1 = check_k1_exists(&sph, &grid, p.b(), 1000).unwrap().passed();
                assert_eq!(by_gamma, by_k1, "N = {n}, gamma = {gamma}");
            }
        }
    }

    #[test]
    fn k1_failure_carries_witness() {
        let dom = Domain::new(1.0, Some(10.0)).unwrap();
        let lin = FiniteDifferenceProfile::new("k=x", dom, Arc::new(|x: f64| (0.5 * x * x).exp()));
        let grid = dom.uniform_grid(90, 0.0);
        let out = check_k1_exists(&lin, &grid, -2.0, 20).unwrap();
        assert_eq!(out.status, Status::Fail);
        assert_eq!(out.witness, Some(1.0));
        let s = lin.sample(1.0);
        assert!(s.dk > s.k * s.k / ((2.0 - 0.1) * -2.0));
    }

    #[test]
    fn witnesses_reproduce_failures() {
        let profile = exp1();
        let params = GasParameters::new(1.4, 0.1).unwrap();
        let weak = PowerInitial::new(profile.clone(), 0.68, 1.0, 0.2, 1.1);
        let grid = profile.domain().uniform_grid(900, 0.0);
        let [_, _, k2] = check_initial_slopes(&weak, profile.as_ref(), &params, &grid).unwrap();
        let x = k2.witness.unwrap();
        let d = weak.at(x);
        assert!(d.ds < profile.sample(x).k * d.s / 2.0);
    }

    #[test]
    fn threshold_search_finds_transition() {
        // S0' = m k S0 / (-b) with R0 = S0 (1 + 2 sqrt(nu)): (k2) holds for
        // every nu while the exact form needs 1/4 + xi/2 <= m/2, i.e.
        // 2 sqrt(nu) <= m - 1/2.
        let profile = exp1();
        let m = 0.6;
        let expected = ((m - 0.5) / 2.0f64).powi(2);
        let grid = profile.domain().uniform_grid(200, 0.0);
        let run = |nu: f64| -> Result<bool> {
            let params = GasParameters::new(1.4, nu)?;
            let pr = profile.clone();
            let data = FnData::new("m", move |x: f64| {
                let k = pr.sample(x).k;
                let s = 1.0 + x;
                let r = s * (1.0 + 2.0 * nu.sqrt());
                DataSample { s, ds: m * k * s / 2.0, r, dr: r * k }
            });
            let [s, _, _] = check_initial_slopes(&data, profile.as_ref(), &params, &grid)?;
            Ok(s.passed())
        };
        let nu_star = nu_threshold(1e-8, 0.5, 60, run).unwrap().unwrap();
        assert!((nu_star / expected - 1.0).abs() < 1e-6, "{nu_star} vs {expected}");
        // monotone transition around the threshold
        assert!(run(nu_star * 0.99).unwrap());
        assert!(!run(nu_star * 1.01).unwrap());
    }

    #[test]
    fn report_is_deterministic_and_serializable() {
        let profile = exp1();
        let (params, pair) = experiment(profile.clone(), 1e-3);
        let s = ValidationSettings::default();
        let a = validate(&params, profile.as_ref(), &pair, &s).unwrap();
        let b = validate(&params, profile.as_ref(), &pair, &s).unwrap();
        assert_eq!(a, b);
        assert!(a.to_key_value().contains("k1.status=pass"));
        assert!(a.to_text().contains("overall          PASS"));
        let bad = ValidationReport::gamma_out_of_range(3.5);
        assert_eq!(bad.failed_ids(), vec!["gamma-range"]);
    }
}
