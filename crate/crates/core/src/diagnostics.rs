//! Run-time checks of the a-priori estimates on computed fields: the
//! monitored sup norms, the maximum principle, the `xi` bound, the slope
//! inequalities and the decay bounds.
//!
//! Margins follow one sign convention: `margin = rhs - lhs`, so negative
//! means violated, and a claim passes when its worst margin is `>= -tol`.

use std::fmt::{self, Write as _};

use crate::conditions::{BoundaryData, InitialData};
use crate::error::{Error, Result};
use crate::geometry::DuctProfile;
use crate::model::{eigenvalues, source_g_with_k, GasParameters};
use crate::solver::FieldSnapshot;

pub const NORMS_HEADER: &str = "t,sup_rho,sup_v,sup_rho_x,sup_v_x,min_S,max_R,sup_xi";
pub const CLAIMS_HEADER: &str = "claim_id,pass,worst_margin,x,t";

/// Above this `nu` the smallness-qualified claims only warn.
pub const STRICT_NU: f64 = 1e-3;

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

/// First derivative on a uniform grid: fourth-order central differences in
/// the interior and fourth-order one-sided stencils on the two nodes at
/// each end. Needs at least five values.
pub fn derivative(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "derivative needs at least 5 samples");
    let h = 12.0 * dx;
    let mut d = vec![0.0; n];
    // written in differences so that constants give exact zeros
    for i in 2..n - 2 {
        d[i] = ((f[i - 2] - f[i + 2]) + 8.0 * (f[i + 1] - f[i - 1])) / h;
    }
    let edge0 = |f0: f64, f1: f64, f2: f64, f3: f64, f4: f64| {
        48.0 * (f1 - f0) - 36.0 * (f2 - f0) + 16.0 * (f3 - f0) - 3.0 * (f4 - f0)
    };
    let edge1 = |f0: f64, f1: f64, f2: f64, f3: f64, f4: f64| {
        -3.0 * (f0 - f1) + 18.0 * (f2 - f1) - 6.0 * (f3 - f1) + (f4 - f1)
    };
    d[0] = edge0(f[0], f[1], f[2], f[3], f[4]) / h;
    d[1] = edge1(f[0], f[1], f[2], f[3], f[4]) / h;
    let m = n - 1;
    d[m] = -edge0(f[m], f[m - 1], f[m - 2], f[m - 3], f[m - 4]) / h;
    d[m - 1] = -edge1(f[m], f[m - 1], f[m - 2], f[m - 3], f[m - 4]) / h;
    d
}

/// Monitored scalars at one time level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormRow {
    pub t: f64,
    pub sup_rho: f64,
    pub sup_v: f64,
    pub sup_rho_x: f64,
    pub sup_v_x: f64,
    pub min_s: f64,
    pub max_r: f64,
    pub sup_xi: f64,
    /// Where `sup_xi` is attained.
    pub xi_at: f64,
}

impl NormRow {
    pub fn of(snap: &FieldSnapshot) -> Self {
        let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let dx = snap.dx();
        let mut row = NormRow {
            t: snap.t(),
            sup_rho: sup(snap.rho()),
            sup_v: sup(snap.v()),
            sup_rho_x: sup(&derivative(snap.rho(), dx)),
            sup_v_x: sup(&derivative(snap.v(), dx)),
            min_s: f64::INFINITY,
            max_r: f64::NEG_INFINITY,
            sup_xi: f64::NEG_INFINITY,
            xi_at: snap.x()[0],
        };
        for (i, &x) in snap.x().iter().enumerate() {
            let st = snap.riemann(i);
            row.min_s = row.min_s.min(st.s);
            row.max_r = row.max_r.max(st.r);
            let xi = st.xi();
            if xi > row.sup_xi {
                row.sup_xi = xi;
                row.xi_at = x;
            }
        }
        row
    }

    pub fn values(&self) -> [f64; 8] {
        [self.t, self.sup_rho, self.sup_v, self.sup_rho_x, self.sup_v_x, self.min_s, self.max_r, self.sup_xi]
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }
}

/// Time series of [`NormRow`]s, one per solver step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormSeries {
    pub rows: Vec<NormRow>,
}

impl NormSeries {
    pub fn push(&mut self, snap: &FieldSnapshot) {
        self.rows.push(NormRow::of(snap));
    }

    pub fn from_snapshots<'a>(snaps: impl IntoIterator<Item = &'a FieldSnapshot>) -> Self {
        Self { rows: snaps.into_iter().map(NormRow::of).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&NormRow> {
        self.rows.last()
    }

    /// Largest `sup_xi` over the series and where it sits.
    pub fn sup_xi(&self) -> Option<(f64, f64, f64)> {
        self.rows
            .iter()
            .fold(None, |best: Option<(f64, f64, f64)>, r| match best {
                Some((v, _, _)) if v >= r.sup_xi => best,
                _ => Some((r.sup_xi, r.xi_at, r.t)),
            })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(NORMS_HEADER);
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.values().iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(NORMS_HEADER) {
            return Err(Error::Usage(format!("norm series must start with `{NORMS_HEADER}`")));
        }
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let v: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Usage(format!("norm series row {}: {e}", n + 2)))?;
            if v.len() != 8 {
                return Err(Error::Usage(format!("norm series row {} has {} columns", n + 2, v.len())));
            }
            rows.push(NormRow {
                t: v[0],
                sup_rho: v[1],
                sup_v: v[2],
                sup_rho_x: v[3],
                sup_v_x: v[4],
                min_s: v[5],
                max_r: v[6],
                sup_xi: v[7],
                xi_at: f64::NAN,
            });
        }
        Ok(Self { rows })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimStatus {
    Pass,
    Fail,
    /// Violated, but `nu` is above the range where the claim is asserted.
    Warn,
    NotApplicable,
}

impl fmt::Display for ClaimStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClaimStatus::Pass => "true",
            ClaimStatus::Fail => "false",
            ClaimStatus::Warn => "warn",
            ClaimStatus::NotApplicable => "n/a",
        })
    }
}

/// Outcome of one claim over a set of samples, with the sample of smallest
/// margin.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaimReport {
    pub id: String,
    pub status: ClaimStatus,
    pub worst_margin: f64,
    pub x: f64,
    pub t: f64,
    pub note: String,
}

impl ClaimReport {
    pub fn not_applicable(id: &str, note: impl Into<String>) -> Self {
        Self { id: id.into(), status: ClaimStatus::NotApplicable, worst_margin: f64::NAN, x: f64::NAN, t: f64::NAN, note: note.into() }
    }

    pub fn passed(&self) -> bool {
        matches!(self.status, ClaimStatus::Pass | ClaimStatus::NotApplicable)
    }

    pub fn failed(&self) -> bool {
        self.status == ClaimStatus::Fail
    }

    /// Downgrade a failure to a warning.
    pub fn soften(mut self) -> Self {
        if self.status == ClaimStatus::Fail {
            self.status = ClaimStatus::Warn;
        }
        self
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.id, self.status, self.worst_margin, self.x, self.t)
    }
}

/// Running minimum of margins for one claim.
#[derive(Debug, Clone)]
pub struct Tracker {
    id: String,
    tol: f64,
    worst: f64,
    x: f64,
    t: f64,
    seen: bool,
}

impl Tracker {
    pub fn new(id: &str, tol: f64) -> Self {
        Self { id: id.into(), tol, worst: f64::INFINITY, x: f64::NAN, t: f64::NAN, seen: false }
    }

    pub fn observe(&mut self, margin: f64, x: f64, t: f64) {
        // NaN is a violation
        let m = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        if !self.seen || m < self.worst {
            self.worst = m;
            self.x = x;
            self.t = t;
            self.seen = true;
        }
    }

    pub fn finish(self, note: impl Into<String>) -> ClaimReport {
        if !self.seen {
            return ClaimReport::not_applicable(&self.id, "no samples");
        }
        let status = if self.worst >= -self.tol { ClaimStatus::Pass } else { ClaimStatus::Fail };
        ClaimReport { id: self.id, status, worst_margin: self.worst, x: self.x, t: self.t, note: note.into() }
    }
}

/// `M = max(sup R0, sup RB)` sampled on the node set and the record times.
pub fn data_bound_m(initial: &dyn InitialData, boundary: &dyn BoundaryData, x: &[f64], t: &[f64]) -> f64 {
    let a = x.iter().map(|&x| initial.at(x).r).fold(f64::NEG_INFINITY, f64::max);
    let b = t.iter().map(|&t| boundary.at(t).r).fold(f64::NEG_INFINITY, f64::max);
    a.max(b)
}

/// `max(sup xi0, sup xiB)` sampled on the node set and the record times.
pub fn xi_envelope(initial: &dyn InitialData, boundary: &dyn BoundaryData, x: &[f64], t: &[f64]) -> f64 {
    let a = x.iter().map(|&x| initial.at(x).xi()).fold(f64::NEG_INFINITY, f64::max);
    let b = t.iter().map(|&t| boundary.at(t).xi()).fold(f64::NEG_INFINITY, f64::max);
    a.max(b)
}

/// `0 < S < R <= M` at every node of one snapshot.
pub fn max_principle_check(snap: &FieldSnapshot, m: f64, tol: f64) -> ClaimReport {
    max_principle_run(std::iter::once(snap), m, tol)
}

/// [`max_principle_check`] over many snapshots. Positivity and ordering are
/// strict, so they are tracked without tolerance.
pub fn max_principle_run<'a>(snaps: impl IntoIterator<Item = &'a FieldSnapshot>, m: f64, tol: f64) -> ClaimReport {
    let mut strict = Tracker::new("max-principle", 0.0);
    let mut upper = Tracker::new("max-principle", tol);
    let mut strict_fail = false;
    for snap in snaps {
        for (i, &x) in snap.x().iter().enumerate() {
            let st = snap.riemann(i);
            let gap = st.s.min(st.r - st.s);
            if !(gap > 0.0) {
                strict_fail = true;
            }
            strict.observe(gap, x, snap.t());
            upper.observe(m - st.r, x, snap.t());
        }
    }
    let a = strict.finish("");
    let b = upper.finish("");
    let fail = strict_fail || b.failed();
    let mut out = if strict_fail || a.worst_margin <= b.worst_margin { a } else { b };
    out.status = if fail { ClaimStatus::Fail } else { ClaimStatus::Pass };
    out.note = format!("M = {m}");
    out
}

/// `sup xi <= max(sup xi0, sup xiB) + tol` over a run.
pub fn xi_bound_check(series: &NormSeries, envelope: f64, tol: f64) -> ClaimReport {
    let mut tr = Tracker::new("xi-bound", tol);
    for r in &series.rows {
        tr.observe(envelope - r.sup_xi, r.xi_at, r.t);
    }
    tr.finish(format!("data envelope {envelope}"))
}

/// Log-log slope of `sup xi` against `nu` over a sweep.
pub fn xi_scaling_slope(points: &[(f64, f64)]) -> f64 {
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    fit_slope(&lx, &ly)
}

/// Pointwise fields entering the slope inequalities.
#[derive(Debug, Clone)]
pub struct SlopeFields {
    pub s: Vec<f64>,
    pub r: Vec<f64>,
    pub s_x: Vec<f64>,
    pub r_x: Vec<f64>,
    pub s_t: Vec<f64>,
    pub r_t: Vec<f64>,
}

/// `S_x`, `R_x` by finite differences and `S_t = g - lambda1 S_x`,
/// `R_t = -g - lambda2 R_x` from the characteristic equations.
pub fn slope_fields(snap: &FieldSnapshot, k: &[f64]) -> SlopeFields {
    let p = snap.params();
    let inv = snap.invariants();
    let s: Vec<f64> = inv.iter().map(|st| st.s).collect();
    let r: Vec<f64> = inv.iter().map(|st| st.r).collect();
    let s_x = derivative(&s, snap.dx());
    let r_x = derivative(&r, snap.dx());
    let mut s_t = vec![0.0; s.len()];
    let mut r_t = vec![0.0; s.len()];
    for i in 0..s.len() {
        let (l1, l2) = eigenvalues(inv[i], p);
        let g = source_g_with_k(k[i], inv[i], p);
        s_t[i] = g - l1 * s_x[i];
        r_t[i] = -g - l2 * r_x[i];
    }
    SlopeFields { s, r, s_x, r_x, s_t, r_t }
}

/// Sampled `k` on the snapshot nodes.
pub fn k_on(profile: &dyn DuctProfile, x: &[f64]) -> Vec<f64> {
    x.iter().map(|&x| profile.k(x)).collect()
}

/// Both halves of the slope inequality,
/// `kS/(-4b) <= min(S_x, R_x)` and `max(S_t, R_t) <= kS^2/(4b)`.
/// Above [`STRICT_NU`] failures are reported as warnings.
pub fn slope_inequality_check<'a>(
    snaps: impl IntoIterator<Item = &'a FieldSnapshot>,
    k: &[f64],
    params: &GasParameters,
    tol: f64,
) -> [ClaimReport; 2] {
    let b = params.b();
    let mut space = Tracker::new("slope-x", tol);
    let mut time = Tracker::new("slope-t", tol);
    for snap in snaps {
        let f = slope_fields(snap, k);
        for (i, &x) in snap.x().iter().enumerate() {
            let ks = k[i] * f.s[i];
            space.observe(f.s_x[i].min(f.r_x[i]) - ks / (-4.0 * b), x, snap.t());
            time.observe(ks * f.s[i] / (4.0 * b) - f.s_t[i].max(f.r_t[i]), x, snap.t());
        }
    }
    let soft = params.nu() > STRICT_NU;
    let note = if soft { format!("nu = {} above {STRICT_NU}: warn only", params.nu()) } else { String::new() };
    let mut out = [space.finish(note.clone()), time.finish(note)];
    if soft {
        out = out.map(ClaimReport::soften);
    }
    out
}

/// Linear interpolation of nodal values at `xp`.
pub fn sample_at(x: &[f64], f: &[f64], xp: f64) -> f64 {
    let n = x.len();
    if xp <= x[0] {
        return f[0];
    }
    if xp >= x[n - 1] {
        return f[n - 1];
    }
    let j = x.partition_point(|&a| a <= xp).clamp(1, n - 1);
    let w = (xp - x[j - 1]) / (x[j] - x[j - 1]);
    (1.0 - w) * f[j - 1] + w * f[j]
}

/// Probe series `(t, S, R, v)` at `xp`.
pub fn probe_series<'a>(snaps: impl IntoIterator<Item = &'a FieldSnapshot>, xp: f64) -> Vec<[f64; 4]> {
    snaps
        .into_iter()
        .map(|s| {
            let (a, b) = (sample_at(s.x(), &s.s(), xp), sample_at(s.x(), &s.r(), xp));
            [s.t(), a, b, sample_at(s.x(), s.v(), xp)]
        })
        .collect()
}

/// The decay claims at each probe: the pointwise bound
/// `S <= (1/S0 + k t/(-4b))^-1`, the envelope `R <= 2S`, monotone decrease
/// of `S`, `R`, `v` in time, and the fitted decay exponent of `S` over the
/// last half of the horizon. The exponent is asymptotic, so an exponent
/// outside `[-1.2, -0.8]` only warns.
pub fn decay_check(
    snaps: &[&FieldSnapshot],
    initial: &dyn InitialData,
    profile: &dyn DuctProfile,
    params: &GasParameters,
    probes: &[f64],
    tol: f64,
) -> Vec<ClaimReport> {
    let b = params.b();
    let mut bound = Tracker::new("decay-bound", tol);
    let mut envelope = Tracker::new("decay-envelope", tol);
    let mut monotone = Tracker::new("decay-monotone", tol);
    let mut rate = Tracker::new("decay-rate", 0.0);
    let mut skipped = Vec::new();
    for &xp in probes {
        let k = profile.k(xp);
        if !(k > 0.0) {
            skipped.push(xp);
            continue;
        }
        let s0 = initial.at(xp).s;
        let series = probe_series(snaps.iter().copied(), xp);
        for (j, row) in series.iter().enumerate() {
            let [t, s, r, v] = *row;
            bound.observe(1.0 / (1.0 / s0 + k * t / (-4.0 * b)) - s, xp, t);
            envelope.observe(2.0 * s - r, xp, t);
            if j > 0 {
                let prev = series[j - 1];
                let m = (prev[1] - s).min(prev[2] - r).min(prev[3] - v);
                monotone.observe(m, xp, t);
            }
        }
        let t_end = series.last().map_or(0.0, |r| r[0]);
        let tail: Vec<&[f64; 4]> = series.iter().filter(|r| r[0] >= 0.5 * t_end && r[0] > 0.0).collect();
        if tail.len() >= 3 {
            let lx: Vec<f64> = tail.iter().map(|r| r[0].ln()).collect();
            let ly: Vec<f64> = tail.iter().map(|r| r[1].ln()).collect();
            let e = fit_slope(&lx, &ly);
            rate.observe(0.2 - (e + 1.0).abs(), xp, t_end);
        }
    }
    let note = if skipped.is_empty() { String::new() } else { format!("probes with k <= 0 skipped: {skipped:?}") };
    vec![
        bound.finish(note.clone()),
        envelope.finish(note.clone()),
        monotone.finish(note.clone()),
        rate.finish("fitted exponent of S over the last half of the horizon").soften(),
    ]
}

/// Plain-text table of claim outcomes.
pub fn claims_text(claims: &[ClaimReport]) -> String {
    let mut out = String::new();
    for c in claims {
        let _ = writeln!(out, "{:<16} {:<5} margin {:>12.4e} at x = {}, t = {} {}", c.id, c.status, c.worst_margin, c.x, c.t, c.note);
    }
    out
}

pub fn claims_csv(claims: &[ClaimReport]) -> String {
    let mut out = String::from(CLAIMS_HEADER);
    out.push('\n');
    for c in claims {
        out.push_str(&c.csv_row());
        out.push('\n');
    }
    out
}
