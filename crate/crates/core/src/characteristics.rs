//! Characteristic curves through a recorded space-time field and the
//! monotonicity claims along them.

use std::fmt::{self, Write as _};
use std::sync::Arc;

use crate::diagnostics::{ClaimReport, Tracker};
use crate::error::{Error, Result};
use crate::interp::{hermite, limit_slopes};
use crate::model::{eigenvalues, primitive_from_riemann, GasParameters, RiemannState};
use crate::registry::Registry;
use crate::solver::FieldSnapshot;

pub const TRACE_HEADER: &str = "t,x,S,R,xi";

/// One-dimensional interpolation of equally spaced samples, applied along
/// `x` on each time level and then along `t`.
pub trait SpatialInterpolation: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    /// Neighbours needed on each side of the bracketing pair.
    fn reach(&self) -> usize;
    /// Value at `i + s` for `0 <= s <= 1`.
    fn eval(&self, f: &[f64], i: usize, s: f64) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub struct Linear;

impl SpatialInterpolation for Linear {
    fn name(&self) -> &'static str {
        "bilinear"
    }
    fn reach(&self) -> usize {
        0
    }
    fn eval(&self, f: &[f64], i: usize, s: f64) -> f64 {
        f[i] + s * (f[i + 1] - f[i])
    }
}

/// Cubic Hermite with centred slopes limited to keep each cell monotone,
/// so the interpolant cannot overshoot the nodal values.
#[derive(Debug, Clone, Copy)]
pub struct MonotoneHermite;

impl SpatialInterpolation for MonotoneHermite {
    fn name(&self) -> &'static str {
        "monotone-cubic"
    }
    fn reach(&self) -> usize {
        1
    }
    fn eval(&self, f: &[f64], i: usize, s: f64) -> f64 {
        let n = f.len();
        let slope = |j: usize| {
            if j == 0 {
                f[1] - f[0]
            } else if j == n - 1 {
                f[n - 1] - f[n - 2]
            } else {
                0.5 * (f[j + 1] - f[j - 1])
            }
        };
        let mut m = [slope(i), slope(i + 1)];
        limit_slopes(&[f[i + 1] - f[i]], &mut m);
        hermite(f[i], f[i + 1], m[0], m[1], s).0
    }
}

pub fn default_registry() -> Registry<dyn SpatialInterpolation> {
    Registry::new("field interpolation")
        .with("bilinear", Arc::new(Linear) as Arc<dyn SpatialInterpolation>)
        .with("monotone-cubic", Arc::new(MonotoneHermite))
}

/// Interpolated values at one point; `clamped` marks queries pulled back
/// into the recorded domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub s: f64,
    pub r: f64,
    pub clamped: bool,
}

impl FieldSample {
    pub fn state(&self) -> RiemannState {
        RiemannState::new(self.s, self.r)
    }

    pub fn xi(&self) -> f64 {
        self.state().xi()
    }

    pub fn v(&self) -> f64 {
        0.5 * (self.s + self.r)
    }
}

/// Invariants on a uniform grid at equally spaced times, interpolated by a
/// pluggable rule in `x` and then in `t`.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    x: Arc<Vec<f64>>,
    times: Vec<f64>,
    s: Vec<Vec<f64>>,
    r: Vec<Vec<f64>>,
    params: GasParameters,
    interp: Arc<dyn SpatialInterpolation>,
}

impl SpaceTimeField {
    /// Build from snapshots sharing one grid at a constant time stride. The
    /// final level may follow a shorter stride.
    pub fn from_snapshots(snaps: &[&FieldSnapshot], interp: Arc<dyn SpatialInterpolation>) -> Result<Self> {
        let first = snaps.first().ok_or_else(|| Error::Usage("space-time field needs snapshots".into()))?;
        let x = first.x_shared();
        for s in snaps {
            if s.x() != x.as_slice() {
                return Err(Error::Usage(format!("snapshot at t = {} uses a different grid", s.t())));
            }
        }
        let times: Vec<f64> = snaps.iter().map(|s| s.t()).collect();
        let s: Vec<Vec<f64>> = snaps.iter().map(|s| s.s()).collect();
        let r: Vec<Vec<f64>> = snaps.iter().map(|s| s.r()).collect();
        Self::new(x, times, s, r, *first.params(), interp)
    }

    /// Synthetic field from a closed form.
    pub fn from_fn(
        x: Vec<f64>,
        times: Vec<f64>,
        params: GasParameters,
        interp: Arc<dyn SpatialInterpolation>,
        f: impl Fn(f64, f64) -> RiemannState,
    ) -> Result<Self> {
        let mut s = Vec::with_capacity(times.len());
        let mut r = Vec::with_capacity(times.len());
        for &t in &times {
            let st: Vec<RiemannState> = x.iter().map(|&x| f(x, t)).collect();
            s.push(st.iter().map(|a| a.s).collect());
            r.push(st.iter().map(|a| a.r).collect());
        }
        Self::new(Arc::new(x), times, s, r, params, interp)
    }

    fn new(
        x: Arc<Vec<f64>>,
        times: Vec<f64>,
        s: Vec<Vec<f64>>,
        r: Vec<Vec<f64>>,
        params: GasParameters,
        interp: Arc<dyn SpatialInterpolation>,
    ) -> Result<Self> {
        if x.len() < 2 || times.is_empty() {
            return Err(Error::Usage("space-time field needs >= 2 nodes and >= 1 time".into()));
        }
        let dx = x[1] - x[0];
        if x.windows(2).any(|w| ((w[1] - w[0]) - dx).abs() > 1e-9 * dx.abs().max(1.0)) || !(dx > 0.0) {
            return Err(Error::Usage("space-time field needs a uniform increasing grid".into()));
        }
        if times.len() > 2 {
            let dt = times[1] - times[0];
            let body = &times[..times.len() - 1];
            let last = times[times.len() - 1] - times[times.len() - 2];
            if body.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1e-12))
                || !(last > 0.0 && last <= dt * (1.0 + 1e-9))
            {
                return Err(Error::Usage("snapshots must be recorded at a constant time stride".into()));
            }
        }
        Ok(Self { x, times, s, r, params, interp })
    }

    pub fn params(&self) -> &GasParameters {
        &self.params
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.times[0], self.times[self.times.len() - 1])
    }

    /// Time between the first two levels (0 for a single level).
    pub fn stride(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    pub fn interpolation(&self) -> &str {
        self.interp.name()
    }

    pub fn contains(&self, x: f64, t: f64) -> bool {
        let (a, b) = self.x_range();
        let (t0, t1) = self.t_range();
        x >= a && x <= b && t >= t0 && t <= t1
    }

    fn locate(grid: &[f64], q: f64) -> (usize, f64) {
        let n = grid.len();
        if n == 1 {
            return (0, 0.0);
        }
        let j = grid.partition_point(|&a| a <= q).clamp(1, n - 1) - 1;
        let s = ((q - grid[j]) / (grid[j + 1] - grid[j])).clamp(0.0, 1.0);
        (j, s)
    }

    fn level(&self, table: &[f64], i: usize, s: f64) -> f64 {
        if self.x.len() == 1 {
            table[0]
        } else {
            self.interp.eval(table, i, s)
        }
    }

    pub fn sample(&self, x: f64, t: f64) -> FieldSample {
        let clamped = !self.contains(x, t);
        let (a, b) = self.x_range();
        let (t0, t1) = self.t_range();
        let (xq, tq) = (x.clamp(a, b), t.clamp(t0, t1));
        let (i, sx) = Self::locate(&self.x, xq);
        let (j, st) = Self::locate(&self.times, tq);
        let nt = self.times.len();
        let at = |tab: &Vec<Vec<f64>>| {
            if st == 0.0 || nt == 1 {
                return self.level(&tab[j], i, sx);
            }
            let reach = self.interp.reach();
            let lo = j.saturating_sub(reach);
            let hi = (j + 1 + reach).min(nt - 1);
            let column: Vec<f64> = (lo..=hi).map(|l| self.level(&tab[l], i, sx)).collect();
            self.interp.eval(&column, j - lo, st)
        };
        FieldSample { s: at(&self.s), r: at(&self.r), clamped }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `dx/dt = lambda1`.
    First,
    /// `dx/dt = lambda2`.
    Second,
    /// `dx/dt = v`.
    Particle,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::First => "1",
            Family::Second => "2",
            Family::Particle => "particle",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "1" | "first" => Ok(Family::First),
            "2" | "second" => Ok(Family::Second),
            "particle" | "p" => Ok(Family::Particle),
            _ => Err(Error::Usage(format!("unknown characteristic family `{s}` (use 1, 2 or particle)"))),
        }
    }

    pub fn speed(&self, st: RiemannState, params: &GasParameters) -> f64 {
        match self {
            Family::First => eigenvalues(st, params).0,
            Family::Second => eigenvalues(st, params).1,
            Family::Particle => 0.5 * (st.s + st.r),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitReason {
    LeftDomainRight,
    ReachedTEnd,
    HitBoundary,
}

impl fmt::Display for ExitReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExitReason::LeftDomainRight => "left-domain-right",
            ExitReason::ReachedTEnd => "reached-t-end",
            ExitReason::HitBoundary => "hit-boundary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub x: f64,
    pub s: f64,
    pub r: f64,
    pub xi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveTrace {
    pub family: Family,
    pub start: (f64, f64),
    pub points: Vec<TracePoint>,
    pub exit: ExitReason,
}

impl CurveTrace {
    pub fn exit_point(&self) -> &TracePoint {
        self.points.last().expect("a trace holds its start point")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_HEADER);
        out.push('\n');
        for p in &self.points {
            let _ = writeln!(out, "{},{},{},{},{}", p.t, p.x, p.s, p.r, p.xi);
        }
        out
    }

    /// `trace_<family>_<x0>_<t0>.csv`.
    pub fn file_name(&self) -> String {
        format!("trace_{}_{}_{}.csv", self.family, self.start.0, self.start.1)
    }
}

/// Integrate `dx/dt = speed(x, t)` with classical RK4 at step `h` (the
/// field's stride by default) from `(x0, t0)` until the curve leaves the
/// domain or the record ends. A step that would leave the domain is cut
/// back to the exit by linear interpolation.
pub fn trace(field: &SpaceTimeField, x0: f64, t0: f64, family: Family, h: Option<f64>) -> Result<CurveTrace> {
    if !field.contains(x0, t0) {
        let (a, b) = field.x_range();
        let (s, e) = field.t_range();
        return Err(Error::Usage(format!(
            "trace start ({x0}, {t0}) lies outside the recorded domain [{a}, {b}] x [{s}, {e}]"
        )));
    }
    let p = *field.params();
    let h = h.unwrap_or_else(|| field.stride());
    let (xa, xb) = field.x_range();
    let t_end = field.t_range().1;
    let point = |t: f64, x: f64| {
        let f = field.sample(x, t);
        TracePoint { t, x, s: f.s, r: f.r, xi: f.xi() }
    };
    let speed = |t: f64, x: f64| family.speed(field.sample(x, t).state(), &p);

    let mut points = vec![point(t0, x0)];
    if !(h > 0.0) {
        return Ok(CurveTrace { family, start: (x0, t0), points, exit: ExitReason::ReachedTEnd });
    }
    let (mut t, mut x) = (t0, x0);
    let mut step = 0usize;
    let exit = loop {
        if t >= t_end - 1e-12 * h {
            break ExitReason::ReachedTEnd;
        }
        step += 1;
        // stay on the record's time levels: t0 + step h, capped at t_end
        let t_next = (t0 + step as f64 * h).min(t_end);
        let dt = t_next - t;
        let k1 = speed(t, x);
        let k2 = speed(t + 0.5 * dt, x + 0.5 * dt * k1);
        let k3 = speed(t + 0.5 * dt, x + 0.5 * dt * k2);
        let k4 = speed(t_next, x + dt * k3);
        let x_next = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if x_next > xb || x_next < xa {
            let wall = if x_next > xb { xb } else { xa };
            let theta = (wall - x) / (x_next - x);
            points.push(point(t + theta * dt, wall));
            break if x_next > xb { ExitReason::LeftDomainRight } else { ExitReason::HitBoundary };
        }
        t = t_next;
        x = x_next;
        points.push(point(t, x));
    };
    Ok(CurveTrace { family, start: (x0, t0), points, exit })
}

/// Monotonicity of `S` (up), `R` and `xi` (down) along a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub s_increasing: bool,
    pub r_decreasing: bool,
    pub xi_decreasing: bool,
    /// Most negative of the three step margins (positive when all hold).
    pub worst: f64,
    pub worst_at: f64,
}

impl MonotonicityReport {
    pub fn ok(&self) -> bool {
        self.s_increasing && self.r_decreasing && self.xi_decreasing
    }
}

pub fn monotonicity_report(trace: &CurveTrace, tol: f64) -> MonotonicityReport {
    let mut rep = MonotonicityReport {
        s_increasing: true,
        r_decreasing: true,
        xi_decreasing: true,
        worst: f64::INFINITY,
        worst_at: trace.start.1,
    };
    for w in trace.points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let m = [b.s - a.s, a.r - b.r, a.xi - b.xi];
        rep.s_increasing &= m[0] >= -tol;
        rep.r_decreasing &= m[1] >= -tol;
        rep.xi_decreasing &= m[2] >= -tol;
        for v in m {
            if !(v >= rep.worst) {
                rep.worst = v;
                rep.worst_at = b.t;
            }
        }
    }
    rep
}

/// The two-sided bound `gap(rho)/M <= xi <= gap(rho)/S(start)`, with
/// `gap = 4 sqrt(nu/(gamma-1)) rho^((gamma-1)/2)`, at every sample.
pub fn vacuum_equivalence_check(trace: &CurveTrace, params: &GasParameters, m: f64, tol: f64) -> Result<ClaimReport> {
    let first = trace.points[0];
    let r_max = trace.points.iter().map(|p| p.r).fold(f64::NEG_INFINITY, f64::max);
    if r_max > m {
        return Err(Error::Precondition { what: format!("M = {m} is below max R = {r_max} along the trace"), at: m });
    }
    if !(first.s > 0.0) {
        return Err(Error::Precondition { what: "S at the trace start must be positive".into(), at: first.t });
    }
    let mut tr = Tracker::new("vacuum-equivalence", tol);
    for p in &trace.points {
        let rho = primitive_from_riemann(RiemannState::new(p.s, p.r), params)?.rho;
        let gap = params.invariant_gap(rho);
        tr.observe((p.xi - gap / m).min(gap / first.s - p.xi), p.x, p.t);
    }
    Ok(tr.finish(format!("family {}", trace.family)))
}
