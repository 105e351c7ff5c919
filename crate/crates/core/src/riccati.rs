//! Generalized Lax transformation and the Riccati equations it produces
//! along the two characteristic families.
//!
//! With `h = b ln(R - S)` the gradients become
//! `Y = e^h S_x + Q1` and `Z = e^h R_x + Q2`, and along `dx/dt = lambda1`
//! (resp. `lambda2`) they obey `Y' = A Y^2 + B Y + C`
//! (resp. `Z' = Ahat Z^2 + Bhat Z + Chat`). The free functions `G1, G2`
//! (`H1, H2` when `b = -1`) are taken to be zero.

use crate::error::{Error, Result};
use crate::geometry::DuctProfile;
use crate::model::{eigenvalues, source_g_with_k, GasParameters, RiemannState};

/// `|b + 1|` below this selects the logarithmic branch.
pub const LOG_BRANCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    General,
    Logarithmic,
}

impl Branch {
    pub fn of(b: f64) -> Self {
        if (b + 1.0).abs() <= LOG_BRANCH_TOL {
            Branch::Logarithmic
        } else {
            Branch::General
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaxQuantities {
    pub h: f64,
    pub q1: f64,
    pub q2: f64,
    pub y: f64,
    pub z: f64,
}

impl LaxQuantities {
    /// Recover `(S_x, R_x)` from `Y, Z`.
    pub fn gradients(&self) -> (f64, f64) {
        let w = (-self.h).exp();
        (w * (self.y - self.q1), w * (self.z - self.q2))
    }
}

fn gap(s: f64, r: f64) -> Result<f64> {
    let d = r - s;
    if !(d > 0.0) {
        return Err(Error::domain(format!("R - S must be positive, got S = {s}, R = {r}")));
    }
    Ok(d)
}

/// `(h, Q1, Q2)` at one state.
pub fn lax_offsets(s: f64, r: f64, k: f64, params: &GasParameters) -> Result<(f64, f64, f64)> {
    let d = gap(s, r)?;
    let b = params.b();
    Ok(match Branch::of(b) {
        Branch::General => {
            let db = d.powf(b);
            let q1 = k / (2.0 * b) * s * db + k / (2.0 * (b + 1.0)) * db * d;
            let q2 = k / (2.0 * b) * r * db - k / (2.0 * (b + 1.0)) * db * d;
            (b * d.ln(), q1, q2)
        }
        Branch::Logarithmic => {
            let l = d.ln();
            let q1 = -0.5 * k * s / d + 0.5 * k * l;
            let q2 = -0.5 * k * r / d - 0.5 * k * l;
            (-l, q1, q2)
        }
    })
}

pub fn lax_quantities(s: f64, r: f64, s_x: f64, r_x: f64, k: f64, params: &GasParameters) -> Result<LaxQuantities> {
    let (h, q1, q2) = lax_offsets(s, r, k, params)?;
    let eh = h.exp();
    Ok(LaxQuantities { h, q1, q2, y: eh * s_x + q1, z: eh * r_x + q2 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub a_hat: f64,
    pub b_hat: f64,
    pub c_hat: f64,
    pub branch: Branch,
}

impl RiccatiCoeffs {
    pub fn family(&self, family: Family) -> (f64, f64, f64) {
        match family {
            Family::First => (self.a, self.b, self.c),
            Family::Second => (self.a_hat, self.b_hat, self.c_hat),
        }
    }

    /// Right-hand side of the Riccati equation of `family` at `w`.
    pub fn apply(&self, family: Family, w: f64) -> f64 {
        let (a, b, c) = self.family(family);
        (a * w + b) * w + c
    }
}

// B and C1 for b != -1, written for family 1; family 2 swaps S and R.
fn general_b(s: f64, r: f64, k: f64, b: f64) -> f64 {
    let p = b * (b * b + 3.0 * b - 2.0);
    let q = b * b * b + 2.0 * b * b + 3.0 * b - 2.0;
    -k / (2.0 * b * (b + 1.0) * (1.0 - 2.0 * b)) * (p * r + q * s)
}

fn general_c1(s: f64, r: f64, k: f64, kp: f64, b: f64) -> f64 {
    let p = b * b * b + 2.0 * b * b + 3.0 * b - 2.0;
    let kk = k * k / (8.0 * b * b * (b + 1.0).powi(2) * (1.0 - 2.0 * b))
        * (b * (1.0 - b).powi(2) * r * r + 2.0 * b * (b * b + 3.0 * b - 2.0) * r * s + p * s * s);
    let kd = kp / (4.0 * b * (b + 1.0) * (1.0 - 2.0 * b))
        * (b * (1.0 - b) * r * r - 2.0 * b * b * r * s + (2.0 - 3.0 * b - b * b) * s * s);
    kk + kd
}

pub fn riccati_coeffs(s: f64, r: f64, k: f64, kp: f64, params: &GasParameters) -> Result<RiccatiCoeffs> {
    let d = gap(s, r)?;
    let b = params.b();
    let branch = Branch::of(b);
    Ok(match branch {
        Branch::General => {
            let a = -(1.0 - b) / (1.0 - 2.0 * b) * d.powf(-b);
            let db = d.powf(b);
            RiccatiCoeffs {
                a,
                b: general_b(s, r, k, b),
                c: db * general_c1(s, r, k, kp, b),
                a_hat: a,
                b_hat: general_b(r, s, k, b),
                c_hat: db * general_c1(r, s, k, kp, b),
                branch,
            }
        }
        Branch::Logarithmic => {
            let l = d.ln();
            let a = -2.0 / 3.0 * d;
            let c1 = k * k / 24.0 * (-2.0 * r * d * l + 8.0 * s * d * l - 4.0 * d * d * l * l - 3.0 * r * r - 3.0 * s * s)
                + kp / 24.0 * (2.0 * (r * r - s * s) - (4.0 * r + 8.0 * s) * (s - d * l));
            let c1_hat = k * k / 24.0 * (2.0 * s * d * l - 8.0 * r * d * l - 4.0 * d * d * l * l - 3.0 * s * s - 3.0 * r * r)
                + kp / 24.0 * (2.0 * (s * s - r * r) - (4.0 * s + 8.0 * r) * (r + d * l));
            RiccatiCoeffs {
                a,
                b: k / 6.0 * (r - 4.0 * s + 4.0 * d * l),
                c: c1 / d,
                a_hat: a,
                b_hat: k / 6.0 * (s - 4.0 * r - 4.0 * d * l),
                c_hat: c1_hat / d,
                branch,
            }
        }
    })
}

/// Leading term of `C` (and `Chat`) as `xi -> 0`:
/// `S^(b+2) xi^b (-k^2/(4b^2) + k'/(2b))`.
pub fn c_sign_leading(s: f64, r: f64, k: f64, kp: f64, params: &GasParameters) -> Result<f64> {
    gap(s, r)?;
    if !(s > 0.0) {
        return Err(Error::domain(format!("leading estimate needs S > 0, got {s}")));
    }
    let b = params.b();
    let xi = (r - s) / s;
    Ok(s.powf(b + 2.0) * xi.powf(b) * (-k * k / (4.0 * b * b) + kp / (2.0 * b)))
}

/// Roots `W1 <= 0 <= W2` of `A W^2 + B W + C` when `C >= 0`.
pub fn split_roots(coeffs: &RiccatiCoeffs, family: Family) -> Result<Option<(f64, f64)>> {
    let (a, b, c) = coeffs.family(family);
    roots_of(a, b, c)
}

pub fn roots_of(a: f64, b: f64, c: f64) -> Result<Option<(f64, f64)>> {
    if !(a < 0.0) {
        return Err(Error::Precondition { what: format!("leading coefficient A = {a} must be negative"), at: f64::NAN });
    }
    if c < 0.0 {
        return Ok(None);
    }
    // AC <= 0 so the discriminant is at least B^2
    let disc = (b * b - 4.0 * a * c).sqrt();
    let q = -0.5 * (b + b.signum() * disc);
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    Ok(Some((r1.min(r2), r1.max(r2))))
}

/// Midpoint of the band `[max W1, min W2]`, if the band is nonempty.
pub fn separating_line(w1: &[f64], w2: &[f64]) -> Result<Option<f64>> {
    if w1.len() != w2.len() || w1.is_empty() {
        return Err(Error::Usage("root samples must share a nonempty time grid".into()));
    }
    let lo = w1.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let hi = w2.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((lo <= hi).then_some(0.5 * (lo + hi)))
}

/// Upper envelope `W0 - (1/4) int_{T1}^t A (W2 - W1)^2` of a Riccati
/// trajectory started at `W0 >= 0`; the lower envelope is zero.
pub struct RiccatiBound<'a> {
    a: &'a dyn Fn(f64) -> f64,
    w1: &'a dyn Fn(f64) -> f64,
    w2: &'a dyn Fn(f64) -> f64,
    t1: f64,
    t2: f64,
    nodes: Vec<f64>,
    upper: Vec<f64>,
    coarse_total: f64,
}

impl<'a> RiccatiBound<'a> {
    fn integrand(&self, t: f64) -> f64 {
        let d = (self.w2)(t) - (self.w1)(t);
        -0.25 * (self.a)(t) * d * d
    }

    fn simpson(&self, lo: f64, hi: f64) -> f64 {
        (hi - lo) / 6.0 * (self.integrand(lo) + 4.0 * self.integrand(0.5 * (lo + hi)) + self.integrand(hi))
    }

    pub fn lower(&self, _t: f64) -> f64 {
        0.0
    }

    pub fn upper(&self, t: f64) -> Result<f64> {
        if !(t >= self.t1 && t <= self.t2) {
            return Err(Error::domain(format!("t = {t} outside [{}, {}]", self.t1, self.t2)));
        }
        let i = match self.nodes.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => return Ok(self.upper[i]),
            Err(i) => i - 1,
        };
        Ok(self.upper[i] + self.simpson(self.nodes[i], t))
    }

    /// Richardson estimate of the quadrature error at `T2`.
    pub fn quadrature_error(&self) -> f64 {
        let fine = self.upper.last().unwrap() - self.upper[0];
        (fine - self.coarse_total).abs() / 15.0
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}

pub fn riccati_bound<'a>(
    a: &'a dyn Fn(f64) -> f64,
    w1: &'a dyn Fn(f64) -> f64,
    w2: &'a dyn Fn(f64) -> f64,
    w0: f64,
    horizon: (f64, f64),
    step: f64,
) -> Result<RiccatiBound<'a>> {
    let (t1, t2) = horizon;
    if !(t2 > t1) || !(step > 0.0) {
        return Err(Error::Usage(format!("bad horizon [{t1}, {t2}] or step {step}")));
    }
    if !(w0 >= 0.0) {
        return Err(Error::Precondition { what: format!("W0 = {w0} must be nonnegative"), at: t1 });
    }
    let panels = ((t2 - t1) / step).ceil().max(2.0) as usize;
    let panels = panels + panels % 2;
    let h = (t2 - t1) / panels as f64;
    let nodes: Vec<f64> = (0..=panels).map(|i| if i == panels { t2 } else { t1 + i as f64 * h }).collect();
    // preconditions at the nodes and panel midpoints
    for i in 0..=2 * panels {
        let t = t1 + 0.5 * i as f64 * h;
        if !(a(t) < 0.0) {
            return Err(Error::Precondition { what: format!("A = {} must be negative", a(t)), at: t });
        }
        if !(w1(t) <= 0.0 && w2(t) >= 0.0) {
            return Err(Error::Precondition {
                what: format!("roots must satisfy W1 <= 0 <= W2, got ({}, {})", w1(t), w2(t)),
                at: t,
            });
        }
    }
    let mut bound = RiccatiBound { a, w1, w2, t1, t2, nodes, upper: Vec::with_capacity(panels + 1), coarse_total: 0.0 };
    let mut acc = w0;
    bound.upper.push(acc);
    for i in 0..panels {
        acc += bound.simpson(bound.nodes[i], bound.nodes[i + 1]);
        bound.upper.push(acc);
    }
    bound.coarse_total = (0..panels / 2).map(|j| bound.simpson(bound.nodes[2 * j], bound.nodes[2 * j + 2])).sum();
    Ok(bound)
}

/// Classical RK4 for `W' = A (W - W1)(W - W2)`; returns `(t, W)` samples.
pub fn integrate_riccati(
    a: &dyn Fn(f64) -> f64,
    w1: &dyn Fn(f64) -> f64,
    w2: &dyn Fn(f64) -> f64,
    w0: f64,
    horizon: (f64, f64),
    step: f64,
) -> Vec<(f64, f64)> {
    let f = |t: f64, w: f64| a(t) * (w - w1(t)) * (w - w2(t));
    let n = ((horizon.1 - horizon.0) / step).ceil().max(1.0) as usize;
    let h = (horizon.1 - horizon.0) / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    let mut w = w0;
    out.push((horizon.0, w));
    for i in 0..n {
        let t = horizon.0 + i as f64 * h;
        let k1 = f(t, w);
        let k2 = f(t + 0.5 * h, w + 0.5 * h * k1);
        let k3 = f(t + 0.5 * h, w + 0.5 * h * k2);
        let k4 = f(t + h, w + h * k3);
        w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push((if i + 1 == n { horizon.1 } else { t + h }, w));
    }
    out
}

/// One sample along a steady characteristic: position, state and the
/// transformed gradient of the family.
#[derive(Debug, Clone, Copy)]
pub struct SteadySample {
    pub t: f64,
    pub x: f64,
    pub state: RiemannState,
    pub w: f64,
}

/// Follow a characteristic of a steady solution (`S_t = R_t = 0`) from
/// `(x0, state0)`. Steady gradients are `S_x = g/lambda1` and
/// `R_x = -g/lambda2`, so `(x, S, R)` solve an autonomous ODE along the
/// curve; it is integrated with RK4 at `substep` and sampled every
/// `stride`.
#[allow(clippy::too_many_arguments)]
pub fn steady_characteristic(
    profile: &dyn DuctProfile,
    params: &GasParameters,
    x0: f64,
    state0: RiemannState,
    family: Family,
    stride: f64,
    substeps: usize,
    samples: usize,
) -> Result<Vec<SteadySample>> {
    let rhs = |x: f64, s: f64, r: f64| -> [f64; 3] {
        let st = RiemannState { s, r };
        let (l1, l2) = eigenvalues(st, params);
        let g = source_g_with_k(profile.sample(x).k, st, params);
        match family {
            Family::First => [l1, g, -l1 * g / l2],
            Family::Second => [l2, l2 * g / l1, -g],
        }
    };
    let sample = |t: f64, u: [f64; 3]| -> Result<SteadySample> {
        let st = RiemannState { s: u[1], r: u[2] };
        let (l1, l2) = eigenvalues(st, params);
        let p = profile.eval(u[0])?;
        let g = source_g_with_k(p.k, st, params);
        let lq = lax_quantities(st.s, st.r, g / l1, -g / l2, p.k, params)?;
        let w = match family {
            Family::First => lq.y,
            Family::Second => lq.z,
        };
        Ok(SteadySample { t, x: u[0], state: st, w })
    };
    let h = stride / substeps as f64;
    let mut u = [x0, state0.s, state0.r];
    let mut out = vec![sample(0.0, u)?];
    for i in 1..samples {
        for _ in 0..substeps {
            let k1 = rhs(u[0], u[1], u[2]);
            let p = |k: &[f64; 3], c: f64| [u[0] + c * k[0], u[1] + c * k[1], u[2] + c * k[2]];
            let u2 = p(&k1, 0.5 * h);
            let k2 = rhs(u2[0], u2[1], u2[2]);
            let u3 = p(&k2, 0.5 * h);
            let k3 = rhs(u3[0], u3[1], u3[2]);
            let u4 = p(&k3, h);
            let k4 = rhs(u4[0], u4[1], u4[2]);
            for j in 0..3 {
                u[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
        out.push(sample(i as f64 * stride, u)?);
    }
    Ok(out)
}

/// Largest `|dW/dt - (A W^2 + B W + C)|` at the probe times along a steady
/// characteristic, with `dW/dt` from central differences at `stride`.
/// Probes are rounded to the nearest multiple of `stride` and must lie
/// strictly inside `(0, max probe + stride]`.
pub fn steady_riccati_residual(
    profile: &dyn DuctProfile,
    params: &GasParameters,
    x0: f64,
    state0: RiemannState,
    family: Family,
    stride: f64,
    probes: &[f64],
) -> Result<f64> {
    let idx: Vec<usize> = probes.iter().map(|t| (t / stride).round() as usize).collect();
    if idx.contains(&0) {
        return Err(Error::Usage("probe times must be positive multiples of the stride".into()));
    }
    let samples = idx.iter().max().copied().unwrap_or(0) + 2;
    let substeps = ((stride / 1e-4).ceil() as usize).max(1);
    let path = steady_characteristic(profile, params, x0, state0, family, stride, substeps, samples)?;
    let mut worst = 0.0f64;
    for i in idx {
        let mid = path[i];
        let p = profile.eval(mid.x)?;
        let coeffs = riccati_coeffs(mid.state.s, mid.state.r, p.k, p.dk, params)?;
        let dw = (path[i + 1].w - path[i - 1].w) / (2.0 * stride);
        worst = worst.max((dw - coeffs.apply(family, mid.w)).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets::Exp1;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn air() -> GasParameters {
        GasParameters::new(1.4, 0.1).unwrap()
    }

    fn mono() -> GasParameters {
        GasParameters::new(5.0 / 3.0, 0.1).unwrap()
    }

    #[test]
    fn lax_offsets_reference_point() {
        let lq = lax_quantities(0.9, 1.0, 0.275, 0.0, 1.0, &air()).unwrap();
        assert_relative_eq!(lq.q1, -27.5, max_relative = 1e-12);
        assert_relative_eq!(lq.q2, -20.0, max_relative = 1e-12);
        assert_relative_eq!(lq.h, -2.0 * 0.1f64.ln(), max_relative = 1e-12);
        assert!(lq.y.abs() < 1e-11);
        let free = lax_quantities(0.9, 1.0, 0.3, 0.7, 0.0, &air()).unwrap();
        assert_eq!((free.q1, free.q2), (0.0, 0.0));
        assert_relative_eq!(free.y, free.h.exp() * 0.3, max_relative = 1e-14);
        assert!(lax_quantities(1.0, 1.0, 0.0, 0.0, 1.0, &air()).is_err());
    }

    #[test]
    fn gradients_are_recovered() {
        for params in [air(), mono()] {
            let lq = lax_quantities(0.7, 1.3, 0.41, -0.2, 0.8, &params).unwrap();
            let (sx, rx) = lq.gradients();
            assert_relative_eq!(sx, 0.41, max_relative = 1e-12);
            assert_relative_eq!(rx, -0.2, max_relative = 1e-12);
        }
    }

    #[test]
    fn b_minus_two_coefficients() {
        let c = riccati_coeffs(0.9, 1.0, 1.0, 0.0, &air()).unwrap();
        assert_eq!(c.branch, Branch::General);
        assert!((c.a + 0.006).abs() < 1e-12);
        assert!((c.b + 0.04).abs() < 1e-12);
        assert!((c.c + 6.3).abs() < 1e-12);
        assert!((c.b_hat - 0.04).abs() < 1e-12);
        assert!((c.c_hat + 5.1125).abs() < 1e-12);
        let c = riccati_coeffs(0.9, 1.0, 1.0, -1.0, &air()).unwrap();
        assert!((c.c - 18.6).abs() < 1e-11);
        let c = riccati_coeffs(0.7, 1.3, 0.8, -0.4, &air()).unwrap();
        assert_relative_eq!(c.a, -0.216, max_relative = 1e-12);
        assert_relative_eq!(c.b, -0.192, max_relative = 1e-12);
        assert_relative_eq!(c.c, 0.209666666666667, max_relative = 1e-12);
        assert_relative_eq!(c.b_hat, 0.192, max_relative = 1e-12);
        assert_relative_eq!(c.c_hat, 0.0096666666666666, max_relative = 1e-11);
    }

    #[test]
    fn other_gamma_coefficients() {
        let p = GasParameters::new(1.5, 0.1).unwrap();
        let c = riccati_coeffs(0.9, 1.0, 1.0, 0.0, &p).unwrap();
        assert_relative_eq!(c.a, -0.0197642353760524, max_relative = 1e-12);
        assert_relative_eq!(c.b, -0.25625, max_relative = 1e-12);
        assert_relative_eq!(c.c, -3.95943515366916, max_relative = 1e-12);
    }

    #[test]
    fn logarithmic_branch_coefficients() {
        let c = riccati_coeffs(0.9, 1.0, 1.0, 0.0, &mono()).unwrap();
        assert_eq!(c.branch, Branch::Logarithmic);
        assert_relative_eq!(c.a, -0.0666666666666667, max_relative = 1e-12);
        assert_relative_eq!(c.b, -0.586839006199603, max_relative = 1e-12);
        assert_relative_eq!(c.c, -2.84975840532335, max_relative = 1e-12);
        assert_relative_eq!(c.b_hat, -0.363160993800397, max_relative = 1e-12);
        assert_relative_eq!(c.c_hat, -1.75603048615118, max_relative = 1e-12);
        let c = riccati_coeffs(0.7, 1.3, 0.8, -0.4, &mono()).unwrap();
        assert_relative_eq!(c.a, -0.4, max_relative = 1e-12);
        assert_relative_eq!(c.b, -0.363464199605117, max_relative = 1e-12);
        assert_relative_eq!(c.c, -0.112951111302073, max_relative = 1e-12);
        assert_relative_eq!(c.b_hat, -0.436535800394883, max_relative = 1e-12);
        assert_relative_eq!(c.c_hat, 0.246182838796648, max_relative = 1e-12);
        let c = riccati_coeffs(0.2, 0.5, 0.3, -1.1, &mono()).unwrap();
        assert_relative_eq!(c.c, 0.224381929926375, max_relative = 1e-12);
        assert_relative_eq!(c.c_hat, 0.164814971929024, max_relative = 1e-12);
    }

    #[test]
    fn family_symmetry() {
        let p = air();
        let one = riccati_coeffs(0.9, 1.0, 0.7, -0.3, &p).unwrap();
        // B(S, R) = Bhat(R, S) is a property of the formulas, which are
        // polynomial in (S, R) apart from the (R - S)^b factor.
        let b = p.b();
        assert!((general_b(1.0, 0.9, 0.7, b) - one.b_hat).abs() < 1e-14);
        assert!((general_c1(1.0, 0.9, 0.7, -0.3, b) * 0.1f64.powf(b) - one.c_hat).abs() < 1e-12);
    }

    #[test]
    fn leading_term_of_c() {
        let p = air();
        let b = p.b();
        // k' = k^2/(2b) kills the leading term
        assert!(c_sign_leading(0.9, 1.0, 1.0, 1.0 / (2.0 * b), &p).unwrap().abs() < 1e-12);
        assert_eq!(c_sign_leading(0.9, 1.0, 0.0, 0.0, &p).unwrap(), 0.0);
        let mut prev = f64::INFINITY;
        let mut errs = Vec::new();
        for xi in [1e-2, 1e-3, 1e-4] {
            let r = 1.0 + xi;
            let c = riccati_coeffs(1.0, r, 1.0, -1.0, &p).unwrap().c;
            let lead = c_sign_leading(1.0, r, 1.0, -1.0, &p).unwrap();
            let e = (c / lead - 1.0).abs();
            assert!(e < prev);
            prev = e;
            errs.push(e);
        }
        let slope = (errs[0] / errs[2]).log10() / 2.0;
        assert!((slope - 1.0).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn root_splitting() {
        let (w1, w2) = roots_of(-1.0, 0.0, 1.0).unwrap().unwrap();
        assert!((w1 + 1.0).abs() < 1e-15 && (w2 - 1.0).abs() < 1e-15);
        let (w1, w2) = roots_of(-0.006, -0.04, 18.6).unwrap().unwrap();
        assert!(w1 <= 0.0 && w2 >= 0.0);
        for w in [w1, w2] {
            assert!((-0.006 * w * w - 0.04 * w + 18.6).abs() <= 1e-9);
        }
        assert!(roots_of(-0.006, -0.04, -6.3).unwrap().is_none());
        assert!(roots_of(1.0, 0.0, 1.0).is_err());
        assert_eq!(roots_of(-1.0, 0.0, 0.0).unwrap(), Some((0.0, 0.0)));
        let c = riccati_coeffs(0.9, 1.0, 1.0, -1.0, &air()).unwrap();
        assert!(split_roots(&c, Family::First).unwrap().is_some());
    }

    #[test]
    fn separating_lines() {
        assert_eq!(separating_line(&[-1.0; 5], &[1.0; 5]).unwrap(), Some(0.0));
        let ts: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let w1: Vec<f64> = ts.iter().map(|t| -1.0 / (1.0 + t)).collect();
        let w2: Vec<f64> = ts.iter().map(|t| 1.0 / (1.0 + t)).collect();
        assert!(separating_line(&w1, &w2).unwrap().unwrap().abs() < 1e-15);
        let ts: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let w1: Vec<f64> = ts.iter().map(|t| t - 1.0).collect();
        assert!(separating_line(&w1, &vec![0.5; ts.len()]).unwrap().is_none());
        assert!(separating_line(&[], &[]).is_err());
    }

    #[test]
    fn tanh_comparison() {
        let a = |_: f64| -1.0;
        let w1 = |_: f64| -1.0;
        let w2 = |_: f64| 1.0;
        let bound = riccati_bound(&a, &w1, &w2, 0.0, (0.0, 2.0), 1e-2).unwrap();
        let path = integrate_riccati(&a, &w1, &w2, 0.0, (0.0, 2.0), 1e-3);
        for &t in &[0.5, 1.0, 2.0] {
            let w = path.iter().find(|p| (p.0 - t).abs() < 1e-9).unwrap().1;
            assert!((w - t.tanh()).abs() < 1e-10);
            assert!(w >= 0.0 && w <= bound.upper(t).unwrap());
            assert!((bound.upper(t).unwrap() - t).abs() < 1e-12);
        }
    }

    #[test]
    fn trivial_and_linear_bounds() {
        let z = |_: f64| 0.0;
        let a = |_: f64| -1.0;
        let b = riccati_bound(&a, &z, &z, 0.0, (0.0, 1.0), 0.1).unwrap();
        assert_eq!(b.upper(0.73).unwrap(), 0.0);
        let a2 = |_: f64| -2.0;
        let w2 = |_: f64| 3.0;
        let b = riccati_bound(&a2, &z, &w2, 1.0, (0.0, 1.0), 0.05).unwrap();
        let path = integrate_riccati(&a2, &z, &w2, 1.0, (0.0, 1.0), 1e-3);
        for (t, w) in path {
            let up = b.upper(t).unwrap();
            assert!((up - (1.0 + 4.5 * t)).abs() < 1e-12);
            assert!(w >= 0.0 && w <= up);
        }
    }

    #[test]
    fn bound_preconditions() {
        let a = |t: f64| t - 0.5;
        let w = |_: f64| 0.0;
        match riccati_bound(&a, &w, &w, 0.0, (0.0, 1.0), 0.1) {
            Err(Error::Precondition { at, .. }) => assert!(at >= 0.5),
            other => panic!("expected precondition error, got {:?}", other.err()),
        }
        let a = |_: f64| -1.0;
        let w1 = |t: f64| t - 0.5;
        assert!(matches!(riccati_bound(&a, &w1, &w, 0.0, (0.0, 1.0), 0.1), Err(Error::Precondition { .. })));
        assert!(riccati_bound(&a, &w, &w, -1.0, (0.0, 1.0), 0.1).is_err());
    }

    #[test]
    fn steady_residual_is_second_order() {
        let exp1 = Exp1::new(1.0, None).unwrap();
        for params in [air(), mono()] {
            for family in [Family::First, Family::Second] {
                let st = RiemannState { s: 0.9, r: 1.0 };
                let probes = [0.2, 0.4, 0.8, 1.6];
                let e: Vec<f64> = [0.04, 0.02, 0.01]
                    .iter()
                    .map(|&dt| steady_riccati_residual(&exp1, &params, 1.0, st, family, dt, &probes).unwrap())
                    .collect();
                let p1 = (e[0] / e[1]).log2();
                let p2 = (e[1] / e[2]).log2();
                assert!(p1 >= 2.0 && p2 >= 2.0, "{family:?} {e:?}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn comparison_sandwich(
            a0 in 0.1f64..3.0, a1 in 0.0f64..1.0, om in 0.1f64..5.0,
            r1 in 0.0f64..2.0, r2 in 0.0f64..2.0, ph in 0.0f64..6.0, w0 in 0.0f64..3.0,
        ) {
            let a = move |t: f64| -(a0 + a1 * (om * t).sin().abs());
            let w1 = move |t: f64| -r1 * (1.0 + 0.5 * (om * t + ph).cos());
            let w2 = move |t: f64| r2 * (1.0 + 0.5 * (om * t).sin());
            let bound = riccati_bound(&a, &w1, &w2, w0, (0.0, 3.0), 1e-2).unwrap();
            for (t, w) in integrate_riccati(&a, &w1, &w2, w0, (0.0, 3.0), 1e-3) {
                prop_assert!(w >= -1e-12);
                prop_assert!(w <= bound.upper(t).unwrap() + 1e-9);
            }
        }

        #[test]
        fn leading_coefficient_negative(s in 0.01f64..5.0, d in 1e-6f64..5.0, g in 1.01f64..2.99) {
            let p = GasParameters::new(g, 0.1).unwrap();
            let c = riccati_coeffs(s, s + d, 1.0, -1.0, &p).unwrap();
            prop_assert!(c.a < 0.0 && c.a_hat == c.a);
        }
    }
}
