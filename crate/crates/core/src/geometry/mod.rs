//! Duct cross-sections `a(x)`, their logarithmic derivative `k = a'/a`, and
//! the shape conditions imposed on `k`.

pub mod presets;
pub mod table;

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::registry::Registry;

pub use presets::{Exp1, Exp2, Spherical};
pub use table::{FiniteDifferenceProfile, TableProfile};

/// `[x_b, x_c]`, or the half-line `[x_b, inf)` when `x_c` is `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub x_b: f64,
    pub x_c: Option<f64>,
}

impl Domain {
    pub fn new(x_b: f64, x_c: Option<f64>) -> Result<Self> {
        if !x_b.is_finite() {
            return Err(Error::domain("x_B must be finite"));
        }
        if let Some(c) = x_c {
            if !(c > x_b) || !c.is_finite() {
                return Err(Error::domain(format!("empty domain [{x_b}, {c}]")));
            }
        }
        Ok(Self { x_b, x_c })
    }

    pub fn is_bounded(&self) -> bool {
        self.x_c.is_some()
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-12 * (1.0 + x.abs());
        x >= self.x_b - slack && self.x_c.is_none_or(|c| x <= c + slack)
    }

    /// `n + 1` evenly spaced points; for a half-line the grid stops at
    /// `x_b + span`.
    pub fn uniform_grid(&self, n: usize, span: f64) -> Vec<f64> {
        let end = self.x_c.unwrap_or(self.x_b + span);
        let n = n.max(1);
        (0..=n).map(|i| self.x_b + (end - self.x_b) * i as f64 / n as f64).collect()
    }
}

/// Area, its derivative, `k = a'/a` and `k'` at one position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub a: f64,
    pub da: f64,
    pub k: f64,
    pub dk: f64,
}

pub trait DuctProfile: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn domain(&self) -> Domain;

    /// Evaluate without the domain check.
    fn sample(&self, x: f64) -> ProfileSample;

    fn eval(&self, x: f64) -> Result<ProfileSample> {
        if !self.domain().contains(x) {
            let d = self.domain();
            return Err(Error::domain(format!(
                "x = {x} outside profile domain [{}, {}]",
                d.x_b,
                d.x_c.map_or("inf".to_string(), |c| c.to_string())
            )));
        }
        Ok(self.sample(x))
    }

    fn k(&self, x: f64) -> f64 {
        self.sample(x).k
    }

    /// `Some(N)` for the N-dimensional spherically symmetric duct.
    fn spherical_dimension(&self) -> Option<u32> {
        None
    }
}

/// Straight duct, `k = 0`.
#[derive(Debug, Clone)]
pub struct Uniform {
    domain: Domain,
}

impl Uniform {
    pub fn new(x_b: f64, x_c: Option<f64>) -> Result<Self> {
        Ok(Self { domain: Domain::new(x_b, x_c)? })
    }
}

impl DuctProfile for Uniform {
    fn name(&self) -> String {
        "uniform".into()
    }
    fn domain(&self) -> Domain {
        self.domain
    }
    fn sample(&self, _x: f64) -> ProfileSample {
        ProfileSample { a: 1.0, da: 0.0, k: 0.0, dk: 0.0 }
    }
}

pub fn eval_profile(profile: &dyn DuctProfile, x: f64) -> Result<ProfileSample> {
    profile.eval(x)
}

/// What a profile factory needs to build an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSpec {
    pub kind: String,
    pub x_b: f64,
    pub x_c: Option<f64>,
    pub n: Option<u32>,
    pub table: Option<PathBuf>,
}

pub type ProfileFactory = dyn Fn(&ProfileSpec) -> Result<Arc<dyn DuctProfile>> + Send + Sync;

/// Built-in profiles: `exp1`, `exp2`, `spherical`, `uniform`, `table`.
pub fn default_registry() -> Registry<ProfileFactory> {
    let mut reg: Registry<ProfileFactory> = Registry::new("duct profile");
    reg.register("exp1", Arc::new(|s: &ProfileSpec| Ok(Arc::new(Exp1::new(s.x_b, s.x_c)?) as Arc<dyn DuctProfile>)));
    reg.register("exp2", Arc::new(|s: &ProfileSpec| Ok(Arc::new(Exp2::new(s.x_b, s.x_c)?) as Arc<dyn DuctProfile>)));
    reg.register(
        "spherical",
        Arc::new(|s: &ProfileSpec| {
            let n = s.n.ok_or_else(|| Error::Config("spherical profile needs `n`".into()))?;
            Ok(Arc::new(Spherical::new(n, s.x_b, s.x_c)?) as Arc<dyn DuctProfile>)
        }),
    );
    reg.register("uniform", Arc::new(|s: &ProfileSpec| Ok(Arc::new(Uniform::new(s.x_b, s.x_c)?) as Arc<dyn DuctProfile>)));
    reg.register(
        "table",
        Arc::new(|s: &ProfileSpec| {
            let path = s.table.as_ref().ok_or_else(|| Error::Config("table profile needs `table`".into()))?;
            let t = TableProfile::from_file(path)?;
            let d = t.domain();
            if !d.contains(s.x_b) || s.x_c.is_none_or(|c| !d.contains(c)) {
                return Err(Error::Config(format!(
                    "profile table {} does not cover [{}, {:?}]",
                    path.display(),
                    s.x_b,
                    s.x_c
                )));
            }
            Ok(Arc::new(t) as Arc<dyn DuctProfile>)
        }),
    );
    reg
}

/// Result of a pointwise inequality scan.
#[derive(Debug, Clone, PartialEq)]
pub enum K1Verdict {
    /// Smallest `rhs - lhs` seen and where.
    Pass { worst_margin: f64, at: f64 },
    /// First violating point with both sides of `k' <= k^2 / ((2 - delta) b)`.
    Fail { x: f64, lhs: f64, rhs: f64 },
}

impl K1Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, K1Verdict::Pass { .. })
    }
}

fn k1_margin(profile: &dyn DuctProfile, delta: f64, b: f64, x: f64) -> (f64, f64) {
    let s = profile.sample(x);
    (s.dk, s.k * s.k / ((2.0 - delta) * b))
}

/// Shape condition `k'(x) <= k(x)^2 / ((2 - delta) b)` sampled on `grid`,
/// refined around the worst sample.
pub fn check_k1(profile: &dyn DuctProfile, delta: f64, grid: &[f64], b: f64) -> Result<K1Verdict> {
    if grid.is_empty() {
        return Err(Error::Usage("k1 check needs a nonempty grid".into()));
    }
    if !(delta > 0.0 && delta < 2.0) {
        return Err(Error::domain(format!("delta = {delta} must lie in (0, 2)")));
    }
    if !(b < 0.0) {
        return Err(Error::domain(format!("b = {b} must be negative")));
    }
    let mut worst = (f64::INFINITY, grid[0], 0usize);
    for (i, &x) in grid.iter().enumerate() {
        let (lhs, rhs) = k1_margin(profile, delta, b, x);
        if !(lhs <= rhs) {
            return Ok(K1Verdict::Fail { x, lhs, rhs });
        }
        if rhs - lhs < worst.0 {
            worst = (rhs - lhs, x, i);
        }
    }
    // refine on the neighbouring intervals of the worst sample
    let (mut lo, mut hi) = (
        grid[worst.2.saturating_sub(1)],
        grid[(worst.2 + 1).min(grid.len() - 1)],
    );
    for _ in 0..4 {
        if hi <= lo {
            break;
        }
        let mut best = worst;
        for j in 0..=32 {
            let x = lo + (hi - lo) * j as f64 / 32.0;
            let (lhs, rhs) = k1_margin(profile, delta, b, x);
            if !(lhs <= rhs) {
                return Ok(K1Verdict::Fail { x, lhs, rhs });
            }
            if rhs - lhs < best.0 {
                best = (rhs - lhs, x, 0);
            }
        }
        worst = best;
        let w = (hi - lo) / 32.0;
        lo = (worst.1 - w).max(lo);
        hi = (worst.1 + w).min(hi);
    }
    Ok(K1Verdict::Pass { worst_margin: worst.0, at: worst.1 })
}

/// Every delta on an even grid in (0, 2) for which [`check_k1`] passes.
pub fn search_k1_delta(profile: &dyn DuctProfile, grid: &[f64], b: f64, steps: usize) -> Result<Vec<f64>> {
    let mut ok = Vec::new();
    for j in 1..steps {
        let delta = 2.0 * j as f64 / steps as f64;
        if check_k1(profile, delta, grid, b)?.passed() {
            ok.push(delta);
        }
    }
    Ok(ok)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrabilityVerdict {
    /// False on bounded domains, where the check is vacuous.
    pub applicable: bool,
    pub pass: bool,
    pub integral: Option<f64>,
    pub tail_k: f64,
}

/// Decay of `k` at infinity and finiteness of `int k = ln(a(inf)/a(x_b))`.
pub fn check_k_integrability(profile: &dyn DuctProfile) -> IntegrabilityVerdict {
    const TOL: f64 = 1e-6;
    let d = profile.domain();
    if d.is_bounded() {
        return IntegrabilityVerdict { applicable: false, pass: true, integral: None, tail_k: f64::NAN };
    }
    let a_b = profile.sample(d.x_b).a;
    let integral_to = |x: f64| (profile.sample(x).a / a_b).ln();
    let far = d.x_b.abs().max(1.0) * 1e9;
    let near = d.x_b.abs().max(1.0) * 1e7;
    let tail_k = profile.sample(far).k;
    let (i_near, i_far) = (integral_to(near), integral_to(far));
    let converged = i_far.is_finite() && i_near.is_finite() && (i_far - i_near).abs() <= TOL;
    let pass = tail_k.is_finite() && tail_k.abs() <= TOL && converged;
    IntegrabilityVerdict {
        applicable: true,
        pass,
        integral: if i_far.is_finite() { Some(i_far) } else { None },
        tail_k,
    }
}

/// `(sup |k|, sup |k'|)` over the grid.
pub fn c1_norm(profile: &dyn DuctProfile, grid: &[f64]) -> (f64, f64) {
    grid.iter().fold((0.0_f64, 0.0_f64), |(mk, mdk), &x| {
        let s = profile.sample(x);
        (mk.max(s.k.abs()), mdk.max(s.dk.abs()))
    })
}

/// First grid point where the duct is not divergent (`a <= 0` or `a' < 0`).
pub fn divergence_witness(profile: &dyn DuctProfile, grid: &[f64]) -> Option<f64> {
    grid.iter().copied().find(|&x| {
        let s = profile.sample(x);
        !(s.a > 0.0 && s.da >= 0.0 && s.k.is_finite() && s.dk.is_finite())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }

    #[test]
    fn presets_satisfy_k1() {
        let g = grid(1.0, 10.0, 900);
        // k'/k^2 = -(4x-1) for exp1 and -2x for exp2, both <= -1/2 on [1, 10]
        for x in &g {
            let s = Exp1::new(1.0, Some(10.0)).unwrap().sample(*x);
            assert!((s.dk / (s.k * s.k) + (4.0 * x - 1.0)).abs() < 1e-9);
            let s = Exp2::new(1.0, Some(10.0)).unwrap().sample(*x);
            assert!((s.dk / (s.k * s.k) + 2.0 * x).abs() < 1e-9);
        }
        let e1 = Exp1::new(1.0, Some(10.0)).unwrap();
        let e2 = Exp2::new(1.0, Some(10.0)).unwrap();
        assert!(check_k1(&e1, 1.0, &g, -2.0).unwrap().passed());
        assert!(check_k1(&e2, 1.0, &g, -2.0).unwrap().passed());
    }

    #[test]
    fn increasing_k_fails_k1_at_left_end() {
        // a = exp(x^2/2) has k = x, k' = 1
        let p = FiniteDifferenceProfile::new(
            "linear-k",
            Domain::new(1.0, Some(10.0)).unwrap(),
            Arc::new(|x: f64| (0.5 * x * x).exp()),
        );
        match check_k1(&p, 1.0, &grid(1.0, 10.0, 90), -2.0).unwrap() {
            K1Verdict::Fail { x, lhs, rhs } => {
                assert_eq!(x, 1.0);
                assert!((lhs - 1.0).abs() < 1e-4);
                assert!((rhs + 0.5).abs() < 1e-6);
            }
            v => panic!("expected failure, got {v:?}"),
        }
    }

    #[test]
    fn k1_usage_errors() {
        let e1 = Exp1::new(1.0, Some(10.0)).unwrap();
        assert!(matches!(check_k1(&e1, 1.0, &[], -2.0), Err(Error::Usage(_))));
        assert!(check_k1(&e1, 2.0, &[1.0], -2.0).is_err());
        assert!(check_k1(&e1, 1.0, &[1.0], 0.5).is_err());
    }

    #[test]
    fn delta_search_reports_passing_deltas() {
        let g = grid(1.0, 10.0, 200);
        let sph = Spherical::new(2, 1.0, Some(10.0)).unwrap();
        // k'/k^2 = -1/(N-1) = -1, need -1 <= 1/((2-delta) b) = -1/(2(2-delta)), i.e. delta <= 1.5
        let ok = search_k1_delta(&sph, &g, -2.0, 20).unwrap();
        assert!(!ok.is_empty());
        assert!(ok.iter().all(|&d| d <= 1.5 + 1e-12));
        assert!(ok.contains(&1.4));
        let sph3 = Spherical::new(3, 1.0, Some(10.0)).unwrap();
        let ok3 = search_k1_delta(&sph3, &g, -2.0, 20).unwrap();
        // N = 3: (2 - delta) |b| >= N - 1 gives delta <= 1
        assert!(ok3.contains(&0.9));
        assert!(ok3.iter().all(|&d| d <= 1.0 + 1e-12));
        // N = 5 sits exactly on gamma = 1 + 2/N for b = -2: no delta works
        let sph5 = Spherical::new(5, 1.0, Some(10.0)).unwrap();
        assert!(search_k1_delta(&sph5, &g, -2.0, 20).unwrap().is_empty());
    }

    #[test]
    fn integrability() {
        let e1 = Exp1::new(1.0, None).unwrap();
        let v = check_k_integrability(&e1);
        assert!(v.applicable && v.pass);
        assert!((v.integral.unwrap() - 2f64.ln()).abs() < 1e-6);
        let e2 = Exp2::new(1.0, None).unwrap();
        let v = check_k_integrability(&e2);
        assert!(v.pass);
        assert!((v.integral.unwrap() - 1.0).abs() < 1e-6);
        let expo = FiniteDifferenceProfile::new("k=1", Domain::new(1.0, None).unwrap(), Arc::new(|x: f64| x.exp()));
        assert!(!check_k_integrability(&expo).pass);
        let bounded = Exp1::new(1.0, Some(10.0)).unwrap();
        let v = check_k_integrability(&bounded);
        assert!(!v.applicable && v.pass);
    }

    #[test]
    fn registry_builds_presets() {
        let reg = default_registry();
        let spec = ProfileSpec { kind: "exp2".into(), x_b: 1.0, x_c: Some(10.0), n: None, table: None };
        let p = reg.get("exp2").unwrap()(&spec).unwrap();
        assert_eq!(p.name(), "exp2");
        let spec = ProfileSpec { kind: "spherical".into(), n: None, ..spec };
        assert!(reg.get("spherical").unwrap()(&spec).is_err());
        assert!(reg.get("cone").is_err());
    }

    #[test]
    fn c1_norm_and_divergence() {
        let e1 = Exp1::new(1.0, Some(10.0)).unwrap();
        let (k, dk) = c1_norm(&e1, &grid(1.0, 10.0, 90));
        assert!((k - 1.0).abs() < 1e-14 && (dk - 3.0).abs() < 1e-14);
        assert_eq!(divergence_witness(&e1, &grid(1.0, 10.0, 90)), None);
        let shrinking = FiniteDifferenceProfile::new("conv", Domain::new(1.0, Some(2.0)).unwrap(), Arc::new(|x: f64| 1.0 / x));
        assert_eq!(divergence_witness(&shrinking, &[1.0, 1.5]), Some(1.0));
    }
}
