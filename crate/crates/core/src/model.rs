//! Gas parameters, the eta/nu rescaling, and the primitive <-> Riemann
//! invariant transforms of the rescaled system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DuctProfile;

/// Adiabatic exponent together with the rescaled smallness parameter `nu`.
///
/// Immutable after construction; `b` is recomputed on read.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParameters {
    gamma: f64,
    nu: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 1.0 && gamma < 3.0) {
        return Err(Error::domain(format!(
            "adiabatic exponent gamma = {gamma} must lie strictly inside (1, 3)"
        )));
    }
    Ok(())
}

/// `nu = gamma / (gamma - 1) * eta^(gamma - 1)`.
pub fn nu_from_eta(eta: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::domain(format!("eta = {eta} must be positive")));
    }
    Ok(gamma / (gamma - 1.0) * eta.powf(gamma - 1.0))
}

/// Inverse of [`nu_from_eta`].
pub fn eta_from_nu(nu: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::domain(format!("nu = {nu} must be positive")));
    }
    Ok(((gamma - 1.0) / gamma * nu).powf(1.0 / (gamma - 1.0)))
}

/// Lax exponent `b = -(3 - gamma) / (2 (gamma - 1))`.
pub fn lax_exponent(gamma: f64) -> f64 {
    -(3.0 - gamma) / (2.0 * (gamma - 1.0))
}

impl GasParameters {
    pub fn new(gamma: f64, nu: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::domain(format!("nu = {nu} must be positive")));
        }
        Ok(Self { gamma, nu })
    }

    pub fn from_eta(gamma: f64, eta: f64) -> Result<Self> {
        Self::new(gamma, nu_from_eta(eta, gamma)?)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn eta(&self) -> f64 {
        ((self.gamma - 1.0) / self.gamma * self.nu).powf(1.0 / (self.gamma - 1.0))
    }

    pub fn b(&self) -> f64 {
        lax_exponent(self.gamma)
    }

    /// Same gas with a different `nu`.
    pub fn with_nu(&self, nu: f64) -> Result<Self> {
        Self::new(self.gamma, nu)
    }

    /// `2 sqrt(nu / (gamma - 1))`, the factor in front of `rho^((gamma-1)/2)`
    /// in the invariants.
    fn invariant_factor(&self) -> f64 {
        2.0 * (self.nu / (self.gamma - 1.0)).sqrt()
    }

    /// Half-width `R - S` of the invariant pair for a given density.
    pub fn invariant_gap(&self, rho: f64) -> f64 {
        2.0 * self.invariant_factor() * rho.max(0.0).powf(0.5 * (self.gamma - 1.0))
    }

    /// Sound speed `sqrt(nu (gamma - 1)) rho^((gamma-1)/2)`.
    pub fn sound_speed(&self, rho: f64) -> f64 {
        (self.nu * (self.gamma - 1.0)).sqrt() * rho.max(0.0).powf(0.5 * (self.gamma - 1.0))
    }
}

/// Rescaled density and velocity at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub v: f64,
}

/// Riemann invariant pair; `s <= r`, with equality exactly at vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannState {
    pub s: f64,
    pub r: f64,
}

impl RiemannState {
    pub fn new(s: f64, r: f64) -> Self {
        Self { s, r }
    }

    /// `xi = R/S - 1`.
    pub fn xi(&self) -> f64 {
        (self.r - self.s) / self.s
    }
}

pub fn riemann_from_primitive(state: PrimitiveState, params: &GasParameters) -> RiemannState {
    let half = 0.5 * params.invariant_gap(state.rho);
    RiemannState { s: state.v - half, r: state.v + half }
}

pub fn primitive_from_riemann(state: RiemannState, params: &GasParameters) -> Result<PrimitiveState> {
    let gap = state.r - state.s;
    if gap < 0.0 || gap.is_nan() {
        return Err(Error::domain(format!(
            "S = {} exceeds R = {} (negative density)",
            state.s, state.r
        )));
    }
    let gm1 = params.gamma - 1.0;
    let rho = (gm1 / (16.0 * params.nu)).powf(1.0 / gm1) * gap.powf(2.0 / gm1);
    Ok(PrimitiveState { rho, v: 0.5 * (state.s + state.r) })
}

/// Physical density `rho_eta` from the rescaled density.
pub fn physical_density(rho: f64, params: &GasParameters) -> f64 {
    let gm1 = params.gamma - 1.0;
    (gm1 * params.nu / params.gamma).powf(1.0 / gm1) * rho
}

/// Physical density straight from the invariant gap; independent of `nu`.
pub fn physical_density_from_invariants(state: RiemannState, gamma: f64) -> f64 {
    let gm1 = gamma - 1.0;
    (gm1 * gm1 / (16.0 * gamma)).powf(1.0 / gm1) * (state.r - state.s).max(0.0).powf(2.0 / gm1)
}

/// Characteristic speeds `(lambda1, lambda2)` written in the invariants.
pub fn eigenvalues(state: RiemannState, params: &GasParameters) -> (f64, f64) {
    let g = params.gamma;
    let l1 = 0.25 * (g + 1.0) * state.s + 0.25 * (3.0 - g) * state.r;
    let l2 = 0.25 * (3.0 - g) * state.s + 0.25 * (g + 1.0) * state.r;
    (l1, l2)
}

/// Characteristic speeds `v -+ c` written in the primitive variables.
pub fn eigenvalues_primitive(state: PrimitiveState, params: &GasParameters) -> (f64, f64) {
    let c = params.sound_speed(state.rho);
    (state.v - c, state.v + c)
}

/// Source `g = (gamma-1)/8 k (R^2 - S^2)` given `k` directly.
pub fn source_g_with_k(k: f64, state: RiemannState, params: &GasParameters) -> f64 {
    0.125 * (params.gamma - 1.0) * k * (state.r * state.r - state.s * state.s)
}

pub fn source_g(
    x: f64,
    state: RiemannState,
    profile: &dyn DuctProfile,
    params: &GasParameters,
) -> Result<f64> {
    let k = profile.eval(x)?.k;
    Ok(source_g_with_k(k, state, params))
}
