//! Method-of-lines operator: WENO5 flux difference on globally
//! Lax-Friedrichs split fluxes plus the duct source.

use std::sync::Arc;

use super::boundary::{fill_ghosts, OutflowClosure, GHOSTS};
use super::weno::{weno5_reconstruct, Bias};
use crate::error::{Error, Result};
use crate::model::GasParameters;

/// Spatial operator on a fixed node set. State vectors are laid out as
/// `[rho_0..rho_n, v_0..v_n]`.
#[derive(Debug)]
pub struct SpatialOperator {
    params: GasParameters,
    x: Arc<Vec<f64>>,
    k: Vec<f64>,
    dx: f64,
    eps: f64,
    outflow: Arc<dyn OutflowClosure>,
    rho: Vec<f64>,
    v: Vec<f64>,
    fp: [Vec<f64>; 2],
    fm: [Vec<f64>; 2],
    flux: [Vec<f64>; 2],
    ghost_floors: usize,
}

impl SpatialOperator {
    pub fn new(
        params: GasParameters,
        x: Arc<Vec<f64>>,
        k: Vec<f64>,
        eps: f64,
        outflow: Arc<dyn OutflowClosure>,
    ) -> Result<Self> {
        let n = x.len();
        if n < 5 || k.len() != n {
            return Err(Error::Usage(format!("operator needs >= 5 nodes and one k per node (nodes {n}, k {})", k.len())));
        }
        let dx = (x[n - 1] - x[0]) / (n - 1) as f64;
        let m = n + 2 * GHOSTS;
        let z = || vec![0.0; m];
        Ok(Self {
            params,
            x,
            k,
            dx,
            eps,
            outflow,
            rho: z(),
            v: z(),
            fp: [z(), z()],
            fm: [z(), z()],
            flux: [vec![0.0; n + 1], vec![0.0; n + 1]],
            ghost_floors: 0,
        })
    }

    pub fn nodes(&self) -> usize {
        self.x.len()
    }

    /// Ghost densities raised to zero so far.
    pub fn ghost_floors(&self) -> usize {
        self.ghost_floors
    }

    /// `du = L(u)` at every node, ghosts filled by extrapolation.
    pub fn apply(&mut self, t: f64, u: &[f64], du: &mut [f64]) -> Result<()> {
        let n = self.nodes();
        self.rho[GHOSTS..GHOSTS + n].copy_from_slice(&u[..n]);
        self.v[GHOSTS..GHOSTS + n].copy_from_slice(&u[n..2 * n]);
        fill_ghosts(&mut self.rho, self.outflow.as_ref());
        fill_ghosts(&mut self.v, self.outflow.as_ref());
        for j in (0..GHOSTS).chain(GHOSTS + n..n + 2 * GHOSTS) {
            if self.rho[j] < 0.0 {
                self.rho[j] = 0.0;
                self.ghost_floors += 1;
            }
        }
        self.apply_extended(t, du)
    }

    /// `du = L(u)` with caller-supplied ghosts: `rho`, `v` carry `GHOSTS`
    /// extra values on each side.
    pub fn apply_with_ghosts(&mut self, t: f64, rho: &[f64], v: &[f64], du: &mut [f64]) -> Result<()> {
        let m = self.nodes() + 2 * GHOSTS;
        if rho.len() != m || v.len() != m {
            return Err(Error::Usage(format!("extended arrays must hold {m} values")));
        }
        self.rho.copy_from_slice(rho);
        self.v.copy_from_slice(v);
        self.apply_extended(t, du)
    }

    fn apply_extended(&mut self, t: f64, du: &mut [f64]) -> Result<()> {
        let n = self.nodes();
        let m = n + 2 * GHOSTS;
        let nu = self.params.nu();
        let gm1 = self.params.gamma() - 1.0;

        let mut alpha: f64 = 0.0;
        for j in 0..m {
            let (r, v) = (self.rho[j], self.v[j]);
            alpha = alpha.max(v.abs() + self.params.sound_speed(r));
        }
        for j in 0..m {
            let (r, v) = (self.rho[j], self.v[j]);
            let f = [r * v, 0.5 * v * v + nu * r.powf(gm1)];
            let u = [r, v];
            for c in 0..2 {
                self.fp[c][j] = 0.5 * (f[c] + alpha * u[c]);
                self.fm[c][j] = 0.5 * (f[c] - alpha * u[c]);
            }
        }

        // flux[c][i] sits at node i - 1/2, i = 0..=n
        for c in 0..2 {
            let (fp, fm) = (&self.fp[c], &self.fm[c]);
            for i in 0..=n {
                // extended index of the node left of the interface
                let e = i + GHOSTS - 1;
                let pl = [fp[e - 2], fp[e - 1], fp[e], fp[e + 1], fp[e + 2]];
                let mr = [fm[e - 1], fm[e], fm[e + 1], fm[e + 2], fm[e + 3]];
                self.flux[c][i] = weno5_reconstruct(pl, Bias::Left, self.eps) + weno5_reconstruct(mr, Bias::Right, self.eps);
            }
        }

        let inv_dx = 1.0 / self.dx;
        for i in 0..n {
            let (r, v) = (self.rho[i + GHOSTS], self.v[i + GHOSTS]);
            let d0 = -(self.flux[0][i + 1] - self.flux[0][i]) * inv_dx - self.k[i] * r * v;
            let d1 = -(self.flux[1][i + 1] - self.flux[1][i]) * inv_dx;
            if !d0.is_finite() || !d1.is_finite() {
                return Err(Error::SolverAbort {
                    time: t,
                    x: self.x[i],
                    reason: format!("non-finite right-hand side (rho = {r}, v = {v})"),
                });
            }
            du[i] = d0;
            du[n + i] = d1;
        }
        Ok(())
    }
}
