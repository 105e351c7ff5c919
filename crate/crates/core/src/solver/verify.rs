//! Refinement studies of the scheme, shared by the unit tests and the
//! acceptance suite.

use std::f64::consts::TAU;
use std::sync::Arc;

use super::boundary::{Lagrange4, GHOSTS};
use super::rhs::SpatialOperator;
use super::weno::{candidates, weno5_reconstruct, Bias};
use super::{rk, run_simulation, SimulationRecord, SolverConfig};
use crate::conditions::{BoundaryData, InitialData};
use crate::diagnostics::fit_slope;
use crate::error::{Error, Result};
use crate::model::GasParameters;

/// Observed order from errors on grids of size `h`.
pub fn observed_order(h: &[f64], err: &[f64]) -> f64 {
    let lx: Vec<f64> = h.iter().map(|h| h.ln()).collect();
    let ly: Vec<f64> = err.iter().map(|e| e.ln()).collect();
    fit_slope(&lx, &ly)
}

/// Largest defect of the three candidates and of the full reconstruction
/// on quadratic point data, measured against the exact flux-form value
/// `p(1/2) - p''/24`.
pub fn weno_quadratic_defect(eps: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, b, c) in [(1.0, 2.0, -3.0), (0.0, 0.0, 1.0), (-2.5, 0.3, 0.7), (4.0, -1.0, 0.0)] {
        for shift in [-1.0, 0.0, 0.25, 3.0] {
            let p = |x: f64| a + b * (x + shift) + c * (x + shift) * (x + shift);
            let v = [p(-2.0), p(-1.0), p(0.0), p(1.0), p(2.0)];
            let target = p(0.5) - 2.0 * c / 24.0;
            for q in candidates(v) {
                worst = worst.max((q - target).abs());
            }
            worst = worst.max((weno5_reconstruct(v, Bias::Left, eps) - target).abs());
            let rv = [v[4], v[3], v[2], v[1], v[0]];
            let rt = p(0.5) - 2.0 * c / 24.0;
            worst = worst.max((weno5_reconstruct(rv, Bias::Right, eps) - rt).abs());
        }
    }
    worst
}

/// Interface error of WENO5 on cell averages of `sin` over `[0.3, 1.3]`.
pub fn weno_sine_error(n: usize, eps: f64) -> f64 {
    let dx = 1.0 / n as f64;
    // the function whose cell averages are sin(x)
    let scale = 0.5 * dx / (0.5 * dx).sin();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let x = 0.3 + i as f64 * dx;
        let st = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|o: f64| (x + o * dx).sin());
        let got = weno5_reconstruct(st, Bias::Left, eps);
        worst = worst.max((got - scale * (x + 0.5 * dx).sin()).abs());
    }
    worst
}

/// Max error of the spatial operator against its analytic value for
/// `rho = 2 + sin x`, `v = 3 + cos x`, `k = 0.5 + 0.1 x` on `[0, 2]` with
/// `n` cells and exact ghosts.
pub fn manufactured_error(n: usize, eps: f64) -> Result<f64> {
    let p = GasParameters::new(1.4, 1e-3)?;
    let (a, b) = (0.0, 2.0);
    let dx = (b - a) / n as f64;
    let x: Vec<f64> = (0..=n).map(|i| a + i as f64 * dx).collect();
    let k = |x: f64| 0.5 + 0.1 * x;
    let mut op = SpatialOperator::new(p, Arc::new(x.clone()), x.iter().map(|&x| k(x)).collect(), eps, Arc::new(Lagrange4))?;
    let xe: Vec<f64> = (0..n + 1 + 2 * GHOSTS).map(|j| a + (j as f64 - GHOSTS as f64) * dx).collect();
    let rho: Vec<f64> = xe.iter().map(|x| 2.0 + x.sin()).collect();
    let v: Vec<f64> = xe.iter().map(|x| 3.0 + x.cos()).collect();
    let mut du = vec![0.0; 2 * (n + 1)];
    op.apply_with_ghosts(0.0, &rho, &v, &mut du)?;
    let (g, nu) = (p.gamma(), p.nu());
    let mut err: f64 = 0.0;
    for (i, &x) in x.iter().enumerate() {
        let (r, rx) = (2.0 + x.sin(), x.cos());
        let (v, vx) = (3.0 + x.cos(), -x.sin());
        let e0 = -(rx * v + r * vx) - k(x) * r * v;
        let e1 = -(v * vx + nu * (g - 1.0) * r.powf(g - 2.0) * rx);
        err = err.max((du[i] - e0).abs()).max((du[n + 1 + i] - e1).abs());
    }
    Ok(err)
}

/// Periodic `u_t + u_x = 0` on `[0, 1)` to `t = 1/2` with WENO5 fluxes and
/// TVD-RK3 at `dt = dx/2`; max nodal error.
pub fn advection_error(n: usize, eps: f64) -> Result<f64> {
    let dx = 1.0 / n as f64;
    let dt = 0.5 * dx;
    let steps = (0.5 / dt).round() as usize;
    let mut u: Vec<f64> = (0..n).map(|i| (TAU * i as f64 * dx).sin()).collect();
    let op = |_: f64, u: &[f64], du: &mut [f64]| -> Result<()> {
        let at = |j: isize| u[j.rem_euclid(n as isize) as usize];
        let flux: Vec<f64> = (0..n as isize)
            .map(|i| weno5_reconstruct([at(i - 2), at(i - 1), at(i), at(i + 1), at(i + 2)], Bias::Left, eps))
            .collect();
        for i in 0..n {
            du[i] = -(flux[i] - flux[(i + n - 1) % n]) / dx;
        }
        Ok(())
    };
    for s in 0..steps {
        u = rk::tvd_rk3_step(&u, s as f64 * dt, dt, op, |_, _| {})?;
    }
    let t = steps as f64 * dt;
    Ok((0..n).map(|i| (u[i] - (TAU * (i as f64 * dx - t)).sin()).abs()).fold(0.0, f64::max))
}

/// Triple-grid self-convergence of a run at its final time.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfConvergence {
    pub dx: [f64; 3],
    /// Max nodal difference coarse/medium and medium/fine over `rho`, `v`.
    pub diff: [f64; 2],
    /// Where each difference is largest.
    pub at: [f64; 2],
    pub order: f64,
}

/// Run `make(dx)` on three grids halving `dx` and compare on the coarse
/// nodes.
pub fn self_convergence(
    make: impl Fn(f64) -> Result<SolverConfig>,
    initial: &dyn InitialData,
    boundary: &dyn BoundaryData,
    dx_coarse: f64,
) -> Result<SelfConvergence> {
    let dx = [dx_coarse, 0.5 * dx_coarse, 0.25 * dx_coarse];
    let mut runs: Vec<SimulationRecord> = Vec::new();
    for &h in &dx {
        let rec = run_simulation(&make(h)?, initial, boundary)?;
        if let Some(a) = &rec.abort {
            return Err(a.to_error());
        }
        runs.push(rec);
    }
    let (a, b, c) = (runs[0].last_valid(), runs[1].last_valid(), runs[2].last_valid());
    if b.len() != 2 * a.len() - 1 || c.len() != 2 * b.len() - 1 {
        return Err(Error::Usage("self-convergence grids must nest".into()));
    }
    let mut diff = [0.0f64; 2];
    let mut at = [a.x()[0]; 2];
    for i in 0..a.len() {
        let d1 = (a.rho()[i] - b.rho()[2 * i]).abs().max((a.v()[i] - b.v()[2 * i]).abs());
        let d2 = (b.rho()[2 * i] - c.rho()[4 * i]).abs().max((b.v()[2 * i] - c.v()[4 * i]).abs());
        if d1 > diff[0] {
            diff[0] = d1;
            at[0] = a.x()[i];
        }
        if d2 > diff[1] {
            diff[1] = d2;
            at[1] = a.x()[i];
        }
    }
    Ok(SelfConvergence { dx, diff, at, order: (diff[0] / diff[1]).log2() })
}
