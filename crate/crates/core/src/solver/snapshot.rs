use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{riemann_from_primitive, GasParameters, PrimitiveState, RiemannState};

/// Uniform node set `x_i = x_B + i dx`, `i = 0..=n_cells`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_b: f64,
    pub x_c: f64,
    pub n_cells: usize,
    pub dx: f64,
}

impl Grid {
    pub const GHOST_WIDTH: usize = super::boundary::GHOSTS;

    pub fn new(x_b: f64, x_c: f64, n_cells: usize) -> Result<Self> {
        if !(x_c > x_b) || !x_b.is_finite() || !x_c.is_finite() {
            return Err(Error::Config(format!("grid needs x_B < x_C, got [{x_b}, {x_c}]")));
        }
        // the inflow extrapolation reads five nodes
        if n_cells < 5 {
            return Err(Error::Config(format!("grid needs at least 5 cells, got {n_cells}")));
        }
        Ok(Self { x_b, x_c, n_cells, dx: (x_c - x_b) / n_cells as f64 })
    }

    /// Grid with spacing `dx`, which must divide the interval evenly.
    pub fn with_spacing(x_b: f64, x_c: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(Error::Config(format!("grid spacing dx = {dx} must be positive")));
        }
        let cells = (x_c - x_b) / dx;
        let n = cells.round();
        if (cells - n).abs() > 1e-6 * n.max(1.0) {
            return Err(Error::Config(format!("dx = {dx} does not divide [{x_b}, {x_c}] evenly")));
        }
        Self::new(x_b, x_c, n as usize)
    }

    pub fn len(&self) -> usize {
        self.n_cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.n_cells {
            self.x_c
        } else {
            self.x_b + i as f64 * self.dx
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }
}

/// Solution at one time level. Fields are read-only once built.
#[derive(Debug, Clone)]
pub struct FieldSnapshot {
    t: f64,
    x: Arc<Vec<f64>>,
    rho: Vec<f64>,
    v: Vec<f64>,
    params: GasParameters,
    clipped: usize,
}

impl FieldSnapshot {
    /// Negative densities are clipped to zero and counted.
    pub fn new(t: f64, x: Arc<Vec<f64>>, mut rho: Vec<f64>, v: Vec<f64>, params: GasParameters) -> Result<Self> {
        if rho.len() != x.len() || v.len() != x.len() {
            return Err(Error::Usage(format!(
                "snapshot arrays do not conform: x {}, rho {}, v {}",
                x.len(),
                rho.len(),
                v.len()
            )));
        }
        let mut clipped = 0;
        for r in rho.iter_mut() {
            if *r < 0.0 {
                *r = 0.0;
                clipped += 1;
            }
        }
        Ok(Self { t, x, rho, v, params, clipped })
    }

    pub(crate) fn with_clip_count(mut self, clipped: usize) -> Self {
        self.clipped += clipped;
        self
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn x_shared(&self) -> Arc<Vec<f64>> {
        Arc::clone(&self.x)
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn params(&self) -> &GasParameters {
        &self.params
    }

    /// Number of density values clipped at zero on the way to this snapshot.
    pub fn clipped(&self) -> usize {
        self.clipped
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn riemann(&self, i: usize) -> RiemannState {
        riemann_from_primitive(PrimitiveState { rho: self.rho[i], v: self.v[i] }, &self.params)
    }

    pub fn invariants(&self) -> Vec<RiemannState> {
        (0..self.len()).map(|i| self.riemann(i)).collect()
    }

    pub fn s(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.riemann(i).s).collect()
    }

    pub fn r(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.riemann(i).r).collect()
    }

    pub fn xi(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.riemann(i).xi()).collect()
    }

    pub fn dx(&self) -> f64 {
        if self.x.len() < 2 {
            0.0
        } else {
            self.x[1] - self.x[0]
        }
    }
}
