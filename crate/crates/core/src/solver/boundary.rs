//! Ghost-node filling: Dirichlet inflow at `x_B` and a pluggable outflow
//! closure at `x_C`.

use std::fmt;
use std::sync::Arc;

use crate::conditions::BoundaryData;
use crate::error::{Error, Result};
use crate::model::{eigenvalues, primitive_from_riemann, GasParameters, PrimitiveState};
use crate::registry::Registry;

pub const GHOSTS: usize = 3;

/// Lagrange weights of the nodes `0, 1, .., m-1` evaluated at `x`.
pub fn lagrange_weights<const M: usize>(x: f64) -> [f64; M] {
    let mut w = [1.0; M];
    for (m, wm) in w.iter_mut().enumerate() {
        for q in 0..M {
            if q != m {
                *wm *= (x - q as f64) / (m as f64 - q as f64);
            }
        }
    }
    w
}

/// Fills the three outflow ghosts. `tail[j]` is the value `j` nodes in from
/// the last node; `ghosts[j]` sits `j + 1` nodes beyond it.
pub trait OutflowClosure: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    fn fill(&self, tail: [f64; 5], ghosts: &mut [f64; GHOSTS]);
}

/// Copy the last node.
#[derive(Debug, Clone, Copy)]
pub struct ZerothOrder;

impl OutflowClosure for ZerothOrder {
    fn name(&self) -> &'static str {
        "zeroth"
    }
    fn fill(&self, tail: [f64; 5], ghosts: &mut [f64; GHOSTS]) {
        ghosts.fill(tail[0]);
    }
}

/// Linear extrapolation from the last two nodes.
#[derive(Debug, Clone, Copy)]
pub struct FirstOrder;

impl OutflowClosure for FirstOrder {
    fn name(&self) -> &'static str {
        "first"
    }
    fn fill(&self, tail: [f64; 5], ghosts: &mut [f64; GHOSTS]) {
        let d = tail[0] - tail[1];
        for (j, g) in ghosts.iter_mut().enumerate() {
            *g = tail[0] + (j + 1) as f64 * d;
        }
    }
}

/// Quartic extrapolation through the last five nodes.
#[derive(Debug, Clone, Copy)]
pub struct Lagrange4;

impl OutflowClosure for Lagrange4 {
    fn name(&self) -> &'static str {
        "lagrange4"
    }
    fn fill(&self, tail: [f64; 5], ghosts: &mut [f64; GHOSTS]) {
        extrapolate(tail, ghosts);
    }
}

fn extrapolate(tail: [f64; 5], ghosts: &mut [f64; GHOSTS]) {
    for (j, g) in ghosts.iter_mut().enumerate() {
        let w = lagrange_weights::<5>(-((j + 1) as f64));
        // offsets from tail[0] keep constants exact
        *g = tail[0] + (1..5).map(|m| w[m] * (tail[m] - tail[0])).sum::<f64>();
    }
}

pub fn default_registry() -> Registry<dyn OutflowClosure> {
    Registry::new("outflow closure")
        .with("zeroth", Arc::new(ZerothOrder) as Arc<dyn OutflowClosure>)
        .with("first", Arc::new(FirstOrder))
        .with("lagrange4", Arc::new(Lagrange4))
}

/// Fill both ghost layers of an extended array `ext` (interior starts at
/// index `GHOSTS`). Inflow ghosts come from quartic extrapolation through
/// the Dirichlet node and its four neighbours.
pub fn fill_ghosts(ext: &mut [f64], outflow: &dyn OutflowClosure) {
    let n = ext.len();
    let g = GHOSTS;
    let head = [ext[g], ext[g + 1], ext[g + 2], ext[g + 3], ext[g + 4]];
    let mut left = [0.0; GHOSTS];
    extrapolate(head, &mut left);
    for j in 0..GHOSTS {
        ext[g - 1 - j] = left[j];
    }
    let last = n - g - 1;
    let tail = [ext[last], ext[last - 1], ext[last - 2], ext[last - 3], ext[last - 4]];
    let mut right = [0.0; GHOSTS];
    outflow.fill(tail, &mut right);
    ext[last + 1..].copy_from_slice(&right);
}

/// Primitive inflow state at time `t`, rejecting data that are not
/// supersonic (`lambda1 <= 0`).
pub fn inflow_state(boundary: &dyn BoundaryData, t: f64, params: &GasParameters) -> Result<PrimitiveState> {
    let st = boundary.at(t).state();
    let (l1, _) = eigenvalues(st, params);
    if !(l1 > 0.0) {
        return Err(Error::Config(format!(
            "supersonic inflow required: lambda1 = {l1} at t = {t} (S = {}, R = {})",
            st.s, st.r
        )));
    }
    primitive_from_riemann(st, params).map_err(|e| Error::Config(format!("inflow data at t = {t}: {e}")))
}
