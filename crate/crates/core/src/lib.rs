//! Isentropic supersonic flow through divergent ducts near vacuum.
//!
//! The crate solves the rescaled quasi-one-dimensional Euler system
//!
//! ```text
//! rho_t + (rho v)_x              = -k(x) rho v
//! v_t   + (v^2/2 + nu rho^(g-1))_x = 0
//! ```
//!
//! with a fifth-order WENO / third-order TVD Runge-Kutta scheme, and ships
//! the Riemann-invariant analytics (generalized Lax transformation, Riccati
//! coefficients, comparison bounds) together with executable validators for
//! the hypotheses of the global existence results and run-time checks of the
//! a-priori estimates on computed fields.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characteristics;
pub mod conditions;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod interp;
pub mod io;
pub mod model;
pub mod pipeline;
pub mod registry;
pub mod riccati;
pub mod solver;

pub use error::{Error, Result};
pub use model::{GasParameters, PrimitiveState, RiemannState};
