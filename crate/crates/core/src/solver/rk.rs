//! Third-order TVD Runge-Kutta in Shu-Osher form.

use crate::error::Result;

/// Stage times of one step, relative to `t`: `0`, `dt`, `dt/2`, and the
/// step ends at `t + dt`.
pub fn stage_times(t: f64, dt: f64) -> [f64; 3] {
    [t, t + dt, t + 0.5 * dt]
}

/// One TVD-RK3 step of `u' = L(t, u)`.
///
/// `fix(t, u)` runs after each stage with the time the stage represents;
/// the solver uses it to impose Dirichlet values and floor the density.
pub fn tvd_rk3_step<L, F>(u: &[f64], t: f64, dt: f64, mut op: L, mut fix: F) -> Result<Vec<f64>>
where
    L: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    F: FnMut(f64, &mut [f64]),
{
    let n = u.len();
    let [t0, t1, t2] = stage_times(t, dt);
    let mut l = vec![0.0; n];

    op(t0, u, &mut l)?;
    let mut u1: Vec<f64> = u.iter().zip(&l).map(|(a, b)| a + dt * b).collect();
    fix(t1, &mut u1);

    op(t1, &u1, &mut l)?;
    let mut u2: Vec<f64> = (0..n).map(|i| 0.75 * u[i] + 0.25 * (u1[i] + dt * l[i])).collect();
    fix(t2, &mut u2);

    op(t2, &u2, &mut l)?;
    let mut next: Vec<f64> = (0..n).map(|i| u[i] / 3.0 + 2.0 / 3.0 * (u2[i] + dt * l[i])).collect();
    fix(t + dt, &mut next);
    Ok(next)
}
