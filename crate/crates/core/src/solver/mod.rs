//! Finite-difference solver for the rescaled duct system on a uniform
//! grid: WENO5 on Lax-Friedrichs split fluxes, TVD-RK3 in time, Dirichlet
//! inflow at `x_B` and an extrapolated outflow at `x_C`.

pub mod boundary;
pub mod rhs;
pub mod rk;
pub mod snapshot;
pub mod verify;
pub mod weno;

use std::cell::{Cell, RefCell};
use std::sync::Arc;

use crate::conditions::{BoundaryData, InitialData};
use crate::diagnostics::NormSeries;
use crate::error::{Error, Result};
use crate::geometry::DuctProfile;
use crate::model::{primitive_from_riemann, GasParameters};

pub use boundary::{inflow_state, OutflowClosure};
pub use rhs::SpatialOperator;
pub use snapshot::{FieldSnapshot, Grid};

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub gas: GasParameters,
    pub profile: Arc<dyn DuctProfile>,
    pub grid: Grid,
    /// `dt / dx`.
    pub cfl_ratio: f64,
    pub t_final: f64,
    /// Steps between recorded snapshots.
    pub snapshot_stride: usize,
    pub weno_epsilon: f64,
    /// Name in [`boundary::default_registry`].
    pub outflow: String,
}

impl SolverConfig {
    pub fn new(gas: GasParameters, profile: Arc<dyn DuctProfile>, grid: Grid) -> Self {
        Self {
            gas,
            profile,
            grid,
            cfl_ratio: 0.1,
            t_final: 10.0,
            snapshot_stride: 10,
            weno_epsilon: weno::DEFAULT_EPSILON,
            outflow: "first".into(),
        }
    }

    pub fn dt(&self) -> f64 {
        self.cfl_ratio * self.grid.dx
    }

    /// Number of steps; the last one is shortened if `dt` does not divide
    /// `t_final`.
    pub fn steps(&self) -> usize {
        let q = self.t_final / self.dt();
        let n = q.round();
        if (q - n).abs() < 1e-9 * n.max(1.0) {
            n as usize
        } else {
            q.ceil() as usize
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.cfl_ratio > 0.0) || !(self.t_final >= 0.0) || self.snapshot_stride == 0 || !(self.weno_epsilon > 0.0) {
            return Err(Error::Config(format!(
                "need cfl_ratio > 0, t_final >= 0, snapshot_stride >= 1, weno_epsilon > 0 \
                 (got {}, {}, {}, {})",
                self.cfl_ratio, self.t_final, self.snapshot_stride, self.weno_epsilon
            )));
        }
        let dom = self.profile.domain();
        let inside = |x: f64| x >= dom.x_b - 1e-12 && dom.x_c.is_none_or(|c| x <= c + 1e-12);
        if !inside(self.grid.x_b) || !inside(self.grid.x_c) {
            return Err(Error::Config(format!(
                "grid [{}, {}] leaves the profile domain",
                self.grid.x_b, self.grid.x_c
            )));
        }
        Ok(())
    }
}

/// Why and where a run stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct Abort {
    pub time: f64,
    pub x: f64,
    pub reason: String,
}

impl Abort {
    pub fn to_error(&self) -> Error {
        Error::SolverAbort { time: self.time, x: self.x, reason: self.reason.clone() }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationRecord {
    pub snapshots: Vec<Arc<FieldSnapshot>>,
    /// One row per step, starting at `t = 0`.
    pub norms: NormSeries,
    pub dt: f64,
    pub steps: usize,
    /// Interior densities floored at zero.
    pub clip_events: usize,
    /// Ghost densities floored at zero.
    pub ghost_floors: usize,
    pub abort: Option<Abort>,
}

impl SimulationRecord {
    pub fn completed(&self) -> bool {
        self.abort.is_none()
    }

    pub fn last_valid(&self) -> &FieldSnapshot {
        self.snapshots.last().expect("a record holds the initial snapshot")
    }

    pub fn snapshot_refs(&self) -> Vec<&FieldSnapshot> {
        self.snapshots.iter().map(|s| s.as_ref()).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t()).collect()
    }
}

/// Advance the initial data to `t_final`.
///
/// Configuration problems (non-supersonic inflow, inconsistent data) are
/// errors; NaN or CFL failures during the run end it early and are reported
/// in [`SimulationRecord::abort`] alongside the last valid snapshot.
pub fn run_simulation(config: &SolverConfig, initial: &dyn InitialData, boundary: &dyn BoundaryData) -> Result<SimulationRecord> {
    config.check()?;
    let params = config.gas;
    let outflow = boundary::default_registry().get(&config.outflow)?;
    let x = Arc::new(config.grid.nodes());
    let n = x.len();
    let k: Vec<f64> = x.iter().map(|&x| config.profile.k(x)).collect();
    let mut op = SpatialOperator::new(params, Arc::clone(&x), k, config.weno_epsilon, outflow)?;

    inflow_state(boundary, 0.0, &params)?;
    let mut u = vec![0.0; 2 * n];
    for (i, &xi) in x.iter().enumerate() {
        let st = initial.at(xi).state();
        let p = primitive_from_riemann(st, &params)
            .map_err(|e| Error::Config(format!("initial data at x = {xi}: {e}")))?;
        u[i] = p.rho;
        u[n + i] = p.v;
    }

    let clips = Cell::new(0usize);
    let inflow_err: RefCell<Option<Error>> = RefCell::new(None);
    let fix = |t: f64, u: &mut [f64]| {
        match inflow_state(boundary, t, &params) {
            Ok(p) => {
                u[0] = p.rho;
                u[n] = p.v;
            }
            Err(e) => {
                inflow_err.borrow_mut().get_or_insert(e);
            }
        }
        for r in u[..n].iter_mut() {
            if *r < 0.0 {
                *r = 0.0;
                clips.set(clips.get() + 1);
            }
        }
    };
    fix(0.0, &mut u);

    let snap = |t: f64, u: &[f64], clipped: usize| -> Result<FieldSnapshot> {
        Ok(FieldSnapshot::new(t, Arc::clone(&x), u[..n].to_vec(), u[n..].to_vec(), params)?.with_clip_count(clipped))
    };

    let dt = config.dt();
    let steps = config.steps();
    let first = snap(0.0, &u, clips.get())?;
    let mut norms = NormSeries::default();
    norms.push(&first);
    let mut snapshots = vec![Arc::new(first)];
    let mut abort = None;
    let mut taken = 0;
    let mut clips_recorded = clips.get();

    for step in 0..steps {
        let t = step as f64 * dt;
        let h = if step + 1 == steps { config.t_final - t } else { dt };
        let (speed, at) = max_speed(&u, &x, &params);
        if !(config.cfl_ratio * speed < 1.0) {
            abort = Some(Abort {
                time: t,
                x: at,
                reason: format!("CFL violated: max speed {speed} with dt/dx = {}", config.cfl_ratio),
            });
            break;
        }
        let next = rk::tvd_rk3_step(&u, t, h, |s, v, d| op.apply(s, v, d), fix);
        if let Some(e) = inflow_err.borrow_mut().take() {
            abort = Some(Abort { time: t, x: x[0], reason: e.to_string() });
            break;
        }
        match next {
            Ok(v) => u = v,
            Err(Error::SolverAbort { time, x, reason }) => {
                abort = Some(Abort { time, x, reason });
                break;
            }
            Err(e) => return Err(e),
        }
        if let Some(i) = u.iter().position(|v| !v.is_finite()) {
            abort = Some(Abort { time: t + h, x: x[i % n], reason: "non-finite state".into() });
            break;
        }
        taken += 1;
        let t_new = if taken == steps { config.t_final } else { taken as f64 * dt };
        let s = FieldSnapshot::new(t_new, Arc::clone(&x), u[..n].to_vec(), u[n..].to_vec(), params)?;
        norms.push(&s);
        if taken % config.snapshot_stride == 0 || taken == steps {
            // clipping since the previous record stays visible
            snapshots.push(Arc::new(s.with_clip_count(clips.get() - clips_recorded)));
            clips_recorded = clips.get();
        }
    }

    if abort.is_some() {
        let last_t = norms.last().map_or(0.0, |r| r.t);
        if snapshots.last().is_none_or(|s| s.t() < last_t) {
            snapshots.push(Arc::new(snap(last_t, &u, clips.get() - clips_recorded)?));
        }
    }

    Ok(SimulationRecord {
        snapshots,
        norms,
        dt,
        steps: taken,
        clip_events: clips.get(),
        ghost_floors: op.ghost_floors(),
        abort,
    })
}

fn max_speed(u: &[f64], x: &[f64], params: &GasParameters) -> (f64, f64) {
    let n = x.len();
    let mut best = (0.0f64, x[0]);
    for i in 0..n {
        let s = u[n + i].abs() + params.sound_speed(u[i]);
        if !(s <= best.0) {
            best = (s, x[i]);
        }
    }
    best
}
