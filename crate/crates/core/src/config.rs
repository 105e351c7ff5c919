//! Run configuration: a TOML document with one table per concern, plus the
//! two experiment presets.
//!
//! ```toml
//! [gas]
//! gamma = 1.4
//! nu = 0.1            # or eta = ...
//!
//! [profile]
//! kind = "exp1"       # exp1 | exp2 | spherical | uniform | table
//! x_b = 1.0
//! x_c = 10.0
//!
//! [grid]
//! dx = 0.01           # or n_cells = 900
//!
//! [solver]
//! cfl_ratio = 0.1
//! t_final = 10.0
//! snapshot_stride = 10
//!
//! [data]
//! kind = "exp-data"   # exp-data | table | constant
//!
//! [sweep]
//! nu = [0.1, 0.001, 1e-5]
//! ```
//!
//! Unknown keys are rejected. Relative table paths resolve against the
//! directory of the configuration file.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::conditions::{self, DataPair, DataSpec, ValidationSettings};
use crate::error::{Error, Result};
use crate::geometry::{self, DuctProfile, ProfileSpec};
use crate::model::{nu_from_eta, GasParameters};
use crate::registry::Registry;
use crate::solver::{Grid, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasSection {
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    pub kind: String,
    pub x_b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_c: Option<f64>,
    /// Space dimension of a spherical duct.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_cells: Option<usize>,
}

fn default_cfl() -> f64 {
    0.1
}
fn default_t_final() -> f64 {
    10.0
}
fn default_stride() -> usize {
    10
}
fn default_eps() -> f64 {
    crate::solver::weno::DEFAULT_EPSILON
}
fn default_outflow() -> String {
    "first".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_cfl")]
    pub cfl_ratio: f64,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    #[serde(default = "default_eps")]
    pub weno_epsilon: f64,
    #[serde(default = "default_outflow")]
    pub outflow: String,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            cfl_ratio: default_cfl(),
            t_final: default_t_final(),
            snapshot_stride: default_stride(),
            weno_epsilon: default_eps(),
            outflow: default_outflow(),
        }
    }
}

fn default_true() -> bool {
    true
}
fn default_probes() -> Vec<f64> {
    vec![1.0, 2.0, 5.0]
}
fn default_claim_tol() -> f64 {
    1e-6
}
fn default_strict_tol() -> f64 {
    1e-8
}
fn default_traces() -> usize {
    10
}
fn default_interp() -> String {
    "monotone-cubic".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    /// Run the claim checks after each simulation.
    #[serde(default = "default_true")]
    pub claims: bool,
    /// Trace characteristics through each run.
    #[serde(default = "default_true")]
    pub traces: bool,
    #[serde(default = "default_probes")]
    pub probes: Vec<f64>,
    /// Tolerance of the slope, decay and monotonicity claims.
    #[serde(default = "default_claim_tol")]
    pub tol: f64,
    /// Tolerance of the maximum principle and the `xi` bound.
    #[serde(default = "default_strict_tol")]
    pub bound_tol: f64,
    /// Traces per family.
    #[serde(default = "default_traces")]
    pub trace_count: usize,
    #[serde(default = "default_interp")]
    pub interpolation: String,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self {
            claims: true,
            traces: true,
            probes: default_probes(),
            tol: default_claim_tol(),
            bound_tol: default_strict_tol(),
            trace_count: default_traces(),
            interpolation: default_interp(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compat_tol: Option<f64>,
    /// Constant of the smallness condition `xi <= c_xi sqrt(nu)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_xi: Option<f64>,
    /// Light speed for the spherical case.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_light: Option<f64>,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_every() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_out")]
    pub dir: PathBuf,
    /// Write every n-th recorded snapshot as CSV.
    #[serde(default = "default_every")]
    pub snapshot_every: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: default_out(), snapshot_every: default_every() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nu: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub gas: GasSection,
    pub profile: ProfileSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverSection,
    pub data: DataSpec,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub validation: ValidationSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

impl RunConfig {
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Parse { path: origin.to_path_buf(), msg: e.to_string() })?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Read a file; relative table paths become relative to its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse { path: path.to_path_buf(), msg: e.to_string() })?;
        let mut cfg = Self::from_toml(&text, path)?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(q) = p {
                if q.is_relative() {
                    *q = dir.join(&q);
                }
            }
        };
        fix(&mut self.profile.table);
        fix(&mut self.data.initial_table);
        fix(&mut self.data.boundary_table);
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes")
    }

    fn check(&self) -> Result<()> {
        match (self.gas.nu, self.gas.eta) {
            (Some(_), Some(_)) => return Err(Error::Config("give either gas.nu or gas.eta, not both".into())),
            (None, None) if self.sweep.nu.is_empty() => {
                return Err(Error::Config("gas.nu (or gas.eta, or a sweep.nu list) is required".into()))
            }
            _ => {}
        }
        if let (Some(_), Some(_)) = (self.grid.dx, self.grid.n_cells) {
            return Err(Error::Config("give either grid.dx or grid.n_cells, not both".into()));
        }
        if self.output.snapshot_every == 0 {
            return Err(Error::Config("output.snapshot_every must be >= 1".into()));
        }
        Ok(())
    }

    /// `nu` values to run: the sweep list, or the single gas value.
    pub fn nu_values(&self) -> Result<Vec<f64>> {
        if !self.sweep.nu.is_empty() {
            return Ok(self.sweep.nu.clone());
        }
        match (self.gas.nu, self.gas.eta) {
            (Some(nu), _) => Ok(vec![nu]),
            (None, Some(eta)) => Ok(vec![nu_from_eta(eta, self.gas.gamma).map_err(|e| Error::Config(e.to_string()))?]),
            (None, None) => Err(Error::Config("no nu given".into())),
        }
    }

    /// Whether `gamma` lies in `(1, 3)`; outside it nothing else can be built.
    pub fn gamma_in_range(&self) -> bool {
        self.gas.gamma > 1.0 && self.gas.gamma < 3.0
    }

    pub fn gas(&self, nu: f64) -> Result<GasParameters> {
        GasParameters::new(self.gas.gamma, nu).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn profile(&self) -> Result<Arc<dyn DuctProfile>> {
        let p = &self.profile;
        let spec = ProfileSpec { kind: p.kind.clone(), x_b: p.x_b, x_c: p.x_c, n: p.n, table: p.table.clone() };
        let factory = geometry::default_registry().get(&p.kind)?;
        factory(&spec)
    }

    pub fn data(&self, profile: &Arc<dyn DuctProfile>, gas: &GasParameters) -> Result<DataPair> {
        let factory = conditions::data::default_registry().get(&self.data.kind)?;
        factory(&self.data, profile, gas)
    }

    pub fn grid(&self) -> Result<Grid> {
        let x_c = self.profile.x_c.ok_or_else(|| Error::Config("simulation needs a bounded duct (profile.x_c)".into()))?;
        match (self.grid.dx, self.grid.n_cells) {
            (Some(dx), _) => Grid::with_spacing(self.profile.x_b, x_c, dx),
            (None, Some(n)) => Grid::new(self.profile.x_b, x_c, n),
            (None, None) => Err(Error::Config("grid needs dx or n_cells".into())),
        }
    }

    pub fn solver_config(&self, gas: GasParameters, profile: Arc<dyn DuctProfile>) -> Result<SolverConfig> {
        let s = &self.solver;
        let mut c = SolverConfig::new(gas, profile, self.grid()?);
        c.cfl_ratio = s.cfl_ratio;
        c.t_final = s.t_final;
        c.snapshot_stride = s.snapshot_stride;
        c.weno_epsilon = s.weno_epsilon;
        c.outflow = s.outflow.clone();
        Ok(c)
    }

    pub fn validation_settings(&self) -> ValidationSettings {
        let v = &self.validation;
        let mut s = ValidationSettings { t_horizon: self.solver.t_final.max(1.0), ..Default::default() };
        if let Some(n) = v.x_points {
            s.x_points = n;
        }
        if let Some(n) = v.t_points {
            s.t_points = n;
        }
        if let Some(t) = v.compat_tol {
            s.compat_tol = t;
        }
        if let Some(c) = v.c_xi {
            s.c_xi = c;
        }
        s.c_light = v.c_light;
        s
    }

    /// The experiment setup with the duct `exp1` or `exp2`.
    pub fn experiment(profile: &str) -> Self {
        RunConfig {
            gas: GasSection { gamma: 1.4, nu: Some(0.1), eta: None },
            profile: ProfileSection { kind: profile.into(), x_b: 1.0, x_c: Some(10.0), n: None, table: None },
            grid: GridSection { dx: Some(0.01), n_cells: None },
            solver: SolverSection::default(),
            data: DataSpec { kind: "exp-data".into(), ..Default::default() },
            diagnostics: DiagnosticsSection::default(),
            validation: ValidationSection::default(),
            output: OutputSection::default(),
            sweep: SweepSection { nu: vec![0.1, 1e-3, 1e-5] },
        }
    }
}

pub type PresetFactory = dyn Fn() -> RunConfig + Send + Sync;

/// `experiment1` and `experiment2`.
pub fn presets() -> Registry<PresetFactory> {
    let mut reg: Registry<PresetFactory> = Registry::new("preset");
    reg.register("experiment1", Arc::new(|| RunConfig::experiment("exp1")));
    reg.register("experiment2", Arc::new(|| RunConfig::experiment("exp2")));
    reg
}

pub fn preset(name: &str) -> Result<RunConfig> {
    let f = presets().get(name)?;
    Ok(f())
}
