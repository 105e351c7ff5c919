//! Initial data `(S0, R0)(x)` and boundary data `(SB, RB)(t)`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::table::parse_columns;
use crate::geometry::DuctProfile;
use crate::interp::MonotoneCubic;
use crate::model::{eigenvalues, source_g_with_k, GasParameters, RiemannState};
use crate::registry::Registry;

pub const INITIAL_HEADER: &str = "# initial-data v1";
pub const BOUNDARY_HEADER: &str = "# boundary-data v1";

/// Values and first derivatives of a pair of invariants at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataSample {
    pub s: f64,
    pub ds: f64,
    pub r: f64,
    pub dr: f64,
}

impl DataSample {
    pub fn state(&self) -> RiemannState {
        RiemannState { s: self.s, r: self.r }
    }

    pub fn xi(&self) -> f64 {
        self.state().xi()
    }
}

/// `(S0, R0)` as functions of `x`.
pub trait InitialData: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn at(&self, x: f64) -> DataSample;
}

/// `(SB, RB)` as functions of `t >= 0`.
pub trait BoundaryData: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn at(&self, t: f64) -> DataSample;
}

/// Boundary data of the experiments: `SB = sb0/(1+t)`, `RB = rb0/(1+t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayingBoundary {
    pub sb0: f64,
    pub rb0: f64,
}

impl BoundaryData for DecayingBoundary {
    fn name(&self) -> String {
        "exp-data".into()
    }
    fn at(&self, t: f64) -> DataSample {
        let w = 1.0 / (1.0 + t);
        DataSample { s: self.sb0 * w, ds: -self.sb0 * w * w, r: self.rb0 * w, dr: -self.rb0 * w * w }
    }
}

/// Initial data of the experiments: `S0 = s0 (a/a_B)^(s0'/s0)` and
/// `R0 = r0 (a/a_B)^(r0'/r0)`. When `a'(x_B) = a(x_B)`, as for both
/// experiment ducts at `x_B = 1`, `S0'(x_B) = s0'`.
#[derive(Debug, Clone)]
pub struct PowerInitial {
    pub profile: Arc<dyn DuctProfile>,
    pub s0: f64,
    pub r0: f64,
    pub s0_prime: f64,
    pub r0_prime: f64,
    a_b: f64,
}

impl PowerInitial {
    pub fn new(profile: Arc<dyn DuctProfile>, s0: f64, r0: f64, s0_prime: f64, r0_prime: f64) -> Self {
        let a_b = profile.sample(profile.domain().x_b).a;
        Self { profile, s0, r0, s0_prime, r0_prime, a_b }
    }
}

impl InitialData for PowerInitial {
    fn name(&self) -> String {
        "exp-data".into()
    }
    fn at(&self, x: f64) -> DataSample {
        let p = self.profile.sample(x);
        let ratio = p.a / self.a_b;
        let (ps, pr) = (self.s0_prime / self.s0, self.r0_prime / self.r0);
        let s = self.s0 * ratio.powf(ps);
        let r = self.r0 * ratio.powf(pr);
        DataSample { s, ds: s * p.k * ps, r, dr: r * p.k * pr }
    }
}

/// Corner slopes `(s0', r0')` that make the initial data compatible with
/// the boundary data at `(x_B, 0)`: the invariant equations evaluated at
/// the corner.
pub fn corner_slopes(
    s0: f64,
    r0: f64,
    sb_prime: f64,
    rb_prime: f64,
    k_b: f64,
    params: &GasParameters,
) -> (f64, f64) {
    let st = RiemannState { s: s0, r: r0 };
    let (l1, l2) = eigenvalues(st, params);
    let g = source_g_with_k(k_b, st, params);
    ((g - sb_prime) / l1, (-g - rb_prime) / l2)
}

/// Piecewise monotone cubic data read from a three-column table.
#[derive(Debug, Clone)]
pub struct TableData {
    label: String,
    s: MonotoneCubic,
    r: MonotoneCubic,
}

impl TableData {
    fn read(path: &Path, header: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cols = parse_columns(&text, header, 3, path)?;
        let r = cols.pop().unwrap();
        let s = cols.pop().unwrap();
        let x = cols.pop().unwrap();
        Ok(Self {
            label: format!("table:{}", path.display()),
            s: MonotoneCubic::new(x.clone(), s)?,
            r: MonotoneCubic::new(x, r)?,
        })
    }

    pub fn write(path: &Path, header: &str, x: &[f64], s: &[f64], r: &[f64]) -> Result<()> {
        let mut out = format!("{header}\n");
        for i in 0..x.len() {
            out.push_str(&format!("{} {} {}\n", x[i], s[i], r[i]));
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn range(&self) -> (f64, f64) {
        (self.s.x_min(), self.s.x_max())
    }

    // Past the last row the data are held constant.
    fn sample(&self, x: f64) -> DataSample {
        let (lo, hi) = self.range();
        let x = x.max(lo);
        if x > hi {
            return DataSample { s: self.s.eval(hi).0, ds: 0.0, r: self.r.eval(hi).0, dr: 0.0 };
        }
        let (s, ds, _) = self.s.eval(x);
        let (r, dr, _) = self.r.eval(x);
        DataSample { s, ds, r, dr }
    }
}

#[derive(Debug, Clone)]
pub struct TableInitial(pub TableData);

impl TableInitial {
    pub fn from_file(path: &Path) -> Result<Self> {
        Ok(Self(TableData::read(path, INITIAL_HEADER)?))
    }
}

impl InitialData for TableInitial {
    fn name(&self) -> String {
        self.0.label.clone()
    }
    fn at(&self, x: f64) -> DataSample {
        self.0.sample(x)
    }
}

#[derive(Debug, Clone)]
pub struct TableBoundary(pub TableData);

impl TableBoundary {
    pub fn from_file(path: &Path) -> Result<Self> {
        Ok(Self(TableData::read(path, BOUNDARY_HEADER)?))
    }
}

impl BoundaryData for TableBoundary {
    fn name(&self) -> String {
        self.0.label.clone()
    }
    fn at(&self, t: f64) -> DataSample {
        self.0.sample(t)
    }
}

/// The same constant state in space and time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantData {
    pub s: f64,
    pub r: f64,
}

impl ConstantData {
    fn sample(&self) -> DataSample {
        DataSample { s: self.s, ds: 0.0, r: self.r, dr: 0.0 }
    }
}

impl InitialData for ConstantData {
    fn name(&self) -> String {
        "constant".into()
    }
    fn at(&self, _x: f64) -> DataSample {
        self.sample()
    }
}

impl BoundaryData for ConstantData {
    fn name(&self) -> String {
        "constant".into()
    }
    fn at(&self, _t: f64) -> DataSample {
        self.sample()
    }
}

pub type SampleFn = Arc<dyn Fn(f64) -> DataSample + Send + Sync>;

/// Data given by a closure; handy for tests and manufactured problems.
#[derive(Clone)]
pub struct FnData {
    pub label: String,
    pub f: SampleFn,
}

impl FnData {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> DataSample + Send + Sync + 'static) -> Self {
        Self { label: label.into(), f: Arc::new(f) }
    }
}

impl fmt::Debug for FnData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnData({})", self.label)
    }
}

impl InitialData for FnData {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn at(&self, x: f64) -> DataSample {
        (self.f)(x)
    }
}

impl BoundaryData for FnData {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn at(&self, t: f64) -> DataSample {
        (self.f)(t)
    }
}

/// Data section of a run configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s0_prime: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0_prime: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sb0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rb0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_table: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_table: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct DataPair {
    pub initial: Arc<dyn InitialData>,
    pub boundary: Arc<dyn BoundaryData>,
}

pub type DataFactory = dyn Fn(&DataSpec, &Arc<dyn DuctProfile>, &GasParameters) -> Result<DataPair> + Send + Sync;

/// The experiments' data with every parameter overridable. Defaults:
/// `sb0 = s0 = 1 - sqrt(nu)`, `rb0 = r0 = 1`, corner slopes from
/// [`corner_slopes`].
pub fn exp_data(spec: &DataSpec, profile: &Arc<dyn DuctProfile>, params: &GasParameters) -> Result<DataPair> {
    let sq = params.nu().sqrt();
    let sb0 = spec.sb0.unwrap_or(1.0 - sq);
    let rb0 = spec.rb0.unwrap_or(1.0);
    let s0 = spec.s0.unwrap_or(sb0);
    let r0 = spec.r0.unwrap_or(rb0);
    let boundary = DecayingBoundary { sb0, rb0 };
    let bd = boundary.at(0.0);
    let k_b = profile.sample(profile.domain().x_b).k;
    let (sp, rp) = corner_slopes(s0, r0, bd.ds, bd.dr, k_b, params);
    let s0_prime = spec.s0_prime.unwrap_or(sp);
    let r0_prime = spec.r0_prime.unwrap_or(rp);
    if !(s0 > 0.0 && r0 > 0.0) {
        return Err(Error::Config(format!("exp-data needs s0, r0 > 0, got {s0}, {r0}")));
    }
    Ok(DataPair {
        initial: Arc::new(PowerInitial::new(profile.clone(), s0, r0, s0_prime, r0_prime)),
        boundary: Arc::new(boundary),
    })
}

/// Built-in data kinds: `exp-data`, `table`, `constant`.
pub fn default_registry() -> Registry<DataFactory> {
    let mut reg: Registry<DataFactory> = Registry::new("data kind");
    reg.register("exp-data", Arc::new(exp_data));
    reg.register(
        "table",
        Arc::new(|spec: &DataSpec, _: &Arc<dyn DuctProfile>, _: &GasParameters| {
            let ip = spec.initial_table.as_ref().ok_or_else(|| Error::Config("table data need `initial_table`".into()))?;
            let bp =
                spec.boundary_table.as_ref().ok_or_else(|| Error::Config("table data need `boundary_table`".into()))?;
            Ok(DataPair {
                initial: Arc::new(TableInitial::from_file(ip)?),
                boundary: Arc::new(TableBoundary::from_file(bp)?),
            })
        }),
    );
    reg.register(
        "constant",
        Arc::new(|spec: &DataSpec, _: &Arc<dyn DuctProfile>, _: &GasParameters| {
            let (s, r) = match (spec.s, spec.r) {
                (Some(s), Some(r)) => (s, r),
                _ => return Err(Error::Config("constant data need `s` and `r`".into())),
            };
            let c = ConstantData { s, r };
            Ok(DataPair { initial: Arc::new(c), boundary: Arc::new(c) })
        }),
    );
    reg
}

/// Experiment defaults for `s0'`, `r0'` at `gamma = 7/5`, `k(x_B) = 1`.
pub fn experiment_slopes(nu: f64) -> (f64, f64) {
    let q = nu.sqrt();
    ((20.0 - 18.0 * q - nu) / (20.0 - 12.0 * q), (20.0 - 2.0 * q + nu) / (20.0 - 8.0 * q))
}
