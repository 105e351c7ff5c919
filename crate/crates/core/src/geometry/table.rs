//! User-supplied ducts: tabulated areas (file format `# duct-profile v1`)
//! and area functions differentiated numerically.

use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use super::{Domain, DuctProfile, ProfileSample};
use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;

pub const PROFILE_HEADER: &str = "# duct-profile v1";

/// Parse a two-column numeric table preceded by `header`. Columns may be
/// separated by whitespace or commas; blank lines and further `#` lines are
/// skipped.
pub fn parse_columns(text: &str, header: &str, columns: usize, path: &Path) -> Result<Vec<Vec<f64>>> {
    let err = |msg: String| Error::Parse { path: path.to_path_buf(), msg };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim() == header => {}
        _ => return Err(err(format!("missing header line `{header}`"))),
    }
    let mut cols = vec![Vec::new(); columns];
    for (no, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
        if fields.len() != columns {
            return Err(err(format!("line {}: expected {columns} columns, found {}", no + 1, fields.len())));
        }
        for (c, f) in cols.iter_mut().zip(fields) {
            c.push(f.parse::<f64>().map_err(|e| err(format!("line {}: {e}", no + 1)))?);
        }
    }
    Ok(cols)
}

/// Tabulated `a(x)` interpolated with a monotone C1 cubic; `k'` comes from
/// differentiating the interpolant.
#[derive(Debug, Clone)]
pub struct TableProfile {
    spline: MonotoneCubic,
    label: String,
}

impl TableProfile {
    pub fn new(x: Vec<f64>, a: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if a.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::domain("tabulated area must be positive"));
        }
        if a.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::domain("tabulated area must be nondecreasing (divergent duct)"));
        }
        Ok(Self { spline: MonotoneCubic::new(x, a)?, label: label.into() })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut cols = parse_columns(&text, PROFILE_HEADER, 2, path)?;
        let a = cols.pop().unwrap();
        let x = cols.pop().unwrap();
        Self::new(x, a, format!("table:{}", path.display()))
    }

    pub fn write(path: &Path, x: &[f64], a: &[f64]) -> Result<()> {
        let mut out = String::from(PROFILE_HEADER);
        out.push('\n');
        for (x, a) in x.iter().zip(a) {
            out.push_str(&format!("{x} {a}\n"));
        }
        fs::write(path, out)?;
        Ok(())
    }
}

impl DuctProfile for TableProfile {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn domain(&self) -> Domain {
        Domain { x_b: self.spline.x_min(), x_c: Some(self.spline.x_max()) }
    }
    fn sample(&self, x: f64) -> ProfileSample {
        let (a, da, d2a) = self.spline.eval(x);
        let k = da / a;
        ProfileSample { a, da, k, dk: d2a / a - k * k }
    }
}

pub type AreaFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Area function with central-difference derivatives (second order).
#[derive(Clone)]
pub struct FiniteDifferenceProfile {
    label: String,
    domain: Domain,
    area: AreaFn,
    step: f64,
}

impl fmt::Debug for FiniteDifferenceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteDifferenceProfile")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("step", &self.step)
            .finish()
    }
}

impl FiniteDifferenceProfile {
    pub fn new(label: impl Into<String>, domain: Domain, area: AreaFn) -> Self {
        Self::with_step(label, domain, area, 1e-4)
    }

    pub fn with_step(label: impl Into<String>, domain: Domain, area: AreaFn, step: f64) -> Self {
        Self { label: label.into(), domain, area, step }
    }
}

impl DuctProfile for FiniteDifferenceProfile {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn domain(&self) -> Domain {
        self.domain
    }
    fn sample(&self, x: f64) -> ProfileSample {
        let h = self.step * x.abs().max(1.0);
        let (am, a, ap) = ((self.area)(x - h), (self.area)(x), (self.area)(x + h));
        let da = (ap - am) / (2.0 * h);
        let dk = (ap.ln() - 2.0 * a.ln() + am.ln()) / (h * h);
        ProfileSample { a, da, k: da / a, dk }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets::{Exp1, Exp2};

    #[test]
    fn finite_difference_fallback_is_second_order() {
        let domain = Domain::new(1.0, Some(10.0)).unwrap();
        let cases: Vec<(AreaFn, Box<dyn DuctProfile>)> = vec![
            (Arc::new(|x: f64| 2.0 - 1.0 / x), Box::new(Exp1::new(1.0, Some(10.0)).unwrap())),
            (Arc::new(|x: f64| (1.0 - 1.0 / x).exp()), Box::new(Exp2::new(1.0, Some(10.0)).unwrap())),
        ];
        for (area, exact) in cases {
            let err = |h: f64| {
                let fd = FiniteDifferenceProfile::with_step("fd", domain, area.clone(), h);
                [1.0, 1.3, 2.0, 4.5].iter().map(|&x| (fd.sample(x).dk - exact.sample(x).dk).abs()).fold(0.0, f64::max)
            };
            let (e1, e2, e3) = (err(4e-2), err(2e-2), err(1e-2));
            let p1 = (e1 / e2).log2();
            let p2 = (e2 / e3).log2();
            assert!(p1 >= 1.9 && p2 >= 1.9, "orders {p1} {p2}");
        }
    }

    #[test]
    fn table_round_trip_and_accuracy() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("duct.txt");
        let xs: Vec<f64> = (0..=900).map(|i| 1.0 + i as f64 * 0.01).collect();
        let a: Vec<f64> = xs.iter().map(|x| 2.0 - 1.0 / x).collect();
        TableProfile::write(&path, &xs, &a).unwrap();
        let t = TableProfile::from_file(&path).unwrap();
        assert_eq!(t.domain().x_b, 1.0);
        assert_eq!(t.domain().x_c, Some(10.0));
        let exact = Exp1::new(1.0, Some(10.0)).unwrap();
        for &x in &[1.0, 1.37, 2.5, 7.9] {
            let (s, e) = (t.sample(x), exact.sample(x));
            assert!((s.a - e.a).abs() < 1e-5);
            assert!((s.k - e.k).abs() < 2e-3, "{x}: {} vs {}", s.k, e.k);
        }
    }

    #[test]
    fn table_format_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        fs::write(&path, "1 1\n2 2\n").unwrap();
        assert!(matches!(TableProfile::from_file(&path), Err(Error::Parse { .. })));
        fs::write(&path, "# duct-profile v1\n1 1\n1 2\n").unwrap();
        assert!(TableProfile::from_file(&path).is_err());
        fs::write(&path, "# duct-profile v1\n1 2\n2 1\n").unwrap();
        assert!(TableProfile::from_file(&path).is_err());
        fs::write(&path, "# duct-profile v1\n1 1 3\n").unwrap();
        assert!(TableProfile::from_file(&path).is_err());
    }
}
