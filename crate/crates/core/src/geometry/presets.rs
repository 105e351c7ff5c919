//! Analytic duct presets.

use super::{Domain, DuctProfile, ProfileSample};
use crate::error::{Error, Result};

fn positive_start(x_b: f64, x_c: Option<f64>) -> Result<Domain> {
    if !(x_b > 0.0) {
        return Err(Error::domain(format!("preset profiles need x_B > 0, got {x_b}")));
    }
    Domain::new(x_b, x_c)
}

/// `a(x) = 2 - 1/x`, `k(x) = 1/(2x^2 - x)`.
#[derive(Debug, Clone)]
pub struct Exp1 {
    domain: Domain,
}

impl Exp1 {
    pub fn new(x_b: f64, x_c: Option<f64>) -> Result<Self> {
        let domain = positive_start(x_b, x_c)?;
        if !(x_b > 0.5) {
            return Err(Error::domain("a(x) = 2 - 1/x is not positive for x <= 1/2"));
        }
        Ok(Self { domain })
    }
}

impl DuctProfile for Exp1 {
    fn name(&self) -> String {
        "exp1".into()
    }
    fn domain(&self) -> Domain {
        self.domain
    }
    fn sample(&self, x: f64) -> ProfileSample {
        let q = 2.0 * x * x - x;
        ProfileSample {
            a: 2.0 - 1.0 / x,
            da: 1.0 / (x * x),
            k: 1.0 / q,
            dk: -(4.0 * x - 1.0) / (q * q),
        }
    }
}

/// `a(x) = exp(1 - 1/x)`, `k(x) = 1/x^2`.
#[derive(Debug, Clone)]
pub struct Exp2 {
    domain: Domain,
}

impl Exp2 {
    pub fn new(x_b: f64, x_c: Option<f64>) -> Result<Self> {
        Ok(Self { domain: positive_start(x_b, x_c)? })
    }
}

impl DuctProfile for Exp2 {
    fn name(&self) -> String {
        "exp2".into()
    }
    fn domain(&self) -> Domain {
        self.domain
    }
    fn sample(&self, x: f64) -> ProfileSample {
        let a = (1.0 - 1.0 / x).exp();
        ProfileSample { a, da: a / (x * x), k: 1.0 / (x * x), dk: -2.0 / (x * x * x) }
    }
}

/// `a(x) = x^(N-1)`, the N-dimensional spherically symmetric duct.
#[derive(Debug, Clone)]
pub struct Spherical {
    n: u32,
    domain: Domain,
}

impl Spherical {
    pub fn new(n: u32, x_b: f64, x_c: Option<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("spherical profile needs N >= 2, got {n}")));
        }
        Ok(Self { n, domain: positive_start(x_b, x_c)? })
    }

    pub fn dimension(&self) -> u32 {
        self.n
    }
}

impl DuctProfile for Spherical {
    fn name(&self) -> String {
        format!("spherical({})", self.n)
    }
    fn domain(&self) -> Domain {
        self.domain
    }
    fn sample(&self, x: f64) -> ProfileSample {
        let m = (self.n - 1) as f64;
        ProfileSample {
            a: x.powi(self.n as i32 - 1),
            da: m * x.powi(self.n as i32 - 2),
            k: m / x,
            dk: -m / (x * x),
        }
    }
    fn spherical_dimension(&self) -> Option<u32> {
        Some(self.n)
    }
}
