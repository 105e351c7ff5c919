//! Shape-preserving piecewise cubic Hermite interpolation.
//!
//! Used for user tables (duct areas, initial/boundary data) and for the
//! spatial interpolant of recorded fields. Slopes are limited with the
//! Fritsch-Carlson conditions so monotone data give monotone interpolants.

use crate::error::{Error, Result};

/// Cubic Hermite on `[0, 1]` with end values `y0, y1` and end slopes
/// `m0, m1` already scaled by the interval length. Returns value and
/// d/ds.
#[inline]
pub fn hermite(y0: f64, y1: f64, m0: f64, m1: f64, s: f64) -> (f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let value = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
    let d00 = 6.0 * s2 - 6.0 * s;
    let d10 = 3.0 * s2 - 4.0 * s + 1.0;
    let d01 = -6.0 * s2 + 6.0 * s;
    let d11 = 3.0 * s2 - 2.0 * s;
    let deriv = d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1;
    (value, deriv)
}

/// Second derivative d^2/ds^2 of [`hermite`].
#[inline]
pub fn hermite_second(y0: f64, y1: f64, m0: f64, m1: f64, s: f64) -> f64 {
    (12.0 * s - 6.0) * y0 + (6.0 * s - 4.0) * m0 + (-12.0 * s + 6.0) * y1 + (6.0 * s - 2.0) * m1
}

/// Clamp slopes so every interval stays monotone (Fritsch-Carlson).
/// `delta[i]` is the secant slope on interval `i`.
pub fn limit_slopes(delta: &[f64], slopes: &mut [f64]) {
    debug_assert_eq!(slopes.len(), delta.len() + 1);
    for (i, &d) in delta.iter().enumerate() {
        if d == 0.0 {
            slopes[i] = 0.0;
            slopes[i + 1] = 0.0;
            continue;
        }
        // a slope pointing against the secant breaks monotonicity outright
        if slopes[i] * d < 0.0 {
            slopes[i] = 0.0;
        }
        if slopes[i + 1] * d < 0.0 {
            slopes[i + 1] = 0.0;
        }
        let a = slopes[i] / d;
        let b = slopes[i + 1] / d;
        let r2 = a * a + b * b;
        if r2 > 9.0 {
            let tau = 3.0 / r2.sqrt();
            slopes[i] = tau * a * d;
            slopes[i + 1] = tau * b * d;
        }
    }
}

/// Monotone piecewise cubic interpolant on strictly increasing knots.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Usage("table columns differ in length".into()));
        }
        if x.len() < 2 {
            return Err(Error::Usage("table needs at least two rows".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Usage("table abscissae must be strictly increasing".into()));
        }
        if y.iter().chain(x.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Usage("table contains non-finite values".into()));
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            // interior: three-point slope, limited below
            for i in 1..n - 1 {
                d[i] = (h[i] * delta[i - 1] + h[i - 1] * delta[i]) / (h[i - 1] + h[i]);
            }
            d[0] = ((2.0 * h[0] + h[1]) * delta[0] - h[0] * delta[1]) / (h[0] + h[1]);
            let m = n - 1;
            d[m] = ((2.0 * h[m - 1] + h[m - 2]) * delta[m - 1] - h[m - 1] * delta[m - 2])
                / (h[m - 1] + h[m - 2]);
        }
        limit_slopes(&delta, &mut d);
        Ok(Self { x, y, d })
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.x.last().unwrap()
    }

    fn locate(&self, t: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.x.len() - 2),
        }
    }

    /// Value, first and second derivative at `t` (extrapolates the end
    /// cubic outside the knots).
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (m0, m1) = (self.d[i] * h, self.d[i + 1] * h);
        let (v, dv) = hermite(self.y[i], self.y[i + 1], m0, m1, s);
        let d2 = hermite_second(self.y[i], self.y[i + 1], m0, m1, s);
        (v, dv / h, d2 / (h * h))
    }
}
