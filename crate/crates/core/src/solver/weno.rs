//! Fifth-order WENO reconstruction (Jiang-Shu smoothness indicators).

pub const IDEAL_WEIGHTS: [f64; 3] = [0.1, 0.6, 0.3];
pub const DEFAULT_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bias {
    /// Stencil `v[i-2..=i+2]`, value at `i+1/2` from the left.
    Left,
    /// Stencil `v[i-1..=i+3]`, value at `i+1/2` from the right.
    Right,
}

/// The three third-order candidates at the right edge of the centre point.
#[inline]
pub fn candidates(v: [f64; 5]) -> [f64; 3] {
    let [a, b, c, d, e] = v;
    [
        (2.0 * a - 7.0 * b + 11.0 * c) / 6.0,
        (-b + 5.0 * c + 2.0 * d) / 6.0,
        (2.0 * c + 5.0 * d - e) / 6.0,
    ]
}

#[inline]
pub fn smoothness(v: [f64; 5]) -> [f64; 3] {
    let [a, b, c, d, e] = v;
    let sq = |x: f64| x * x;
    [
        13.0 / 12.0 * sq(a - 2.0 * b + c) + 0.25 * sq(a - 4.0 * b + 3.0 * c),
        13.0 / 12.0 * sq(b - 2.0 * c + d) + 0.25 * sq(b - d),
        13.0 / 12.0 * sq(c - 2.0 * d + e) + 0.25 * sq(3.0 * c - 4.0 * d + e),
    ]
}

#[inline]
fn left(v: [f64; 5], eps: f64) -> f64 {
    let q = candidates(v);
    let beta = smoothness(v);
    let mut alpha = [0.0; 3];
    let mut sum = 0.0;
    for j in 0..3 {
        let t = eps + beta[j];
        alpha[j] = IDEAL_WEIGHTS[j] / (t * t);
        sum += alpha[j];
    }
    (alpha[0] * q[0] + alpha[1] * q[1] + alpha[2] * q[2]) / sum
}

/// Interface value from a five-point stencil.
#[inline]
pub fn weno5_reconstruct(stencil: [f64; 5], bias: Bias, eps: f64) -> f64 {
    match bias {
        Bias::Left => left(stencil, eps),
        Bias::Right => {
            let [a, b, c, d, e] = stencil;
            left([e, d, c, b, a], eps)
        }
    }
}
