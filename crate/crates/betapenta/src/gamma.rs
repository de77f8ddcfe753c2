//! Complex log-gamma via upward recurrence into the Stirling regime.
//!
//! `exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b))` is branch-safe, which
//! is all the Euler-beta pentagon solution needs.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

// Bernoulli coefficients B_{2n} / (2n (2n-1)) for the Stirling series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Principal-branch-per-step log Gamma. Poles at nonpositive integers are
/// reported as `PoleHit`.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if z.re <= 0.5 && (z - Complex64::new(z.re.round(), 0.0)).norm() < 1e-12 && z.re.round() <= 0.0
    {
        return Err(Error::PoleHit {
            dist: (z - Complex64::new(z.re.round(), 0.0)).norm(),
        });
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < 10.0 {
        if w.norm() < 1e-14 {
            return Err(Error::PoleHit { dist: w.norm() });
        }
        shift -= w.ln();
        w += 1.0;
    }
    let mut series = Complex64::new(0.0, 0.0);
    let w2 = w * w;
    let mut pw = w;
    for coef in STIRLING {
        series += coef / pw;
        pw *= w2;
    }
    let half_log_two_pi = 0.5 * (2.0 * PI).ln();
    Ok((w - 0.5) * w.ln() - w + half_log_two_pi + series + shift)
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(log_gamma(z)?.exp())
}

/// Euler beta function `B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)`.
pub fn beta(a: Complex64, b: Complex64) -> Result<Complex64> {
    Ok((log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?).exp())
}
