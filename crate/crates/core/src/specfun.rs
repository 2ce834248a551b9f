//! Modified Bessel function K₀ and the normalised Gaussian smearing profile.
//!
//! K₀ is evaluated from its power series for x ≤ 2 and from Steed's
//! continued fraction (Temme's CF2) above. Neither path integrates anything,
//! so it can serve as an independent check on the quadrature routes.

use std::f64::consts::PI;

use thiserror::Error;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_4;
const SERIES_LIMIT: f64 = 2.0;
const MAX_TERMS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("{function} is undefined for argument {arg}")]
    DomainError { function: &'static str, arg: f64 },
}

/// Gaussian wave packet location and size on the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmearingWidths {
    pub sigma_x: f64,
    pub sigma_y: f64,
    /// Centre along x (transverse to the trajectory).
    pub xi: f64,
    /// Centre along y (along the trajectory).
    pub eta: f64,
}

impl SmearingWidths {
    pub fn new(sigma_x: f64, sigma_y: f64, xi: f64, eta: f64) -> Result<Self, SpecfunError> {
        for (function, arg) in [("sigma_x", sigma_x), ("sigma_y", sigma_y)] {
            if !(arg > 0.0 && arg.is_finite()) {
                return Err(SpecfunError::DomainError { function, arg });
            }
        }
        Ok(Self {
            sigma_x,
            sigma_y,
            xi,
            eta,
        })
    }
}

/// Modified Bessel function of the second kind, order zero.
pub fn bessel_k0(x: f64) -> Result<f64, SpecfunError> {
    if !(x > 0.0) {
        return Err(SpecfunError::DomainError {
            function: "bessel_k0",
            arg: x,
        });
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(if x <= SERIES_LIMIT {
        k0_series(x)
    } else {
        k0_continued_fraction(x)
    })
}

/// K₀(x) = −(ln(x/2) + γ) I₀(x) + Σ_{k≥1} H_k (x²/4)^k / (k!)².
fn k0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut i0 = 1.0;
    let mut tail = 0.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term * harmonic < f64::EPSILON * 1e-3 * tail {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + tail
}

/// Steed's algorithm for Temme's second continued fraction at order zero.
fn k0_continued_fraction(x: f64) -> f64 {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..MAX_TERMS {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 0.25 * f64::EPSILON {
            break;
        }
    }
    (PI / (2.0 * x)).sqrt() * (-x).exp() / s
}

/// φ_σ(x) = e^{−x²/(4σ²)} / ((2π)^{1/4} √σ), normalised so ∫|φ_σ|² = 1.
pub fn gaussian_profile(sigma: f64, x: f64) -> Result<f64, SpecfunError> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(SpecfunError::DomainError {
            function: "gaussian_profile",
            arg: sigma,
        });
    }
    Ok((-x * x / (4.0 * sigma * sigma)).exp() / ((2.0 * PI).powf(0.25) * sigma.sqrt()))
}
