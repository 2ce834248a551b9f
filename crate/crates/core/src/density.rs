//! Excitation density of the medium across the atom's trajectory and the
//! total excitation rate for the u = 0 medium.
//!
//! Everything reduces to one kernel,
//!
//! ```text
//! G(k) = e^{−a√(k²+Ω²)} / √(k²+Ω²),
//! ```
//!
//! and its Fourier transform I(ξ) = ∫ dk e^{−ikξ} G(k) along the direction x
//! transverse to the motion. G is even and analytic in the strip |Im k| < Ω,
//! so the transform is taken on a line Im k = −c through the saddle point of
//! the integrand. On that line the integrand never exceeds the size of the
//! result by much, which keeps relative accuracy when I(ξ) is exponentially
//! small. At ξ = 0 the line is the real axis.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::params::ValidatedParams;
use crate::quadrature::{
    cosine_transform_even, fourier_transform_shifted, integrate_semi_infinite_decaying,
    try_integrate_panels, IntegrationResult, QuadratureError, QuadratureSettings,
};
use crate::specfun::SmearingWidths;

/// Extensions of the ξ range allowed in [`rate_from_density`].
const MAX_TAIL_EXTENSIONS: usize = 40;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("tail bound {bound:e} beyond xi = {cutoff} still above target {target:e}")]
    TailBoundExceeded {
        cutoff: f64,
        bound: f64,
        target: f64,
    },
    #[error("density grid abscissas must be finite and strictly increasing")]
    UnorderedGrid,
}

/// One sample of the normalised density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityPoint {
    /// Ω_e ξ.
    pub xi_scaled: f64,
    /// ρ / (g²λ² / (4π m Ω_m Ω_e v²)).
    pub rho_tilde: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityProfile {
    pub params: ValidatedParams,
    pub points: Vec<DensityPoint>,
}

impl DensityProfile {
    /// Largest |ρ̃(ξ) − ρ̃(−ξ)| over pairs of mirrored abscissas present in the profile.
    pub fn asymmetry(&self) -> f64 {
        let pts = &self.points;
        let n = pts.len();
        (0..n / 2)
            .filter(|&i| pts[i].xi_scaled == -pts[n - 1 - i].xi_scaled)
            .map(|i| (pts[i].rho_tilde - pts[n - 1 - i].rho_tilde).abs())
            .fold(0.0, f64::max)
    }
}

/// Probability per unit time together with its quadrature error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateResult {
    pub rate: f64,
    pub error_estimate: f64,
}

/// Minimiser over c ∈ [0, Ω) of the log-modulus of the integrand at k = −ic,
///
/// ```text
/// L(c) = −cξ + σ²c² − a√(Ω²−c²) − ½ ln(Ω²−c²),
/// ```
///
/// which is where the contour crosses the saddle. L is convex and
/// L'(0) = −ξ ≤ 0, so bisection on L' is enough.
fn saddle_shift(xi: f64, sigma: f64, a: f64, omega: f64) -> f64 {
    if xi == 0.0 {
        return 0.0;
    }
    let slope = |c: f64| {
        let s2 = (omega - c) * (omega + c);
        -xi + 2.0 * sigma * sigma * c + a * c / s2.sqrt() + c / s2
    };
    let (mut lo, mut hi) = (0.0, omega);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// ∫ dk e^{−ikξ} e^{−σ²k²} G(k); `sigma = 0` gives the bare kernel.
fn kernel_transform(
    xi: f64,
    sigma: f64,
    params: &ValidatedParams,
    settings: &QuadratureSettings,
) -> Result<IntegrationResult<Complex64>, QuadratureError> {
    let xi = xi.abs();
    let a = params.a;
    let scales = params.scales();
    let omega = scales.omega_cap;
    let shift = saddle_shift(xi, sigma, a, omega);
    // Ω² − c², factored to keep precision when the shift approaches Ω.
    let s2 = if shift == 0.0 {
        scales.omega_cap_sq
    } else {
        (omega - shift) * (omega + shift)
    };
    let s = s2.sqrt();

    let log_eps = (1.0 / settings.truncation_epsilon).ln();
    let mut cutoff = s + settings.tail_length(1.0 / a);
    if sigma > 0.0 {
        let gaussian = ((log_eps + a * s) / (sigma * sigma)).sqrt();
        cutoff = cutoff.min(gaussian.max(s));
    }

    let sigma2 = sigma * sigma;
    let kernel = |z: Complex64| {
        // z² + Ω² with z = k − ic, written as (k² + Ω² − c²) + 2ik(−c).
        let arg = Complex64::new(z.re * z.re + s2, 2.0 * z.re * z.im);
        let w = arg.sqrt();
        let mut value = (-a * w).exp() / w;
        if sigma > 0.0 {
            let z2 = Complex64::new(z.re * z.re - z.im * z.im, 2.0 * z.re * z.im);
            value *= (-sigma2 * z2).exp();
        }
        value
    };
    fourier_transform_shifted(kernel, xi, shift, cutoff, settings)
}

/// I(ξ) = ∫_{−∞}^{∞} dk_x e^{−ik_xξ} e^{−a√(k_x²+Ω²)}/√(k_x²+Ω²).
///
/// Real and positive; the imaginary part is quadrature noise. Even in ξ
/// bit-for-bit.
pub fn amplitude_kernel_integral(
    xi: f64,
    params: &ValidatedParams,
    settings: &QuadratureSettings,
) -> Result<IntegrationResult<Complex64>, DensityError> {
    Ok(kernel_transform(xi, 0.0, params, settings)?)
}

/// I(ξ) by a plain cosine transform on the real axis. Loses relative accuracy
/// once I(ξ) is many orders below I(0); kept as an independent route for
/// moderate Ωξ.
pub fn amplitude_kernel_integral_real_axis(
    xi: f64,
    params: &ValidatedParams,
    settings: &QuadratureSettings,
) -> Result<IntegrationResult<Complex64>, DensityError> {
    let a = params.a;
    let omega_sq = params.scales().omega_cap_sq;
    let kernel = |k: f64| {
        let w = (k * k + omega_sq).sqrt();
        (-a * w).exp() / w
    };
    Ok(cosine_transform_even(kernel, xi, 1.0 / a, settings)?)
}

/// g²λ²/(8π m Ω_m Ω_e v²), the factor multiplying |I(ξ)|² in ρ(ξ).
fn rho_prefactor(params: &ValidatedParams) -> f64 {
    params.coupling_factor() / (8.0 * PI * params.omega_m * params.omega_e * params.v * params.v)
}

/// Unit of ρ̃: g²λ²/(4π m Ω_m Ω_e v²).
pub fn rho_tilde_unit(params: &ValidatedParams) -> f64 {
    params.coupling_factor() / (4.0 * PI * params.omega_m * params.omega_e * params.v * params.v)
}

/// Point density ρ(ξ) of medium excitations per unit area, independent of η.
pub fn rho_point(
    xi: f64,
    params: &ValidatedParams,
    settings: &QuadratureSettings,
) -> Result<f64, DensityError> {
    let integral = amplitude_kernel_integral(xi, params, settings)?;
    Ok(rho_prefactor(params) * integral.value.norm_sqr())
}

pub fn rho_tilde(
    xi: f64,
    params: &ValidatedParams,
    settings: &QuadratureSettings,
) -> Result<f64, DensityError> {
    Ok(rho_point(xi, params, settings)? / rho_tilde_unit(params))
}

/// Samples ρ̃ at the given Ω_e ξ values, in parallel. The output order is
/// the input order, which must be strictly increasing.
pub fn density_profile(
    params: &ValidatedParams,
    xi_scaled: &[f64],
    settings: &QuadratureSettings,
) -> Result<DensityProfile, DensityError> {
    let ordered =
        xi_scaled.iter().all(|x| x.is_finite()) && xi_scaled.windows(2).all(|w| w[0] < w[1]);
    if !ordered {
        return Err(DensityError::UnorderedGrid);
    }
    let omega_e = params.omega_e;
    let points = xi_scaled
        .par_iter()
        .map(|&x| {
            rho_tilde(x / omega_e, params, settings).map(|rho_tilde| DensityPoint {
                xi_scaled: x,
                rho_tilde,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DensityProfile {
        params: *params,
        points,
    })
}

/// Transition amplitude into a Gaussian packet of medium excitations of size
/// (σ_x, σ_y) centred at (ξ, η). The y-integral and η phase are analytic;
/// only the k_x integral is numerical.
pub fn smeared_amplitude(
    widths: &SmearingWidths,
    params: &ValidatedParams,
    settings: &QuadratureSettings,
) -> Result<IntegrationResult<Complex64>, DensityError> {
    let k_transfer = params.scales().k_transfer;
    let SmearingWidths {
        sigma_x,
        sigma_y,
        xi,
        eta,
    } = *widths;
    let magnitude = (params.g * params.lambda / params.v)
        * (PI * sigma_x * sigma_y / (2.0 * params.m * params.omega_e * params.omega_m)).sqrt()
        * (-sigma_y * sigma_y * k_transfer * k_transfer).exp();
    let phase = Complex64::from_polar(1.0, eta * k_transfer);
    let transform = kernel_transform(xi, sigma_x, params, settings)?;
    let factor = magnitude / (2.0 * PI);
    Ok(IntegrationResult {
        value: phase * transform.value * factor,
        error_estimate: transform.error_estimate * factor.abs(),
        evaluations: transform.evaluations,
    })
}

/// ∫_0^∞ dk e^{−2a√(k²+Ω²)}/(k²+Ω²).
pub fn bare_rate_integral(
    params: &ValidatedParams,
    settings: &QuadratureSettings,
) -> Result<IntegrationResult, DensityError> {
    let a = params.a;
    let omega_sq = params.scales().omega_cap_sq;
    let integrand = |k: f64| {
        let w2 = k * k + omega_sq;
        (-2.0 * a * w2.sqrt()).exp() / w2
    };
    Ok(integrate_semi_infinite_decaying(
        integrand,
        1.0 / (2.0 * a),
        settings,
    )?)
}

/// Probability per unit time P = g²λ²/(2 m v Ω_e Ω_m) ∫_0^∞ dk e^{−2aW}/W²,
/// W² = k² + Ω².
pub fn total_rate(
    params: &ValidatedParams,
    settings: &QuadratureSettings,
) -> Result<RateResult, DensityError> {
    let prefactor = params.coupling_factor() / (2.0 * params.v * params.omega_e * params.omega_m);
    let bare = bare_rate_integral(params, settings)?;
    Ok(RateResult {
        rate: prefactor * bare.value,
        error_estimate: prefactor * bare.error_estimate,
    })
}

/// Upper bound on ∫_Ξ^∞ ρ(ξ) dξ from K₀(x) ≤ √(π/2x) e^{−x} and
/// |I(ξ)| = 2K₀(Ω√(ξ²+a²)) ≤ 2K₀(Ωξ).
fn rho_tail_bound(prefactor: f64, omega: f64, cutoff: f64) -> f64 {
    prefactor * PI * (-2.0 * omega * cutoff).exp() / (omega * omega * cutoff)
}

/// v ∫_{−∞}^{∞} ρ(ξ) dξ by direct integration of the density over ξ ≥ 0
/// (doubled), extending the range until the tail bound drops below a tenth of
/// the relative tolerance.
pub fn rate_from_density(
    params: &ValidatedParams,
    settings: &QuadratureSettings,
) -> Result<RateResult, DensityError> {
    let omega = params.scales().omega_cap;
    let prefactor = rho_prefactor(params);
    let rho = |xi: f64| -> Result<f64, DensityError> {
        let integral = amplitude_kernel_integral(xi, params, settings)?;
        Ok(prefactor * integral.value.norm_sqr())
    };

    // The density has structure on the scale a near ξ = 0 and decays on 1/(2Ω).
    let mut upper = params.a + 1.0 / omega;
    let first = try_integrate_panels(&rho, &[0.0, params.a, upper], settings)?;
    let mut half = first.value;
    let mut half_error = first.error_estimate;

    for _ in 0..MAX_TAIL_EXTENSIONS {
        let target = 0.1 * settings.rel_tol * half;
        let bound = rho_tail_bound(prefactor, omega, upper);
        if bound <= target {
            let rate = 2.0 * params.v * half;
            return Ok(RateResult {
                rate,
                error_estimate: 2.0 * params.v * (half_error + bound),
            });
        }
        if !(target > 0.0) {
            return Err(DensityError::TailBoundExceeded {
                cutoff: upper,
                bound,
                target,
            });
        }
        // Fixed point of bound(Ξ) = target, at least 25% further out.
        let mut next = upper;
        for _ in 0..8 {
            next = (prefactor * PI / (omega * omega * next * target)).ln() / (2.0 * omega);
            next = next.max(1.25 * upper);
        }
        let piece = try_integrate_panels(&rho, &[upper, next], settings)?;
        half += piece.value;
        half_error += piece.error_estimate;
        upper = next;
    }
    let target = 0.1 * settings.rel_tol * half;
    Err(DensityError::TailBoundExceeded {
        cutoff: upper,
        bound: rho_tail_bound(prefactor, omega, upper),
        target,
    })
}
