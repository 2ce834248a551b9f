//! Medium whose excitations propagate with speed u: on-shell kinematics,
//! the v > u threshold, and the excitation rate.
//!
//! The final medium state is a momentum eigenstate p = (p_x, p_y). Energy
//! conservation fixes p_y through
//!
//! ```text
//! Ω_e + ω_p = v p_y,    ω_p = √(u²|p|² + Ω_m²),
//! ```
//!
//! and the squared amplitude carries e^{−2aW}/W² with
//! W² = |p|²(1 − u²) − Ω_m², positive on every admissible solution.

use std::f64::consts::PI;

use thiserror::Error;

use crate::density::{bare_rate_integral, DensityError, RateResult};
use crate::params::ValidatedParams;
use crate::quadrature::{try_integrate_semi_infinite, QuadratureError, QuadratureSettings};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DispersiveError {
    #[error("on-shell condition degenerates for v = u = {0}")]
    DegenerateKinematics(f64),
    #[error("process forbidden: atom speed v = {v} does not exceed wave speed u = {u}")]
    ThresholdViolated { v: f64, u: f64 },
    #[error("non-evanescent on-shell point: W^2 = {0}")]
    EvanescenceViolated(f64),
    #[error("on-shell root p_y = {0} does not satisfy v p_y > omega_e")]
    InadmissibleRoot(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Density(#[from] DensityError),
}

/// A root of the on-shell condition for fixed p_x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OnShellSolution {
    pub p_y: f64,
    /// ω_p = √(u²|p|² + Ω_m²).
    pub omega_p: f64,
    /// |∂/∂p_y (Ω_e + ω_p − v p_y)| = |v − u² p_y/ω_p|.
    pub jacobian: f64,
    /// v p_y − Ω_e > 0, i.e. the root solves the unsquared condition.
    pub admissible: bool,
}

/// Both roots of (v²−u²)p_y² − 2vΩ_e p_y + (Ω_e² − Ω_m² − u²p_x²) = 0, in a
/// fixed order: index 0 is the branch that tends to (Ω_e+Ω_m)/v as u → 0.
/// Roots introduced by squaring come back with `admissible = false`.
pub fn on_shell_roots(
    p_x: f64,
    params: &ValidatedParams,
) -> Result<Vec<OnShellSolution>, DispersiveError> {
    let (v, u, oe, om) = (params.v, params.u, params.omega_e, params.omega_m);
    if u == v {
        return Err(DispersiveError::DegenerateKinematics(v));
    }
    if u == 0.0 {
        return Ok(vec![
            solution(p_x, params.scales().k_transfer, params),
            solution(p_x, (oe - om) / v, params),
        ]);
    }
    let lead = (v - u) * (v + u);
    let half_b = v * oe;
    let constant = oe * oe - om * om - u * u * p_x * p_x;
    // Discriminant, rearranged so no large terms cancel when v > u.
    let disc = u * u * oe * oe + lead * (om * om + u * u * p_x * p_x);
    if disc < 0.0 {
        return Ok(Vec::new());
    }
    let q = half_b + disc.sqrt();
    let roots = [q / lead, constant / q];
    Ok(roots
        .iter()
        .map(|&p_y| {
            let sol = solution(p_x, p_y, params);
            if sol.admissible {
                polish(p_x, sol, params)
            } else {
                sol
            }
        })
        .collect())
}

/// Admissible on-shell roots for the given p_x; empty when the process is
/// kinematically forbidden.
pub fn on_shell_py(
    p_x: f64,
    params: &ValidatedParams,
) -> Result<Vec<OnShellSolution>, DispersiveError> {
    Ok(on_shell_roots(p_x, params)?
        .into_iter()
        .filter(|s| s.admissible)
        .collect())
}

fn solution(p_x: f64, p_y: f64, params: &ValidatedParams) -> OnShellSolution {
    let u = params.u;
    let omega_p = (u * u * (p_x * p_x + p_y * p_y) + params.omega_m * params.omega_m).sqrt();
    OnShellSolution {
        p_y,
        omega_p,
        jacobian: (params.v - u * u * p_y / omega_p).abs(),
        admissible: params.v * p_y - params.omega_e > 0.0,
    }
}

/// Newton steps on the unsquared residual Ω_e + ω_p − v p_y.
fn polish(p_x: f64, mut sol: OnShellSolution, params: &ValidatedParams) -> OnShellSolution {
    for _ in 0..3 {
        let r = residual(&sol, params);
        if r == 0.0 {
            break;
        }
        let slope = params.u * params.u * sol.p_y / sol.omega_p - params.v;
        let next = solution(p_x, sol.p_y - r / slope, params);
        if !next.admissible || residual(&next, params).abs() >= r.abs() {
            break;
        }
        sol = next;
    }
    sol
}

/// Ω_e + ω_p − v p_y.
pub fn residual(sol: &OnShellSolution, params: &ValidatedParams) -> f64 {
    params.omega_e + sol.omega_p - params.v * sol.p_y
}

/// Strict: at v = u the process is already forbidden.
pub fn threshold_allowed(params: &ValidatedParams) -> bool {
    params.v > params.u
}

/// W² = |p|²(1 − u²) − Ω_m². At u = 0 this reduces to p_x² + Ω² exactly.
pub fn evanescent_w_squared(p_x: f64, sol: &OnShellSolution, params: &ValidatedParams) -> f64 {
    let damp = 1.0 - params.u * params.u;
    let om = params.omega_m;
    p_x * p_x * damp + (sol.p_y * sol.p_y * damp - om * om)
}

/// g²λ² e^{−2aW} / (m Ω_e W² ω_p): the squared transition amplitude with the
/// box normalisation and the energy delta stripped off.
pub fn squared_amplitude_on_shell(
    p_x: f64,
    sol: &OnShellSolution,
    params: &ValidatedParams,
) -> Result<f64, DispersiveError> {
    if !sol.admissible {
        return Err(DispersiveError::InadmissibleRoot(sol.p_y));
    }
    let w2 = evanescent_w_squared(p_x, sol, params);
    if !(w2 > 0.0) {
        return Err(DispersiveError::EvanescenceViolated(w2));
    }
    let w = w2.sqrt();
    Ok(
        params.coupling_factor() * (-2.0 * params.a * w).exp()
            / (params.omega_e * w2 * sol.omega_p),
    )
}

/// Rate for the dispersive medium, with the contribution of each root branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersiveRate {
    pub total: RateResult,
    /// Index 0: the branch connected to the u = 0 root; index 1: the other root.
    pub per_root: [f64; 2],
}

/// P(u) = (1/2π) ∫ dp_x Σ_roots |A|²/jacobian, with the p_x integral folded
/// onto [0, ∞) by evenness.
pub fn dispersive_rate(
    params: &ValidatedParams,
    settings: &QuadratureSettings,
) -> Result<DispersiveRate, DispersiveError> {
    if !threshold_allowed(params) {
        return Err(DispersiveError::ThresholdViolated {
            v: params.v,
            u: params.u,
        });
    }
    // W ≥ p_x √(1 − u²) bounds the exponential envelope.
    let decay_scale = 1.0 / (2.0 * params.a * (1.0 - params.u * params.u).sqrt());
    let mut per_root = [0.0; 2];
    let mut error = 0.0;
    for (branch, slot) in per_root.iter_mut().enumerate() {
        let integrand = |p_x: f64| -> Result<f64, DispersiveError> {
            let roots = on_shell_roots(p_x, params)?;
            match roots.get(branch) {
                Some(sol) if sol.admissible => {
                    Ok(squared_amplitude_on_shell(p_x, sol, params)? / sol.jacobian)
                }
                _ => Ok(0.0),
            }
        };
        let r = try_integrate_semi_infinite(integrand, decay_scale, settings)?;
        *slot = r.value / PI;
        error += r.error_estimate / PI;
    }
    Ok(DispersiveRate {
        total: RateResult {
            rate: per_root.iter().sum(),
            error_estimate: error,
        },
        per_root,
    })
}

/// The u → 0 limit in closed form, g²λ²/(π m v Ω_e Ω_m) ∫_0^∞ dp_x e^{−2aW}/W²
/// with W² = p_x² + Ω², sharing the quadrature of the u = 0 total rate.
pub fn static_limit_rate(
    params: &ValidatedParams,
    settings: &QuadratureSettings,
) -> Result<RateResult, DispersiveError> {
    let prefactor = params.coupling_factor() / (PI * params.v * params.omega_e * params.omega_m);
    let bare = bare_rate_integral(params, settings)?;
    Ok(RateResult {
        rate: prefactor * bare.value,
        error_estimate: prefactor * bare.error_estimate,
    })
}
