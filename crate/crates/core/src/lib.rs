//! Quantum friction in a scalar model: an atom moving at constant speed
//! parallel to a plane of oscillators.
//!
//! The crate computes the transition amplitude for exciting one atom quantum
//! and one medium quantum, the spatial density ρ(ξ) of medium excitations
//! across the atom's path, the total excitation rate, and the corresponding
//! rate when medium excitations propagate with speed `u`.
//!
//! ```
//! use qfriction::{density, ModelParams, QuadratureSettings};
//!
//! let params = ModelParams::from_scaled(0.02, 1.5, 0.1).validate().unwrap();
//! let settings = QuadratureSettings::default();
//! let rho = density::rho_tilde(0.0, &params, &settings).unwrap();
//! assert!((rho - 1.7146295212920605).abs() < 1e-8);
//! ```

// `!(x > 0.0)` is used on purpose to reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Rule nodes and reference values are kept at the precision they are quoted in.
#![allow(clippy::excessive_precision)]

pub mod density;
pub mod dispersive;
pub mod params;
pub mod quadrature;
pub mod specfun;

pub use params::{
    derive_scales, validate, DerivedScales, ModelParams, ParamsError, ValidatedParams,
};
pub use quadrature::{IntegrationResult, QuadratureError, QuadratureSettings};
pub use specfun::{bessel_k0, gaussian_profile, SmearingWidths, SpecfunError};
