//! Physical inputs of the model and the scales derived from them.
//!
//! Everything is in natural units (c = ħ = 1). The atom moves along +y at
//! height `a` above the plane z = 0; the medium is a sheet of oscillators of
//! frequency `omega_m` whose excitations propagate with speed `u`.

use thiserror::Error;

/// Raw model parameters, not yet checked.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Atom–field coupling.
    pub g: f64,
    /// Medium–field coupling.
    pub lambda: f64,
    /// Mass of the electron oscillator.
    pub m: f64,
    /// Atom gap frequency.
    pub omega_e: f64,
    /// Medium oscillator frequency.
    pub omega_m: f64,
    /// Atom speed in units of c.
    pub v: f64,
    /// Atom–plane distance.
    pub a: f64,
    /// Wave speed of medium excitations (0 for decoupled oscillators).
    pub u: f64,
}

impl ModelParams {
    /// Parameters in units where `omega_e = 1`, given the dimensionless
    /// triple `(omega_e * a, f = omega_m / omega_e, v)`. Couplings default to 1.
    pub fn from_scaled(omega_e_a: f64, f_ratio: f64, v: f64) -> Self {
        Self {
            g: 1.0,
            lambda: 1.0,
            m: 1.0,
            omega_e: 1.0,
            omega_m: f_ratio,
            v,
            a: omega_e_a,
            u: 0.0,
        }
    }

    pub fn with_u(mut self, u: f64) -> Self {
        self.u = u;
        self
    }

    pub fn with_couplings(mut self, g: f64, lambda: f64, m: f64) -> Self {
        self.g = g;
        self.lambda = lambda;
        self.m = m;
        self
    }

    pub fn validate(self) -> Result<ValidatedParams, ParamsError> {
        validate(self)
    }
}

/// Parameters that passed [`validate`]. Only constructible through it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidatedParams(ModelParams);

impl ValidatedParams {
    pub fn get(&self) -> &ModelParams {
        &self.0
    }

    pub fn into_inner(self) -> ModelParams {
        self.0
    }

    pub fn scales(&self) -> DerivedScales {
        derive_scales(self)
    }

    /// The coupling combination g²λ²/m shared by every rate and density.
    pub fn coupling_factor(&self) -> f64 {
        let p = &self.0;
        p.g * p.g * p.lambda * p.lambda / p.m
    }
}

impl std::ops::Deref for ValidatedParams {
    type Target = ModelParams;

    fn deref(&self) -> &ModelParams {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("coupling {name} must be finite, got {value}")]
    CouplingNotFinite { name: &'static str, value: f64 },
    #[error("mass m must be positive, got {0}")]
    MassNonPositive(f64),
    #[error("atom frequency omega_e must be positive, got {0}")]
    AtomFrequencyNonPositive(f64),
    #[error("medium frequency omega_m must be positive, got {0}")]
    MediumFrequencyNonPositive(f64),
    #[error("speed v must satisfy 0 < v < 1, got {0}")]
    SpeedOutOfRange(f64),
    #[error("distance a must be positive, got {0}")]
    DistanceNonPositive(f64),
    #[error("medium wave speed u must satisfy 0 <= u < 1, got {0}")]
    WaveSpeedOutOfRange(f64),
}

/// Checks every invariant in a fixed order and reports the first failure.
pub fn validate(params: ModelParams) -> Result<ValidatedParams, ParamsError> {
    for (name, value) in [("g", params.g), ("lambda", params.lambda)] {
        if !value.is_finite() {
            return Err(ParamsError::CouplingNotFinite { name, value });
        }
    }
    // Written as negated comparisons so NaN is rejected too.
    if !(params.m > 0.0 && params.m.is_finite()) {
        return Err(ParamsError::MassNonPositive(params.m));
    }
    if !(params.omega_e > 0.0 && params.omega_e.is_finite()) {
        return Err(ParamsError::AtomFrequencyNonPositive(params.omega_e));
    }
    if !(params.omega_m > 0.0 && params.omega_m.is_finite()) {
        return Err(ParamsError::MediumFrequencyNonPositive(params.omega_m));
    }
    if !(params.v > 0.0 && params.v < 1.0) {
        return Err(ParamsError::SpeedOutOfRange(params.v));
    }
    if !(params.a > 0.0 && params.a.is_finite()) {
        return Err(ParamsError::DistanceNonPositive(params.a));
    }
    if !(params.u >= 0.0 && params.u < 1.0) {
        return Err(ParamsError::WaveSpeedOutOfRange(params.u));
    }
    Ok(ValidatedParams(params))
}

/// Momentum scales fixed by energy conservation in the u = 0 model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedScales {
    /// Ω, the evanescent decay scale: Ω² = ((Ω_e+Ω_m)/v)² − Ω_m².
    pub omega_cap: f64,
    /// Ω², kept separately so identities can be checked without a sqrt round trip.
    pub omega_cap_sq: f64,
    /// (Ω_e+Ω_m)/v, the y-momentum transferred to the medium.
    pub k_transfer: f64,
    /// f = Ω_m/Ω_e.
    pub f_ratio: f64,
}

pub fn derive_scales(params: &ValidatedParams) -> DerivedScales {
    scales_for(params.omega_e, params.omega_m, params.v)
}

/// Same as [`derive_scales`] without validation; accepts the v = 1 limit.
pub fn scales_for(omega_e: f64, omega_m: f64, v: f64) -> DerivedScales {
    let k_transfer = (omega_e + omega_m) / v;
    let omega_cap_sq = k_transfer * k_transfer - omega_m * omega_m;
    DerivedScales {
        omega_cap: omega_cap_sq.sqrt(),
        omega_cap_sq,
        k_transfer,
        f_ratio: omega_m / omega_e,
    }
}
