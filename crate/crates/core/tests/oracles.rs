//! Library results against brute-force evaluations that share no code with
//! the adaptive engine or the Bessel routines.

use std::f64::consts::PI;

use qfriction::density::{
    amplitude_kernel_integral, amplitude_kernel_integral_real_axis, bare_rate_integral,
    rate_from_density, rho_point, rho_tilde, smeared_amplitude, total_rate,
};
use qfriction::dispersive::{dispersive_rate, static_limit_rate};
use qfriction::quadrature::{integrate_finite, integrate_semi_infinite_decaying};
use qfriction::{bessel_k0, gaussian_profile, ModelParams, QuadratureSettings, SmearingWidths};

/// Trapezoid sum h Σ' f(ih) over i ≥ 0 until `stop(t)`, halving the weight at t = 0.
fn trapezoid(h: f64, mut f: impl FnMut(f64) -> f64, stop: impl Fn(f64) -> bool) -> f64 {
    let mut sum = 0.5 * f(0.0);
    let mut i = 1u64;
    loop {
        let t = i as f64 * h;
        if stop(t) {
            return h * sum;
        }
        sum += f(t);
        i += 1;
    }
}

/// I(ξ) = 2 ∫_0^∞ cos(Ωξ sinh t) e^{−aΩ cosh t} dt, after k = Ω sinh t.
fn kernel_brute_force(xi: f64, a: f64, omega: f64) -> f64 {
    let h = 2e-4;
    2.0 * trapezoid(
        h,
        |t| (omega * xi * t.sinh()).cos() * (-a * omega * t.cosh()).exp(),
        |t| a * omega * t.cosh() > 745.0,
    )
}

/// (1/Ω) ∫_0^∞ e^{−2aΩ cosh t}/cosh t dt.
fn bare_brute_force(a: f64, omega: f64) -> f64 {
    let h = 1e-3;
    trapezoid(
        h,
        |t| (-2.0 * a * omega * t.cosh()).exp() / t.cosh(),
        |t| 2.0 * a * omega * t.cosh() > 745.0,
    ) / omega
}

fn params(omega_e_a: f64, f: f64, v: f64) -> qfriction::ValidatedParams {
    ModelParams::from_scaled(omega_e_a, f, v)
        .validate()
        .unwrap()
}

#[test]
fn kernel_identity_against_substituted_trapezoid() {
    let s = QuadratureSettings::default();
    for (a_scaled, f, v) in [
        (0.01, 1.0, 0.1),
        (0.02, 1.5, 0.1),
        (0.2, 1.0, 0.5),
        (1.0, 0.5, 0.9),
    ] {
        let p = params(a_scaled, f, v);
        let omega = p.scales().omega_cap;
        for xi_over_a in [0.0, 0.3, 1.0, 2.5] {
            let xi = xi_over_a * p.a;
            let brute = kernel_brute_force(xi, p.a, omega);
            let closed = 2.0 * bessel_k0(omega * (xi * xi + p.a * p.a).sqrt()).unwrap();
            let library = amplitude_kernel_integral(xi, &p, &s).unwrap().value.re;
            assert!(
                (brute / closed - 1.0).abs() < 1e-9,
                "identity at {a_scaled},{f},{v},{xi}: {brute} vs {closed}"
            );
            assert!(
                (library / brute - 1.0).abs() < 1e-9,
                "library at {a_scaled},{f},{v},{xi}: {library} vs {brute}"
            );
        }
    }
}

#[test]
fn shifted_contour_agrees_with_real_axis_route() {
    let s = QuadratureSettings::default();
    let p = params(0.5, 1.0, 0.3);
    for xi in [0.0, 0.1, 0.5, 1.0] {
        let shifted = amplitude_kernel_integral(xi, &p, &s).unwrap().value;
        let real = amplitude_kernel_integral_real_axis(xi, &p, &s)
            .unwrap()
            .value;
        assert!(((shifted - real).norm() / real.norm()) < 1e-9, "xi = {xi}");
        assert!(shifted.im.abs() <= 1e-12 * shifted.re);
    }
}

#[test]
fn bare_rate_integral_against_substituted_trapezoid() {
    let s = QuadratureSettings::default();
    let p = params(0.01, 1.0, 0.1);
    let got = bare_rate_integral(&p, &s).unwrap().value;
    let brute = bare_brute_force(p.a, p.scales().omega_cap);
    assert!((got / brute - 1.0).abs() < 1e-10, "{got} vs {brute}");
    assert!((got / 0.037_334_761_696_470_88 - 1.0).abs() < 1e-10);
    for (a, f, v) in [(0.02, 1.5, 0.1), (0.3, 0.7, 0.6), (2.0, 1.0, 0.9)] {
        let p = params(a, f, v);
        let got = bare_rate_integral(&p, &s).unwrap().value;
        let brute = bare_brute_force(p.a, p.scales().omega_cap);
        assert!(
            (got / brute - 1.0).abs() < 1e-10,
            "{a},{f},{v}: {got} vs {brute}"
        );
    }
}

#[test]
fn bessel_k0_against_adaptive_integral() {
    let s = QuadratureSettings::default();
    for i in 0..=40 {
        let x = 0.05 * 200f64.powf(i as f64 / 40.0);
        let integral = integrate_semi_infinite_decaying(|t| (-x * t.cosh()).exp(), 1.0 / x, &s)
            .unwrap()
            .value;
        let k0 = bessel_k0(x).unwrap();
        assert!(
            (integral / k0 - 1.0).abs() < 1e-10,
            "x = {x}: {integral} vs {k0}"
        );
    }
}

#[test]
fn gaussian_profile_is_normalised() {
    let s = QuadratureSettings::default();
    for sigma in [0.1, 1.0, 10.0] {
        let half = integrate_semi_infinite_decaying(
            |x| gaussian_profile(sigma, x).unwrap().powi(2),
            sigma,
            &s,
        )
        .unwrap()
        .value;
        assert!(
            (2.0 * half - 1.0).abs() < 1e-10,
            "sigma = {sigma}: {}",
            2.0 * half
        );
    }
}

#[test]
fn density_integrates_to_total_rate() {
    let s = QuadratureSettings::default();
    for (a, f) in [(0.01, 1.0), (0.02, 1.0), (0.01, 1.5), (0.02, 1.5)] {
        let p = params(a, f, 0.1);
        let direct = total_rate(&p, &s).unwrap();
        let integrated = rate_from_density(&p, &s).unwrap();
        assert!((integrated.rate / direct.rate - 1.0).abs() < 1e-6);
        assert!(integrated.rate >= 0.0 && integrated.error_estimate >= 0.0);
    }
}

#[test]
fn density_halves_carry_equal_weight() {
    let s = QuadratureSettings::default();
    let p = params(0.02, 1.5, 0.1);
    let reach = p.a + 30.0 / p.scales().omega_cap;
    let rho = |xi: f64| rho_point(xi, &p, &s).unwrap();
    let left = integrate_finite(rho, -reach, 0.0, &s).unwrap().value;
    let right = integrate_finite(rho, 0.0, reach, &s).unwrap().value;
    assert!((left / right - 1.0).abs() < 1e-12);
    let full = rate_from_density(&p, &s).unwrap().rate;
    assert!((p.v * (left + right) / full - 1.0).abs() < 1e-9);
}

#[test]
fn peak_density_is_twice_squared_k0() {
    let s = QuadratureSettings::default();
    let p = params(0.02, 1.5, 0.1);
    let k0 = bessel_k0(p.scales().omega_cap * p.a).unwrap();
    let got = rho_tilde(0.0, &p, &s).unwrap();
    assert!((got / (2.0 * k0 * k0) - 1.0).abs() < 1e-12);
    assert!((got - 1.714_629_521_292_060_5).abs() < 1e-10);
}

#[test]
fn smeared_amplitude_approaches_point_density() {
    let s = QuadratureSettings::default();
    let p = params(0.01, 1.0, 0.1);
    let xi = 0.5 * p.a;
    let rho = rho_point(xi, &p, &s).unwrap();
    let ratio_error = |sigma: f64| {
        let w = SmearingWidths::new(sigma, sigma, xi, 0.4).unwrap();
        let t = smeared_amplitude(&w, &p, &s).unwrap().value;
        (t.norm_sqr() / (sigma * sigma) / rho - 1.0).abs()
    };
    assert!(ratio_error(p.a / 100.0) < 1e-2);
    let errors: Vec<f64> = [10.0, 20.0, 40.0]
        .iter()
        .map(|d| ratio_error(p.a / d))
        .collect();
    for w in errors.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.8, "{errors:?}");
    }
}

#[test]
fn smeared_amplitude_modulus_ignores_eta() {
    let s = QuadratureSettings::default();
    let p = params(0.02, 1.0, 0.1);
    let at = |eta: f64| {
        let w = SmearingWidths::new(p.a / 5.0, p.a / 3.0, 0.7 * p.a, eta).unwrap();
        smeared_amplitude(&w, &p, &s).unwrap().value
    };
    let base = at(0.0);
    for eta in [7.3, -2.0, 1e3] {
        let t = at(eta);
        assert!((t.norm() / base.norm() - 1.0).abs() <= 4.0 * f64::EPSILON);
        let turn = (t / base).arg();
        let expected = (eta * p.scales().k_transfer).rem_euclid(2.0 * PI);
        let diff = (turn - expected).rem_euclid(2.0 * PI);
        assert!(diff.min(2.0 * PI - diff) < 1e-9);
    }
}

#[test]
fn dispersive_rate_is_continuous_at_zero_wave_speed() {
    let s = QuadratureSettings::default();
    let p = params(0.01, 1.0, 0.1);
    let still = dispersive_rate(&p, &s).unwrap().total.rate;
    let slow = dispersive_rate(
        &ModelParams {
            u: 1e-3 * p.v,
            ..*p
        }
        .validate()
        .unwrap(),
        &s,
    )
    .unwrap()
    .total
    .rate;
    assert!((slow / still - 1.0).abs() <= 1e-3);
    let limit = static_limit_rate(&p, &s).unwrap().rate;
    assert!((still / limit - 1.0).abs() < 1e-9);
    let total = total_rate(&p, &s).unwrap().rate;
    assert!((still / total - 2.0 / PI).abs() < 1e-6 * 2.0 / PI);
}

#[test]
fn dispersive_rate_drops_as_waves_speed_up() {
    let s = QuadratureSettings::default();
    let rates: Vec<f64> = [0.0, 0.02, 0.05, 0.08]
        .iter()
        .map(|&u| {
            let p = ModelParams::from_scaled(0.01, 1.0, 0.1)
                .with_u(u)
                .validate()
                .unwrap();
            dispersive_rate(&p, &s).unwrap().total.rate
        })
        .collect();
    assert!(rates.windows(2).all(|w| w[1] < w[0]), "{rates:?}");
    assert!(rates.iter().all(|&r| r > 0.0));
}
