//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qfriction::density::{
    amplitude_kernel_integral, rate_from_density, rho_point, smeared_amplitude, total_rate,
};
use qfriction::dispersive::{
    dispersive_rate, evanescent_w_squared, on_shell_py, residual, DispersiveError,
};
use qfriction::quadrature::{integrate_finite, integrate_semi_infinite_decaying};
use qfriction::{bessel_k0, ModelParams, QuadratureSettings, SmearingWidths, ValidatedParams};
use qfriction_cli::dat;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn params(omega_e_a: f64, f: f64, v: f64) -> ValidatedParams {
    ModelParams::from_scaled(omega_e_a, f, v)
        .validate()
        .unwrap()
}

fn settings() -> QuadratureSettings {
    QuadratureSettings::default()
}

fn within(elapsed: Duration, limit_secs: f64) -> bool {
    elapsed.as_secs_f64() < limit_secs
}

fn kernel_oracle() -> Outcome {
    let s = settings();
    let start = Instant::now();
    let pairs: [(f64, f64); 10] = [
        (0.05, 1.0),
        (0.1, 1.0),
        (0.1, 1.5),
        (0.2, 1.0),
        (0.2, 2.0),
        (0.3, 0.5),
        (0.5, 1.0),
        (0.5, 1.5),
        (0.7, 1.0),
        (0.9, 0.3),
    ];
    let mut worst: f64 = 0.0;
    for (v, f) in pairs {
        let omega = (((1.0 + f) / v).powi(2) - f * f).sqrt();
        for i in 0..10 {
            let a = 0.05 * 100f64.powf(i as f64 / 9.0) / omega;
            let p = params(a, f, v);
            for j in 0..10 {
                let xi = a * 20.0 * j as f64 / 9.0;
                let got = amplitude_kernel_integral(xi, &p, &s).unwrap().value.re;
                let want = 2.0 * bessel_k0(omega * (xi * xi + a * a).sqrt()).unwrap();
                worst = worst.max((got / want - 1.0).abs());
            }
        }
    }
    let elapsed = start.elapsed();

    // The closed form itself, against a trapezoid sum after k = Ω sinh t.
    let mut identity: f64 = 0.0;
    let cases: [(f64, f64, f64); 4] = [
        (0.01, 19.97, 0.0),
        (0.01, 19.97, 0.02),
        (0.5, 2.0, 1.0),
        (1.0, 5.0, 0.3),
    ];
    for (a, omega, xi) in cases {
        let h = 2e-4;
        let mut sum = 0.5 * (-a * omega).exp();
        for i in 1.. {
            let t = i as f64 * h;
            if a * omega * t.cosh() > 745.0 {
                break;
            }
            sum += (omega * xi * t.sinh()).cos() * (-a * omega * t.cosh()).exp();
        }
        let brute = 2.0 * h * sum;
        let closed = 2.0 * bessel_k0(omega * (xi * xi + a * a).sqrt()).unwrap();
        identity = identity.max((brute / closed - 1.0).abs());
    }
    outcome(
        worst <= 1e-8 && identity <= 1e-8 && within(elapsed, 10.0),
        format!(
            "max_rel={worst:.3e} identity_rel={identity:.3e} time={:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn parseval() -> Outcome {
    let s = settings();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (a, f) in [(0.01, 1.0), (0.02, 1.0), (0.01, 1.5), (0.02, 1.5)] {
        let p = params(a, f, 0.1);
        let direct = total_rate(&p, &s).unwrap().rate;
        let integrated = rate_from_density(&p, &s).unwrap().rate;
        worst = worst.max((integrated / direct - 1.0).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-6 && within(elapsed, 5.0),
        format!("max_rel={worst:.3e} time={:.2}s", elapsed.as_secs_f64()),
    )
}

fn eta_and_symmetry() -> Outcome {
    let s = settings();
    let mut eta_dev: f64 = 0.0;
    let mut sym_dev: f64 = 0.0;
    for (a, f) in [(0.01, 1.0), (0.02, 1.5)] {
        let p = params(a, f, 0.1);
        for xi in [0.0, 0.5 * a, 2.0 * a] {
            let w0 = SmearingWidths::new(a / 10.0, a / 10.0, xi, 0.0).unwrap();
            let w1 = SmearingWidths { eta: 7.3, ..w0 };
            let t0 = smeared_amplitude(&w0, &p, &s).unwrap().value.norm();
            let t1 = smeared_amplitude(&w1, &p, &s).unwrap().value.norm();
            eta_dev = eta_dev.max((t1 / t0 - 1.0).abs());
        }
        for i in 1..=40 {
            let xi = 0.25 * a * i as f64;
            let plus = rho_point(xi, &p, &s).unwrap();
            let minus = rho_point(-xi, &p, &s).unwrap();
            sym_dev = sym_dev.max((plus - minus).abs() / plus);
        }
    }
    outcome(
        eta_dev <= 4.0 * f64::EPSILON && sym_dev <= 1e-10,
        format!("eta_rel={eta_dev:.3e} symmetry_rel={sym_dev:.3e}"),
    )
}

fn sigma_limit() -> Outcome {
    let s = settings();
    let p = params(0.01, 1.0, 0.1);
    let xi = p.a;
    let rho = rho_point(xi, &p, &s).unwrap();
    let errors: Vec<f64> = [10.0, 20.0, 40.0]
        .iter()
        .map(|d| {
            let sigma = p.a / d;
            let w = SmearingWidths::new(sigma, sigma, xi, 0.0).unwrap();
            let t = smeared_amplitude(&w, &p, &s).unwrap().value;
            (t.norm_sqr() / (sigma * sigma) / rho - 1.0).abs()
        })
        .collect();
    let order = (errors[0] / errors[1])
        .log2()
        .min((errors[1] / errors[2]).log2());
    outcome(order >= 1.8, format!("order={order:.4} errors={errors:?}"))
}

fn kinematics() -> Outcome {
    let mut worst: f64 = 0.0;
    for ratio in [0.1, 0.5, 0.9] {
        for (f, v) in [(1.0, 0.1), (1.5, 0.3), (0.5, 0.8)] {
            let p = ModelParams::from_scaled(1.0, f, v)
                .with_u(ratio * v)
                .validate()
                .unwrap();
            let omega = p.scales().omega_cap;
            for i in 0..=100 {
                let p_x = 10.0 * omega * i as f64 / 100.0;
                for r in on_shell_py(p_x, &p).unwrap() {
                    worst = worst.max(residual(&r, &p).abs() / (p.omega_e + r.omega_p));
                }
            }
        }
    }
    let still = params(1.0, 1.0, 0.1);
    let exact = on_shell_py(3.0, &still).unwrap()[0].p_y == 2.0 / 0.1;
    let p = ModelParams::from_scaled(1.0, 1.0, 0.1)
        .with_u(0.05)
        .validate()
        .unwrap();
    let root = on_shell_py(0.0, &p).unwrap()[0].p_y;
    let example = (root / (80.0 / 3.0) - 1.0).abs();
    outcome(
        worst <= 1e-12 && exact && example <= 1e-12,
        format!("residual_rel={worst:.3e} static_root_exact={exact} example_rel={example:.3e}"),
    )
}

fn threshold() -> Outcome {
    let s = settings();
    let refused = [0.1, 0.15, 0.5].iter().all(|&u| {
        let p = ModelParams::from_scaled(0.01, 1.0, 0.1)
            .with_u(u)
            .validate()
            .unwrap();
        matches!(
            dispersive_rate(&p, &s),
            Err(DispersiveError::ThresholdViolated { .. })
        )
    });
    let mut missing = 0;
    for ratio in [0.1, 0.5, 0.9, 0.999] {
        let p = ModelParams::from_scaled(0.01, 1.0, 0.1)
            .with_u(ratio * 0.1)
            .validate()
            .unwrap();
        let omega = p.scales().omega_cap;
        for i in 0..=200 {
            if on_shell_py(10.0 * omega * i as f64 / 200.0, &p)
                .unwrap()
                .is_empty()
            {
                missing += 1;
            }
        }
    }
    outcome(
        refused && missing == 0,
        format!("refused_v_le_u={refused} p_x_without_root={missing}"),
    )
}

fn evanescence() -> Outcome {
    let mut least = f64::INFINITY;
    let mut points = 0;
    for ratio in [0.1, 0.5, 0.9] {
        for (f, v) in [(1.0, 0.1), (1.5, 0.1), (1.0, 0.5), (0.3, 0.9)] {
            let p = ModelParams::from_scaled(1.0, f, v)
                .with_u(ratio * v)
                .validate()
                .unwrap();
            let omega = p.scales().omega_cap;
            for i in 0..=200 {
                let p_x = 10.0 * omega * i as f64 / 200.0;
                for r in on_shell_py(p_x, &p).unwrap() {
                    least = least.min(evanescent_w_squared(p_x, &r, &p));
                    points += 1;
                }
            }
        }
    }
    outcome(least > 0.0, format!("min_w2={least:.6e} points={points}"))
}

fn static_limit() -> Outcome {
    let s = settings();
    let p = params(0.01, 1.0, 0.1);
    let still = dispersive_rate(&p, &s).unwrap().total.rate;
    let slow_params = ModelParams {
        u: 1e-3 * p.v,
        ..*p
    }
    .validate()
    .unwrap();
    let slow = dispersive_rate(&slow_params, &s).unwrap().total.rate;
    let continuity = (slow / still - 1.0).abs();
    let ratio = still / total_rate(&p, &s).unwrap().rate;
    let ratio_dev = (ratio - 2.0 / PI).abs() / (2.0 / PI);
    outcome(
        continuity <= 1e-3 && ratio_dev <= 1e-6,
        format!("continuity={continuity:.3e} ratio={ratio:.15} ratio_rel_to_2/pi={ratio_dev:.3e}"),
    )
}

fn figure2() -> Outcome {
    let dir = std::env::temp_dir().join(format!("qfriction-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_qfriction"))
        .arg("figure2")
        .arg("--out")
        .arg(&dir)
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    if !status.status.success() {
        return outcome(false, format!("figure2 exited with {}", status.status));
    }
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    let names_ok = names == ["001-1.dat", "001-15.dat", "002-1.dat", "002-15.dat"];
    let mut asym: f64 = 0.0;
    let mut peaks = Vec::new();
    let mut rows_ok = true;
    for name in ["001-1.dat", "001-15.dat", "002-1.dat", "002-15.dat"] {
        let rows = dat::read(&dir.join(name)).unwrap();
        let n = rows.len();
        rows_ok &= n == 401;
        let top = rows.iter().map(|r| r.1).fold(0.0, f64::max);
        for i in 0..n / 2 {
            let (l, r) = (rows[i], rows[n - 1 - i]);
            rows_ok &= l.0 == -r.0;
            asym = asym.max((l.1 - r.1).abs() / top);
        }
        peaks.push(rows[n / 2].1);
    }
    let _ = std::fs::remove_dir_all(&dir);
    let ordered = peaks.windows(2).all(|w| w[0] > w[1]);
    outcome(
        names_ok && rows_ok && asym <= 1e-8 && ordered && within(elapsed, 30.0),
        format!(
            "files_ok={names_ok} rows_ok={rows_ok} asym={asym:.3e} peaks={peaks:.4?} time={:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn quadrature() -> Outcome {
    let s = settings();
    let pi = 4.0
        * integrate_finite(|x| 1.0 / (1.0 + x * x), 0.0, 1.0, &s)
            .unwrap()
            .value;
    let root_pi = 2.0
        * integrate_semi_infinite_decaying(|x| (-x * x).exp(), 1.0, &s)
            .unwrap()
            .value;
    let two = integrate_finite(f64::sin, 0.0, PI, &s).unwrap().value;
    let third = integrate_finite(|x| x * x, 0.0, 1.0, &s).unwrap().value;
    let worst = [
        (pi, PI),
        (root_pi, PI.sqrt()),
        (two, 2.0),
        (third, 1.0 / 3.0),
    ]
    .iter()
    .map(|(got, want)| (got / want - 1.0).abs())
    .fold(0.0, f64::max);
    outcome(worst <= 1e-10, format!("max_rel={worst:.3e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("kernel_matches_k0_closed_form", kernel_oracle),
        ("density_integral_matches_total_rate", parseval),
        ("eta_invariance_and_xi_symmetry", eta_and_symmetry),
        ("point_limit_convergence_order", sigma_limit),
        ("dispersive_kinematics", kinematics),
        ("threshold", threshold),
        ("evanescence", evanescence),
        ("static_medium_limit", static_limit),
        ("figure2_regeneration", figure2),
        ("quadrature_closed_forms", quadrature),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        failures += usize::from(!result.pass);
        println!(
            "{} {:>2} {name}: {}",
            if result.pass { "PASS" } else { "FAIL" },
            i + 1,
            result.detail
        );
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
