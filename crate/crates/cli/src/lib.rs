//! Command implementations behind the `qfriction` binary: density curves,
//! rates, the four reference curves and the self-verification report.

pub mod config;
pub mod dat;
pub mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use qfriction::density::{self, DensityError, DensityProfile};
use qfriction::dispersive::{self, DispersiveError};
use qfriction::{ParamsError, QuadratureError};
use thiserror::Error;

pub use config::{Command, Grid, Overrides, PhysicalInputs, RunConfig};
pub use verify::{run_verify, Check, VerifyReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid parameters: {0}")]
    Params(#[from] ParamsError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0} verification check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Config(_) | CliError::Params(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<QuadratureError> for CliError {
    fn from(e: QuadratureError) -> Self {
        match e {
            QuadratureError::InvalidSettings(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<DensityError> for CliError {
    fn from(e: DensityError) -> Self {
        match e {
            DensityError::UnorderedGrid => CliError::Config(e.to_string()),
            DensityError::Quadrature(q) => q.into(),
            DensityError::TailBoundExceeded { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<DispersiveError> for CliError {
    fn from(e: DispersiveError) -> Self {
        match e {
            DispersiveError::ThresholdViolated { .. }
            | DispersiveError::DegenerateKinematics(_) => CliError::Config(e.to_string()),
            DispersiveError::Quadrature(q) => q.into(),
            DispersiveError::Density(d) => d.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

/// The four reference curves: file name, Ω_e a, f.
pub const FIGURE2_CURVES: [(&str, f64, f64); 4] = [
    ("001-1.dat", 0.01, 1.0),
    ("002-1.dat", 0.02, 1.0),
    ("001-15.dat", 0.01, 1.5),
    ("002-15.dat", 0.02, 1.5),
];

fn comment_lines(inputs: &PhysicalInputs, grid: &Grid, config: &RunConfig) -> Vec<String> {
    vec![
        format!(
            "omega_e_a = {:.16e}, f = {:.16e}, v = {:.16e}, u = {:.16e}",
            inputs.omega_e_a, inputs.f_ratio, inputs.v, inputs.u
        ),
        format!(
            "g = {:.16e}, lambda = {:.16e}, m = {:.16e}",
            inputs.g, inputs.lambda, inputs.m
        ),
        format!(
            "xi_range = {:.16e}:{:.16e}, points = {}, rel_tol = {:.16e}",
            grid.lo, grid.hi, grid.points, config.settings.rel_tol
        ),
        "columns: omega_e*xi rho_tilde".to_string(),
    ]
}

fn profile_text(profile: &DensityProfile, comments: &[String]) -> String {
    let rows: Vec<(f64, f64)> = profile
        .points
        .iter()
        .map(|p| (p.xi_scaled, p.rho_tilde))
        .collect();
    dat::render(&rows, comments)
}

fn compute_profile(
    inputs: &PhysicalInputs,
    config: &RunConfig,
) -> Result<DensityProfile, CliError> {
    let params = inputs.validated()?;
    Ok(density::density_profile(
        &params,
        &config.grid.abscissas(),
        &config.settings,
    )?)
}

/// Samples ρ̃ on the configured grid. Writes the `.dat` file to the output
/// path when one is set, otherwise to `stdout`.
pub fn run_density(config: &RunConfig, stdout: &mut dyn Write) -> Result<DensityProfile, CliError> {
    let profile = compute_profile(&config.params, config)?;
    let comments = if config.comments {
        comment_lines(&config.params, &config.grid, config)
    } else {
        Vec::new()
    };
    let text = profile_text(&profile, &comments);
    match &config.output_path {
        Some(path) => dat::write_atomic(path, &text).map_err(|e| CliError::io(path, e))?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e))?,
    }
    Ok(profile)
}

/// Total rate from the momentum integral and from integrating the density.
pub fn run_rate(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let params = config.params.validated()?;
    let direct = density::total_rate(&params, &config.settings)?;
    let from_density = density::rate_from_density(&params, &config.settings)?;
    let relative = (from_density.rate - direct.rate).abs() / direct.rate;
    let text = format!(
        "total_rate={:.16e} error_estimate={:.16e}\n\
         rate_from_density={:.16e} error_estimate={:.16e}\n\
         relative_difference={:.16e}\n",
        direct.rate,
        direct.error_estimate,
        from_density.rate,
        from_density.error_estimate,
        relative
    );
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

/// Rate with a dispersive medium of wave speed u, next to its u → 0 limit.
pub fn run_dispersive_rate(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let params = config.params.validated()?;
    let rate = dispersive::dispersive_rate(&params, &config.settings)?;
    let limit = dispersive::static_limit_rate(&params, &config.settings)?;
    let text = format!(
        "dispersive_rate={:.16e} error_estimate={:.16e}\n\
         branch_0={:.16e}\nbranch_1={:.16e}\n\
         static_limit={:.16e}\nratio_to_static_limit={:.16e}\n",
        rate.total.rate,
        rate.total.error_estimate,
        rate.per_root[0],
        rate.per_root[1],
        limit.rate,
        rate.total.rate / limit.rate
    );
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

/// Writes the four reference curves into the output directory (default:
/// current directory). Ω_e a and f are fixed per curve; v, couplings, grid
/// and tolerance come from the configuration.
pub fn run_figure2(config: &RunConfig, stdout: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    let dir = config
        .output_path
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut written = Vec::with_capacity(FIGURE2_CURVES.len());
    for (name, omega_e_a, f_ratio) in FIGURE2_CURVES {
        let inputs = PhysicalInputs {
            omega_e_a,
            f_ratio,
            u: 0.0,
            ..config.params
        };
        let profile = compute_profile(&inputs, config)?;
        let comments = if config.comments {
            comment_lines(&inputs, &config.grid, config)
        } else {
            Vec::new()
        };
        let path = dir.join(name);
        dat::write_atomic(&path, &profile_text(&profile, &comments))
            .map_err(|e| CliError::io(&path, e))?;
        let peak = profile
            .points
            .iter()
            .map(|p| p.rho_tilde)
            .fold(f64::NEG_INFINITY, f64::max);
        writeln!(
            stdout,
            "wrote {} max_rho_tilde={:.16e}",
            path.display(),
            peak
        )
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
        written.push(path);
    }
    Ok(written)
}

/// Dispatches on the configured command.
pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    match config.command {
        Command::Density => run_density(config, stdout).map(|_| ()),
        Command::Rate => run_rate(config, stdout),
        Command::DispersiveRate => run_dispersive_rate(config, stdout),
        Command::Figure2 => run_figure2(config, stdout).map(|_| ()),
        Command::Verify => {
            let report = run_verify(config)?;
            stdout
                .write_all(report.render().as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
            match report.failures() {
                0 => Ok(()),
                n => Err(CliError::ChecksFailed(n)),
            }
        }
    }
}
