use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qfriction_cli::config::parse_range;
use qfriction_cli::{run, CliError, Command, Overrides, RunConfig};

/// Excitation density and transition rates for an atom moving above a
/// polarisable plane.
#[derive(Parser, Debug)]
#[command(name = "qfriction", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Sample the normalised density on a grid of Ω_e ξ and write a .dat file.
    Density(Common),
    /// Total rate from the momentum integral and from the integrated density.
    Rate(Common),
    /// Rate for a medium whose excitations travel at speed u.
    DispersiveRate(Common),
    /// Write the four reference curves 001-1.dat, 002-1.dat, 001-15.dat and
    /// 002-15.dat into the --out directory. Ω_e a and f are fixed per curve.
    Figure2(Common),
    /// Run the self-verification checks and print one CHECK line each.
    Verify(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Flat key = value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Atom-plane distance times the atomic level spacing, Ω_e a.
    #[arg(long)]
    omega_e_a: Option<f64>,
    /// Frequency ratio Ω_m / Ω_e.
    #[arg(long)]
    f: Option<f64>,
    /// Atom speed in units of c.
    #[arg(long)]
    v: Option<f64>,
    /// Wave speed of the medium excitations, in units of c.
    #[arg(long)]
    u: Option<f64>,
    /// Atom coupling.
    #[arg(long)]
    g: Option<f64>,
    /// Medium coupling.
    #[arg(long)]
    lambda: Option<f64>,
    /// Field mass scale.
    #[arg(long)]
    m: Option<f64>,
    /// Range of Ω_e ξ as lo:hi.
    #[arg(long, allow_hyphen_values = true)]
    xi_range: Option<String>,
    /// Number of grid points, at least 2.
    #[arg(long)]
    points: Option<usize>,
    /// Output file (density) or directory (figure2).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative tolerance for every integral.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Prefix .dat files with '#' comment lines recording the inputs.
    #[arg(long)]
    comments: bool,
}

impl Common {
    fn overrides(&self) -> Result<Overrides, CliError> {
        let flags = Overrides {
            omega_e_a: self.omega_e_a,
            f_ratio: self.f,
            v: self.v,
            u: self.u,
            g: self.g,
            lambda: self.lambda,
            m: self.m,
            xi_range: self.xi_range.as_deref().map(parse_range).transpose()?,
            points: self.points,
            out: self.out.clone(),
            rel_tol: self.rel_tol,
            comments: self.comments.then_some(true),
        };
        Ok(match &self.config {
            Some(path) => flags.or(Overrides::from_file(path)?),
            None => flags,
        })
    }
}

fn config_from(cli: Cli) -> Result<RunConfig, CliError> {
    let (command, common) = match cli.command {
        Sub::Density(c) => (Command::Density, c),
        Sub::Rate(c) => (Command::Rate, c),
        Sub::DispersiveRate(c) => (Command::DispersiveRate, c),
        Sub::Figure2(c) => (Command::Figure2, c),
        Sub::Verify(c) => (Command::Verify, c),
    };
    RunConfig::resolve(command, common.overrides()?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = config_from(cli).and_then(|config| run(&config, &mut std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qfriction: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
