//! Run configuration: command-line flags layered over an optional flat
//! `key = value` file layered over built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qfriction::{ModelParams, ParamsError, QuadratureSettings, ValidatedParams};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Density,
    Rate,
    DispersiveRate,
    Figure2,
    Verify,
}

/// Physical inputs in the dimensionless (Ω_e a, f, v) parameterisation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalInputs {
    pub omega_e_a: f64,
    pub f_ratio: f64,
    pub v: f64,
    pub u: f64,
    pub g: f64,
    pub lambda: f64,
    pub m: f64,
}

impl Default for PhysicalInputs {
    fn default() -> Self {
        Self {
            omega_e_a: 0.01,
            f_ratio: 1.0,
            v: 0.1,
            u: 0.0,
            g: 1.0,
            lambda: 1.0,
            m: 1.0,
        }
    }
}

impl PhysicalInputs {
    pub fn model(&self) -> ModelParams {
        ModelParams::from_scaled(self.omega_e_a, self.f_ratio, self.v)
            .with_u(self.u)
            .with_couplings(self.g, self.lambda, self.m)
    }

    pub fn validated(&self) -> Result<ValidatedParams, ParamsError> {
        self.model().validate()
    }
}

/// Uniform grid in Ω_e ξ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            lo: -0.1,
            hi: 0.1,
            points: 401,
        }
    }
}

impl Grid {
    pub fn check(&self) -> Result<(), CliError> {
        if self.points < 2 {
            return Err(CliError::Config(format!(
                "need at least 2 grid points, got {}",
                self.points
            )));
        }
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo >= self.hi {
            return Err(CliError::Config(format!(
                "xi range must satisfy lo < hi, got {}:{}",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    /// Abscissas (lo·(n−1−i) + hi·i)/(n−1). For lo = −hi the grid is exactly
    /// mirror-symmetric and contains 0 when n is odd.
    pub fn abscissas(&self) -> Vec<f64> {
        let n = self.points - 1;
        let denom = n as f64;
        (0..=n)
            .map(|i| (self.lo * (n - i) as f64 + self.hi * i as f64) / denom)
            .collect()
    }
}

impl FromStr for Grid {
    type Err = CliError;

    /// Parses the `lo:hi` range only; the point count comes separately.
    fn from_str(s: &str) -> Result<Self, CliError> {
        let (lo, hi) = parse_range(s)?;
        Ok(Grid {
            lo,
            hi,
            ..Grid::default()
        })
    }
}

pub fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("range must be lo:hi, got {s:?}")))?;
    Ok((parse_number(lo.trim())?, parse_number(hi.trim())?))
}

fn parse_number<T: FromStr>(s: &str) -> Result<T, CliError> {
    s.parse()
        .map_err(|_| CliError::Config(format!("cannot parse number {s:?}")))
}

/// Every optional input, whatever its source.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub omega_e_a: Option<f64>,
    pub f_ratio: Option<f64>,
    pub v: Option<f64>,
    pub u: Option<f64>,
    pub g: Option<f64>,
    pub lambda: Option<f64>,
    pub m: Option<f64>,
    pub xi_range: Option<(f64, f64)>,
    pub points: Option<usize>,
    pub out: Option<PathBuf>,
    pub rel_tol: Option<f64>,
    pub comments: Option<bool>,
}

impl Overrides {
    /// Fields set in `self` win over those in `fallback`.
    pub fn or(self, fallback: Overrides) -> Overrides {
        Overrides {
            omega_e_a: self.omega_e_a.or(fallback.omega_e_a),
            f_ratio: self.f_ratio.or(fallback.f_ratio),
            v: self.v.or(fallback.v),
            u: self.u.or(fallback.u),
            g: self.g.or(fallback.g),
            lambda: self.lambda.or(fallback.lambda),
            m: self.m.or(fallback.m),
            xi_range: self.xi_range.or(fallback.xi_range),
            points: self.points.or(fallback.points),
            out: self.out.or(fallback.out),
            rel_tol: self.rel_tol.or(fallback.rel_tol),
            comments: self.comments.or(fallback.comments),
        }
    }

    /// Parses flat `key = value` text. Blank lines and lines starting with
    /// `#` are ignored; keys are the long flag names.
    pub fn parse_file_text(text: &str) -> Result<Overrides, CliError> {
        let mut o = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let value = value.trim();
            match key.trim().trim_start_matches("--") {
                "omega-e-a" => o.omega_e_a = Some(parse_number(value)?),
                "f" => o.f_ratio = Some(parse_number(value)?),
                "v" => o.v = Some(parse_number(value)?),
                "u" => o.u = Some(parse_number(value)?),
                "g" => o.g = Some(parse_number(value)?),
                "lambda" => o.lambda = Some(parse_number(value)?),
                "m" => o.m = Some(parse_number(value)?),
                "xi-range" => o.xi_range = Some(parse_range(value)?),
                "points" => o.points = Some(parse_number(value)?),
                "out" => o.out = Some(PathBuf::from(value)),
                "rel-tol" => o.rel_tol = Some(parse_number(value)?),
                "comments" => o.comments = Some(parse_number(value)?),
                other => {
                    return Err(CliError::Config(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Overrides, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_file_text(&text)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: PhysicalInputs,
    pub grid: Grid,
    /// File for `density`, directory for `figure2`; stdout/current dir when absent.
    pub output_path: Option<PathBuf>,
    pub settings: QuadratureSettings,
    /// Prefix `.dat` output with `#` comment lines.
    pub comments: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            params: PhysicalInputs::default(),
            grid: Grid::default(),
            output_path: None,
            settings: QuadratureSettings::default(),
            comments: false,
        }
    }

    /// Applies overrides on top of the defaults and checks the result.
    pub fn resolve(command: Command, o: Overrides) -> Result<Self, CliError> {
        let d = PhysicalInputs::default();
        let params = PhysicalInputs {
            omega_e_a: o.omega_e_a.unwrap_or(d.omega_e_a),
            f_ratio: o.f_ratio.unwrap_or(d.f_ratio),
            v: o.v.unwrap_or(d.v),
            u: o.u.unwrap_or(d.u),
            g: o.g.unwrap_or(d.g),
            lambda: o.lambda.unwrap_or(d.lambda),
            m: o.m.unwrap_or(d.m),
        };
        let dg = Grid::default();
        let (lo, hi) = o.xi_range.unwrap_or((dg.lo, dg.hi));
        let grid = Grid {
            lo,
            hi,
            points: o.points.unwrap_or(dg.points),
        };
        grid.check()?;
        let mut settings = QuadratureSettings::default();
        if let Some(rel_tol) = o.rel_tol {
            settings.rel_tol = rel_tol;
        }
        settings
            .check()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Self {
            command,
            params,
            grid,
            output_path: o.out,
            settings,
            comments: o.comments.unwrap_or(false),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_mirror_symmetric() {
        let g = Grid::default();
        let xs = g.abscissas();
        assert_eq!(xs.len(), 401);
        assert_eq!(xs[0], -0.1);
        assert_eq!(xs[400], 0.1);
        assert_eq!(xs[200], 0.0);
        for i in 0..401 {
            assert_eq!(xs[i], -xs[400 - i]);
        }
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_single_point_and_empty_range() {
        let o = Overrides {
            points: Some(1),
            ..Default::default()
        };
        assert!(matches!(
            RunConfig::resolve(Command::Density, o),
            Err(CliError::Config(_))
        ));
        let o = Overrides {
            xi_range: Some((0.1, 0.1)),
            ..Default::default()
        };
        assert!(matches!(
            RunConfig::resolve(Command::Density, o),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn file_values_lose_to_flags() {
        let file = Overrides::parse_file_text(
            "# comment\nomega-e-a = 0.02\nf=1.5\nxi-range = -0.2:0.2\npoints = 11\n\nrel-tol = 1e-8\n",
        )
        .unwrap();
        let flags = Overrides {
            f_ratio: Some(1.0),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(Command::Density, flags.or(file)).unwrap();
        assert_eq!(cfg.params.omega_e_a, 0.02);
        assert_eq!(cfg.params.f_ratio, 1.0);
        assert_eq!(cfg.params.v, 0.1);
        assert_eq!((cfg.grid.lo, cfg.grid.hi, cfg.grid.points), (-0.2, 0.2, 11));
        assert_eq!(cfg.settings.rel_tol, 1e-8);
    }

    #[test]
    fn bad_file_lines() {
        assert!(Overrides::parse_file_text("nonsense").is_err());
        assert!(Overrides::parse_file_text("speed = 3").is_err());
        assert!(Overrides::parse_file_text("v = fast").is_err());
        assert!(Overrides::parse_file_text("xi-range = 0.1").is_err());
    }
}
