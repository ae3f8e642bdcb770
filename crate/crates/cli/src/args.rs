use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use ncx_core::nalgebra::DMatrix;
use ncx_core::scenarios::MesdParams;
use ncx_core::{build_mesd, validate_fragment, GptFragment, NoiseMap};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    Original,
    Rotated,
    DepolMg,
    CustomJson,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Original => "original",
            Scenario::Rotated => "rotated",
            Scenario::DepolMg => "depol-mg",
            Scenario::CustomJson => "custom-json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseChoice {
    Depolarizing,
    Dephasing,
    Custom,
}

impl NoiseChoice {
    pub fn name(self) -> &'static str {
        match self {
            NoiseChoice::Depolarizing => "depolarizing",
            NoiseChoice::Dephasing => "dephasing",
            NoiseChoice::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    #[arg(long, value_enum, default_value = "original")]
    pub scenario: Scenario,
    /// Fragment JSON for `--scenario custom-json`.
    #[arg(long)]
    pub fragment: Option<PathBuf>,
    /// Angles in degrees instead of radians.
    #[arg(long)]
    pub deg: bool,
    /// Dephasing axis in the ZX plane, measured from X toward Z.
    #[arg(long)]
    pub eta: Option<f64>,
}

impl ScenarioArgs {
    pub fn angle(&self, v: f64) -> f64 {
        if self.deg {
            v.to_radians()
        } else {
            v
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta.map_or(FRAC_PI_2, |e| self.angle(e))
    }

    /// Scenario parameters with `rotated` defaulting `alpha` to `pi/2`.
    pub fn params(&self, theta: f64, alpha: Option<f64>, p: Option<f64>) -> Result<MesdParams, CliError> {
        let default_alpha = match self.scenario {
            Scenario::Rotated => FRAC_PI_2,
            _ => 0.0,
        };
        if self.scenario != Scenario::DepolMg && p.is_some_and(|p| p != 0.0) {
            return Err(CliError::user(format!(
                "--p applies to the depol-mg scenario, not {}",
                self.scenario.name()
            )));
        }
        let params = MesdParams::new(theta)
            .with_alpha(alpha.unwrap_or(default_alpha))
            .with_p(p.unwrap_or(0.0))
            .with_eta(self.eta());
        params.validate().map_err(CliError::user)?;
        Ok(params)
    }

    pub fn custom_fragment(&self, tol: f64) -> Result<GptFragment, CliError> {
        let Some(path) = &self.fragment else {
            return Err(CliError::user("--scenario custom-json requires --fragment PATH"));
        };
        load_fragment(path, tol)
    }
}

/// Single-point scenario selection.
#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Rotation of `M_g` from Z toward X.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Depolarization of `M_g` (depol-mg scenario).
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
}

impl PointArgs {
    pub fn params(&self) -> Result<Option<MesdParams>, CliError> {
        if self.scenario.scenario == Scenario::CustomJson {
            return Ok(None);
        }
        let Some(theta) = self.theta else {
            return Err(CliError::user("--theta is required for built-in scenarios"));
        };
        let s = &self.scenario;
        s.params(s.angle(theta), self.alpha.map(|a| s.angle(a)), self.p).map(Some)
    }

    pub fn fragment(&self, tol: f64) -> Result<GptFragment, CliError> {
        match self.params()? {
            Some(p) => build_mesd(&p).map_err(CliError::user),
            None => self.scenario.custom_fragment(tol),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct NoiseArgs {
    #[arg(long, value_enum, default_value = "depolarizing")]
    pub noise: NoiseChoice,
    /// Square matrix as a JSON array of rows, for `--noise custom`.
    #[arg(long)]
    pub noise_matrix: Option<PathBuf>,
}

impl NoiseArgs {
    pub fn map(&self, f: &GptFragment, eta: f64, tol: f64) -> Result<NoiseMap, CliError> {
        match self.noise {
            NoiseChoice::Depolarizing => NoiseMap::depolarizing(f, tol).map_err(CliError::user),
            NoiseChoice::Dephasing => Ok(NoiseMap::dephasing(eta)),
            NoiseChoice::Custom => {
                let Some(path) = &self.noise_matrix else {
                    return Err(CliError::user("--noise custom requires --noise-matrix PATH"));
                };
                let m = load_matrix(path).map_err(CliError::user)?;
                NoiseMap::custom(m, f.unit(), tol).map_err(CliError::user)
            }
        }
    }
}

pub fn load_fragment(path: &PathBuf, tol: f64) -> Result<GptFragment, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::user(format!("cannot read {}: {e}", path.display())))?;
    let f = GptFragment::from_json_str(&text)
        .map_err(|e| CliError::user(format!("{}: {e}", path.display())))?;
    let report = validate_fragment(&f, tol);
    for w in &report.warnings {
        log::warn!("{w}");
    }
    if !report.is_valid() {
        let lines: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(CliError::user(format!(
            "{} is not a valid fragment:\n  {}",
            path.display(),
            lines.join("\n  ")
        )));
    }
    f.warn_duplicates(tol);
    Ok(f)
}

fn load_matrix(path: &PathBuf) -> Result<DMatrix<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let rows: Vec<Vec<f64>> =
        serde_json::from_str(&text).with_context(|| format!("{}: expected an array of rows", path.display()))?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        bail!("{}: rows must be nonempty and of equal length", path.display());
    }
    Ok(DMatrix::from_fn(n, rows[0].len(), |i, j| rows[i][j]))
}

/// `a:b:step` (inclusive) or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            bail!("grid '{spec}' is not of the form start:stop:step");
        }
        let num = |s: &str| -> Result<f64> {
            let v: f64 = s.trim().parse().with_context(|| format!("'{s}' in grid '{spec}' is not a number"))?;
            if !v.is_finite() {
                bail!("'{s}' in grid '{spec}' is not finite");
            }
            Ok(v)
        };
        let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step <= 0.0 {
            bail!("grid step must be positive, got {step}");
        }
        if b < a {
            bail!("grid '{spec}' ends before it starts");
        }
        let n = ((b - a) / step + 1e-9).floor() as usize + 1;
        if n > 1_000_000 {
            bail!("grid '{spec}' has {n} points");
        }
        Ok((0..n).map(|i| (a + i as f64 * step).min(b)).collect())
    } else {
        spec.split(',')
            .map(|s| {
                let v: f64 = s.trim().parse().with_context(|| format!("'{s}' in grid '{spec}' is not a number"))?;
                if !v.is_finite() {
                    bail!("'{s}' in grid '{spec}' is not finite");
                }
                Ok(v)
            })
            .collect()
    }
}
