//! Run settings: built-in defaults, overridden by a JSON config file, overridden by flags.

use std::path::{Path, PathBuf};

use clap::Args;
use heston_cfft::{CoefficientMode, HestonParams, ShiftScheme};
use serde::Deserialize;

/// A configuration problem; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Every key is optional; keys not present fall back to the defaults.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub kappa: Option<f64>,
    pub theta: Option<f64>,
    pub sigma: Option<f64>,
    pub rho: Option<f64>,
    pub lambda: Option<f64>,
    pub r: Option<f64>,
    pub mode: Option<CoefficientMode>,
    #[serde(rename = "S")]
    pub spot: Option<f64>,
    #[serde(rename = "K")]
    pub strike: Option<f64>,
    pub v: Option<f64>,
    pub tau: Option<f64>,
    #[serde(rename = "L")]
    pub length: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub shift: Option<ShiftScheme>,
    pub eta: Option<f64>,
    pub alpha_c: Option<f64>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| {
            ConfigError(format!(
                "{}: line {} column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })
    }
}

/// Model and market flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON config file; flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    /// Market price of volatility risk.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Coefficient reading: consistent or paper_literal.
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// Spot price.
    #[arg(long = "S", global = true)]
    pub spot: Option<f64>,
    /// Strike.
    #[arg(long = "K", global = true)]
    pub strike: Option<f64>,
    /// Initial variance.
    #[arg(long, global = true)]
    pub v: Option<f64>,
    /// Time to maturity in years.
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Width of the log-moneyness grid.
    #[arg(long = "L", global = true)]
    pub length: Option<f64>,
    /// Number of grid points.
    #[arg(long = "N", global = true)]
    pub n: Option<usize>,
    /// Damping exponent for CFFT-II.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Boundary shift: none, linear or exponential.
    #[arg(long, global = true)]
    pub shift: Option<String>,
    /// Carr–Madan frequency step.
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    /// Carr–Madan damping exponent.
    #[arg(long, global = true)]
    pub alpha_c: Option<f64>,
    /// Seed for Monte Carlo runs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Fully resolved settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub params: HestonParams,
    pub mode: CoefficientMode,
    pub spot: f64,
    pub strike: f64,
    pub v: f64,
    pub tau: f64,
    pub length: f64,
    pub n: usize,
    pub alpha: f64,
    /// `None` lets each method pick its natural shift.
    pub shift: Option<ShiftScheme>,
    pub eta: f64,
    pub alpha_c: f64,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            params: HestonParams::benchmark(),
            mode: CoefficientMode::Consistent,
            spot: 100.0,
            strike: 100.0,
            v: 0.1,
            tau: 1.0,
            length: 10.0,
            n: 2000,
            alpha: -2.0,
            shift: None,
            eta: 0.25,
            alpha_c: 1.5,
            seed: 20_240_601,
        }
    }
}

fn parse<T: std::str::FromStr<Err = heston_cfft::Error>>(s: &str) -> Result<T, ConfigError> {
    s.parse()
        .map_err(|e: heston_cfft::Error| ConfigError(e.to_string()))
}

impl Settings {
    pub fn resolve(args: &CommonArgs) -> Result<Self, ConfigError> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let d = Settings::default();
        let p = d.params;
        let pick =
            |flag: Option<f64>, file: Option<f64>, default: f64| flag.or(file).unwrap_or(default);

        let params = HestonParams::new(
            pick(args.kappa, file.kappa, p.kappa),
            pick(args.theta, file.theta, p.theta),
            pick(args.sigma, file.sigma, p.sigma),
            pick(args.rho, file.rho, p.rho),
            pick(args.lambda, file.lambda, p.lambda_mpr),
            pick(args.r, file.r, p.r),
        )
        .map_err(|e| ConfigError(e.to_string()))?;
        let mode = match &args.mode {
            Some(m) => parse(m)?,
            None => file.mode.unwrap_or(d.mode),
        };
        let shift = match &args.shift {
            Some(s) => Some(parse(s)?),
            None => file.shift,
        };
        let s = Settings {
            params,
            mode,
            spot: pick(args.spot, file.spot, d.spot),
            strike: pick(args.strike, file.strike, d.strike),
            v: pick(args.v, file.v, d.v),
            tau: pick(args.tau, file.tau, d.tau),
            length: pick(args.length, file.length, d.length),
            n: args.n.or(file.n).unwrap_or(d.n),
            alpha: pick(args.alpha, file.alpha, d.alpha),
            shift,
            eta: pick(args.eta, file.eta, d.eta),
            alpha_c: pick(args.alpha_c, file.alpha_c, d.alpha_c),
            seed: args.seed.or(file.seed).unwrap_or(d.seed),
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let mut bad = Vec::new();
        for (name, value) in [
            ("S", self.spot),
            ("K", self.strike),
            ("tau", self.tau),
            ("L", self.length),
            ("eta", self.eta),
        ] {
            if !(value.is_finite() && value > 0.0) {
                bad.push(format!("{name} must be finite and > 0 (got {value})"));
            }
        }
        if !(self.v.is_finite() && self.v >= 0.0) {
            bad.push(format!("v must be >= 0 (got {})", self.v));
        }
        if self.n < 4 || !self.n.is_multiple_of(2) {
            bad.push(format!("N must be even and >= 4 (got {})", self.n));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(ConfigError(bad.join("; ")))
        }
    }

    pub fn log_moneyness(&self) -> f64 {
        (self.spot / self.strike).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_are_the_benchmark() {
        let s = Settings::resolve(&CommonArgs::default()).unwrap();
        assert_eq!(s, Settings::default());
    }

    #[test]
    fn flags_beat_file_beats_defaults() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, r#"{{"K": 120, "N": 4000, "mode": "paper_literal"}}"#).unwrap();
        let args = CommonArgs {
            config: Some(f.path().into()),
            n: Some(8000),
            ..CommonArgs::default()
        };
        let s = Settings::resolve(&args).unwrap();
        assert_eq!(s.strike, 120.0);
        assert_eq!(s.n, 8000);
        assert_eq!(s.mode, CoefficientMode::Literal);
        assert_eq!(s.spot, 100.0);
    }

    #[test]
    fn unknown_key_names_the_field_and_line() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "{{\n  \"K\": 100,\n  \"strike\": 3\n}}").unwrap();
        let err = Settings::resolve(&CommonArgs {
            config: Some(f.path().into()),
            ..CommonArgs::default()
        })
        .unwrap_err();
        assert!(
            err.0.contains("strike") && err.0.contains("line 3"),
            "{}",
            err.0
        );
    }

    #[test]
    fn odd_grid_is_rejected() {
        let err = Settings::resolve(&CommonArgs {
            n: Some(2001),
            ..CommonArgs::default()
        })
        .unwrap_err();
        assert!(err.0.contains("N must be even"));
    }
}
