//! Heston model parameters and the per-measure coefficient sets.
//!
//! Under the risk-neutral dynamics the variance process reverts at
//! `kappa_bar = kappa + sigma * lambda` towards `theta_bar = kappa * theta / kappa_bar`.
//! The two exercise probabilities P1 (stock numeraire) and P2 (money-market
//! numeraire) solve the same PDE with measure-specific constants `(a, b, c)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model constants of the Heston stochastic-volatility model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HestonParams {
    pub kappa: f64,
    pub theta: f64,
    pub sigma: f64,
    pub rho: f64,
    /// Market price of volatility risk, Λ.
    pub lambda_mpr: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    P1,
    P2,
}

/// Which reading of the `b_i` constants to use.
///
/// `Consistent` follows Heston (1993): `b1 = kappa_bar - rho*sigma`, `b2 = kappa_bar`.
/// `Literal` adds a further `lambda*sigma` to both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientMode {
    #[default]
    Consistent,
    #[serde(rename = "paper_literal", alias = "literal")]
    Literal,
}

impl CoefficientMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CoefficientMode::Consistent => "consistent",
            CoefficientMode::Literal => "paper_literal",
        }
    }
}

impl std::str::FromStr for CoefficientMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "consistent" => Ok(CoefficientMode::Consistent),
            "paper_literal" | "literal" => Ok(CoefficientMode::Literal),
            other => Err(Error::Config(format!(
                "unknown mode `{other}` (expected consistent | paper_literal)"
            ))),
        }
    }
}

/// Constants `(a, b, c)` of the characteristic-function PDE under one measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureCoefficients {
    pub measure: Measure,
    /// `kappa_bar * theta_bar`, equal to `kappa * theta`.
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub mode: CoefficientMode,
    /// Carried along so the characteristic function needs nothing else.
    pub sigma: f64,
    pub rho: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FellerClass {
    /// `2 kappa theta >= sigma^2`: the variance never reaches zero.
    UnattainableZero,
    /// Zero is attainable and reflecting.
    ReflectingZero,
}

impl HestonParams {
    pub fn new(
        kappa: f64,
        theta: f64,
        sigma: f64,
        rho: f64,
        lambda_mpr: f64,
        r: f64,
    ) -> Result<Self> {
        let params = HestonParams {
            kappa,
            theta,
            sigma,
            rho,
            lambda_mpr,
            r,
        };
        params.validate()?;
        Ok(params)
    }

    /// Parameter set used throughout the numerical experiments:
    /// `kappa = 3, theta = 0.1, sigma = 0.25, rho = -0.8, lambda = 1, r = 0.03`.
    pub fn benchmark() -> Self {
        HestonParams {
            kappa: 3.0,
            theta: 0.1,
            sigma: 0.25,
            rho: -0.8,
            lambda_mpr: 1.0,
            r: 0.03,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        let positive = [
            ("kappa", self.kappa),
            ("theta", self.theta),
            ("sigma", self.sigma),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                bad.push(format!("{name} must be finite and > 0 (got {value})"));
            }
        }
        if !(self.rho.is_finite() && self.rho > -1.0 && self.rho < 1.0) {
            bad.push(format!(
                "rho must lie strictly inside (-1, 1) (got {})",
                self.rho
            ));
        }
        if !self.lambda_mpr.is_finite() {
            bad.push(format!("lambda must be finite (got {})", self.lambda_mpr));
        }
        if !self.r.is_finite() {
            bad.push(format!("r must be finite (got {})", self.r));
        }
        if bad.is_empty() && self.kappa_bar() == 0.0 {
            bad.push("kappa + sigma*lambda must be nonzero".to_string());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(bad))
        }
    }

    pub fn kappa_bar(&self) -> f64 {
        self.kappa + self.sigma * self.lambda_mpr
    }

    pub fn theta_bar(&self) -> f64 {
        self.kappa * self.theta / self.kappa_bar()
    }

    pub fn feller_satisfied(&self) -> bool {
        2.0 * self.kappa * self.theta >= self.sigma * self.sigma
    }

    pub fn feller_classify(&self) -> Result<FellerClass> {
        self.validate()?;
        Ok(if self.feller_satisfied() {
            FellerClass::UnattainableZero
        } else {
            FellerClass::ReflectingZero
        })
    }

    pub fn coefficients(
        &self,
        measure: Measure,
        mode: CoefficientMode,
    ) -> Result<MeasureCoefficients> {
        self.validate()?;
        let kb = self.kappa_bar();
        let a = kb * self.theta_bar();
        let extra = match mode {
            CoefficientMode::Consistent => 0.0,
            CoefficientMode::Literal => self.lambda_mpr * self.sigma,
        };
        let (b, c) = match measure {
            Measure::P1 => (kb + extra - self.rho * self.sigma, 0.5),
            Measure::P2 => (kb + extra, -0.5),
        };
        Ok(MeasureCoefficients {
            measure,
            a,
            b,
            c,
            mode,
            sigma: self.sigma,
            rho: self.rho,
            r: self.r,
        })
    }
}

/// A pricing point. `x = ln(S/K)` is kept in sync by the setters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketState {
    spot: f64,
    strike: f64,
    x: f64,
    pub v: f64,
    pub tau: f64,
}

impl MarketState {
    pub fn new(spot: f64, strike: f64, v: f64, tau: f64) -> Result<Self> {
        let mut bad = Vec::new();
        if !(spot.is_finite() && spot > 0.0) {
            bad.push(format!("spot must be > 0 (got {spot})"));
        }
        if !(strike.is_finite() && strike > 0.0) {
            bad.push(format!("strike must be > 0 (got {strike})"));
        }
        if !(v.is_finite() && v >= 0.0) {
            bad.push(format!("v must be >= 0 (got {v})"));
        }
        if !(tau.is_finite() && tau > 0.0) {
            bad.push(format!("tau must be > 0 (got {tau})"));
        }
        if !bad.is_empty() {
            return Err(Error::InvalidParams(bad));
        }
        Ok(MarketState {
            spot,
            strike,
            x: (spot / strike).ln(),
            v,
            tau,
        })
    }

    pub fn spot(&self) -> f64 {
        self.spot
    }

    pub fn strike(&self) -> f64 {
        self.strike
    }

    pub fn log_moneyness(&self) -> f64 {
        self.x
    }

    pub fn set_spot(&mut self, spot: f64) -> Result<()> {
        *self = MarketState::new(spot, self.strike, self.v, self.tau)?;
        Ok(())
    }

    pub fn set_strike(&mut self, strike: f64) -> Result<()> {
        *self = MarketState::new(self.spot, strike, self.v, self.tau)?;
        Ok(())
    }

    /// Moves the spot so that `ln(S/K) = x`, keeping the strike.
    pub fn set_log_moneyness(&mut self, x: f64) -> Result<()> {
        self.set_spot(self.strike * x.exp())
    }
}

/// On-disk model configuration. Keys are exactly
/// `kappa, theta, sigma, rho, lambda, r, mode`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kappa: f64,
    pub theta: f64,
    pub sigma: f64,
    pub rho: f64,
    pub lambda: f64,
    pub r: f64,
    #[serde(default)]
    pub mode: CoefficientMode,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ModelConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {} column {}: {e}", e.line(), e.column())))?;
        cfg.params()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn params(&self) -> Result<HestonParams> {
        HestonParams::new(
            self.kappa,
            self.theta,
            self.sigma,
            self.rho,
            self.lambda,
            self.r,
        )
    }
}

impl From<(HestonParams, CoefficientMode)> for ModelConfig {
    fn from((p, mode): (HestonParams, CoefficientMode)) -> Self {
        ModelConfig {
            kappa: p.kappa,
            theta: p.theta,
            sigma: p.sigma,
            rho: p.rho,
            lambda: p.lambda_mpr,
            r: p.r,
            mode,
        }
    }
}
