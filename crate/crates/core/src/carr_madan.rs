//! Carr–Madan log-strike FFT pricer, kept as the comparison baseline.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::charfn::{kernel_psi, moment_finite};
use crate::error::{Error, Result};
use crate::model::{CoefficientMode, HestonParams, Measure};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarrMadanConfig {
    pub n: usize,
    /// Frequency step; the log-strike spacing is `2π / (N η)`.
    pub eta: f64,
    pub alpha_c: f64,
}

impl Default for CarrMadanConfig {
    fn default() -> Self {
        Self {
            n: 4096,
            eta: 0.25,
            alpha_c: 1.5,
        }
    }
}

impl CarrMadanConfig {
    pub fn with_n(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn log_strike_step(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.eta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CarrMadanPrices {
    pub log_strikes: Vec<f64>,
    pub prices: Vec<f64>,
}

impl CarrMadanPrices {
    pub fn strikes(&self) -> impl Iterator<Item = f64> + '_ {
        self.log_strikes.iter().map(|k| k.exp())
    }

    /// Price on the center node, which sits exactly on the requested strike.
    pub fn center(&self) -> f64 {
        self.prices[self.prices.len() / 2]
    }
}

/// Call prices on the log-strike grid `ln K + (j − N/2) λ`, `j = 0 … N−1`.
pub fn carr_madan_prices(
    cfg: &CarrMadanConfig,
    spot: f64,
    strike: f64,
    v: f64,
    tau: f64,
    params: &HestonParams,
    mode: CoefficientMode,
) -> Result<CarrMadanPrices> {
    let mut bad = Vec::new();
    if !(spot > 0.0) {
        bad.push(format!("spot must be positive, got {spot}"));
    }
    if !(strike > 0.0) {
        bad.push(format!("strike must be positive, got {strike}"));
    }
    if !(tau > 0.0) {
        bad.push(format!("tau must be positive, got {tau}"));
    }
    if !bad.is_empty() {
        return Err(Error::InvalidParams(bad));
    }
    if cfg.n < 4 || !cfg.n.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!(
            "N must be even and at least 4, got {}",
            cfg.n
        )));
    }
    if !(cfg.eta > 0.0 && cfg.eta.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "eta must be positive, got {}",
            cfg.eta
        )));
    }
    let alpha = cfg.alpha_c;
    let coeffs = params.coefficients(Measure::P2, mode)?;
    if !(alpha > 0.0) || !moment_finite(alpha + 1.0, v, &coeffs, tau) {
        return Err(Error::DampingInfeasible(format!(
            "alpha_c > 0 with finite E[S_T^(alpha_c+1)], got {alpha}"
        )));
    }

    let n = cfg.n;
    let lambda = cfg.log_strike_step();
    let k0 = strike.ln() - (n / 2) as f64 * lambda;
    let disc = (-params.r * tau).exp();
    let ln_s = spot.ln();
    let i = C64::new(0.0, 1.0);

    let mut buf = (0..n)
        .map(|j| {
            let vj = j as f64 * cfg.eta;
            let u = C64::new(vj, -(alpha + 1.0));
            let psi = kernel_psi(u, 0.0, v, &coeffs, tau)?;
            let denom = C64::new(alpha * alpha + alpha - vj * vj, (2.0 * alpha + 1.0) * vj);
            let weight = if j == 0 {
                cfg.eta / 3.0
            } else {
                cfg.eta / 3.0 * (3.0 + if j % 2 == 1 { 1.0 } else { -1.0 })
            };
            Ok(disc * (i * u * ln_s).exp() * psi / denom * (-i * vj * k0).exp() * weight)
        })
        .collect::<Result<Vec<C64>>>()?;
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let log_strikes: Vec<f64> = (0..n).map(|j| k0 + j as f64 * lambda).collect();
    let prices = log_strikes
        .iter()
        .zip(&buf)
        .map(|(k, y)| (-alpha * k).exp() / PI * y.re)
        .collect();
    Ok(CarrMadanPrices {
        log_strikes,
        prices,
    })
}

/// Single call price at `strike`.
pub fn carr_madan_price(
    cfg: &CarrMadanConfig,
    spot: f64,
    strike: f64,
    v: f64,
    tau: f64,
    params: &HestonParams,
    mode: CoefficientMode,
) -> Result<f64> {
    Ok(carr_madan_prices(cfg, spot, strike, v, tau, params, mode)?.center())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{price_call, QuadratureConfig};

    const MODE: CoefficientMode = CoefficientMode::Consistent;

    #[test]
    fn matches_oracle_across_strikes() {
        let params = HestonParams::benchmark();
        for k in [50.0, 80.0, 100.0, 120.0, 200.0] {
            let cm = carr_madan_price(
                &CarrMadanConfig::with_n(2000),
                100.0,
                k,
                0.1,
                1.0,
                &params,
                MODE,
            )
            .unwrap();
            let oracle = price_call(
                100.0,
                k,
                0.1,
                1.0,
                &params,
                MODE,
                &QuadratureConfig::default(),
            )
            .unwrap()
            .value;
            assert!((cm - oracle).abs() < 1e-5, "K={k}: {cm} vs {oracle}");
        }
    }

    #[test]
    fn center_node_is_requested_strike() {
        let r = carr_madan_prices(
            &CarrMadanConfig::with_n(64),
            100.0,
            90.0,
            0.1,
            1.0,
            &HestonParams::benchmark(),
            MODE,
        )
        .unwrap();
        assert!((r.log_strikes[32] - 90f64.ln()).abs() < 1e-14);
        assert_eq!(r.strikes().count(), 64);
    }

    #[test]
    fn small_strike_lower_bound() {
        let params = HestonParams::benchmark();
        let c = carr_madan_price(
            &CarrMadanConfig::with_n(4096),
            100.0,
            1.0,
            0.1,
            1.0,
            &params,
            MODE,
        )
        .unwrap();
        assert!(c >= 100.0 - (-0.03f64).exp() - 1e-6, "{c}");
    }

    #[test]
    fn rejects_bad_damping() {
        let params = HestonParams::benchmark();
        let cfg = CarrMadanConfig {
            alpha_c: -0.5,
            ..Default::default()
        };
        assert!(matches!(
            carr_madan_price(&cfg, 100.0, 100.0, 0.1, 1.0, &params, MODE),
            Err(Error::DampingInfeasible(_))
        ));
        let cfg = CarrMadanConfig {
            alpha_c: 100.0,
            ..Default::default()
        };
        assert!(carr_madan_price(&cfg, 100.0, 100.0, 0.1, 5.0, &params, MODE).is_err());
    }
}
