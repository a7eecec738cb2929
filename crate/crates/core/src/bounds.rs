//! Truncation and discretization error bounds for the convolution schemes, plus
//! empirical convergence fits used to validate them.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::carr_madan::{carr_madan_price, CarrMadanConfig};
use crate::cfft::{cfft1_price, cfft2_price, ShiftDampConfig};
use crate::charfn::{asymptotics, log_kernel};
use crate::error::{Error, Result};
use crate::grid::{build_grid, Grid};
use crate::model::{CoefficientMode, HestonParams, Measure, MeasureCoefficients};
use crate::quadrature::{price_call, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBoundInputs {
    pub eps_vt: f64,
    pub eps_l: f64,
    pub m: u32,
    pub fbar: f64,
    pub a_inf: f64,
    pub d: f64,
    pub l: f64,
    pub n: usize,
}

impl ErrorBoundInputs {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        for (name, v) in [
            ("eps_vt", self.eps_vt),
            ("eps_l", self.eps_l),
            ("fbar", self.fbar),
            ("a_inf", self.a_inf),
            ("d", self.d),
            ("l", self.l),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                bad.push(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if self.m < 2 {
            bad.push(format!("m must be at least 2, got {}", self.m));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(bad))
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    /// `ε₁ = L A_inf f̄ e^{2πD/L} ε_{v,τ} / (π D)`.
    pub fn eps1(&self) -> f64 {
        self.l * self.a_inf * self.fbar * (2.0 * PI * self.d / self.l).exp() / (PI * self.d)
            * self.eps_vt
    }

    /// `ε₂ = L A_inf ε_L ε_{v,τ} / (π D)`.
    pub fn eps2(&self) -> f64 {
        self.l * self.a_inf * self.eps_l * self.eps_vt / (PI * self.d)
    }
}

/// `ε₁ e^{−π D N / L}`.
pub fn truncation_bound(inputs: &ErrorBoundInputs) -> f64 {
    inputs.eps1() * (-PI * inputs.d * inputs.n as f64 / inputs.l).exp()
}

/// `ε₂ N^{−m}`.
pub fn discretization_bound(inputs: &ErrorBoundInputs) -> f64 {
    inputs.eps2() * (inputs.n as f64).powi(-(inputs.m as i32))
}

/// `K (e^x + e^{−rτ})` times the sum of both bounds.
pub fn price_error_bound(x: f64, strike: f64, r: f64, tau: f64, inputs: &ErrorBoundInputs) -> f64 {
    price_prefactor(x, strike, r, tau) * (truncation_bound(inputs) + discretization_bound(inputs))
}

fn price_prefactor(x: f64, strike: f64, r: f64, tau: f64) -> f64 {
    strike * (x.exp() + (-r * tau).exp())
}

/// `max_{0 ≤ p ≤ p_max} |ψ(p)| / (A_inf e^{−D p})`, evaluated in log space.
pub fn calibrate_eps_vt(
    v: f64,
    coeffs: &MeasureCoefficients,
    tau: f64,
    p_max: f64,
    samples: usize,
) -> Result<f64> {
    let asym = asymptotics(v, coeffs, tau);
    let samples = samples.max(2);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..samples {
        let p = p_max * i as f64 / (samples - 1) as f64;
        let lk = log_kernel(num_complex::Complex64::new(p, 0.0), 0.0, v, coeffs, tau)?.re;
        worst = worst.max(lk + asym.d * p - asym.a_inf.ln());
    }
    Ok(worst.exp())
}

/// Solves `error = K(e^x + e^{−rτ}) (trunc + ε₂ N^{−m})` for `ε_L`, taking the
/// largest value over the supplied `(x, error)` probes.
pub fn calibrate_eps_l(
    probes: &[(f64, f64)],
    strike: f64,
    r: f64,
    tau: f64,
    inputs: &ErrorBoundInputs,
) -> Result<f64> {
    let unit = ErrorBoundInputs {
        eps_l: 1.0,
        ..*inputs
    };
    unit.validate()?;
    let per_eps = discretization_bound(&unit);
    let trunc = truncation_bound(&unit);
    let eps = probes
        .iter()
        .map(|(x, err)| (err / price_prefactor(*x, strike, r, tau) - trunc).max(0.0) / per_eps)
        .fold(0.0f64, f64::max);
    if eps > 0.0 {
        Ok(eps)
    } else {
        Err(Error::Config("calibration sample has zero error".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Oracle,
    Cfft1,
    Cfft2,
    CarrMadan,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Cfft1 => "cfft1",
            Method::Cfft2 => "cfft2",
            Method::CarrMadan => "carr_madan",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Method::Oracle),
            "cfft1" => Ok(Method::Cfft1),
            "cfft2" => Ok(Method::Cfft2),
            "carr_madan" => Ok(Method::CarrMadan),
            other => Err(Error::Config(format!(
                "unknown method '{other}' (expected oracle, cfft1, cfft2, carr_madan)"
            ))),
        }
    }
}

/// Everything except `N` that a convergence sweep holds fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub params: HestonParams,
    pub mode: CoefficientMode,
    pub spot: f64,
    pub strike: f64,
    pub v: f64,
    pub tau: f64,
    pub length: f64,
    pub cfft1: ShiftDampConfig,
    pub cfft2: ShiftDampConfig,
    pub carr_madan_eta: f64,
    pub carr_madan_alpha: f64,
    pub quad: QuadratureConfig,
    /// Interior probes lie within `probe_half_width · L` of the grid center.
    pub probe_half_width: f64,
    /// Number of probe intervals across the probe window.
    pub probe_intervals: usize,
}

impl SweepConfig {
    pub fn benchmark(strike: f64) -> Self {
        Self {
            params: HestonParams::benchmark(),
            mode: CoefficientMode::Consistent,
            spot: 100.0,
            strike,
            v: 0.1,
            tau: 1.0,
            length: 10.0,
            cfft1: ShiftDampConfig::linear(),
            cfft2: ShiftDampConfig::exponential(-2.0),
            carr_madan_eta: 0.25,
            carr_madan_alpha: 1.5,
            quad: QuadratureConfig::default(),
            probe_half_width: 0.1,
            probe_intervals: 80,
        }
    }

    pub fn center(&self) -> f64 {
        (self.spot / self.strike).ln()
    }

    /// Probe log-moneyness values, identical for every `N` divisible by `probe_intervals / (2 · probe_half_width)`.
    pub fn probes(&self) -> Vec<f64> {
        let c = self.center();
        let h = 2.0 * self.probe_half_width * self.length / self.probe_intervals as f64;
        (0..=self.probe_intervals)
            .map(|i| c + (i as f64 - self.probe_intervals as f64 / 2.0) * h)
            .collect()
    }

    pub fn grid(&self, n: usize) -> Result<Grid> {
        build_grid(self.center(), self.length, n)
    }

    pub fn oracle_at(&self, x: f64) -> Result<f64> {
        Ok(price_call(
            self.strike * x.exp(),
            self.strike,
            self.v,
            self.tau,
            &self.params,
            self.mode,
            &self.quad,
        )?
        .value)
    }

    /// Oracle prices at every probe, computed in parallel.
    pub fn oracle_probes(&self) -> Result<Vec<f64>> {
        self.probes()
            .par_iter()
            .map(|x| self.oracle_at(*x))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorSample {
    pub n: usize,
    pub max_interior_err: f64,
    /// `(x, |error|)` at each probe.
    pub probe_errors: Vec<(f64, f64)>,
    pub wall_time_ns: u128,
}

/// Prices at the probes by `method` on an `N`-point configuration; returns values and wall time.
pub fn method_probe_values(
    method: Method,
    n: usize,
    cfg: &SweepConfig,
) -> Result<(Vec<f64>, u128)> {
    let probes = cfg.probes();
    let start = Instant::now();
    let values = match method {
        Method::Oracle => probes
            .iter()
            .map(|x| cfg.oracle_at(*x))
            .collect::<Result<Vec<_>>>()?,
        Method::Cfft1 | Method::Cfft2 => {
            let grid = cfg.grid(n)?;
            let all = if method == Method::Cfft1 {
                cfft1_price(
                    &grid,
                    cfg.strike,
                    cfg.v,
                    cfg.tau,
                    &cfg.params,
                    cfg.mode,
                    &cfg.cfft1,
                )?
            } else {
                cfft2_price(
                    &grid,
                    cfg.strike,
                    cfg.v,
                    cfg.tau,
                    &cfg.params,
                    cfg.mode,
                    &cfg.cfft2,
                )?
            };
            probes
                .iter()
                .map(|x| {
                    let i = grid
                        .nearest_index(*x)
                        .ok_or_else(|| Error::InvalidGrid(format!("probe {x} off grid")))?;
                    if (grid.x(i) - x).abs() > 1e-9 * grid.dx.max(1.0) {
                        return Err(Error::InvalidGrid(format!(
                            "probe {x} is not a node for N={n}"
                        )));
                    }
                    Ok(all[i])
                })
                .collect::<Result<Vec<_>>>()?
        }
        Method::CarrMadan => {
            let cm = CarrMadanConfig {
                n,
                eta: cfg.carr_madan_eta,
                alpha_c: cfg.carr_madan_alpha,
            };
            probes
                .iter()
                .map(|x| {
                    // spot varies with x at fixed strike
                    carr_madan_price(
                        &cm,
                        cfg.strike * x.exp(),
                        cfg.strike,
                        cfg.v,
                        cfg.tau,
                        &cfg.params,
                        cfg.mode,
                    )
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok((values, start.elapsed().as_nanos()))
}

/// Interior error of `method` at size `n` against precomputed oracle probe values.
pub fn error_sample(
    method: Method,
    n: usize,
    cfg: &SweepConfig,
    oracle: &[f64],
) -> Result<ErrorSample> {
    let (values, wall_time_ns) = method_probe_values(method, n, cfg)?;
    if values.len() != oracle.len() {
        return Err(Error::LengthMismatch {
            expected: values.len(),
            got: oracle.len(),
        });
    }
    let probe_errors: Vec<(f64, f64)> = cfg
        .probes()
        .into_iter()
        .zip(values.iter().zip(oracle))
        .map(|(x, (a, b))| (x, (a - b).abs()))
        .collect();
    let max_interior_err = probe_errors.iter().map(|(_, e)| *e).fold(0.0, f64::max);
    Ok(ErrorSample {
        n,
        max_interior_err,
        probe_errors,
        wall_time_ns,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderFit {
    pub method: Method,
    /// Least-squares slope of `ln err` against `ln N`; `None` when some error is
    /// at rounding level and the log fit is meaningless.
    pub slope: Option<f64>,
    /// `−slope`, the empirical convergence order.
    pub order: Option<f64>,
    pub residuals: Vec<f64>,
    pub samples: Vec<ErrorSample>,
}

/// Runs `method` for every `N` concurrently and fits `ln err = c + s ln N`.
pub fn empirical_order(method: Method, ns: &[usize], cfg: &SweepConfig) -> Result<OrderFit> {
    let oracle = cfg.oracle_probes()?;
    let mut samples = ns
        .par_iter()
        .map(|n| error_sample(method, *n, cfg, &oracle))
        .collect::<Result<Vec<ErrorSample>>>()?;
    samples.sort_by_key(|s| s.n);

    let usable = samples.len() >= 2 && samples.iter().all(|s| s.max_interior_err > 1e-13);
    let (slope, residuals) = if usable {
        let pts: Vec<(f64, f64)> = samples
            .iter()
            .map(|s| ((s.n as f64).ln(), s.max_interior_err.ln()))
            .collect();
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        let residuals = pts
            .iter()
            .map(|p| p.1 - (my + slope * (p.0 - mx)))
            .collect();
        (Some(slope), residuals)
    } else {
        (None, Vec::new())
    };
    Ok(OrderFit {
        method,
        slope,
        order: slope.map(|s| -s),
        residuals,
        samples,
    })
}

/// Bound inputs for CFFT-II at the configuration of `cfg`, with `ε_L` still unset (1.0).
pub fn cfft2_bound_inputs(cfg: &SweepConfig, n: usize, fbar: f64) -> Result<ErrorBoundInputs> {
    let c2 = cfg.params.coefficients(Measure::P2, cfg.mode)?;
    let asym = asymptotics(cfg.v, &c2, cfg.tau);
    let eps_vt = calibrate_eps_vt(cfg.v, &c2, cfg.tau, 200.0, 4001)?;
    Ok(ErrorBoundInputs {
        eps_vt,
        eps_l: 1.0,
        m: 2,
        fbar,
        a_inf: asym.a_inf,
        d: asym.d,
        l: cfg.length,
        n,
    })
}
