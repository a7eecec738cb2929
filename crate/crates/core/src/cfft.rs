//! Convolution–FFT pricing on a centered log-moneyness grid.
//!
//! Both schemes evaluate `E[f(x + Z)]` for every grid node `x` at once, where
//! `Z = x_T − x` has characteristic function ψ. The target is optionally shifted
//! by a function with a closed-form expectation and damped by `e^{αx}`:
//!
//! `E[f(x + Z)] = e^{−αx} · IDFT[DFT(e^{αy}(f − h)) · ψ(p + αi)](x) + E[h(x + Z)]`.
//!
//! CFFT-I applies this to the Heaviside target under P1 and P2; CFFT-II applies it
//! once to the call payoff under P2 with exponential damping.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::charfn::{kernel_psi, mean_increment, moment_finite};
use crate::error::{Error, Result};
use crate::grid::{trapezoid_weights, Grid, RealConvolver};
use crate::model::{CoefficientMode, HestonParams, Measure, MeasureCoefficients};
use crate::shift::{exponential_shift, linear_shift, ExpIntercept, ShiftCoefficients, ShiftScheme};

/// Spatial quadrature weights on the `N` periodic nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    /// Closed-interval trapezoid folded onto the periodic nodes: the `x_N` half
    /// weight lands on `x_0`, so every weight is 1. Exact for targets whose
    /// endpoint values agree, which is what shifting arranges.
    #[default]
    PeriodicTrapezoid,
    /// `{1/2, 1, …, 1, 1/2}` on `x_0 … x_{N−1}`.
    Trapezoid,
}

/// Whether the weights multiply the spectrum as well as the samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyWeighting {
    #[default]
    Both,
    SpatialOnly,
}

/// Value of the Heaviside target at a node sitting exactly on `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeavisideAtZero {
    #[default]
    One,
    Half,
}

impl HeavisideAtZero {
    fn value(self) -> f64 {
        match self {
            HeavisideAtZero::One => 1.0,
            HeavisideAtZero::Half => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftDampConfig {
    pub shift: ShiftScheme,
    pub alpha: f64,
    pub weights: WeightScheme,
    pub frequency_weighting: FrequencyWeighting,
    pub heaviside_at_zero: HeavisideAtZero,
    pub intercept: ExpIntercept,
}

impl Default for ShiftDampConfig {
    fn default() -> Self {
        Self::none()
    }
}

impl ShiftDampConfig {
    pub fn none() -> Self {
        Self {
            shift: ShiftScheme::None,
            alpha: 0.0,
            weights: WeightScheme::default(),
            frequency_weighting: FrequencyWeighting::default(),
            heaviside_at_zero: HeavisideAtZero::default(),
            intercept: ExpIntercept::default(),
        }
    }

    pub fn linear() -> Self {
        Self {
            shift: ShiftScheme::Linear,
            ..Self::none()
        }
    }

    /// Damping without shifting.
    pub fn damped(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::none()
        }
    }

    pub fn exponential(alpha: f64) -> Self {
        Self {
            shift: ShiftScheme::Exponential,
            alpha,
            ..Self::none()
        }
    }

    pub fn with_weights(mut self, weights: WeightScheme) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_frequency_weighting(mut self, fw: FrequencyWeighting) -> Self {
        self.frequency_weighting = fw;
        self
    }

    pub fn with_heaviside_at_zero(mut self, h: HeavisideAtZero) -> Self {
        self.heaviside_at_zero = h;
        self
    }

    pub fn with_intercept(mut self, intercept: ExpIntercept) -> Self {
        self.intercept = intercept;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() {
            return Err(Error::InvalidShift(format!(
                "alpha must be finite, got {}",
                self.alpha
            )));
        }
        match self.shift {
            ShiftScheme::Linear if self.alpha != 0.0 => Err(Error::InvalidShift(format!(
                "linear shift requires alpha = 0, got {}",
                self.alpha
            ))),
            ShiftScheme::Exponential if !(self.alpha < -1.0) => {
                Err(Error::DampingInfeasible("alpha < -1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// `E[f(x_n + Z)]` on every node plus the shift that was removed.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionOutput {
    pub values: Vec<f64>,
    pub shift: ShiftCoefficients,
    /// `max_n |e^{αx_n}(f − h)(x_n)|`, the sup-norm of the transformed target.
    pub target_sup: f64,
}

/// Evaluates `E[f(x_n + Z)]` (undiscounted) from the `N + 1` closed-interval samples of `f`.
pub fn convolution_expectation(
    grid: &Grid,
    f_closed: &[f64],
    v: f64,
    tau: f64,
    coeffs: &MeasureCoefficients,
    cfg: &ShiftDampConfig,
) -> Result<ConvolutionOutput> {
    cfg.validate()?;
    if f_closed.len() != grid.n + 1 {
        return Err(Error::LengthMismatch {
            expected: grid.n + 1,
            got: f_closed.len(),
        });
    }
    let n = grid.n;
    let alpha = cfg.alpha;
    let (shifted, shift) = match cfg.shift {
        ShiftScheme::None => (f_closed.to_vec(), ShiftCoefficients::zero()),
        ShiftScheme::Linear => linear_shift(f_closed, grid)?,
        ShiftScheme::Exponential => exponential_shift(f_closed, grid, alpha, cfg.intercept)?,
    };
    let xs = grid.x_nodes();
    let target: Vec<f64> = if alpha == 0.0 {
        shifted[..n].to_vec()
    } else {
        shifted[..n]
            .iter()
            .zip(&xs)
            .map(|(f, x)| (alpha * x).exp() * f)
            .collect()
    };
    let target_sup = target.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let spatial = match cfg.weights {
        WeightScheme::PeriodicTrapezoid => vec![1.0; n],
        WeightScheme::Trapezoid => trapezoid_weights(n)?,
    };
    let conv = RealConvolver::new(n)?;
    let freq = match cfg.frequency_weighting {
        FrequencyWeighting::Both => conv.half_weights(&spatial)?,
        FrequencyWeighting::SpatialOnly => vec![1.0; n / 2 + 1],
    };
    let kernel = conv
        .half_frequencies(grid)
        .iter()
        .zip(&freq)
        .map(|(p, w)| Ok(kernel_psi(C64::new(*p, alpha), 0.0, v, coeffs, tau)? * *w))
        .collect::<Result<Vec<C64>>>()?;
    let mut values = conv.convolve(&target, &spatial, &kernel)?;
    if alpha != 0.0 {
        for (val, x) in values.iter_mut().zip(&xs) {
            *val *= (-alpha * x).exp();
        }
    }

    match shift.scheme {
        ShiftScheme::None => {}
        ShiftScheme::Linear => {
            let mean = mean_increment(v, coeffs, tau)?;
            for (val, x) in values.iter_mut().zip(&xs) {
                *val += shift.a * (x + mean) + shift.b;
            }
        }
        ShiftScheme::Exponential => {
            let growth = kernel_psi(C64::new(0.0, -1.0), 0.0, v, coeffs, tau)?.re;
            for (val, x) in values.iter_mut().zip(&xs) {
                *val += shift.a * x.exp() * growth + shift.b;
            }
        }
    }
    Ok(ConvolutionOutput {
        values,
        shift,
        target_sup,
    })
}

fn check_cfft1(cfg: &ShiftDampConfig) -> Result<()> {
    if cfg.shift == ShiftScheme::Exponential || cfg.alpha != 0.0 {
        return Err(Error::InvalidShift(
            "CFFT-I supports shift none or linear with alpha = 0".into(),
        ));
    }
    Ok(())
}

fn check_state(v: f64, tau: f64, strike: Option<f64>) -> Result<()> {
    let mut bad = Vec::new();
    if !(v >= 0.0) {
        bad.push(format!("v must be non-negative, got {v}"));
    }
    if !(tau > 0.0) {
        bad.push(format!("tau must be positive, got {tau}"));
    }
    if let Some(k) = strike {
        if !(k > 0.0) {
            bad.push(format!("strike must be positive, got {k}"));
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidParams(bad))
    }
}

/// Exercise probability `P_i(x_n) = E_i[1{x_n + Z ≥ 0}]` on every grid node.
pub fn cfft1_prob(
    grid: &Grid,
    v: f64,
    tau: f64,
    coeffs: &MeasureCoefficients,
    cfg: &ShiftDampConfig,
) -> Result<Vec<f64>> {
    check_cfft1(cfg)?;
    check_state(v, tau, None)?;
    let at_zero = cfg.heaviside_at_zero.value();
    let f: Vec<f64> = grid
        .closed_nodes()
        .into_iter()
        .map(|x| {
            if x > 0.0 {
                1.0
            } else if x == 0.0 {
                at_zero
            } else {
                0.0
            }
        })
        .collect();
    Ok(convolution_expectation(grid, &f, v, tau, coeffs, cfg)?.values)
}

/// `C(x_n) = K e^{x_n} P_1(x_n) − K e^{−rτ} P_2(x_n)` with spot `S = K e^{x_n}` along the grid.
pub fn cfft1_price(
    grid: &Grid,
    strike: f64,
    v: f64,
    tau: f64,
    params: &HestonParams,
    mode: CoefficientMode,
    cfg: &ShiftDampConfig,
) -> Result<Vec<f64>> {
    check_cfft1(cfg)?;
    check_state(v, tau, Some(strike))?;
    let c1 = params.coefficients(Measure::P1, mode)?;
    let c2 = params.coefficients(Measure::P2, mode)?;
    let (p1, p2) = rayon::join(
        || cfft1_prob(grid, v, tau, &c1, cfg),
        || cfft1_prob(grid, v, tau, &c2, cfg),
    );
    let (p1, p2) = (p1?, p2?);
    let disc = strike * (-params.r * tau).exp();
    Ok(grid
        .x_nodes()
        .iter()
        .zip(p1.iter().zip(&p2))
        .map(|(x, (a, b))| strike * x.exp() * a - disc * b)
        .collect())
}

/// `E[e^{u Z}] < ∞` under P2 for `u = α + 1`, i.e. `E[S_T^{α+1}]` exists.
pub fn damping_feasible(
    alpha: f64,
    v: f64,
    tau: f64,
    params: &HestonParams,
    mode: CoefficientMode,
) -> bool {
    match params.coefficients(Measure::P2, mode) {
        Ok(c2) => moment_finite(alpha + 1.0, v, &c2, tau),
        Err(_) => false,
    }
}

/// CFFT-II with its shift coefficients and damped-target sup-norm.
pub fn cfft2_price_detailed(
    grid: &Grid,
    strike: f64,
    v: f64,
    tau: f64,
    params: &HestonParams,
    mode: CoefficientMode,
    cfg: &ShiftDampConfig,
) -> Result<ConvolutionOutput> {
    match cfg.shift {
        ShiftScheme::Linear => {
            return Err(Error::InvalidShift(
                "CFFT-II supports shift none or exponential".into(),
            ))
        }
        // α = 0 with no shift is the undamped reference run.
        ShiftScheme::None if cfg.alpha == 0.0 => {}
        _ if !(cfg.alpha < -1.0) => return Err(Error::DampingInfeasible("alpha < -1".into())),
        _ => {}
    }
    check_state(v, tau, Some(strike))?;
    let c2 = params.coefficients(Measure::P2, mode)?;
    if cfg.alpha != 0.0 {
        if !moment_finite(cfg.alpha + 1.0, v, &c2, tau) {
            return Err(Error::DampingInfeasible(format!(
                "E[S_T^(alpha+1)] is infinite for alpha = {}",
                cfg.alpha
            )));
        }
        if !moment_finite(-cfg.alpha, v, &c2, tau) {
            return Err(Error::DampingInfeasible(format!(
                "E[S_T^(-alpha)] is infinite for alpha = {}",
                cfg.alpha
            )));
        }
    }
    let f: Vec<f64> = grid
        .closed_nodes()
        .into_iter()
        .map(|x| (strike * x.exp() - strike).max(0.0))
        .collect();
    let mut out = convolution_expectation(grid, &f, v, tau, &c2, cfg)?;
    let disc = (-params.r * tau).exp();
    for val in out.values.iter_mut() {
        *val *= disc;
    }
    Ok(out)
}

/// Call prices `C(K e^{x_n}, K)` on every node of a grid centered at `ln(S/K)`.
pub fn cfft2_price(
    grid: &Grid,
    strike: f64,
    v: f64,
    tau: f64,
    params: &HestonParams,
    mode: CoefficientMode,
    cfg: &ShiftDampConfig,
) -> Result<Vec<f64>> {
    Ok(cfft2_price_detailed(grid, strike, v, tau, params, mode, cfg)?.values)
}
