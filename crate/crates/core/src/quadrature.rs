//! Semi-closed-form Heston pricer by adaptive quadrature of the Fourier inversion integral.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::charfn::{asymptotics, kernel_psi, mean_increment};
use crate::error::{Error, Result};
use crate::model::{CoefficientMode, HestonParams, Measure, MeasureCoefficients};

// 21-point Kronrod extension of the 10-point Gauss rule on [−1, 1].
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];
// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], …, XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// One Gauss–Kronrod panel: `(kronrod, |kronrod − gauss|)`.
fn gk21<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let s = f(center - dx)? + f(center + dx)?;
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub err_estimate: f64,
}

/// Globally adaptive Gauss–Kronrod 21 integration, bisecting the worst panel first.
///
/// `initial_panels` seeds the subdivision, which matters for oscillatory integrands.
pub fn integrate<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    a: f64,
    b: f64,
    initial_panels: usize,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Integral> {
    let mut heap = BinaryHeap::new();
    let m = initial_panels.max(1);
    let h = (b - a) / m as f64;
    for i in 0..m {
        let (lo, hi) = (
            a + i as f64 * h,
            if i + 1 == m {
                b
            } else {
                a + (i + 1) as f64 * h
            },
        );
        let (value, err) = gk21(&mut f, lo, hi)?;
        heap.push(Panel {
            a: lo,
            b: hi,
            value,
            err,
        });
    }
    loop {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.err).sum();
        let tol = abs_tol.max(rel_tol * total.abs());
        if err <= tol {
            return Ok(Integral {
                value: total,
                err_estimate: err,
            });
        }
        if heap.len() >= max_panels {
            return Err(Error::QuadratureFailure {
                estimate: err,
                tolerance: tol,
            });
        }
        let worst = heap.pop().expect("non-empty panel set");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureFailure {
                estimate: err,
                tolerance: tol,
            });
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, err) = gk21(&mut f, lo, hi)?;
            heap.push(Panel {
                a: lo,
                b: hi,
                value,
                err,
            });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper truncation; `None` derives it from the decay constant.
    pub p_max: Option<f64>,
    pub small_p: f64,
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            p_max: None,
            small_p: 1e-8,
            max_panels: 4000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.abs_tol > 0.0) {
            bad.push(format!("abs_tol must be positive, got {}", self.abs_tol));
        }
        if !(self.rel_tol > 0.0) {
            bad.push(format!("rel_tol must be positive, got {}", self.rel_tol));
        }
        if !(self.small_p > 0.0) {
            bad.push(format!("small_p must be positive, got {}", self.small_p));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad.join("; ")))
        }
    }

    /// Truncation point: at least `40/D` and far enough that the tail is below 1e−16.
    pub fn resolve_p_max(&self, v: f64, coeffs: &MeasureCoefficients, tau: f64) -> f64 {
        let asym = asymptotics(v, coeffs, tau);
        let floor = 40.0 / asym.d;
        let tail = (asym.limit_amplitude().ln().max(0.0) + 37.0) / asym.d;
        let auto = floor.max(tail).clamp(50.0, 1e5);
        match self.p_max {
            Some(p) => p.max(floor.min(1e5)),
            None => auto,
        }
    }
}

/// `P_i = 1/2 + (1/π) ∫_0^∞ Re[e^{ipx} ψ_i(p) / (ip)] dp`, not clipped to `[0, 1]`.
pub fn prob(
    measure: Measure,
    x: f64,
    v: f64,
    tau: f64,
    params: &HestonParams,
    mode: CoefficientMode,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    cfg.validate()?;
    if !(tau > 0.0) {
        return Err(Error::InvalidParams(vec![format!(
            "tau must be positive, got {tau}"
        )]));
    }
    let coeffs = params.coefficients(measure, mode)?;
    prob_with(&coeffs, x, v, tau, cfg)
}

pub(crate) fn prob_with(
    coeffs: &MeasureCoefficients,
    x: f64,
    v: f64,
    tau: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    let p_max = cfg.resolve_p_max(v, coeffs, tau);
    // The integrand tends to x + E[x_T − x] as p → 0.
    let head = cfg.small_p * (x + mean_increment(v, coeffs, tau)?);
    let integrand = |p: f64| -> Result<f64> {
        let psi = kernel_psi(C64::new(p, 0.0), 0.0, v, coeffs, tau)?;
        Ok((C64::new(0.0, p * x).exp() * psi / C64::new(0.0, p)).re)
    };
    // Seed panels narrow enough to resolve the e^{ipx} oscillation.
    let period = 2.0 * PI / x.abs().max(1.0);
    let panels = ((p_max / period).ceil() as usize).clamp(8, cfg.max_panels / 2);
    let body = integrate(
        integrand,
        cfg.small_p,
        p_max,
        panels,
        cfg.abs_tol,
        cfg.rel_tol,
        cfg.max_panels,
    )?;
    Ok(Integral {
        value: 0.5 + (head + body.value) / PI,
        err_estimate: body.err_estimate / PI,
    })
}

/// `C = S P_1 − K e^{−rτ} P_2`.
pub fn price_call(
    spot: f64,
    strike: f64,
    v: f64,
    tau: f64,
    params: &HestonParams,
    mode: CoefficientMode,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    let mut bad = Vec::new();
    if !(spot > 0.0) {
        bad.push(format!("spot must be positive, got {spot}"));
    }
    if !(strike > 0.0) {
        bad.push(format!("strike must be positive, got {strike}"));
    }
    if !(v >= 0.0) {
        bad.push(format!("v must be non-negative, got {v}"));
    }
    if !(tau > 0.0) {
        bad.push(format!("tau must be positive, got {tau}"));
    }
    if !bad.is_empty() {
        return Err(Error::InvalidParams(bad));
    }
    cfg.validate()?;
    let x = (spot / strike).ln();
    let c1 = params.coefficients(Measure::P1, mode)?;
    let c2 = params.coefficients(Measure::P2, mode)?;
    let p1 = prob_with(&c1, x, v, tau, cfg)?;
    let p2 = prob_with(&c2, x, v, tau, cfg)?;
    let disc = strike * (-params.r * tau).exp();
    Ok(Integral {
        value: spot * p1.value - disc * p2.value,
        err_estimate: spot * p1.err_estimate + disc * p2.err_estimate,
    })
}
