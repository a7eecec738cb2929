//! Branch-safe joint characteristic function of `(x_T, v_T)` under P1/P2.
//!
//! The joint transform is written with `zeta = 2γ / (γ + λ + (γ − λ) e^{−γτ})`,
//! where the principal root keeps `Re γ >= 0`. `zeta` then stays away from zero
//! for every real frequency and its principal logarithm never crosses the cut,
//! unlike Heston's original `C, D, g` form which is kept here for comparison.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::MeasureCoefficients;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Quantities shared by the characteristic function and its gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intermediates {
    pub gamma: C64,
    pub lambda: C64,
    pub zeta: C64,
    /// `(γ + λ) / σ²`
    pub alpha: C64,
    /// `(γ − λ) / σ²`
    pub beta: C64,
    /// `e^{−γτ}`
    pub decay: C64,
}

/// Large-frequency constants: `|ψ(p)| ~ a_inf · e^{−d |p|}` up to O(1) factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticConstants {
    pub a_inf: f64,
    pub d: f64,
    /// Phase slope for `p > 0`; the `p < 0` slope is [`Self::slope`] with `-1.0`.
    pub b_inf_slope: f64,
    /// Phase offset for `p > 0`.
    pub b_inf_offset: f64,
    a: f64,
    b: f64,
    v: f64,
    tau: f64,
    rho: f64,
    sigma: f64,
}

impl AsymptoticConstants {
    pub fn slope(&self, sign: f64) -> f64 {
        -self.rho * (self.v + sign.signum() * self.a * self.tau) / self.sigma
    }

    pub fn offset(&self, sign: f64) -> f64 {
        2.0 * self.a / (self.sigma * self.sigma) * (sign.signum() * self.rho).asin()
    }

    /// Phase `B_inf(p)` of the asymptotic form.
    pub fn phase(&self, p: f64) -> f64 {
        self.offset(p) + self.slope(p) * p
    }

    /// `a_inf · e^{−d |p|}`.
    pub fn envelope(&self, p: f64) -> f64 {
        self.a_inf * (-self.d * p.abs()).exp()
    }

    /// Exact limit of `|ψ(p)| e^{d|p|}` as `|p| → ∞`.
    ///
    /// Larger than `a_inf` by `e^{b(v + aτ)/σ²}`: the real part of `λ` leaves an
    /// O(1) term in the exponent that the leading-order expansion drops.
    pub fn limit_amplitude(&self) -> f64 {
        self.a_inf * (self.b * (self.v + self.a * self.tau) / (self.sigma * self.sigma)).exp()
    }
}

fn principal_sqrt(z: C64) -> C64 {
    if z.im == 0.0 && z.re >= 0.0 {
        C64::new(z.re.sqrt(), 0.0)
    } else {
        z.sqrt()
    }
}

/// `e^z − 1` without cancellation for small `|z|`.
fn expm1(z: C64) -> C64 {
    if z.norm() < 1e-5 {
        z * (1.0 + z * (0.5 + z / 6.0))
    } else {
        z.exp() - 1.0
    }
}

pub fn intermediates(
    p: C64,
    q: f64,
    coeffs: &MeasureCoefficients,
    tau: f64,
) -> Result<Intermediates> {
    let MeasureCoefficients {
        b, c, sigma, rho, ..
    } = *coeffs;
    let s2 = sigma * sigma;
    let drift = b - I * sigma * rho * p;
    let mut gamma = principal_sqrt(s2 * (p * p - 2.0 * I * c * p) + drift * drift);
    if gamma.re < 0.0 {
        gamma = -gamma;
    }
    if gamma.re == 0.0 && gamma.im == 0.0 {
        return Err(Error::SingularFrequency { re: p.re, im: p.im });
    }
    let lambda = drift - I * s2 * q;
    // γ + λ + (γ − λ)e^{−γτ} = 2γ + (γ − λ)(e^{−γτ} − 1)
    let denom = 2.0 * gamma + (gamma - lambda) * expm1(-gamma * tau);
    let zeta = 2.0 * gamma / denom;
    if !(zeta.re.is_finite() && zeta.im.is_finite()) || zeta == C64::new(0.0, 0.0) {
        return Err(Error::SingularFrequency { re: p.re, im: p.im });
    }
    Ok(Intermediates {
        gamma,
        lambda,
        zeta,
        alpha: (gamma + lambda) / s2,
        beta: (gamma - lambda) / s2,
        decay: (-gamma * tau).exp(),
    })
}

/// Exponent of the increment kernel, `ln ψ(p, q)`, on the continuous branch.
pub fn log_kernel(p: C64, q: f64, v: f64, coeffs: &MeasureCoefficients, tau: f64) -> Result<C64> {
    let it = intermediates(p, q, coeffs, tau)?;
    let a = coeffs.a;
    let s2 = coeffs.sigma * coeffs.sigma;
    Ok(
        I * p * coeffs.r * tau + I * q * a * tau + it.alpha * (1.0 - it.zeta) * v
            - it.beta * a * tau
            + 2.0 * a / s2 * it.zeta.ln(),
    )
}

/// Characteristic function of the increment `(x_T − x, v_T − v)`. Independent of `x`.
pub fn kernel_psi(p: C64, q: f64, v: f64, coeffs: &MeasureCoefficients, tau: f64) -> Result<C64> {
    Ok(log_kernel(p, q, v, coeffs, tau)?.exp())
}

/// Real-frequency shorthand for [`kernel_psi`] with `q = 0`.
pub fn psi(p: f64, v: f64, coeffs: &MeasureCoefficients, tau: f64) -> Result<C64> {
    kernel_psi(C64::new(p, 0.0), 0.0, v, coeffs, tau)
}

pub fn log_joint_cf(
    p: C64,
    q: f64,
    x: f64,
    v: f64,
    coeffs: &MeasureCoefficients,
    tau: f64,
) -> Result<C64> {
    Ok(I * (p * x + q * v) + log_kernel(p, q, v, coeffs, tau)?)
}

/// `E[exp(i p x_T + i q v_T) | x, v]` under the measure of `coeffs`.
pub fn joint_cf(
    p: C64,
    q: f64,
    x: f64,
    v: f64,
    coeffs: &MeasureCoefficients,
    tau: f64,
) -> Result<C64> {
    Ok(log_joint_cf(p, q, x, v, coeffs, tau)?.exp())
}

/// Exponent of Heston's original characteristic function, principal-branch logarithm.
///
/// Deliberately not corrected for branch crossings.
pub fn log_original_cf(
    p: f64,
    x: f64,
    v: f64,
    coeffs: &MeasureCoefficients,
    tau: f64,
) -> Result<C64> {
    let MeasureCoefficients {
        a,
        b,
        c,
        sigma,
        rho,
        r,
        ..
    } = *coeffs;
    let s2 = sigma * sigma;
    let pc = C64::new(p, 0.0);
    let drift = b - I * rho * sigma * pc;
    let gamma = principal_sqrt(s2 * (pc * pc - 2.0 * I * c * pc) + drift * drift);
    let minus = drift - gamma;
    if minus.norm() == 0.0 {
        return Err(Error::PoleInG(p));
    }
    let plus = drift + gamma;
    let g = plus / minus;
    let grow = (gamma * tau).exp();
    let big_c = I * r * p * tau + a / s2 * (plus * tau - 2.0 * ((1.0 - g * grow) / (1.0 - g)).ln());
    let big_d = plus / s2 * ((1.0 - grow) / (1.0 - g * grow));
    Ok(big_c + big_d * v + I * p * x)
}

pub fn original_cf(p: f64, x: f64, v: f64, coeffs: &MeasureCoefficients, tau: f64) -> Result<C64> {
    Ok(log_original_cf(p, x, v, coeffs, tau)?.exp())
}

/// Closed-form `(∂ψ/∂p, ∂ψ/∂q)`.
pub fn psi_gradient(
    p: C64,
    q: f64,
    v: f64,
    coeffs: &MeasureCoefficients,
    tau: f64,
) -> Result<(C64, C64)> {
    let it = intermediates(p, q, coeffs, tau)?;
    let MeasureCoefficients {
        a,
        b,
        c,
        sigma,
        rho,
        r,
        ..
    } = *coeffs;
    let s2 = sigma * sigma;
    let psi = (I * p * r * tau + I * q * a * tau + it.alpha * (1.0 - it.zeta) * v
        - it.beta * a * tau
        + 2.0 * a / s2 * it.zeta.ln())
    .exp();

    let Intermediates {
        gamma,
        zeta,
        alpha,
        beta,
        decay,
        ..
    } = it;
    let sum = alpha + beta;

    let gamma_p = (s2 * (1.0 - rho * rho) * p - I * (s2 * c + sigma * rho * b)) / gamma;
    let alpha_p = (gamma_p - I * sigma * rho) / s2;
    let beta_p = (gamma_p + I * sigma * rho) / s2;
    // ζ_p / ζ, the derivative of ln ζ
    let zeta_1 = (alpha_p + beta_p) / sum - (alpha_p + beta_p * decay) / sum * zeta
        + gamma_p * tau * (1.0 - alpha * zeta / sum);
    let zeta_p = zeta_1 * zeta;
    let d_p = I * r * tau + (alpha_p * (1.0 - zeta) - alpha * zeta_p) * v - beta_p * a * tau
        + 2.0 * a / s2 * zeta_1;

    let alpha_q = -I;
    let beta_q = I;
    let zeta_2 = (1.0 - decay) / sum * zeta * I;
    let zeta_q = zeta_2 * zeta;
    let d_q = I * a * tau + (alpha_q * (1.0 - zeta) - alpha * zeta_q) * v - beta_q * a * tau
        + 2.0 * a / s2 * zeta_2;

    Ok((psi * d_p, psi * d_q))
}

/// `E[x_T − x]` under the measure of `coeffs`, i.e. `−i ∂ψ/∂p (0)`.
pub fn mean_increment(v: f64, coeffs: &MeasureCoefficients, tau: f64) -> Result<f64> {
    let (dp, _) = psi_gradient(C64::new(0.0, 0.0), 0.0, v, coeffs, tau)?;
    Ok((-I * dp).re)
}

pub fn asymptotics(v: f64, coeffs: &MeasureCoefficients, tau: f64) -> AsymptoticConstants {
    let MeasureCoefficients {
        a, b, sigma, rho, ..
    } = *coeffs;
    let s = (1.0 - rho * rho).sqrt();
    let mut out = AsymptoticConstants {
        a_inf: (4.0 * (1.0 - rho * rho)).powf(a / (sigma * sigma)),
        d: s * (v + a * tau) / sigma,
        b_inf_slope: 0.0,
        b_inf_offset: 0.0,
        a,
        b,
        v,
        tau,
        rho,
        sigma,
    };
    out.b_inf_slope = out.slope(1.0);
    out.b_inf_offset = out.offset(1.0);
    out
}

/// Whether `E[e^{u (x_T − x)}]` is finite under the measure of `coeffs`.
///
/// Decided from the blow-up time of the variance Riccati equation at real
/// exponent `u`, so no overflow is involved.
pub fn moment_finite(u: f64, v: f64, coeffs: &MeasureCoefficients, tau: f64) -> bool {
    let _ = v;
    if !u.is_finite() || !tau.is_finite() {
        return false;
    }
    let MeasureCoefficients {
        b, c, sigma, rho, ..
    } = *coeffs;
    let s2 = sigma * sigma;
    // p = −iu: γ² = σ²(−u² − 2cu) + (b − σρu)², λ = b − σρu, both real.
    let lambda = b - sigma * rho * u;
    let disc = s2 * (-u * u - 2.0 * c * u) + lambda * lambda;
    // Finite iff γ cosh(γτ'/2) + λ sinh(γτ'/2) stays positive on (0, τ].
    if disc > 0.0 {
        let g = disc.sqrt();
        if lambda >= 0.0 || -lambda <= g {
            return true;
        }
        // tanh(γτ*/2) = −γ/λ
        let t_star = 2.0 / g * (-g / lambda).atanh();
        tau < t_star
    } else if disc == 0.0 {
        // limit γ → 0: 1 + λτ/2 > 0
        1.0 + lambda * tau / 2.0 > 0.0
    } else {
        let w = (-disc).sqrt();
        // w cos θ + λ sin θ first vanishes at θ = π/2 + atan(λ/w)
        let t_star = 2.0 / w * (PI / 2.0 + (lambda / w).atan());
        tau < t_star
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CoefficientMode, HestonParams, Measure};

    fn coeffs(m: Measure) -> MeasureCoefficients {
        HestonParams::benchmark()
            .coefficients(m, CoefficientMode::Consistent)
            .unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_frequency_is_exact() {
        for m in [Measure::P1, Measure::P2] {
            let k = coeffs(m);
            let it = intermediates(c(0.0, 0.0), 0.0, &k, 0.7).unwrap();
            assert_eq!(it.gamma, c(k.b, 0.0));
            assert_eq!(it.lambda.re, k.b);
            assert_eq!(it.lambda.im, 0.0);
            assert_eq!(it.zeta, c(1.0, 0.0));
            assert_eq!(
                kernel_psi(c(0.0, 0.0), 0.0, 0.1, &k, 0.7).unwrap(),
                c(1.0, 0.0)
            );
            assert_eq!(
                joint_cf(c(0.0, 0.0), 0.0, 3.3, 0.1, &k, 0.7).unwrap(),
                c(1.0, 0.0)
            );
        }
    }

    #[test]
    fn intermediates_golden_values() {
        // 50-digit evaluation of γ, λ, ζ at p = 1, q = 0, P2, τ = 1
        let it = intermediates(c(1.0, 0.0), 0.0, &coeffs(Measure::P2), 1.0).unwrap();
        let close = |z: C64, re: f64, im: f64| (z - c(re, im)).norm() < 1e-14;
        assert!(
            close(it.gamma, 3.260_163_352_475_531, 0.208_961_921_948_698_76),
            "{:?}",
            it.gamma
        );
        assert!(close(it.lambda, 3.25, 0.2));
        assert!(
            close(it.zeta, 1.001_569_322_132_984, 0.001_238_616_243_421_803_7),
            "{:?}",
            it.zeta
        );
        let psi = kernel_psi(c(1.0, 0.0), 0.0, 0.1, &coeffs(Measure::P2), 1.0).unwrap();
        assert!(close(
            psi,
            0.951_826_341_318_427_4,
            -0.014_348_694_233_865_462
        ));
    }

    #[test]
    fn zeta_tends_to_one_as_tau_vanishes() {
        let k = coeffs(Measure::P1);
        for p in [0.5, 7.0, 40.0] {
            let it = intermediates(c(p, 0.0), 1.3, &k, 1e-12).unwrap();
            assert!((it.zeta - 1.0).norm() < 1e-9);
        }
    }

    #[test]
    fn kernel_hermitian_symmetry_and_bound() {
        let k = coeffs(Measure::P2);
        let a = kernel_psi(c(3.7, 0.0), 1.2, 0.1, &k, 1.0).unwrap();
        let b = kernel_psi(c(-3.7, 0.0), -1.2, 0.1, &k, 1.0).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
        assert!(a.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn joint_factorizes_into_phase_times_kernel() {
        let k = coeffs(Measure::P1);
        let (p, q, x, v) = (2.3, -0.7, 0.4, 0.1);
        let joint = joint_cf(c(p, 0.0), q, x, v, &k, 1.0).unwrap();
        let kern = kernel_psi(c(p, 0.0), q, v, &k, 1.0).unwrap();
        let phase = (I * (p * x + q * v)).exp();
        assert!((joint - phase * kern).norm() < 1e-14);
    }

    #[test]
    fn original_form_agrees_where_branch_stable() {
        for m in [Measure::P1, Measure::P2] {
            let k = coeffs(m);
            for tau in [1.0, 5.0] {
                let a = joint_cf(c(2.0, 0.0), 0.0, 0.0, 0.1, &k, tau).unwrap();
                let b = original_cf(2.0, 0.0, 0.1, &k, tau).unwrap();
                assert!((a - b).norm() < 1e-10, "{m:?} tau={tau}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn original_form_limit_at_zero_frequency() {
        let k = coeffs(Measure::P2);
        assert_eq!(
            original_cf(0.0, 0.0, 0.1, &k, 1.0),
            Err(Error::PoleInG(0.0))
        );
        let near = original_cf(1e-7, 0.0, 0.1, &k, 1.0).unwrap();
        assert!((near - 1.0).norm() < 1e-6);
    }

    #[test]
    fn gradient_at_origin_matches_closed_form_moments() {
        let params = HestonParams::benchmark();
        let k = coeffs(Measure::P2);
        let (v, tau) = (0.1, 1.0);
        let (dp, dq) = psi_gradient(c(0.0, 0.0), 0.0, v, &k, tau).unwrap();
        // E[x_T − x] = rτ − ½(θ̄τ + (v − θ̄)(1 − e^{−κ̄τ})/κ̄)
        let (kb, tb) = (params.kappa_bar(), params.theta_bar());
        let mean = params.r * tau - 0.5 * (tb * tau + (v - tb) * (1.0 - (-kb * tau).exp()) / kb);
        assert!((dp - I * mean).norm() < 1e-10, "{dp} vs i*{mean}");
        // E[v_T − v] = v e^{−bτ} + a/b (1 − e^{−bτ}) − v
        let ev = v * (-k.b * tau).exp() + k.a / k.b * (1.0 - (-k.b * tau).exp()) - v;
        assert!((dq - I * ev).norm() < 1e-12);
        assert!((mean_increment(v, &k, tau).unwrap() - mean).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences_for_large_sigma() {
        let k = HestonParams::new(1.0, 0.05, 3.0, -0.3, 0.0, 0.01)
            .unwrap()
            .coefficients(Measure::P1, CoefficientMode::Consistent)
            .unwrap();
        let h = 1e-6;
        let (dp, dq) = psi_gradient(c(0.0, 0.0), 0.0, 0.2, &k, 2.0).unwrap();
        let f = |p: f64, q: f64| kernel_psi(c(p, 0.0), q, 0.2, &k, 2.0).unwrap();
        let fd_p = (f(h, 0.0) - f(-h, 0.0)) / (2.0 * h);
        let fd_q = (f(0.0, h) - f(0.0, -h)) / (2.0 * h);
        assert!(dp.re.is_finite() && dq.re.is_finite());
        assert!((dp - fd_p).norm() <= 1e-6 * dp.norm().max(1e-3));
        assert!((dq - fd_q).norm() <= 1e-6 * dq.norm().max(1e-3));
    }

    #[test]
    fn asymptotic_constants() {
        let k = coeffs(Measure::P2);
        let asym = asymptotics(0.1, &k, 1.0);
        assert!((asym.d - 0.96).abs() < 1e-12);
        assert!((asym.a_inf - 1.44f64.powf(4.8)).abs() < 1e-12);

        let zero_rho = HestonParams::new(3.0, 0.1, 0.25, 0.0, 1.0, 0.03)
            .unwrap()
            .coefficients(Measure::P2, CoefficientMode::Consistent)
            .unwrap();
        let asym = asymptotics(0.1, &zero_rho, 1.0);
        assert!((asym.a_inf - 4f64.powf(0.3 / 0.0625)).abs() < 1e-9);
        assert_eq!(asym.b_inf_offset, 0.0);
    }

    #[test]
    fn decay_rate_and_limit_amplitude() {
        for m in [Measure::P1, Measure::P2] {
            let k = coeffs(m);
            let asym = asymptotics(0.1, &k, 1.0);
            let lk = |p: f64| log_kernel(c(p, 0.0), 0.0, 0.1, &k, 1.0).unwrap().re;
            let p = 1e6;
            let slope = (lk(p + 1e-3) - lk(p)) / 1e-3;
            assert!((slope + asym.d).abs() < 1e-6, "slope {slope}");
            let log_ratio = lk(p) + asym.d * p;
            assert!(
                (log_ratio - asym.limit_amplitude().ln()).abs() < 2e-3,
                "{m:?}: {log_ratio}"
            );
        }
    }

    #[test]
    fn moment_finiteness() {
        let k = coeffs(Measure::P2);
        // martingale: E[e^{Z}] = e^{rτ}
        assert!(moment_finite(1.0, 0.1, &k, 1.0));
        let m1 = kernel_psi(c(0.0, -1.0), 0.0, 0.1, &k, 1.0).unwrap();
        assert!((m1 - c((0.03f64).exp(), 0.0)).norm() < 1e-12);
        assert!(moment_finite(-1.0, 0.1, &k, 1.0));
        assert!(moment_finite(2.0, 0.1, &k, 1.0));
        // ρ < 0 keeps moderate positive moments finite for every maturity
        assert!(moment_finite(51.0, 0.1, &k, 50.0));
        assert!(!moment_finite(80.0, 0.1, &k, 5.0));
        assert!(!moment_finite(-20.0, 0.1, &k, 1.0));
    }

    #[test]
    fn moment_boundary_matches_riccati_blowup() {
        // Integrate the variance Riccati equation at real u until blow-up and
        // compare with the closed-form explosion time.
        let k = coeffs(Measure::P2);
        let u = 80.0;
        let s2 = k.sigma * k.sigma;
        let rhs = |bv: f64| {
            0.5 * s2 * bv * bv - (k.b - k.sigma * k.rho * u) * bv + 0.5 * (u * u + 2.0 * k.c * u)
        };
        let (mut t, mut bv, h) = (0.0f64, 0.0f64, 1e-6);
        while bv.is_finite() && bv < 1e12 && t < 10.0 {
            let k1 = rhs(bv);
            let k2 = rhs(bv + 0.5 * h * k1);
            let k3 = rhs(bv + 0.5 * h * k2);
            let k4 = rhs(bv + h * k3);
            bv += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
        }
        assert!(t < 10.0);
        assert!(moment_finite(u, 0.1, &k, t * 0.99));
        assert!(!moment_finite(u, 0.1, &k, t * 1.01));
    }

    #[test]
    fn singular_frequency_is_reported() {
        // γ² = 0 at p = −iu with σ²(−u² − 2cu) + (b − σρu)² = 0
        let k = HestonParams::new(1.0, 0.1, 1.0, 0.0, 0.0, 0.0)
            .unwrap()
            .coefficients(Measure::P2, CoefficientMode::Consistent)
            .unwrap();
        // c = −½, b = 1, σ = 1, ρ = 0: −u² + u + 1 = 0
        let u = (1.0 + 5f64.sqrt()) / 2.0;
        let res = intermediates(c(0.0, -u), 0.0, &k, 1.0);
        match res {
            Err(Error::SingularFrequency { .. }) => {}
            Ok(it) => assert!(it.gamma.norm() < 1e-7, "{:?}", it.gamma),
            Err(e) => panic!("{e}"),
        }
    }
}
