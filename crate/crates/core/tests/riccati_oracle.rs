//! The increment kernel checked against direct integration of its Riccati system.

use heston_cfft::charfn::kernel_psi;
use heston_cfft::{CoefficientMode, Complex64 as C64, HestonParams, Measure, MeasureCoefficients};

/// ψ = exp(C + B v − i q v) with
///   B' = −(p² − 2icp)/2 − (b − iσρp) B + σ² B²/2,  B(0) = iq
///   C' = irp + a B,                                C(0) = 0
/// integrated by classical RK4.
fn riccati_psi(p: f64, q: f64, v: f64, k: &MeasureCoefficients, tau: f64, h: f64) -> C64 {
    let i = C64::new(0.0, 1.0);
    let s2 = k.sigma * k.sigma;
    let forcing = -(p * p - 2.0 * i * k.c * p) / 2.0;
    let drift = k.b - i * k.sigma * k.rho * p;
    let rhs = |b: C64| -> (C64, C64) {
        (
            forcing - drift * b + 0.5 * s2 * b * b,
            i * k.r * p + k.a * b,
        )
    };
    let steps = (tau / h).round() as usize;
    let h = tau / steps as f64;
    let (mut b, mut c) = (i * q, C64::new(0.0, 0.0));
    for _ in 0..steps {
        let (kb1, kc1) = rhs(b);
        let (kb2, kc2) = rhs(b + 0.5 * h * kb1);
        let (kb3, kc3) = rhs(b + 0.5 * h * kb2);
        let (kb4, kc4) = rhs(b + h * kb3);
        b += h / 6.0 * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
        c += h / 6.0 * (kc1 + 2.0 * kc2 + 2.0 * kc3 + kc4);
    }
    // the kernel is centered on the starting variance
    (c + b * v - i * q * v).exp()
}

fn coeffs(m: Measure) -> MeasureCoefficients {
    HestonParams::benchmark()
        .coefficients(m, CoefficientMode::Consistent)
        .unwrap()
}

#[test]
fn kernel_at_p10_matches_riccati_integration() {
    for m in [Measure::P1, Measure::P2] {
        let k = coeffs(m);
        let ode = riccati_psi(10.0, 0.0, 0.1, &k, 1.0, 1e-5);
        let closed = kernel_psi(C64::new(10.0, 0.0), 0.0, 0.1, &k, 1.0).unwrap();
        assert!((ode - closed).norm() < 1e-12, "{m:?}: {ode} vs {closed}");
    }
}

#[test]
fn kernel_with_variance_frequency_matches_riccati_integration() {
    let k = coeffs(Measure::P2);
    for (p, q) in [(3.0, 2.0), (-7.5, 0.5), (0.0, -4.0)] {
        let ode = riccati_psi(p, q, 0.1, &k, 2.0, 1e-4);
        let closed = kernel_psi(C64::new(p, 0.0), q, 0.1, &k, 2.0).unwrap();
        assert!(
            (ode - closed).norm() < 1e-10,
            "({p}, {q}): {ode} vs {closed}"
        );
    }
}
