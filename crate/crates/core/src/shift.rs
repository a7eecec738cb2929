//! Boundary shifts that make a truncated target compatible with periodic extension.
//!
//! Both shifts act on the `N + 1` closed-interval samples `f(x_0), …, f(x_N)`
//! and subtract a function `h` whose expectation under the transition law is
//! known in closed form, so it can be added back after the convolution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftScheme {
    #[default]
    None,
    /// `h(x) = A x + B`
    Linear,
    /// `h(x) = A e^x + B`
    Exponential,
}

impl ShiftScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            ShiftScheme::None => "none",
            ShiftScheme::Linear => "linear",
            ShiftScheme::Exponential => "exponential",
        }
    }
}

impl std::str::FromStr for ShiftScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ShiftScheme::None),
            "linear" => Ok(ShiftScheme::Linear),
            "exponential" => Ok(ShiftScheme::Exponential),
            other => Err(Error::Config(format!(
                "unknown shift '{other}' (expected none, linear, exponential)"
            ))),
        }
    }
}

/// How the exponential shift picks its intercept `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpIntercept {
    /// `B` such that the damped shifted target takes equal values at `x_0` and `x_N`.
    #[default]
    ValueMatching,
    /// Secant intercept `(x_N f_0 − x_0 f_N)/(x_N − x_0)`. Diagnostic only: the damping
    /// factor `e^{−α x_0}` amplifies it enormously.
    Secant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftCoefficients {
    pub a: f64,
    pub b: f64,
    pub scheme: ShiftScheme,
}

impl ShiftCoefficients {
    pub fn zero() -> Self {
        Self {
            a: 0.0,
            b: 0.0,
            scheme: ShiftScheme::None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.scheme {
            ShiftScheme::None => 0.0,
            ShiftScheme::Linear => self.a * x + self.b,
            ShiftScheme::Exponential => self.a * x.exp() + self.b,
        }
    }
}

fn closed_samples<'a>(f: &'a [f64], grid: &Grid, min_n: usize) -> Result<&'a [f64]> {
    if f.len() != grid.n + 1 {
        return Err(Error::LengthMismatch {
            expected: grid.n + 1,
            got: f.len(),
        });
    }
    if grid.n + 1 < min_n {
        return Err(Error::InvalidGrid(format!(
            "shift needs at least {min_n} samples"
        )));
    }
    Ok(f)
}

fn secant(f0: f64, f_n: f64, x0: f64, xn: f64) -> Result<(f64, f64)> {
    let span = xn - x0;
    if span == 0.0 {
        return Err(Error::InvalidGrid("zero-length interval".into()));
    }
    Ok(((f_n - f0) / span, (xn * f0 - x0 * f_n) / span))
}

/// Subtracts the secant through the endpoints; the result vanishes at both ends.
pub fn linear_shift(f: &[f64], grid: &Grid) -> Result<(Vec<f64>, ShiftCoefficients)> {
    let f = closed_samples(f, grid, 2)?;
    let xs = grid.closed_nodes();
    let (x0, xn) = (xs[0], xs[grid.n]);
    let (a, b) = secant(f[0], f[grid.n], x0, xn)?;
    let coeffs = ShiftCoefficients {
        a,
        b,
        scheme: ShiftScheme::Linear,
    };
    let shifted = f.iter().zip(&xs).map(|(v, x)| v - (a * x + b)).collect();
    Ok((shifted, coeffs))
}

/// Three-point one-sided derivatives `(f'_0, f'_N)` on the closed samples.
pub fn endpoint_derivatives(f: &[f64], dx: f64) -> (f64, f64) {
    let m = f.len() - 1;
    let d0 = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
    let dn = (3.0 * f[m] - 4.0 * f[m - 1] + f[m - 2]) / (2.0 * dx);
    (d0, dn)
}

/// Subtracts `A e^x + B` so that `e^{αx}(f − A e^x − B)` has equal one-sided
/// derivatives at `x_0` and `x_N` (and, with [`ExpIntercept::ValueMatching`],
/// equal values).
///
/// Returns the undamped shifted samples.
pub fn exponential_shift(
    f: &[f64],
    grid: &Grid,
    alpha: f64,
    intercept: ExpIntercept,
) -> Result<(Vec<f64>, ShiftCoefficients)> {
    if !(alpha < -1.0) {
        return Err(Error::DampingInfeasible("alpha < -1".into()));
    }
    let f = closed_samples(f, grid, 3)?;
    let xs = grid.closed_nodes();
    let m = grid.n;
    let (x0, xn) = (xs[0], xs[m]);
    let (d0, dn) = endpoint_derivatives(f, grid.dx);
    let (e0, en) = ((alpha * x0).exp(), (alpha * xn).exp());
    let denom = ((alpha + 1.0) * xn).exp() - ((alpha + 1.0) * x0).exp();
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::InvalidShift(format!(
            "degenerate exponential shift denominator {denom}"
        )));
    }
    let a = (en * dn - e0 * d0) / denom;
    let b = match intercept {
        ExpIntercept::ValueMatching => {
            (en * (f[m] - a * xn.exp()) - e0 * (f[0] - a * x0.exp())) / (en - e0)
        }
        ExpIntercept::Secant => secant(f[0], f[m], x0, xn)?.1,
    };
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidShift(format!(
            "non-finite shift coefficients A={a}, B={b}"
        )));
    }
    let coeffs = ShiftCoefficients {
        a,
        b,
        scheme: ShiftScheme::Exponential,
    };
    let shifted = f
        .iter()
        .zip(&xs)
        .map(|(v, x)| v - (a * x.exp() + b))
        .collect();
    Ok((shifted, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    fn sample(grid: &Grid, f: impl Fn(f64) -> f64) -> Vec<f64> {
        grid.closed_nodes().into_iter().map(f).collect()
    }

    #[test]
    fn linear_absorbs_linear_functions() {
        let g = build_grid(0.4, 3.0, 64).unwrap();
        let (s, c) = linear_shift(&sample(&g, |x| x), &g).unwrap();
        assert!((c.a - 1.0).abs() < 1e-14 && c.b.abs() < 1e-14);
        assert!(s.iter().all(|v| v.abs() < 1e-14));

        let (s, c) = linear_shift(&sample(&g, |_| 2.5), &g).unwrap();
        assert_eq!((c.a, c.b), (0.0, 2.5));
        assert!(s.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn linear_heaviside_endpoints() {
        let g = build_grid(0.0, 10.0, 2000).unwrap();
        let (s, c) = linear_shift(&sample(&g, |x| if x >= 0.0 { 1.0 } else { 0.0 }), &g).unwrap();
        assert!((c.a - 0.1).abs() < 1e-15);
        assert!((c.b - 0.5).abs() < 1e-15);
        assert_eq!(s[0], s[2000]);
        assert!(s[0].abs() < 1e-15);
    }

    #[test]
    fn exponential_absorbs_exp() {
        let g = build_grid(0.0, 10.0, 2000).unwrap();
        let f = sample(&g, f64::exp);
        let (s, c) = exponential_shift(&f, &g, -2.0, ExpIntercept::ValueMatching).unwrap();
        assert!((c.a - 1.0).abs() < 1e-4, "A = {}", c.a);
        let xs = g.closed_nodes();
        let damped: Vec<f64> = s
            .iter()
            .zip(&xs)
            .map(|(v, x)| (-2.0 * x).exp() * v)
            .collect();
        let scale = damped.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let (d0, dn) = endpoint_derivatives(&f, g.dx);
        let g0 = (-2.0 * xs[0]).exp() * (d0 - c.a * xs[0].exp()) - 2.0 * damped[0];
        let gn = (-2.0 * xs[2000]).exp() * (dn - c.a * xs[2000].exp()) - 2.0 * damped[2000];
        assert!((g0 - gn).abs() <= 1e-10 * scale, "{g0} vs {gn}");
    }

    #[test]
    fn exponential_matches_damped_derivatives_exactly() {
        // g = e^{αx}(f − A e^x − B) ⇒ g' = e^{αx}(f' − A e^x) + α g. With the
        // one-sided f' and equal endpoint values, equality is algebraic.
        let k = 100.0;
        let c = (100.0f64 / k).ln();
        let g = build_grid(c, 10.0, 2000).unwrap();
        let alpha = -2.0;
        let f = sample(&g, |x| (k * x.exp() - k).max(0.0));
        let (s, sc) = exponential_shift(&f, &g, alpha, ExpIntercept::ValueMatching).unwrap();
        assert!(sc.a.is_finite() && sc.b.is_finite());
        let xs = g.closed_nodes();
        let damped: Vec<f64> = s
            .iter()
            .zip(&xs)
            .map(|(v, x)| (alpha * x).exp() * v)
            .collect();
        let scale = damped.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let m = g.n;
        assert!((damped[0] - damped[m]).abs() <= 1e-8 * scale);
        let (d0, dn) = endpoint_derivatives(&f, g.dx);
        let g0 = (alpha * xs[0]).exp() * (d0 - sc.a * xs[0].exp()) + alpha * damped[0];
        let gn = (alpha * xs[m]).exp() * (dn - sc.a * xs[m].exp()) + alpha * damped[m];
        assert!((g0 - gn).abs() <= 1e-10 * scale, "{g0} vs {gn}");
    }

    #[test]
    fn secant_intercept_is_available() {
        let g = build_grid(0.0, 10.0, 2000).unwrap();
        let f = sample(&g, |x| (100.0 * x.exp() - 100.0).max(0.0));
        let (_, sc) = exponential_shift(&f, &g, -2.0, ExpIntercept::Secant).unwrap();
        let expect = (5.0 * f[0] + 5.0 * f[2000]) / 10.0;
        assert!((sc.b - expect).abs() < 1e-9);
    }

    #[test]
    fn zero_input_and_preconditions() {
        let g = build_grid(0.0, 4.0, 16).unwrap();
        let (s, c) = exponential_shift(&[0.0; 17], &g, -3.0, ExpIntercept::ValueMatching).unwrap();
        assert_eq!((c.a, c.b), (0.0, 0.0));
        assert!(s.iter().all(|v| *v == 0.0));
        assert_eq!(
            exponential_shift(&[0.0; 17], &g, -1.0, ExpIntercept::ValueMatching).unwrap_err(),
            Error::DampingInfeasible("alpha < -1".into())
        );
        assert!(matches!(
            linear_shift(&[0.0; 3], &g),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
