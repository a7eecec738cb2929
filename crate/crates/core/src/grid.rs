//! Centered truncated lattices and the discrete transforms built on them.
//!
//! Node `n` of a grid sits at `x_n = c + (n − N/2)Δx` and frequency node `k` at
//! `p_k = (k − N/2)Δp` with `Δx Δp = 2π/N`. The centered transform is
//! `F_k = Σ_n f_n e^{−i p_k (x_n − c)}`, which equals the standard FFT composed
//! with `(−1)^n` / `(−1)^k` sign flips.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::FftPlanner;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub center: f64,
    pub length: f64,
    pub n: usize,
    pub dx: f64,
    pub dp: f64,
}

impl Grid {
    pub fn x(&self, n: usize) -> f64 {
        self.center + (n as f64 - (self.n / 2) as f64) * self.dx
    }

    pub fn p(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.dp
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        (0..self.n).map(|n| self.x(n)).collect()
    }

    pub fn p_nodes(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.p(k)).collect()
    }

    /// Right end of the closed interval, `c + L/2`, one step past the last node.
    pub fn x_end(&self) -> f64 {
        self.center + self.length / 2.0
    }

    /// The `N + 1` points `x_0, …, x_{N−1}, x_N` of the closed interval.
    pub fn closed_nodes(&self) -> Vec<f64> {
        let mut xs = self.x_nodes();
        xs.push(self.x_end());
        xs
    }

    /// Index of the node nearest to `x`, if `x` lies on the grid span.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        let k = ((x - self.center) / self.dx).round() + (self.n / 2) as f64;
        (k >= 0.0 && k < self.n as f64).then_some(k as usize)
    }
}

pub fn build_grid(center: f64, length: f64, n: usize) -> Result<Grid> {
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!("N must be even, got {n}")));
    }
    if n < 4 {
        return Err(Error::InvalidGrid(format!("N must be at least 4, got {n}")));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "L must be positive and finite, got {length}"
        )));
    }
    if !center.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "center must be finite, got {center}"
        )));
    }
    Ok(Grid {
        center,
        length,
        n,
        dx: length / n as f64,
        dp: 2.0 * std::f64::consts::PI / length,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub grid: Grid,
    pub values: Vec<C64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::LengthMismatch {
                expected: grid.n,
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> C64) -> Self {
        let values = grid.x_nodes().into_iter().map(f).collect();
        Self { grid, values }
    }
}

/// Composite trapezoid weights `{1/2, 1, …, 1, 1/2}` (multiply by `Δx` at the use site).
pub fn trapezoid_weights(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidGrid(format!(
            "trapezoid weights need N >= 2, got {n}"
        )));
    }
    let mut w = vec![1.0; n];
    w[0] = 0.5;
    w[n - 1] = 0.5;
    Ok(w)
}

fn alternate(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn check_len(f: &SampledFunction) -> Result<()> {
    if f.values.len() != f.grid.n {
        return Err(Error::LengthMismatch {
            expected: f.grid.n,
            got: f.values.len(),
        });
    }
    Ok(())
}

/// `F_k = Σ_n f_n e^{−i p_k (x_n − c)}`, indexed by centered frequency node `k`.
pub fn dft_centered(f: &SampledFunction) -> Result<SampledFunction> {
    check_len(f)?;
    let n = f.grid.n;
    let global = alternate(n / 2);
    let mut buf: Vec<C64> = f
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v * alternate(i))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= global * alternate(k);
    }
    Ok(SampledFunction {
        grid: f.grid,
        values: buf,
    })
}

/// `f_n = (1/N) Σ_k F_k e^{i p_k (x_n − c)}`, the inverse of [`dft_centered`].
pub fn idft_centered(f: &SampledFunction) -> Result<SampledFunction> {
    check_len(f)?;
    let n = f.grid.n;
    let scale = alternate(n / 2) / n as f64;
    let mut buf: Vec<C64> = f
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| v * alternate(k))
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    for (i, v) in buf.iter_mut().enumerate() {
        *v *= scale * alternate(i);
    }
    Ok(SampledFunction {
        grid: f.grid,
        values: buf,
    })
}

/// Real-input convolution with a Hermitian kernel through a half spectrum.
///
/// Computes `Re[(−1)^n IDFT( DFT((−1)^n w_n f_n) · K(p) · w^p )]` on the centered
/// grid while evaluating the kernel only at the `N/2 + 1` non-positive
/// frequencies `p_j = (j − N/2)Δp`. The kernel must satisfy `K(−p) = conj K(p)`.
#[derive(Clone)]
pub struct RealConvolver {
    n: usize,
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
}

impl std::fmt::Debug for RealConvolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RealConvolver").field("n", &self.n).finish()
    }
}

impl RealConvolver {
    pub fn new(n: usize) -> Result<Self> {
        if !n.is_multiple_of(2) || n < 4 {
            return Err(Error::InvalidGrid(format!(
                "convolver needs even N >= 4, got {n}"
            )));
        }
        let mut planner = RealFftPlanner::<f64>::new();
        Ok(Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Frequencies at which [`Self::convolve`] expects kernel values.
    pub fn half_frequencies(&self, grid: &Grid) -> Vec<f64> {
        (0..=self.n / 2).map(|j| grid.p(j)).collect()
    }

    /// Symmetrizes centered frequency weights onto the half spectrum.
    pub fn half_weights(&self, freq_weights: &[f64]) -> Result<Vec<f64>> {
        if freq_weights.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: freq_weights.len(),
            });
        }
        Ok((0..=self.n / 2)
            .map(|j| 0.5 * (freq_weights[j] + freq_weights[(self.n - j) % self.n]))
            .collect())
    }

    /// `values` and `spatial_weights` have length `N`, `kernel_half` length `N/2 + 1`.
    pub fn convolve(
        &self,
        values: &[f64],
        spatial_weights: &[f64],
        kernel_half: &[C64],
    ) -> Result<Vec<f64>> {
        let n = self.n;
        if values.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: values.len(),
            });
        }
        if spatial_weights.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: spatial_weights.len(),
            });
        }
        if kernel_half.len() != n / 2 + 1 {
            return Err(Error::LengthMismatch {
                expected: n / 2 + 1,
                got: kernel_half.len(),
            });
        }
        let mut input: Vec<f64> = values
            .iter()
            .zip(spatial_weights)
            .enumerate()
            .map(|(i, (f, w))| f * w * alternate(i))
            .collect();
        let mut spectrum = self.forward.make_output_vec();
        self.forward
            .process(&mut input, &mut spectrum)
            .map_err(|e| Error::InvalidGrid(e.to_string()))?;
        for (s, k) in spectrum.iter_mut().zip(kernel_half) {
            *s *= k;
        }
        // The unpaired bins contribute only their real part to a real result.
        spectrum[0].im = 0.0;
        spectrum[n / 2].im = 0.0;
        let mut out = self.inverse.make_output_vec();
        self.inverse
            .process(&mut spectrum, &mut out)
            .map_err(|e| Error::InvalidGrid(e.to_string()))?;
        let scale = 1.0 / n as f64;
        for (i, v) in out.iter_mut().enumerate() {
            *v *= scale * alternate(i);
        }
        Ok(out)
    }
}
