//! Heston option pricing by convolution and FFT on a branch-safe joint
//! characteristic function, with a quadrature oracle, a Carr–Madan baseline
//! and analytical error bounds.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod carr_madan;
pub mod cfft;
pub mod charfn;
pub mod error;
pub mod grid;
pub mod model;
pub mod quadrature;
pub mod report;
pub mod shift;

pub use bounds::{
    calibrate_eps_l, calibrate_eps_vt, discretization_bound, empirical_order, price_error_bound,
    truncation_bound, ErrorBoundInputs, Method, OrderFit, SweepConfig,
};
pub use carr_madan::{carr_madan_price, carr_madan_prices, CarrMadanConfig, CarrMadanPrices};
pub use cfft::{
    cfft1_price, cfft1_prob, cfft2_price, damping_feasible, FrequencyWeighting, HeavisideAtZero,
    ShiftDampConfig, WeightScheme,
};
pub use charfn::{
    asymptotics, intermediates, joint_cf, kernel_psi, original_cf, psi_gradient,
    AsymptoticConstants, Intermediates,
};
pub use error::{Error, Result};
pub use grid::{build_grid, dft_centered, idft_centered, trapezoid_weights, Grid, SampledFunction};
pub use model::*;
pub use num_complex::Complex64;
pub use quadrature::{price_call, prob, Integral, QuadratureConfig};
pub use report::PriceReport;
pub use shift::{exponential_shift, linear_shift, ExpIntercept, ShiftCoefficients, ShiftScheme};
