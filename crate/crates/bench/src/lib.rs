//! Fixtures shared by the pricing benchmarks.

use heston_cfft::{build_grid, CoefficientMode, Grid, HestonParams, ShiftDampConfig};

pub const SPOT: f64 = 100.0;
pub const V0: f64 = 0.1;
pub const TAU: f64 = 1.0;
pub const LENGTH: f64 = 10.0;
pub const ALPHA: f64 = -2.0;
pub const STRIKES: [f64; 3] = [80.0, 100.0, 120.0];
pub const SIZES: [usize; 3] = [2000, 4000, 8000];
pub const MODE: CoefficientMode = CoefficientMode::Consistent;

pub fn params() -> HestonParams {
    HestonParams::benchmark()
}

/// Grid centered at `ln(S/K)`, as every CFFT benchmark uses.
pub fn grid(strike: f64, n: usize) -> Grid {
    build_grid((SPOT / strike).ln(), LENGTH, n).expect("benchmark grid is valid")
}

pub fn cfft2_scheme() -> ShiftDampConfig {
    ShiftDampConfig::exponential(ALPHA)
}
