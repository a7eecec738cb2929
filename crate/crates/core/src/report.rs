//! Result rows shared by every pricing method.

use serde::{Deserialize, Serialize};

use crate::model::CoefficientMode;

/// One priced point. Columns: method, N, L, alpha, shift, K, S, value,
/// abs_err_vs_oracle, wall_time_ns, mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceReport {
    pub method: String,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub alpha: Option<f64>,
    pub shift: String,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub value: f64,
    pub abs_err_vs_oracle: Option<f64>,
    pub wall_time_ns: u128,
    pub mode: CoefficientMode,
}

impl PriceReport {
    pub const HEADER: [&'static str; 11] = [
        "method",
        "N",
        "L",
        "alpha",
        "shift",
        "K",
        "S",
        "value",
        "abs_err_vs_oracle",
        "wall_time_ns",
        "mode",
    ];

    /// Sort key giving a deterministic row order for sweeps.
    pub fn sort_key(&self) -> (String, usize, u64, u64) {
        (
            self.method.clone(),
            self.n.unwrap_or(0),
            self.k.to_bits(),
            self.s.to_bits(),
        )
    }
}
