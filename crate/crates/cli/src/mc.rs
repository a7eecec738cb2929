//! Seeded Monte Carlo estimate of the exercise probabilities, for cross-checking.

use heston_cfft::{HestonParams, Measure};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

const STREAMS: u64 = 64;

#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub paths: usize,
    pub steps: usize,
    pub seed: u64,
}

#[allow(clippy::too_many_arguments)]
/// `P(x_T ≥ 0)` from log-moneyness `x` by full-truncation Euler.
///
/// P2 is the risk-neutral exercise probability. P1 uses the share measure, under
/// which the log-price drift gains `v` and the variance drift gains `ρσv`.
pub fn exercise_probability(
    measure: Measure,
    params: &HestonParams,
    x: f64,
    v0: f64,
    tau: f64,
    paths: usize,
    steps: usize,
    seed: u64,
) -> McEstimate {
    let (kb, tb) = (params.kappa_bar(), params.theta_bar());
    let (sigma, rho, r) = (params.sigma, params.rho, params.r);
    let (drift_sign, vol_tilt) = match measure {
        Measure::P1 => (1.0, rho * sigma),
        Measure::P2 => (-1.0, 0.0),
    };
    let dt = tau / steps as f64;
    let sq = dt.sqrt();
    let orth = (1.0 - rho * rho).sqrt();
    let per = paths.div_ceil(STREAMS as usize);
    let hits: usize = (0..STREAMS)
        .into_par_iter()
        .map(|stream| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let mut hits = 0usize;
            for _ in 0..per {
                let (mut xt, mut v) = (x, v0);
                for _ in 0..steps {
                    let z1: f64 = StandardNormal.sample(&mut rng);
                    let z2: f64 = StandardNormal.sample(&mut rng);
                    let vp = v.max(0.0);
                    let s = vp.sqrt();
                    xt += (r + 0.5 * drift_sign * vp) * dt + s * sq * z1;
                    v += (kb * (tb - vp) + vol_tilt * vp) * dt
                        + sigma * s * sq * (rho * z1 + orth * z2);
                }
                if xt >= 0.0 {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let n = per * STREAMS as usize;
    let p = hits as f64 / n as f64;
    McEstimate {
        value: p,
        std_error: (p * (1.0 - p) / n as f64).sqrt(),
        paths: n,
        steps,
        seed,
    }
}
