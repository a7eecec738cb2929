use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, ValueEnum};
use heston_cfft::bounds::{cfft2_bound_inputs, error_sample};
use heston_cfft::cfft::cfft2_price_detailed;
use heston_cfft::charfn::{log_joint_cf, log_original_cf};
use heston_cfft::{
    build_grid, calibrate_eps_l, carr_madan_price, cfft1_prob, cfft2_price, price_call,
    price_error_bound, prob as oracle_prob, CarrMadanConfig, CoefficientMode, Complex64 as C64,
    ErrorBoundInputs, Grid, Measure, Method, PriceReport, QuadratureConfig, ShiftDampConfig,
    ShiftScheme, SweepConfig,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ConfigError, Settings};
use crate::mc;
use crate::output::{write_csv, write_json};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MeasureArg {
    #[value(name = "P1")]
    P1,
    #[value(name = "P2")]
    P2,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::P1 => Measure::P1,
            MeasureArg::P2 => Measure::P2,
        }
    }
}

fn parse_method(s: &str) -> Result<Method, ConfigError> {
    s.parse()
        .map_err(|e: heston_cfft::Error| ConfigError(e.to_string()))
}

fn median(mut t: Vec<u128>) -> u128 {
    t.sort_unstable();
    t[t.len() / 2]
}

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

/// Shift/damping settings a method runs with when no `--shift` is given.
fn scheme_for(method: Method, s: &Settings) -> ShiftDampConfig {
    match method {
        Method::Cfft1 => ShiftDampConfig {
            shift: s.shift.unwrap_or(ShiftScheme::Linear),
            ..ShiftDampConfig::none()
        },
        Method::Cfft2 => ShiftDampConfig {
            shift: s.shift.unwrap_or(ShiftScheme::Exponential),
            alpha: s.alpha,
            ..ShiftDampConfig::none()
        },
        Method::Oracle | Method::CarrMadan => ShiftDampConfig::none(),
    }
}

fn oracle_price(s: &Settings, spot: f64, strike: f64) -> Result<heston_cfft::Integral> {
    Ok(price_call(
        spot,
        strike,
        s.v,
        s.tau,
        &s.params,
        s.mode,
        &quad(),
    )?)
}

/// One price by `method` at `(spot, strike)` with its wall time.
fn price_with(
    method: Method,
    s: &Settings,
    spot: f64,
    strike: f64,
    n: usize,
) -> Result<(f64, u128)> {
    let start = Instant::now();
    let value = match method {
        Method::Oracle => oracle_price(s, spot, strike)?.value,
        Method::Cfft1 | Method::Cfft2 => {
            let grid = build_grid((spot / strike).ln(), s.length, n)?;
            let cfg = scheme_for(method, s);
            let all = if method == Method::Cfft1 {
                heston_cfft::cfft1_price(&grid, strike, s.v, s.tau, &s.params, s.mode, &cfg)?
            } else {
                cfft2_price(&grid, strike, s.v, s.tau, &s.params, s.mode, &cfg)?
            };
            all[n / 2]
        }
        Method::CarrMadan => {
            let cm = CarrMadanConfig {
                n,
                eta: s.eta,
                alpha_c: s.alpha_c,
            };
            carr_madan_price(&cm, spot, strike, s.v, s.tau, &s.params, s.mode)?
        }
    };
    Ok((value, start.elapsed().as_nanos()))
}

fn report(
    method: Method,
    s: &Settings,
    strike: f64,
    n: usize,
    value: f64,
    ns: u128,
    oracle: Option<f64>,
) -> PriceReport {
    let grid_method = matches!(method, Method::Cfft1 | Method::Cfft2);
    let scheme = scheme_for(method, s);
    PriceReport {
        method: method.as_str().into(),
        n: (method != Method::Oracle).then_some(n),
        l: grid_method.then_some(s.length),
        alpha: match method {
            Method::Cfft1 | Method::Cfft2 => Some(scheme.alpha),
            Method::CarrMadan => Some(s.alpha_c),
            Method::Oracle => None,
        },
        shift: scheme.shift.as_str().into(),
        k: strike,
        s: s.spot,
        value,
        abs_err_vs_oracle: oracle.map(|o| (value - o).abs()),
        wall_time_ns: ns,
        mode: s.mode,
    }
}

// ---------------------------------------------------------------- price

#[derive(Debug, Args)]
pub struct PriceArgs {
    /// oracle, cfft1, cfft2 or carr_madan.
    #[arg(long, default_value = "cfft2")]
    pub method: String,
}

#[derive(Serialize)]
struct PriceOutput {
    #[serde(flatten)]
    report: PriceReport,
    v: f64,
    tau: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    err_estimate: Option<f64>,
}

pub fn price(s: &Settings, a: &PriceArgs, out: Option<&Path>) -> Result<()> {
    let method = parse_method(&a.method)?;
    let (report, err_estimate) = if method == Method::Oracle {
        let start = Instant::now();
        let i = oracle_price(s, s.spot, s.strike)?;
        (
            report(
                method,
                s,
                s.strike,
                s.n,
                i.value,
                start.elapsed().as_nanos(),
                None,
            ),
            Some(i.err_estimate),
        )
    } else {
        let (value, ns) = price_with(method, s, s.spot, s.strike, s.n)?;
        let oracle = oracle_price(s, s.spot, s.strike)?.value;
        (
            report(method, s, s.strike, s.n, value, ns, Some(oracle)),
            None,
        )
    };
    write_json(
        &PriceOutput {
            report,
            v: s.v,
            tau: s.tau,
            err_estimate,
        },
        out,
    )
}

// ---------------------------------------------------------------- prob

#[derive(Debug, Args)]
pub struct ProbArgs {
    #[arg(long, value_enum, default_value = "P2")]
    pub measure: MeasureArg,
    /// oracle, cfft1 or monte_carlo.
    #[arg(long, default_value = "oracle")]
    pub method: String,
    /// Monte Carlo paths.
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    /// Monte Carlo time steps.
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
}

#[derive(Serialize)]
struct ProbOutput {
    measure: &'static str,
    method: String,
    x: f64,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    err_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    paths: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    mode: CoefficientMode,
    wall_time_ns: u128,
}

pub fn prob(s: &Settings, a: &ProbArgs, out: Option<&Path>) -> Result<()> {
    let measure: Measure = a.measure.into();
    let x = s.log_moneyness();
    let start = Instant::now();
    let (value, err_estimate, monte_carlo) = match a.method.as_str() {
        "oracle" => {
            let i = oracle_prob(measure, x, s.v, s.tau, &s.params, s.mode, &quad())?;
            (i.value, Some(i.err_estimate), None)
        }
        "cfft1" => {
            let grid = build_grid(x, s.length, s.n)?;
            let coeffs = s.params.coefficients(measure, s.mode)?;
            let p = cfft1_prob(&grid, s.v, s.tau, &coeffs, &scheme_for(Method::Cfft1, s))?;
            (p[s.n / 2], None, None)
        }
        "monte_carlo" => {
            if a.paths == 0 || a.steps == 0 {
                return Err(ConfigError("paths and steps must be positive".into()).into());
            }
            let e = mc::exercise_probability(
                measure, &s.params, x, s.v, s.tau, a.paths, a.steps, s.seed,
            );
            (e.value, None, Some(e))
        }
        other => {
            return Err(ConfigError(format!(
                "unknown prob method '{other}' (expected oracle, cfft1, monte_carlo)"
            ))
            .into())
        }
    };
    let measure = match measure {
        Measure::P1 => "P1",
        Measure::P2 => "P2",
    };
    let wall_time_ns = start.elapsed().as_nanos();
    write_json(
        &ProbOutput {
            measure,
            method: a.method.clone(),
            x,
            value,
            err_estimate,
            std_error: monte_carlo.map(|e| e.std_error),
            paths: monte_carlo.map(|e| e.paths),
            steps: monte_carlo.map(|e| e.steps),
            seed: monte_carlo.map(|e| e.seed),
            mode: s.mode,
            wall_time_ns,
        },
        out,
    )
}

// ---------------------------------------------------------------- table1

#[derive(Debug, Args)]
pub struct Table1Args {
    #[arg(long, value_delimiter = ',', default_value = "2000,4000,8000")]
    pub ns: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "80,100,120")]
    pub ks: Vec<f64>,
    /// Timing repetitions; the median is reported.
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
}

fn timed_reports(
    s: &Settings,
    methods: &[Method],
    ns: &[usize],
    ks: &[f64],
    repeats: usize,
) -> Result<Vec<PriceReport>> {
    if repeats == 0 {
        return Err(ConfigError("repeats must be positive".into()).into());
    }
    let oracles: Vec<f64> = ks
        .par_iter()
        .map(|k| Ok(oracle_price(s, s.spot, *k)?.value))
        .collect::<Result<_>>()?;
    let jobs: Vec<(Method, usize, usize)> = methods
        .iter()
        .flat_map(|m| {
            ns.iter()
                .flat_map(move |n| (0..ks.len()).map(move |ki| (*m, *n, ki)))
        })
        .collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(m, n, ki)| {
            let k = ks[ki];
            let mut times = Vec::with_capacity(repeats);
            let mut value = 0.0;
            for _ in 0..repeats {
                let (v, t) = price_with(m, s, s.spot, k, n)?;
                value = v;
                times.push(t);
            }
            let oracle = (m != Method::Oracle).then_some(oracles[ki]);
            Ok(report(m, s, k, n, value, median(times), oracle))
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.sort_key());
    Ok(rows)
}

pub fn table1(s: &Settings, a: &Table1Args, out: Option<&Path>) -> Result<()> {
    let rows = timed_reports(
        s,
        &[Method::Cfft2, Method::CarrMadan],
        &a.ns,
        &a.ks,
        a.repeats,
    )?;
    write_csv(&PriceReport::HEADER, &rows, out)
}

// ---------------------------------------------------------------- bench

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "2000,4000,8000")]
    pub ns: Vec<usize>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "oracle,cfft1,cfft2,carr_madan"
    )]
    pub methods: Vec<String>,
    #[arg(long, default_value_t = 21)]
    pub repeats: usize,
}

pub fn bench(s: &Settings, a: &BenchArgs, out: Option<&Path>) -> Result<()> {
    let methods: Vec<Method> = a
        .methods
        .iter()
        .map(|m| parse_method(m))
        .collect::<Result<_, _>>()?;
    if a.repeats == 0 {
        return Err(ConfigError("repeats must be positive".into()).into());
    }
    // sequential so that timings are not contended
    let oracle = oracle_price(s, s.spot, s.strike)?.value;
    let mut rows = Vec::new();
    for &m in &methods {
        let ns: &[usize] = if m == Method::Oracle {
            &a.ns[..1.min(a.ns.len())]
        } else {
            &a.ns
        };
        for &n in ns {
            let mut times = Vec::with_capacity(a.repeats);
            let mut value = 0.0;
            for _ in 0..a.repeats {
                let (v, t) = price_with(m, s, s.spot, s.strike, n)?;
                value = v;
                times.push(t);
            }
            rows.push(report(
                m,
                s,
                s.strike,
                n,
                value,
                median(times),
                (m != Method::Oracle).then_some(oracle),
            ));
        }
    }
    rows.sort_by_key(|r| r.sort_key());
    write_csv(&PriceReport::HEADER, &rows, out)
}

// ---------------------------------------------------------------- cf-scan

#[derive(Debug, Args)]
pub struct CfScanArgs {
    #[arg(long, value_enum, default_value = "P2")]
    pub measure: MeasureArg,
    #[arg(long, default_value_t = 0.0)]
    pub p_min: f64,
    #[arg(long, default_value_t = 500.0)]
    pub p_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub dp: f64,
}

#[derive(Serialize)]
struct CfRow {
    p: f64,
    re_joint: f64,
    im_joint: f64,
    re_original: f64,
    im_original: f64,
    jump_joint: u8,
    jump_original: u8,
}

const CF_HEADER: [&str; 7] = [
    "p",
    "re_joint",
    "im_joint",
    "re_original",
    "im_original",
    "jump_joint",
    "jump_original",
];

fn wrap(d: f64) -> f64 {
    d - 2.0 * PI * (d / (2.0 * PI)).round()
}

pub fn cf_scan(s: &Settings, a: &CfScanArgs, out: Option<&Path>) -> Result<()> {
    if !(a.dp > 0.0 && a.p_max > a.p_min) {
        return Err(ConfigError(format!(
            "need dp > 0 and p_max > p_min (got dp={}, [{}, {}])",
            a.dp, a.p_min, a.p_max
        ))
        .into());
    }
    let coeffs = s.params.coefficients(a.measure.into(), s.mode)?;
    let x = s.log_moneyness();
    let steps = ((a.p_max - a.p_min) / a.dp).round() as usize;
    // both integrands are singular at p = 0
    let ps: Vec<f64> = (0..=steps)
        .map(|i| a.p_min + a.dp * i as f64)
        .filter(|p| *p != 0.0)
        .collect();
    let logs = ps
        .par_iter()
        .map(|&p| {
            let joint = log_joint_cf(C64::new(p, 0.0), 0.0, x, s.v, &coeffs, s.tau)?;
            let original = log_original_cf(p, x, s.v, &coeffs, s.tau)?;
            Ok((joint, original))
        })
        .collect::<Result<Vec<(C64, C64)>>>()?;
    let jumped =
        |prev: Option<f64>, cur: f64| prev.is_some_and(|q| wrap(cur - q).abs() > PI / 2.0) as u8;
    let mut rows = Vec::with_capacity(ps.len());
    let (mut pj, mut po) = (None, None);
    for (&p, (lj, lo)) in ps.iter().zip(&logs) {
        let ip = C64::new(0.0, p);
        let (j, o) = (lj.exp() / ip, lo.exp() / ip);
        rows.push(CfRow {
            p,
            re_joint: j.re,
            im_joint: j.im,
            re_original: o.re,
            im_original: o.im,
            jump_joint: jumped(pj, lj.im),
            jump_original: jumped(po, lo.im),
        });
        pj = Some(lj.im);
        po = Some(lo.im);
    }
    write_csv(&CF_HEADER, &rows, out)
}

// ---------------------------------------------------------------- boundary

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    /// Evaluate the oracle on every k-th node (and the last one).
    #[arg(long, default_value_t = 10)]
    pub oracle_stride: usize,
}

#[derive(Serialize)]
struct BoundaryRow {
    x: f64,
    curve: &'static str,
    p1: f64,
    p2: f64,
}

const BOUNDARY_HEADER: [&str; 4] = ["x", "curve", "P1", "P2"];

pub fn boundary(s: &Settings, a: &BoundaryArgs, out: Option<&Path>) -> Result<()> {
    if a.oracle_stride == 0 {
        return Err(ConfigError("oracle-stride must be positive".into()).into());
    }
    let grid = build_grid(s.log_moneyness(), s.length, s.n)?;
    let c1 = s.params.coefficients(Measure::P1, s.mode)?;
    let c2 = s.params.coefficients(Measure::P2, s.mode)?;
    let mut rows = Vec::new();
    for (name, cfg) in [
        ("none", ShiftDampConfig::none()),
        ("linear", ShiftDampConfig::linear()),
    ] {
        let p1 = cfft1_prob(&grid, s.v, s.tau, &c1, &cfg)?;
        let p2 = cfft1_prob(&grid, s.v, s.tau, &c2, &cfg)?;
        rows.extend((0..grid.n).map(|i| BoundaryRow {
            x: grid.x(i),
            curve: name,
            p1: p1[i],
            p2: p2[i],
        }));
    }
    let mut idx: Vec<usize> = (0..grid.n).step_by(a.oracle_stride).collect();
    if idx.last() != Some(&(grid.n - 1)) {
        idx.push(grid.n - 1);
    }
    let oracle = idx
        .par_iter()
        .map(|&i| {
            let x = grid.x(i);
            let p1 = oracle_prob(Measure::P1, x, s.v, s.tau, &s.params, s.mode, &quad())?.value;
            let p2 = oracle_prob(Measure::P2, x, s.v, s.tau, &s.params, s.mode, &quad())?.value;
            Ok(BoundaryRow {
                x,
                curve: "oracle",
                p1,
                p2,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.extend(oracle);
    write_csv(&BOUNDARY_HEADER, &rows, out)
}

// ---------------------------------------------------------------- convergence

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    /// Max interior error against N.
    N,
    /// Error across the grid at a single N.
    X,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long, value_enum, default_value = "n")]
    pub sweep: Sweep,
    #[arg(long, value_delimiter = ',', default_value = "500,1000,2000,4000,8000")]
    pub ns: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "80,100,120")]
    pub ks: Vec<f64>,
    /// Grid size the bound's ε_L is calibrated on.
    #[arg(long, default_value_t = 2000)]
    pub calibrate_n: usize,
    /// Strike the bound's ε_L is calibrated on.
    #[arg(long, default_value_t = 100.0)]
    pub calibrate_k: f64,
    /// Probe intervals across the interior window |x − ln(S/K)| ≤ L/10.
    #[arg(long, default_value_t = 20)]
    pub probe_intervals: usize,
    /// x sweep: evaluate the oracle on every k-th node.
    #[arg(long, default_value_t = 10)]
    pub stride: usize,
}

/// The CFFT-II damping/shift combinations compared by the sweeps.
fn cfft2_schemes(alpha: f64) -> [(&'static str, ShiftDampConfig); 3] {
    [
        ("none", ShiftDampConfig::none()),
        ("damped", ShiftDampConfig::damped(alpha)),
        ("damped_exponential", ShiftDampConfig::exponential(alpha)),
    ]
}

fn sweep_config(s: &Settings, strike: f64, probe_intervals: usize) -> SweepConfig {
    SweepConfig {
        params: s.params,
        mode: s.mode,
        spot: s.spot,
        strike,
        v: s.v,
        tau: s.tau,
        length: s.length,
        cfft1: scheme_for(Method::Cfft1, s),
        cfft2: ShiftDampConfig::exponential(s.alpha),
        carr_madan_eta: s.eta,
        carr_madan_alpha: s.alpha_c,
        quad: quad(),
        probe_half_width: 0.1,
        probe_intervals,
    }
}

fn target_sup(cfg: &SweepConfig, grid: &Grid) -> Result<f64> {
    Ok(cfft2_price_detailed(
        grid,
        cfg.strike,
        cfg.v,
        cfg.tau,
        &cfg.params,
        cfg.mode,
        &cfg.cfft2,
    )?
    .target_sup)
}

/// Bound inputs with ε_L fitted so the bound meets the measured error on one `(N, K)` sample.
fn calibrated_bound(s: &Settings, a: &ConvergenceArgs) -> Result<ErrorBoundInputs> {
    let cfg = sweep_config(s, a.calibrate_k, a.probe_intervals);
    let oracle = cfg.oracle_probes()?;
    let sample = error_sample(Method::Cfft2, a.calibrate_n, &cfg, &oracle)?;
    let grid = cfg.grid(a.calibrate_n)?;
    let mut inputs = cfft2_bound_inputs(&cfg, a.calibrate_n, target_sup(&cfg, &grid)?)?;
    inputs.eps_l = calibrate_eps_l(&sample.probe_errors, cfg.strike, s.params.r, s.tau, &inputs)?;
    Ok(inputs)
}

#[derive(Serialize)]
struct NRow {
    #[serde(rename = "N")]
    n: usize,
    method: &'static str,
    scheme: &'static str,
    #[serde(rename = "K")]
    k: f64,
    max_interior_err: f64,
    bound_value: Option<f64>,
    wall_time_ns: u128,
}

const N_HEADER: [&str; 7] = [
    "N",
    "method",
    "scheme",
    "K",
    "max_interior_err",
    "bound_value",
    "wall_time_ns",
];

#[derive(Serialize)]
struct XRow {
    x: f64,
    scheme: &'static str,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: f64,
    value: f64,
    oracle: f64,
    abs_err: f64,
    bound_value: Option<f64>,
}

const X_HEADER: [&str; 8] = [
    "x",
    "scheme",
    "N",
    "K",
    "value",
    "oracle",
    "abs_err",
    "bound_value",
];

pub fn convergence(s: &Settings, a: &ConvergenceArgs, out: Option<&Path>) -> Result<()> {
    if a.probe_intervals == 0 || a.stride == 0 {
        return Err(ConfigError("probe-intervals and stride must be positive".into()).into());
    }
    let inputs = calibrated_bound(s, a)?;
    match a.sweep {
        Sweep::N => convergence_n(s, a, &inputs, out),
        Sweep::X => convergence_x(s, a, &inputs, out),
    }
}

fn convergence_n(
    s: &Settings,
    a: &ConvergenceArgs,
    inputs: &ErrorBoundInputs,
    out: Option<&Path>,
) -> Result<()> {
    let r = s.params.r;
    let mut rows = Vec::new();
    for &k in &a.ks {
        let base = sweep_config(s, k, a.probe_intervals);
        let oracle = base.oracle_probes()?;
        let mut jobs: Vec<(&'static str, &'static str, Method, SweepConfig)> = vec![
            ("cfft1", "linear", Method::Cfft1, base),
            ("carr_madan", "none", Method::CarrMadan, base),
        ];
        for (name, scheme) in cfft2_schemes(s.alpha) {
            jobs.push((
                "cfft2",
                name,
                Method::Cfft2,
                SweepConfig {
                    cfft2: scheme,
                    ..base
                },
            ));
        }
        let part = jobs
            .par_iter()
            .flat_map_iter(|job| a.ns.iter().map(move |n| (job, *n)))
            .map(|(&(method, scheme, m, cfg), n)| {
                let sample = error_sample(m, n, &cfg, &oracle)?;
                let bound_value = if scheme == "damped_exponential" {
                    let at_n = ErrorBoundInputs {
                        fbar: target_sup(&cfg, &cfg.grid(n)?)?,
                        ..inputs.with_n(n)
                    };
                    let b = cfg
                        .probes()
                        .iter()
                        .map(|x| price_error_bound(*x, k, r, s.tau, &at_n))
                        .fold(0.0, f64::max);
                    Some(b)
                } else {
                    None
                };
                Ok(NRow {
                    n,
                    method,
                    scheme,
                    k,
                    max_interior_err: sample.max_interior_err,
                    bound_value,
                    wall_time_ns: sample.wall_time_ns,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(part);
    }
    rows.sort_by(|a, b| {
        (a.method, a.scheme, a.k.to_bits(), a.n).cmp(&(b.method, b.scheme, b.k.to_bits(), b.n))
    });
    write_csv(&N_HEADER, &rows, out)
}

fn convergence_x(
    s: &Settings,
    a: &ConvergenceArgs,
    inputs: &ErrorBoundInputs,
    out: Option<&Path>,
) -> Result<()> {
    let n = s.n;
    let r = s.params.r;
    let mut rows = Vec::new();
    for &k in &a.ks {
        let cfg = sweep_config(s, k, a.probe_intervals);
        let grid = cfg.grid(n)?;
        let idx: Vec<usize> = (0..n)
            .step_by(a.stride)
            .chain(std::iter::once(n - 1))
            .collect();
        let oracle = idx
            .par_iter()
            .map(|&i| Ok(cfg.oracle_at(grid.x(i))?))
            .collect::<Result<Vec<f64>>>()?;
        let at_n = ErrorBoundInputs {
            fbar: target_sup(&cfg, &grid)?,
            ..inputs.with_n(n)
        };
        for (scheme, sd) in cfft2_schemes(s.alpha) {
            let values = cfft2_price(&grid, k, s.v, s.tau, &s.params, s.mode, &sd)?;
            for (&i, &o) in idx.iter().zip(&oracle) {
                let x = grid.x(i);
                rows.push(XRow {
                    x,
                    scheme,
                    n,
                    k,
                    value: values[i],
                    oracle: o,
                    abs_err: (values[i] - o).abs(),
                    bound_value: (scheme == "damped_exponential")
                        .then(|| price_error_bound(x, k, r, s.tau, &at_n)),
                });
            }
        }
    }
    write_csv(&X_HEADER, &rows, out)
}
