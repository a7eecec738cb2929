//! `heston-cfft`: prices, probabilities and the numerical experiments as JSON and CSV.

mod commands;
mod config;
mod mc;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{
    BenchArgs, BoundaryArgs, CfScanArgs, ConvergenceArgs, PriceArgs, ProbArgs, Table1Args,
};
use crate::config::{CommonArgs, ConfigError, Settings};

#[derive(Debug, Parser)]
#[command(
    name = "heston-cfft",
    version,
    about = "Heston call pricing by convolution FFT"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Price one call and report the error against the quadrature oracle (JSON).
    Price(PriceArgs),
    /// Exercise probability P1 or P2 (JSON).
    Prob(ProbArgs),
    /// CFFT-II and Carr–Madan prices, errors and timings over N x K (CSV).
    Table1(Table1Args),
    /// Joint vs original characteristic-function integrand over p, with phase jumps (CSV).
    CfScan(CfScanArgs),
    /// CFFT-I probabilities across the grid with and without shifting (CSV).
    Boundary(BoundaryArgs),
    /// Error against N or x for several damping/shift schemes with bound overlays (CSV).
    Convergence(ConvergenceArgs),
    /// Median wall times for each method (CSV).
    Bench(BenchArgs),
}

fn init_threads() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var("HESTON_CFFT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        ConfigError(format!(
            "HESTON_CFFT_THREADS must be a positive integer (got '{raw}')"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    init_threads()?;
    let settings = Settings::resolve(&cli.common)?;
    let out = cli.common.out.as_deref();
    match cli.command {
        Command::Price(a) => commands::price(&settings, &a, out),
        Command::Prob(a) => commands::prob(&settings, &a, out),
        Command::Table1(a) => commands::table1(&settings, &a, out),
        Command::CfScan(a) => commands::cf_scan(&settings, &a, out),
        Command::Boundary(a) => commands::boundary(&settings, &a, out),
        Command::Convergence(a) => commands::convergence(&settings, &a, out),
        Command::Bench(a) => commands::bench(&settings, &a, out),
    }
}

/// 2 for configuration and precondition errors, 3 for numerical failures, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    use heston_cfft::Error as E;
    for cause in err.chain() {
        if cause.is::<ConfigError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::QuadratureFailure { .. } | E::PoleInG(_) | E::SingularFrequency { .. } => 3,
                _ => 2,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use heston_cfft::Error as E;

    #[test]
    fn exit_codes_follow_error_kind() {
        let config: anyhow::Error = ConfigError("bad".into()).into();
        assert_eq!(exit_code(&config), 2);
        assert_eq!(
            exit_code(&E::DampingInfeasible("alpha < -1".into()).into()),
            2
        );
        assert_eq!(exit_code(&E::InvalidGrid("odd".into()).into()), 2);
        assert_eq!(
            exit_code(
                &E::QuadratureFailure {
                    estimate: 1.0,
                    tolerance: 1e-10
                }
                .into()
            ),
            3
        );
        assert_eq!(exit_code(&E::PoleInG(0.0).into()), 3);
        assert_eq!(exit_code(&anyhow::anyhow!("disk full")), 1);
    }
}
