//! `cesaro-lab` command-line runner.

mod commands;
mod input;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "cesaro-lab",
    version,
    about = "Experiments with the Cesàro operator"
)]
struct Cli {
    /// Worker threads for the parallel regions (CESARO_LAB_THREADS overrides).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized inputs; recorded in every output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// A sequence from a JSON file or a built-in example.
#[derive(Debug, Args, Clone)]
pub struct SeqSource {
    /// Sequence JSON: {"prefix": [...], "limit": ...}.
    #[arg(long, conflicts_with = "example")]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    example: Option<SeqExample>,
    /// Truncation length: the prefix is cut or padded with the limit.
    #[arg(long = "N")]
    size: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SeqExample {
    /// x_0 = 0, x_k = 1/log(k+2).
    Slow,
    /// x_0 = 0, x_k = 1 for k ≥ 1.
    Step,
    /// (I − T)y for uniformly random y.
    RandomRange,
    /// (I − T)²y for uniformly random y.
    RandomRange2,
    /// 1/(k(k+1)), with x_0 = 0.
    Telescoping,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Orbit norms ‖Tⁿx − Px‖ by direct iteration on a dyadic schedule.
    Orbit {
        #[command(flatten)]
        source: SeqSource,
        #[arg(long, default_value_t = 1024)]
        nmax: usize,
    },
    /// Log-log slope of an orbit history.
    Rate {
        /// History CSV written by `orbit`.
        #[arg(long, conflicts_with_all = ["input", "example"])]
        history: Option<PathBuf>,
        #[command(flatten)]
        source: SeqSource,
        #[arg(long, default_value_t = 1024)]
        nmax: usize,
        #[arg(long)]
        lo: Option<usize>,
        #[arg(long)]
        hi: Option<usize>,
    },
    /// Membership in Ran(I − T) (order 1) or Ran(I − T)² (order 2).
    RangeCheck {
        #[command(flatten)]
        source: SeqSource,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        order: u8,
    },
    /// A preimage under I − T.
    Preimage {
        #[command(flatten)]
        source: SeqSource,
        /// Starting value, `re` or `re,im`.
        #[arg(long, default_value = "0")]
        y0: String,
    },
    /// Laguerre polynomials L_n^(1) and their weighted integrals.
    Laguerre {
        #[command(subcommand)]
        op: LaguerreOp,
    },
    /// Upper bounds for ‖T_αⁿ‖.
    Talpha {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 60)]
        nmax: usize,
    },
    /// Finite-section norms of Tⁿ(I − T).
    Opnorm {
        #[arg(long = "N", default_value_t = 4096)]
        size: usize,
        #[arg(long, default_value_t = 512)]
        nmax: usize,
        #[arg(long)]
        full_sweep: bool,
        #[arg(long, default_value_t = 4)]
        stride: usize,
        #[arg(long, default_value_t = 8)]
        refine: usize,
    },
    /// Location of a point relative to the spectrum.
    Spectrum {
        /// `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Lower bound for the resolvent norm at e^{iθ}.
    Resolvent {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Borel transforms, Abel means and the integrability probe.
    Borel {
        #[command(subcommand)]
        op: BorelOp,
    },
    /// The operator on continuous functions.
    Continuous {
        #[command(subcommand)]
        op: ContinuousOp,
    },
    /// The dual operator on finitely supported functionals.
    Dual {
        #[command(subcommand)]
        op: DualOp,
    },
}

#[derive(Debug, Subcommand)]
enum LaguerreOp {
    /// L_n^(1)(t).
    Eval {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: f64,
    },
    /// Closed form of ∫ e^{-αt} (−1)ⁿ L_n^(1)(t) dt.
    Signed {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
    },
    /// ∫ e^{-αt} |L_n^(1)(t)| dt.
    Abs {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
    },
    /// Table of absolute over signed integrals for n = 0..=nmax.
    Ratio {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 40)]
        nmax: usize,
    },
}

/// A coefficient sequence from the catalog or a JSON file.
#[derive(Debug, Args, Clone)]
pub struct CoeffSource {
    #[arg(long, conflicts_with = "input")]
    name: Option<String>,
    /// Coefficient JSON: {"coeffs": [[re, im], ...], "tail": {"rule": ...}}.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum BorelOp {
    /// ∫ f and ∫ |f| for the Borel transform f.
    Integral {
        #[command(flatten)]
        source: CoeffSource,
        #[arg(long, default_value_t = 1e-15)]
        abs_tol: f64,
        #[arg(long, default_value_t = 1e-12)]
        rel_tol: f64,
    },
    /// Σ a_k / r^{k+1}.
    Abel {
        #[command(flatten)]
        source: CoeffSource,
        #[arg(long)]
        r: f64,
    },
    /// Integrability probe for the transform attached to a sequence.
    AlProbe {
        #[command(flatten)]
        source: SeqSource,
    },
}

/// A function from a JSON spec or the catalog.
#[derive(Debug, Args, Clone)]
pub struct FnSource {
    /// Function JSON: {"space":, "kind":, "coeffs"|"points":}.
    #[arg(long, conflicts_with = "function")]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    function: Option<FnExample>,
    /// Subtract f(0) first.
    #[arg(long)]
    centered: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FnExample {
    /// t on [0, 1].
    Identity,
    /// 1/log(e/t) on [0, 1].
    Invlog,
    /// sin(t)/log(2+t) on [0, ∞).
    Sinlog,
}

#[derive(Debug, Subcommand)]
enum ContinuousOp {
    /// Sup norms ‖Tⁿf − f(0)‖ on a dyadic schedule.
    Orbit {
        #[command(flatten)]
        source: FnSource,
        #[arg(long, default_value_t = 1024)]
        nmax: usize,
        #[arg(long, default_value_t = 128)]
        grid: usize,
    },
    /// Log-log slope of the orbit norms.
    Rate {
        #[command(flatten)]
        source: FnSource,
        #[arg(long, default_value_t = 1024)]
        nmax: usize,
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long)]
        lo: Option<usize>,
        #[arg(long)]
        hi: Option<usize>,
    },
    /// Membership in Ran(I − T).
    Range {
        #[command(flatten)]
        source: FnSource,
    },
    /// Samples of a preimage under I − T.
    Preimage {
        #[command(flatten)]
        source: FnSource,
        #[arg(long, default_value_t = 64)]
        points: usize,
    },
}

#[derive(Debug, Subcommand)]
enum DualOp {
    /// ℓ¹ distances ‖Sⁿφ − Qφ‖ for n = 0..=nmax.
    Orbit {
        /// Functional JSON: {"a_inf": ..., "coeffs": [...]}.
        #[arg(long, conflicts_with = "coordinate")]
        input: Option<PathBuf>,
        /// Use the coordinate functional π_k.
        #[arg(long)]
        coordinate: Option<usize>,
        #[arg(long, default_value_t = 64)]
        nmax: usize,
    },
}

/// Failure classes, mapped to exit codes 1 and 2.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Numerical(String),
}

impl From<cesaro_lab::Error> for Failure {
    fn from(e: cesaro_lab::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    match std::env::var("CESARO_LAB_THREADS") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            Failure::Input(format!(
                "CESARO_LAB_THREADS must be a positive integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(flag),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = thread_count(cli.threads)? {
        if n == 0 {
            return Err(Failure::Input("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    let ctx = commands::Context {
        seed: cli.seed,
        out: cli.out,
    };
    use commands as c;
    match cli.command {
        Command::Orbit { source, nmax } => c::orbit(&ctx, &source, nmax),
        Command::Rate {
            history,
            source,
            nmax,
            lo,
            hi,
        } => c::rate(&ctx, history.as_deref(), &source, nmax, lo, hi),
        Command::RangeCheck { source, order } => c::range_check(&ctx, &source, order),
        Command::Preimage { source, y0 } => c::preimage(&ctx, &source, &y0),
        Command::Laguerre { op } => match op {
            LaguerreOp::Eval { n, t } => c::laguerre_eval(&ctx, n, t),
            LaguerreOp::Signed { n, alpha } => c::laguerre_signed(&ctx, n, alpha),
            LaguerreOp::Abs { n, alpha } => c::laguerre_abs(&ctx, n, alpha),
            LaguerreOp::Ratio { alpha, nmax } => c::laguerre_ratio(&ctx, alpha, nmax),
        },
        Command::Talpha { alpha, nmax } => c::talpha(&ctx, alpha, nmax),
        Command::Opnorm {
            size,
            nmax,
            full_sweep,
            stride,
            refine,
        } => c::opnorm(
            &ctx,
            size,
            nmax,
            cesaro_lab::spectral::SweepOptions {
                full_sweep,
                stride,
                refine,
            },
        ),
        Command::Spectrum { z } => c::spectrum(&ctx, &z),
        Command::Resolvent { theta } => c::resolvent(&ctx, theta),
        Command::Borel { op } => match op {
            BorelOp::Integral {
                source,
                abs_tol,
                rel_tol,
            } => c::borel_integral(&ctx, &source, abs_tol, rel_tol),
            BorelOp::Abel { source, r } => c::borel_abel(&ctx, &source, r),
            BorelOp::AlProbe { source } => c::borel_probe(&ctx, &source),
        },
        Command::Continuous { op } => match op {
            ContinuousOp::Orbit { source, nmax, grid } => {
                c::continuous_orbit(&ctx, &source, nmax, grid)
            }
            ContinuousOp::Rate {
                source,
                nmax,
                grid,
                lo,
                hi,
            } => c::continuous_rate(&ctx, &source, nmax, grid, lo, hi),
            ContinuousOp::Range { source } => c::continuous_range(&ctx, &source),
            ContinuousOp::Preimage { source, points } => {
                c::continuous_preimage(&ctx, &source, points)
            }
        },
        Command::Dual { op } => match op {
            DualOp::Orbit {
                input,
                coordinate,
                nmax,
            } => c::dual_orbit(&ctx, input.as_deref(), coordinate, nmax),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}
