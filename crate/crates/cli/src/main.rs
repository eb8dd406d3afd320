mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Generating-series toolkit: symmetry classification, rank probes,
/// Chen–Fliess simulation, output nulling and series identity checks.
#[derive(Debug, Parser)]
#[command(name = "fliess", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Global,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdentityArg {
    /// The binomial inner sum behind the global nulling lemma.
    AppendixA,
    /// `J_0(λz) = Σ ((1-λ²)z/2)^n / n! J_n(z)`.
    Multiplication,
    /// `z sin(z) / 2 = Σ_k (-1)^{k+1} (2k)² J_{2k}(z)`.
    SineNeumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Sum the Chen–Fliess series of `--series`.
    Fliess,
    /// Convolve with the maximal palindromic kernel.
    Kernel,
    /// Truncated time-varying realization with `--n-max` states.
    Ltv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleArg {
    /// `y_N = atanh(Mt)`.
    Arctanh,
    /// `y_N = e^t sin(2πt)`.
    ExpSin,
}

/// Growth constants of the maximal palindromic system.
#[derive(Debug, Clone, Args)]
pub struct Growth {
    #[arg(long, value_enum, default_value = "global")]
    pub kind: KindArg,
    /// Gain `K > 0` (integer, decimal or p/q).
    #[arg(long = "K", default_value = "1")]
    pub k: String,
    /// Growth rate `M > 0` (integer, decimal or p/q).
    #[arg(long = "M", default_value = "1")]
    pub m: String,
}

/// Uniform time grid `0, dt, …, t_end`.
#[derive(Debug, Clone, Args)]
pub struct Grid {
    #[arg(long = "t-end", default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, Args)]
#[group(multiple = false)]
pub struct Arithmetic {
    /// Exact rational arithmetic.
    #[arg(long)]
    pub exact: bool,
    /// Double-precision arithmetic.
    #[arg(long)]
    pub float: bool,
}

impl Arithmetic {
    pub fn is_exact(self, default_exact: bool) -> bool {
        if self.exact {
            true
        } else if self.float {
            false
        } else {
            default_exact
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report the symmetry classes and relative degree of a series file.
    Classify {
        #[arg(long)]
        series: PathBuf,
        /// Truncation degree; longer words are dropped with a warning.
        #[arg(long)]
        deg: Option<usize>,
        #[command(flatten)]
        arithmetic: Arithmetic,
    },
    /// Print `n, hankel_lb, lie_lb` for the palindromic maximal series.
    Rank {
        #[command(flatten)]
        growth: Growth,
        #[arg(long = "n-max", default_value_t = 5)]
        n_max: usize,
    },
    /// Simulate an output trajectory as a `t,y` CSV.
    Simulate {
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[command(flatten)]
        growth: Growth,
        #[command(flatten)]
        grid: Grid,
        /// `const(c)`, `sin(w)`, `ramp(a)`, `expsin(w)` or a CSV file.
        #[arg(long, default_value = "const(1)")]
        input: String,
        #[arg(long = "n-max", default_value_t = 30)]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kernel profile `τ ↦ h(t, τ)` on `[0, t_end]` as a `tau,value` CSV.
    Kernel {
        #[command(flatten)]
        growth: Growth,
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Null the natural response of `--series` through the global kernel.
    NullGlobal {
        /// Series whose natural part `Σ (c, x0^k) x0^k` is nulled.
        #[arg(long)]
        series: PathBuf,
        #[arg(long = "K", default_value_t = 1.0)]
        k: f64,
        #[arg(long = "M", default_value_t = 1.0)]
        m: f64,
        #[command(flatten)]
        grid: Grid,
        /// Residual `t,y_residual` CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Nulling input `t,u_star` CSV.
        #[arg(long = "u-out")]
        u_out: Option<PathBuf>,
        /// Zero dynamics `t,z1,…` CSV with `--n-max` states.
        #[arg(long = "z-out")]
        z_out: Option<PathBuf>,
        #[arg(long = "n-max", default_value_t = 4)]
        n_max: usize,
    },
    /// Polynomial nulling input for the local kernel.
    NullLocal {
        #[arg(long, conflicts_with = "example")]
        series: Option<PathBuf>,
        #[arg(long, value_enum)]
        example: Option<ExampleArg>,
        #[arg(long = "K", default_value = "1")]
        k: String,
        #[arg(long = "M", default_value = "1")]
        m: String,
        /// Solve for `u_0 … u_{2J}`, matching `t^1 … t^{2J+1}`.
        #[arg(long = "J", default_value_t = 10)]
        j: usize,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        arithmetic: Arithmetic,
        /// Residual `t,y_residual` CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// `t,y_natural,minus_y_forced` CSV.
        #[arg(long = "plot-out")]
        plot_out: Option<PathBuf>,
    },
    /// Check a series identity and report residuals.
    Identity {
        #[arg(value_enum)]
        which: IdentityArg,
        #[arg(long = "ell-max", default_value_t = 60)]
        ell_max: usize,
        #[arg(long = "k-max", default_value_t = 25)]
        k_max: usize,
        #[arg(long, default_value_t = 40)]
        terms: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify {
            series,
            deg,
            arithmetic,
        } => commands::classify(&series, deg, arithmetic.is_exact(true)),
        Command::Rank { growth, n_max } => commands::rank(&growth, n_max),
        Command::Simulate {
            series,
            method,
            growth,
            grid,
            input,
            n_max,
            out,
        } => commands::simulate(commands::SimulateArgs {
            series: series.as_deref(),
            method,
            growth: &growth,
            grid: &grid,
            input: &input,
            n_max,
            out: out.as_deref(),
        }),
        Command::Kernel { growth, grid, out } => commands::kernel(&growth, &grid, out.as_deref()),
        Command::NullGlobal {
            series,
            k,
            m,
            grid,
            out,
            u_out,
            z_out,
            n_max,
        } => commands::null_global(commands::NullGlobalArgs {
            series: &series,
            k,
            m,
            grid: &grid,
            out: out.as_deref(),
            u_out: u_out.as_deref(),
            z_out: z_out.as_deref(),
            n_max,
        }),
        Command::NullLocal {
            series,
            example,
            k,
            m,
            j,
            grid,
            arithmetic,
            out,
            plot_out,
        } => commands::null_local(commands::NullLocalArgs {
            series: series.as_deref(),
            example,
            k: &k,
            m: &m,
            j,
            grid: &grid,
            exact: arithmetic.is_exact(false),
            out: out.as_deref(),
            plot_out: plot_out.as_deref(),
        }),
        Command::Identity {
            which,
            ell_max,
            k_max,
            terms,
        } => commands::identity(which, ell_max, k_max, terms),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", render_chain(&err));
            ExitCode::FAILURE
        }
    }
}

/// Joins an error chain with `: `, dropping causes whose text the previous
/// message already ends with (library errors embed their source).
fn render_chain(err: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in err.chain() {
        let text = cause.to_string();
        if out.ends_with(&text) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&text);
    }
    out
}
