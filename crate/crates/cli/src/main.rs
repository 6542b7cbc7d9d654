use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Characterize every way a linear system can violate a safety property.
#[derive(Debug, Parser)]
#[command(name = "starbdd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Model file (JSON).
    model: PathBuf,
    /// Gap used when negating the unsafe half-space.
    #[arg(long, default_value_t = starbdd::geometry::DEFAULT_NEGATION_EPS)]
    eps: f64,
}

#[derive(Debug, Args)]
struct OrderArgs {
    /// Variable ordering strategy.
    #[arg(long, default_value = "default")]
    ordering: String,
    /// Seed for the random ordering.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Explicit 1-based ordering such as 3,2,1,4,5; overrides --ordering.
    #[arg(long)]
    order: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report the steps at which the reach set meets the unsafe set.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        json: bool,
        /// Write reach-set projections onto state coordinates I and J (0-based) as CSV.
        #[arg(long, num_args = 2, value_names = ["I", "J"], requires = "out")]
        proj: Option<Vec<usize>>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Support directions per projected polygon.
        #[arg(long, default_value_t = 32)]
        directions: usize,
    },
    /// Build the decision diagram and list every violation pattern.
    Characterize {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        order: OrderArgs,
        /// Merge isomorphic nodes.
        #[arg(long)]
        reduce: bool,
        /// Node-equivalence check used with --reduce.
        #[arg(long, default_value = "farkas-milp")]
        equivalence: String,
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Draw the 0 terminal in the DOT output.
        #[arg(long)]
        show_t0: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Print the witness valuation and trace for each pattern.
        #[arg(long)]
        witness: bool,
        /// Also print each pattern in level order.
        #[arg(long)]
        raw: bool,
        #[arg(long)]
        json: bool,
        /// Report build times as zero so artifacts are reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Build every ordering, reduced and unreduced, and report size spreads.
    Compare {
        #[command(flatten)]
        model: ModelArgs,
        /// Seeds for the random ordering.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        #[arg(long, default_value = "farkas-milp")]
        equivalence: String,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        no_timing: bool,
    },
    /// Enumerate violation patterns by brute force.
    Oracle {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        order: OrderArgs,
        /// Solve one LP per string instead of pruning infeasible prefixes.
        #[arg(long)]
        naive: bool,
        /// Also print each pattern in level order.
        #[arg(long)]
        raw: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
