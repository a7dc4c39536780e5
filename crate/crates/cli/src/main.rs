//! `qnetcap` command-line interface.
//!
//! Exit codes: 0 success, 1 domain or validation error, 2 I/O error.

mod commands;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Io { .. } => 2,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<qnetcap::Error> for CliError {
    fn from(e: qnetcap::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "qnetcap", version, about = "Rate bounds and repeater plans for quantum networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Weights {
    Both,
    Qcap,
    Esq,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BudgetArg {
    Count,
    Freq,
    Rate,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a network file.
    Validate { path: PathBuf },

    /// Print lower and upper cut bounds as JSON.
    Bound {
        path: PathBuf,
        /// per-protocol, per-use or per-time; defaults to the network's budget variant.
        #[arg(long)]
        regime: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Weights::Both)]
        weights: Weights,
    },

    /// Print the aggregated repeater plan as JSON.
    Plan {
        path: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        /// qcap, fraction:<alpha> or table:<file.json>
        #[arg(long, default_value = "qcap")]
        rate_model: String,
        /// Count every edge in the error budget, not only pair-generating ones.
        #[arg(long)]
        all_edges_budget: bool,
        /// Also write the Bell-pair graph as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },

    /// Swap a chain of Werner pairs exactly and check the error budget.
    SimulateSwap {
        /// Comma-separated Werner parameters, one per link.
        #[arg(long, value_delimiter = ',', conflicts_with = "from_plan", required_unless_present = "from_plan")]
        chain: Option<Vec<f64>>,
        /// Plan JSON produced by `plan`.
        #[arg(long, requires = "path_index")]
        from_plan: Option<PathBuf>,
        #[arg(long)]
        path_index: Option<usize>,
        /// Werner parameter for every link of a plan path; defaults to the
        /// worst pair allowed by the plan's epsilon.
        #[arg(long, requires = "from_plan")]
        werner: Option<f64>,
    },

    /// Evaluate bounds over a parameter grid and write CSV.
    Sweep {
        path: PathBuf,
        /// eta:<edge-id>, epsilon or scale
        #[arg(long)]
        param: String,
        /// start:stop:step
        #[arg(long, conflicts_with = "values", required_unless_present = "values")]
        grid: Option<String>,
        /// Explicit comma-separated values.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// Columns: lower, upper, upper_esq, upper_eps, vacuous, ratio, m
        #[arg(long, value_delimiter = ',', default_value = "lower,upper,ratio")]
        fields: Vec<String>,
        #[arg(long)]
        regime: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Write a random all-lossy network as JSON.
    Generate {
        /// Defaults to $QNETCAP_SEED, else a fixed seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 10)]
        max_nodes: usize,
        #[arg(long, default_value_t = 25)]
        max_edges: usize,
        #[arg(long, value_enum, default_value_t = BudgetArg::Freq)]
        budget: BudgetArg,
        #[arg(long, default_value_t = 1.0)]
        budget_max: f64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { path } => commands::validate(&path),
        Command::Bound {
            path,
            regime,
            epsilon,
            weights,
        } => commands::bound(&path, regime.as_deref(), epsilon, weights),
        Command::Plan {
            path,
            epsilon,
            rate_model,
            all_edges_budget,
            dot,
        } => commands::plan(&path, epsilon, &rate_model, all_edges_budget, dot.as_deref()),
        Command::SimulateSwap {
            chain,
            from_plan,
            path_index,
            werner,
        } => match (chain, from_plan) {
            (Some(chain), _) => commands::simulate_chain(&chain),
            (None, Some(plan)) => commands::simulate_plan_path(
                &plan,
                path_index.expect("clap enforces --path-index"),
                werner,
            ),
            (None, None) => unreachable!("clap requires one source"),
        },
        Command::Sweep {
            path,
            param,
            grid,
            values,
            fields,
            regime,
            epsilon,
            out,
        } => sweep::run(sweep::SweepArgs {
            path,
            param,
            grid,
            values,
            fields,
            regime,
            epsilon,
            out,
        }),
        Command::Generate {
            seed,
            max_nodes,
            max_edges,
            budget,
            budget_max,
        } => commands::generate(seed, max_nodes, max_edges, budget, budget_max),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
