mod config;
mod experiments;
mod output;

use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use qcomm::verify::{Battery, Faults, CRITERIA};

use crate::config::Common;
use crate::output::Table;

#[derive(Parser)]
#[command(name = "qcomm", version, about = "Two-party quantum communication protocol experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distributed search with a known solution count `t`.
    Search {
        #[command(flatten)]
        common: Common,
        /// Search without knowing `t` (doubling down from `n`).
        #[arg(long)]
        unknown: bool,
    },
    /// Count solutions exactly up to a threshold `t`.
    Count {
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a symmetric function of the blockwise gadget outputs.
    EvalSymmetric {
        #[command(flatten)]
        common: Common,
    },
    /// Run the query algorithm for the Hadamard-encoded composition.
    QuerySim {
        #[command(flatten)]
        common: Common,
        /// Flip one input position per trial.
        #[arg(long)]
        corrupt: bool,
    },
    /// Approximate degree of `--fn` on `--n` variables.
    Adeg {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        eps: f64,
    },
    /// Discrepancy of the gadget under the uniform distribution.
    Disc {
        #[command(flatten)]
        common: Common,
    },
    /// Both sides of the XOR lemma for `k = 1..=k_max`.
    XorLemma {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        k_max: usize,
    },
    /// Generalized discrepancy bound from a measured discrepancy.
    Gdm {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        eps: f64,
    },
    /// Exhaustive check of the embedding reductions.
    Reductions {
        #[command(flatten)]
        common: Common,
    },
    /// Invariance and orbit check of the Hadamard-encoded inner product.
    Transitivity {
        #[command(flatten)]
        common: Common,
        /// Random inputs added when the arity is too large to enumerate.
        #[arg(long, default_value_t = 4096)]
        samples: usize,
    },
    /// Run the acceptance battery; exits nonzero on any failed check.
    Verify {
        /// Criterion to run (all when absent).
        #[arg(long)]
        criterion: Option<u8>,
        /// Multiplier on Monte-Carlo trial counts.
        #[arg(long, default_value_t = 1.0)]
        effort: f64,
        /// Inject a deliberate fault.
        #[arg(long)]
        fault: Option<Fault>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Fault {
    /// Too-coarse reflection schedule.
    Eps,
    /// Reversed bit order in codewords.
    Index,
    /// Patches that leave the block a solution.
    Patch,
}

fn emit(common: &Common, table: Table) -> Result<()> {
    table.emit(common.csv.as_deref(), common.jsonl.as_deref())?;
    eprintln!("{}", table.summary());
    Ok(())
}

fn verify(criterion: Option<u8>, effort: f64, fault: Option<Fault>, seed: Option<u64>) -> Result<bool> {
    let faults = match fault {
        None => Faults::default(),
        Some(Fault::Eps) => Faults::eps_schedule(),
        Some(Fault::Index) => Faults::index_convention(),
        Some(Fault::Patch) => Faults::patch_registry(),
    };
    let mut battery = Battery::with_faults(faults, effort);
    if let Some(s) = seed {
        battery.seed = s;
    }
    let criteria = match criterion {
        Some(c) => vec![c],
        None => CRITERIA.to_vec(),
    };
    let mut all = true;
    for c in criteria {
        for check in battery.run(c)? {
            println!("{check}");
            all &= check.passed;
        }
    }
    Ok(all)
}

fn run(cli: Cli) -> Result<bool> {
    let table = match cli.command {
        Command::Verify {
            criterion,
            effort,
            fault,
            seed,
        } => return verify(criterion, effort, fault, seed),
        Command::Search { common, unknown } => (experiments::search(&common, unknown)?, common),
        Command::Count { common } => (experiments::count(&common)?, common),
        Command::EvalSymmetric { common } => (experiments::eval_symmetric(&common)?, common),
        Command::QuerySim { common, corrupt } => (experiments::query_sim(&common, corrupt)?, common),
        Command::Adeg { common, eps } => (experiments::adeg(&common, eps)?, common),
        Command::Disc { common } => (experiments::disc(&common)?, common),
        Command::XorLemma { common, k_max } => (experiments::xor_lemma(&common, k_max)?, common),
        Command::Gdm { common, delta, eps } => (experiments::gdm(&common, delta, eps)?, common),
        Command::Reductions { common } => (experiments::reductions(&common)?, common),
        Command::Transitivity { common, samples } => (experiments::transitivity(&common, samples)?, common),
    };
    emit(&table.1, table.0)?;
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
