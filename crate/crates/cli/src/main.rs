mod commands;
mod io;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use crate::io::CliResult;

/// Quantum Wasserstein distances over restricted coupling sets.
#[derive(Parser)]
#[command(name = "qot", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal transport cost between two states.
    Distance {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        /// Observable file; repeat for a sum of costs.
        #[arg(long = "obs", required = true)]
        obs: Vec<PathBuf>,
        /// general, ppt, separable, symppt, ppt-ext-N, cq, qc, product
        #[arg(long, default_value = "general")]
        set: String,
        /// dpt or gmpc
        #[arg(long, default_value = "dpt")]
        convention: String,
        /// Maximize instead (Wasserstein variance).
        #[arg(long)]
        max: bool,
        /// Subtract the mean-shift term.
        #[arg(long)]
        tilde: bool,
        /// Also write the optimal coupling as an operator file.
        #[arg(long)]
        coupling_out: Option<PathBuf>,
    },
    /// General vs PPT distance along a rotation of the qubit test state.
    Fig2 {
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Self-distances of a state under each coupling set.
    Table1 {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        obs: PathBuf,
    },
    /// Entanglement criteria on a bipartite state or a saved coupling.
    Check {
        #[arg(long)]
        coupling: PathBuf,
        /// all, or a comma list of su, angular, pauli-xy, qubit
        #[arg(long, default_value = "all")]
        criteria: String,
    },
    /// Variance and Fisher-type quantities of one observable.
    Qfi {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        obs: PathBuf,
    },
    /// Seeded random operator (seed from --seed, then QOT_SEED).
    Random {
        /// state, pure, hermitian or ppt (a d×d bipartite state)
        #[arg(long, default_value = "state")]
        kind: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn run(command: Command) -> CliResult<Value> {
    match command {
        Command::Distance {
            rho,
            sigma,
            obs,
            set,
            convention,
            max,
            tilde,
            coupling_out,
        } => commands::distance(commands::DistanceArgs {
            rho: &rho,
            sigma: &sigma,
            observables: &obs,
            set: &set,
            convention: &convention,
            maximize: max,
            tilde,
            coupling_out: coupling_out.as_deref(),
        }),
        Command::Fig2 { points, out, jobs } => commands::fig2(points, &out, jobs),
        Command::Table1 { rho, obs } => commands::table1(&rho, &obs),
        Command::Check { coupling, criteria } => commands::check(&coupling, &criteria),
        Command::Qfi { rho, obs } => commands::qfi(&rho, &obs),
        Command::Random { kind, dim, seed } => {
            let seed = seed.unwrap_or_else(qot_core::random::seed_from_env);
            commands::random(&kind, dim, seed)
        }
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
    match run(cli.command) {
        Ok(value) => {
            // A closed pipe downstream is not an error worth a panic.
            let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&value).expect("serializable"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qot: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
