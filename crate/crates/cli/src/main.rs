//! `codespace-vqe`: partition, diagonalize, optimize and count gates for
//! qubit Hamiltonian files.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use manifest::{Command, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "codespace-vqe", version, about = "Commuting-group variational ansatz pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Partition each Hamiltonian into commuting groups and emit JSON.
    Group(CommonArgs),
    /// Synthesize and verify a Clifford diagonalizer and signed stabilizer group per group.
    Diagonalize(CommonArgs),
    /// Run VQE on each file and write a JSON trace plus a CSV summary.
    Vqe(CommonArgs),
    /// Emit gate and parameter counts for the VHA and combined-codes ansätze.
    Counts(CommonArgs),
    /// Print Hartree-Fock and exact ground energies.
    Exact(CommonArgs),
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Hamiltonian files; one per geometry in a sweep.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,

    /// Electron count, overriding the file's `electrons:` header.
    #[arg(long)]
    electrons: Option<usize>,

    /// single-code, single-code:<group>, combined-codes, vha or vha-grouped.
    #[arg(long, default_value = "combined-codes")]
    ansatz: String,

    #[arg(long, default_value_t = 1)]
    layers: usize,

    #[arg(long = "max-iter", default_value_t = 100)]
    max_iter: usize,

    #[arg(long = "step-tol", default_value_t = 1e-6)]
    step_tol: f64,

    /// Initial value of every parameter.
    #[arg(long, default_value_t = 0.001, allow_negative_numbers = true)]
    init: f64,

    /// Output directory; results go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Leave the generation time out of written files.
    #[arg(long = "no-timestamp")]
    no_timestamp: bool,
}

fn manifest(command: Command, a: CommonArgs) -> anyhow::Result<RunManifest> {
    RunManifest::new(
        command,
        a.inputs,
        a.electrons,
        &a.ansatz,
        a.layers,
        a.max_iter,
        a.step_tol,
        a.init,
        a.out,
        !a.no_timestamp,
    )
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("CODESPACE_VQE_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("CODESPACE_VQE_THREADS must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> anyhow::Result<bool> {
        configure_threads()?;
        let m = match cli.command {
            Cmd::Group(a) => manifest(Command::Group, a)?,
            Cmd::Diagonalize(a) => manifest(Command::Diagonalize, a)?,
            Cmd::Vqe(a) => manifest(Command::Vqe, a)?,
            Cmd::Counts(a) => manifest(Command::Counts, a)?,
            Cmd::Exact(a) => manifest(Command::Exact, a)?,
        };
        commands::execute(&m)
    };
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
