use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rifle::cli::{self, CliError, CommandOutput, GenParams};

#[derive(Parser)]
#[command(name = "rifle", version, about = "Stable outcomes for assignment markets with rigid and flexible agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Emit the JSON report (default)
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Emit a human-readable summary instead of JSON
    #[arg(long)]
    text: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the price-raising auction
    Solve {
        file: String,
        /// Include every state transition
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Classify an outcome given as JSON {matching, u, v}
    Verify {
        file: String,
        outcome: String,
        #[command(flatten)]
        output: Output,
    },
    /// Enumerate all integer stable outcomes (n <= 6)
    Oracle {
        file: String,
        #[command(flatten)]
        output: Output,
    },
    /// Check join/meet closure of the stable set (n <= 6)
    Lattice {
        file: String,
        #[command(flatten)]
        output: Output,
    },
    /// Search for a degeneracy witness (n <= 5)
    Nondegen {
        file: String,
        #[command(flatten)]
        output: Output,
    },
    /// Print a random instance file
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        max_value: i64,
        #[arg(long, default_value_t = 0.5)]
        rigid_prob: f64,
        #[arg(long)]
        seed: u64,
    },
}

fn emit(result: Result<CommandOutput, CliError>, output: &Output) -> Result<String, CliError> {
    let out = result?;
    Ok(if output.text { out.text } else { out.report.to_json() + "\n" })
}

fn run(command: Command) -> Result<String, CliError> {
    match command {
        Command::Solve { file, trace, output } => emit(cli::cmd_solve(&cli::commands::load_instance(&file)?, trace), &output),
        Command::Verify { file, outcome, output } => {
            let inst = cli::commands::load_instance(&file)?;
            let outcome = cli::commands::load_outcome(&outcome)?;
            emit(cli::cmd_verify(&inst, &outcome), &output)
        }
        Command::Oracle { file, output } => emit(cli::cmd_oracle(&cli::commands::load_instance(&file)?), &output),
        Command::Lattice { file, output } => emit(cli::cmd_lattice(&cli::commands::load_instance(&file)?), &output),
        Command::Nondegen { file, output } => emit(cli::cmd_nondegen(&cli::commands::load_instance(&file)?), &output),
        Command::Gen { n, max_value, rigid_prob, seed } => cli::cmd_gen(&GenParams { n, max_value, rigid_prob, seed }),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("rifle: {e}");
            ExitCode::FAILURE
        }
    }
}
