//! `spi`: command-line front end for the session pi-calculus analyser.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Outcome;

#[derive(Parser, Debug)]
#[command(
    name = "spi",
    version,
    about = "Type checking, dependency graphs and progress for session pi-calculus"
)]
struct Cli {
    /// Emit one JSON record `{command, verdict, data}` per line.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Type-check a program and print its session environment.
    Check { file: PathBuf },
    /// Print session dependency graphs.
    Graph {
        file: PathBuf,
        /// Write DOT to this path (`-` for standard output).
        #[arg(long, value_name = "OUT")]
        dot: Option<PathBuf>,
        /// One graph per maximal parallel sub-term instead of the top level only.
        #[arg(long)]
        all_subterms: bool,
    },
    /// Decide transparency, reporting a cycle witness when it fails.
    Transparent { file: PathBuf },
    /// Run the reduction semantics.
    Run(RunArgs),
    /// Print the canonical inhabitant of a session type.
    Inhabit {
        #[arg(value_name = "TYPE")]
        ty: String,
        /// Channel the inhabitant uses.
        #[arg(long, value_name = "k")]
        chan: String,
    },
    /// Certify progress up to a reduction depth.
    Progress {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        /// Sub-terms examined per reachable state.
        #[arg(long, default_value_t = 4096)]
        subset_budget: usize,
    },
    /// Re-analyse the bundled example programs.
    Selftest,
}

#[derive(Args, Debug)]
struct RunArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Follow one pseudo-random trace from this seed.
    #[arg(long, conflicts_with = "all")]
    seed: Option<u64>,
    /// Explore every reachable state breadth-first.
    #[arg(long)]
    all: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    let result = match cli.command {
        Command::Check { file } => commands::check(&file),
        Command::Graph {
            file,
            dot,
            all_subterms,
        } => commands::graph(&file, dot.as_deref(), all_subterms),
        Command::Transparent { file } => commands::transparent(&file),
        Command::Run(a) => commands::run(
            &a.file,
            a.steps,
            if a.all {
                None
            } else {
                Some(a.seed.unwrap_or(0))
            },
        ),
        Command::Inhabit { ty, chan } => commands::inhabit(&ty, &chan),
        Command::Progress {
            file,
            depth,
            subset_budget,
        } => commands::progress(&file, depth, subset_budget),
        Command::Selftest => Ok(commands::selftest()),
    };
    match result {
        Ok(outcome) => {
            emit(name, cli.json, &outcome);
            ExitCode::from(outcome.exit)
        }
        Err(e) => {
            eprintln!("spi {name}: {e}");
            ExitCode::from(2)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Graph { .. } => "graph",
        Command::Transparent { .. } => "transparent",
        Command::Run(_) => "run",
        Command::Inhabit { .. } => "inhabit",
        Command::Progress { .. } => "progress",
        Command::Selftest => "selftest",
    }
}

fn emit(command: &str, json: bool, o: &Outcome) {
    if json {
        let record = serde_json::json!({
            "command": command,
            "verdict": o.verdict,
            "data": o.data,
        });
        println!("{record}");
    } else {
        print!("{}", o.text);
    }
}
