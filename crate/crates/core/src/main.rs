use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cattforge::cli::{check_paths, generate, Builtin, Options};

#[derive(Parser)]
#[command(name = "cattforge", version, about = "Check .catt scripts and generate Eckmann-Hilton cells")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Type-check one or more scripts.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Write the shared printouts of all checked terms here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print size statistics for every checked term.
        #[arg(long)]
        stats: bool,
        /// Cap on newly created term nodes per generated cell.
        #[arg(long, env = "CATTFORGE_BUDGET")]
        budget: Option<usize>,
        /// Number of files checked concurrently.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print a generated cell.
    Gen {
        kind: Kind,
        n: usize,
        k: usize,
        l: usize,
        /// Padding direction, for `hp` only.
        p: Option<usize>,
        #[arg(long, env = "CATTFORGE_BUDGET")]
        budget: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    #[value(name = "H")]
    H,
    #[value(name = "EH")]
    Eh,
    #[value(name = "Hp")]
    Hp,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Cmd::Check { files, out, stats, budget, jobs } => {
            match check_paths(&files, out.as_deref(), stats, &Options { budget, jobs }) {
                Ok(0) => ExitCode::SUCCESS,
                Ok(_) => ExitCode::FAILURE,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Cmd::Gen { kind, n, k, l, p, budget } => {
            let b = match (kind, p) {
                (Kind::H, None) => Builtin::H { n, k, l },
                (Kind::Eh, None) => Builtin::EH { n, k, l },
                (Kind::Hp, Some(p)) => Builtin::Hp { n, p, k, l },
                (Kind::Hp, None) => {
                    eprintln!("error: Hp needs a padding direction p");
                    return ExitCode::FAILURE;
                }
                (_, Some(_)) => {
                    eprintln!("error: only Hp takes a padding direction");
                    return ExitCode::FAILURE;
                }
            };
            match generate(b, budget) {
                Ok(a) => {
                    print!("{}", a.printout());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {b}: {e}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}
