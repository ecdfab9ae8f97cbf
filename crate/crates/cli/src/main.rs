//! `hodgekit`: exact checks for K3-type Hodge structures and k-symplectic
//! families from the command line.

mod commands;
mod problem;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Options, Outcome};
use problem::BoundsProblem;
use report::Report;

/// Exit code when `--check` finds a difference.
const CHECK_MISMATCH: u8 = 5;

#[derive(Parser)]
#[command(name = "hodgekit", version, about = "Exact computations with K3-type Hodge structures")]
struct Cli {
    /// Print the canonical JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Initial interval precision in bits (doubled as needed).
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u32).range(8..=65536))]
    precision_start: u32,
    /// Re-run and compare against a saved JSON report.
    #[arg(long, global = true, value_name = "REPORT")]
    check: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transcendental lattice, endomorphism field and Mumford-Tate group of a period.
    Classify { file: PathBuf },
    /// Graded dimensions of the transcendental Hodge algebra up to degree n.
    Tha {
        file: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Verify a k-symplectic family and build its Clifford operators.
    Ksympl { file: PathBuf },
    /// Divisibility and dimension bounds for a family of essential dimension d.
    Bounds {
        /// A `bounds` problem file, instead of the flags.
        #[arg(conflicts_with_all = ["d", "e", "dim_h1"])]
        file: Option<PathBuf>,
        #[arg(long, required_unless_present = "file")]
        d: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        e: Option<u64>,
        #[arg(long)]
        dim_h1: Option<u64>,
    },
    /// Period domain checks.
    Perdom {
        #[command(subcommand)]
        command: PerdomCommand,
    },
}

#[derive(Subcommand)]
enum PerdomCommand {
    /// Check q(l, l) = 0 and q(l, l') = 0 for a polynomial path.
    CheckPath { file: PathBuf },
    /// Check transversality on random isotropic paths for the form of a path file.
    RandomPaths {
        file: PathBuf,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        degree: usize,
    },
    /// Certify membership of a vector in the period domain, for any signature.
    Membership { file: PathBuf },
}

fn load(path: &Path) -> Result<problem::Problem, problem::ProblemError> {
    problem::load(path)
}

fn run(cli: &Cli) -> Outcome {
    let opts = Options {
        precision: cli.precision_start,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Classify { file } => commands::classify(load(file), opts),
        Command::Tha { file, n } => commands::tha(load(file), *n as usize, opts),
        Command::Ksympl { file } => commands::ksympl(load(file)),
        Command::Bounds { file: Some(f), .. } => commands::bounds_file(load(f)),
        Command::Bounds { file: None, d, e, dim_h1 } => commands::bounds(BoundsProblem {
            d: d.expect("clap enforces --d"),
            e: *e,
            dim_h1: *dim_h1,
        }),
        Command::Perdom { command } => match command {
            PerdomCommand::CheckPath { file } => commands::check_path(load(file)),
            PerdomCommand::RandomPaths { file, count, degree } => {
                commands::random_paths(load(file), *count, *degree, opts)
            }
            PerdomCommand::Membership { file } => commands::membership(load(file), opts),
        },
    }
}

fn check(expected: &Path, report: &Report) -> Result<(), String> {
    let text = std::fs::read_to_string(expected).map_err(|e| format!("cannot read {}: {e}", expected.display()))?;
    let saved = Report::from_json(&text).map_err(|e| format!("{} is not a report: {e}", expected.display()))?;
    if saved == *report {
        return Ok(());
    }
    let mut diffs = Vec::new();
    if saved.status != report.status {
        diffs.push(format!("status: expected {:?}, got {:?}", saved.status, report.status));
    }
    let rows = |r: &Report| -> Vec<(String, String, String)> {
        r.sections
            .iter()
            .flat_map(|s| s.rows.iter().map(move |(k, v)| (s.title.clone(), k.clone(), v.clone())))
            .collect()
    };
    let (a, b) = (rows(&saved), rows(report));
    for x in &a {
        match b.iter().find(|y| y.0 == x.0 && y.1 == x.1) {
            None => diffs.push(format!("[{}] {}: missing", x.0, x.1)),
            Some(y) if y.2 != x.2 => diffs.push(format!("[{}] {}: expected {}, got {}", x.0, x.1, x.2, y.2)),
            _ => {}
        }
    }
    for y in &b {
        if !a.iter().any(|x| x.0 == y.0 && x.1 == y.1) {
            diffs.push(format!("[{}] {}: unexpected", y.0, y.1));
        }
    }
    if diffs.is_empty() {
        diffs.push("section order differs".into());
    }
    Err(diffs.join("\n"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    if let Some(expected) = &cli.check {
        return match check(expected, &outcome.report) {
            Ok(()) => {
                println!("check passed: {}", expected.display());
                ExitCode::SUCCESS
            }
            Err(d) => {
                eprintln!("check failed against {}:\n{d}", expected.display());
                ExitCode::from(CHECK_MISMATCH)
            }
        };
    }
    if cli.json {
        print!("{}", outcome.report.to_json());
    } else {
        print!("{}", outcome.report.to_text());
    }
    ExitCode::from(outcome.exit.code() as u8)
}
