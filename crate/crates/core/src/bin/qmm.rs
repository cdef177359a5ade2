use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qmacmahon::harness::{emit_report, run_suite, Arith, Format, Suite, SuiteConfig};
use qmacmahon::relations::Flavor;

/// Certify the quantum MacMahon Master Theorem and its lemmas at fixed rank
/// and truncation degree.
#[derive(Parser)]
#[command(name = "qmm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ferm(A) * Bos(A) = 1 = Bos(A) * Ferm(A) through the given degree.
    Verify(Opts),
    /// Determinantal and operator lemmas.
    Lemmas(Opts),
    /// The commutative q = 1 statement.
    Classical(Opts),
    /// Everything above, plus the full-quantum flavor.
    All(Opts),
}

#[derive(Args)]
struct Opts {
    #[arg(long, default_value_t = 2)]
    rank: usize,
    /// Truncation degree N.
    #[arg(long, default_value_t = 4)]
    degree: usize,
    #[arg(long, value_enum, default_value_t = Flavor::RightQuantum)]
    flavor: Flavor,
    #[arg(long, value_enum, default_value_t = Arith::Probabilistic)]
    arith: Arith,
    /// Random values of q per probabilistic membership query.
    #[arg(long, default_value_t = 3)]
    evals: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock times (makes reports non-reproducible).
    #[arg(long)]
    timings: bool,
    /// Comma-separated lemma checks to run (default: all).
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (suite, o) = match cli.command {
        Command::Verify(o) => (Suite::Verify, o),
        Command::Lemmas(o) => (Suite::Lemmas, o),
        Command::Classical(o) => (Suite::Classical, o),
        Command::All(o) => (Suite::All, o),
    };
    let config = SuiteConfig {
        rank: o.rank,
        degree: o.degree,
        flavor: o.flavor,
        arith: o.arith,
        evals: o.evals,
        seed: o.seed,
        lemmas: o.only,
        format: o.format,
        timings: o.timings,
    };
    let report = match run_suite(&config, suite) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qmm: {e}");
            return ExitCode::from(2);
        }
    };
    let text = emit_report(&report, config.format);
    match &o.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("qmm: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.overall {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
