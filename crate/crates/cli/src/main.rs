use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use endogen_cli::commands::{self, Overrides, Suite};
use endogen_cli::config::{parse_list, DEFAULT_SEED};
use endogen_cli::search::{Criteria, Want};
use endogen_cli::CliResult;

#[derive(Parser)]
#[command(name = "endogen", version, about = "Endomorphism generators on ordinary elliptic curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Point count, trace, discriminant split and endomorphism ring.
    CurveInfo {
        #[arg(long)]
        curve: PathBuf,
    },
    /// Scan curves for torsion and splitting criteria.
    Search {
        #[arg(long, default_value_t = 2)]
        q_min: u64,
        #[arg(long, default_value_t = 200)]
        q_max: u64,
        #[arg(long, default_value_t = 2)]
        l: u64,
        /// inert, split, full-torsion or max-period
        #[arg(long, default_value = "max-period")]
        want: String,
        /// Curves examined per field.
        #[arg(long, default_value_t = 2000)]
        scan: usize,
        #[arg(long, default_value_t = 20)]
        limit: usize,
        /// Directory for candidate curve files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the output stream of a configured generator as CSV.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Measure sums, discrepancy and linear complexity against the bounds.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated values of nu.
        #[arg(long)]
        nu: Option<String>,
        /// all or sample:N
        #[arg(long)]
        boxes: Option<String>,
    },
    /// Run the lemma verifiers.
    Verify {
        /// lemmas or all
        #[arg(long, default_value = "lemmas")]
        suite: String,
        /// Maximum number of lemma instances.
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        /// Append an instance with a corrupted ideal.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Regenerate the measured/bound corpus report.
    Report {
        #[arg(long, default_value = "corpus_report.json")]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        csv: bool,
    },
}

fn run(cmd: Command) -> CliResult<String> {
    match cmd {
        Command::CurveInfo { curve } => commands::curve_info(&curve),
        Command::Search { q_min, q_max, l, want, scan, limit, out } => {
            let c = Criteria { q_min, q_max, l, want: want.parse::<Want>()?, scan, limit };
            commands::run_search(&c, out.as_deref())
        }
        Command::Generate { config, out, seed } => {
            commands::generate(&config, &Overrides { out, seed, ..Overrides::default() })
        }
        Command::Analyze { config, out, seed, nu, boxes } => {
            if let Some(b) = &boxes {
                commands::check_boxes(b)?;
            }
            let nu = nu.map(|s| parse_list("nu", &s)).transpose()?;
            commands::run_analyze(&config, &Overrides { out, seed, nu, boxes })
        }
        Command::Verify { suite, budget, inject_fault } => {
            commands::verify(suite.parse::<Suite>()?, budget, inject_fault)
        }
        Command::Report { out, seed, csv } => commands::report(&out, seed, csv),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
