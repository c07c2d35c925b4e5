//! `normval`: ramification invariants, valuation sets and the valuation
//! criterion for normal basis generators, driven by field-definition documents.

mod commands;
mod reproduce;

use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use normval_core::document::{ReportDocument, Settings};
use normval_core::vc::{DecideOptions, Method, Verdict};

#[derive(Parser, Debug)]
#[command(name = "normval", version, about = "Valuation criteria for normal basis generators in local field extensions")]
struct Cli {
    /// Working p-adic precision recorded in reports (arithmetic is exact).
    #[arg(long, global = true, default_value_t = 64)]
    precision: u32,
    /// Largest precision any computation may request.
    #[arg(long, global = true, default_value_t = 4096)]
    ceiling: u32,
    /// Seed for the Monte Carlo decider.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo trial budget.
    #[arg(long, global = true, default_value_t = 200)]
    trials: usize,
    /// Comma-separated deciders, tried in order.
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        default_value = "precheck,abelian,structural,monte-carlo"
    )]
    methods: Vec<Method>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ramification data and the factorization of X^n - 1 for each pair.
    Invariants {
        /// Definition document path, or the name of a bundled example.
        definition: String,
        /// Pairs as TOP/BOTTOM; defaults to the pairs declared in the document.
        #[arg(long = "pair")]
        pairs: Vec<String>,
    },
    /// Valuation set s(V) of the span of some elements, and of its orthogonal.
    Sval {
        definition: String,
        #[arg(long)]
        pair: String,
        /// Spanning elements, as polynomials in the step labels.
        #[arg(required = true)]
        elements: Vec<String>,
    },
    /// Decide VC(L/K).
    Vc {
        definition: String,
        #[arg(long = "pair")]
        pairs: Vec<String>,
        /// Also decide VC(M/L) for this intermediate field and log whether
        /// VC(M/K) => VC(M/L) breaks (experimental).
        #[arg(long)]
        probe: Option<String>,
    },
    /// Re-verify every claim stored in a report.
    Check { definition: String, report: std::path::PathBuf },
    /// Recompute a worked example and diff against the stored expected values.
    Reproduce {
        #[arg(value_parser = reproduce::NAMES)]
        name: String,
    },
    /// List the bundled definition documents.
    List,
}

/// What a successful command established, mapped onto the exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outcome {
    Computed,
    Verdict(Verdict),
    Mismatch,
}

impl Outcome {
    fn code(self) -> u8 {
        match self {
            Outcome::Computed | Outcome::Verdict(Verdict::Holds) => 0,
            Outcome::Verdict(Verdict::Fails) | Outcome::Mismatch => 1,
            Outcome::Verdict(Verdict::Undecided) => 2,
        }
    }
}

fn settings(cli: &Cli) -> Result<Settings> {
    if cli.precision == 0 || cli.precision > cli.ceiling {
        bail!("precision {} outside 1..={}", cli.precision, cli.ceiling);
    }
    Ok(Settings {
        precision: cli.precision,
        ceiling: cli.ceiling,
        seed: cli.seed,
        trials: cli.trials,
        methods: cli.methods.clone(),
    })
}

fn run(cli: &Cli) -> Result<(Option<ReportDocument>, Outcome)> {
    let settings = settings(cli)?;
    let opts = DecideOptions {
        methods: settings.methods.clone(),
        trials: settings.trials,
        seed: settings.seed,
        overrides: vec![],
    };
    Ok(match &cli.command {
        Command::Invariants { definition, pairs } => {
            (Some(commands::invariants(definition, pairs, settings)?), Outcome::Computed)
        }
        Command::Sval { definition, pair, elements } => {
            (Some(commands::sval(definition, pair, elements, settings)?), Outcome::Computed)
        }
        Command::Vc { definition, pairs, probe } => {
            let (report, verdict) = commands::vc(definition, pairs, probe.as_deref(), opts, settings)?;
            (Some(report), Outcome::Verdict(verdict))
        }
        Command::Check { definition, report } => {
            let report = commands::check(definition, report, settings)?;
            let ok = report.all_checks_pass();
            (Some(report), if ok { Outcome::Computed } else { Outcome::Mismatch })
        }
        Command::Reproduce { name } => {
            let report = reproduce::run(name, opts, settings)?;
            for c in report.checks.iter().filter(|c| !c.ok) {
                eprintln!("mismatch: {}: expected {}, computed {}", c.name, c.expected, c.computed);
            }
            let ok = report.all_checks_pass();
            (Some(report), if ok { Outcome::Computed } else { Outcome::Mismatch })
        }
        Command::List => {
            for name in normval_core::corpus::names() {
                println!("{name}");
            }
            (None, Outcome::Computed)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    match run(&cli) {
        Ok((report, outcome)) => {
            if let Some(r) = report {
                print!("{}", r.to_toml());
            }
            ExitCode::from(outcome.code())
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
