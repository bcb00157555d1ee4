//! Command line driver. Exit codes: 0 on success, 2 when an experiment
//! reports a numeric failure, 1 for usage and config errors.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use siolab::config::{ExperimentConfig, ExperimentKind};
use siolab::error::Error;
use siolab::experiments::{init_threads, report_paths, run};
use siolab::plot::{render, PlotKind};
use siolab::report::ExperimentReport;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "siolab", version, about = "Numerical laboratory for singular integral operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Override a config leaf, e.g. --set omega.alpha=0.7 (repeatable).
        #[arg(long = "set", value_name = "PATH=VALUE")]
        set: Vec<String>,
    },
    /// Render an SVG plot from a report JSON.
    Plot {
        report: PathBuf,
        /// convergence, modulus_fit, or field_heatmap.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value = "plot.svg")]
        out: PathBuf,
    },
    /// List the experiments the harness knows.
    ListExperiments,
    /// Parse and validate a config without running it.
    Validate {
        config: PathBuf,
        #[arg(long = "set", value_name = "PATH=VALUE")]
        set: Vec<String>,
    },
}

const EXIT_USAGE: i32 = 1;
const EXIT_NUMERIC: i32 = 2;

fn main() {
    std::process::exit(dispatch());
}

fn dispatch() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let informational =
                matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = err.print();
            return if informational { 0 } else { EXIT_USAGE };
        }
    };
    match thread_count_from_env() {
        Ok(threads) => {
            if let Err(err) = init_threads(threads) {
                eprintln!("siolab: {err}");
                return EXIT_USAGE;
            }
        }
        Err(message) => {
            eprintln!("siolab: {message}");
            return EXIT_USAGE;
        }
    }
    match cli.command {
        Command::Run { config, set } => run_command(&config, &set),
        Command::Plot { report, kind, out } => plot_command(&report, &kind, &out),
        Command::ListExperiments => {
            for kind in ExperimentKind::all() {
                println!("{:<24} {}", kind.name(), kind.describe());
            }
            0
        }
        Command::Validate { config, set } => match ExperimentConfig::load(&config, &set) {
            Ok(parsed) => {
                println!("ok: {}", parsed.experiment.name());
                0
            }
            Err(err) => {
                eprintln!("siolab: {err}");
                EXIT_USAGE
            }
        },
    }
}

fn thread_count_from_env() -> Result<Option<usize>, String> {
    match std::env::var("SIOLAB_THREADS") {
        Ok(raw) => raw
            .parse::<usize>()
            .map(Some)
            .map_err(|_| format!("SIOLAB_THREADS must be a positive integer, got '{raw}'")),
        Err(_) => Ok(None),
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Incompatible(_) | Error::Io(_) => EXIT_USAGE,
        Error::Domain(_) | Error::NonConvergent(_) | Error::Budget(_) => EXIT_NUMERIC,
    }
}

fn run_command(config_path: &PathBuf, overrides: &[String]) -> i32 {
    let config = match ExperimentConfig::load(config_path, overrides) {
        Ok(config) => config,
        Err(err) => {
            eprintln!("siolab: {err}");
            return EXIT_USAGE;
        }
    };
    let report = match run(&config) {
        Ok(report) => report,
        Err(err) => {
            eprintln!("siolab: {err}");
            return exit_code_for(&err);
        }
    };
    for rule in &report.summary {
        let verdict = if rule.pass { "PASS" } else { "FAIL" };
        let measured = match rule.measured {
            Some(value) => format!("{value:.3e}"),
            None => "n/a".to_string(),
        };
        println!(
            "[{verdict}] {}: {} (measured {measured}, threshold {:.3e})",
            rule.criterion, rule.description, rule.threshold
        );
    }
    let (json_path, csv_path) = report_paths(&config);
    println!("report: {}", json_path.display());
    println!("rows:   {}", csv_path.display());
    if report.passed() {
        0
    } else {
        EXIT_NUMERIC
    }
}

fn plot_command(report_path: &PathBuf, kind: &str, out: &PathBuf) -> i32 {
    let outcome = kind
        .parse::<PlotKind>()
        .and_then(|kind| {
            ExperimentReport::from_json_file(report_path).map(|report| (kind, report))
        })
        .and_then(|(kind, report)| render(&report, kind, out));
    match outcome {
        Ok(()) => {
            println!("plot: {}", out.display());
            0
        }
        Err(err) => {
            eprintln!("siolab: {err}");
            exit_code_for(&err)
        }
    }
}
