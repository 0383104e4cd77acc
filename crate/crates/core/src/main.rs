use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use twistconn::basis::Caps;
use twistconn::harness::{default_checks, run_checks, Command};
use twistconn::scenario::load_scenario;

#[derive(Parser)]
#[command(name = "twistconn", version, about = "Check twisted product connections on the quantum plane")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Twisting-map axioms, DGA laws and module twisting maps.
    CheckAxioms(Args),
    /// Connection laws and the compatibility hypotheses.
    CheckHypotheses(Args),
    /// Curvature of the product connection on the naive basis.
    Curvature(Args),
    /// Connection property, curvature formula, flatness and independence.
    Theorem(Args),
    /// Symbolic product connection on the quantum plane.
    Report(Args),
    /// Bimodule connection checks.
    CheckBimodule(Args),
    /// The scenario's `checks` list, or everything applicable.
    Run(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long, value_name = "FILE")]
    scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Override caps as `max_exponent,max_degree`.
    #[arg(long, value_name = "E,D", value_parser = parse_caps)]
    caps: Option<Caps>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

fn parse_caps(s: &str) -> Result<Caps, String> {
    let (e, d) = s.split_once(',').ok_or("expected E,D")?;
    let e: u32 = e.trim().parse().map_err(|_| format!("bad max exponent `{e}`"))?;
    let d: usize = d.trim().parse().map_err(|_| format!("bad max degree `{d}`"))?;
    if e == 0 || d == 0 {
        return Err("caps must be at least 1".into());
    }
    Ok(Caps::new(e, d))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, args) = match cli.command {
        Sub::CheckAxioms(a) => (Command::CheckAxioms, a),
        Sub::CheckHypotheses(a) => (Command::CheckHypotheses, a),
        Sub::Curvature(a) => (Command::Curvature, a),
        Sub::Theorem(a) => (Command::Theorem, a),
        Sub::Report(a) => (Command::Report, a),
        Sub::CheckBimodule(a) => (Command::CheckBimodule, a),
        Sub::Run(a) => (Command::Run, a),
    };
    let path = args.scenario;
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let mut scenario = match load_scenario(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    if let Some(c) = args.caps {
        scenario.caps = c;
    }
    if let Some(s) = args.seed {
        scenario.seed = s;
    }
    let start = Instant::now();
    let report = match run_checks(&scenario, &default_checks(cmd, &scenario)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let out = match args.format {
        Format::Json => format!("{}\n", report.to_json()),
        Format::Text => format!("{}elapsed: {:.2?}\n", report.to_text(), start.elapsed()),
    };
    // a closed pipe is not an error of the run
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    if report.any_fail() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
