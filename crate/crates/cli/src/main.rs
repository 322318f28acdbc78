//! `coorbit`: batch runner that executes one verification and writes a JSON or CSV report.
//!
//! Exit status is 0 when every check passes, 1 when a tolerance check fails (the report is
//! still written) and 2 on invalid input. `COORBIT_THREADS` caps the worker pool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod report;

use std::env;
use std::process::ExitCode;

use clap::Parser;

use args::{with_config, Cli, Command};
use report::{emit, render, Provenance};

const EXIT_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = env::var("COORBIT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("COORBIT_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| format!("cannot size the thread pool: {e}"))
}

fn parameters(command: &Command) -> serde_json::Value {
    let value = match command {
        Command::ShannonRoundtrip(a) => serde_json::to_value(a),
        Command::YoungCheck(a) => serde_json::to_value(a),
        Command::OscReport(a) => serde_json::to_value(a),
        Command::Injectivity(a) => serde_json::to_value(a),
        Command::MultiplierBound(a) => serde_json::to_value(a),
        Command::ModulationSuite(a) => serde_json::to_value(a),
        Command::DerivativeCheck(a) => serde_json::to_value(a),
    };
    value.expect("argument structs are serializable")
}

fn run(command: &Command) -> coorbit_core::Result<report::Report> {
    match command {
        Command::ShannonRoundtrip(a) => commands::shannon_roundtrip(a),
        Command::YoungCheck(a) => commands::young_check(a),
        Command::OscReport(a) => commands::osc_report(a),
        Command::Injectivity(a) => commands::injectivity(a),
        Command::MultiplierBound(a) => commands::multiplier_bound(a),
        Command::ModulationSuite(a) => commands::modulation_suite(a),
        Command::DerivativeCheck(a) => commands::derivative_check(a),
    }
}

fn main() -> ExitCode {
    let argv = match with_config(env::args().collect()) {
        Ok(argv) => argv,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(EXIT_INVALID) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_INVALID);
    }

    let name = cli.command.name();
    let report = match run(&cli.command) {
        Ok(report) => report,
        Err(err) => {
            eprintln!("error: {name}: {err}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let provenance = Provenance::new(name, parameters(&cli.command));
    let output = cli.command.output();
    if let Err(err) = emit(&render(&provenance, &report, output.format), output) {
        eprintln!("error: cannot write report: {err}");
        return ExitCode::from(EXIT_INVALID);
    }
    eprintln!("{} {name}", if report.pass { "PASS" } else { "FAIL" });
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}
