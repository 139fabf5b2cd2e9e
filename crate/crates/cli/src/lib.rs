//! Command-line orchestration of the reliability, robustness and resilience
//! assessments: run manifests, result persistence and the combined report.
//!
//! Results are written to `<out>/<variant>/<command>/` as `result.json`,
//! `manifest.json` and command-specific CSV files; the report goes to
//! `<out>/report/`.

pub mod args;
pub mod charts;
pub mod commands;
pub mod manifest;
pub mod published;

use anyhow::Result;

use args::{Cli, Command};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Reliability(a) => commands::reliability::run(a).map(drop),
        Command::Robustness(a) => commands::robustness::run(a).map(drop),
        Command::Resilience(a) => commands::resilience::run(a).map(drop),
        Command::Pipeline(a) => commands::pipeline::run(a).map(drop),
        Command::Report(a) => commands::report::run(a).map(drop),
    }
}
