//! Experiment runner for the `qmetric` library.
//!
//! Each experiment turns a claim about the metrics into assertions and
//! writes its data as CSV or JSON, carrying the schema version and the
//! resolved configuration. See [`run_cli`] for exit codes.

// `!(a <= b)` is used on purpose so that NaN fails a check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod error;
pub mod experiments;

use std::io::Write;

pub use config::{ExperimentConfig, ExperimentName, Format, RawConfig, SCHEMA_VERSION};
pub use error::CliError;
pub use experiments::{run, Artifact};

/// Loads the config file named by `flags` (if any), merges it under the
/// flags, runs the experiment and writes the artifact.
///
/// Returns the artifact on success; an artifact with failed assertions is
/// still written before being returned.
pub fn execute(flags: RawConfig) -> Result<Artifact, CliError> {
    let file = match &flags.config {
        Some(path) => RawConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => RawConfig::default(),
    };
    let cfg = ExperimentConfig::resolve(flags.or(file))?;
    let artifact = run(&cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &artifact.body)?,
        None => std::io::stdout().write_all(artifact.body.as_bytes())?,
    }
    Ok(artifact)
}

/// Exit status: 0 success, 1 assertion failure, 2 usage error, 3 I/O error.
pub fn run_cli(flags: RawConfig) -> i32 {
    match execute(flags) {
        Ok(a) if a.passed() => 0,
        Ok(a) => {
            for f in &a.failures {
                eprintln!("FAILED: {f}");
            }
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
