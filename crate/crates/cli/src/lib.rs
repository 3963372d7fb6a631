//! Command-line driver: experiment configs in, results, raw counts and SVG
//! figures out.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod results;
pub mod svg;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::ExperimentConfig;
pub use error::CliError;
pub use experiments::{run_experiment, Outcome};
pub use report::{report, Report, ReportRow};
pub use results::Results;

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    ExperimentConfig::parse(&text)
}

/// Writes `results.json`, `raw.csv` and the figures into `dir`. Nothing
/// time-dependent is written, so equal configs give byte-identical files.
pub fn write_outcome(outcome: &Outcome, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let write_error = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Write { path, source }
    };
    fs::create_dir_all(dir).map_err(write_error(dir))?;
    let mut written = Vec::new();

    let path = dir.join("results.json");
    fs::write(&path, outcome.results.to_json()).map_err(write_error(&path))?;
    written.push(path);

    let path = dir.join("raw.csv");
    let mut writer = csv::Writer::from_path(&path).map_err(|e| CliError::Write {
        path: path.clone(),
        source: e.into(),
    })?;
    if outcome.raw.is_empty() {
        writer
            .write_record([
                "theta",
                "quantity",
                "setting",
                "phi",
                "probability",
                "observed",
                "counts",
            ])
            .map_err(|e| CliError::Write {
                path: path.clone(),
                source: e.into(),
            })?;
    }
    for row in &outcome.raw {
        writer.serialize(row).map_err(|e| CliError::Write {
            path: path.clone(),
            source: e.into(),
        })?;
    }
    writer.flush().map_err(write_error(&path))?;
    written.push(path);

    for (name, text) in &outcome.plots {
        let path = dir.join(name);
        fs::write(&path, text).map_err(write_error(&path))?;
        written.push(path);
    }
    Ok(written)
}
