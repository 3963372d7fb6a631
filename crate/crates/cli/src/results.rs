use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, NoiseValues, Quantity};
use crate::error::CliError;

pub const FORMAT: &str = "whichpath-results/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Protocol applied to exact Born probabilities.
    Exact,
    /// Protocol applied to sampled counts.
    Sampled,
    /// Monte Carlo phase average.
    Oracle,
    /// Noise-model prediction.
    Model,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub theta: f64,
    pub quantity: Quantity,
    pub method: Method,
    pub value: f64,
    pub std_error: f64,
    pub settings_used: usize,
    pub clamped: bool,
    /// Seed of the record's sampling stream.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Analytic value (ideal settings) or exact noisy prediction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamEstimate {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    pub fixed: bool,
    /// Value with its error in last-digit parentheses, e.g. `0.072(3)`.
    pub display: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSummary {
    pub epsilon: ParamEstimate,
    pub t: ParamEstimate,
    pub gamma: ParamEstimate,
    pub residual_sum: f64,
    pub converged: bool,
    pub evaluations: usize,
    pub observations: usize,
    /// Generating parameters of synthetic data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<NoiseValues>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Results {
    pub format: String,
    pub config: ExperimentConfig,
    pub records: Vec<Record>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSummary>,
    /// Invariant breaches found while running.
    pub violations: Vec<String>,
}

impl Results {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("results serialize");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let results: Results = serde_json::from_str(&text).map_err(|e| CliError::Input {
            path: path.to_path_buf(),
            message: format!("line {}: {e}", e.line()),
        })?;
        if results.format != FORMAT {
            return Err(CliError::Input {
                path: path.to_path_buf(),
                message: format!(
                    "unsupported format {:?}, expected {FORMAT:?}",
                    results.format
                ),
            });
        }
        Ok(results)
    }
}

/// One read-out setting in `raw.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub theta: f64,
    pub quantity: Quantity,
    /// Detector index `k`, binary-sweep bitmask, or fringe grid index.
    pub setting: usize,
    /// Relative phase of a fringe point; empty otherwise.
    pub phi: Option<f64>,
    pub probability: f64,
    pub observed: f64,
    /// Outcome counts over the measured register, `;`-separated.
    pub counts: String,
}

/// `value(err)` with the error in units of the last shown digit: one digit,
/// or two when the leading digit is 1.
pub fn with_uncertainty(value: f64, std_error: Option<f64>) -> String {
    let Some(se) = std_error.filter(|s| s.is_finite() && *s > 0.0) else {
        return format!("{value:.4}");
    };
    let exponent = se.log10().floor() as i32;
    let leading = (se / 10f64.powi(exponent)).floor() as i32;
    let decimals = (if leading == 1 {
        1 - exponent
    } else {
        -exponent
    })
    .max(0) as usize;
    let digits = (se * 10f64.powi(decimals as i32)).round() as u64;
    format!("{value:.decimals$}({digits})")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncertainty_notation() {
        assert_eq!(with_uncertainty(0.0721, Some(0.003)), "0.072(3)");
        assert_eq!(with_uncertainty(0.8543, Some(0.013)), "0.854(13)");
        assert_eq!(with_uncertainty(0.82, Some(0.02)), "0.82(2)");
        assert_eq!(with_uncertainty(12.3, Some(4.0)), "12(4)");
        assert_eq!(with_uncertainty(0.5, None), "0.5000");
        assert_eq!(with_uncertainty(0.5, Some(f64::INFINITY)), "0.5000");
    }
}
