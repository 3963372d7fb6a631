use std::f64::consts::FRAC_1_SQRT_2;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use whichpath_core::noise::NoiseParams;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Fringes,
    SweepTheta,
    EstimateVp,
    Fit,
    OracleCheck,
}

/// Quantities as they appear in configs, results and CSV files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "V_C")]
    CoherenceVisibility,
    #[serde(rename = "V_P")]
    PurityVisibility,
    #[serde(rename = "D")]
    Distinguishability,
    /// Two-path fringe visibility from a sine fit.
    #[serde(rename = "V")]
    FringeVisibility,
}

impl Quantity {
    pub fn label(self) -> &'static str {
        match self {
            Quantity::CoherenceVisibility => "V_C",
            Quantity::PurityVisibility => "V_P",
            Quantity::Distinguishability => "D",
            Quantity::FringeVisibility => "V",
        }
    }

    pub fn kind(self) -> Option<whichpath_core::noise::QuantityKind> {
        use whichpath_core::noise::QuantityKind as K;
        match self {
            Quantity::CoherenceVisibility => Some(K::CoherenceVisibility),
            Quantity::PurityVisibility => Some(K::PurityVisibility),
            Quantity::Distinguishability => Some(K::Distinguishability),
            Quantity::FringeVisibility => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    /// `points` values from `start` to `stop` inclusive.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.start + step * i as f64)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseValues {
    pub epsilon: f64,
    pub t: f64,
    pub gamma: f64,
}

impl NoiseValues {
    pub const IDEAL: NoiseValues = NoiseValues {
        epsilon: 0.0,
        t: FRAC_1_SQRT_2,
        gamma: 1.0,
    };

    pub fn params(&self) -> Result<NoiseParams, whichpath_core::Error> {
        NoiseParams::new(self.epsilon, self.t, self.gamma)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedNoise {
    Ideal,
}

/// `"ideal"` or explicit `{epsilon, t, gamma}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseSetting {
    Named(NamedNoise),
    Values(NoiseValues),
}

impl Default for NoiseSetting {
    fn default() -> Self {
        NoiseSetting::Named(NamedNoise::Ideal)
    }
}

impl NoiseSetting {
    pub fn values(&self) -> NoiseValues {
        match self {
            NoiseSetting::Named(NamedNoise::Ideal) => NoiseValues::IDEAL,
            NoiseSetting::Values(v) => *v,
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.values() == NoiseValues::IDEAL
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightingSetting {
    #[default]
    Sigma,
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    /// `[epsilon, T, gamma]`; `false` fixes the parameter at `initial`.
    #[serde(default = "all_free")]
    pub free: [bool; 3],
    #[serde(default = "ideal_values")]
    pub initial: NoiseValues,
    /// Observed quantities when the data are generated from `noise`.
    #[serde(default = "vc_and_d")]
    pub quantities: Vec<Quantity>,
    #[serde(default)]
    pub weighting: WeightingSetting,
    #[serde(default = "default_multistarts")]
    pub multistarts: usize,
    /// CSV of `theta,quantity,value,sigma`; synthetic data from `noise` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
}

fn all_free() -> [bool; 3] {
    [true; 3]
}

fn ideal_values() -> NoiseValues {
    NoiseValues::IDEAL
}

fn vc_and_d() -> Vec<Quantity> {
    vec![Quantity::CoherenceVisibility, Quantity::Distinguishability]
}

fn default_multistarts() -> usize {
    8
}

fn default_phase_points() -> usize {
    16
}

fn default_oracle_samples() -> usize {
    100_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub paths: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_grid: Option<Grid>,
    #[serde(default = "default_phase_points")]
    pub phase_points: usize,
    /// Quantities for `sweep_theta`; empty means every quantity the path
    /// count allows.
    #[serde(default)]
    pub quantities: Vec<Quantity>,
    /// Shots per setting; absent means exact probabilities.
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseSetting,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitConfig>,
    #[serde(default = "default_oracle_samples")]
    pub oracle_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Largest path count with a binary sweep (`2^N` settings).
pub const MAX_SWEEP_PATHS: usize = 16;
/// Largest path count for which the whole `2n`-qubit register fits the
/// statevector limit.
pub const MAX_PATHS: usize = 256;
/// Largest path count for mixed-state (epsilon > 0) simulation.
pub const MAX_NOISY_PATHS: usize = 32;
pub const MIN_PHASE_POINTS: usize = whichpath_core::estimator::MIN_FRINGE_POINTS;

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config {
                line: Some(e.line()),
                message: e.to_string(),
            })?;
        config
            .validate()
            .map_err(|(field, message)| CliError::Config {
                line: locate_field(text, field),
                message: format!("{field}: {message}"),
            })?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn thetas(&self) -> Vec<f64> {
        match (&self.thetas, &self.theta_grid) {
            (Some(list), _) => list.clone(),
            (None, Some(grid)) => grid.values(),
            (None, None) => Vec::new(),
        }
    }

    pub fn noise_params(&self) -> NoiseParams {
        self.noise.values().params().expect("validated")
    }

    /// Quantities measured by `sweep_theta`.
    pub fn sweep_quantities(&self) -> Vec<Quantity> {
        if !self.quantities.is_empty() {
            return self.quantities.clone();
        }
        let mut q = vec![Quantity::CoherenceVisibility];
        if self.paths <= MAX_SWEEP_PATHS {
            q.push(Quantity::PurityVisibility);
        }
        q.push(Quantity::Distinguishability);
        q
    }

    /// Checks every precondition the experiment relies on; errors name the
    /// offending field.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        let paths = self.paths;
        if paths < 2 || !paths.is_power_of_two() || paths > MAX_PATHS {
            return Err((
                "paths",
                format!("must be a power of two in [2, {MAX_PATHS}], got {paths}"),
            ));
        }
        match (&self.thetas, &self.theta_grid) {
            (Some(_), Some(_)) => {
                return Err((
                    "theta_grid",
                    "give either thetas or theta_grid, not both".into(),
                ))
            }
            (None, None) => {
                return Err((
                    "experiment",
                    "one of thetas or theta_grid is required".into(),
                ))
            }
            (Some(list), None) if list.is_empty() => {
                return Err(("thetas", "must not be empty".into()))
            }
            (None, Some(g)) if g.points == 0 || !g.start.is_finite() || !g.stop.is_finite() => {
                return Err((
                    "theta_grid",
                    "needs finite bounds and at least one point".into(),
                ))
            }
            _ => {}
        }
        if self.thetas().iter().any(|t| !t.is_finite()) {
            return Err(("thetas", "angles must be finite".into()));
        }
        if self.shots == Some(0) {
            return Err((
                "shots",
                "must be at least 1 (omit for exact probabilities)".into(),
            ));
        }
        let noise = self.noise.values();
        if let Err(e) = noise.params() {
            return Err(("noise", e.to_string()));
        }
        if noise.epsilon > 0.0 && paths > MAX_NOISY_PATHS {
            return Err((
                "paths",
                format!("mixed-state simulation supports at most {MAX_NOISY_PATHS} paths"),
            ));
        }
        match self.experiment {
            Experiment::Fringes => {
                if paths != 2 {
                    return Err(("paths", "fringes need a two-path interferometer".into()));
                }
                if self.phase_points < MIN_PHASE_POINTS {
                    return Err((
                        "phase_points",
                        format!("must be at least {MIN_PHASE_POINTS}"),
                    ));
                }
            }
            Experiment::SweepTheta => {
                if self.quantities.contains(&Quantity::FringeVisibility) {
                    return Err((
                        "quantities",
                        "V is produced by the fringes experiment".into(),
                    ));
                }
                if self
                    .sweep_quantities()
                    .contains(&Quantity::PurityVisibility)
                    && paths > MAX_SWEEP_PATHS
                {
                    return Err((
                        "quantities",
                        format!("V_P needs 2^N settings; at most {MAX_SWEEP_PATHS} paths"),
                    ));
                }
            }
            Experiment::EstimateVp => {
                if paths > MAX_SWEEP_PATHS {
                    return Err((
                        "paths",
                        format!("V_P needs 2^N settings; at most {MAX_SWEEP_PATHS} paths"),
                    ));
                }
            }
            Experiment::OracleCheck => {
                if paths > MAX_SWEEP_PATHS {
                    return Err(("paths", format!("oracle checks compare with the 2^N sweep; at most {MAX_SWEEP_PATHS} paths")));
                }
                if self.oracle_samples == 0 {
                    return Err(("oracle_samples", "must be at least 1".into()));
                }
            }
            Experiment::Fit => {
                let Some(fit) = &self.fit else {
                    return Err(("experiment", "fit experiments need a fit section".into()));
                };
                if fit.free.iter().all(|f| !f) {
                    return Err(("free", "at least one parameter must be free".into()));
                }
                if let Err(e) = fit.initial.params() {
                    return Err(("initial", e.to_string()));
                }
                if fit.multistarts == 0 {
                    return Err(("multistarts", "must be at least 1".into()));
                }
                if fit.data.is_none() {
                    if fit.quantities.is_empty() {
                        return Err((
                            "quantities",
                            "synthetic fits need at least one quantity".into(),
                        ));
                    }
                    if fit.quantities.contains(&Quantity::FringeVisibility) {
                        return Err(("quantities", "fits use V_C, V_P or D".into()));
                    }
                    if fit.quantities.contains(&Quantity::PurityVisibility)
                        && paths > MAX_SWEEP_PATHS
                    {
                        return Err((
                            "quantities",
                            format!("V_P needs 2^N settings; at most {MAX_SWEEP_PATHS} paths"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// 1-based line of the first `"field"` key in `text`.
fn locate_field(text: &str, field: &str) -> Option<usize> {
    let key = format!("\"{field}\"");
    text.lines().position(|l| l.contains(&key)).map(|i| i + 1)
}
