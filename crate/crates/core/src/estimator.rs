//! Measurement protocols for `D`, `V_C` and `V_P`.
//!
//! Each protocol collects the probability of outcome `0` on the measured
//! register for a set of read-out settings, either exactly or from seeded
//! multinomial counts, and feeds those through a closed-form estimator:
//!
//! * `D` from the `N` detector read-outs `p_d(0|k)`:
//!   `D = sqrt(N/(N-1) (1 - sum_k p_d(0|k) / N))`;
//! * `V_C` from the single setting `phi = 0`:
//!   `V_C = N/(N-1) |p_p(0|0) - 1/N|`;
//! * `V_P` from all `2^N` binary settings `phi in {0, pi}^N`:
//!   `V_P = sqrt(N^3 / (2^(N+1) (N-1)) sum_phi (p_p(0|phi) - 1/N)^2)`.
//!
//! The first two are exact when the detector overlaps are real; so is the
//! third. Setting `s` of a sweep samples with seed `seed + s`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use crate::circuit::{run, CircuitVariant, InterferometerSpec, PositionTwo};
use crate::error::{Error, Result};
use crate::linalg;
use crate::math::{abs, atan2, cos, sin, sqrt};
use crate::par::map_indices;
use crate::statevec::{rng_from_seed, sample_counts};

/// Exact Born probabilities, or a finite number of shots per setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    Exact,
    Shots(u64),
}

impl Sampling {
    pub fn shots(&self) -> Option<u64> {
        match self {
            Sampling::Exact => None,
            Sampling::Shots(s) => Some(*s),
        }
    }
}

/// Outcome-0 statistics for one read-out setting.
#[derive(Clone, Debug, PartialEq)]
pub struct SettingOutcome {
    /// `k` for detector read-out, the bitmask of `phi in {0, pi}^N` for the
    /// binary sweep, `0` for the single `V_C` setting.
    pub setting: usize,
    /// Exact outcome-0 probability.
    pub probability: f64,
    /// Outcome-0 frequency used by the estimator (equals `probability` for
    /// exact sampling).
    pub observed: f64,
    /// Outcome counts over the whole measured register, when sampled.
    pub counts: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateResult {
    pub value: f64,
    /// First-order propagated counting error; zero for exact sampling.
    pub std_error: f64,
    pub shots_per_setting: Option<u64>,
    pub settings_used: usize,
    /// A radicand or absolute-value argument was pushed below zero by shot
    /// noise and clamped.
    pub clamped: bool,
    pub settings: Vec<SettingOutcome>,
}

/// Base seed of protocol `slot` at angle index `angle`. Angles sit `2^20`
/// apart and protocols `2^17` apart, so the per-setting offsets of even the
/// 65,536-setting sweep never reach a neighbouring stream.
pub fn protocol_seed(base: u64, angle: usize, slot: usize) -> u64 {
    base.wrapping_add((angle as u64) << 20)
        .wrapping_add((slot as u64) << 17)
}

fn split_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(index as u64)
}

fn observe(
    distribution: Vec<f64>,
    setting: usize,
    sampling: Sampling,
    seed: u64,
) -> Result<SettingOutcome> {
    let probability = distribution[0];
    match sampling {
        Sampling::Exact => Ok(SettingOutcome {
            setting,
            probability,
            observed: probability,
            counts: None,
        }),
        Sampling::Shots(shots) => {
            let counts = sample_counts(&distribution, shots, split_seed(seed, setting))?;
            Ok(SettingOutcome {
                setting,
                probability,
                observed: counts[0] as f64 / shots as f64,
                counts: Some(counts),
            })
        }
    }
}

fn binomial_variance(p: f64, sampling: Sampling) -> f64 {
    match sampling {
        Sampling::Exact => 0.0,
        Sampling::Shots(s) => p * (1.0 - p) / s as f64,
    }
}

/// `D` from the detector read-out probabilities `p_d(0|k)`. Returns the
/// value, its propagated error and whether the radicand was clamped.
pub fn distinguishability_from_probabilities(p: &[f64], sampling: Sampling) -> (f64, f64, bool) {
    let n = p.len() as f64;
    let mean: f64 = p.iter().sum::<f64>() / n;
    let radicand = n / (n - 1.0) * (1.0 - mean);
    let clamped = radicand < 0.0;
    let value = sqrt(radicand.max(0.0)).min(1.0);
    // Variance of the radicand D^2.
    let var_d2: f64 = p
        .iter()
        .map(|&pk| binomial_variance(pk, sampling))
        .sum::<f64>()
        / ((n - 1.0) * (n - 1.0));
    // dD/dp_k = -1 / (2 D (N-1)); near D = 0 the linearization breaks down
    // and the error of D^2 is reported through its square root instead.
    let sd_d2 = sqrt(var_d2);
    let std_error = if value * value > sd_d2 {
        sd_d2 / (2.0 * value)
    } else {
        sqrt(sd_d2)
    };
    (value, std_error, clamped)
}

/// `V_C` from `p_p(0|0)`.
pub fn coherence_visibility_from_probability(
    p0: f64,
    paths: usize,
    sampling: Sampling,
) -> (f64, f64) {
    let n = paths as f64;
    let value = (n / (n - 1.0) * abs(p0 - 1.0 / n)).min(1.0);
    let std_error = n / (n - 1.0) * sqrt(binomial_variance(p0, sampling));
    (value, std_error)
}

/// `V_P` from the `2^N` binary-setting probabilities (bitmask order).
pub fn purity_visibility_from_probabilities(
    p: &[f64],
    paths: usize,
    sampling: Sampling,
) -> (f64, f64) {
    let n = paths as f64;
    let scale = n * n * n / (2.0 * p.len() as f64 * (n - 1.0));
    let sum: f64 = p.iter().map(|&pp| (pp - 1.0 / n) * (pp - 1.0 / n)).sum();
    let value = sqrt(scale * sum).min(1.0);
    // dV/dp = scale (p - 1/N) / V
    let grad_var: f64 = p
        .iter()
        .map(|&pp| (pp - 1.0 / n) * (pp - 1.0 / n) * binomial_variance(pp, sampling))
        .sum();
    let std_error = if value > 0.0 {
        scale * sqrt(grad_var) / value
    } else {
        0.0
    };
    (value, std_error)
}

/// Phases `phi_i = pi * bit_i(mask)`.
pub fn binary_phases(mask: usize, paths: usize) -> Vec<f64> {
    (0..paths)
        .map(|i| if mask >> i & 1 == 1 { PI } else { 0.0 })
        .collect()
}

/// Detector read-out for every `k`; `D` by the sum rule.
pub fn estimate_d(
    spec: &InterferometerSpec,
    sampling: Sampling,
    seed: u64,
) -> Result<EstimateResult> {
    let at_two = PositionTwo::simulate(spec)?;
    estimate_d_from(&at_two, spec, sampling, seed)
}

pub fn estimate_d_from(
    at_two: &PositionTwo,
    spec: &InterferometerSpec,
    sampling: Sampling,
    seed: u64,
) -> Result<EstimateResult> {
    let settings = map_indices(spec.paths(), |k| {
        observe(at_two.detector_readout(spec, k)?, k, sampling, seed)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let p: Vec<f64> = settings.iter().map(|s| s.observed).collect();
    let (value, std_error, clamped) = distinguishability_from_probabilities(&p, sampling);
    Ok(EstimateResult {
        value,
        std_error,
        shots_per_setting: sampling.shots(),
        settings_used: settings.len(),
        clamped,
        settings,
    })
}

/// One particle read-out at `phi = 0`.
pub fn estimate_vc(
    spec: &InterferometerSpec,
    sampling: Sampling,
    seed: u64,
) -> Result<EstimateResult> {
    let at_two = PositionTwo::simulate(spec)?;
    estimate_vc_from(&at_two, spec, sampling, seed)
}

pub fn estimate_vc_from(
    at_two: &PositionTwo,
    spec: &InterferometerSpec,
    sampling: Sampling,
    seed: u64,
) -> Result<EstimateResult> {
    let dist = at_two.particle_readout(spec, &vec![0.0; spec.paths()])?;
    let outcome = observe(dist, 0, sampling, seed)?;
    let (value, std_error) =
        coherence_visibility_from_probability(outcome.observed, spec.paths(), sampling);
    Ok(EstimateResult {
        value,
        std_error,
        shots_per_setting: sampling.shots(),
        settings_used: 1,
        clamped: false,
        settings: vec![outcome],
    })
}

/// Largest `N` whose `2^N` binary settings are enumerated by default.
pub const DEFAULT_VP_CAP: usize = 16;

pub fn estimate_vp(
    spec: &InterferometerSpec,
    sampling: Sampling,
    seed: u64,
) -> Result<EstimateResult> {
    estimate_vp_capped(spec, sampling, seed, DEFAULT_VP_CAP)
}

pub fn estimate_vp_capped(
    spec: &InterferometerSpec,
    sampling: Sampling,
    seed: u64,
    cap: usize,
) -> Result<EstimateResult> {
    if spec.paths() > cap {
        return Err(Error::CapExceeded {
            paths: spec.paths(),
            cap,
        });
    }
    let at_two = PositionTwo::simulate(spec)?;
    estimate_vp_from(&at_two, spec, sampling, seed)
}

pub fn estimate_vp_from(
    at_two: &PositionTwo,
    spec: &InterferometerSpec,
    sampling: Sampling,
    seed: u64,
) -> Result<EstimateResult> {
    let paths = spec.paths();
    let settings = map_indices(1usize << paths, |mask| {
        let dist = at_two.particle_readout(spec, &binary_phases(mask, paths))?;
        observe(dist, mask, sampling, seed)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let p: Vec<f64> = settings.iter().map(|s| s.observed).collect();
    let (value, std_error) = purity_visibility_from_probabilities(&p, paths, sampling);
    Ok(EstimateResult {
        value,
        std_error,
        shots_per_setting: sampling.shots(),
        settings_used: settings.len(),
        clamped: false,
        settings,
    })
}

/// Monte Carlo estimate of the phase-averaged spread
/// `sqrt(N^3/(N-1) <(p_p(0|phi) - 1/N)^2>)` with `phi` uniform on the torus.
/// Each sample runs the full circuit, independent of the reduced-state
/// shortcut the protocols use.
pub fn phase_average_oracle(
    spec: &InterferometerSpec,
    num_phase_samples: usize,
    seed: u64,
) -> Result<f64> {
    Ok(phase_average_oracle_with_error(spec, num_phase_samples, seed)?.0)
}

/// The oracle value with its Monte Carlo standard error (delta method on
/// the sample variance of `(p - 1/N)^2`; zero for a single sample).
pub fn phase_average_oracle_with_error(
    spec: &InterferometerSpec,
    num_phase_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if num_phase_samples < 1 {
        return Err(Error::Invalid("at least one phase sample is required"));
    }
    let paths = spec.paths();
    let n = paths as f64;
    let m = num_phase_samples as f64;
    let mut rng = rng_from_seed(seed);
    let (mut acc, mut acc_sq) = (0.0, 0.0);
    for _ in 0..num_phase_samples {
        let phases: Vec<f64> = (0..paths).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
        let p0 = run(spec, &CircuitVariant::ParticleReadout(phases))?[0];
        let x = (p0 - 1.0 / n) * (p0 - 1.0 / n);
        acc += x;
        acc_sq += x * x;
    }
    let scale = n * n * n / (n - 1.0);
    let mean = acc / m;
    let value = sqrt(scale * mean);
    let std_error = if num_phase_samples > 1 && value > 0.0 {
        let var = ((acc_sq - m * mean * mean) / (m - 1.0)).max(0.0);
        scale * sqrt(var / m) / (2.0 * value)
    } else {
        0.0
    };
    Ok((value, std_error))
}

/// Raw shot counts of a fringe scan.
#[derive(Clone, Debug, PartialEq)]
pub struct FringeCounts {
    pub counts0: Vec<u64>,
    pub counts1: Vec<u64>,
    pub shots: u64,
}

/// Particle-qubit fringes of a two-path interferometer.
#[derive(Clone, Debug, PartialEq)]
pub struct FringeData {
    pub phi_grid: Vec<f64>,
    /// Normalized outcome-0 rate at each grid point.
    pub rate0: Vec<f64>,
    pub counts: Option<FringeCounts>,
}

pub const MIN_FRINGE_POINTS: usize = 8;

/// Scans the relative phase `phi` (phase setting `(0, phi)`) of a two-path
/// interferometer. Grid point `i` samples with seed `seed + i`.
pub fn record_fringes(
    spec: &InterferometerSpec,
    phi_grid: &[f64],
    sampling: Sampling,
    seed: u64,
) -> Result<FringeData> {
    if spec.paths() != 2 {
        return Err(Error::Invalid(
            "fringe scans need a two-path interferometer",
        ));
    }
    if phi_grid.len() < MIN_FRINGE_POINTS {
        return Err(Error::Invalid("fringe grid needs at least 8 points"));
    }
    let at_two = PositionTwo::simulate(spec)?;
    let outcomes = map_indices(phi_grid.len(), |i| {
        observe(
            at_two.particle_readout(spec, &[0.0, phi_grid[i]])?,
            i,
            sampling,
            seed,
        )
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let rate0 = outcomes.iter().map(|o| o.observed).collect();
    let counts = sampling.shots().map(|shots| FringeCounts {
        counts0: outcomes
            .iter()
            .map(|o| o.counts.as_ref().map_or(0, |c| c[0]))
            .collect(),
        counts1: outcomes
            .iter()
            .map(|o| o.counts.as_ref().map_or(0, |c| c[1]))
            .collect(),
        shots,
    });
    Ok(FringeData {
        phi_grid: phi_grid.to_vec(),
        rate0,
        counts,
    })
}

/// Least-squares fit of `amplitude * sin(phi + phase_shift) + offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SineFit {
    pub amplitude: f64,
    pub offset: f64,
    pub phase_shift: f64,
    /// Sum of squared residuals.
    pub residual: f64,
}

impl SineFit {
    /// Fringe visibility `2 * amplitude` (amplitude 1/2 on a unit-contrast
    /// fringe of a normalized rate).
    pub fn visibility(&self) -> f64 {
        2.0 * self.amplitude
    }
}

/// Fits `a1 sin(phi) + a2 cos(phi) + c` by linear least squares and returns
/// the amplitude/phase form.
pub fn fit_sine(data: &FringeData) -> Result<SineFit> {
    let rows: Vec<[f64; 3]> = data
        .phi_grid
        .iter()
        .map(|&phi| [sin(phi), cos(phi), 1.0])
        .collect();
    let mut normal = [0.0; 9];
    let mut rhs = [0.0; 3];
    for (row, y) in rows.iter().zip(&data.rate0) {
        for i in 0..3 {
            rhs[i] += row[i] * y;
            for j in 0..3 {
                normal[i * 3 + j] += row[i] * row[j];
            }
        }
    }
    let x = linalg::solve(&normal, &rhs, 3, 1e-12).ok_or(Error::Singular)?;
    let residual = rows
        .iter()
        .zip(&data.rate0)
        .map(|(row, y)| {
            let r = row[0] * x[0] + row[1] * x[1] + x[2] - y;
            r * r
        })
        .sum();
    Ok(SineFit {
        amplitude: sqrt(x[0] * x[0] + x[1] * x[1]),
        offset: x[2],
        phase_shift: atan2(x[1], x[0]),
        residual,
    })
}

/// Counting error of `fit.visibility()`: binomial variances of the sampled
/// rates pushed through the least-squares solution. Zero for exact data.
pub fn visibility_std_error(data: &FringeData, fit: &SineFit) -> Result<f64> {
    let Some(counts) = &data.counts else {
        return Ok(0.0);
    };
    let shots = counts.shots as f64;
    let mut normal = [0.0; 9];
    for &phi in &data.phi_grid {
        let row = [sin(phi), cos(phi), 1.0];
        for i in 0..3 {
            for j in 0..3 {
                normal[i * 3 + j] += row[i] * row[j];
            }
        }
    }
    let inv = linalg::invert(&normal, 3, 1e-12).ok_or(Error::Singular)?;
    if fit.amplitude <= 0.0 {
        return Ok(0.0);
    }
    // Rates enter the coefficients through (X^T X)^-1 X^T;
    // dA/da1 = a1 / A, dA/da2 = a2 / A.
    let (g1, g2) = (cos(fit.phase_shift), sin(fit.phase_shift));
    let mut var = 0.0;
    for (&phi, &p) in data.phi_grid.iter().zip(&data.rate0) {
        let row = [sin(phi), cos(phi), 1.0];
        let d1: f64 = (0..3).map(|j| inv[j] * row[j]).sum();
        let d2: f64 = (0..3).map(|j| inv[3 + j] * row[j]).sum();
        let grad = g1 * d1 + g2 * d2;
        var += grad * grad * p * (1.0 - p) / shots;
    }
    Ok(2.0 * sqrt(var))
}

/// Evenly spaced grid of `points` phases over `[0, 2 pi)`.
pub fn uniform_phase_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| 2.0 * PI * i as f64 / points as f64)
        .collect()
}
