use alloc::vec::Vec;

use crate::circuit::{InterferometerSpec, PairMarginals, PositionTwo};
use crate::error::Result;
use crate::estimator::{
    binary_phases, coherence_visibility_from_probability, distinguishability_from_probabilities,
    estimate_d, estimate_vc, estimate_vp, protocol_seed, purity_visibility_from_probabilities,
    Sampling,
};
use crate::par::map_indices;

use super::params::NoiseParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuantityKind {
    /// `V_C` through the single-setting protocol.
    CoherenceVisibility = 0,
    /// `V_P` through the `2^N` binary-setting protocol.
    PurityVisibility = 1,
    /// `D` through the detector read-out protocol.
    Distinguishability = 2,
}

impl QuantityKind {
    pub const ALL: [QuantityKind; 3] = [
        QuantityKind::CoherenceVisibility,
        QuantityKind::PurityVisibility,
        QuantityKind::Distinguishability,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            QuantityKind::CoherenceVisibility => "V_C",
            QuantityKind::PurityVisibility => "V_P",
            QuantityKind::Distinguishability => "D",
        }
    }
}

/// `spec` with the imperfections switched on: mixed initial qubits, every
/// splitter replaced by the `T` matrix, every rotation angle scaled by
/// `gamma` (inverse read-out rotations included).
pub fn apply_noise_model(spec: &InterferometerSpec, params: NoiseParams) -> InterferometerSpec {
    spec.clone().with_noise(params)
}

/// Infinite-shot prediction of `quantity` at one angle: the noisy circuit is
/// simulated as a density matrix and its read-out probabilities are pushed
/// through the same estimator formulas used on measured data.
pub fn model_value(
    paths: usize,
    theta: f64,
    params: NoiseParams,
    quantity: QuantityKind,
) -> Result<f64> {
    let mut wanted = [false; 3];
    wanted[quantity as usize] = true;
    Ok(predict(paths, theta, params, wanted)?[quantity as usize])
}

/// Predictions for the quantities flagged in `wanted` (indexed by
/// `QuantityKind as usize`); unflagged entries are `NaN`.
pub(crate) fn predict(
    paths: usize,
    theta: f64,
    params: NoiseParams,
    wanted: [bool; 3],
) -> Result<[f64; 3]> {
    let spec = InterferometerSpec::per_qubit_rotation(paths, theta)?.with_noise(params);
    let mut out = [f64::NAN; 3];
    if wanted[QuantityKind::CoherenceVisibility as usize]
        || wanted[QuantityKind::Distinguishability as usize]
    {
        let pairs = PairMarginals::simulate(&spec)?.expect("per-qubit rotation spec");
        out[QuantityKind::CoherenceVisibility as usize] = coherence_visibility_from_probability(
            pairs.particle_zero_probability(),
            paths,
            Sampling::Exact,
        )
        .0;
        let p: Vec<f64> = (0..paths)
            .map(|k| pairs.detector_zero_probability(k))
            .collect();
        out[QuantityKind::Distinguishability as usize] =
            distinguishability_from_probabilities(&p, Sampling::Exact).0;
    }
    if wanted[QuantityKind::PurityVisibility as usize] {
        let at_two = PositionTwo::prepare(&spec)?;
        let p = (0..1usize << paths)
            .map(|mask| Ok(at_two.particle_readout(&spec, &binary_phases(mask, paths))?[0]))
            .collect::<Result<Vec<f64>>>()?;
        out[QuantityKind::PurityVisibility as usize] =
            purity_visibility_from_probabilities(&p, paths, Sampling::Exact).0;
    }
    Ok(out)
}

pub fn model_curves(
    paths: usize,
    theta_grid: &[f64],
    params: NoiseParams,
    quantity: QuantityKind,
) -> Result<Vec<f64>> {
    if theta_grid.is_empty() {
        return Err(crate::error::Error::Invalid("theta grid is empty"));
    }
    map_indices(theta_grid.len(), |i| {
        model_value(paths, theta_grid[i], params, quantity)
    })
    .into_iter()
    .collect()
}

/// Runs the measurement protocols on the noisy circuit at every angle, the
/// way a device would be measured. Quantity `q` at angle `i` draws from
/// `protocol_seed(seed, i, q as usize)`; `sigma` is the reported standard
/// error, or `exact_sigma` for exact sampling.
pub fn synthetic_observations(
    paths: usize,
    thetas: &[f64],
    params: NoiseParams,
    quantities: &[QuantityKind],
    sampling: Sampling,
    seed: u64,
    exact_sigma: f64,
) -> Result<Vec<super::Observation>> {
    let mut out = Vec::with_capacity(thetas.len() * quantities.len());
    for (i, &theta) in thetas.iter().enumerate() {
        let spec = InterferometerSpec::per_qubit_rotation(paths, theta)?.with_noise(params);
        for &quantity in quantities {
            let stream = protocol_seed(seed, i, quantity as usize);
            let est = match quantity {
                QuantityKind::CoherenceVisibility => estimate_vc(&spec, sampling, stream)?,
                QuantityKind::PurityVisibility => estimate_vp(&spec, sampling, stream)?,
                QuantityKind::Distinguishability => estimate_d(&spec, sampling, stream)?,
            };
            let sigma = match sampling {
                Sampling::Exact => exact_sigma,
                Sampling::Shots(shots) => est.std_error.max(1.0 / shots as f64),
            };
            out.push(super::Observation {
                theta,
                quantity,
                value: est.value,
                sigma,
            });
        }
    }
    Ok(out)
}
