//! Three-parameter imperfection model, model curves and parameter fitting.

mod fit;
mod model;
mod params;
mod simplex;

pub use fit::{
    fit_noise_params, fit_noise_params_with, FitOptions, FitResult, Observation, Weighting,
    PARAMETER_BOX,
};
pub use model::{
    apply_noise_model, model_curves, model_value, synthetic_observations, QuantityKind,
};
pub use params::{NoiseParams, EPSILON_RANGE, GAMMA_RANGE};
