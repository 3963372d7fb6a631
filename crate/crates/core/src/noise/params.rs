use core::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

/// The three-parameter imperfection model.
///
/// * `epsilon`: every qubit starts in `(1 - eps)|0><0| + eps|1><1|`.
/// * `t`: every Hadamard becomes `[[T, sqrt(1-T^2)], [sqrt(1-T^2), -T]]`.
/// * `gamma`: every rotation angle `theta` becomes `gamma * theta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    epsilon: f64,
    t: f64,
    gamma: f64,
}

pub const EPSILON_RANGE: (f64, f64) = (0.0, 0.5);
pub const GAMMA_RANGE: (f64, f64) = (0.0, 2.0);

impl NoiseParams {
    pub const IDEAL: NoiseParams = NoiseParams {
        epsilon: 0.0,
        t: FRAC_1_SQRT_2,
        gamma: 1.0,
    };

    pub fn new(epsilon: f64, t: f64, gamma: f64) -> Result<Self> {
        if !(EPSILON_RANGE.0..=EPSILON_RANGE.1).contains(&epsilon) {
            return Err(Error::OutOfRange {
                name: "epsilon",
                value: epsilon,
            });
        }
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::OutOfRange {
                name: "T",
                value: t,
            });
        }
        if !(GAMMA_RANGE.0..=GAMMA_RANGE.1).contains(&gamma) {
            return Err(Error::OutOfRange {
                name: "gamma",
                value: gamma,
            });
        }
        Ok(Self { epsilon, t, gamma })
    }

    pub fn ideal() -> Self {
        Self::IDEAL
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Parameters as `[epsilon, T, gamma]`.
    pub fn to_array(&self) -> [f64; 3] {
        [self.epsilon, self.t, self.gamma]
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    /// No mixing, so the pure backend is exact.
    pub fn is_pure(&self) -> bool {
        self.epsilon == 0.0
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self::IDEAL
    }
}
