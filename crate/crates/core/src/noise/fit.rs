use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use super::model::{predict, QuantityKind};
use super::params::NoiseParams;
use super::simplex::{minimize, SimplexSettings};
use crate::error::{Error, Result};
use crate::linalg;
use crate::math::{abs, sqrt};
use crate::par::map_indices;

/// Search box for `[epsilon, T, gamma]`.
pub const PARAMETER_BOX: [(f64, f64); 3] = [(0.0, 0.5), (1e-3, 1.0 - 1e-3), (0.0, 2.0)];

/// One measured (or synthetic) value of a quantity at a rotation angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub theta: f64,
    pub quantity: QuantityKind,
    pub value: f64,
    pub sigma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weighting {
    /// Residuals divided by each observation's `sigma`.
    Sigma,
    /// Unit weights; standard errors rescaled by the residual variance.
    Uniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitOptions {
    pub paths: usize,
    /// `[epsilon, T, gamma]`; `false` holds the parameter at its initial value.
    pub free: [bool; 3],
    pub initial: NoiseParams,
    pub multistarts: usize,
    pub weighting: Weighting,
}

impl FitOptions {
    pub fn new(paths: usize, free: [bool; 3], initial: NoiseParams) -> Self {
        Self {
            paths,
            free,
            initial,
            multistarts: 8,
            weighting: Weighting::Sigma,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub params: NoiseParams,
    /// `true` where the parameter was held fixed.
    pub fixed_mask: [bool; 3],
    /// One-sigma errors of the free parameters; `None` for fixed ones.
    pub std_errors: [Option<f64>; 3],
    /// Weighted sum of squared residuals at the optimum.
    pub residual_sum: f64,
    /// The two best multistart optima agree within `AGREEMENT_TOL`.
    pub converged: bool,
    pub evaluations: usize,
}

/// Multistart optima closer than this (in every free parameter) agree.
pub const AGREEMENT_TOL: f64 = 1e-3;

pub fn fit_noise_params(
    observations: &[Observation],
    free_mask: [bool; 3],
    initial_guess: NoiseParams,
    paths: usize,
) -> Result<FitResult> {
    fit_noise_params_with(
        observations,
        &FitOptions::new(paths, free_mask, initial_guess),
    )
}

struct Problem<'a> {
    observations: &'a [Observation],
    /// Distinct angles and, per angle, which quantities are observed.
    angles: Vec<(f64, [bool; 3])>,
    /// Angle slot of each observation.
    slot: Vec<usize>,
    options: &'a FitOptions,
    free_idx: Vec<usize>,
}

impl<'a> Problem<'a> {
    fn new(observations: &'a [Observation], options: &'a FitOptions) -> Self {
        let mut angles: Vec<(f64, [bool; 3])> = Vec::new();
        let mut slot = Vec::with_capacity(observations.len());
        for obs in observations {
            let i = match angles
                .iter()
                .position(|(t, _)| t.to_bits() == obs.theta.to_bits())
            {
                Some(i) => i,
                None => {
                    angles.push((obs.theta, [false; 3]));
                    angles.len() - 1
                }
            };
            angles[i].1[obs.quantity as usize] = true;
            slot.push(i);
        }
        let free_idx = (0..3).filter(|&i| options.free[i]).collect();
        Self {
            observations,
            angles,
            slot,
            options,
            free_idx,
        }
    }

    fn full_params(&self, free_values: &[f64]) -> [f64; 3] {
        let mut p = self.options.initial.to_array();
        for (v, &i) in free_values.iter().zip(&self.free_idx) {
            p[i] = *v;
        }
        p
    }

    fn to_unit(&self, free_values: &[f64]) -> Vec<f64> {
        free_values
            .iter()
            .zip(&self.free_idx)
            .map(|(v, &i)| (v - PARAMETER_BOX[i].0) / (PARAMETER_BOX[i].1 - PARAMETER_BOX[i].0))
            .collect()
    }

    fn unit_to_box(&self, unit: &[f64]) -> Vec<f64> {
        unit.iter()
            .zip(&self.free_idx)
            .map(|(u, &i)| PARAMETER_BOX[i].0 + u * (PARAMETER_BOX[i].1 - PARAMETER_BOX[i].0))
            .collect()
    }

    /// Weighted residuals `(model - value) / sigma` at full parameters.
    fn residuals(&self, params: [f64; 3]) -> Result<Vec<f64>> {
        let noise = NoiseParams::from_array(params)?;
        let predictions = self
            .angles
            .iter()
            .map(|&(theta, wanted)| predict(self.options.paths, theta, noise, wanted))
            .collect::<Result<Vec<_>>>()?;
        Ok(self
            .observations
            .iter()
            .zip(&self.slot)
            .map(|(obs, &s)| {
                let model = predictions[s][obs.quantity as usize];
                let sigma = match self.options.weighting {
                    Weighting::Sigma => obs.sigma,
                    Weighting::Uniform => 1.0,
                };
                (model - obs.value) / sigma
            })
            .collect())
    }

    fn chi_square(&self, params: [f64; 3]) -> f64 {
        match self.residuals(params) {
            Ok(r) => r.iter().map(|v| v * v).sum(),
            Err(_) => f64::INFINITY,
        }
    }

    /// Objective on the unit cube; points outside are projected back in and
    /// pay a quadratic penalty on the distance.
    fn unit_objective(&self, unit: &[f64]) -> f64 {
        let mut dist = 0.0;
        let clamped: Vec<f64> = unit
            .iter()
            .map(|&u| {
                let c = u.clamp(0.0, 1.0);
                dist += (u - c) * (u - c);
                c
            })
            .collect();
        let chi2 = self.chi_square(self.full_params(&self.unit_to_box(&clamped)));
        chi2 + 1e3 * (1.0 + chi2) * dist
    }
}

/// Every prediction is invariant under `T -> sqrt(1 - T^2)` (the mirrored
/// splitter equals `X B_T Z`), so optima are reported on the branch
/// `T >= 1/sqrt(2)`.
fn fold_splitter(mut params: [f64; 3]) -> [f64; 3] {
    if params[1] < FRAC_1_SQRT_2 {
        params[1] = sqrt(1.0 - params[1] * params[1]).min(PARAMETER_BOX[1].1);
    }
    params
}

/// Radical-inverse (Halton) point `index` in `dim` dimensions.
fn halton(index: usize, dim: usize) -> Vec<f64> {
    const BASES: [usize; 3] = [2, 3, 5];
    (0..dim)
        .map(|d| {
            let base = BASES[d];
            let (mut i, mut f, mut r) = (index, 1.0, 0.0);
            while i > 0 {
                f /= base as f64;
                r += f * (i % base) as f64;
                i /= base;
            }
            r
        })
        .collect()
}

/// Weighted least squares of the noise model against `observations`, by
/// multistart Nelder-Mead on the parameter box.
pub fn fit_noise_params_with(
    observations: &[Observation],
    options: &FitOptions,
) -> Result<FitResult> {
    let free = options.free.iter().filter(|f| **f).count();
    if free == 0 {
        return Err(Error::AllFixed);
    }
    if observations.len() < free {
        return Err(Error::InsufficientData {
            observations: observations.len(),
            free,
        });
    }
    if let Some(obs) = observations
        .iter()
        .find(|o| o.sigma.is_nan() || o.sigma <= 0.0 || !o.value.is_finite())
    {
        return Err(Error::OutOfRange {
            name: "sigma",
            value: obs.sigma,
        });
    }
    let problem = Problem::new(observations, options);
    let initial: Vec<f64> = problem
        .free_idx
        .iter()
        .map(|&i| options.initial.to_array()[i])
        .collect();
    let start0 = problem.to_unit(&initial);

    let coarse = SimplexSettings {
        initial_step: 0.1,
        x_tol: 1e-8,
        f_tol: 1e-12,
        max_evaluations: 4000,
    };
    let polish = SimplexSettings {
        initial_step: 0.01,
        ..coarse
    };
    let runs = map_indices(options.multistarts.max(1), |s| {
        let start = if s == 0 {
            start0.iter().map(|u| u.clamp(0.0, 1.0)).collect()
        } else {
            halton(s, free)
                .into_iter()
                .map(|h| 0.1 + 0.8 * h)
                .collect::<Vec<f64>>()
        };
        let mut objective = |u: &[f64]| problem.unit_objective(u);
        let first = minimize(&mut objective, &start, coarse);
        let second = minimize(&mut objective, &first.x, polish);
        let x: Vec<f64> = second.x.iter().map(|u| u.clamp(0.0, 1.0)).collect();
        let value = problem.chi_square(problem.full_params(&problem.unit_to_box(&x)));
        (x, value, first.evaluations + second.evaluations)
    });

    let evaluations = runs.iter().map(|r| r.2).sum();
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by(|&a, &b| runs[a].1.total_cmp(&runs[b].1));
    let optimum =
        |run: usize| fold_splitter(problem.full_params(&problem.unit_to_box(&runs[run].0)));
    let params = optimum(order[0]);
    let converged = order.get(1).is_some_and(|&second| {
        optimum(second)
            .iter()
            .zip(&params)
            .all(|(a, b)| abs(a - b) <= AGREEMENT_TOL)
    });

    let residual_sum = runs[order[0]].1;
    let std_errors = standard_errors(&problem, params, residual_sum)?;
    Ok(FitResult {
        params: NoiseParams::from_array(params)?,
        fixed_mask: options.free.map(|f| !f),
        std_errors,
        residual_sum,
        converged,
        evaluations,
    })
}

/// Errors from the local quadratic model `chi^2 ~ (x - x*)^T J^T J (x - x*)`
/// with `J` the finite-difference Jacobian of the weighted residuals.
fn standard_errors(problem: &Problem<'_>, params: [f64; 3], chi2: f64) -> Result<[Option<f64>; 3]> {
    let free = &problem.free_idx;
    let p = free.len();
    let m = problem.observations.len();
    let mut jac = vec![0.0; m * p];
    for (col, &i) in free.iter().enumerate() {
        let (lo, hi) = PARAMETER_BOX[i];
        let h = 1e-6 * (hi - lo);
        let (mut up, mut down) = (params, params);
        up[i] = (params[i] + h).min(hi);
        down[i] = (params[i] - h).max(lo);
        let ru = problem.residuals(up)?;
        let rd = problem.residuals(down)?;
        let span = up[i] - down[i];
        for row in 0..m {
            jac[row * p + col] = (ru[row] - rd[row]) / span;
        }
    }
    let mut normal = vec![0.0; p * p];
    for a in 0..p {
        for b in 0..p {
            normal[a * p + b] = (0..m).map(|r| jac[r * p + a] * jac[r * p + b]).sum();
        }
    }
    let scale = match problem.options.weighting {
        Weighting::Sigma => 1.0,
        Weighting::Uniform if m > p => chi2 / (m - p) as f64,
        Weighting::Uniform => 1.0,
    };
    let cov = linalg::invert(&normal, p, 1e-14);
    let mut out = [None; 3];
    for (col, &i) in free.iter().enumerate() {
        out[i] = Some(match &cov {
            Some(c) => sqrt((c[col * p + col] * scale).max(0.0)),
            None => f64::INFINITY,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_points_are_in_unit_cube() {
        for i in 1..8 {
            assert!(halton(i, 3).iter().all(|v| (0.0..1.0).contains(v)));
        }
        assert_eq!(halton(1, 2), vec![0.5, 1.0 / 3.0]);
    }

    #[test]
    fn rejects_degenerate_requests() {
        let obs = [Observation {
            theta: 0.0,
            quantity: QuantityKind::CoherenceVisibility,
            value: 0.9,
            sigma: 0.01,
        }];
        assert_eq!(
            fit_noise_params(&obs, [false; 3], NoiseParams::ideal(), 2),
            Err(Error::AllFixed)
        );
        assert_eq!(
            fit_noise_params(&obs, [true, false, true], NoiseParams::ideal(), 2),
            Err(Error::InsufficientData {
                observations: 1,
                free: 2
            })
        );
        let bad = [Observation {
            sigma: 0.0,
            ..obs[0]
        }];
        assert!(fit_noise_params(&bad, [true, false, false], NoiseParams::ideal(), 2).is_err());
    }
}
