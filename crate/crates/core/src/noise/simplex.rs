//! Nelder-Mead downhill simplex.

use alloc::vec::Vec;

use crate::math::abs;

#[derive(Clone, Copy, Debug)]
pub(crate) struct SimplexSettings {
    pub initial_step: f64,
    pub x_tol: f64,
    pub f_tol: f64,
    pub max_evaluations: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct SimplexOutcome {
    pub x: Vec<f64>,
    pub evaluations: usize,
}

/// Minimizes `f` from `start` with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
pub(crate) fn minimize<F>(f: &mut F, start: &[f64], settings: SimplexSettings) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], evaluations: &mut usize| {
        *evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = eval(start, &mut evaluations);
    simplex.push((start.to_vec(), v0));
    for i in 0..dim {
        let mut x = start.to_vec();
        x[i] += if x[i] + settings.initial_step <= 1.0 {
            settings.initial_step
        } else {
            -settings.initial_step
        };
        let v = eval(&x, &mut evaluations);
        simplex.push((x, v));
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        let spread = simplex
            .iter()
            .skip(1)
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| abs(a - b)))
            .fold(0.0_f64, f64::max);
        // Objective values near zero (exact data) need the absolute floor.
        if (abs(worst - best) <= settings.f_tol * (abs(best) + 1.0) && spread <= settings.x_tol)
            || evaluations >= settings.max_evaluations
        {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..dim].iter().map(|(x, _)| x[i]).sum::<f64>() / dim as f64)
            .collect();
        let toward = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let reflected = toward(-1.0);
        let fr = eval(&reflected, &mut evaluations);
        if fr < simplex[0].1 {
            let expanded = toward(-2.0);
            let fe = eval(&expanded, &mut evaluations);
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst {
            let x = toward(-0.5);
            let v = eval(&x, &mut evaluations);
            (x, v)
        } else {
            let x = toward(0.5);
            let v = eval(&x, &mut evaluations);
            (x, v)
        };
        if fc < fr.min(worst) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = anchor
                .iter()
                .zip(&entry.0)
                .map(|(a, b)| a + 0.5 * (b - a))
                .collect();
            let v = eval(&x, &mut evaluations);
            *entry = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, _) = simplex.swap_remove(0);
    SimplexOutcome { x, evaluations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_rosenbrock_minimum() {
        let mut f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let out = minimize(
            &mut f,
            &[-0.5, 0.5],
            SimplexSettings {
                initial_step: 0.1,
                x_tol: 1e-10,
                f_tol: 1e-14,
                max_evaluations: 20_000,
            },
        );
        assert!(
            (out.x[0] - 1.0).abs() < 1e-6 && (out.x[1] - 1.0).abs() < 1e-6,
            "{:?}",
            out.x
        );
    }

    #[test]
    fn one_dimensional_quadratic() {
        let mut f = |x: &[f64]| (x[0] - 0.3) * (x[0] - 0.3);
        let out = minimize(
            &mut f,
            &[0.9],
            SimplexSettings {
                initial_step: 0.1,
                x_tol: 1e-12,
                f_tol: 1e-16,
                max_evaluations: 1000,
            },
        );
        assert!((out.x[0] - 0.3).abs() < 1e-9);
    }
}
