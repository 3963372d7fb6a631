mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use whichpath_core::circuit::{beam_splitter, run, CircuitVariant, InterferometerSpec};
use whichpath_core::estimator::Sampling;
use whichpath_core::noise::{
    apply_noise_model, fit_noise_params, model_curves, model_value, synthetic_observations,
    NoiseParams, QuantityKind,
};
use whichpath_core::quantifiers::{
    distinguishability, visibility_coherence, visibility_purity, CoherenceMode, OverlapMatrix,
};
use whichpath_core::statevec::CMatrix;

fn grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| PI * i as f64 / (points - 1) as f64)
        .collect()
}

#[test]
fn ideal_point_changes_no_probability() {
    for paths in [2, 4, 8, 16] {
        for theta in [0.0, 0.4 * PI, PI] {
            let spec = InterferometerSpec::per_qubit_rotation(paths, theta).unwrap();
            let noisy =
                apply_noise_model(&spec, NoiseParams::new(0.0, FRAC_1_SQRT_2, 1.0).unwrap());
            let phases: Vec<f64> = (0..paths).map(|j| 0.9 * j as f64).collect();
            let mut variants = vec![CircuitVariant::ParticleReadout(phases)];
            variants.extend([0, paths - 1].map(CircuitVariant::DetectorReadout));
            for v in variants {
                let a = run(&spec, &v).unwrap();
                let b = run(&noisy, &v).unwrap();
                assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-10));
            }
        }
    }
}

#[test]
fn ideal_curves_are_the_analytic_quantifiers() {
    let thetas = grid(11);
    for paths in [2, 4, 8] {
        let curves: Vec<Vec<f64>> = QuantityKind::ALL
            .iter()
            .map(|&q| model_curves(paths, &thetas, NoiseParams::IDEAL, q).unwrap())
            .collect();
        for (i, &theta) in thetas.iter().enumerate() {
            let spec = InterferometerSpec::per_qubit_rotation(paths, theta).unwrap();
            let o = OverlapMatrix::from_spec(&spec).unwrap();
            let exact = [
                visibility_coherence(&o, CoherenceMode::RealOverlaps)
                    .unwrap()
                    .value(),
                visibility_purity(&o),
                distinguishability(&o).unwrap(),
            ];
            for q in 0..3 {
                assert!(
                    (curves[q][i] - exact[q]).abs() <= 1e-10,
                    "N={paths} theta={theta} q={q}"
                );
            }
        }
    }
}

#[test]
fn imbalanced_splitter_is_an_orthogonal_involution() {
    let mut rng = common::rng(11);
    for _ in 0..200 {
        let t = rng.random_range(1e-6..1.0 - 1e-6);
        let b = beam_splitter(t);
        assert!(b.unitarity_deviation() <= 1e-12);
        assert!(b.matmul(&b).max_abs_diff(&CMatrix::identity(2)) <= 1e-12);
    }
    assert!(beam_splitter(FRAC_1_SQRT_2).max_abs_diff(&CMatrix::hadamard()) <= 1e-15);
}

#[test]
fn mixing_lowers_the_zero_angle_visibility_by_two_epsilon() {
    for eps in [0.0, 0.05, 0.1, 0.3, 0.5] {
        let params = NoiseParams::new(eps, FRAC_1_SQRT_2, 1.0).unwrap();
        let spec = apply_noise_model(
            &InterferometerSpec::per_qubit_rotation(2, 0.0).unwrap(),
            params,
        );
        let p = run(&spec, &CircuitVariant::ParticleReadout(vec![0.0, 0.0])).unwrap();
        assert!((p[0] - (1.0 - eps)).abs() <= 1e-12);
        let v_c = model_value(2, 0.0, params, QuantityKind::CoherenceVisibility).unwrap();
        assert!((v_c - (1.0 - 2.0 * eps)).abs() <= 1e-12);
    }
}

#[test]
fn rotation_scale_shortens_the_angle() {
    let params = NoiseParams::new(0.0, FRAC_1_SQRT_2, 0.873).unwrap();
    let d = model_value(2, PI, params, QuantityKind::Distinguishability).unwrap();
    let expect = (0.873 * PI / 2.0).sin().abs();
    assert!((d - expect).abs() <= 1e-10);
    assert!((d - 0.9801).abs() < 1e-4);
}

#[test]
fn mirrored_splitter_predicts_the_same_curves() {
    for (eps, t, gamma) in [(0.05, 0.89, 1.15), (0.2, 0.6, 0.7), (0.0, 0.95, 1.3)] {
        let a = NoiseParams::new(eps, t, gamma).unwrap();
        let b = NoiseParams::new(eps, (1.0f64 - t * t).sqrt(), gamma).unwrap();
        for paths in [2, 4, 8] {
            for q in QuantityKind::ALL {
                let ca = model_curves(paths, &grid(7), a, q).unwrap();
                let cb = model_curves(paths, &grid(7), b, q).unwrap();
                assert!(ca.iter().zip(&cb).all(|(x, y)| (x - y).abs() <= 1e-12));
            }
        }
    }
}

#[test]
fn mixing_degrades_monotonically() {
    for paths in [2, 4, 8, 16] {
        let mut previous = f64::INFINITY;
        for i in 0..=10 {
            let eps = 0.05 * i as f64;
            let params = NoiseParams::new(eps, FRAC_1_SQRT_2, 1.0).unwrap();
            let v = model_value(paths, 0.0, params, QuantityKind::CoherenceVisibility).unwrap();
            if i < 10 {
                assert!(v < previous, "N={paths} eps={eps}");
            }
            previous = v;
            if eps > 0.0 {
                let d = model_value(paths, 0.0, params, QuantityKind::Distinguishability).unwrap();
                assert!(d > 0.0);
            }
        }
    }
}

#[test]
fn noisy_predictions_run_through_the_circuit() {
    // The fast prediction path agrees with the protocols on the full circuit.
    let params = NoiseParams::new(0.09, 0.74, 0.91).unwrap();
    for paths in [2, 4] {
        for theta in [0.2 * PI, 0.7 * PI] {
            let obs = synthetic_observations(
                paths,
                &[theta],
                params,
                &QuantityKind::ALL,
                Sampling::Exact,
                0,
                1.0,
            )
            .unwrap();
            for o in obs {
                let m = model_value(paths, theta, params, o.quantity).unwrap();
                assert!((m - o.value).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn fits_recover_random_parameters_from_exact_data() {
    let mut rng = common::rng(2024);
    let thetas = grid(12);
    for trial in 0..20 {
        let truth = NoiseParams::new(
            rng.random_range(0.0..0.3),
            rng.random_range(0.6..0.9),
            rng.random_range(0.6..1.4),
        )
        .unwrap();
        let obs = synthetic_observations(
            2,
            &thetas,
            truth,
            &QuantityKind::ALL,
            Sampling::Exact,
            0,
            1e-3,
        )
        .unwrap();
        let fit = fit_noise_params(&obs, [true; 3], NoiseParams::IDEAL, 2).unwrap();
        let got = fit.params.to_array();
        // Predictions cannot tell T from sqrt(1 - T^2); fits report T >= 1/sqrt(2).
        let mut want = truth.to_array();
        want[1] = want[1].max((1.0 - want[1] * want[1]).sqrt());
        for q in 0..3 {
            assert!(
                (got[q] - want[q]).abs() <= 1e-3,
                "trial {trial}: {got:?} vs {want:?}"
            );
        }
        assert!(fit.converged, "trial {trial}: {fit:?}");
    }
}

#[test]
fn fixed_parameters_are_returned_unchanged() {
    let truth = NoiseParams::new(0.17, FRAC_1_SQRT_2, 0.86).unwrap();
    let obs = synthetic_observations(
        4,
        &grid(12),
        truth,
        &[QuantityKind::PurityVisibility],
        Sampling::Exact,
        0,
        1e-3,
    )
    .unwrap();
    let fit = fit_noise_params(&obs, [true, false, true], NoiseParams::IDEAL, 4).unwrap();
    assert_eq!(fit.params.t(), FRAC_1_SQRT_2);
    assert!(fit.std_errors[1].is_none());
    assert!(fit.fixed_mask == [false, true, false]);
    assert!((fit.params.epsilon() - 0.17).abs() <= 1e-3);
    assert!((fit.params.gamma() - 0.86).abs() <= 1e-3);
}

#[test]
fn fit_rejects_degenerate_requests() {
    let obs = synthetic_observations(
        2,
        &[0.3],
        NoiseParams::IDEAL,
        &[QuantityKind::Distinguishability],
        Sampling::Exact,
        0,
        1e-3,
    )
    .unwrap();
    assert!(fit_noise_params(&obs, [false; 3], NoiseParams::IDEAL, 2).is_err());
    assert!(fit_noise_params(&obs, [true; 3], NoiseParams::IDEAL, 2).is_err());
}
