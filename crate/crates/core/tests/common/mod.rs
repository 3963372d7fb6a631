#![allow(dead_code)]

use std::f64::consts::PI;

use rand::SeedableRng;
use whichpath_core::statevec::CMatrix;
use whichpath_core::Complex64;

pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Theta grid `{0, 0.1 pi, ..., pi}`.
pub fn theta_grid_11() -> Vec<f64> {
    (0..=10).map(|i| PI * i as f64 / 10.0).collect()
}

/// `p_p(0|phi) = (1/N^2) sum_{j,k} O_jk exp(i(phi_j - phi_k))`, evaluated
/// straight from an overlap table.
pub fn particle_zero_from_overlaps(
    overlap: &dyn Fn(usize, usize) -> Complex64,
    phases: &[f64],
) -> f64 {
    let n = phases.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            acc += overlap(j, k) * Complex64::from_polar(1.0, phases[j] - phases[k]);
        }
    }
    acc.re / (n * n) as f64
}

/// Hamming-distance overlap law of per-qubit rotations.
pub fn rotation_overlap(theta: f64) -> impl Fn(usize, usize) -> Complex64 {
    move |j, k| Complex64::new((theta / 2.0).cos().powi((j ^ k).count_ones() as i32), 0.0)
}

/// A unitary whose first column is the unit vector `v` (Gram-Schmidt
/// completion against the standard basis).
pub fn unitary_with_first_column(v: &[Complex64]) -> CMatrix {
    let dim = v.len();
    let mut cols: Vec<Vec<Complex64>> = vec![v.to_vec()];
    for e in 0..dim {
        if cols.len() == dim {
            break;
        }
        let mut w: Vec<Complex64> = (0..dim)
            .map(|i| Complex64::new(if i == e { 1.0 } else { 0.0 }, 0.0))
            .collect();
        for c in &cols {
            let proj: Complex64 = (0..dim).map(|i| c[i].conj() * w[i]).sum();
            for i in 0..dim {
                w[i] -= proj * c[i];
            }
        }
        let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(w.iter().map(|x| x / norm).collect());
        }
    }
    let mut m = CMatrix::zeros(dim);
    for (c, col) in cols.iter().enumerate() {
        for (r, x) in col.iter().enumerate() {
            m[(r, c)] = *x;
        }
    }
    m
}

/// Detector unitaries whose states all overlap pairwise with the same real
/// value `c`: the Cholesky rows of `(1 - c) I + c J` completed to unitaries.
pub fn equal_overlap_family(paths: usize, c: f64) -> Vec<CMatrix> {
    let n = paths;
    let gram = |j: usize, k: usize| if j == k { 1.0 } else { c };
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            l[i][j] = if i == j {
                (gram(i, i) - s).sqrt()
            } else {
                (gram(i, j) - s) / l[j][j]
            };
        }
    }
    (0..n)
        .map(|j| {
            let v: Vec<Complex64> = l[j].iter().map(|x| Complex64::new(*x, 0.0)).collect();
            unitary_with_first_column(&v)
        })
        .collect()
}

/// `U_0 = I`, `U_j` Haar-random on `qubits` detector qubits.
pub fn haar_family(paths: usize, qubits: usize, seed: u64) -> Vec<CMatrix> {
    let mut r = rng(seed);
    let dim = 1 << qubits;
    std::iter::once(CMatrix::identity(dim))
        .chain((1..paths).map(|_| CMatrix::haar_random(dim, &mut r)))
        .collect()
}

/// Two-path family with a complex overlap `i cos(theta/2)`.
pub fn complex_two_path(theta: f64) -> Vec<CMatrix> {
    let phase = CMatrix::diagonal(&[Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)]);
    vec![
        CMatrix::identity(2),
        phase.matmul(&CMatrix::rotation(theta)),
    ]
}

pub fn proptest_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}
