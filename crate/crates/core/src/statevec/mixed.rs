use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::gate::{GateKind, GateOp};
use super::kernel::{apply_phases, apply_unitary, gather_bits};
use super::matrix::CMatrix;
use super::pure::PureState;
use super::{check_register, DEFAULT_MAX_MIXED_QUBITS};
use crate::error::{Error, Result};

/// Density matrix over `num_qubits` qubits, row-major `2^q x 2^q`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    num_qubits: usize,
    matrix: Vec<Complex64>,
}

impl MixedState {
    /// Product state `(x)_i [(1 - eps_i)|0><0| + eps_i|1><1|]`, qubit `i`
    /// taking `epsilon[i]`.
    pub fn new(num_qubits: usize, epsilon: &[f64]) -> Result<Self> {
        if !(1..=DEFAULT_MAX_MIXED_QUBITS).contains(&num_qubits) {
            return Err(Error::QubitCount {
                requested: num_qubits,
                max: DEFAULT_MAX_MIXED_QUBITS,
            });
        }
        if epsilon.len() != num_qubits {
            return Err(Error::Dimension {
                expected: num_qubits,
                found: epsilon.len(),
            });
        }
        if let Some(&value) = epsilon.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(Error::OutOfRange {
                name: "epsilon",
                value,
            });
        }
        let dim = 1usize << num_qubits;
        let mut matrix = vec![Complex64::new(0.0, 0.0); dim * dim];
        for idx in 0..dim {
            let weight: f64 = epsilon
                .iter()
                .enumerate()
                .map(|(q, e)| if idx >> q & 1 == 1 { *e } else { 1.0 - e })
                .product();
            matrix[idx * dim + idx] = Complex64::new(weight, 0.0);
        }
        Ok(Self { num_qubits, matrix })
    }

    pub fn from_pure(state: &PureState) -> Self {
        let amps = state.amplitudes();
        let dim = amps.len();
        let mut matrix = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (r, ar) in amps.iter().enumerate() {
            for (c, ac) in amps.iter().enumerate() {
                matrix[r * dim + c] = ar * ac.conj();
            }
        }
        Self {
            num_qubits: state.num_qubits(),
            matrix,
        }
    }

    /// Wraps a matrix after checking the density-matrix invariants
    /// (Hermitian, unit trace, no eigenvalue below `-1e-10`).
    pub fn from_matrix(num_qubits: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.dim() != 1 << num_qubits {
            return Err(Error::Dimension {
                expected: 1 << num_qubits,
                found: matrix.dim(),
            });
        }
        let state = Self {
            num_qubits,
            matrix: matrix.as_slice().to_vec(),
        };
        if state.hermiticity_deviation() > 1e-12 {
            return Err(Error::Invalid("density matrix is not Hermitian"));
        }
        if (state.trace() - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid("density matrix trace differs from 1"));
        }
        if state.min_eigenvalue() < -1e-10 {
            return Err(Error::Invalid("density matrix has a negative eigenvalue"));
        }
        Ok(state)
    }

    pub(crate) fn from_matrix_unchecked(num_qubits: usize, matrix: Vec<Complex64>) -> Result<Self> {
        debug_assert_eq!(matrix.len(), 1 << (2 * num_qubits));
        Ok(Self { num_qubits, matrix })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim() + col]
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_row_major(self.dim(), self.matrix.clone()).expect("square")
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i).re).sum()
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        // rho is Hermitian, so tr(rho^2) = sum |rho_rc|^2.
        self.matrix.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0_f64;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue, from a Jacobi sweep on the real symmetric
    /// `2d x 2d` embedding `[[Re, -Im], [Im, Re]]` of the Hermitian matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let n = 2 * d;
        let mut a = vec![0.0; n * n];
        for r in 0..d {
            for c in 0..d {
                let v = self.get(r, c);
                a[r * n + c] = v.re;
                a[(r + d) * n + (c + d)] = v.re;
                a[r * n + (c + d)] = -v.im;
                a[(r + d) * n + c] = v.im;
            }
        }
        jacobi_eigenvalues(&mut a, n)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        gate.check_fits(self.num_qubits)?;
        let q = self.num_qubits;
        let m = &mut self.matrix;
        match gate.kind() {
            GateKind::Single { target, matrix } => {
                apply_unitary(m, &[], &[*target], matrix, q, false);
                apply_unitary(m, &[], &[*target], matrix, 0, true);
            }
            GateKind::Controlled {
                control,
                target,
                matrix,
            } => {
                apply_unitary(m, &[*control], &[*target], matrix, q, false);
                apply_unitary(m, &[*control], &[*target], matrix, 0, true);
            }
            GateKind::MultiControlled {
                controls,
                targets,
                matrix,
            } => {
                apply_unitary(m, controls, targets, matrix, q, false);
                apply_unitary(m, controls, targets, matrix, 0, true);
            }
            GateKind::DiagonalPhase { qubits, phases } => {
                apply_phases(m, qubits, phases, q, 1.0);
                apply_phases(m, qubits, phases, 0, -1.0);
            }
        }
        Ok(())
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a GateOp>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.apply(g))
    }

    pub fn outcome_probabilities(&self, register: &[usize]) -> Result<Vec<f64>> {
        check_register(register, self.num_qubits)?;
        let mut probs = vec![0.0; 1 << register.len()];
        for idx in 0..self.dim() {
            probs[gather_bits(idx, register, 0)] += self.get(idx, idx).re;
        }
        Ok(probs)
    }

    /// Reduced state on `keep`; kept qubit `keep[i]` becomes qubit `i`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<MixedState> {
        check_register(keep, self.num_qubits)?;
        let dim = self.dim();
        let kdim = 1usize << keep.len();
        let traced: Vec<usize> = (0..self.num_qubits).filter(|q| !keep.contains(q)).collect();
        // Embedding of kept / traced sub-indices back into full indices.
        let scatter = |sub: usize, qubits: &[usize]| {
            qubits
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &q)| acc | ((sub >> i) & 1) << q)
        };
        let kept_idx: Vec<usize> = (0..kdim).map(|s| scatter(s, keep)).collect();
        let traced_idx: Vec<usize> = (0..1usize << traced.len())
            .map(|s| scatter(s, &traced))
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); kdim * kdim];
        for (r, kr) in kept_idx.iter().enumerate() {
            for (c, kc) in kept_idx.iter().enumerate() {
                out[r * kdim + c] = traced_idx
                    .iter()
                    .map(|t| self.matrix[(kr | t) * dim + (kc | t)])
                    .sum();
            }
        }
        Ok(MixedState {
            num_qubits: keep.len(),
            matrix: out,
        })
    }

    /// `self (x) rhs` with `rhs` on the low qubits.
    pub fn tensor(&self, low: &MixedState) -> MixedState {
        let m = self.to_matrix().kron(&low.to_matrix());
        MixedState {
            num_qubits: self.num_qubits + low.num_qubits,
            matrix: m.as_slice().to_vec(),
        }
    }
}

/// Cyclic Jacobi eigenvalue iteration for a symmetric row-major matrix.
fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    use crate::math::{abs, sqrt};
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if abs(apq) < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (abs(theta) + sqrt(theta * theta + 1.0));
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}
