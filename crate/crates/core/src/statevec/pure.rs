use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::gate::{GateKind, GateOp};
use super::kernel::{apply_phases, apply_unitary, gather_bits};
use super::mixed::MixedState;
use super::{check_register, DEFAULT_MAX_QUBITS};
use crate::error::{Error, Result};

/// Statevector over `num_qubits` qubits; qubit 0 is the lowest index bit.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// `|0...0>` on `num_qubits` qubits, capped at [`DEFAULT_MAX_QUBITS`].
    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::with_limit(num_qubits, DEFAULT_MAX_QUBITS)
    }

    pub fn with_limit(num_qubits: usize, max_qubits: usize) -> Result<Self> {
        if num_qubits < 1 || num_qubits > max_qubits {
            return Err(Error::QubitCount {
                requested: num_qubits,
                max: max_qubits,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        gate.check_fits(self.num_qubits)?;
        let amps = &mut self.amplitudes;
        match gate.kind() {
            GateKind::Single { target, matrix } => {
                apply_unitary(amps, &[], &[*target], matrix, 0, false)
            }
            GateKind::Controlled {
                control,
                target,
                matrix,
            } => apply_unitary(amps, &[*control], &[*target], matrix, 0, false),
            GateKind::MultiControlled {
                controls,
                targets,
                matrix,
            } => apply_unitary(amps, controls, targets, matrix, 0, false),
            GateKind::DiagonalPhase { qubits, phases } => {
                apply_phases(amps, qubits, phases, 0, 1.0)
            }
        }
        Ok(())
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a GateOp>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.apply(g))
    }

    /// Born-rule distribution of the computational-basis outcome of `register`.
    pub fn outcome_probabilities(&self, register: &[usize]) -> Result<Vec<f64>> {
        check_register(register, self.num_qubits)?;
        let mut probs = vec![0.0; 1 << register.len()];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            probs[gather_bits(idx, register, 0)] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Reduced density matrix on `keep` (in that qubit order).
    pub fn reduced(&self, keep: &[usize]) -> Result<MixedState> {
        check_register(keep, self.num_qubits)?;
        let traced: Vec<usize> = (0..self.num_qubits).filter(|q| !keep.contains(q)).collect();
        let kdim = 1usize << keep.len();
        let mut blocks = vec![vec![Complex64::new(0.0, 0.0); kdim]; 1 << traced.len()];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            blocks[gather_bits(idx, &traced, 0)][gather_bits(idx, keep, 0)] = *a;
        }
        let mut rho = vec![Complex64::new(0.0, 0.0); kdim * kdim];
        for block in &blocks {
            for (r, ar) in block.iter().enumerate() {
                if *ar == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (c, ac) in block.iter().enumerate() {
                    rho[r * kdim + c] += ar * ac.conj();
                }
            }
        }
        MixedState::from_matrix_unchecked(keep.len(), rho)
    }
}
