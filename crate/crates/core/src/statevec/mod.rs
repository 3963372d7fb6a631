//! Pure-state and density-matrix backends.
//!
//! Both share the bit kernels in `kernel`: gates are applied in place by a
//! strided walk over the amplitude array, never by building the full
//! `2^q x 2^q` operator.

mod gate;
mod kernel;
mod matrix;
mod mixed;
mod pure;
mod sampling;

pub use gate::{Control, GateKind, GateOp};
pub use matrix::{CMatrix, UNITARITY_TOL};
pub use mixed::MixedState;
pub use pure::PureState;
pub use sampling::{rng_from_seed, sample_counts, sample_counts_with, SimRng};

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default qubit cap for [`init_pure`].
pub const DEFAULT_MAX_QUBITS: usize = 16;
/// Density matrices hold `4^q` entries; 10 qubits is 16 MiB of amplitudes.
pub const DEFAULT_MAX_MIXED_QUBITS: usize = 10;

pub(crate) fn check_register(register: &[usize], num_qubits: usize) -> Result<()> {
    if register.is_empty() {
        return Err(Error::EmptyQubitList);
    }
    for (i, &q) in register.iter().enumerate() {
        if q >= num_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                num_qubits,
            });
        }
        if register[..i].contains(&q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    Ok(())
}

pub fn init_pure(num_qubits: usize) -> Result<PureState> {
    PureState::new(num_qubits)
}

pub fn init_mixed(num_qubits: usize, epsilon: &[f64]) -> Result<MixedState> {
    MixedState::new(num_qubits, epsilon)
}

/// A state of either kind, so circuits can run on whichever backend the
/// noise setting calls for.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(MixedState),
}

impl State {
    pub fn num_qubits(&self) -> usize {
        match self {
            State::Pure(s) => s.num_qubits(),
            State::Mixed(s) => s.num_qubits(),
        }
    }

    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        match self {
            State::Pure(s) => s.apply(gate),
            State::Mixed(s) => s.apply(gate),
        }
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a GateOp>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.apply(g))
    }

    pub fn outcome_probabilities(&self, register: &[usize]) -> Result<Vec<f64>> {
        match self {
            State::Pure(s) => s.outcome_probabilities(register),
            State::Mixed(s) => s.outcome_probabilities(register),
        }
    }

    /// Reduced density matrix on `keep`.
    pub fn reduced(&self, keep: &[usize]) -> Result<MixedState> {
        match self {
            State::Pure(s) => s.reduced(keep),
            State::Mixed(s) => s.partial_trace(keep),
        }
    }
}

pub fn apply_gate(state: &mut State, gate: &GateOp) -> Result<()> {
    state.apply(gate)
}

pub fn partial_trace(state: &MixedState, keep: &[usize]) -> Result<MixedState> {
    state.partial_trace(keep)
}

pub fn outcome_probabilities(state: &State, register: &[usize]) -> Result<Vec<f64>> {
    state.outcome_probabilities(register)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_1_SQRT_2, PI};
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn init_pure_is_all_zero_ket() {
        assert_eq!(init_pure(1).unwrap().amplitudes(), &[c(1.0), c(0.0)]);
        assert_eq!(
            init_pure(2).unwrap().amplitudes(),
            &[c(1.0), c(0.0), c(0.0), c(0.0)]
        );
        assert!((init_pure(4).unwrap().norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn init_pure_rejects_bad_sizes() {
        assert!(matches!(init_pure(0), Err(Error::QubitCount { .. })));
        assert!(matches!(init_pure(17), Err(Error::QubitCount { .. })));
        assert!(PureState::with_limit(17, 20).is_ok());
    }

    #[test]
    fn init_mixed_tensor_products() {
        let m = init_mixed(1, &[0.0]).unwrap();
        assert_eq!((m.get(0, 0).re, m.get(1, 1).re), (1.0, 0.0));
        let m = init_mixed(1, &[0.5]).unwrap();
        assert_eq!((m.get(0, 0).re, m.get(1, 1).re), (0.5, 0.5));
        // Qubit 0 takes 0.1, qubit 1 takes 0.2; index = b1 b0.
        let m = init_mixed(2, &[0.1, 0.2]).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m.get(i, i).re).collect();
        for (got, want) in diag.iter().zip([0.72, 0.08, 0.18, 0.02]) {
            assert!((got - want).abs() < 1e-15, "{diag:?}");
        }
    }

    #[test]
    fn init_mixed_rejects_out_of_range_epsilon() {
        assert!(matches!(
            init_mixed(1, &[1.5]),
            Err(Error::OutOfRange { .. })
        ));
        assert!(init_mixed(1, &[-0.1]).is_err());
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = init_pure(1).unwrap();
        s.apply(&GateOp::single(0, CMatrix::hadamard()).unwrap())
            .unwrap();
        for a in s.amplitudes() {
            assert!((a - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        }
    }

    #[test]
    fn controlled_pi_rotation_on_particle_one() {
        // |10> in the (detector, particle) = (q1, q0) layout is index 1.
        let mut s = init_pure(2).unwrap();
        let x = CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        s.apply(&GateOp::single(0, x).unwrap()).unwrap();
        s.apply(&GateOp::controlled((0, true), 1, CMatrix::rotation(PI)).unwrap())
            .unwrap();
        let a = s.amplitudes();
        // R_pi|0> = |1>: all weight moves to index 3 (both qubits set).
        assert!(a[1].norm() < 1e-15);
        assert!((a[3] - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn controlled_gate_respects_open_polarity() {
        let mut s = init_pure(2).unwrap();
        s.apply(&GateOp::controlled((0, false), 1, CMatrix::rotation(PI)).unwrap())
            .unwrap();
        assert!((s.amplitudes()[2] - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_phase_flips_one() {
        let mut s = init_pure(1).unwrap();
        s.apply(&GateOp::single(0, CMatrix::hadamard()).unwrap())
            .unwrap();
        s.apply(&GateOp::diagonal_phase(vec![0], vec![0.0, PI]).unwrap())
            .unwrap();
        assert!((s.amplitudes()[0] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(-FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn gate_out_of_range_is_rejected() {
        let mut s = init_pure(2).unwrap();
        let g = GateOp::single(2, CMatrix::hadamard()).unwrap();
        assert_eq!(
            s.apply(&g),
            Err(Error::QubitOutOfRange {
                index: 2,
                num_qubits: 2
            })
        );
    }

    fn bell() -> PureState {
        let mut s = init_pure(2).unwrap();
        s.apply(&GateOp::single(0, CMatrix::hadamard()).unwrap())
            .unwrap();
        let x = CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        s.apply(&GateOp::controlled((0, true), 1, x).unwrap())
            .unwrap();
        s
    }

    #[test]
    fn partial_trace_of_product_and_bell() {
        let zero = MixedState::from_pure(&init_pure(2).unwrap());
        let r = zero.partial_trace(&[0]).unwrap();
        assert_eq!(r.get(0, 0), c(1.0));
        assert_eq!(r.get(1, 1), c(0.0));

        let rho = MixedState::from_pure(&bell());
        for keep in [0, 1] {
            let r = rho.partial_trace(&[keep]).unwrap();
            assert!((r.get(0, 0).re - 0.5).abs() < 1e-15);
            assert!((r.get(1, 1).re - 0.5).abs() < 1e-15);
            assert!(r.get(0, 1).norm() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_keep_lists() {
        let rho = MixedState::from_pure(&bell());
        assert_eq!(rho.partial_trace(&[]), Err(Error::EmptyQubitList));
        assert_eq!(rho.partial_trace(&[0, 0]), Err(Error::DuplicateQubit(0)));
    }

    #[test]
    fn pure_reduction_matches_mixed_partial_trace() {
        let s = bell();
        let a = s.reduced(&[1]).unwrap();
        let b = MixedState::from_pure(&s).partial_trace(&[1]).unwrap();
        assert!(a.to_matrix().max_abs_diff(&b.to_matrix()) < 1e-15);
    }

    #[test]
    fn outcome_probabilities_basic() {
        let s = State::Pure(init_pure(1).unwrap());
        assert_eq!(s.outcome_probabilities(&[0]).unwrap(), vec![1.0, 0.0]);
        let mut h = init_pure(1).unwrap();
        h.apply(&GateOp::single(0, CMatrix::hadamard()).unwrap())
            .unwrap();
        let p = h.outcome_probabilities(&[0]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn from_matrix_checks_invariants() {
        let bad = CMatrix::from_real(2, &[0.6, 0.0, 0.0, 0.6]).unwrap();
        assert!(MixedState::from_matrix(1, bad).is_err());
        let neg = CMatrix::from_real(2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(MixedState::from_matrix(1, neg).is_err());
        let ok = CMatrix::from_real(2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!(MixedState::from_matrix(1, ok).is_ok());
    }
}
