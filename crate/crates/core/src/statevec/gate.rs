use alloc::vec::Vec;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Condition on a control qubit: `true` fires on `|1>` (filled circle),
/// `false` on `|0>` (open circle).
pub type Control = (usize, bool);

/// The shape of a gate. Only constructible through [`GateOp`], which checks
/// unitarity and index distinctness up front.
#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    Single {
        target: usize,
        matrix: CMatrix,
    },
    Controlled {
        control: Control,
        target: usize,
        matrix: CMatrix,
    },
    /// Unitary on `targets` (the first target is the least significant bit
    /// of the matrix index), applied when every control matches.
    MultiControlled {
        controls: Vec<Control>,
        targets: Vec<usize>,
        matrix: CMatrix,
    },
    /// `|s> -> exp(i phases[s]) |s>` where `s` is read from `qubits`
    /// (first qubit least significant). Phases in radians.
    DiagonalPhase {
        qubits: Vec<usize>,
        phases: Vec<f64>,
    },
}

/// One validated circuit element.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    kind: GateKind,
}

fn check_unitary(matrix: &CMatrix, dim: usize) -> Result<()> {
    if matrix.dim() != dim {
        return Err(Error::Dimension {
            expected: dim,
            found: matrix.dim(),
        });
    }
    let dev = matrix.unitarity_deviation();
    if dev >= super::matrix::UNITARITY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    Ok(())
}

fn check_distinct(indices: &[usize]) -> Result<()> {
    for (i, a) in indices.iter().enumerate() {
        if indices[..i].contains(a) {
            return Err(Error::DuplicateQubit(*a));
        }
    }
    Ok(())
}

impl GateOp {
    pub fn single(target: usize, matrix: CMatrix) -> Result<Self> {
        check_unitary(&matrix, 2)?;
        Ok(Self {
            kind: GateKind::Single { target, matrix },
        })
    }

    pub fn controlled(control: Control, target: usize, matrix: CMatrix) -> Result<Self> {
        check_unitary(&matrix, 2)?;
        check_distinct(&[control.0, target])?;
        Ok(Self {
            kind: GateKind::Controlled {
                control,
                target,
                matrix,
            },
        })
    }

    pub fn multi_controlled(
        controls: Vec<Control>,
        targets: Vec<usize>,
        matrix: CMatrix,
    ) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::EmptyQubitList);
        }
        check_unitary(&matrix, 1 << targets.len())?;
        let all: Vec<usize> = controls
            .iter()
            .map(|c| c.0)
            .chain(targets.iter().copied())
            .collect();
        check_distinct(&all)?;
        Ok(Self {
            kind: GateKind::MultiControlled {
                controls,
                targets,
                matrix,
            },
        })
    }

    pub fn diagonal_phase(qubits: Vec<usize>, phases: Vec<f64>) -> Result<Self> {
        if qubits.is_empty() {
            return Err(Error::EmptyQubitList);
        }
        check_distinct(&qubits)?;
        if phases.len() != 1 << qubits.len() {
            return Err(Error::Dimension {
                expected: 1 << qubits.len(),
                found: phases.len(),
            });
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::Invalid("phase must be finite"));
        }
        Ok(Self {
            kind: GateKind::DiagonalPhase { qubits, phases },
        })
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    /// Every qubit index the gate touches.
    pub fn qubits(&self) -> Vec<usize> {
        match &self.kind {
            GateKind::Single { target, .. } => alloc::vec![*target],
            GateKind::Controlled {
                control, target, ..
            } => alloc::vec![control.0, *target],
            GateKind::MultiControlled {
                controls, targets, ..
            } => controls
                .iter()
                .map(|c| c.0)
                .chain(targets.iter().copied())
                .collect(),
            GateKind::DiagonalPhase { qubits, .. } => qubits.clone(),
        }
    }

    pub(crate) fn check_fits(&self, num_qubits: usize) -> Result<()> {
        match self.qubits().into_iter().find(|&q| q >= num_qubits) {
            Some(index) => Err(Error::QubitOutOfRange { index, num_qubits }),
            None => Ok(()),
        }
    }

    /// The same gate with every qubit index `q` replaced by `map(q)`.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Result<Self> {
        let kind = match &self.kind {
            GateKind::Single { target, matrix } => GateKind::Single {
                target: map(*target),
                matrix: matrix.clone(),
            },
            GateKind::Controlled {
                control,
                target,
                matrix,
            } => GateKind::Controlled {
                control: (map(control.0), control.1),
                target: map(*target),
                matrix: matrix.clone(),
            },
            GateKind::MultiControlled {
                controls,
                targets,
                matrix,
            } => GateKind::MultiControlled {
                controls: controls.iter().map(|&(q, p)| (map(q), p)).collect(),
                targets: targets.iter().map(|&q| map(q)).collect(),
                matrix: matrix.clone(),
            },
            GateKind::DiagonalPhase { qubits, phases } => GateKind::DiagonalPhase {
                qubits: qubits.iter().map(|&q| map(q)).collect(),
                phases: phases.clone(),
            },
        };
        let out = Self { kind };
        check_distinct(&out.qubits())?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_unitary() {
        let m = CMatrix::from_real(2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(GateOp::single(0, m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn rejects_shared_control_and_target() {
        let err = GateOp::controlled((1, true), 1, CMatrix::hadamard()).unwrap_err();
        assert_eq!(err, Error::DuplicateQubit(1));
    }

    #[test]
    fn rejects_wrong_subsystem_dimension() {
        let err = GateOp::multi_controlled(vec![], vec![0, 1], CMatrix::hadamard()).unwrap_err();
        assert_eq!(
            err,
            Error::Dimension {
                expected: 4,
                found: 2
            }
        );
    }

    #[test]
    fn phase_vector_length_checked() {
        assert!(GateOp::diagonal_phase(vec![0, 1], vec![0.0, 1.0]).is_err());
        assert!(GateOp::diagonal_phase(vec![0], vec![0.0, core::f64::consts::PI]).is_ok());
    }

    #[test]
    fn fits_reports_offending_index() {
        let g = GateOp::diagonal_phase(vec![3], vec![0.0, 1.0]).unwrap();
        assert_eq!(
            g.check_fits(2),
            Err(Error::QubitOutOfRange {
                index: 3,
                num_qubits: 2
            })
        );
    }
}
