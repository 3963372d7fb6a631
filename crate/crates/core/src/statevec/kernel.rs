//! In-place gate kernels over a flat amplitude array.
//!
//! A density matrix of `q` qubits is handed to the same kernels as a
//! `2q`-qubit vector: entry `(r, c)` lives at `r << q | c`, so row qubit `i`
//! is bit `q + i` and column qubit `i` is bit `i`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::gate::Control;
use super::matrix::CMatrix;
use crate::math::{cos, sin};

fn control_pattern(controls: &[Control], shift: usize) -> (usize, usize) {
    controls.iter().fold((0, 0), |(mask, value), &(q, on)| {
        let bit = 1 << (q + shift);
        (mask | bit, if on { value | bit } else { value })
    })
}

/// Applies `u` (or its entrywise conjugate) to the qubits `targets + shift`.
pub(crate) fn apply_unitary(
    amps: &mut [Complex64],
    controls: &[Control],
    targets: &[usize],
    u: &CMatrix,
    shift: usize,
    conjugate: bool,
) {
    let (ctrl_mask, ctrl_value) = control_pattern(controls, shift);
    if targets.len() == 1 {
        let bit = 1usize << (targets[0] + shift);
        let m = |r, c| {
            let v: Complex64 = u[(r, c)];
            if conjugate {
                v.conj()
            } else {
                v
            }
        };
        let (m00, m01, m10, m11) = (m(0, 0), m(0, 1), m(1, 0), m(1, 1));
        for i0 in 0..amps.len() {
            if i0 & bit != 0 || i0 & ctrl_mask != ctrl_value {
                continue;
            }
            let i1 = i0 | bit;
            let (a0, a1) = (amps[i0], amps[i1]);
            amps[i0] = m00 * a0 + m01 * a1;
            amps[i1] = m10 * a0 + m11 * a1;
        }
        return;
    }

    let sub = 1usize << targets.len();
    let offsets: Vec<usize> = (0..sub)
        .map(|s| {
            targets
                .iter()
                .enumerate()
                .filter(|(i, _)| s >> i & 1 == 1)
                .fold(0, |acc, (_, &q)| acc | 1 << (q + shift))
        })
        .collect();
    let target_mask = offsets[sub - 1];
    let mut input = vec![Complex64::new(0.0, 0.0); sub];
    for base in 0..amps.len() {
        if base & target_mask != 0 || base & ctrl_mask != ctrl_value {
            continue;
        }
        for (s, off) in offsets.iter().enumerate() {
            input[s] = amps[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, a) in input.iter().enumerate() {
                let v = u[(r, c)];
                acc += if conjugate { v.conj() } else { v } * a;
            }
            amps[base | off] = acc;
        }
    }
}

/// Reads the sub-index formed by `qubits + shift` (first qubit lowest).
#[inline]
pub(crate) fn gather_bits(index: usize, qubits: &[usize], shift: usize) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &q)| acc | ((index >> (q + shift)) & 1) << i)
}

/// Multiplies every amplitude by `exp(sign * i * phases[s])`.
pub(crate) fn apply_phases(
    amps: &mut [Complex64],
    qubits: &[usize],
    phases: &[f64],
    shift: usize,
    sign: f64,
) {
    let factors: Vec<Complex64> = phases
        .iter()
        .map(|&p| Complex64::new(cos(p), sign * sin(p)))
        .collect();
    for (idx, a) in amps.iter_mut().enumerate() {
        *a *= factors[gather_bits(idx, qubits, shift)];
    }
}
