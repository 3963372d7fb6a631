//! Desk-scale simulation of wave-particle duality in `N`-path interferometers.
//!
//! An `N = 2^n` path interferometer is mapped onto `2n` qubits: a particle
//! register whose basis state `|j>` is the particle taking path `j`, and a
//! which-path detector register that picks up `U_j|0>` when the particle
//! travels through path `j`.
//!
//! The crate is split along the lines of the experiment:
//!
//! * [`statevec`]: pure and density-matrix backends, gate kernels, partial
//!   traces and seeded multinomial shot sampling.
//! * [`circuit`]: the interferometer circuits (beam-splitter layers, which-path
//!   gates, phase layers, detector read-out with `U_k^dagger`).
//! * [`quantifiers`]: shot-free distinguishability `D` and the visibilities
//!   `V_C`, `V_P`, computed from the detector overlap matrix.
//! * [`estimator`]: the measurement protocols that recover `D`, `V_C` and
//!   `V_P` from read-out probabilities or counts, the two-path fringe fit and
//!   a Monte Carlo phase-average oracle.
//! * [`noise`]: the three-parameter imperfection model `(epsilon, T, gamma)`,
//!   model curves and least-squares parameter fitting.
//!
//! Qubit `0` is the least significant bit of a basis index. The particle
//! register occupies qubits `0..n`, the detector register `n..2n`.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. The `parallel` feature fans sweeps out over a rayon pool.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod circuit;
pub mod error;
pub mod estimator;
mod linalg;
mod math;
pub mod noise;
mod par;
pub mod quantifiers;
pub mod statevec;

pub use error::{Error, Result};
pub use num_complex::Complex64;
