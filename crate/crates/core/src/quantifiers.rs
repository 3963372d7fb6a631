//! Shot-free which-path and visibility quantifiers.
//!
//! Everything here derives from the overlap matrix
//! `O[j][k] = <0|U_k^dagger U_j|0>`, which is `N` times the reduced particle
//! state `rho_p` after the which-path stage.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::circuit::{detector_unitaries, InterferometerSpec};
use crate::error::{Error, Result};
use crate::math::{abs, atan2, sqrt};
use crate::statevec::{rng_from_seed, CMatrix, MixedState};

/// Radicands in `[-RADICAND_TOL, 0)` are float noise and clamp to zero.
pub const RADICAND_TOL: f64 = 1e-10;
/// Imaginary parts below this count as real overlaps.
pub const REAL_TOL: f64 = 1e-10;

pub(crate) fn clamped_sqrt(radicand: f64) -> Result<f64> {
    if radicand < -RADICAND_TOL {
        return Err(Error::NegativeRadicand(radicand));
    }
    Ok(sqrt(radicand.max(0.0)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapMatrix {
    paths: usize,
    entries: Vec<Complex64>,
}

impl OverlapMatrix {
    /// Overlaps of the detector states `U_j|0>`.
    pub fn from_unitaries(unitaries: &[CMatrix]) -> Result<Self> {
        let paths = unitaries.len();
        if paths < 2 {
            return Err(Error::PathCount(paths));
        }
        let dim = unitaries[0].dim();
        for u in unitaries {
            if u.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: u.dim(),
                });
            }
            let dev = u.unitarity_deviation();
            if dev >= crate::statevec::UNITARITY_TOL {
                return Err(Error::NotUnitary(dev));
            }
        }
        let mut entries = vec![Complex64::new(0.0, 0.0); paths * paths];
        for j in 0..paths {
            for k in 0..paths {
                entries[j * paths + k] = (0..dim)
                    .map(|r| unitaries[k][(r, 0)].conj() * unitaries[j][(r, 0)])
                    .sum();
            }
        }
        Self::from_entries(paths, entries)
    }

    pub fn from_spec(spec: &InterferometerSpec) -> Result<Self> {
        Self::from_unitaries(&detector_unitaries(spec))
    }

    /// Row-major `N x N` entries, validated: unit diagonal, Hermitian,
    /// moduli at most one, positive semidefinite.
    pub fn from_entries(paths: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != paths * paths {
            return Err(Error::Dimension {
                expected: paths * paths,
                found: entries.len(),
            });
        }
        if paths < 2 || !paths.is_power_of_two() {
            return Err(Error::PathCount(paths));
        }
        let o = Self { paths, entries };
        for j in 0..paths {
            if (o.get(j, j) - 1.0).norm() > 1e-12 {
                return Err(Error::InvalidOverlap("diagonal entry differs from 1"));
            }
            for k in 0..paths {
                if (o.get(k, j) - o.get(j, k).conj()).norm() > 1e-12 {
                    return Err(Error::InvalidOverlap("matrix is not Hermitian"));
                }
                if o.get(j, k).norm() > 1.0 + 1e-12 {
                    return Err(Error::InvalidOverlap("overlap modulus exceeds 1"));
                }
            }
        }
        if o.reduced_state_unchecked().min_eigenvalue() < -RADICAND_TOL {
            return Err(Error::InvalidOverlap("matrix is not positive semidefinite"));
        }
        Ok(o)
    }

    pub fn paths(&self) -> usize {
        self.paths
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries[j * self.paths + k]
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.entries.iter().all(|v| abs(v.im) <= tol)
    }

    fn off_diagonal(&self) -> impl Iterator<Item = Complex64> + '_ {
        let n = self.paths;
        (0..n)
            .flat_map(move |j| (0..n).filter(move |&k| k != j).map(move |k| (j, k)))
            .map(move |(j, k)| self.get(j, k))
    }

    fn reduced_state_unchecked(&self) -> MixedState {
        let scale = 1.0 / self.paths as f64;
        let data = self.entries.iter().map(|v| v * scale).collect();
        let qubits = self.paths.trailing_zeros() as usize;
        MixedState::from_matrix_unchecked(qubits, data).expect("square")
    }
}

pub fn overlap_matrix(unitaries: &[CMatrix]) -> Result<OverlapMatrix> {
    OverlapMatrix::from_unitaries(unitaries)
}

/// Which-path distinguishability
/// `D = sqrt(1 - sum_{j != k} |O_jk|^2 / (N (N - 1)))`.
pub fn distinguishability(o: &OverlapMatrix) -> Result<f64> {
    let n = o.paths as f64;
    let sum: f64 = o.off_diagonal().map(|v| v.norm_sqr()).sum();
    clamped_sqrt(1.0 - sum / (n * (n - 1.0)))
}

/// `rho_p = O / N`.
pub fn reduced_particle_state(o: &OverlapMatrix) -> MixedState {
    o.reduced_state_unchecked()
}

/// `V_P = sqrt(N/(N-1) sum_{j != k} |rho_jk|^2)`.
pub fn visibility_purity(o: &OverlapMatrix) -> f64 {
    let n = o.paths as f64;
    let sum: f64 = o.off_diagonal().map(|v| v.norm_sqr()).sum::<f64>() / (n * n);
    sqrt(n / (n - 1.0) * sum)
}

/// `V_P` through the purity gap `tr(rho_p^2) - tr(rho_inc^2)`, where
/// `rho_inc` keeps only the diagonal of `rho_p`.
pub fn visibility_purity_from_purities(o: &OverlapMatrix) -> f64 {
    let n = o.paths as f64;
    let rho = reduced_particle_state(o);
    let incoherent: f64 = (0..o.paths).map(|j| rho.get(j, j).norm_sqr()).sum();
    sqrt((n / (n - 1.0) * (rho.purity() - incoherent)).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoherenceMode {
    /// Overlaps are real: `V_C` is attained at `phi = 0`.
    RealOverlaps,
    /// Arbitrary overlaps: certified bounds, optionally a numerical maximum
    /// over the phase torus from a seeded coordinate ascent.
    General { maximize: bool, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMaximum {
    pub value: f64,
    pub phases: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CoherenceVisibility {
    Exact(f64),
    Bounds {
        /// Value at `phi = 0`.
        lower: f64,
        /// Normalized l1 coherence `sum_{j != k} |rho_jk| / (N - 1)`.
        upper: f64,
        maximum: Option<PhaseMaximum>,
    },
}

impl CoherenceVisibility {
    /// Best available point value: exact, maximized, or the lower bound.
    pub fn value(&self) -> f64 {
        match self {
            CoherenceVisibility::Exact(v) => *v,
            CoherenceVisibility::Bounds {
                maximum: Some(m), ..
            } => m.value,
            CoherenceVisibility::Bounds { lower, .. } => *lower,
        }
    }
}

/// `sum_{j != k} rho_jk exp(i (phi_j - phi_k))`; real because rho is Hermitian.
fn phased_coherence(o: &OverlapMatrix, phases: &[f64]) -> f64 {
    let n = o.paths;
    let w: Vec<Complex64> = phases
        .iter()
        .map(|&p| Complex64::from_polar(1.0, p))
        .collect();
    let mut acc = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j != k {
                acc += (o.get(j, k) * w[j] * w[k].conj()).re;
            }
        }
    }
    acc / n as f64
}

pub const COHERENCE_RESTARTS: usize = 8;
pub const COHERENCE_TOL: f64 = 1e-8;

/// Maximizes `|sum_{j != k} rho_jk exp(i(phi_j - phi_k))| / (N - 1)` over
/// phases by exact coordinate updates. The first restart starts at
/// `phi = 0`; the others at seeded uniform phases. Both signs of the (real)
/// sum are pushed to their extreme from every start.
pub fn maximize_coherence_visibility(
    o: &OverlapMatrix,
    restarts: usize,
    tol: f64,
    seed: u64,
) -> PhaseMaximum {
    let n = o.paths;
    let norm = (n - 1) as f64;
    let mut rng = rng_from_seed(seed);
    let mut best = PhaseMaximum {
        value: abs(phased_coherence(o, &vec![0.0; n])) / norm,
        phases: vec![0.0; n],
    };
    for restart in 0..restarts.max(1) {
        let start: Vec<f64> = if restart == 0 {
            vec![0.0; n]
        } else {
            (0..n).map(|_| rng.random::<f64>() * 2.0 * PI).collect()
        };
        for sign in [1.0, -1.0] {
            let mut phases = start.clone();
            let mut current = sign * phased_coherence(o, &phases);
            for _sweep in 0..10_000 {
                for j in 0..n {
                    // Terms involving phi_j: 2 Re(exp(i phi_j) g_j) / N.
                    let g: Complex64 = (0..n)
                        .filter(|&k| k != j)
                        .map(|k| o.get(j, k) * Complex64::from_polar(1.0, -phases[k]))
                        .sum();
                    let arg = atan2(g.im, g.re);
                    phases[j] = if sign > 0.0 { -arg } else { PI - arg };
                }
                let next = sign * phased_coherence(o, &phases);
                let gain = next - current;
                current = next;
                if gain <= tol {
                    break;
                }
            }
            let value = abs(current) / norm;
            if value > best.value {
                best = PhaseMaximum {
                    value,
                    phases: phases.clone(),
                };
            }
        }
    }
    best
}

pub fn visibility_coherence(o: &OverlapMatrix, mode: CoherenceMode) -> Result<CoherenceVisibility> {
    let norm = (o.paths - 1) as f64;
    let at_zero = abs(phased_coherence(o, &vec![0.0; o.paths])) / norm;
    match mode {
        CoherenceMode::RealOverlaps => {
            if !o.is_real(REAL_TOL) {
                return Err(Error::InvalidOverlap("overlaps are not real"));
            }
            Ok(CoherenceVisibility::Exact(at_zero))
        }
        CoherenceMode::General { maximize, seed } => {
            let n = o.paths as f64;
            let upper = o.off_diagonal().map(|v| v.norm()).sum::<f64>() / (n * norm);
            let maximum = maximize.then(|| {
                let mut m =
                    maximize_coherence_visibility(o, COHERENCE_RESTARTS, COHERENCE_TOL, seed);
                m.value = m.value.min(upper);
                m
            });
            Ok(CoherenceVisibility::Bounds {
                lower: at_zero,
                upper,
                maximum,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    /// Closed form from the overlap matrix.
    Analytic,
    /// Numerical maximization over phases (general complex overlaps).
    Maximized,
    /// Measured; one-sigma statistical uncertainty.
    Estimated { std_error: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub method: Method,
}

impl Quantity {
    pub fn analytic(value: f64) -> Self {
        Self {
            value,
            method: Method::Analytic,
        }
    }

    pub fn estimated(value: f64, std_error: f64) -> Self {
        Self {
            value,
            method: Method::Estimated { std_error },
        }
    }

    pub fn std_error(&self) -> Option<f64> {
        match self.method {
            Method::Estimated { std_error } => Some(std_error),
            _ => None,
        }
    }
}

/// `D`, `V_C`, `V_P` with the residuals of the duality relation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualityReport {
    pub distinguishability: Quantity,
    pub visibility_coherence: Quantity,
    pub visibility_purity: Quantity,
    /// `D^2 + V_P^2 - 1`.
    pub residual_equality: f64,
    /// `D^2 + V_C^2 - 1`.
    pub residual_inequality: f64,
}

impl DualityReport {
    pub fn new(d: Quantity, v_c: Quantity, v_p: Quantity) -> Self {
        Self {
            distinguishability: d,
            visibility_coherence: v_c,
            visibility_purity: v_p,
            residual_equality: d.value * d.value + v_p.value * v_p.value - 1.0,
            residual_inequality: d.value * d.value + v_c.value * v_c.value - 1.0,
        }
    }

    /// `V_C <= V_P + tol`.
    pub fn hierarchy_holds(&self, tol: f64) -> bool {
        self.visibility_coherence.value <= self.visibility_purity.value + tol
    }
}

pub const DUALITY_TOL: f64 = 1e-10;

/// Analytic report. Real overlaps give `V_C` exactly; otherwise it is the
/// numerical maximum over phases.
pub fn duality_check(o: &OverlapMatrix) -> Result<DualityReport> {
    let d = distinguishability(o)?;
    let v_p = visibility_purity(o);
    let v_c = if o.is_real(REAL_TOL) {
        Quantity::analytic(visibility_coherence(o, CoherenceMode::RealOverlaps)?.value())
    } else {
        let v = visibility_coherence(
            o,
            CoherenceMode::General {
                maximize: true,
                seed: 0,
            },
        )?;
        Quantity {
            value: v.value(),
            method: Method::Maximized,
        }
    };
    let report = DualityReport::new(Quantity::analytic(d), v_c, Quantity::analytic(v_p));
    if abs(report.residual_equality) > DUALITY_TOL {
        return Err(Error::Invalid("D^2 + V_P^2 deviates from 1"));
    }
    if !report.hierarchy_holds(DUALITY_TOL) {
        return Err(Error::Invalid("V_C exceeds V_P"));
    }
    Ok(report)
}
