//! Interferometer circuits on a `2n`-qubit register.
//!
//! Layout: particle qubits `0..n`, detector qubits `n..2n`. A particle in
//! basis state `|j>` has taken path `j`.
//!
//! Stages, in order:
//! 1. beam splitter: a Hadamard on every particle qubit;
//! 2. which-path acquisition: `U_j` on the detector when the particle is in `|j>`;
//! 3. read-out, one of
//!    * particle: phase layer `|j> -> exp(i phi_j)|j>`, recombining Hadamard
//!      layer, measurement of the particle register;
//!    * detector (`k`): `U_k^dagger` on the detector register, measurement of
//!      the detector register.
//!
//! Stages 1 and 2 are shared, so sweeps over many read-out settings can
//! simulate them once ([`PositionTwo`]) and finish each setting on the
//! reduced state of the register that is measured.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::noise::NoiseParams;
use crate::statevec::{CMatrix, GateOp, MixedState, PureState, State};

/// How the detector picks up which-path information.
#[derive(Clone, Debug, PartialEq)]
pub enum DetectorMode {
    /// Particle qubit `i` controls `R_theta` on detector qubit `i`, so
    /// `U_j` is the tensor product of `R_theta` over the set bits of `j`.
    PerQubitRotation { theta: f64 },
    /// Arbitrary `U_0..U_{N-1}` on the detector register (`U_0 = I`), each
    /// applied under a multi-control on the bit pattern of `j`.
    ExplicitUnitaries(Vec<CMatrix>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterferometerSpec {
    paths: usize,
    path_qubits: usize,
    detector: DetectorMode,
    noise: NoiseParams,
}

fn path_qubits(paths: usize) -> Result<usize> {
    if paths < 2 || !paths.is_power_of_two() {
        return Err(Error::PathCount(paths));
    }
    Ok(paths.trailing_zeros() as usize)
}

impl InterferometerSpec {
    pub fn per_qubit_rotation(paths: usize, theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
            });
        }
        Ok(Self {
            paths,
            path_qubits: path_qubits(paths)?,
            detector: DetectorMode::PerQubitRotation { theta },
            noise: NoiseParams::ideal(),
        })
    }

    /// One unitary per path on an `n`-qubit detector register.
    pub fn explicit(unitaries: Vec<CMatrix>) -> Result<Self> {
        let paths = unitaries.len();
        let n = path_qubits(paths)?;
        for u in &unitaries {
            if u.dim() != paths {
                return Err(Error::Dimension {
                    expected: paths,
                    found: u.dim(),
                });
            }
            let dev = u.unitarity_deviation();
            if dev >= crate::statevec::UNITARITY_TOL {
                return Err(Error::NotUnitary(dev));
            }
        }
        if !unitaries[0].is_identity(crate::statevec::UNITARITY_TOL) {
            return Err(Error::FirstUnitaryNotIdentity);
        }
        Ok(Self {
            paths,
            path_qubits: n,
            detector: DetectorMode::ExplicitUnitaries(unitaries),
            noise: NoiseParams::ideal(),
        })
    }

    pub fn with_noise(mut self, noise: NoiseParams) -> Self {
        self.noise = noise;
        self
    }

    pub fn paths(&self) -> usize {
        self.paths
    }

    /// `n = log2 N`, the size of each register.
    pub fn path_qubits(&self) -> usize {
        self.path_qubits
    }

    pub fn num_qubits(&self) -> usize {
        2 * self.path_qubits
    }

    pub fn detector(&self) -> &DetectorMode {
        &self.detector
    }

    pub fn noise(&self) -> NoiseParams {
        self.noise
    }

    /// Shared rotation angle, if the detector uses per-qubit rotations.
    pub fn theta(&self) -> Option<f64> {
        match self.detector {
            DetectorMode::PerQubitRotation { theta } => Some(theta),
            DetectorMode::ExplicitUnitaries(_) => None,
        }
    }

    pub fn particle_register(&self) -> Vec<usize> {
        (0..self.path_qubits).collect()
    }

    pub fn detector_register(&self) -> Vec<usize> {
        (self.path_qubits..2 * self.path_qubits).collect()
    }

    fn check_path(&self, index: usize) -> Result<()> {
        if index >= self.paths {
            return Err(Error::PathIndex {
                index,
                paths: self.paths,
            });
        }
        Ok(())
    }

    /// Rotation angle as actually applied (`gamma * theta`).
    fn applied_theta(&self, theta: f64) -> f64 {
        self.noise.gamma() * theta
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CircuitVariant {
    /// Phase setting `phi` (one entry per path, radians), particle measured.
    ParticleReadout(Vec<f64>),
    /// `U_k^dagger` appended on the detector, detector measured.
    DetectorReadout(usize),
}

/// Beam-splitter matrix for imbalance `t`; `t = 1/sqrt(2)` is the Hadamard.
pub fn beam_splitter(t: f64) -> CMatrix {
    let s = sqrt(1.0 - t * t);
    CMatrix::from_real(2, &[t, s, s, -t]).expect("2x2")
}

/// `U_j` on the detector register (with the spec's rotation scale applied).
pub fn detector_unitary(j: usize, spec: &InterferometerSpec) -> Result<CMatrix> {
    spec.check_path(j)?;
    Ok(match &spec.detector {
        DetectorMode::PerQubitRotation { theta } => {
            let r = CMatrix::rotation(spec.applied_theta(*theta));
            let id = CMatrix::identity(2);
            // Highest detector qubit is the left Kronecker factor.
            (0..spec.path_qubits)
                .rev()
                .fold(CMatrix::identity(1), |acc, i| {
                    acc.kron(if j >> i & 1 == 1 { &r } else { &id })
                })
        }
        DetectorMode::ExplicitUnitaries(us) => us[j].clone(),
    })
}

pub fn detector_unitaries(spec: &InterferometerSpec) -> Vec<CMatrix> {
    (0..spec.paths)
        .map(|j| detector_unitary(j, spec).expect("index in range"))
        .collect()
}

fn splitter_layer(spec: &InterferometerSpec) -> Vec<GateOp> {
    let h = beam_splitter(spec.noise.t());
    (0..spec.path_qubits)
        .map(|q| GateOp::single(q, h.clone()).expect("orthogonal splitter"))
        .collect()
}

fn which_path_stage(spec: &InterferometerSpec) -> Vec<GateOp> {
    let n = spec.path_qubits;
    match &spec.detector {
        DetectorMode::PerQubitRotation { theta } => {
            let r = CMatrix::rotation(spec.applied_theta(*theta));
            (0..n)
                .map(|i| GateOp::controlled((i, true), n + i, r.clone()).expect("distinct qubits"))
                .collect()
        }
        DetectorMode::ExplicitUnitaries(us) => us
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, u)| {
                let controls = (0..n).map(|i| (i, j >> i & 1 == 1)).collect();
                GateOp::multi_controlled(controls, spec.detector_register(), u.clone())
                    .expect("validated at spec construction")
            })
            .collect(),
    }
}

/// Beam splitter plus which-path stage: everything before read-out.
pub fn which_path_prefix(spec: &InterferometerSpec) -> Vec<GateOp> {
    let mut gates = splitter_layer(spec);
    gates.extend(which_path_stage(spec));
    gates
}

fn particle_readout_gates(spec: &InterferometerSpec, phases: &[f64]) -> Result<Vec<GateOp>> {
    if phases.len() != spec.paths {
        return Err(Error::Dimension {
            expected: spec.paths,
            found: phases.len(),
        });
    }
    let mut gates = Vec::with_capacity(spec.path_qubits + 1);
    if phases.iter().any(|&p| p != 0.0) {
        gates.push(GateOp::diagonal_phase(
            spec.particle_register(),
            phases.to_vec(),
        )?);
    }
    gates.extend(splitter_layer(spec));
    Ok(gates)
}

fn detector_readout_gates(spec: &InterferometerSpec, k: usize) -> Result<Vec<GateOp>> {
    spec.check_path(k)?;
    let n = spec.path_qubits;
    Ok(match &spec.detector {
        DetectorMode::PerQubitRotation { theta } => {
            let inverse = CMatrix::rotation(-spec.applied_theta(*theta));
            (0..n)
                .filter(|i| k >> i & 1 == 1)
                .map(|i| GateOp::single(n + i, inverse.clone()).expect("unitary"))
                .collect()
        }
        DetectorMode::ExplicitUnitaries(_) if k == 0 => Vec::new(),
        DetectorMode::ExplicitUnitaries(us) => vec![GateOp::multi_controlled(
            Vec::new(),
            spec.detector_register(),
            us[k].adjoint(),
        )?],
    })
}

/// Full gate list for one read-out variant. An all-zero phase setting emits
/// no phase gate.
pub fn build_circuit(spec: &InterferometerSpec, variant: &CircuitVariant) -> Result<Vec<GateOp>> {
    let mut gates = which_path_prefix(spec);
    match variant {
        CircuitVariant::ParticleReadout(phases) => {
            gates.extend(particle_readout_gates(spec, phases)?)
        }
        CircuitVariant::DetectorReadout(k) => gates.extend(detector_readout_gates(spec, *k)?),
    }
    Ok(gates)
}

/// `|0...0>` for ideal preparation, the `epsilon`-mixed product state otherwise.
pub fn initial_state(spec: &InterferometerSpec) -> Result<State> {
    let q = spec.num_qubits();
    if spec.noise.is_pure() {
        Ok(State::Pure(PureState::new(q)?))
    } else {
        let eps = vec![spec.noise.epsilon(); q];
        Ok(State::Mixed(MixedState::new(q, &eps)?))
    }
}

/// Exact Born probabilities of the measured register (particle for
/// `ParticleReadout`, detector for `DetectorReadout`) from a full simulation.
pub fn run(spec: &InterferometerSpec, variant: &CircuitVariant) -> Result<Vec<f64>> {
    let gates = build_circuit(spec, variant)?;
    let mut state = initial_state(spec)?;
    state.apply_all(&gates)?;
    let register = match variant {
        CircuitVariant::ParticleReadout(_) => spec.particle_register(),
        CircuitVariant::DetectorReadout(_) => spec.detector_register(),
    };
    state.outcome_probabilities(&register)
}

/// Reduced particle and detector states after the which-path stage.
///
/// Read-out gates act on one register only, so finishing a read-out on the
/// matching reduced state gives the same probabilities as the full circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct PositionTwo {
    particle: MixedState,
    detector: MixedState,
}

impl PositionTwo {
    /// Simulates the prefix on the whole `2n`-qubit register.
    pub fn simulate(spec: &InterferometerSpec) -> Result<Self> {
        let mut state = initial_state(spec)?;
        state.apply_all(&which_path_prefix(spec))?;
        Ok(Self {
            particle: state.reduced(&spec.particle_register())?,
            detector: state.reduced(&spec.detector_register())?,
        })
    }

    /// For per-qubit rotations the prefix is a product of `n` identical
    /// two-qubit circuits (particle qubit `i`, detector qubit `i`) acting on a
    /// product input, so each register's reduced state is the `n`-fold tensor
    /// power of one pair's marginal. Returns `None` for explicit unitaries.
    pub fn factorized(spec: &InterferometerSpec) -> Result<Option<Self>> {
        let DetectorMode::PerQubitRotation { theta } = spec.detector else {
            return Ok(None);
        };
        let eps = spec.noise.epsilon();
        let mut pair = MixedState::new(2, &[eps, eps])?;
        pair.apply(&GateOp::single(0, beam_splitter(spec.noise.t()))?)?;
        pair.apply(&GateOp::controlled(
            (0, true),
            1,
            CMatrix::rotation(spec.applied_theta(theta)),
        )?)?;
        let p = pair.partial_trace(&[0])?;
        let d = pair.partial_trace(&[1])?;
        let power = |m: &MixedState| (1..spec.path_qubits).fold(m.clone(), |acc, _| m.tensor(&acc));
        Ok(Some(Self {
            particle: power(&p),
            detector: power(&d),
        }))
    }

    /// Factorized when possible, full simulation otherwise.
    pub fn prepare(spec: &InterferometerSpec) -> Result<Self> {
        match Self::factorized(spec)? {
            Some(s) => Ok(s),
            None => Self::simulate(spec),
        }
    }

    /// `rho_p`, indexed by path.
    pub fn particle(&self) -> &MixedState {
        &self.particle
    }

    /// `rho_d`, the path-averaged detector state.
    pub fn detector(&self) -> &MixedState {
        &self.detector
    }

    /// Particle-register distribution for phase setting `phases`.
    pub fn particle_readout(&self, spec: &InterferometerSpec, phases: &[f64]) -> Result<Vec<f64>> {
        let mut rho = self.particle.clone();
        rho.apply_all(&particle_readout_gates(spec, phases)?)?;
        rho.outcome_probabilities(&spec.particle_register())
    }

    /// Detector-register distribution after `U_k^dagger`.
    pub fn detector_readout(&self, spec: &InterferometerSpec, k: usize) -> Result<Vec<f64>> {
        let n = spec.path_qubits;
        let mut rho = self.detector.clone();
        for g in detector_readout_gates(spec, k)? {
            rho.apply(&g.remapped(|q| q - n)?)?;
        }
        rho.outcome_probabilities(&spec.particle_register())
    }
}

/// Single-pair marginals of a per-qubit-rotation interferometer.
///
/// With per-qubit rotations every read-out whose gates factor over the
/// `(particle i, detector i)` pairs (all-zero phases, any `U_k^dagger`)
/// has an outcome-0 probability equal to a product of one-pair
/// probabilities, so a single two-qubit density-matrix run serves every `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairMarginals {
    path_qubits: usize,
    /// `p_p(0|0)` of one particle qubit after the recombining splitter.
    particle_zero: f64,
    /// One detector qubit's outcome-0 probability without / with the
    /// inverse rotation.
    detector_zero: [f64; 2],
}

impl PairMarginals {
    /// `None` unless the detector uses per-qubit rotations.
    pub fn simulate(spec: &InterferometerSpec) -> Result<Option<Self>> {
        let DetectorMode::PerQubitRotation { theta } = spec.detector else {
            return Ok(None);
        };
        let eps = spec.noise.epsilon();
        let splitter = GateOp::single(0, beam_splitter(spec.noise.t()))?;
        let mut pair = MixedState::new(2, &[eps, eps])?;
        pair.apply(&splitter)?;
        pair.apply(&GateOp::controlled(
            (0, true),
            1,
            CMatrix::rotation(spec.applied_theta(theta)),
        )?)?;

        let mut particle = pair.partial_trace(&[0])?;
        particle.apply(&splitter)?;
        let particle_zero = particle.outcome_probabilities(&[0])?[0];

        let detector = pair.partial_trace(&[1])?;
        let mut rotated = detector.clone();
        rotated.apply(&GateOp::single(
            0,
            CMatrix::rotation(-spec.applied_theta(theta)),
        )?)?;
        Ok(Some(Self {
            path_qubits: spec.path_qubits,
            particle_zero,
            detector_zero: [
                detector.outcome_probabilities(&[0])?[0],
                rotated.outcome_probabilities(&[0])?[0],
            ],
        }))
    }

    /// `p_p(0|phi = 0)` of the whole particle register.
    pub fn particle_zero_probability(&self) -> f64 {
        crate::math::powi(self.particle_zero, self.path_qubits as u32)
    }

    /// `p_d(0|k)` of the whole detector register.
    pub fn detector_zero_probability(&self, k: usize) -> f64 {
        let set = (k & ((1 << self.path_qubits) - 1)).count_ones();
        crate::math::powi(self.detector_zero[0], self.path_qubits as u32 - set)
            * crate::math::powi(self.detector_zero[1], set)
    }
}
