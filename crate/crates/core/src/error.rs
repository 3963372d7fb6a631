use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("register of {requested} qubits outside the supported range 1..={max}")]
    QubitCount { requested: usize, max: usize },
    #[error("qubit index {index} out of range for a {num_qubits}-qubit state")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("qubit {0} appears more than once")]
    DuplicateQubit(usize),
    #[error("qubit list is empty")]
    EmptyQubitList,
    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(&'static str),
    #[error("parameter `{name}` = {value} outside its allowed range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("path count {0} is not a power of two >= 2")]
    PathCount(usize),
    #[error("path index {index} out of range for {paths} paths")]
    PathIndex { index: usize, paths: usize },
    #[error("detector unitary U_0 must be the identity")]
    FirstUnitaryNotIdentity,
    #[error("invalid overlap matrix: {0}")]
    InvalidOverlap(&'static str),
    #[error("negative radicand {0:e} beyond tolerance")]
    NegativeRadicand(f64),
    #[error("{paths} paths exceed the enumeration cap of {cap}")]
    CapExceeded { paths: usize, cap: usize },
    #[error("least-squares system is singular")]
    Singular,
    #[error("{observations} observations cannot constrain {free} free parameters")]
    InsufficientData { observations: usize, free: usize },
    #[error("all fit parameters are fixed")]
    AllFixed,
    #[error("{0}")]
    Invalid(&'static str),
}
