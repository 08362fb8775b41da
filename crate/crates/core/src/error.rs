use thiserror::Error;

use crate::bell::{BellKind, Smo};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("register of {requested} qubits exceeds the {max}-qubit capacity")]
    CapacityExceeded { requested: usize, max: usize },

    #[error("invalid qubit permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("matrix is not unitary (residual {residual:e})")]
    NonUnitary { residual: f64 },

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    IndexOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),

    #[error("selected branch has negligible probability {probability:e}")]
    DegenerateBranch { probability: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("state contains a non-finite amplitude")]
    NonFinite,

    #[error("basis is not orthonormal (residual {residual:e})")]
    InvalidBasis { residual: f64 },

    #[error(
        "no unique Pauli correction for shared {shared} with SMO {smo} ({candidates} candidates)"
    )]
    NoUniqueCorrection {
        shared: BellKind,
        smo: Smo,
        candidates: usize,
    },

    #[error("channel violates ψ1 ≠ ψ3, ψ2 ≠ ψ4")]
    ConditionViolated,

    #[error("pair purity {purity} is neither 1/2 nor 1")]
    IndeterminateControl { purity: f64 },

    #[error("branch does not factor into a Bell-pair product")]
    NotBellProduct,

    #[error("need 0 < b <= a and a² + b² = 1, got a = {a}, b = {b}")]
    InvalidRatio { a: f64, b: f64 },

    #[error("generalized pair must not be maximally entangled (a = {a})")]
    MaximallyEntangled { a: f64 },

    #[error("sample is empty")]
    EmptySample,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("table data line {line}: {message}")]
    TableData { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
