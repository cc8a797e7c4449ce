//! Core vocabulary: dense complex matrices, Pauli strings, density matrices,
//! and quantum channels.
//!
//! Qubit ordering convention for the whole crate: the leftmost label is the
//! most significant basis index, so a register list `[a, b]` indexes the
//! joint space as `|a b>` with `a` carrying the high bits. All tensor
//! products, partial traces, and Pauli-string labels follow this.

pub mod chanspec;
pub mod channel;
pub mod matrix;
pub mod pauli;
pub mod state;

pub use chanspec::{BuiltChannel, ChannelSpec, SpecError};
pub use channel::{
    bit_flip_channel, depolarizing_channel, pauli_channel_to_kraus, phase_flip_channel,
    CptpDiagnostic, KrausChannel, PauliChannel,
};
pub use matrix::{partial_trace_matrix, tensor_product, ComplexMatrix, HermitianEigen};
pub use pauli::{
    from_pauli_coefficients, pauli_basis, pauli_coefficients, qubit_count, Pauli, PauliString,
};
pub use state::{bell_state, partial_trace, DensityMatrix, PureState};

/// Errors from construction and validation of core values.
#[derive(Debug, thiserror::Error)]
pub enum QcoreError {
    #[error("matrix must have at least one row")]
    EmptyMatrix,
    #[error("matrix rows must be non-empty and of equal length")]
    RaggedRows,
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: &'static str },
    #[error("partial trace must keep at least one subsystem")]
    EmptyKeepSet,
    #[error("Pauli string must have at least one factor")]
    EmptyPauliString,
    #[error("'{label}' is not a Pauli string label")]
    BadPauliLabel { label: String },
    #[error("Pauli index {index} out of range for {n_qubits} qubit(s)")]
    BadPauliIndex { index: usize, n_qubits: usize },
    #[error("dimension {dim} is not a power of two >= 2")]
    NotPowerOfTwo { dim: usize },
    #[error("matrix is not Hermitian: residual {residual}")]
    NotHermitian { residual: f64 },
    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("state vector norm is {norm}, expected 1")]
    NotUnitVector { norm: f64 },
    #[error("probability {value} is outside [0, 1]")]
    BadProbability { value: f64 },
    #[error("probabilities sum to {sum}, expected 1")]
    ProbabilitySumNotOne { sum: f64 },
    #[error("channel needs at least one Kraus operator")]
    EmptyKrausSet,
}
