//! Process representations and maximum-likelihood reconstruction.
//!
//! Three interchangeable pictures of a channel and the conversions between
//! them live in [`repr`]; Born-rule count simulation in [`sampling`];
//! iterative maximum-likelihood state and process estimation in [`mle`].

pub mod mle;
pub mod repr;
pub mod sampling;

pub use mle::{mle_process, mle_state, MleOptions, MleProcess, MleReport, MleState};
pub use repr::{
    channel_from_choi, chi_from_channel, choi_from_channel, ptm_from_channel, ChiMatrix,
    ChoiMatrix, PauliTransferMatrix,
};
pub use sampling::{
    born_probabilities, outcome_labels, process_frame, sample_counts,
    simulate_process_tomography, simulate_state_tomography, state_frame, Axis, CountRecord,
    MeasurementSetting, Preparation, Shots,
};

/// Errors from representation conversion, sampling, and reconstruction.
#[derive(Debug, thiserror::Error)]
pub enum TomographyError {
    #[error("dimension {dim} is not a power of two >= 2")]
    NonQubitDim { dim: usize },
    #[error("operator is not completely positive: min Choi eigenvalue {min_eigenvalue}")]
    NotCompletelyPositive { min_eigenvalue: f64 },
    #[error("matrix is not Hermitian: residual {residual}")]
    NotHermitian { residual: f64 },
    #[error("'{label}' is not a Pauli label for this representation")]
    BadLabel { label: String },
    #[error("chi matrix is not Pauli-diagonal: off-diagonal magnitude {off_diagonal}")]
    NotPauliDiagonal { off_diagonal: f64 },
    #[error("bad count record: {message}")]
    BadRecord { message: String },
    #[error("no measurement records provided")]
    EmptyRecords,
    #[error("record shapes disagree: {context}")]
    InconsistentRecords { context: &'static str },
    #[error(
        "measurement set is informationally incomplete: operator-space rank {rank}, need {needed}"
    )]
    Underdetermined { rank: usize, needed: usize },
    #[error(transparent)]
    Core(#[from] crate::qcore::QcoreError),
}
