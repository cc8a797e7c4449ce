//! Exact simulator and analysis toolkit for two-Fredkin quantum channel
//! purification.
//!
//! The protocol: a control qubit in |+> selects, via two Fredkin
//! (controlled-SWAP) gates, whether two noisy channels act on the main
//! register directly or in swapped order. Interference between the two
//! orderings concentrates probability on the channels' common noiseless
//! component. Measuring the control in the X basis yields a physically
//! post-selected purified channel on the |+> branch, and the signed
//! combination of both branches yields an even cleaner virtual channel
//! usable for expectation values.
//!
//! Module map:
//! - [`qcore`]: dense complex matrices, Pauli strings, density matrices,
//!   Kraus/Pauli channels, JSON channel specs.
//! - [`purify`]: the exact circuit simulation, the closed-form purified and
//!   virtual distributions, their two-channel generalization, Pauli
//!   twirling.
//! - [`tomography`]: chi / Pauli-transfer / Choi process representations,
//!   Born-rule count sampling, maximum-likelihood state and process
//!   reconstruction.
//! - [`metrics`]: state and process fidelities, partial transpose, PPT
//!   separability test.
//! - [`optics`]: Jones calculus for the wave-plate and beam-splitter
//!   hardware model, including the spatial-Hadamard phase-compensation
//!   solver.
//!
//! Everything is generic over the real scalar type through [`Scalar`];
//! `f64` is the intended precision and the tolerances are chosen for it.
//! The `*64` aliases at the crate root name the common concrete types.

pub mod metrics;
pub mod optics;
pub mod purify;
pub mod qcore;
pub mod scalar;
pub mod tomography;

pub use scalar::{Scalar, C};

pub type ComplexMatrix64 = qcore::ComplexMatrix<f64>;
pub type DensityMatrix64 = qcore::DensityMatrix<f64>;
pub type PureState64 = qcore::PureState<f64>;
pub type KrausChannel64 = qcore::KrausChannel<f64>;
pub type PauliChannel64 = qcore::PauliChannel<f64>;
pub type PurificationOutcome64 = purify::PurificationOutcome<f64>;
pub type FidelityReport64 = metrics::FidelityReport<f64>;
pub type PptReport64 = metrics::PptReport<f64>;
pub type ChiMatrix64 = tomography::ChiMatrix<f64>;
pub type ChoiMatrix64 = tomography::ChoiMatrix<f64>;
pub type PauliTransferMatrix64 = tomography::PauliTransferMatrix<f64>;
pub type BsPhases64 = optics::BsPhases<f64>;
pub type Compensation64 = optics::Compensation<f64>;
