//! Published measurements from the optical implementation this toolkit
//! models, printed next to the ideal values so the two are never confused.
//!
//! The model is exact and noiseless, so its numbers sit above the
//! experimental ones wherever hardware imperfection (finite visibility,
//! accidental counts, tomography noise) pulled the measurement down.

/// Label for values computed by this tool.
pub const LABEL_IDEAL: &str = "ideal (this model)";

/// Label for the published measured values.
pub const LABEL_EXPERIMENT: &str = "experimental (reference)";

/// Measured noiseless components for bit-flip(1/2) + phase-flip(1/2)
/// purification: the two inputs, the physical branch, and the virtual
/// combination.
pub const PURIFY_INPUTS: [f64; 2] = [0.480, 0.505];
pub const PURIFY_PHYSICAL: f64 = 0.594;
pub const PURIFY_VIRTUAL: f64 = 0.925;

/// Measured peak of the depolarizing sweep: unpurified average fidelity
/// and the virtual average fidelity reached at that point.
pub const SWEEP_PEAK_UNPURIFIED: f64 = 0.744;
pub const SWEEP_PEAK_VIRTUAL: f64 = 0.913;

/// Measured Bell fidelity of the purified distributed state at p = 0.33.
pub const DISTRIBUTE_PURIFIED: &str = "0.528(3)";

/// Measured partial-transpose eigenvalues of the unpurified distributed
/// state at p = 0.33.
pub const DISTRIBUTE_PT_EIGENVALUES: [f64; 4] = [0.03, 0.28, 0.33, 0.36];
