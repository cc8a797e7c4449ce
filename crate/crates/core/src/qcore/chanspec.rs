//! JSON channel specifications.
//!
//! The on-disk vocabulary for naming a channel:
//!
//! ```json
//! {"type":"pauli","n_qubits":1,"probs":{"I":0.625,"X":0.125,"Y":0.125,"Z":0.125}}
//! {"type":"depolarizing","p":0.5}
//! {"type":"bit_flip","p0":0.5}
//! {"type":"phase_flip","p0":0.5}
//! {"type":"kraus","dim":2,"ops":[[[re,im],...],...]}
//! ```
//!
//! Each Kraus op is a flat row-major list of `[re, im]` pairs of length
//! `dim * dim`. Probabilities must sum to 1 within 1e-6 at ingest and are
//! renormalized exactly afterwards; Kraus sets must satisfy completeness
//! within 1e-6.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::qcore::channel::{
    bit_flip_channel, depolarizing_channel, phase_flip_channel, KrausChannel, PauliChannel,
};
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::pauli::PauliString;
use crate::qcore::QcoreError;
use crate::scalar::Scalar;

/// Normalization slack accepted on ingest, looser than the internal
/// invariants to admit hand-written files.
pub const INGEST_TOL: f64 = 1e-6;

/// Parsed channel specification document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Pauli {
        n_qubits: usize,
        probs: BTreeMap<String, f64>,
    },
    Depolarizing {
        p: f64,
    },
    BitFlip {
        p0: f64,
    },
    PhaseFlip {
        p0: f64,
    },
    Kraus {
        dim: usize,
        ops: Vec<Vec<[f64; 2]>>,
    },
}

/// Channel built from a spec, keeping the Pauli structure when the spec
/// provides one.
#[derive(Clone, Debug)]
pub enum BuiltChannel<T> {
    Pauli(PauliChannel<T>),
    Kraus(KrausChannel<T>),
}

impl<T: Scalar> BuiltChannel<T> {
    pub fn dim(&self) -> usize {
        match self {
            BuiltChannel::Pauli(pc) => pc.dim(),
            BuiltChannel::Kraus(kc) => kc.dim_in(),
        }
    }

    pub fn as_pauli(&self) -> Option<&PauliChannel<T>> {
        match self {
            BuiltChannel::Pauli(pc) => Some(pc),
            BuiltChannel::Kraus(_) => None,
        }
    }

    pub fn to_kraus(&self) -> KrausChannel<T> {
        match self {
            BuiltChannel::Pauli(pc) => pc.to_kraus(),
            BuiltChannel::Kraus(kc) => kc.clone(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("channel spec is not valid JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("probabilities sum to {sum}, expected 1 within {tolerance}")]
    ProbabilitySum { sum: f64, tolerance: f64 },
    #[error("probability {value} for '{label}' is outside [0, 1]")]
    BadProbability { label: String, value: f64 },
    #[error("'{label}' is not a {n_qubits}-qubit Pauli label")]
    BadLabel { label: String, n_qubits: usize },
    #[error("parameter {name} = {value} is outside [0, 1]")]
    BadParameter { name: &'static str, value: f64 },
    #[error("Kraus spec needs dim >= 2 and at least one operator")]
    EmptyKraus,
    #[error("Kraus operator {index} has {len} entries, expected dim*dim = {expected}")]
    BadKrausShape {
        index: usize,
        len: usize,
        expected: usize,
    },
    #[error("Kraus set violates completeness: residual {residual} exceeds {tolerance}")]
    NotTracePreserving { residual: f64, tolerance: f64 },
    #[error(transparent)]
    Core(#[from] QcoreError),
}

impl ChannelSpec {
    /// Parse a spec document, reporting JSON position on failure.
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        serde_json::from_str(text).map_err(|e| SpecError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec enum serializes infallibly")
    }

    /// Validate and construct the channel at scalar type `T`.
    pub fn build<T: Scalar>(&self) -> Result<BuiltChannel<T>, SpecError> {
        match self {
            ChannelSpec::Pauli { n_qubits, probs } => {
                let count = 4usize
                    .checked_pow(*n_qubits as u32)
                    .filter(|_| (1..=4).contains(n_qubits))
                    .ok_or(QcoreError::DimensionMismatch {
                        context: "n_qubits must be between 1 and 4",
                    })?;
                let mut dense = vec![0.0f64; count];
                for (label, &p) in probs {
                    let s = PauliString::parse(label).map_err(|_| SpecError::BadLabel {
                        label: label.clone(),
                        n_qubits: *n_qubits,
                    })?;
                    if s.n_qubits() != *n_qubits {
                        return Err(SpecError::BadLabel {
                            label: label.clone(),
                            n_qubits: *n_qubits,
                        });
                    }
                    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                        return Err(SpecError::BadProbability {
                            label: label.clone(),
                            value: p,
                        });
                    }
                    dense[s.basis_index()] += p;
                }
                let sum: f64 = dense.iter().sum();
                if (sum - 1.0).abs() > INGEST_TOL {
                    return Err(SpecError::ProbabilitySum {
                        sum,
                        tolerance: INGEST_TOL,
                    });
                }
                let mut scaled: Vec<T> = dense.into_iter().map(|p| T::real(p / sum)).collect();
                crate::qcore::channel::random::renormalize_exact(&mut scaled);
                Ok(BuiltChannel::Pauli(PauliChannel::new(*n_qubits, scaled)?))
            }
            ChannelSpec::Depolarizing { p } => {
                check_param("p", *p)?;
                Ok(BuiltChannel::Pauli(depolarizing_channel(T::real(*p))?))
            }
            ChannelSpec::BitFlip { p0 } => {
                check_param("p0", *p0)?;
                Ok(BuiltChannel::Pauli(bit_flip_channel(T::real(*p0))?))
            }
            ChannelSpec::PhaseFlip { p0 } => {
                check_param("p0", *p0)?;
                Ok(BuiltChannel::Pauli(phase_flip_channel(T::real(*p0))?))
            }
            ChannelSpec::Kraus { dim, ops } => {
                if *dim < 2 || ops.is_empty() {
                    return Err(SpecError::EmptyKraus);
                }
                let expected = dim * dim;
                let mut mats = Vec::with_capacity(ops.len());
                for (index, op) in ops.iter().enumerate() {
                    if op.len() != expected {
                        return Err(SpecError::BadKrausShape {
                            index,
                            len: op.len(),
                            expected,
                        });
                    }
                    let entries = op
                        .iter()
                        .map(|&[re, im]| Complex::new(T::real(re), T::real(im)))
                        .collect();
                    mats.push(ComplexMatrix::from_flat(*dim, entries)?);
                }
                let ch = KrausChannel::new(mats)?;
                let residual = ch.completeness_residual().as_f64();
                if residual > INGEST_TOL {
                    return Err(SpecError::NotTracePreserving {
                        residual,
                        tolerance: INGEST_TOL,
                    });
                }
                Ok(BuiltChannel::Kraus(ch))
            }
        }
    }

    /// Single-qubit specs are the protocol's canonical case.
    pub fn is_single_qubit(&self) -> bool {
        match self {
            ChannelSpec::Pauli { n_qubits, .. } => *n_qubits == 1,
            ChannelSpec::Depolarizing { .. }
            | ChannelSpec::BitFlip { .. }
            | ChannelSpec::PhaseFlip { .. } => true,
            ChannelSpec::Kraus { dim, .. } => *dim == 2,
        }
    }
}

/// Round-trip helper: describe an existing Pauli channel as a spec document.
pub fn spec_from_pauli<T: Scalar>(pc: &PauliChannel<T>) -> ChannelSpec {
    let probs = pc
        .labeled_probs()
        .into_iter()
        .filter(|(_, p)| *p > T::zero())
        .map(|(label, p)| (label, p.as_f64()))
        .collect();
    ChannelSpec::Pauli {
        n_qubits: pc.n_qubits(),
        probs,
    }
}

fn check_param(name: &'static str, value: f64) -> Result<(), SpecError> {
    if (0.0..=1.0).contains(&value) && value.is_finite() {
        Ok(())
    } else {
        Err(SpecError::BadParameter { name, value })
    }
}
