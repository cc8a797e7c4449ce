//! Measurement settings, Born statistics, and count-record serialization.
//!
//! A tomography data set is a list of [`CountRecord`]s, one JSON object per
//! line. State records carry only a measurement basis; process records add
//! the input preparation. Finite-shot counts are integers. `"shots":
//! "exact"` marks records whose counts hold Born probabilities instead,
//! which reconstruction treats as the infinite-statistics limit.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::qcore::channel::random;
use crate::qcore::matrix::{tensor_product, ComplexMatrix};
use crate::qcore::{DensityMatrix, KrausChannel, Pauli, PureState, QcoreError};
use crate::scalar::Scalar;
use crate::tomography::TomographyError;

/// Measurement axis of one qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn all() -> [Axis; 3] {
        [Axis::X, Axis::Y, Axis::Z]
    }

    pub fn label(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    pub fn from_label(c: char) -> Result<Self, TomographyError> {
        match c {
            'X' => Ok(Axis::X),
            'Y' => Ok(Axis::Y),
            'Z' => Ok(Axis::Z),
            other => Err(TomographyError::BadLabel {
                label: other.to_string(),
            }),
        }
    }

    /// The Pauli operator measured along this axis.
    pub fn operator<T: Scalar>(self) -> ComplexMatrix<T> {
        match self {
            Axis::X => Pauli::X.matrix(),
            Axis::Y => Pauli::Y.matrix(),
            Axis::Z => Pauli::Z.matrix(),
        }
    }
}

/// Single-qubit input preparation for process tomography.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Preparation {
    Zero,
    One,
    Plus,
    PlusI,
}

impl Preparation {
    pub fn all() -> [Preparation; 4] {
        [
            Preparation::Zero,
            Preparation::One,
            Preparation::Plus,
            Preparation::PlusI,
        ]
    }

    pub fn label(self) -> &'static str {
        match self {
            Preparation::Zero => "0",
            Preparation::One => "1",
            Preparation::Plus => "+",
            Preparation::PlusI => "+i",
        }
    }

    pub fn from_label(s: &str) -> Result<Self, TomographyError> {
        match s {
            "0" => Ok(Preparation::Zero),
            "1" => Ok(Preparation::One),
            "+" => Ok(Preparation::Plus),
            "+i" => Ok(Preparation::PlusI),
            other => Err(TomographyError::BadLabel {
                label: other.to_string(),
            }),
        }
    }

    pub fn state<T: Scalar>(self) -> PureState<T> {
        match self {
            Preparation::Zero => PureState::basis_state(2, 0),
            Preparation::One => PureState::basis_state(2, 1),
            Preparation::Plus => PureState::qubit_plus(),
            Preparation::PlusI => PureState::qubit_plus_i(),
        }
    }
}

/// One tomography configuration: an optional input preparation and a
/// per-qubit measurement basis, first axis on the most significant qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSetting {
    pub prep: Option<Preparation>,
    pub basis: Vec<Axis>,
}

impl MeasurementSetting {
    pub fn state(basis: Vec<Axis>) -> Self {
        MeasurementSetting { prep: None, basis }
    }

    pub fn process(prep: Preparation, basis: Axis) -> Self {
        MeasurementSetting {
            prep: Some(prep),
            basis: vec![basis],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_label(&self) -> String {
        self.basis.iter().map(|a| a.label()).collect()
    }

    /// Projective effects, one per outcome bitstring in label order. They
    /// sum to the identity.
    pub fn effects<T: Scalar>(&self) -> Vec<(String, ComplexMatrix<T>)> {
        let n = self.basis.len();
        let half = T::real(0.5);
        let id = ComplexMatrix::<T>::identity(2);
        let singles: Vec<[ComplexMatrix<T>; 2]> = self
            .basis
            .iter()
            .map(|a| {
                let op = a.operator::<T>();
                [
                    id.add(&op).scale_real(half),
                    id.sub(&op).scale_real(half),
                ]
            })
            .collect();
        (0..1usize << n)
            .map(|o| {
                let mut label = String::with_capacity(n);
                let mut effect: Option<ComplexMatrix<T>> = None;
                for (q, single) in singles.iter().enumerate() {
                    let bit = (o >> (n - 1 - q)) & 1;
                    label.push(if bit == 0 { '0' } else { '1' });
                    effect = Some(match effect {
                        None => single[bit].clone(),
                        Some(acc) => tensor_product(&acc, &single[bit]),
                    });
                }
                (label, effect.expect("basis is non-empty"))
            })
            .collect()
    }
}

/// Outcome bitstrings of an n-qubit projective measurement, in order.
pub fn outcome_labels(n_qubits: usize) -> Vec<String> {
    (0..1usize << n_qubits)
        .map(|o| {
            (0..n_qubits)
                .map(|q| {
                    if (o >> (n_qubits - 1 - q)) & 1 == 0 {
                        '0'
                    } else {
                        '1'
                    }
                })
                .collect()
        })
        .collect()
}

/// Shot budget of one record.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shots {
    Finite(u64),
    /// Counts are Born probabilities rather than sampled tallies.
    Exact,
}

/// Measured (or exactly computed) outcome statistics for one setting.
#[derive(Clone, Debug, PartialEq)]
pub struct CountRecord {
    pub setting: MeasurementSetting,
    pub counts: BTreeMap<String, f64>,
    pub shots: Shots,
}

impl CountRecord {
    /// One-line JSON form. Finite counts serialize as integers, exact
    /// records carry probabilities and the sentinel `"shots": "exact"`.
    pub fn to_jsonl(&self) -> String {
        let mut counts = serde_json::Map::new();
        for (label, value) in &self.counts {
            let v = match self.shots {
                Shots::Finite(_) => serde_json::Value::from(value.round() as u64),
                Shots::Exact => serde_json::Value::from(*value),
            };
            counts.insert(label.clone(), v);
        }
        let mut obj = serde_json::Map::new();
        if let Some(prep) = self.setting.prep {
            obj.insert("prep".into(), prep.label().into());
        }
        obj.insert("basis".into(), self.setting.basis_label().into());
        obj.insert("counts".into(), counts.into());
        obj.insert(
            "shots".into(),
            match self.shots {
                Shots::Finite(n) => serde_json::Value::from(n),
                Shots::Exact => serde_json::Value::from("exact"),
            },
        );
        serde_json::Value::Object(obj).to_string()
    }

    pub fn from_jsonl(line: &str) -> Result<Self, TomographyError> {
        let bad = |message: String| TomographyError::BadRecord { message };
        let value: serde_json::Value = serde_json::from_str(line)
            .map_err(|e| bad(format!("invalid JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| bad("record must be a JSON object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "prep" | "basis" | "counts" | "shots") {
                return Err(bad(format!("unknown field '{key}'")));
            }
        }

        let basis_str = obj
            .get("basis")
            .and_then(|v| v.as_str())
            .ok_or_else(|| bad("missing string field 'basis'".into()))?;
        if basis_str.is_empty() {
            return Err(bad("'basis' must name at least one axis".into()));
        }
        let basis = basis_str
            .chars()
            .map(Axis::from_label)
            .collect::<Result<Vec<_>, _>>()?;

        let prep = match obj.get("prep") {
            None => None,
            Some(v) => {
                let s = v
                    .as_str()
                    .ok_or_else(|| bad("'prep' must be a string".into()))?;
                Some(Preparation::from_label(s)?)
            }
        };
        if prep.is_some() && basis.len() != 1 {
            return Err(bad(
                "records with a preparation must measure exactly one qubit".into(),
            ));
        }

        let shots = match obj.get("shots") {
            Some(serde_json::Value::String(s)) if s == "exact" => Shots::Exact,
            Some(v) => {
                let n = v
                    .as_u64()
                    .ok_or_else(|| bad("'shots' must be a count or \"exact\"".into()))?;
                if n == 0 {
                    return Err(bad("'shots' must be positive".into()));
                }
                Shots::Finite(n)
            }
            None => return Err(bad("missing field 'shots'".into())),
        };

        let counts_obj = obj
            .get("counts")
            .and_then(|v| v.as_object())
            .ok_or_else(|| bad("missing object field 'counts'".into()))?;
        let mut counts = BTreeMap::new();
        for (label, v) in counts_obj {
            if label.len() != basis.len() || !label.chars().all(|c| c == '0' || c == '1') {
                return Err(bad(format!(
                    "outcome '{label}' is not a {}-bit string",
                    basis.len()
                )));
            }
            let x = v
                .as_f64()
                .ok_or_else(|| bad(format!("count for '{label}' is not a number")))?;
            if !x.is_finite() || x < 0.0 {
                return Err(bad(format!("count for '{label}' must be >= 0")));
            }
            if matches!(shots, Shots::Finite(_)) && x.fract() != 0.0 {
                return Err(bad(format!("finite-shot count for '{label}' must be an integer")));
            }
            counts.insert(label.clone(), x);
        }
        let total: f64 = counts.values().sum();
        match shots {
            Shots::Finite(n) => {
                if total != n as f64 {
                    return Err(bad(format!("counts sum to {total}, expected {n}")));
                }
            }
            Shots::Exact => {
                if (total - 1.0).abs() > 1e-6 {
                    return Err(bad(format!(
                        "exact-record probabilities sum to {total}, expected 1"
                    )));
                }
            }
        }

        Ok(CountRecord {
            setting: MeasurementSetting { prep, basis },
            counts,
            shots,
        })
    }
}

/// Outcome probabilities of measuring `state` qubit by qubit along `basis`.
pub fn born_probabilities<T: Scalar>(
    state: &DensityMatrix<T>,
    basis: &[Axis],
) -> Result<Vec<(String, T)>, TomographyError> {
    if basis.is_empty() || state.dim() != 1 << basis.len() {
        return Err(TomographyError::Core(QcoreError::DimensionMismatch {
            context: "measurement basis does not match state dimension",
        }));
    }
    let setting = MeasurementSetting::state(basis.to_vec());
    Ok(setting
        .effects::<T>()
        .into_iter()
        .map(|(label, e)| {
            let p = state.expectation(&e).re;
            (label, p.max(T::zero()))
        })
        .collect())
}

/// Draw multinomial counts for one setting, or pass probabilities through
/// unchanged in exact mode. Finite draws decompose into conditional
/// binomials so the total always matches the shot budget.
pub fn sample_counts<T: Scalar>(
    probs: &[(String, T)],
    shots: Shots,
    rng: &mut ChaCha8Rng,
) -> BTreeMap<String, f64> {
    let mut counts = BTreeMap::new();
    match shots {
        Shots::Exact => {
            for (label, p) in probs {
                counts.insert(label.clone(), p.as_f64());
            }
        }
        Shots::Finite(total) => {
            let mut remaining_shots = total;
            let mut remaining_prob: f64 = probs.iter().map(|(_, p)| p.as_f64()).sum();
            for (i, (label, p)) in probs.iter().enumerate() {
                let n = if i + 1 == probs.len() || remaining_prob <= 0.0 {
                    if i + 1 == probs.len() {
                        remaining_shots
                    } else {
                        0
                    }
                } else {
                    let cond = (p.as_f64() / remaining_prob).clamp(0.0, 1.0);
                    let draw = Binomial::new(remaining_shots, cond)
                        .expect("conditional probability is in [0, 1]")
                        .sample(rng);
                    remaining_prob -= p.as_f64();
                    draw
                };
                remaining_shots -= n.min(remaining_shots);
                counts.insert(label.clone(), n as f64);
            }
            // Any leftover from clamping lands on the last outcome.
            if remaining_shots > 0 {
                if let Some((label, _)) = probs.last() {
                    *counts.get_mut(label).expect("inserted above") += remaining_shots as f64;
                }
            }
        }
    }
    counts
}

/// The twelve process-tomography settings: every preparation crossed with
/// every axis, preparation-major.
pub fn process_frame() -> Vec<MeasurementSetting> {
    let mut frame = Vec::with_capacity(12);
    for prep in Preparation::all() {
        for axis in Axis::all() {
            frame.push(MeasurementSetting::process(prep, axis));
        }
    }
    frame
}

/// All 3^n basis combinations for state tomography, first qubit slowest.
pub fn state_frame(n_qubits: usize) -> Vec<MeasurementSetting> {
    assert!(n_qubits >= 1, "state frame needs at least one qubit");
    let mut frame = Vec::with_capacity(3usize.pow(n_qubits as u32));
    let mut basis = vec![Axis::X; n_qubits];
    loop {
        frame.push(MeasurementSetting::state(basis.clone()));
        // Odometer increment over X < Y < Z, last qubit fastest.
        let mut q = n_qubits;
        loop {
            if q == 0 {
                return frame;
            }
            q -= 1;
            basis[q] = match basis[q] {
                Axis::X => Axis::Y,
                Axis::Y => Axis::Z,
                Axis::Z => {
                    basis[q] = Axis::X;
                    continue;
                }
            };
            break;
        }
    }
}

/// Measure `state` over the full basis frame. Each setting draws from its
/// own deterministic stream of `seed`.
pub fn simulate_state_tomography<T: Scalar>(
    state: &DensityMatrix<T>,
    shots: Shots,
    seed: u64,
) -> Result<Vec<CountRecord>, TomographyError> {
    let n = crate::qcore::pauli::qubit_count(state.dim())
        .map_err(|_| TomographyError::NonQubitDim { dim: state.dim() })?;
    state_frame(n)
        .into_iter()
        .enumerate()
        .map(|(idx, setting)| {
            let probs = born_probabilities(state, &setting.basis)?;
            let mut rng = random::rng(seed, idx as u64);
            let counts = sample_counts(&probs, shots, &mut rng);
            Ok(CountRecord {
                setting,
                counts,
                shots,
            })
        })
        .collect()
}

/// Run the twelve-setting frame through a single-qubit channel.
pub fn simulate_process_tomography<T: Scalar>(
    channel: &KrausChannel<T>,
    shots: Shots,
    seed: u64,
) -> Result<Vec<CountRecord>, TomographyError> {
    if channel.dim_in() != 2 || channel.dim_out() != 2 {
        return Err(TomographyError::Core(QcoreError::DimensionMismatch {
            context: "the process tomography frame covers single-qubit channels",
        }));
    }
    process_frame()
        .into_iter()
        .enumerate()
        .map(|(idx, setting)| {
            let prep = setting.prep.expect("process frame always prepares");
            let out = channel.apply(&prep.state::<T>().density())?;
            let probs = born_probabilities(&out, &setting.basis)?;
            let mut rng = random::rng(seed, idx as u64);
            let counts = sample_counts(&probs, shots, &mut rng);
            Ok(CountRecord {
                setting,
                counts,
                shots,
            })
        })
        .collect()
}
