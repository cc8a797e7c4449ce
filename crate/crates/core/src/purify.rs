//! The purification protocol core.
//!
//! A control qubit prepared in |+> conditionally swaps (Fredkin) an
//! ancilla in the maximally mixed state with the system register, both
//! noisy channels act, and a second Fredkin undoes the conditional swap
//! before the control is read out along X. The |+> outcome applies the two
//! channels' "interference": Pauli components common to both channels are
//! amplified quadratically, everything else is suppressed. The signed
//! combination of both outcomes yields a virtual channel that is cleaner
//! still but possibly non-physical, so it is kept in chi form.
//!
//! [`simulate_purification`] is the source of truth: it runs the exact
//! density-matrix circuit and extracts both branch maps over a complete
//! operator basis. The closed forms ([`purified_pauli_probs`],
//! [`virtual_pauli_probs`], [`two_channel_purified_probs`]) are validated
//! against it in the test suite.

use crate::qcore::matrix::{partial_trace_matrix, tensor_product, ComplexMatrix};
use crate::qcore::pauli::qubit_count;
use crate::qcore::{pauli_basis, DensityMatrix, KrausChannel, PauliChannel, QcoreError};
use crate::scalar::{tol, Scalar};
use crate::tomography::repr::{ChiMatrix, ChoiMatrix};
use crate::tomography::TomographyError;

/// Branch probabilities closer than this make the virtual combination
/// numerically undefined.
const BRANCH_GAP_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum PurifyError {
    #[error("visibility {value} is outside [0, 1]")]
    VisibilityOutOfRange { value: f64 },
    #[error("channel is not trace preserving: completeness residual {residual}")]
    NotCptp { residual: f64 },
    #[error("virtual channel is undefined: branch probabilities coincide")]
    UndefinedVirtualChannel,
    #[error(transparent)]
    Tomography(#[from] TomographyError),
    #[error(transparent)]
    Core(#[from] QcoreError),
}

/// Interference model parameters for the circuit run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircuitConfig<T> {
    /// Contrast of the control-qubit interference: scales the coherence
    /// (cross) blocks of the control before readout. 1 is the ideal
    /// circuit; 0 erases the purification entirely.
    pub visibility: T,
    /// Carried along for reproducibility of any downstream sampling; the
    /// simulation itself is deterministic.
    pub seed: u64,
}

impl<T: Scalar> CircuitConfig<T> {
    pub fn new(visibility: T) -> Result<Self, PurifyError> {
        if !(visibility >= T::zero() && visibility <= T::one()) {
            return Err(PurifyError::VisibilityOutOfRange {
                value: visibility.as_f64(),
            });
        }
        Ok(CircuitConfig {
            visibility,
            seed: 0,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

impl<T: Scalar> Default for CircuitConfig<T> {
    fn default() -> Self {
        CircuitConfig {
            visibility: T::one(),
            seed: 0,
        }
    }
}

/// Everything the circuit produces for one pair of channels.
#[derive(Clone, Debug)]
pub struct PurificationOutcome<T> {
    /// Normalized physical channel on the |+> control outcome.
    pub plus_channel: KrausChannel<T>,
    /// Physical channel on the |-> outcome; absent when that outcome has
    /// (numerically) zero probability.
    pub minus_channel: Option<KrausChannel<T>>,
    pub p_plus: T,
    pub p_minus: T,
    pub plus_chi: ChiMatrix<T>,
    pub minus_chi: Option<ChiMatrix<T>>,
    /// Signed branch combination; kept in chi form because it need not be
    /// completely positive. Absent when the branch probabilities coincide.
    pub virtual_chi: Option<ChiMatrix<T>>,
}

/// Swap of two registers of dimension `dim`.
pub fn swap_unitary<T: Scalar>(dim: usize) -> ComplexMatrix<T> {
    let mut s = ComplexMatrix::zeros(dim * dim, dim * dim);
    for a in 0..dim {
        for b in 0..dim {
            s[(b * dim + a, a * dim + b)] = T::cone();
        }
    }
    s
}

/// Controlled swap |0><0| (x) I + |1><1| (x) S, control most significant,
/// each swapped register of dimension `target_dim`.
pub fn fredkin_unitary<T: Scalar>(target_dim: usize) -> ComplexMatrix<T> {
    assert!(target_dim >= 2, "swapped registers need dimension >= 2");
    let dd = target_dim * target_dim;
    let swap = swap_unitary::<T>(target_dim);
    let mut f = ComplexMatrix::zeros(2 * dd, 2 * dd);
    for k in 0..dd {
        f[(k, k)] = T::cone();
    }
    for r in 0..dd {
        for c in 0..dd {
            f[(dd + r, dd + c)] = swap[(r, c)];
        }
    }
    f
}

/// Run the exact circuit: control |+>, maximally mixed ancilla, `rho` on
/// the system register; `c1` acts on the ancilla and `c2` on the system
/// between the two Fredkin gates. Branch maps are extracted by running a
/// complete operator basis through the circuit; branch probabilities refer
/// to the supplied input state.
pub fn simulate_purification<T: Scalar>(
    c1: &KrausChannel<T>,
    c2: &KrausChannel<T>,
    rho: &DensityMatrix<T>,
    cfg: &CircuitConfig<T>,
) -> Result<PurificationOutcome<T>, PurifyError> {
    let d = rho.dim();
    if [c1.dim_in(), c1.dim_out(), c2.dim_in(), c2.dim_out()]
        .iter()
        .any(|&x| x != d)
    {
        return Err(PurifyError::Core(QcoreError::DimensionMismatch {
            context: "channels and state must share one register dimension",
        }));
    }
    qubit_count(d).map_err(|_| TomographyError::NonQubitDim { dim: d })?;
    for ch in [c1, c2] {
        let diag = ch.is_cptp(tol::cptp());
        if !diag.is_cptp {
            return Err(PurifyError::NotCptp {
                residual: diag.residual.as_f64(),
            });
        }
    }
    let v = cfg.visibility;
    if !(v >= T::zero() && v <= T::one()) {
        return Err(PurifyError::VisibilityOutOfRange { value: v.as_f64() });
    }

    let dd = d * d;
    let fredkin = fredkin_unitary::<T>(d);
    let half = T::real(0.5);
    // Full-register Kraus set of (ancilla channel) (x) (system channel),
    // identity on the control.
    let id2 = ComplexMatrix::<T>::identity(2);
    let kraus: Vec<ComplexMatrix<T>> = c1
        .ops()
        .iter()
        .flat_map(|k| {
            c2.ops()
                .iter()
                .map(|l| tensor_product(&id2, &tensor_product(k, l)))
                .collect::<Vec<_>>()
        })
        .collect();
    let control_plus =
        ComplexMatrix::from_fn(2, 2, |_, _| T::creal(0.5));
    let mixed_ancilla =
        ComplexMatrix::<T>::identity(d).scale_real(T::one() / T::from_usize(d).unwrap());

    // Unnormalized output of both control branches for one system input.
    let run = |input: &ComplexMatrix<T>| -> (ComplexMatrix<T>, ComplexMatrix<T>) {
        let start = tensor_product(&control_plus, &tensor_product(&mixed_ancilla, input));
        let mut state = fredkin.matmul(&start).matmul(&fredkin);
        let mut after = ComplexMatrix::zeros(2 * dd, 2 * dd);
        for m in &kraus {
            after = after.add(&m.matmul(&state).matmul(&m.adjoint()));
        }
        state = fredkin.matmul(&after).matmul(&fredkin);
        let block = |bi: usize, bj: usize| {
            ComplexMatrix::from_fn(dd, dd, |r, c| state[(bi * dd + r, bj * dd + c)])
        };
        let diagonal = block(0, 0).add(&block(1, 1));
        let cross = block(0, 1).add(&block(1, 0)).scale_real(v);
        let plus = diagonal.add(&cross).scale_real(half);
        let minus = diagonal.sub(&cross).scale_real(half);
        let drop_ancilla = |m: &ComplexMatrix<T>| {
            partial_trace_matrix(m, &[d, d], &[1]).expect("register layout is fixed")
        };
        (drop_ancilla(&plus), drop_ancilla(&minus))
    };

    // Choi operators of the unnormalized branch maps.
    let mut plus_raw = ComplexMatrix::zeros(dd, dd);
    let mut minus_raw = ComplexMatrix::zeros(dd, dd);
    for j in 0..d {
        for k in 0..d {
            let mut unit = ComplexMatrix::zeros(d, d);
            unit[(j, k)] = T::cone();
            let (bp, bm) = run(&unit);
            for i in 0..d {
                for ip in 0..d {
                    plus_raw[(i * d + j, ip * d + k)] = bp[(i, ip)];
                    minus_raw[(i * d + j, ip * d + k)] = bm[(i, ip)];
                }
            }
        }
    }
    let plus_unnorm = ChoiMatrix::from_entries(d, plus_raw)?;
    let minus_unnorm = ChoiMatrix::from_entries(d, minus_raw)?;
    let p_plus = plus_unnorm.apply_matrix(rho.matrix()).trace().re;
    let p_minus = minus_unnorm.apply_matrix(rho.matrix()).trace().re;
    debug_assert!((p_plus + p_minus - T::one()).abs() < T::real(1e-8));

    let gap_tol = T::real(BRANCH_GAP_TOL);
    let normalize = |raw: &ChoiMatrix<T>, p: T| -> Result<(KrausChannel<T>, ChiMatrix<T>), PurifyError> {
        let choi = ChoiMatrix::from_entries(d, raw.entries().scale_real(T::one() / p))?;
        let channel = choi.to_kraus()?;
        let chi = ChiMatrix::from_choi(&choi)?;
        Ok((channel, chi))
    };
    let (plus_channel, plus_chi) = normalize(&plus_unnorm, p_plus)?;
    let (minus_channel, minus_chi) = if p_minus > gap_tol {
        let (ch, chi) = normalize(&minus_unnorm, p_minus)?;
        (Some(ch), Some(chi))
    } else {
        (None, None)
    };

    let mut outcome = PurificationOutcome {
        plus_channel,
        minus_channel,
        p_plus,
        p_minus,
        plus_chi,
        minus_chi,
        virtual_chi: None,
    };
    outcome.virtual_chi = virtual_combination(&outcome).ok();
    Ok(outcome)
}

/// Signed branch combination (p+ C+ - p- C-)/(p+ - p-) in chi form. Linear
/// and trace preserving, but in general not completely positive.
pub fn virtual_combination<T: Scalar>(
    outcome: &PurificationOutcome<T>,
) -> Result<ChiMatrix<T>, PurifyError> {
    let gap = outcome.p_plus - outcome.p_minus;
    if gap.abs() <= T::real(BRANCH_GAP_TOL) {
        return Err(PurifyError::UndefinedVirtualChannel);
    }
    let mut entries = outcome.plus_chi.entries().scale_real(outcome.p_plus);
    if let Some(minus) = &outcome.minus_chi {
        entries = entries.sub(&minus.entries().scale_real(outcome.p_minus));
    }
    entries = entries.scale_real(T::one() / gap);
    Ok(ChiMatrix::from_entries(
        outcome.plus_chi.n_qubits(),
        entries,
    )?)
}

/// Purified distribution for two identical channels:
/// p'_i = p_i (1 + p_i) / (1 + sum_j p_j^2).
pub fn purified_pauli_probs<T: Scalar>(p: &PauliChannel<T>) -> PauliChannel<T> {
    let norm = T::one() + p.collision_sum();
    let probs: Vec<T> = p
        .probs()
        .iter()
        .map(|&pi| pi * (T::one() + pi) / norm)
        .collect();
    PauliChannel::new(p.n_qubits(), probs).expect("closed form preserves normalization")
}

/// Virtual distribution for two identical channels: p''_i = p_i^2 / sum_j p_j^2.
pub fn virtual_pauli_probs<T: Scalar>(p: &PauliChannel<T>) -> PauliChannel<T> {
    let norm = p.collision_sum();
    let probs: Vec<T> = p.probs().iter().map(|&pi| pi * pi / norm).collect();
    PauliChannel::new(p.n_qubits(), probs).expect("closed form preserves normalization")
}

fn cross_sum<T: Scalar>(q: &PauliChannel<T>, r: &PauliChannel<T>) -> T {
    q.probs()
        .iter()
        .zip(r.probs())
        .map(|(&a, &b)| a * b)
        .sum()
}

/// Branch statistics as (plus, minus, p_plus); the minus branch is absent
/// when its probability vanishes.
pub type BranchProbs<T> = (PauliChannel<T>, Option<PauliChannel<T>>, T);

/// Closed-form branch distributions for two distinct channels at full
/// visibility.
pub fn two_channel_purified_probs<T: Scalar>(
    q: &PauliChannel<T>,
    r: &PauliChannel<T>,
) -> Result<BranchProbs<T>, PurifyError> {
    two_channel_purified_probs_with_visibility(q, r, T::one())
}

/// Branch distributions with the interference cross term scaled by `v`:
/// plus_a = (q_a + r_a + 2 v q_a r_a) / (2 (1 + v sum qr)), p_plus =
/// (1 + v sum qr)/2, and the sign flipped throughout for the minus branch.
pub fn two_channel_purified_probs_with_visibility<T: Scalar>(
    q: &PauliChannel<T>,
    r: &PauliChannel<T>,
    v: T,
) -> Result<BranchProbs<T>, PurifyError> {
    if q.n_qubits() != r.n_qubits() {
        return Err(PurifyError::Core(QcoreError::DimensionMismatch {
            context: "branch distributions need channels on the same qubits",
        }));
    }
    if !(v >= T::zero() && v <= T::one()) {
        return Err(PurifyError::VisibilityOutOfRange { value: v.as_f64() });
    }
    let two = T::real(2.0);
    let cross = v * cross_sum(q, r);
    let p_plus = (T::one() + cross) / two;
    let p_minus = (T::one() - cross) / two;
    let branch = |sign: T| -> PauliChannel<T> {
        let norm = two * (T::one() + sign * cross);
        let probs: Vec<T> = q
            .probs()
            .iter()
            .zip(r.probs())
            .map(|(&a, &b)| (a + b + sign * two * v * a * b) / norm)
            .collect();
        PauliChannel::new(q.n_qubits(), probs).expect("closed form preserves normalization")
    };
    let plus = branch(T::one());
    let minus = if p_minus > T::real(BRANCH_GAP_TOL) {
        Some(branch(-T::one()))
    } else {
        None
    };
    Ok((plus, minus, p_plus))
}

/// Closed-form virtual distribution for two distinct channels:
/// v_a = q_a r_a / sum_b q_b r_b. Visibility cancels out of this ratio.
pub fn two_channel_virtual_probs<T: Scalar>(
    q: &PauliChannel<T>,
    r: &PauliChannel<T>,
) -> Result<PauliChannel<T>, PurifyError> {
    if q.n_qubits() != r.n_qubits() {
        return Err(PurifyError::Core(QcoreError::DimensionMismatch {
            context: "branch distributions need channels on the same qubits",
        }));
    }
    let cross = cross_sum(q, r);
    if cross <= T::real(BRANCH_GAP_TOL) {
        return Err(PurifyError::UndefinedVirtualChannel);
    }
    let probs: Vec<T> = q
        .probs()
        .iter()
        .zip(r.probs())
        .map(|(&a, &b)| a * b / cross)
        .collect();
    Ok(PauliChannel::new(q.n_qubits(), probs).expect("closed form preserves normalization"))
}

/// Average over all Pauli conjugations, which wipes the chi off-diagonals
/// and leaves the channel's Pauli-diagonal part.
pub fn pauli_twirl<T: Scalar>(ch: &KrausChannel<T>) -> Result<PauliChannel<T>, PurifyError> {
    if ch.dim_in() != ch.dim_out() {
        return Err(PurifyError::Core(QcoreError::DimensionMismatch {
            context: "twirling needs a square channel",
        }));
    }
    let n = qubit_count(ch.dim_in())?;
    let scale = T::one() / T::from_usize(1 << n).unwrap();
    let mut ops = Vec::with_capacity((1usize << (2 * n)) * ch.ops().len());
    for p in pauli_basis(n) {
        let pm = p.matrix::<T>();
        for k in ch.ops() {
            ops.push(pm.matmul(k).matmul(&pm).scale_real(scale));
        }
    }
    let twirled = KrausChannel::new(ops)?;
    let chi = ChiMatrix::from_kraus(&twirled)?;
    Ok(chi.to_pauli_channel(T::real(1e-10))?)
}

/// X-basis readout of one qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Which purification branch a measurement belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Outcome relabeling for the Bell-state-control variant of the circuit:
/// equal signs on the two control qubits play the role of the |+> outcome,
/// opposite signs the |-> outcome.
pub fn map_bell_control_outcomes(pair: (Sign, Sign)) -> Branch {
    if pair.0 == pair.1 {
        Branch::Plus
    } else {
        Branch::Minus
    }
}
