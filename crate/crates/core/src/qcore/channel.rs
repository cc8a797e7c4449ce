//! Quantum channels: general Kraus form and the Pauli-diagonal special case.

use num_complex::Complex;

use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::pauli::{pauli_basis, PauliString};
use crate::qcore::state::DensityMatrix;
use crate::qcore::QcoreError;
use crate::scalar::{tol, Scalar};

/// CPTP map in Kraus form: rho -> sum_k K_k rho K_k^dag.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel<T> {
    dim_in: usize,
    dim_out: usize,
    ops: Vec<ComplexMatrix<T>>,
}

/// Outcome of a completeness check, keeping the measured residual visible.
#[derive(Clone, Copy, Debug)]
pub struct CptpDiagnostic<T> {
    pub is_cptp: bool,
    /// Max-norm of sum K^dag K - I.
    pub residual: T,
    pub tolerance: T,
}

impl<T: Scalar> KrausChannel<T> {
    /// Wrap a Kraus set. Shapes must agree; completeness is checked lazily
    /// via [`KrausChannel::is_cptp`] so non-TP maps (measurement branches)
    /// can be represented too.
    pub fn new(ops: Vec<ComplexMatrix<T>>) -> Result<Self, QcoreError> {
        let first = ops.first().ok_or(QcoreError::EmptyKrausSet)?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        if dim_in < 2 || dim_out < 2 {
            return Err(QcoreError::DimensionMismatch {
                context: "Kraus operators must act on dim >= 2",
            });
        }
        if ops
            .iter()
            .any(|k| k.rows() != dim_out || k.cols() != dim_in)
        {
            return Err(QcoreError::DimensionMismatch {
                context: "Kraus operators must share one shape",
            });
        }
        Ok(KrausChannel {
            dim_in,
            dim_out,
            ops,
        })
    }

    /// The identity channel on the given dimension.
    pub fn identity(dim: usize) -> Self {
        KrausChannel {
            dim_in: dim,
            dim_out: dim,
            ops: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// A unitary as a single-Kraus channel.
    pub fn from_unitary(u: ComplexMatrix<T>) -> Result<Self, QcoreError> {
        if !u.is_square() {
            return Err(QcoreError::DimensionMismatch {
                context: "unitary channel needs a square matrix",
            });
        }
        Self::new(vec![u])
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn ops(&self) -> &[ComplexMatrix<T>] {
        &self.ops
    }

    /// Max-norm of `sum K^dag K - I`.
    pub fn completeness_residual(&self) -> T {
        let mut acc = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.ops {
            acc = acc.add(&k.adjoint().matmul(k));
        }
        acc.max_abs_diff(&ComplexMatrix::identity(self.dim_in))
    }

    /// Completeness check with the measured residual.
    pub fn is_cptp(&self, tolerance: T) -> CptpDiagnostic<T> {
        let residual = self.completeness_residual();
        CptpDiagnostic {
            is_cptp: residual <= tolerance,
            residual,
            tolerance,
        }
    }

    /// Linear action on an arbitrary operator (not necessarily a state).
    pub fn apply_matrix(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(m.rows(), self.dim_in, "operator dim mismatch");
        assert_eq!(m.cols(), self.dim_in, "operator dim mismatch");
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.ops {
            out = out.add(&k.matmul(m).matmul(&k.adjoint()));
        }
        out
    }

    /// Channel action on a state. The output is clamped back onto the
    /// density-matrix invariants, which only repairs arithmetic noise when
    /// the channel is CPTP.
    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>, QcoreError> {
        if rho.dim() != self.dim_in {
            return Err(QcoreError::DimensionMismatch {
                context: "state dim does not match channel input dim",
            });
        }
        DensityMatrix::new_clamped(self.apply_matrix(rho.matrix()))
    }

    /// `self` after `inner`: Kraus set {A_i B_j}.
    pub fn compose_after(&self, inner: &KrausChannel<T>) -> Result<KrausChannel<T>, QcoreError> {
        if self.dim_in != inner.dim_out {
            return Err(QcoreError::DimensionMismatch {
                context: "composition dims do not chain",
            });
        }
        let mut ops = Vec::with_capacity(self.ops.len() * inner.ops.len());
        for a in &self.ops {
            for b in &inner.ops {
                ops.push(a.matmul(b));
            }
        }
        Ok(KrausChannel {
            dim_in: inner.dim_in,
            dim_out: self.dim_out,
            ops,
        })
    }

    /// Independent channels on adjacent registers, `self` on the most
    /// significant one.
    pub fn tensor(&self, other: &KrausChannel<T>) -> KrausChannel<T> {
        let mut ops = Vec::with_capacity(self.ops.len() * other.ops.len());
        for a in &self.ops {
            for b in &other.ops {
                ops.push(a.kron(b));
            }
        }
        KrausChannel {
            dim_in: self.dim_in * other.dim_in,
            dim_out: self.dim_out * other.dim_out,
            ops,
        }
    }
}

/// Probability mixture of Pauli conjugations: rho -> sum_a p_a P_a rho P_a.
///
/// Probabilities are stored densely, indexed by [`PauliString::basis_index`].
#[derive(Clone, Debug, PartialEq)]
pub struct PauliChannel<T> {
    n_qubits: usize,
    probs: Vec<T>,
}

impl<T: Scalar> PauliChannel<T> {
    /// Validate a dense probability vector of length 4^n.
    pub fn new(n_qubits: usize, probs: Vec<T>) -> Result<Self, QcoreError> {
        if n_qubits == 0 || probs.len() != 4usize.pow(n_qubits as u32) {
            return Err(QcoreError::DimensionMismatch {
                context: "Pauli channel needs 4^n probabilities",
            });
        }
        let slack = T::real(1e-12);
        for &p in &probs {
            if p < -slack || p > T::one() + slack || !p.is_finite() {
                return Err(QcoreError::BadProbability { value: p.as_f64() });
            }
        }
        let sum: T = probs.iter().copied().sum();
        if (sum - T::one()).abs() > tol::prob_sum() {
            return Err(QcoreError::ProbabilitySumNotOne { sum: sum.as_f64() });
        }
        let probs = probs
            .into_iter()
            .map(|p| p.max(T::zero()).min(T::one()))
            .collect();
        Ok(PauliChannel { n_qubits, probs })
    }

    /// Build from (label, probability) pairs; unlisted strings get zero.
    pub fn from_labeled(
        n_qubits: usize,
        entries: &[(&str, T)],
    ) -> Result<Self, QcoreError> {
        let mut probs = vec![T::zero(); 4usize.pow(n_qubits as u32)];
        for (label, p) in entries {
            let s = PauliString::parse(label)?;
            if s.n_qubits() != n_qubits {
                return Err(QcoreError::BadPauliLabel {
                    label: (*label).to_string(),
                });
            }
            probs[s.basis_index()] += *p;
        }
        Self::new(n_qubits, probs)
    }

    /// The noiseless channel {I: 1}.
    pub fn identity(n_qubits: usize) -> Self {
        let mut probs = vec![T::zero(); 4usize.pow(n_qubits as u32)];
        probs[0] = T::one();
        PauliChannel { n_qubits, probs }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Dense probabilities in basis-index order.
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Probability of the identity string.
    pub fn identity_prob(&self) -> T {
        self.probs[0]
    }

    pub fn prob(&self, s: &PauliString) -> T {
        assert_eq!(s.n_qubits(), self.n_qubits);
        self.probs[s.basis_index()]
    }

    /// (label, probability) pairs in basis order.
    pub fn labeled_probs(&self) -> Vec<(String, T)> {
        pauli_basis(self.n_qubits)
            .iter()
            .zip(self.probs.iter())
            .map(|(s, &p)| (s.label(), p))
            .collect()
    }

    /// sum_a p_a^2, the collision weight driving the purification formulas.
    pub fn collision_sum(&self) -> T {
        self.probs.iter().map(|&p| p * p).sum()
    }

    /// Kraus form with operators sqrt(p_a) P_a (zero-probability terms
    /// dropped).
    pub fn to_kraus(&self) -> KrausChannel<T> {
        let ops: Vec<ComplexMatrix<T>> = pauli_basis(self.n_qubits)
            .iter()
            .zip(self.probs.iter())
            .filter(|(_, &p)| p > T::zero())
            .map(|(s, &p)| s.matrix::<T>().scale_real(p.sqrt()))
            .collect();
        if ops.is_empty() {
            // All-zero probs cannot pass new(); keep a defensive identity.
            return KrausChannel::identity(self.dim());
        }
        KrausChannel {
            dim_in: self.dim(),
            dim_out: self.dim(),
            ops,
        }
    }

    /// Direct mixture action sum_a p_a P_a m P_a, the oracle the Kraus form
    /// is tested against.
    pub fn apply_matrix(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(m.rows(), self.dim());
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for (s, &p) in pauli_basis(self.n_qubits).iter().zip(self.probs.iter()) {
            if p == T::zero() {
                continue;
            }
            let pm = s.matrix::<T>();
            out = out.add(&pm.matmul(m).matmul(&pm).scale_real(p));
        }
        out
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>, QcoreError> {
        if rho.dim() != self.dim() {
            return Err(QcoreError::DimensionMismatch {
                context: "state dim does not match channel dim",
            });
        }
        DensityMatrix::new_clamped(self.apply_matrix(rho.matrix()))
    }
}

/// Conversion named for discoverability; same as [`PauliChannel::to_kraus`].
pub fn pauli_channel_to_kraus<T: Scalar>(pc: &PauliChannel<T>) -> KrausChannel<T> {
    pc.to_kraus()
}

/// rho -> p rho + (1-p) I/2: survival probability p of the input state.
///
/// Expanding I/2 over Pauli conjugations gives probabilities
/// {I: p + (1-p)/4, X: (1-p)/4, Y: (1-p)/4, Z: (1-p)/4}.
pub fn depolarizing_channel<T: Scalar>(p: T) -> Result<PauliChannel<T>, QcoreError> {
    check_probability(p)?;
    let quarter = (T::one() - p) / T::real(4.0);
    PauliChannel::new(1, vec![p + quarter, quarter, quarter, quarter])
}

/// Identity with probability p0, bit flip (X) with probability 1-p0.
pub fn bit_flip_channel<T: Scalar>(p0: T) -> Result<PauliChannel<T>, QcoreError> {
    check_probability(p0)?;
    PauliChannel::new(1, vec![p0, T::one() - p0, T::zero(), T::zero()])
}

/// Identity with probability p0, phase flip (Z) with probability 1-p0.
pub fn phase_flip_channel<T: Scalar>(p0: T) -> Result<PauliChannel<T>, QcoreError> {
    check_probability(p0)?;
    PauliChannel::new(1, vec![p0, T::zero(), T::zero(), T::one() - p0])
}

fn check_probability<T: Scalar>(p: T) -> Result<(), QcoreError> {
    if p < T::zero() || p > T::one() || !p.is_finite() {
        Err(QcoreError::BadProbability { value: p.as_f64() })
    } else {
        Ok(())
    }
}

/// Random-testing helpers shared by unit, integration, and acceptance tests.
pub mod random {
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    /// Deterministic RNG for a (seed, stream) pair.
    pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(stream);
        r
    }

    /// Random single- or multi-qubit Pauli channel with strictly positive
    /// normalized probabilities.
    pub fn pauli_channel<T: Scalar>(n_qubits: usize, rng: &mut ChaCha8Rng) -> PauliChannel<T> {
        let count = 4usize.pow(n_qubits as u32);
        let mut probs: Vec<T> = (0..count).map(|_| T::real(rng.gen::<f64>())).collect();
        let sum: T = probs.iter().copied().sum();
        for p in &mut probs {
            *p /= sum;
        }
        renormalize_exact(&mut probs);
        PauliChannel::new(n_qubits, probs).expect("normalized by construction")
    }

    /// Random Pauli channel whose identity probability is the strict
    /// maximum (the purification-friendly regime).
    pub fn dominant_identity_pauli_channel<T: Scalar>(
        n_qubits: usize,
        rng: &mut ChaCha8Rng,
    ) -> PauliChannel<T> {
        let count = 4usize.pow(n_qubits as u32);
        // Identity weight above 1/2 guarantees strict dominance.
        let w0 = 0.5 + 0.5 * rng.gen::<f64>();
        let mut rest: Vec<f64> = (0..count - 1).map(|_| rng.gen::<f64>()).collect();
        let rest_sum: f64 = rest.iter().sum();
        for r in &mut rest {
            *r *= (1.0 - w0) / rest_sum;
        }
        let mut probs: Vec<T> = std::iter::once(w0).chain(rest).map(T::real).collect();
        renormalize_exact(&mut probs);
        PauliChannel::new(n_qubits, probs).expect("normalized by construction")
    }

    /// Random density matrix from a normalized Wishart-style product.
    pub fn density_matrix<T: Scalar>(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix<T> {
        let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
            Complex::new(
                T::real(rng.gen::<f64>() * 2.0 - 1.0),
                T::real(rng.gen::<f64>() * 2.0 - 1.0),
            )
        });
        let h = g.matmul(&g.adjoint());
        let tr = h.trace().re;
        DensityMatrix::new_clamped(h.scale_real(T::one() / tr)).expect("PSD by construction")
    }

    /// Random CPTP channel: a random Kraus set orthonormalized through the
    /// inverse square root of its completeness sum.
    pub fn cptp_channel<T: Scalar>(
        dim: usize,
        n_kraus: usize,
        rng: &mut ChaCha8Rng,
    ) -> KrausChannel<T> {
        let raw: Vec<ComplexMatrix<T>> = (0..n_kraus.max(1))
            .map(|_| {
                ComplexMatrix::from_fn(dim, dim, |_, _| {
                    Complex::new(
                        T::real(rng.gen::<f64>() * 2.0 - 1.0),
                        T::real(rng.gen::<f64>() * 2.0 - 1.0),
                    )
                })
            })
            .collect();
        let mut s = ComplexMatrix::zeros(dim, dim);
        for k in &raw {
            s = s.add(&k.adjoint().matmul(k));
        }
        let s_inv_sqrt = s.hermitian_map(|x| T::one() / x.sqrt());
        let ops = raw.into_iter().map(|k| k.matmul(&s_inv_sqrt)).collect();
        KrausChannel::new(ops).expect("shapes uniform by construction")
    }

    /// Make float probabilities sum to one exactly by absorbing the rounding
    /// remainder into the largest entry.
    pub fn renormalize_exact<T: Scalar>(probs: &mut [T]) {
        let sum: T = probs.iter().copied().sum();
        let mut largest = 0usize;
        for (i, p) in probs.iter().enumerate() {
            if *p > probs[largest] {
                largest = i;
            }
        }
        probs[largest] += T::one() - sum;
    }
}
