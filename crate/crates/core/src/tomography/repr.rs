//! Chi, Choi, and Pauli-transfer representations of channels.
//!
//! Conventions, fixed once and inherited everywhere:
//!
//! - Chi is expressed in the plain (unnormalized) Pauli-string basis with
//!   `chi_ab = sum_k c_ka conj(c_kb)` where `K_k = sum_a c_ka P_a` and
//!   `c_ka = tr(P_a K_k)/d`. A trace-preserving channel then has
//!   `tr(chi) = 1` and a Pauli channel's chi diagonal IS its probability
//!   vector, so the (I,I) element reads directly as the noiseless weight.
//! - Choi is `sum_jk C(|j><k|) (x) |j><k|` (output factor first,
//!   unnormalized): PSD iff completely positive, partial trace over the
//!   output equals I iff trace preserving.
//! - The Pauli transfer matrix is `R_ab = tr(P_a C(P_b))/d`, real for any
//!   Hermiticity-preserving map; trace preservation pins its first row to
//!   (1, 0, ..., 0).

use num_complex::Complex;

use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::pauli::{pauli_basis, pauli_coefficients, qubit_count, PauliString};
use crate::qcore::{KrausChannel, PauliChannel, QcoreError};
use crate::scalar::{tol, Scalar, C};
use crate::tomography::TomographyError;

/// Process matrix in the Pauli operator basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiMatrix<T> {
    n_qubits: usize,
    entries: ComplexMatrix<T>,
}

impl<T: Scalar> ChiMatrix<T> {
    /// Wrap an explicit matrix; must be 4^n x 4^n and Hermitian.
    pub fn from_entries(n_qubits: usize, entries: ComplexMatrix<T>) -> Result<Self, TomographyError> {
        let size = 4usize.pow(n_qubits as u32);
        if n_qubits == 0 || !entries.is_square() || entries.rows() != size {
            return Err(TomographyError::Core(QcoreError::DimensionMismatch {
                context: "chi matrix must be 4^n x 4^n",
            }));
        }
        let herm = entries.hermiticity_residual();
        if herm > tol::hermitian() {
            return Err(TomographyError::NotHermitian {
                residual: herm.as_f64(),
            });
        }
        Ok(ChiMatrix { n_qubits, entries })
    }

    /// Chi of a Kraus channel via the Pauli expansion of each operator.
    pub fn from_kraus(ch: &KrausChannel<T>) -> Result<Self, TomographyError> {
        if ch.dim_in() != ch.dim_out() {
            return Err(TomographyError::Core(QcoreError::DimensionMismatch {
                context: "chi needs a square channel",
            }));
        }
        let n = qubit_count(ch.dim_in()).map_err(|_| TomographyError::NonQubitDim {
            dim: ch.dim_in(),
        })?;
        let size = 4usize.pow(n as u32);
        // Row k: coefficients of K_k over the Pauli strings (tr(P_a K)/d
        // is already folded into the expansion).
        let coeffs: Vec<Vec<C<T>>> = ch
            .ops()
            .iter()
            .map(|k| pauli_coefficients(k).expect("dims validated above"))
            .collect();
        let mut entries = ComplexMatrix::zeros(size, size);
        for row in &coeffs {
            for a in 0..size {
                if row[a] == T::czero() {
                    continue;
                }
                for b in 0..size {
                    entries[(a, b)] += row[a] * row[b].conj();
                }
            }
        }
        Ok(ChiMatrix { n_qubits: n, entries })
    }

    /// Diagonal chi of a Pauli channel.
    pub fn from_pauli_channel(pc: &PauliChannel<T>) -> Self {
        let size = 4usize.pow(pc.n_qubits() as u32);
        let mut entries = ComplexMatrix::zeros(size, size);
        for (a, &p) in pc.probs().iter().enumerate() {
            entries[(a, a)] = Complex::new(p, T::zero());
        }
        ChiMatrix {
            n_qubits: pc.n_qubits(),
            entries,
        }
    }

    /// Chi reconstructed from a Choi matrix: `chi_ab = <w_a|Choi|w_b>/d^2`
    /// with `|w_a> = vec(P_a)`.
    pub fn from_choi(choi: &ChoiMatrix<T>) -> Result<Self, TomographyError> {
        let d = choi.dim();
        let n = qubit_count(d).map_err(|_| TomographyError::NonQubitDim { dim: d })?;
        let size = 4usize.pow(n as u32);
        let vecs: Vec<Vec<C<T>>> = pauli_basis(n)
            .iter()
            .map(|p| vectorize(&p.matrix::<T>()))
            .collect();
        let inv_d2 = T::one() / T::from_usize(d * d).unwrap();
        let entries = ComplexMatrix::from_fn(size, size, |a, b| {
            let mut acc = T::czero();
            for (r, wa) in vecs[a].iter().enumerate() {
                for (c, wb) in vecs[b].iter().enumerate() {
                    acc += wa.conj() * choi.entries()[(r, c)] * *wb;
                }
            }
            acc * Complex::new(inv_d2, T::zero())
        });
        Ok(ChiMatrix { n_qubits: n, entries })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Hilbert-space dimension (2^n).
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Matrix side length (4^n).
    pub fn size(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &ComplexMatrix<T> {
        &self.entries
    }

    /// Element addressed by Pauli labels, e.g. `("I", "I")`.
    pub fn element(&self, a: &str, b: &str) -> Result<C<T>, TomographyError> {
        let ia = self.label_index(a)?;
        let ib = self.label_index(b)?;
        Ok(self.entries[(ia, ib)])
    }

    fn label_index(&self, label: &str) -> Result<usize, TomographyError> {
        let s = PauliString::parse(label).map_err(|_| TomographyError::BadLabel {
            label: label.to_string(),
        })?;
        if s.n_qubits() != self.n_qubits {
            return Err(TomographyError::BadLabel {
                label: label.to_string(),
            });
        }
        Ok(s.basis_index())
    }

    /// The (I..I, I..I) element: the noiseless-component weight.
    pub fn identity_element(&self) -> T {
        self.entries[(0, 0)].re
    }

    pub fn trace(&self) -> C<T> {
        self.entries.trace()
    }

    /// Real diagonal.
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.size()).map(|a| self.entries[(a, a)].re).collect()
    }

    /// Largest off-diagonal magnitude.
    pub fn max_off_diagonal(&self) -> T {
        let mut worst = T::zero();
        for a in 0..self.size() {
            for b in 0..self.size() {
                if a != b {
                    worst = worst.max(self.entries[(a, b)].norm());
                }
            }
        }
        worst
    }

    /// Chi with off-diagonals removed: the twirled process.
    pub fn zero_off_diagonals(&self) -> ChiMatrix<T> {
        let size = self.size();
        let entries = ComplexMatrix::from_fn(size, size, |a, b| {
            if a == b {
                self.entries[(a, b)]
            } else {
                T::czero()
            }
        });
        ChiMatrix {
            n_qubits: self.n_qubits,
            entries,
        }
    }

    /// Interpret a (near-)diagonal chi as a Pauli channel.
    pub fn to_pauli_channel(&self, off_diag_tol: T) -> Result<PauliChannel<T>, TomographyError> {
        let off = self.max_off_diagonal();
        if off > off_diag_tol {
            return Err(TomographyError::NotPauliDiagonal {
                off_diagonal: off.as_f64(),
            });
        }
        Ok(PauliChannel::new(self.n_qubits, self.diagonal())?)
    }

    /// Action on an operator: `sum_ab chi_ab P_a m P_b`.
    pub fn apply_matrix(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let d = self.dim();
        assert_eq!(m.rows(), d);
        assert_eq!(m.cols(), d);
        let paulis: Vec<ComplexMatrix<T>> =
            pauli_basis(self.n_qubits).iter().map(|p| p.matrix()).collect();
        // Precompute P_a m once per row of chi.
        let mut out = ComplexMatrix::zeros(d, d);
        for (a, pa) in paulis.iter().enumerate() {
            let pam = pa.matmul(m);
            for (b, pb) in paulis.iter().enumerate() {
                let w = self.entries[(a, b)];
                if w == T::czero() {
                    continue;
                }
                out = out.add(&pam.matmul(pb).scale(w));
            }
        }
        out
    }

    /// Smallest eigenvalue; negative beyond tolerance marks a non-physical
    /// (virtual) process.
    pub fn min_eigenvalue(&self) -> T {
        self.entries.hermitian_eigen().eigenvalues[0]
    }

    /// Choi matrix `sum_ab chi_ab |w_a><w_b|`.
    pub fn to_choi(&self) -> ChoiMatrix<T> {
        let d = self.dim();
        let size = self.size();
        let vecs: Vec<Vec<C<T>>> = pauli_basis(self.n_qubits)
            .iter()
            .map(|p| vectorize(&p.matrix::<T>()))
            .collect();
        let mut entries = ComplexMatrix::zeros(d * d, d * d);
        for a in 0..size {
            for b in 0..size {
                let w = self.entries[(a, b)];
                if w == T::czero() {
                    continue;
                }
                for r in 0..d * d {
                    if vecs[a][r] == T::czero() {
                        continue;
                    }
                    for c in 0..d * d {
                        entries[(r, c)] += w * vecs[a][r] * vecs[b][c].conj();
                    }
                }
            }
        }
        ChoiMatrix { dim: d, entries }
    }
}

/// Choi operator of a channel, output factor first, unnormalized
/// (trace = d for a trace-preserving channel).
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix<T> {
    dim: usize,
    entries: ComplexMatrix<T>,
}

impl<T: Scalar> ChoiMatrix<T> {
    /// Wrap an explicit d^2 x d^2 matrix.
    pub fn from_entries(dim: usize, entries: ComplexMatrix<T>) -> Result<Self, TomographyError> {
        if dim < 2 || !entries.is_square() || entries.rows() != dim * dim {
            return Err(TomographyError::Core(QcoreError::DimensionMismatch {
                context: "Choi matrix must be d^2 x d^2",
            }));
        }
        Ok(ChoiMatrix { dim, entries })
    }

    /// `sum_m |vec K_m><vec K_m|`.
    pub fn from_kraus(ch: &KrausChannel<T>) -> Result<Self, TomographyError> {
        if ch.dim_in() != ch.dim_out() {
            return Err(TomographyError::Core(QcoreError::DimensionMismatch {
                context: "Choi form here covers square channels only",
            }));
        }
        let d = ch.dim_in();
        let mut entries = ComplexMatrix::zeros(d * d, d * d);
        for k in ch.ops() {
            let v = vectorize(k);
            for r in 0..d * d {
                if v[r] == T::czero() {
                    continue;
                }
                for c in 0..d * d {
                    entries[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        Ok(ChoiMatrix { dim: d, entries })
    }

    /// Build from an arbitrary linear action by running it over all matrix
    /// units.
    pub fn from_action(dim: usize, mut action: impl FnMut(&ComplexMatrix<T>) -> ComplexMatrix<T>) -> Self {
        let mut entries = ComplexMatrix::zeros(dim * dim, dim * dim);
        for j in 0..dim {
            for k in 0..dim {
                let mut unit = ComplexMatrix::zeros(dim, dim);
                unit[(j, k)] = T::cone();
                let out = action(&unit);
                for i in 0..dim {
                    for ip in 0..dim {
                        entries[(i * dim + j, ip * dim + k)] = out[(i, ip)];
                    }
                }
            }
        }
        ChoiMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &ComplexMatrix<T> {
        &self.entries
    }

    /// Channel action recovered by contraction over the input factor.
    pub fn apply_matrix(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let d = self.dim;
        assert_eq!(m.rows(), d);
        assert_eq!(m.cols(), d);
        ComplexMatrix::from_fn(d, d, |i, ip| {
            let mut acc = T::czero();
            for inner_m in 0..d {
                for j in 0..d {
                    acc += m[(inner_m, j)] * self.entries[(i * d + inner_m, ip * d + j)];
                }
            }
            acc
        })
    }

    /// Partial trace over the output factor; equals I iff trace preserving.
    pub fn trace_out(&self) -> ComplexMatrix<T> {
        let d = self.dim;
        ComplexMatrix::from_fn(d, d, |j, k| {
            (0..d).fold(T::czero(), |acc, i| {
                acc + self.entries[(i * d + j, i * d + k)]
            })
        })
    }

    /// Max-norm distance of `trace_out` from the identity.
    pub fn trace_preservation_residual(&self) -> T {
        self.trace_out()
            .max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    pub fn min_eigenvalue(&self) -> T {
        self.entries.hermitian_eigen().eigenvalues[0]
    }

    /// Kraus operators from the eigendecomposition; eigenvalues below the
    /// PSD floor are an error, small negative noise is dropped.
    pub fn to_kraus(&self) -> Result<KrausChannel<T>, TomographyError> {
        let eig = self.entries.hermitian_eigen();
        let min = eig.eigenvalues[0];
        if min < tol::psd() {
            return Err(TomographyError::NotCompletelyPositive {
                min_eigenvalue: min.as_f64(),
            });
        }
        let max = eig.eigenvalues.last().copied().unwrap_or_else(T::zero);
        let cutoff = max.max(T::one()) * T::real(1e-14);
        let d = self.dim;
        let mut ops = Vec::new();
        for (m, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda <= cutoff {
                continue;
            }
            let scale = lambda.sqrt();
            let op = ComplexMatrix::from_fn(d, d, |i, j| {
                eig.eigenvectors[(i * d + j, m)].scale(scale)
            });
            ops.push(op);
        }
        if ops.is_empty() {
            return Err(TomographyError::NotCompletelyPositive {
                min_eigenvalue: min.as_f64(),
            });
        }
        Ok(KrausChannel::new(ops)?)
    }
}

/// Real Pauli-transfer representation `R_ab = tr(P_a C(P_b))/d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTransferMatrix<T> {
    n_qubits: usize,
    entries: Vec<T>,
}

impl<T: Scalar> PauliTransferMatrix<T> {
    pub fn from_kraus(ch: &KrausChannel<T>) -> Result<Self, TomographyError> {
        if ch.dim_in() != ch.dim_out() {
            return Err(TomographyError::Core(QcoreError::DimensionMismatch {
                context: "Pauli transfer matrix needs a square channel",
            }));
        }
        let n = qubit_count(ch.dim_in()).map_err(|_| TomographyError::NonQubitDim {
            dim: ch.dim_in(),
        })?;
        Ok(Self::from_action(n, |m| ch.apply_matrix(m)))
    }

    /// Transfer matrix of an arbitrary linear action.
    pub fn from_action(
        n_qubits: usize,
        mut action: impl FnMut(&ComplexMatrix<T>) -> ComplexMatrix<T>,
    ) -> Self {
        let size = 4usize.pow(n_qubits as u32);
        let d = T::from_usize(1 << n_qubits).unwrap();
        let paulis: Vec<ComplexMatrix<T>> =
            pauli_basis(n_qubits).iter().map(|p| p.matrix()).collect();
        let mut entries = vec![T::zero(); size * size];
        for (b, pb) in paulis.iter().enumerate() {
            let out = action(pb);
            for (a, pa) in paulis.iter().enumerate() {
                // tr(P_a out)/d; Paulis are Hermitian.
                let mut acc = T::czero();
                for r in 0..pa.rows() {
                    for c in 0..pa.cols() {
                        acc += pa[(r, c)] * out[(c, r)];
                    }
                }
                entries[a * size + b] = acc.re / d;
            }
        }
        PauliTransferMatrix { n_qubits, entries }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn size(&self) -> usize {
        4usize.pow(self.n_qubits as u32)
    }

    pub fn entry(&self, a: usize, b: usize) -> T {
        self.entries[a * self.size() + b]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    /// Max deviation of the first row from (1, 0, ..., 0); zero for trace-
    /// preserving channels.
    pub fn first_row_residual(&self) -> T {
        let size = self.size();
        let mut worst = (self.entries[0] - T::one()).abs();
        for b in 1..size {
            worst = worst.max(self.entries[b].abs());
        }
        worst
    }

    /// Action on an operator through its Pauli coefficients.
    pub fn apply_matrix(&self, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let coeffs = pauli_coefficients(m).expect("operator dim matches");
        let d = 1 << self.n_qubits;
        let mut out = ComplexMatrix::zeros(d, d);
        let paulis = pauli_basis(self.n_qubits);
        for (a, pa) in paulis.iter().enumerate() {
            let mut w = T::czero();
            for (b, coeff) in coeffs.iter().enumerate() {
                let r = self.entry(a, b);
                if r != T::zero() {
                    w += coeff.scale(r);
                }
            }
            if w != T::czero() {
                out = out.add(&pa.matrix().scale(w));
            }
        }
        out
    }

    /// Choi matrix of the represented action.
    pub fn to_choi(&self) -> ChoiMatrix<T> {
        ChoiMatrix::from_action(1 << self.n_qubits, |m| self.apply_matrix(m))
    }
}

/// Row-major vectorization, `v[i*d + j] = m[i][j]`.
fn vectorize<T: Scalar>(m: &ComplexMatrix<T>) -> Vec<C<T>> {
    let mut v = Vec::with_capacity(m.rows() * m.cols());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            v.push(m[(r, c)]);
        }
    }
    v
}

/// Spec-facing conversion names.
pub fn chi_from_channel<T: Scalar>(ch: &KrausChannel<T>) -> Result<ChiMatrix<T>, TomographyError> {
    ChiMatrix::from_kraus(ch)
}

pub fn ptm_from_channel<T: Scalar>(
    ch: &KrausChannel<T>,
) -> Result<PauliTransferMatrix<T>, TomographyError> {
    PauliTransferMatrix::from_kraus(ch)
}

pub fn choi_from_channel<T: Scalar>(ch: &KrausChannel<T>) -> Result<ChoiMatrix<T>, TomographyError> {
    ChoiMatrix::from_kraus(ch)
}

pub fn channel_from_choi<T: Scalar>(choi: &ChoiMatrix<T>) -> Result<KrausChannel<T>, TomographyError> {
    choi.to_kraus()
}
