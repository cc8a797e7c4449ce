//! Dense complex matrices over small Hilbert spaces.
//!
//! Row-major storage, no sparsity, no blocking. Dimensions in this crate stay
//! tiny (at most a few dozen), so the Hermitian eigensolver is a cyclic Jacobi
//! iteration with complex plane rotations, which is simple and accurate at
//! this scale.

use num_complex::Complex;

use crate::qcore::QcoreError;
use crate::scalar::{Scalar, C};

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<C<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        ComplexMatrix {
            rows,
            cols,
            entries: vec![T::czero(); rows * cols],
        }
    }

    /// Identity matrix of dimension `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = T::cone();
        }
        m
    }

    /// Build from an entry function.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Build from nested rows. All rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self, QcoreError> {
        let nr = rows.len();
        if nr == 0 {
            return Err(QcoreError::EmptyMatrix);
        }
        let nc = rows[0].len();
        if nc == 0 || rows.iter().any(|r| r.len() != nc) {
            return Err(QcoreError::RaggedRows);
        }
        Ok(ComplexMatrix {
            rows: nr,
            cols: nc,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Build a square matrix from a flat row-major entry list.
    pub fn from_flat(dim: usize, entries: Vec<C<T>>) -> Result<Self, QcoreError> {
        if entries.len() != dim * dim {
            return Err(QcoreError::DimensionMismatch {
                context: "flat entry list does not match dim*dim",
            });
        }
        Ok(ComplexMatrix {
            rows: dim,
            cols: dim,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.entries
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == T::czero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// Plain transpose.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)].conj())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)] + rhs[(r, c)])
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)] - rhs[(r, c)])
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)] * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> C<T> {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).fold(T::czero(), |acc, k| acc + self[(k, k)])
    }

    /// Kronecker product `self (x) rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for ar in 0..self.rows {
            for ac in 0..self.cols {
                let a = self[(ar, ac)];
                if a == T::czero() {
                    continue;
                }
                for br in 0..rhs.rows {
                    for bc in 0..rhs.cols {
                        out[(ar * rhs.rows + br, ac * rhs.cols + bc)] = a * rhs[(br, bc)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise modulus.
    pub fn max_norm(&self) -> T {
        self.entries
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.entries
            .iter()
            .zip(rhs.entries.iter())
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> T {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Max-norm deviation from Hermiticity, `max |A - A^dag|`.
    pub fn hermiticity_residual(&self) -> T {
        assert!(self.is_square());
        let mut worst = T::zero();
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = (self[(r, c)] - self[(c, r)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tolerance: T) -> bool {
        self.is_square() && self.hermiticity_residual() <= tolerance
    }

    /// Max-norm deviation from unitarity, `max |A^dag A - I|`.
    pub fn unitarity_residual(&self) -> T {
        assert!(self.is_square());
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.rows))
    }

    /// Apply `self` to a column vector.
    pub fn apply_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                (0..self.cols).fold(T::czero(), |acc, c| acc + self[(r, c)] * v[c])
            })
            .collect()
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in ascending order with matching unit eigenvectors
    /// as the columns of the returned matrix. The input is symmetrized first;
    /// callers are expected to pass matrices that are Hermitian up to
    /// floating-point noise.
    pub fn hermitian_eigen(&self) -> HermitianEigen<T> {
        assert!(self.is_square(), "eigendecomposition of non-square matrix");
        let n = self.rows;
        // Work on (A + A^dag)/2 so tiny asymmetries cannot bias the rotations.
        let mut a = Self::from_fn(n, n, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()).scale(T::real(0.5))
        });
        let mut v = Self::identity(n);
        let scale = a.frobenius_norm().max(T::min_positive_value());
        let stop = scale * T::epsilon() * T::real(1e-2);

        for _sweep in 0..64 {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= stop {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let m = apq.norm();
                    if m <= scale * T::epsilon() * T::real(1e-3) {
                        continue;
                    }
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let omega = apq / Complex::new(m, T::zero());
                    // Rotation angle for the phase-stripped real 2x2 block.
                    let tau = (aqq - app) / (m + m);
                    let t = if tau >= T::zero() {
                        T::one() / (tau + (T::one() + tau * tau).sqrt())
                    } else {
                        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                    };
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = t * c;
                    // U restricted to the (p,q) plane:
                    //   U[p][p] = omega*c   U[p][q] = omega*s
                    //   U[q][p] = -s        U[q][q] = c
                    let upp = omega.scale(c);
                    let upq = omega.scale(s);
                    let cs = Complex::new(c, T::zero());
                    let ms = Complex::new(-s, T::zero());
                    // Columns: A <- A U
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * upp + akq * ms;
                        a[(k, q)] = akp * upq + akq * cs;
                    }
                    // Rows: A <- U^dag A
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = apk * upp.conj() + aqk * ms;
                        a[(q, k)] = apk * upq.conj() + aqk * cs;
                    }
                    // Eigenvector accumulation: V <- V U
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * upp + vkq * ms;
                        v[(k, q)] = vkp * upq + vkq * cs;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<T> = (0..n).map(|k| a[(k, k)].re).collect();
        order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("NaN eigenvalue"));
        let eigenvalues: Vec<T> = order.iter().map(|&k| diag[k]).collect();
        let eigenvectors = Self::from_fn(n, n, |r, c| v[(r, order[c])]);
        HermitianEigen {
            eigenvalues,
            eigenvectors,
        }
    }

    /// `f(A)` for Hermitian `A` via the spectral decomposition.
    pub fn hermitian_map(&self, f: impl Fn(T) -> T) -> Self {
        let eig = self.hermitian_eigen();
        let n = self.rows;
        let v = &eig.eigenvectors;
        let mut out = Self::zeros(n, n);
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            let fl = f(lambda);
            if fl == T::zero() {
                continue;
            }
            for r in 0..n {
                for c in 0..n {
                    out[(r, c)] += v[(r, k)] * v[(c, k)].conj() * Complex::new(fl, T::zero());
                }
            }
        }
        out
    }
}

impl<T> std::ops::Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = C<T>;
    fn index(&self, (r, c): (usize, usize)) -> &C<T> {
        debug_assert!(r < self.rows && c < self.cols);
        &self.entries[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C<T> {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.entries[r * self.cols + c]
    }
}

/// Result of [`ComplexMatrix::hermitian_eigen`].
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    /// Ascending real eigenvalues.
    pub eigenvalues: Vec<T>,
    /// Unit eigenvectors, column `k` pairing with `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix<T>,
}

/// Kronecker (tensor) product of two matrices.
pub fn tensor_product<T: Scalar>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    a.kron(b)
}

/// Partial trace over the complement of `keep`.
///
/// `dims` are the subsystem dimensions in tensor order (leftmost factor is
/// the most significant index block); `keep` lists the subsystem indices to
/// retain, and the output orders them as in the input.
pub fn partial_trace_matrix<T: Scalar>(
    m: &ComplexMatrix<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix<T>, QcoreError> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(QcoreError::DimensionMismatch {
            context: "subsystem dims do not factor the matrix dimension",
        });
    }
    if keep.is_empty() {
        return Err(QcoreError::EmptyKeepSet);
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() || *keep_sorted.last().unwrap() >= dims.len() {
        return Err(QcoreError::DimensionMismatch {
            context: "keep set contains duplicate or out-of-range subsystem indices",
        });
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep_sorted.contains(i)).collect();
    let keep_dim: usize = keep_sorted.iter().map(|&i| dims[i]).product();
    let traced_dim: usize = traced.iter().map(|&i| dims[i]).product();

    // Strides of each subsystem in the full index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let unpack = |mut flat: usize, subsys: &[usize]| -> usize {
        // Map a flat index over `subsys` (mixed radix, most significant first)
        // to the corresponding full-space offset.
        let mut offset = 0usize;
        for &s in subsys.iter().rev() {
            let digit = flat % dims[s];
            flat /= dims[s];
            offset += digit * strides[s];
        }
        offset
    };

    let mut out = ComplexMatrix::zeros(keep_dim, keep_dim);
    for kr in 0..keep_dim {
        let base_r = unpack(kr, &keep_sorted);
        for kc in 0..keep_dim {
            let base_c = unpack(kc, &keep_sorted);
            let mut acc = T::czero();
            for t in 0..traced_dim {
                let off = unpack(t, &traced);
                acc += m[(base_r + off, base_c + off)];
            }
            out[(kr, kc)] = acc;
        }
    }
    Ok(out)
}
