//! Density matrices and pure states with physicality validation.

use num_complex::Complex;

use crate::qcore::matrix::{partial_trace_matrix, ComplexMatrix};
use crate::qcore::QcoreError;
use crate::scalar::{tol, Scalar, C};

/// Validated quantum state: Hermitian, unit trace, positive semidefinite.
///
/// Construction is the validation boundary; once built, a `DensityMatrix`
/// carries its invariants everywhere.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// Validate against the default tolerances.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self, QcoreError> {
        Self::with_tolerances(matrix, tol::hermitian(), tol::trace(), tol::psd())
    }

    /// Validate with explicit tolerances.
    ///
    /// `psd_floor` is the most negative eigenvalue accepted (a negative
    /// number close to zero).
    pub fn with_tolerances(
        matrix: ComplexMatrix<T>,
        hermitian_tol: T,
        trace_tol: T,
        psd_floor: T,
    ) -> Result<Self, QcoreError> {
        if !matrix.is_square() || matrix.rows() < 2 {
            return Err(QcoreError::DimensionMismatch {
                context: "density matrix must be square with dim >= 2",
            });
        }
        let herm = matrix.hermiticity_residual();
        if herm > hermitian_tol {
            return Err(QcoreError::NotHermitian {
                residual: herm.as_f64(),
            });
        }
        let tr = matrix.trace();
        if (tr - T::cone()).norm() > trace_tol {
            return Err(QcoreError::TraceNotOne {
                trace: tr.re.as_f64(),
            });
        }
        let min_eig = matrix
            .hermitian_eigen()
            .eigenvalues
            .first()
            .copied()
            .unwrap_or_else(T::zero);
        if min_eig < psd_floor {
            return Err(QcoreError::NotPositive {
                min_eigenvalue: min_eig.as_f64(),
            });
        }
        Ok(DensityMatrix { matrix })
    }

    /// Repair floating-point damage from channel arithmetic: symmetrize,
    /// clamp negative eigenvalues within the PSD tolerance to zero, and
    /// renormalize the trace to exactly one. Genuinely negative spectra
    /// (below the floor) are still rejected.
    pub fn new_clamped(matrix: ComplexMatrix<T>) -> Result<Self, QcoreError> {
        if !matrix.is_square() || matrix.rows() < 2 {
            return Err(QcoreError::DimensionMismatch {
                context: "density matrix must be square with dim >= 2",
            });
        }
        let herm = matrix.hermiticity_residual();
        if herm > tol::hermitian() {
            return Err(QcoreError::NotHermitian {
                residual: herm.as_f64(),
            });
        }
        let tr = matrix.trace();
        if (tr - T::cone()).norm() > tol::trace() {
            return Err(QcoreError::TraceNotOne {
                trace: tr.re.as_f64(),
            });
        }
        let n = matrix.rows();
        let sym = ComplexMatrix::from_fn(n, n, |r, c| {
            (matrix[(r, c)] + matrix[(c, r)].conj()).scale(T::real(0.5))
        });
        let eig = sym.hermitian_eigen();
        let floor = tol::psd();
        if let Some(&min) = eig.eigenvalues.first() {
            if min < floor {
                return Err(QcoreError::NotPositive {
                    min_eigenvalue: min.as_f64(),
                });
            }
        }
        let clamped: Vec<T> = eig
            .eigenvalues
            .iter()
            .map(|&l| if l < T::zero() { T::zero() } else { l })
            .collect();
        let total: T = clamped.iter().copied().sum();
        let v = &eig.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &l) in clamped.iter().enumerate() {
            if l == T::zero() {
                continue;
            }
            let w = Complex::new(l / total, T::zero());
            for r in 0..n {
                for c in 0..n {
                    out[(r, c)] += v[(r, k)] * v[(c, k)].conj() * w;
                }
            }
        }
        Ok(DensityMatrix { matrix: out })
    }

    /// The maximally mixed state I/dim.
    pub fn maximally_mixed(dim: usize) -> Self {
        assert!(dim >= 2, "maximally mixed state needs dim >= 2");
        let w = T::real(1.0) / T::from_usize(dim).unwrap();
        DensityMatrix {
            matrix: ComplexMatrix::identity(dim).scale_real(w),
        }
    }

    /// |psi><psi| for a pure state.
    pub fn from_pure(psi: &PureState<T>) -> Self {
        let a = psi.amplitudes();
        let n = a.len();
        DensityMatrix {
            matrix: ComplexMatrix::from_fn(n, n, |r, c| a[r] * a[c].conj()),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    /// tr(op rho).
    pub fn expectation(&self, op: &ComplexMatrix<T>) -> C<T> {
        assert_eq!(op.rows(), self.dim());
        assert_eq!(op.cols(), self.dim());
        op.matmul(&self.matrix).trace()
    }

    /// tr(rho^2), 1 for pure states, 1/dim for maximally mixed.
    pub fn purity(&self) -> T {
        self.matrix.matmul(&self.matrix).trace().re
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<T> {
        self.matrix.hermitian_eigen().eigenvalues
    }

    /// Joint state of two independent registers, `self` on the most
    /// significant indices.
    pub fn tensor(&self, other: &Self) -> Self {
        DensityMatrix {
            matrix: self.matrix.kron(&other.matrix),
        }
    }
}

/// Reduced state on the kept subsystems.
///
/// `subsystem_dims` lists register dimensions most significant first and must
/// factor the state's dimension; `keep` indexes into it.
pub fn partial_trace<T: Scalar>(
    rho: &DensityMatrix<T>,
    subsystem_dims: &[usize],
    keep: &[usize],
) -> Result<DensityMatrix<T>, QcoreError> {
    let reduced = partial_trace_matrix(rho.matrix(), subsystem_dims, keep)?;
    // Trace and spectrum survive a partial trace, so the invariants hold up
    // to arithmetic noise; clamping keeps repeated reductions stable.
    DensityMatrix::new_clamped(reduced)
}

/// Unit-norm state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T> {
    amplitudes: Vec<C<T>>,
}

impl<T: Scalar> PureState<T> {
    pub fn new(amplitudes: Vec<C<T>>) -> Result<Self, QcoreError> {
        if amplitudes.len() < 2 {
            return Err(QcoreError::DimensionMismatch {
                context: "state vector needs dim >= 2",
            });
        }
        let norm = amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        if (norm - T::one()).abs() > tol::unit_vector() {
            return Err(QcoreError::NotUnitVector {
                norm: norm.as_f64(),
            });
        }
        Ok(PureState { amplitudes })
    }

    /// Computational basis state |k> in the given dimension.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        assert!(dim >= 2 && k < dim);
        let mut amplitudes = vec![T::czero(); dim];
        amplitudes[k] = T::cone();
        PureState { amplitudes }
    }

    /// Single-qubit |+> = (|0> + |1>)/sqrt(2).
    pub fn qubit_plus() -> Self {
        let h = T::creal(std::f64::consts::FRAC_1_SQRT_2);
        PureState {
            amplitudes: vec![h, h],
        }
    }

    /// Single-qubit |+i> = (|0> + i|1>)/sqrt(2).
    pub fn qubit_plus_i() -> Self {
        let h = T::real(std::f64::consts::FRAC_1_SQRT_2);
        PureState {
            amplitudes: vec![Complex::new(h, T::zero()), Complex::new(T::zero(), h)],
        }
    }

    /// Single-qubit |-> = (|0> - |1>)/sqrt(2).
    pub fn qubit_minus() -> Self {
        let h = T::real(std::f64::consts::FRAC_1_SQRT_2);
        PureState {
            amplitudes: vec![Complex::new(h, T::zero()), Complex::new(-h, T::zero())],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix<T> {
        DensityMatrix::from_pure(self)
    }

    /// <self|other>.
    pub fn overlap(&self, other: &PureState<T>) -> C<T> {
        assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .fold(T::czero(), |acc, (a, b)| acc + a.conj() * *b)
    }
}

/// The two-qubit Bell state (|00> + |11>)/sqrt(2).
pub fn bell_state<T: Scalar>() -> PureState<T> {
    let h = T::creal(std::f64::consts::FRAC_1_SQRT_2);
    PureState {
        amplitudes: vec![h, T::czero(), T::czero(), h],
    }
}
