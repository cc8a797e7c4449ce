//! Pauli operators and multi-qubit Pauli strings.
//!
//! Label order is lexicographic in {I, X, Y, Z} per qubit, with the leftmost
//! letter acting on the most significant qubit of the basis index. Index `a`
//! of an n-qubit string is its base-4 expansion under I=0, X=1, Y=2, Z=3.

use num_complex::Complex;

use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::QcoreError;
use crate::scalar::Scalar;

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub fn from_index(k: usize) -> Option<Pauli> {
        Pauli::ALL.get(k).copied()
    }

    pub fn label(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_label(ch: char) -> Option<Pauli> {
        match ch.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// The 2x2 matrix of this operator.
    pub fn matrix<T: Scalar>(self) -> ComplexMatrix<T> {
        let o = T::czero();
        let l = T::cone();
        let i = T::i();
        let rows = match self {
            Pauli::I => vec![vec![l, o], vec![o, l]],
            Pauli::X => vec![vec![o, l], vec![l, o]],
            Pauli::Y => vec![vec![o, -i], vec![i, o]],
            Pauli::Z => vec![vec![l, o], vec![o, -l]],
        };
        ComplexMatrix::from_rows(rows).expect("static 2x2")
    }
}

impl std::fmt::Display for Pauli {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A tensor product of single-qubit Paulis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    factors: Vec<Pauli>,
}

impl PauliString {
    pub fn new(factors: Vec<Pauli>) -> Result<Self, QcoreError> {
        if factors.is_empty() {
            return Err(QcoreError::EmptyPauliString);
        }
        Ok(PauliString { factors })
    }

    /// Parse a label like `"XZ"` or `"IYI"`.
    pub fn parse(label: &str) -> Result<Self, QcoreError> {
        let factors: Option<Vec<Pauli>> = label.chars().map(Pauli::from_label).collect();
        match factors {
            Some(f) if !f.is_empty() => Ok(PauliString { factors: f }),
            _ => Err(QcoreError::BadPauliLabel {
                label: label.to_string(),
            }),
        }
    }

    /// String at position `a` in the lexicographic enumeration over `n` qubits.
    pub fn from_basis_index(n_qubits: usize, a: usize) -> Result<Self, QcoreError> {
        if n_qubits == 0 || a >= 4usize.pow(n_qubits as u32) {
            return Err(QcoreError::BadPauliIndex { index: a, n_qubits });
        }
        let mut factors = vec![Pauli::I; n_qubits];
        let mut rem = a;
        for slot in factors.iter_mut().rev() {
            *slot = Pauli::from_index(rem % 4).unwrap();
            rem /= 4;
        }
        Ok(PauliString { factors })
    }

    /// Position in the lexicographic enumeration.
    pub fn basis_index(&self) -> usize {
        self.factors.iter().fold(0, |acc, p| acc * 4 + p.index())
    }

    pub fn n_qubits(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.factors
    }

    pub fn label(&self) -> String {
        self.factors.iter().map(|p| p.label()).collect()
    }

    /// Dense matrix of the tensor product, dimension `2^n`.
    pub fn matrix<T: Scalar>(&self) -> ComplexMatrix<T> {
        let mut m = self.factors[0].matrix::<T>();
        for p in &self.factors[1..] {
            m = m.kron(&p.matrix::<T>());
        }
        m
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// All `4^n` Pauli strings over `n` qubits in lexicographic order.
pub fn pauli_basis(n_qubits: usize) -> Vec<PauliString> {
    (0..4usize.pow(n_qubits as u32))
        .map(|a| PauliString::from_basis_index(n_qubits, a).expect("index in range"))
        .collect()
}

/// Coefficients of `m` in the Pauli basis: `m = sum_a coeff[a] P_a`.
///
/// The expansion uses `coeff[a] = tr(P_a^dag m) / 2^n`, which is exact for any
/// matrix of dimension `2^n` since the Paulis are an orthogonal basis under
/// the Hilbert-Schmidt inner product.
pub fn pauli_coefficients<T: Scalar>(m: &ComplexMatrix<T>) -> Result<Vec<Complex<T>>, QcoreError> {
    let n = qubit_count(m.rows())?;
    if !m.is_square() {
        return Err(QcoreError::DimensionMismatch {
            context: "Pauli expansion needs a square matrix",
        });
    }
    let dim = m.rows();
    let inv_d = T::real(1.0) / T::from_usize(dim).unwrap();
    Ok(pauli_basis(n)
        .iter()
        .map(|p| {
            // tr(P^dag m) with P Hermitian: sum_{r,c} P[c][r] m[r][c] conjugated.
            let pm = p.matrix::<T>();
            let mut acc = T::czero();
            for r in 0..dim {
                for c in 0..dim {
                    acc += pm[(r, c)].conj() * m[(r, c)];
                }
            }
            acc * Complex::new(inv_d, T::zero())
        })
        .collect())
}

/// Rebuild a matrix from its Pauli-basis coefficients.
pub fn from_pauli_coefficients<T: Scalar>(
    n_qubits: usize,
    coeffs: &[Complex<T>],
) -> Result<ComplexMatrix<T>, QcoreError> {
    let count = 4usize.pow(n_qubits as u32);
    if coeffs.len() != count {
        return Err(QcoreError::DimensionMismatch {
            context: "coefficient count is not 4^n",
        });
    }
    let dim = 1usize << n_qubits;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (a, &coeff) in coeffs.iter().enumerate() {
        if coeff == T::czero() {
            continue;
        }
        let p = PauliString::from_basis_index(n_qubits, a).unwrap().matrix::<T>();
        out = out.add(&p.scale(coeff));
    }
    Ok(out)
}

/// Number of qubits for a dimension that must be a power of two.
pub fn qubit_count(dim: usize) -> Result<usize, QcoreError> {
    if dim >= 2 && dim.is_power_of_two() {
        Ok(dim.trailing_zeros() as usize)
    } else {
        Err(QcoreError::NotPowerOfTwo { dim })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_indices_round_trip() {
        for a in 0..4 {
            let p = PauliString::from_basis_index(1, a).unwrap();
            assert_eq!(p.basis_index(), a);
        }
    }

    #[test]
    fn two_qubit_label_order() {
        // Index 6 = base-4 "12" = X on the high qubit, Y on the low qubit.
        let p = PauliString::from_basis_index(2, 6).unwrap();
        assert_eq!(p.label(), "XY");
        assert_eq!(PauliString::parse("XY").unwrap().basis_index(), 6);
    }

    #[test]
    fn xy_equals_kron_of_factors() {
        let xy = PauliString::parse("XY").unwrap().matrix::<f64>();
        let x = Pauli::X.matrix::<f64>();
        let y = Pauli::Y.matrix::<f64>();
        assert!(xy.max_abs_diff(&x.kron(&y)) < 1e-15);
    }

    #[test]
    fn paulis_square_to_identity() {
        for p in Pauli::ALL {
            let m = p.matrix::<f64>();
            assert!(m.matmul(&m).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        }
    }

    #[test]
    fn expansion_round_trips() {
        let m = ComplexMatrix::from_fn(4, 4, |r, c| {
            Complex::new(0.3 * (r as f64) - 0.1 * (c as f64), 0.2 * ((r * c) as f64) - 0.4)
        });
        let coeffs = pauli_coefficients(&m).unwrap();
        let back = from_pauli_coefficients(2, &coeffs).unwrap();
        assert!(back.max_abs_diff(&m) < 1e-13);
    }

    #[test]
    fn expansion_of_a_pauli_is_a_unit_vector() {
        let coeffs = pauli_coefficients(&PauliString::parse("ZX").unwrap().matrix::<f64>()).unwrap();
        for (a, c) in coeffs.iter().enumerate() {
            let expect = if a == PauliString::parse("ZX").unwrap().basis_index() {
                1.0
            } else {
                0.0
            };
            assert!((c - Complex::new(expect, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn bad_labels_are_rejected() {
        assert!(PauliString::parse("").is_err());
        assert!(PauliString::parse("XQ").is_err());
    }
}
