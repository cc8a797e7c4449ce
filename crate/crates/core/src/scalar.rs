//! Scalar abstraction for the whole crate.
//!
//! All numerical code is generic over a real floating-point type `T` via
//! [`Scalar`], with complex amplitudes represented as `num_complex::Complex<T>`.
//! `f64` is the intended production type; `f32` compiles and works but the
//! default tolerances are chosen for double precision.

use std::fmt;
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar type the crate is generic over.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + fmt::Debug
    + fmt::Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lift an `f64` literal into `T`. Panics only if `T` cannot represent
    /// any finite `f64` approximation, which no `Float` type does.
    fn real(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal must convert to scalar type")
    }

    /// Complex zero.
    fn czero() -> Complex<Self> {
        Complex::new(Self::zero(), Self::zero())
    }

    /// Complex one.
    fn cone() -> Complex<Self> {
        Complex::new(Self::one(), Self::zero())
    }

    /// Imaginary unit.
    fn i() -> Complex<Self> {
        Complex::new(Self::zero(), Self::one())
    }

    /// Real number as a complex value.
    fn creal(x: f64) -> Complex<Self> {
        Complex::new(Self::real(x), Self::zero())
    }

    /// Lossy view as `f64`, for error payloads and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Sum
        + fmt::Debug
        + fmt::Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Shorthand for the complex amplitude type.
pub type C<T> = Complex<T>;

/// Default tolerances used by validation checks. Every check that uses one
/// of these also accepts an explicit override.
pub mod tol {
    use super::Scalar;

    /// Max-norm tolerance for Hermiticity checks.
    pub fn hermitian<T: Scalar>() -> T {
        T::real(1e-10)
    }

    /// Tolerance on |tr(rho) - 1|.
    pub fn trace<T: Scalar>() -> T {
        T::real(1e-10)
    }

    /// Most-negative eigenvalue accepted as "positive semidefinite".
    pub fn psd<T: Scalar>() -> T {
        T::real(-1e-9)
    }

    /// Max-norm tolerance on the Kraus completeness relation.
    pub fn cptp<T: Scalar>() -> T {
        T::real(1e-9)
    }

    /// Tolerance on probability normalization of a Pauli channel.
    pub fn prob_sum<T: Scalar>() -> T {
        T::real(1e-10)
    }

    /// L2 normalization tolerance for pure-state amplitudes.
    pub fn unit_vector<T: Scalar>() -> T {
        T::real(1e-12)
    }
}
