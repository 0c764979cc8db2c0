//! Scalar abstractions.
//!
//! Two levels are used throughout the crate:
//!
//! * [`Field`] is anything with exact `+ - * /`. The Schur complement that
//!   produces the Dirichlet-to-Neumann matrix only needs field operations, so it
//!   runs unchanged over `f32`, `f64` and [`num_rational::BigRational`].
//! * [`Scalar`] adds the floating point surface (square roots, trigonometry,
//!   tolerances) required by the eigensolver, the iterative solvers and the
//!   circle packing code. Implemented for `f32` and `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumAssign};

/// Exact field arithmetic.
pub trait Field: Num + Neg<Output = Self> + Clone + PartialOrd + Debug {
    fn from_int(v: i64) -> Self;

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Field for f32 {
    fn from_int(v: i64) -> Self {
        v as f32
    }
}

impl Field for f64 {
    fn from_int(v: i64) -> Self {
        v as f64
    }
}

impl Field for num_rational::BigRational {
    fn from_int(v: i64) -> Self {
        num_rational::BigRational::from_integer(v.into())
    }
}

/// Floating point scalar used by every numerical routine.
pub trait Scalar:
    Field
    + Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Copy
    + Default
    + Display
    + Send
    + Sync
    + 'static
{
    /// Relative residual accepted from the iterative solvers.
    const SOLVE_TOL: f64;
    /// Relative tolerance on eigenpairs and on the structural zero eigenvalue.
    const EIGEN_TOL: f64;

    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("literal fits the scalar type")
    }

    fn from_usize_lossy(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("count fits the scalar type")
    }

    fn solve_tol() -> Self {
        Self::lit(Self::SOLVE_TOL)
    }

    fn eigen_tol() -> Self {
        Self::lit(Self::EIGEN_TOL)
    }
}

impl Scalar for f32 {
    const SOLVE_TOL: f64 = 1e-6;
    const EIGEN_TOL: f64 = 1e-4;
}

impl Scalar for f64 {
    const SOLVE_TOL: f64 = 1e-12;
    const EIGEN_TOL: f64 = 1e-9;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(<f64 as Scalar>::lit(0.5), 0.5);
        assert_eq!(<f32 as Scalar>::from_usize_lossy(3), 3.0);
        assert_eq!(<f64 as Field>::from_int(-4), -4.0);
        let q = <num_rational::BigRational as Field>::from_int(7);
        assert_eq!(q, num_rational::BigRational::from_integer(7.into()));
    }
}
