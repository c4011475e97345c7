//! Scalar abstractions.
//!
//! Everything that only needs field arithmetic and ordering (the forward
//! model, QUBO construction, exact oracles, local optimization, MQC) is
//! written against [`Scalar`], which `f32`, `f64` and [`BigRational`] all
//! implement. Code that needs transcendental functions or tolerances
//! (annealing, noise, max-flow) asks for [`Real`] instead.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, MulAssign, SubAssign};

use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// An ordered field element.
pub trait Scalar:
    Clone + Num + Signed + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts a finite `f64`. Exact for binary floating point and rationals.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(|| panic!("{x} is not representable"))
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(|| panic!("{n} is not representable"))
    }

    /// Lossy conversion for reporting; rationals round to nearest.
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance used when two computed values should agree up to rounding.
    /// Zero for exact types.
    fn rounding_slack() -> Self;

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f32 {
    fn rounding_slack() -> Self {
        64.0 * f32::EPSILON
    }
}

impl Scalar for f64 {
    fn rounding_slack() -> Self {
        1e-12
    }
}

impl Scalar for BigRational {
    fn rounding_slack() -> Self {
        BigRational::from_integer(0.into())
    }
}

/// Binary floating point.
pub trait Real: Scalar + Float + Copy + Default + Sum + AddAssign + SubAssign + MulAssign {}

impl Real for f32 {}
impl Real for f64 {}
