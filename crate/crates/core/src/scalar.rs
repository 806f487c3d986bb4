use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Num};

/// Arithmetic the theory routines need, implemented by `f64` (fast path) and
/// `BigRational` (exact path).
pub trait Scalar: Clone + Debug + PartialOrd + Num {
    fn from_u32(v: u32) -> Self;
}

impl Scalar for f64 {
    fn from_u32(v: u32) -> Self {
        v as f64
    }
}

impl Scalar for BigRational {
    fn from_u32(v: u32) -> Self {
        <BigRational as FromPrimitive>::from_u32(v).expect("u32 fits in a rational")
    }
}
