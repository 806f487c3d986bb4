//! Limit laws of the model: the weight distribution, the joint
//! degree-weight distribution (recursive and explicit forms), the
//! sum-of-increments construction of that joint law, and the asymptotic
//! approximants.
//!
//! Every routine generic over [`Scalar`](crate::scalar::Scalar) runs both in
//! `f64` and in exact rational arithmetic with the same code.

mod construction;
mod explicit;
mod joint;
mod weight;

pub use construction::{gaussian_joint, gaussian_shape, sum_law_pmf, xi_law, SumLaw, XiLaw};
pub use explicit::{
    elementary_sum, elementary_sums, explicit_row, joint_explicit_exact, joint_explicit_sum_form,
};
pub use joint::{
    degree_marginal, degree_tail_asymptote, joint_recursion, DegreeMarginal, JointDistribution,
    DEFAULT_MARGINAL_TOLERANCE,
};
pub use weight::{
    participation_probability, tail_prefactor, weight_dist, weight_tail_asymptote,
    WeightDistribution,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("alpha = beta = 0: the weight distribution is degenerate")]
    Degenerate,
    #[error("alpha = 0: asymptotic power laws are undefined")]
    ZeroAlpha,
    #[error("the Gaussian local limit needs alpha1 > 0 and alpha2 > 0")]
    GaussianHypothesis,
    #[error("degree asymptote needs alpha2 > 0")]
    ZeroAlpha2,
    #[error("increment law undefined at w = {0}: alpha (w-1) + beta = 0")]
    XiUndefined(u32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("participation probability {0} exceeds 1; inconsistent (w, n, V)")]
    ProbabilityExceedsOne(f64),
    #[error("explicit product and summation forms disagree at d = {d}, w = {w}")]
    OracleMismatch { d: u32, w: u32 },
    #[error("degree marginal did not reach tolerance {0} within the iteration limit")]
    NoConvergence(f64),
}

pub type Result<T> = std::result::Result<T, TheoryError>;
