use crate::params::{Constants, DerivedConstants};
use crate::scalar::Scalar;

use super::weight::WeightDistribution;
use super::{Result, TheoryError};

/// Law of the degree increment `xi_w` on `{0, 1, 2}`.
///
/// `xi_1 = 2`; for `w >= 2` the probabilities are proportional to
/// `alpha1 (w-1)`, `alpha2 (w-1)` and `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct XiLaw<T> {
    pub w: u32,
    pub prob0: T,
    pub prob1: T,
    pub prob2: T,
}

impl<T: Scalar> XiLaw<T> {
    pub fn probs(&self) -> [T; 3] {
        [self.prob0.clone(), self.prob1.clone(), self.prob2.clone()]
    }

    pub fn mean(&self) -> T {
        self.prob1.clone() + self.prob2.clone() + self.prob2.clone()
    }
}

pub fn xi_law<T: Scalar>(c: &Constants<T>, w: u32) -> Result<XiLaw<T>> {
    match w {
        0 => Err(TheoryError::InvalidArgument("w must be >= 1".into())),
        1 => Ok(XiLaw {
            w,
            prob0: T::zero(),
            prob1: T::zero(),
            prob2: T::one(),
        }),
        _ => {
            let k = T::from_u32(w - 1);
            let den = c.alpha.clone() * k.clone() + c.beta.clone();
            if den.is_zero() {
                return Err(TheoryError::XiUndefined(w));
            }
            Ok(XiLaw {
                w,
                prob0: c.alpha1.clone() * k.clone() / den.clone(),
                prob1: c.alpha2.clone() * k / den.clone(),
                prob2: c.beta.clone() / den,
            })
        }
    }
}

/// Successive laws of the partial sums `S_w = xi_1 + ... + xi_w`.
///
/// Each call to [`SumLaw::advance`] convolves one more increment; the pmf
/// is indexed by `d = 0..=2w`.
#[derive(Debug, Clone)]
pub struct SumLaw<'a, T> {
    constants: &'a Constants<T>,
    w: u32,
    pmf: Vec<T>,
}

impl<'a, T: Scalar> SumLaw<'a, T> {
    pub fn new(constants: &'a Constants<T>) -> Self {
        Self {
            constants,
            w: 0,
            pmf: vec![T::one()],
        }
    }

    pub fn w(&self) -> u32 {
        self.w
    }

    /// `P(S_w = d)` for `d = 0..=2w`.
    pub fn pmf(&self) -> &[T] {
        &self.pmf
    }

    pub fn advance(&mut self) -> Result<&[T]> {
        let law = xi_law(self.constants, self.w + 1)?;
        let mut next = vec![T::zero(); self.pmf.len() + 2];
        for (d, mass) in self.pmf.iter().enumerate() {
            if mass.is_zero() {
                continue;
            }
            for (k, pk) in law.probs().into_iter().enumerate() {
                if !pk.is_zero() {
                    next[d + k] = next[d + k].clone() + mass.clone() * pk;
                }
            }
        }
        self.pmf = next;
        self.w += 1;
        Ok(&self.pmf)
    }
}

/// Law of `S_w` as a vector indexed by `d = 0..=2w`; support lies in `[2, 2w]`.
pub fn sum_law_pmf<T: Scalar>(c: &Constants<T>, w: u32) -> Result<Vec<T>> {
    if w == 0 {
        return Err(TheoryError::InvalidArgument("w must be >= 1".into()));
    }
    let mut law = SumLaw::new(c);
    for _ in 0..w {
        law.advance()?;
    }
    Ok(law.pmf)
}

/// Normal approximation of `P(S_w = d)`:
/// `alpha / sqrt(2 pi alpha1 alpha2 w) * exp(-(alpha d - alpha2 w)^2 / (2 alpha1 alpha2 w))`.
pub fn gaussian_shape(c: &DerivedConstants, d: f64, w: f64) -> Result<f64> {
    if c.alpha1 <= 0.0 || c.alpha2 <= 0.0 {
        return Err(TheoryError::GaussianHypothesis);
    }
    if !(w >= 1.0) {
        return Err(TheoryError::InvalidArgument("w must be >= 1".into()));
    }
    let s = c.alpha1 * c.alpha2 * w;
    let z = c.alpha * d - c.alpha2 * w;
    Ok(c.alpha / (2.0 * std::f64::consts::PI * s).sqrt() * (-z * z / (2.0 * s)).exp())
}

/// Gaussian approximation of `x_{d,w}`: `x_w` times [`gaussian_shape`].
pub fn gaussian_joint(
    c: &DerivedConstants,
    weights: &WeightDistribution<f64>,
    d: u32,
    w: u32,
) -> Result<f64> {
    if w == 0 || w > weights.w_max() {
        return Err(TheoryError::InvalidArgument(format!(
            "w = {w} outside the weight table 1..={}",
            weights.w_max()
        )));
    }
    Ok(weights.get(w) * gaussian_shape(c, d as f64, w as f64)?)
}
