use crate::params::{Constants, DerivedConstants};
use crate::scalar::Scalar;

use super::{Result, TheoryError};

/// Limit proportions `x_w` of vertices of weight `w`, for `w = 1..=w_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDistribution<T> {
    values: Vec<T>,
    alpha: T,
    beta: T,
}

impl<T: Scalar> WeightDistribution<T> {
    pub fn w_max(&self) -> u32 {
        self.values.len() as u32
    }

    /// `x_w`, zero outside `1..=w_max`.
    pub fn get(&self, w: u32) -> T {
        if w == 0 {
            return T::zero();
        }
        self.values.get(w as usize - 1).cloned().unwrap_or_else(T::zero)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Exact mass beyond `w`, i.e. `sum_{v > w} x_v = (alpha w + beta) x_w`.
    ///
    /// Follows from `x_w = y_{w-1} - y_w` with `y_w = (alpha w + beta) x_w`
    /// and `y_0 = 1`.
    pub fn tail_mass(&self, w: u32) -> T {
        if w == 0 {
            return T::one();
        }
        (self.alpha.clone() * T::from_u32(w) + self.beta.clone()) * self.get(w)
    }
}

/// `x_1 = 1/(alpha+beta+1)`, `x_w = x_{w-1} (alpha(w-1)+beta)/(alpha w+beta+1)`.
pub fn weight_dist<T: Scalar>(c: &Constants<T>, w_max: u32) -> Result<WeightDistribution<T>> {
    if w_max == 0 {
        return Err(TheoryError::InvalidArgument("w_max must be >= 1".into()));
    }
    if c.alpha.is_zero() && c.beta.is_zero() {
        return Err(TheoryError::Degenerate);
    }
    let mut values = Vec::with_capacity(w_max as usize);
    let mut x = T::one() / (c.alpha.clone() + c.beta.clone() + T::one());
    values.push(x.clone());
    for w in 2..=w_max {
        let num = c.alpha.clone() * T::from_u32(w - 1) + c.beta.clone();
        let den = c.alpha.clone() * T::from_u32(w) + c.beta.clone() + T::one();
        x = x * num / den;
        values.push(x.clone());
    }
    Ok(WeightDistribution {
        values,
        alpha: c.alpha.clone(),
        beta: c.beta.clone(),
    })
}

/// `Gamma(1+(beta+1)/alpha) / Gamma(1+beta/alpha)`.
pub fn tail_prefactor(c: &DerivedConstants) -> Result<f64> {
    if c.alpha <= 0.0 {
        return Err(TheoryError::ZeroAlpha);
    }
    let a = 1.0 + (c.beta + 1.0) / c.alpha;
    let b = 1.0 + c.beta / c.alpha;
    Ok((libm::lgamma(a) - libm::lgamma(b)).exp())
}

/// Power-law approximation of `x_w` for large `w`.
pub fn weight_tail_asymptote(c: &DerivedConstants, w: f64) -> Result<f64> {
    let pre = tail_prefactor(c)?;
    Ok(pre / c.alpha * w.powf(-(1.0 + 1.0 / c.alpha)))
}

/// Probability that a given vertex of weight `w` takes part in step `n`,
/// when `v` vertices exist before the step: `alpha w / n + beta p / v`.
///
/// The value does not depend on the vertex degree.
pub fn participation_probability(c: &DerivedConstants, w: u64, n: u64, v: u64) -> Result<f64> {
    if n == 0 || v < 3 || w == 0 || w > n {
        return Err(TheoryError::InvalidArgument(format!(
            "need n >= 1, V >= 3, 1 <= w <= n; got w={w}, n={n}, V={v}"
        )));
    }
    let prob = c.alpha * w as f64 / n as f64 + c.beta * c.p / v as f64;
    if prob > 1.0 + 1e-12 {
        return Err(TheoryError::ProbabilityExceedsOne(prob));
    }
    Ok(prob.min(1.0))
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;
    use crate::params::ModelParams;

    fn pure_pa() -> ModelParams {
        ModelParams::parse("1", "0", "1").unwrap()
    }

    #[test]
    fn first_two_values() {
        let x = weight_dist(&pure_pa().derive_exact(), 2).unwrap();
        assert_eq!(x.get(1), BigRational::new(3.into(), 5.into()));
        assert_eq!(x.get(2), BigRational::new(6.into(), 35.into()));
        assert_eq!(x.get(0), BigRational::from_integer(0.into()));
        assert_eq!(x.get(3), BigRational::from_integer(0.into()));
    }

    #[test]
    fn x1_is_reciprocal_of_alpha_beta_one() {
        for (p, q, r) in [("0.5", "0.5", "0.5"), ("0.3", "1", "0"), ("1", "1", "0.2")] {
            let c = ModelParams::parse(p, q, r).unwrap().derive_exact();
            let x = weight_dist(&c, 1).unwrap();
            let one = BigRational::from_integer(1.into());
            assert_eq!(x.get(1), &one / (&c.alpha + &c.beta + &one));
        }
    }

    #[test]
    fn rejects_empty_and_degenerate() {
        let c = pure_pa().derive();
        assert!(matches!(weight_dist(&c, 0), Err(TheoryError::InvalidArgument(_))));
        let mut d = c.clone();
        d.alpha = 0.0;
        d.beta = 0.0;
        assert_eq!(weight_dist(&d, 3), Err(TheoryError::Degenerate));
    }

    #[test]
    fn tail_mass_is_exact() {
        let c = ModelParams::parse("0.5", "0.5", "0.5").unwrap().derive_exact();
        let x = weight_dist(&c, 30).unwrap();
        let one = BigRational::from_integer(1.into());
        let mut partial = BigRational::from_integer(0.into());
        for w in 1..=30 {
            partial += x.get(w);
            assert_eq!(&one - &partial, x.tail_mass(w));
        }
        assert_eq!(x.tail_mass(0), one);
    }

    #[test]
    fn asymptote_ratio_tends_to_one() {
        let c = pure_pa().derive();
        let x = weight_dist(&c, 10_000).unwrap();
        let ratio = x.get(10_000) / weight_tail_asymptote(&c, 10_000.0).unwrap();
        assert!((ratio - 1.0).abs() < 0.01, "{ratio}");
        // exponent is 1 + 1/alpha = 2.5
        let a = weight_tail_asymptote(&c, 100.0).unwrap();
        let b = weight_tail_asymptote(&c, 200.0).unwrap();
        assert!(((a / b).log2() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn asymptote_refuses_zero_alpha() {
        let c = ModelParams::parse("1", "1", "0").unwrap().derive();
        assert_eq!(weight_tail_asymptote(&c, 10.0), Err(TheoryError::ZeroAlpha));
    }

    #[test]
    fn participation_examples() {
        let c = pure_pa().derive();
        let v = participation_probability(&c, 1, 1, 3).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        // beta = 0 => independent of V
        assert_eq!(
            participation_probability(&c, 3, 10, 5).unwrap(),
            participation_probability(&c, 3, 10, 500).unwrap()
        );
        assert!(participation_probability(&c, 0, 1, 3).is_err());
        assert!(participation_probability(&c, 1, 1, 2).is_err());
        let mut big = c.clone();
        big.beta = 10.0;
        assert!(matches!(
            participation_probability(&big, 1, 1, 3),
            Err(TheoryError::ProbabilityExceedsOne(_))
        ));
    }
}
