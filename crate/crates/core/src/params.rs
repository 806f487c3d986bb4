//! Model parameters `(p, q, r)` and the constants derived from them.
//!
//! Parameters are held as exact rationals. Both the floating-point
//! constants and the exact constants are derived from that single source,
//! so the exact oracles and the floating paths never disagree about the
//! inputs.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("cannot parse `{0}` as a decimal or fraction")]
    Parse(String),
    #[error("p must satisfy 0 < p <= 1, got {0}")]
    P(String),
    #[error("{name} must lie in [0, 1], got {value}")]
    Unit { name: &'static str, value: String },
}

/// The triple of probabilities driving the model.
///
/// * `p`: a step adds a new vertex,
/// * `q`: an old-vertex step picks a triangle proportionally to its weight,
/// * `r`: a new-vertex step picks an edge proportionally to its weight.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    p: BigRational,
    q: BigRational,
    r: BigRational,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    p: String,
    q: String,
    r: String,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = ParamError;
    fn try_from(raw: RawParams) -> Result<Self, ParamError> {
        ModelParams::parse(&raw.p, &raw.q, &raw.r)
    }
}

impl From<ModelParams> for RawParams {
    fn from(m: ModelParams) -> Self {
        RawParams {
            p: m.p.to_string(),
            q: m.q.to_string(),
            r: m.r.to_string(),
        }
    }
}

impl fmt::Debug for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModelParams(p={}, q={}, r={})", self.p, self.q, self.r)
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} q={} r={}", self.p, self.q, self.r)
    }
}

/// Parses `"0.25"`, `"1"`, `".5"`, `"3/7"` or `"1e-2"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, ParamError> {
    let err = || ParamError::Parse(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = t.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&digits).map_err(|_| err())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

impl ModelParams {
    pub fn new(p: BigRational, q: BigRational, r: BigRational) -> Result<Self, ParamError> {
        if p <= BigRational::zero() || p > BigRational::one() {
            return Err(ParamError::P(p.to_string()));
        }
        for (name, v) in [("q", &q), ("r", &r)] {
            if *v < BigRational::zero() || *v > BigRational::one() {
                return Err(ParamError::Unit {
                    name,
                    value: v.to_string(),
                });
            }
        }
        Ok(Self { p, q, r })
    }

    pub fn parse(p: &str, q: &str, r: &str) -> Result<Self, ParamError> {
        Self::new(parse_rational(p)?, parse_rational(q)?, parse_rational(r)?)
    }

    /// Builds parameters from `(numerator, denominator)` pairs.
    pub fn from_ratios(p: (i64, i64), q: (i64, i64), r: (i64, i64)) -> Result<Self, ParamError> {
        let mk = |(n, d): (i64, i64)| {
            if d == 0 {
                Err(ParamError::Parse(format!("{n}/{d}")))
            } else {
                Ok(BigRational::new(n.into(), d.into()))
            }
        };
        Self::new(mk(p)?, mk(q)?, mk(r)?)
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }
    pub fn q(&self) -> &BigRational {
        &self.q
    }
    pub fn r(&self) -> &BigRational {
        &self.r
    }

    pub fn p_f64(&self) -> f64 {
        to_f64(&self.p)
    }
    pub fn q_f64(&self) -> f64 {
        to_f64(&self.q)
    }
    pub fn r_f64(&self) -> f64 {
        to_f64(&self.r)
    }

    /// Floating-point constants.
    pub fn derive(&self) -> DerivedConstants {
        let e = self.derive_exact();
        Constants {
            p: to_f64(&e.p),
            alpha1: to_f64(&e.alpha1),
            alpha2: to_f64(&e.alpha2),
            alpha: to_f64(&e.alpha),
            beta: to_f64(&e.beta),
        }
    }

    /// Exact rational constants.
    pub fn derive_exact(&self) -> ExactConstants {
        let one = BigRational::one();
        let two = BigRational::from_integer(2.into());
        let three = BigRational::from_integer(3.into());
        let (p, q, r) = (&self.p, &self.q, &self.r);
        let alpha1 = (&one - p) * q;
        let alpha2 = &two * p * r / &three;
        let alpha = &alpha1 + &alpha2;
        // Uniform choices reach a given vertex with probability
        // (2p(1-r) + 3(1-p)(1-q)) / V per step, and V grows like pn.
        let beta = &two * (&one - r) + &three * (&one - p) * (&one - q) / p;
        Constants {
            p: p.clone(),
            alpha1,
            alpha2,
            alpha,
            beta,
        }
    }
}

pub(crate) fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `alpha1 = (1-p)q`, `alpha2 = 2pr/3`, `alpha = alpha1 + alpha2` and
/// `beta = 2(1-r) + 3(1-p)(1-q)/p`, together with `p` itself.
///
/// `alpha` is the growth exponent of individual and maximal weights and
/// `1 + 1/alpha` is the tail exponent of the weight distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constants<T> {
    pub p: T,
    pub alpha1: T,
    pub alpha2: T,
    pub alpha: T,
    pub beta: T,
}

pub type DerivedConstants = Constants<f64>;
pub type ExactConstants = Constants<BigRational>;

impl<T: Scalar> Constants<T> {
    /// No preferential component: weights do not grow polynomially and the
    /// asymptotic laws are undefined.
    pub fn is_degenerate(&self) -> bool {
        self.alpha.is_zero()
    }

    /// Product `(alpha w + beta + 1)(alpha (w-1) + beta + 1) ... (alpha + beta + 1)`.
    pub fn c_w(&self, w: u32) -> T {
        (1..=w).fold(T::one(), |acc, i| {
            acc * (self.alpha.clone() * T::from_u32(i) + self.beta.clone() + T::one())
        })
    }
}

impl DerivedConstants {
    /// Natural log of [`Constants::c_w`], usable far past the point where the
    /// product overflows.
    pub fn ln_c_w(&self, w: u32) -> f64 {
        (1..=w)
            .map(|i| (self.alpha * i as f64 + self.beta + 1.0).ln())
            .sum()
    }
}

impl ExactConstants {
    pub fn to_f64(&self) -> DerivedConstants {
        Constants {
            p: to_f64(&self.p),
            alpha1: to_f64(&self.alpha1),
            alpha2: to_f64(&self.alpha2),
            alpha: to_f64(&self.alpha),
            beta: to_f64(&self.beta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("0.5").unwrap(), q(1, 2));
        assert_eq!(parse_rational(".25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("1").unwrap(), q(1, 1));
        assert_eq!(parse_rational("3/7").unwrap(), q(3, 7));
        assert_eq!(parse_rational("2.5e-1").unwrap(), q(1, 4));
        assert_eq!(parse_rational("0.1").unwrap(), q(1, 10));
        for bad in ["", "abc", "1/0", "0.5.1", ".", "1e"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(ModelParams::parse("0", "0", "0"), Err(ParamError::P(_))));
        assert!(matches!(ModelParams::parse("1.01", "0", "0"), Err(ParamError::P(_))));
        assert!(matches!(
            ModelParams::parse("1", "-0.1", "0"),
            Err(ParamError::Unit { name: "q", .. })
        ));
        assert!(matches!(
            ModelParams::parse("1", "0", "1.5"),
            Err(ParamError::Unit { name: "r", .. })
        ));
        assert!(ModelParams::parse("1", "1", "1").is_ok());
    }

    #[test]
    fn derive_pure_preferential() {
        let c = ModelParams::parse("1", "0", "1").unwrap().derive_exact();
        assert_eq!(c.alpha1, q(0, 1));
        assert_eq!(c.alpha2, q(2, 3));
        assert_eq!(c.alpha, q(2, 3));
        assert_eq!(c.beta, q(0, 1));
    }

    #[test]
    fn derive_no_growth() {
        let m = ModelParams::parse("1", "1", "0").unwrap();
        let c = m.derive_exact();
        assert_eq!(c.alpha, q(0, 1));
        assert_eq!(c.beta, q(2, 1));
        assert!(c.is_degenerate());
        assert!(m.derive().is_degenerate());
    }

    #[test]
    fn derive_interior() {
        let m = ModelParams::parse("0.5", "0.5", "0.5").unwrap();
        let c = m.derive_exact();
        assert_eq!(c.alpha1, q(1, 4));
        assert_eq!(c.alpha2, q(1, 6));
        assert_eq!(c.alpha, q(5, 12));
        assert_eq!(c.beta, q(5, 2));
        let f = m.derive();
        assert!((f.alpha - 5.0 / 12.0).abs() < 1e-15);
        assert!((f.beta - 2.5).abs() < 1e-15);
    }

    #[test]
    fn beta_matches_uniform_participation() {
        // beta p is the numerator of the per-step chance that a uniform
        // choice hits a fixed vertex: p(1-r) 2/V + (1-p)(1-q) 3/V
        for (p, qq, r) in [("0.5", "1", "0"), ("0.3", "0.2", "0.4"), ("1", "0.7", "0.1")] {
            let m = ModelParams::parse(p, qq, r).unwrap();
            let c = m.derive_exact();
            let one = BigRational::one();
            let direct = q(2, 1) * m.p() * (&one - m.r()) + q(3, 1) * (&one - m.p()) * (&one - m.q());
            assert_eq!(&c.beta * m.p(), direct);
        }
        let c = ModelParams::parse("0.5", "1", "0").unwrap().derive_exact();
        assert_eq!(c.beta, q(2, 1));
    }

    #[test]
    fn c_w_products() {
        let c = ModelParams::parse("1", "0", "1").unwrap().derive_exact();
        assert_eq!(c.c_w(1), q(5, 3));
        assert_eq!(c.c_w(2), q(35, 9));
        let f = c.to_f64();
        assert!((f.c_w(2) - 35.0 / 9.0).abs() < 1e-14);
        assert!((f.ln_c_w(2) - (35.0f64 / 9.0).ln()).abs() < 1e-14);
        // far past f64 overflow the log form stays finite
        assert!(f.c_w(2000).is_infinite());
        assert!(f.ln_c_w(2000).is_finite());
    }

    #[test]
    fn serde_round_trip_keeps_exact_values() {
        let m = ModelParams::parse("1/3", "0.25", "1").unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: ModelParams = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }

    proptest::proptest! {
        #[test]
        fn constants_bounded(pn in 1i64..=20, qn in 0i64..=20, rn in 0i64..=20) {
            let c = ModelParams::from_ratios((pn, 20), (qn, 20), (rn, 20)).unwrap().derive_exact();
            let zero = BigRational::zero();
            proptest::prop_assert!(c.alpha1 >= zero && c.alpha2 >= zero && c.beta >= zero);
            // alpha = (1-p)q + 2pr/3 <= 1 - p/3
            let bound = BigRational::one() - c.p.clone() / BigRational::from_integer(3.into());
            proptest::prop_assert!(c.alpha <= bound);
        }
    }
}
