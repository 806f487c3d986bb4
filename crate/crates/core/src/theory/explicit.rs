//! Closed form of `x_{d,w}` in exact arithmetic.
//!
//! `x_{d,w}` is the coefficient of `z^{d-2}` in
//! `prod_{i=1}^{w-1} (i (alpha1 + alpha2 z) + beta z^2) / c_w`. Expanding the
//! product gives a sum over the number `k - 1` of factors contributing
//! `beta z^2`, weighted by elementary symmetric sums of `{1, ..., w-1}`.
//! Both forms are computed here and checked against each other; they serve
//! as an oracle for the recursion.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{pow, One, Zero};

use crate::params::ExactConstants;

use super::{Result, TheoryError};

/// `S_n(k)` for `k = 0..=n`: elementary symmetric sums of `{1, ..., n}`.
pub fn elementary_sums(n: u32) -> Vec<BigUint> {
    let mut e = vec![BigUint::one()];
    for i in 1..=n {
        e.push(BigUint::zero());
        for k in (1..e.len()).rev() {
            let add = &e[k - 1] * BigUint::from(i);
            e[k] += add;
        }
    }
    e
}

/// `S_n(k) = sum_{1 <= i_1 < ... < i_k <= n} i_1 ... i_k`, zero for `k > n`.
pub fn elementary_sum(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    elementary_sums(n).swap_remove(k as usize)
}

fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i) / BigUint::from(i + 1))
}

/// Product-form row `w`: `x_{d,w}` for `d = 2..=2w`.
pub fn explicit_row(c: &ExactConstants, w: u32) -> Result<Vec<BigRational>> {
    if w == 0 {
        return Err(TheoryError::InvalidArgument("w must be >= 1".into()));
    }
    // coefficients of z^0, z^1, ...
    let mut poly = vec![BigRational::one()];
    for i in 1..w {
        let i = BigRational::from_integer(BigInt::from(i));
        let factor = [&i * &c.alpha1, &i * &c.alpha2, c.beta.clone()];
        let mut next = vec![BigRational::zero(); poly.len() + 2];
        for (a, pa) in poly.iter().enumerate() {
            if pa.is_zero() {
                continue;
            }
            for (b, fb) in factor.iter().enumerate() {
                next[a + b] += pa * fb;
            }
        }
        poly = next;
    }
    let cw = c.c_w(w);
    Ok(poly.into_iter().map(|v| v / &cw).collect())
}

/// Summation form
/// `(1/c_w) sum_k S_{w-1}(w-k) C(w-k, d-2k) alpha1^{w-d+k} alpha2^{d-2k} beta^{k-1}`.
pub fn joint_explicit_sum_form(c: &ExactConstants, d: u32, w: u32) -> BigRational {
    if w == 0 || d < 2 || d > 2 * w {
        return BigRational::zero();
    }
    let sums = elementary_sums(w - 1);
    let (d, wi) = (d as i64, w as i64);
    let mut total = BigRational::zero();
    for k in 1..=wi {
        let (e1, e2) = (wi - d + k, d - 2 * k);
        if e1 < 0 || e2 < 0 || e2 > wi - k {
            continue;
        }
        let s = BigRational::from_integer(BigInt::from(sums[(wi - k) as usize].clone()));
        let b = BigRational::from_integer(BigInt::from(binomial((wi - k) as u32, e2 as u32)));
        total += s
            * b
            * pow(c.alpha1.clone(), e1 as usize)
            * pow(c.alpha2.clone(), e2 as usize)
            * pow(c.beta.clone(), (k - 1) as usize);
    }
    total / c.c_w(w)
}

/// Exact `x_{d,w}` from the product form, cross-checked against the
/// summation form. Out-of-range `(d, w)` gives zero.
pub fn joint_explicit_exact(c: &ExactConstants, d: u32, w: u32) -> Result<BigRational> {
    if w == 0 || d < 2 || d > 2 * w {
        return Ok(BigRational::zero());
    }
    let product = explicit_row(c, w)?.swap_remove(d as usize - 2);
    if product != joint_explicit_sum_form(c, d, w) {
        return Err(TheoryError::OracleMismatch { d, w });
    }
    Ok(product)
}
