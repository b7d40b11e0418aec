//! Scalar abstraction for the fractional opening variables.
//!
//! The fractional engine only needs field arithmetic and ordering, so it is
//! generic over [`Scalar`] and runs on `f32`, `f64` or exact [`BigRational`].
//! The rounding potential needs `exp`/`ln` and is restricted to
//! [`FloatScalar`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Field-like scalar used for fractional openings `y_f`.
pub trait Scalar: Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug {
    /// Slack subtracted from 1 in the serving-constraint loop test.
    ///
    /// Zero for exact types.
    fn serving_slack() -> Self;

    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("integer is representable")
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn serving_slack() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn serving_slack() -> Self {
        1e-6
    }
}

impl Scalar for BigRational {
    fn serving_slack() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }
}

/// Floating-point scalar usable by the rounding potential.
pub trait FloatScalar: Scalar + Float {
    /// Relative tolerance on potential increases.
    fn potential_tolerance() -> Self;
}

impl FloatScalar for f64 {
    fn potential_tolerance() -> Self {
        1e-9
    }
}

impl FloatScalar for f32 {
    fn potential_tolerance() -> Self {
        1e-4
    }
}

/// `ln(exp(a) + exp(b))` without overflow.
pub fn log_add_exp<F: Float>(a: F, b: F) -> F {
    if a == F::neg_infinity() {
        return b;
    }
    if b == F::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Log-sum-exp over an iterator; `-inf` for an empty input.
pub fn log_sum_exp<F: Float, I: IntoIterator<Item = F>>(values: I) -> F {
    let values: Vec<F> = values.into_iter().collect();
    let max = values.iter().copied().fold(F::neg_infinity(), F::max);
    if max == F::neg_infinity() {
        return max;
    }
    let sum = values
        .iter()
        .fold(F::zero(), |acc, &v| acc + (v - max).exp());
    max + sum.ln()
}
