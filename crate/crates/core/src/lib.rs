//! Deterministic online non-metric facility location.
//!
//! The pipeline is: [`instance`] normalizes costs to powers of two,
//! [`frac`] maintains an online fractional primal-dual solution,
//! [`rounding`] turns fractional openings into integral ones with a
//! pessimistic-estimator potential, [`int`] composes the two into an
//! integral online algorithm, and [`doubling`] wraps it in cost-doubling
//! phases so the guarantee no longer depends on the aspect ratio.
//! [`oracle`] computes exact offline optima for verification and
//! [`harness`] drives runs, audits and sweeps.
//!
//! The fractional engine is generic over [`Scalar`] and the rounding over
//! [`FloatScalar`]; the aliases below fix the usual choices.

pub mod audit;
pub mod doubling;
pub mod error;
pub mod frac;
pub mod harness;
pub mod instance;
pub mod int;
pub mod oracle;
pub mod rounding;
pub mod scalar;

pub use error::{Error, Result};
pub use instance::{FacilityClientGraph, Instance, InstanceFile};
pub use scalar::{FloatScalar, Scalar};

/// Exact rational used for input costs and exact fractional runs.
pub type Rational = num_rational::BigRational;

/// Fractional engine in double precision.
pub type Frac<'a> = frac::FracEngine<'a, f64>;
/// Fractional engine in exact rational arithmetic.
pub type ExactFrac<'a> = frac::FracEngine<'a, Rational>;
/// Single-precision fractional engine.
pub type FracF32<'a> = frac::FracEngine<'a, f32>;

/// Rounding state in double precision.
pub type RoundState<'a> = rounding::RoundState<'a, f64>;
pub type RoundStateF32<'a> = rounding::RoundState<'a, f32>;

/// Integral online algorithm in double precision.
pub type Int<'a> = int::IntEngine<'a, f64>;
pub type IntF32<'a> = int::IntEngine<'a, f32>;
