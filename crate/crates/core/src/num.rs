//! Scalar abstraction and log-domain helpers.
//!
//! Everything in [`crate::prob`] and [`crate::families`] is generic over
//! [`Real`], which is implemented for `f32` and `f64`. The finite-blocklength
//! machinery works in `f64` only.

use std::fmt::{self, Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::{Deserialize, Serialize};

/// Floating-point scalar used by the divergence and minimization code.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Largest accepted deviation of `Σ p` from one when constructing a pmf.
    fn normalization_tolerance() -> Self;

    /// Default stopping tolerance (max per-entry change) of the alternating solvers.
    fn solver_tolerance() -> Self;

    /// Converts an `f64` literal. Never fails for finite inputs.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn normalization_tolerance() -> Self {
        1e-12
    }
    fn solver_tolerance() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn normalization_tolerance() -> Self {
        1e-5
    }
    fn solver_tolerance() -> Self {
        1e-6
    }
}

/// A real number or `+∞`.
///
/// Divergences are never `-∞` for the inputs accepted by this crate, so only the
/// upper end of the extended line is represented.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub enum ExtReal<T> {
    Finite(T),
    PosInfinity,
}

impl<T: Real> ExtReal<T> {
    /// Wraps a float, mapping `+inf` to [`ExtReal::PosInfinity`].
    pub fn from_float(x: T) -> Self {
        if x == T::infinity() {
            ExtReal::PosInfinity
        } else {
            ExtReal::Finite(x)
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<T> {
        match self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::PosInfinity => None,
        }
    }

    /// The value as a float, with `+∞` mapped to `T::infinity()`.
    pub fn to_float(self) -> T {
        match self {
            ExtReal::Finite(x) => x,
            ExtReal::PosInfinity => T::infinity(),
        }
    }

    pub fn map(self, f: impl FnOnce(T) -> T) -> Self {
        match self {
            ExtReal::Finite(x) => ExtReal::from_float(f(x)),
            ExtReal::PosInfinity => ExtReal::PosInfinity,
        }
    }
}

impl<T: Display> Display for ExtReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInfinity => write!(f, "+inf"),
        }
    }
}

/// `log Σ exp(v_i)`, stable against overflow. Empty input or all `-inf` gives `-inf`.
pub fn log_sum_exp<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let values: Vec<T> = values.into_iter().collect();
    let max = values.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() || max == T::infinity() {
        return max;
    }
    let total: T = values.iter().map(|&v| (v - max).exp()).sum();
    max + total.ln()
}

/// `log(exp(a) - exp(b))` for `a >= b`.
pub fn log_diff_exp(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    if b >= a {
        return f64::NEG_INFINITY;
    }
    a + (-(b - a).exp()).ln_1p()
}
