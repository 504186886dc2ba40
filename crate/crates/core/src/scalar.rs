//! Floating-point scalar abstraction shared by the model, sampler and estimators.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// floating point: f32 or f64
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Absolute gradient-norm tolerance used by Newton solvers.
    fn newton_tolerance() -> Self {
        let floor = Self::from_f64(1e-8).unwrap();
        floor.max(Self::epsilon() * Self::from_f64(1e4).unwrap())
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn from_usize<T: Scalar>(x: usize) -> T {
    T::from_usize(x).expect("usize representable in scalar type")
}

#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Numerically stable `ln(1 + e^x)`.
pub fn log1p_exp<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Logistic function `1 / (1 + e^{-x})`.
pub fn logistic<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

pub fn logit<T: Scalar>(p: T) -> T {
    (p / (T::one() - p)).ln()
}

/// `ln Σ exp(x_i)` without overflow. Returns `-inf` for an empty slice.
pub fn log_sum_exp<T: Scalar>(xs: &[T]) -> T {
    let max = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if !max.is_finite() {
        return max;
    }
    let sum: T = xs.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log1p_exp_is_stable() {
        assert!((log1p_exp(800.0_f64) - 800.0).abs() < 1e-12);
        assert!(log1p_exp(-800.0_f64) >= 0.0);
        assert!((log1p_exp(0.0_f64) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn logistic_and_logit_invert() {
        for &p in &[0.01_f64, 0.1, 0.5, 0.93] {
            assert!((logistic(logit(p)) - p).abs() < 1e-14);
        }
        assert!((logistic(-2.197_f64) - 0.1).abs() < 1e-4);
    }

    #[test]
    fn log_sum_exp_of_zeros_is_log_len() {
        let xs = vec![0.0_f64; 1000];
        assert_eq!(log_sum_exp(&xs) - 1000f64.ln(), 0.0);
        assert_eq!(log_sum_exp::<f32>(&[]), f32::NEG_INFINITY);
    }

    #[test]
    fn tolerance_depends_on_precision() {
        assert_eq!(f64::newton_tolerance(), 1e-8);
        assert!(f32::newton_tolerance() > 1e-4);
    }
}
