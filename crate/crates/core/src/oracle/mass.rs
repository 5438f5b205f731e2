//! Probability arithmetic for exact enumeration.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

/// Field used to carry path probabilities.
pub trait Mass: Num + Clone + Debug + PartialOrd + Send + Sync {
    /// Accumulator for merging mass arriving at the same state.
    type Acc: Clone + Debug;

    fn from_f64(x: f64) -> Result<Self>;
    fn to_f64(&self) -> f64;
    fn acc_new() -> Self::Acc;
    fn acc_add(acc: &mut Self::Acc, x: Self);
    fn acc_value(acc: &Self::Acc) -> Self;
    /// Floors tiny negative rounding residue at zero.
    fn clamp_nonneg(self) -> Self {
        if self < Self::zero() { Self::zero() } else { self }
    }
}

impl Mass for f64 {
    type Acc = NeumaierSum;

    fn from_f64(x: f64) -> Result<Self> {
        Ok(x)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn acc_new() -> NeumaierSum {
        NeumaierSum::new()
    }
    fn acc_add(acc: &mut NeumaierSum, x: f64) {
        acc.add(x);
    }
    fn acc_value(acc: &NeumaierSum) -> f64 {
        acc.value()
    }
}

impl Mass for BigRational {
    type Acc = BigRational;

    /// Exact binary value of `x`.
    fn from_f64(x: f64) -> Result<Self> {
        BigRational::from_float(x)
            .ok_or_else(|| Error::InvalidArgument(format!("{x} has no rational value")))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn acc_new() -> BigRational {
        BigRational::zero()
    }
    fn acc_add(acc: &mut BigRational, x: BigRational) {
        *acc += x;
    }
    fn acc_value(acc: &BigRational) -> BigRational {
        acc.clone()
    }
    fn clamp_nonneg(self) -> Self {
        self
    }
}

/// Natural log of a positive big integer, accurate for any magnitude.
pub fn ln_bigint(x: &BigInt) -> f64 {
    assert!(x.is_positive(), "logarithm of a nonpositive integer");
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a rational in `[0, inf)`; `-inf` at zero.
pub fn ln_rational(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    assert!(r.is_positive(), "logarithm of a negative rational");
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

/// `2^{-n}` as a rational.
pub fn pow2_inv(n: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << n)
}

/// `1 / n!` as a rational.
pub fn factorial_inv(n: u32) -> BigRational {
    let f = (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k));
    BigRational::new(BigInt::one(), f)
}
