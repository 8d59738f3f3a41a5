//! Scalar types that can carry a probability.
//!
//! The closed-form laws and the distance computations are written once over
//! [`Probability`]; [`crate::ExactProb`] is the exact instantiation used for every
//! equality check, and `f64`/`f32` give a fast approximate view of the same numbers.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub trait Probability:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: &BigUint, den: &BigUint) -> Self;

    fn as_f64(&self) -> f64;

    fn from_counts(num: u64, den: u64) -> Self {
        Self::from_ratio(&BigUint::from(num), &BigUint::from(den))
    }

    fn reciprocal_of(den: &BigUint) -> Self {
        Self::from_ratio(&BigUint::one(), den)
    }

    fn abs_diff(&self, other: &Self) -> Self {
        if self >= other {
            self.clone() - other.clone()
        } else {
            other.clone() - self.clone()
        }
    }

    fn min_of(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }
}

impl Probability for BigRational {
    fn from_ratio(num: &BigUint, den: &BigUint) -> Self {
        BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Probability for f64 {
    fn from_ratio(num: &BigUint, den: &BigUint) -> Self {
        <BigRational as Probability>::from_ratio(num, den).as_f64()
    }

    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Probability for f32 {
    fn from_ratio(num: &BigUint, den: &BigUint) -> Self {
        <f64 as Probability>::from_ratio(num, den) as f32
    }

    fn as_f64(&self) -> f64 {
        f64::from(*self)
    }
}

/// Natural log of an exact probability, for display only.
pub fn log_probability(p: &BigRational) -> f64 {
    if p.is_zero() {
        return f64::NEG_INFINITY;
    }
    let ln = |x: &BigInt| {
        // ln(x) = ln(mantissa) + shift*ln2, keeping 53 significant bits
        let bits = x.bits();
        let shift = bits.saturating_sub(53);
        let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
        top.ln() + shift as f64 * std::f64::consts::LN_2
    };
    ln(p.numer()) - ln(p.denom())
}

/// `"num/den"` rendering used by every JSON surface.
pub fn ratio_string(p: &BigRational) -> String {
    format!("{}/{}", p.numer(), p.denom())
}
