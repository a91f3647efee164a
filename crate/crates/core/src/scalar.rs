//! Numeric layer: the [`Scalar`] trait every algorithm is generic over, and
//! the [`Extended`] wrapper used for the "unreachable" sentinel.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive};
use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};

/// Cost type. Implemented for `f32`, `f64` and [`BigRational`].
///
/// Only the rational implementation gives exact threshold comparisons; the
/// float implementations exist for speed on large batches.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// True when `+ - * /` never round.
    const EXACT: bool;

    /// `numerator / denominator`.
    fn from_ratio(numerator: i64, denominator: u64) -> Self;

    /// `2^exp`.
    fn pow2(exp: i32) -> Self;

    /// Largest `k` with `2^k <= self`. `self` must be positive.
    fn floor_log2(&self) -> i32;

    /// `self * denominator` when that is an integer that fits in `u64`.
    fn to_scaled(&self, denominator: u64) -> Option<u64>;

    /// Smallest `q` such that `self * q` is an integer, if it fits in `u64`.
    /// Floats report `None`.
    fn denominator_hint(&self) -> Option<u64>;

    fn from_count(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest `k` with `2^k >= self`. `self` must be positive.
    fn ceil_log2(&self) -> i32 {
        let k = self.floor_log2();
        if Self::pow2(k) == *self {
            k
        } else {
            k + 1
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    /// `max(self, 0)`.
    fn positive_part(self) -> Self {
        if self > Self::zero() {
            self
        } else {
            Self::zero()
        }
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_ratio(numerator: i64, denominator: u64) -> Self {
                numerator as $t / denominator as $t
            }

            fn pow2(exp: i32) -> Self {
                (2.0 as $t).powi(exp)
            }

            fn floor_log2(&self) -> i32 {
                let mut k = self.log2().floor() as i32;
                while Self::pow2(k) > *self {
                    k -= 1;
                }
                while Self::pow2(k + 1) <= *self {
                    k += 1;
                }
                k
            }

            fn to_scaled(&self, denominator: u64) -> Option<u64> {
                let v = *self * denominator as $t;
                if v >= 0.0 && v.fract() == 0.0 && (v as f64) < u64::MAX as f64 {
                    Some(v as u64)
                } else {
                    None
                }
            }

            fn denominator_hint(&self) -> Option<u64> {
                None
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

fn big_pow2(exp: u32) -> BigInt {
    BigInt::one() << exp as usize
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(numerator: i64, denominator: u64) -> Self {
        BigRational::new(BigInt::from(numerator), BigInt::from(denominator))
    }

    fn pow2(exp: i32) -> Self {
        if exp >= 0 {
            BigRational::from_integer(big_pow2(exp as u32))
        } else {
            BigRational::new(BigInt::one(), big_pow2(exp.unsigned_abs()))
        }
    }

    fn floor_log2(&self) -> i32 {
        assert!(self.is_positive(), "floor_log2 of a non-positive value");
        let p = self.numer();
        let q = self.denom();
        let a = p.bits() as i64 - q.bits() as i64;
        // log2(p/q) lies in (a - 1, a + 1)
        let ge = if a >= 0 {
            *p >= q << a as usize
        } else {
            p << (-a) as usize >= *q
        };
        (if ge { a } else { a - 1 }) as i32
    }

    fn to_scaled(&self, denominator: u64) -> Option<u64> {
        let v = self * BigRational::from_integer(BigInt::from(denominator));
        if v.is_integer() {
            v.to_integer().to_u64()
        } else {
            None
        }
    }

    fn denominator_hint(&self) -> Option<u64> {
        self.denom().to_u64()
    }
}

/// A finite value or `+∞`. Ordered with every finite value below `Infinite`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> Extended<T> {
    pub fn zero() -> Self {
        Extended::Finite(T::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn into_finite(self) -> Option<T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a.clone() + b.clone()),
            _ => Extended::Infinite,
        }
    }

    pub fn add_finite(&self, other: &T) -> Self {
        match self {
            Extended::Finite(a) => Extended::Finite(a.clone() + other.clone()),
            Extended::Infinite => Extended::Infinite,
        }
    }

    /// Partial order lifted to a total one; float NaNs compare equal.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl<T: Display> Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}

impl<T> From<T> for Extended<T> {
    fn from(v: T) -> Self {
        Extended::Finite(v)
    }
}

/// Heap key giving a total order to a `PartialOrd` scalar.
#[derive(Clone, Debug)]
pub(crate) struct Ordered<T>(pub T);

impl<T: PartialOrd> PartialEq for Ordered<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: PartialOrd> Eq for Ordered<T> {}

impl<T: PartialOrd> PartialOrd for Ordered<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: PartialOrd> Ord for Ordered<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.partial_cmp(&other.0).unwrap_or(Ordering::Equal)
    }
}

/// Sum of an iterator of scalars.
pub fn sum<T: Scalar, I: IntoIterator<Item = T>>(items: I) -> T {
    items.into_iter().fold(T::zero(), |acc, x| acc + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: u64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn rational_floor_log2_matches_definition() {
        for n in 1..200i64 {
            for d in 1..40u64 {
                let x = q(n, d);
                let k = x.floor_log2();
                assert!(BigRational::pow2(k) <= x, "{x} k={k}");
                assert!(BigRational::pow2(k + 1) > x, "{x} k={k}");
            }
        }
    }

    #[test]
    fn ceil_log2_on_powers() {
        assert_eq!(q(8, 1).ceil_log2(), 3);
        assert_eq!(q(9, 1).ceil_log2(), 4);
        assert_eq!(q(1, 4).ceil_log2(), -2);
        assert_eq!(q(1, 4).floor_log2(), -2);
        assert_eq!(q(1, 3).floor_log2(), -2);
        assert_eq!(8.0f64.floor_log2(), 3);
        assert_eq!(0.25f64.floor_log2(), -2);
        assert_eq!(7.9f32.floor_log2(), 2);
    }

    #[test]
    fn scaled_round_trip() {
        assert_eq!(q(3, 4).to_scaled(8), Some(6));
        assert_eq!(q(3, 4).to_scaled(2), None);
        assert_eq!(0.75f64.to_scaled(4), Some(3));
        assert_eq!(q(5, 6).denominator_hint(), Some(6));
    }

    #[test]
    fn extended_order() {
        let a: Extended<f64> = Extended::Finite(1e300);
        assert!(a < Extended::Infinite);
        assert_eq!(a.add(&Extended::Infinite), Extended::Infinite);
        assert_eq!(Extended::Finite(2.0).min(Extended::Finite(1.0)), Extended::Finite(1.0));
    }
}
