//! Exact rationals and closed rational intervals.
//!
//! Every measure in the crate is a ratio of counts, so all headline numbers
//! are carried as [`Rational`]. Truncation at a finite working depth leaves
//! some orbit mass undetermined; that mass is carried as the width of an
//! [`Interval`] rather than being dropped.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// `num / den` as an exact rational. Panics on a zero denominator.
pub fn ratio<N: Into<BigInt>, D: Into<BigInt>>(num: N, den: D) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn int<N: Into<BigInt>>(n: N) -> Rational {
    Rational::from_integer(n.into())
}

pub fn to_f64(q: &Rational) -> f64 {
    // Large numerators and denominators both overflow f64; scale them down
    // together before dividing.
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let bits = q.numer().bits().max(q.denom().bits());
    let shift = bits.saturating_sub(1000);
    let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> shift).to_f64().unwrap_or(1.0);
    n / d
}

/// Renders `p/q` with `q >= 1`, including integers (`3/1`).
pub fn fraction(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Fixed-precision decimal rendering used next to every exact fraction.
pub fn decimal(q: &Rational) -> String {
    format!("{:.12}", to_f64(q))
}

pub fn min_rational<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_rational<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a >= b {
        a
    } else {
        b
    }
}

/// Closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    /// Panics if `lo > hi`; callers construct intervals from counts where
    /// the ordering is structural.
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        Interval { lo, hi }
    }

    pub fn point(value: Rational) -> Self {
        Interval {
            lo: value.clone(),
            hi: value,
        }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn radius(&self) -> Rational {
        self.width() / int(2)
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Largest absolute value attained on the interval.
    pub fn magnitude(&self) -> Rational {
        max_rational(&self.lo.abs(), &self.hi.abs()).clone()
    }

    /// Smallest absolute value attained on the interval.
    pub fn mignitude(&self) -> Rational {
        if self.contains(&Rational::zero()) {
            Rational::zero()
        } else {
            min_rational(&self.lo.abs(), &self.hi.abs()).clone()
        }
    }

    /// Range of `|x|` for `x` in the interval.
    pub fn abs(&self) -> Interval {
        Interval::new(self.mignitude(), self.magnitude())
    }

    /// Range of `x^2` for `x` in the interval.
    pub fn square(&self) -> Interval {
        let lo = self.mignitude();
        let hi = self.magnitude();
        Interval::new(&lo * &lo, &hi * &hi)
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(
            min_rational(&self.lo, &other.lo).clone(),
            max_rational(&self.hi, &other.hi).clone(),
        )
    }

    /// Endpoint-wise minimum: the range of `min(x, y)`.
    pub fn min(&self, other: &Interval) -> Interval {
        Interval::new(
            min_rational(&self.lo, &other.lo).clone(),
            min_rational(&self.hi, &other.hi).clone(),
        )
    }

    /// Endpoint-wise maximum: the range of `max(x, y)`.
    pub fn max(&self, other: &Interval) -> Interval {
        Interval::new(
            max_rational(&self.lo, &other.lo).clone(),
            max_rational(&self.hi, &other.hi).clone(),
        )
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (to_f64(&self.lo), to_f64(&self.hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", fraction(&self.lo))
        } else {
            write!(f, "[{}, {}]", fraction(&self.lo), fraction(&self.hi))
        }
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        Interval::new(&self.lo + &rhs.lo, &self.hi + &rhs.hi)
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        Interval::new(&self.lo - &rhs.hi, &self.hi - &rhs.lo)
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-&self.hi, -&self.lo)
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = products.iter().min().cloned().unwrap();
        let hi = products.iter().max().cloned().unwrap();
        Interval::new(lo, hi)
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::zero(), |acc, x| &acc + &x)
    }
}

/// `ceil(log_b(n))` for small integer work; used to size working depths.
pub fn ceil_log(base: u64, n: u64) -> usize {
    let mut d = 0;
    let mut p: u64 = 1;
    while p < n {
        p = p.saturating_mul(base);
        d += 1;
    }
    d
}

/// Exact `2^-e`.
pub fn pow2_neg(e: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << e)
}

/// `true` when `q` is an integer multiple of `1/den`.
pub fn has_denominator_dividing(q: &Rational, den: &BigInt) -> bool {
    den.is_multiple_of(q.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_rendering_always_has_denominator() {
        assert_eq!(fraction(&int(3)), "3/1");
        assert_eq!(fraction(&ratio(-2, 6)), "-1/3");
        assert_eq!(fraction(&Rational::zero()), "0/1");
    }

    #[test]
    fn interval_arithmetic_is_outward() {
        let a = Interval::new(ratio(-1, 2), ratio(1, 4));
        let b = Interval::new(ratio(1, 3), ratio(2, 3));
        assert_eq!(&a + &b, Interval::new(ratio(-1, 6), ratio(11, 12)));
        assert_eq!(&a - &b, Interval::new(ratio(-7, 6), ratio(-1, 12)));
        assert_eq!(&a * &b, Interval::new(ratio(-1, 3), ratio(1, 6)));
        assert_eq!(a.square(), Interval::new(int(0), ratio(1, 4)));
        assert_eq!(a.abs(), Interval::new(int(0), ratio(1, 2)));
        assert_eq!(b.square(), Interval::new(ratio(1, 9), ratio(4, 9)));
    }

    #[test]
    fn scale_by_negative_swaps_endpoints() {
        let a = Interval::new(int(1), int(2));
        assert_eq!(a.scale(&int(-1)), Interval::new(int(-2), int(-1)));
    }

    #[test]
    fn to_f64_survives_huge_terms() {
        let big = BigInt::one() << 3000u32;
        let q = Rational::new(big.clone() * 3, big * 4);
        assert_eq!(to_f64(&q), 0.75);
        let tiny = Rational::new(BigInt::one(), (BigInt::one() << 2000u32) + 1);
        assert!(to_f64(&tiny) >= 0.0);
    }

    #[test]
    #[should_panic]
    fn reversed_interval_panics() {
        let _ = Interval::new(int(1), int(0));
    }
}
