use std::fmt;

use num_traits::{Signed, Zero};

use super::rational::{fmt_rational, pow2, Rational};

/// Closed interval `[lo, hi]` with exact rational endpoints.
///
/// Every operation is exact, so enclosures are tight: the result of `a ∘ b`
/// is exactly `{x ∘ y : x ∈ a, y ∈ b}` for the monotone operations and its
/// hull otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    /// Panics if `lo > hi`.
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn try_new(lo: Rational, hi: Rational) -> Option<Self> {
        (lo <= hi).then_some(Self { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn zero() -> Self {
        Self::point(Rational::zero())
    }

    pub fn unit() -> Self {
        Self::new(Rational::zero(), super::rational::int(1))
    }

    /// `[0, 2^-n]`: the tail `Σ_{m>n} 2^-m c_m` for coefficients `c_m ∈ [0, 1]`.
    pub fn geom_tail(n: u32) -> Self {
        Self::new(Rational::zero(), pow2(-(n as i64)))
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn into_bounds(self) -> (Rational, Rational) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / super::rational::int(2)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        Interval::try_new(lo, hi)
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: (&self.lo).min(&other.lo).clone(),
            hi: (&self.hi).max(&other.hi).clone(),
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        if c.is_negative() {
            Interval {
                lo: &self.hi * c,
                hi: &self.lo * c,
            }
        } else {
            Interval {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    pub fn shift(&self, c: &Rational) -> Interval {
        Interval {
            lo: &self.lo + c,
            hi: &self.hi + c,
        }
    }

    /// Panics if the divisor contains zero; no caller needs that case.
    pub fn div(&self, other: &Interval) -> Interval {
        assert!(
            !other.contains_zero(),
            "division by an interval containing zero: {other}"
        );
        let recip = Interval {
            lo: other.hi.recip(),
            hi: other.lo.recip(),
        };
        self.mul(&recip)
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            Interval {
                lo: Rational::zero(),
                hi: (-&self.lo).max(self.hi.clone()),
            }
        }
    }

    pub fn min(&self, other: &Interval) -> Interval {
        Interval {
            lo: (&self.lo).min(&other.lo).clone(),
            hi: (&self.hi).min(&other.hi).clone(),
        }
    }

    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: (&self.lo).max(&other.lo).clone(),
            hi: (&self.hi).max(&other.hi).clone(),
        }
    }

    /// Widen by `r >= 0` on both sides.
    pub fn widen(&self, r: &Rational) -> Interval {
        Interval {
            lo: &self.lo - r,
            hi: &self.hi + r,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", fmt_rational(&self.lo), fmt_rational(&self.hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{int, ratio};

    fn iv(a: Rational, b: Rational) -> Interval {
        Interval::new(a, b)
    }

    #[test]
    fn addition_examples() {
        assert_eq!(Interval::unit().add(&Interval::zero()), Interval::unit());
        assert_eq!(
            iv(ratio(1, 3), ratio(1, 2)).add(&Interval::point(ratio(1, 6))),
            iv(ratio(1, 2), ratio(2, 3))
        );
        assert_eq!(
            iv(int(-1), int(2)).add(&iv(int(-2), int(1))),
            iv(int(-3), int(3))
        );
    }

    #[test]
    fn mul_abs_min_examples() {
        assert_eq!(
            iv(int(-1), int(2)).mul(&Interval::point(int(3))),
            iv(int(-3), int(6))
        );
        assert_eq!(iv(int(-2), int(1)).abs(), iv(int(0), int(2)));
        assert_eq!(
            Interval::unit().min(&iv(ratio(1, 2), int(3))),
            iv(int(0), int(1))
        );
        assert_eq!(
            iv(int(1), int(2)).div(&iv(int(2), int(4))),
            iv(ratio(1, 4), int(1))
        );
    }

    #[test]
    #[should_panic]
    fn division_by_zero_interval_fails_fast() {
        Interval::unit().div(&iv(int(-1), int(1)));
    }

    #[test]
    fn geometric_tail() {
        assert_eq!(Interval::geom_tail(0), iv(int(0), int(1)));
        assert_eq!(Interval::geom_tail(3), iv(int(0), ratio(1, 8)));
        assert_eq!(Interval::geom_tail(10), iv(int(0), ratio(1, 1024)));
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(iv(ratio(-3, 8), int(1)).to_string(), "[-3/8,1/1]");
    }
}
