//! Exact numbers of the form `a + b·√2` with rational `a`, `b`.
//!
//! These give the library irrational points whose order relations are still
//! decidable, which the Dirichlet demonstration needs for its tags.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::interval::Interval;
use super::rational::{fmt_rational, floor, parse_rational, Rational};
use super::NumericsError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quad {
    a: Rational,
    b: Rational,
}

impl Quad {
    pub fn new(a: Rational, b: Rational) -> Self {
        Self { a, b }
    }

    pub fn rational(a: Rational) -> Self {
        Self {
            a,
            b: Rational::zero(),
        }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn sqrt2_part(&self) -> &Rational {
        &self.b
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.b.is_zero().then_some(&self.a)
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn add_rational(&self, r: &Rational) -> Quad {
        Quad::new(&self.a + r, self.b.clone())
    }

    pub fn sub_rational(&self, r: &Rational) -> Quad {
        Quad::new(&self.a - r, self.b.clone())
    }

    pub fn add(&self, other: &Quad) -> Quad {
        Quad::new(&self.a + &other.a, &self.b + &other.b)
    }

    pub fn sub(&self, other: &Quad) -> Quad {
        Quad::new(&self.a - &other.a, &self.b - &other.b)
    }

    pub fn scale(&self, c: &Rational) -> Quad {
        Quad::new(&self.a * c, &self.b * c)
    }

    /// Sign of `a + b√2`, decided exactly.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        match (sa, sb) {
            (x, Ordering::Equal) => x,
            (Ordering::Equal, y) => y,
            (x, y) if x == y => x,
            (x, _) => {
                // opposite signs: compare a^2 with 2 b^2
                let a2 = &self.a * &self.a;
                let b2 = &self.b * &self.b * Rational::from_integer(BigInt::from(2));
                match a2.cmp(&b2) {
                    Ordering::Greater => x,
                    Ordering::Less => x.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        self.sub_rational(r).signum()
    }

    /// Rational enclosure of width at most `2^-k`.
    pub fn approximant(&self, k: u32) -> Interval {
        if self.b.is_zero() {
            return Interval::point(self.a.clone());
        }
        // |b|√2 = √(2b²) = √(p q) / q for 2b² = p/q
        let s = &self.b * &self.b * Rational::from_integer(BigInt::from(2));
        let (p, q) = (s.numer().clone(), s.denom().clone());
        let scale = BigInt::one() << (k as usize);
        let root = (&p * &q * &scale * &scale).sqrt();
        let den = &q * &scale;
        let lo = Rational::new(root.clone(), den.clone());
        let hi = Rational::new(root + BigInt::one(), den);
        let mag = Interval::new(lo, hi);
        let part = if self.b.is_negative() { mag.neg() } else { mag };
        part.shift(&self.a)
    }

    /// Largest dyadic `j/2^k` below the value (equal only for rational values).
    pub fn dyadic_floor(&self, k: u32) -> Rational {
        if let Some(r) = self.as_rational() {
            return super::rational::dyadic_floor(r, k);
        }
        let scale = Rational::from_integer(BigInt::one() << (k as usize));
        let mut extra = 4;
        loop {
            let enc = self.approximant(k + extra).scale(&scale);
            let (fl, fh) = (floor(enc.lo()), floor(enc.hi()));
            if fl == fh {
                return Rational::from_integer(fl) / &scale;
            }
            extra += 8;
        }
    }

    pub fn parse(s: &str) -> Result<Quad, NumericsError> {
        let s = s.trim();
        let Some(body) = s.strip_suffix("*sqrt2") else {
            return Ok(Quad::rational(parse_rational(s)?));
        };
        // split at the last sign that is not at position 0 and not after '/'
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'/' {
                split = Some(i);
                break;
            }
        }
        let bad = || NumericsError::BadRational(s.to_string());
        let i = split.ok_or_else(bad)?;
        let a = parse_rational(&body[..i])?;
        let b_txt = &body[i..];
        let b = parse_rational(b_txt.strip_prefix('+').unwrap_or(b_txt))?;
        Ok(Quad::new(a, b))
    }
}

impl Ord for Quad {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sub(other).signum()
    }
}

impl PartialOrd for Quad {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Rational> for Quad {
    fn from(r: Rational) -> Self {
        Quad::rational(r)
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", fmt_rational(&self.a));
        }
        let sign = if self.b.is_negative() { "" } else { "+" };
        write!(
            f,
            "{}{}{}*sqrt2",
            fmt_rational(&self.a),
            sign,
            fmt_rational(&self.b)
        )
    }
}
