use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use super::SpacesError;
use crate::numerics::{Interval, Quad, Rational};

type Approximant = Arc<dyn Fn(u32) -> Interval + Send + Sync>;

/// A real point given by nested rational approximants.
///
/// Exact points (rationals and `a + b√2`) are tagged so callers can take exact
/// paths; general points only ever support verified-apart comparisons.
#[derive(Clone)]
pub enum UnitPoint {
    Exact(Quad),
    Approx(Approximant),
}

/// Refinement ceiling for comparisons against approximate points.
pub const MAX_REFINEMENT: u32 = 512;

impl UnitPoint {
    pub fn rational(r: Rational) -> Self {
        UnitPoint::Exact(Quad::rational(r))
    }

    /// `approximant(k)` must have width `<= 2^-k` and be nested in `k`.
    pub fn from_approximants(f: impl Fn(u32) -> Interval + Send + Sync + 'static) -> Self {
        UnitPoint::Approx(Arc::new(f))
    }

    pub fn approximant(&self, k: u32) -> Interval {
        match self {
            UnitPoint::Exact(q) => q.approximant(k),
            UnitPoint::Approx(f) => f(k),
        }
    }

    pub fn exact(&self) -> Option<&Quad> {
        match self {
            UnitPoint::Exact(q) => Some(q),
            UnitPoint::Approx(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.exact().and_then(Quad::as_rational)
    }

    /// Ordering against a rational once the two are verified apart (or exactly
    /// comparable); `None` if precision `MAX_REFINEMENT` does not separate them.
    pub fn cmp_rational(&self, r: &Rational) -> Option<Ordering> {
        if let UnitPoint::Exact(q) = self {
            return Some(q.cmp_rational(r));
        }
        let mut k = 8;
        while k <= MAX_REFINEMENT {
            let a = self.approximant(k);
            if a.hi() < r {
                return Some(Ordering::Less);
            }
            if a.lo() > r {
                return Some(Ordering::Greater);
            }
            k *= 2;
        }
        None
    }

    /// Agreement to precision `k`: the approximants at `k` intersect.
    pub fn agrees_to(&self, other: &UnitPoint, k: u32) -> bool {
        self.approximant(k).intersects(&other.approximant(k))
    }

    pub fn verified_apart(&self, other: &UnitPoint, k: u32) -> bool {
        !self.agrees_to(other, k)
    }

    /// `rat:3/8`, `quad:1/4+1/8*sqrt2`, or `approx:[lo,hi]@k` at precision `k`.
    pub fn serialize(&self, k: u32) -> String {
        match self {
            UnitPoint::Exact(q) if q.is_rational() => format!("rat:{q}"),
            UnitPoint::Exact(q) => format!("quad:{q}"),
            UnitPoint::Approx(_) => format!("approx:{}@{k}", self.approximant(k)),
        }
    }

    /// Parses the forms written by [`UnitPoint::serialize`]; a bare rational is
    /// accepted as `rat:`. An `approx:` point answers every query with the
    /// stored interval.
    pub fn parse(s: &str) -> Result<Self, SpacesError> {
        let s = s.trim();
        let bad = || SpacesError::BadPoint(s.to_string());
        if let Some(r) = s.strip_prefix("rat:") {
            let r = crate::numerics::rational::parse_rational(r).map_err(|_| bad())?;
            return Ok(UnitPoint::rational(r));
        }
        if let Some(q) = s.strip_prefix("quad:") {
            return Ok(UnitPoint::Exact(Quad::parse(q).map_err(|_| bad())?));
        }
        if let Some(rest) = s.strip_prefix("approx:") {
            let (iv, _k) = rest.rsplit_once('@').ok_or_else(bad)?;
            let inner = iv
                .trim()
                .strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(bad)?;
            let (lo, hi) = inner.split_once(',').ok_or_else(bad)?;
            let lo = crate::numerics::rational::parse_rational(lo).map_err(|_| bad())?;
            let hi = crate::numerics::rational::parse_rational(hi).map_err(|_| bad())?;
            let iv = Interval::try_new(lo, hi).ok_or_else(bad)?;
            return Ok(UnitPoint::from_approximants(move |_| iv.clone()));
        }
        Quad::parse(s).map(UnitPoint::Exact).map_err(|_| bad())
    }
}

impl From<Quad> for UnitPoint {
    fn from(q: Quad) -> Self {
        UnitPoint::Exact(q)
    }
}

impl From<Rational> for UnitPoint {
    fn from(r: Rational) -> Self {
        UnitPoint::rational(r)
    }
}

impl fmt::Debug for UnitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnitPoint({})", self.serialize(32))
    }
}
