use std::fmt;
use std::sync::Arc;

use num_integer::Integer;

use super::SpacesError;
use crate::numerics::rational::{int, pow2};
use crate::numerics::Interval;

type BitRule = Arc<dyn Fn(usize) -> bool + Send + Sync>;

/// A point of `2^ω`.
///
/// Eventually periodic points are stored as a finite prefix plus a repeating
/// block, normalized so that structural equality is equality of sequences.
/// Other points carry a pure bit rule.
#[derive(Clone)]
pub struct CantorPoint(Repr);

#[derive(Clone)]
enum Repr {
    Periodic { prefix: Vec<bool>, period: Vec<bool> },
    Rule(BitRule),
}

impl CantorPoint {
    pub fn periodic(prefix: Vec<bool>, period: Vec<bool>) -> Result<Self, SpacesError> {
        if period.is_empty() {
            return Err(SpacesError::BadPoint("empty period".into()));
        }
        let (prefix, period) = normalize(prefix, period);
        Ok(CantorPoint(Repr::Periodic { prefix, period }))
    }

    /// `σ b b b …`
    pub fn constant_tail(prefix: &[bool], bit: bool) -> Self {
        Self::periodic(prefix.to_vec(), vec![bit]).expect("non-empty period")
    }

    pub fn from_rule(rule: impl Fn(usize) -> bool + Send + Sync + 'static) -> Self {
        CantorPoint(Repr::Rule(Arc::new(rule)))
    }

    pub fn bit(&self, n: usize) -> bool {
        match &self.0 {
            Repr::Periodic { prefix, period } => {
                if n < prefix.len() {
                    prefix[n]
                } else {
                    period[(n - prefix.len()) % period.len()]
                }
            }
            Repr::Rule(f) => f(n),
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<bool> {
        (0..n).map(|i| self.bit(i)).collect()
    }

    /// `(preperiod length, period length)` for eventually periodic points.
    pub fn period_hint(&self) -> Option<(usize, usize)> {
        match &self.0 {
            Repr::Periodic { prefix, period } => Some((prefix.len(), period.len())),
            Repr::Rule(_) => None,
        }
    }

    pub fn periodic_parts(&self) -> Option<(&[bool], &[bool])> {
        match &self.0 {
            Repr::Periodic { prefix, period } => Some((prefix, period)),
            Repr::Rule(_) => None,
        }
    }

    /// First index `< limit` where the points differ.
    pub fn first_difference(&self, other: &CantorPoint, limit: usize) -> Option<usize> {
        (0..limit).find(|&i| self.bit(i) != other.bit(i))
    }

    /// Exact first difference for two eventually periodic points:
    /// `Some(None)` means equal, `None` means undecidable from the representations.
    pub fn first_difference_exact(&self, other: &CantorPoint) -> Option<Option<usize>> {
        let ((p1, l1), (p2, l2)) = (self.period_hint()?, other.period_hint()?);
        let bound = p1.max(p2) + l1.lcm(&l2);
        Some(self.first_difference(other, bound))
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.0, Repr::Periodic { .. })
    }

    pub fn parse(s: &str) -> Result<Self, SpacesError> {
        let s = s.trim();
        let bad = || SpacesError::BadPoint(s.to_string());
        let mut prefix = None;
        let mut period = None;
        for part in s.split(';') {
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            let bits = parse_bits(v.trim()).ok_or_else(bad)?;
            match k.trim() {
                "prefix" => prefix = Some(bits),
                "period" => period = Some(bits),
                _ => return Err(bad()),
            }
        }
        Self::periodic(prefix.unwrap_or_default(), period.ok_or_else(bad)?)
    }
}

impl PartialEq for CantorPoint {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (
                Repr::Periodic { prefix, period },
                Repr::Periodic {
                    prefix: p2,
                    period: q2,
                },
            ) => prefix == p2 && period == q2,
            (Repr::Rule(a), Repr::Rule(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl fmt::Display for CantorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Periodic { prefix, period } => {
                write!(f, "prefix={};period={}", bits_str(prefix), bits_str(period))
            }
            Repr::Rule(_) => write!(f, "rule:{}…", bits_str(&self.prefix(16))),
        }
    }
}

impl fmt::Debug for CantorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CantorPoint({self})")
    }
}

fn normalize(mut prefix: Vec<bool>, mut period: Vec<bool>) -> (Vec<bool>, Vec<bool>) {
    let l = period.len();
    if let Some(d) = (1..=l).find(|d| l.is_multiple_of(*d) && (0..l).all(|i| period[i] == period[i % d])) {
        period.truncate(d);
    }
    while let (Some(&last), Some(&tail)) = (prefix.last(), period.last()) {
        if last != tail {
            break;
        }
        prefix.pop();
        period.rotate_right(1);
    }
    (prefix, period)
}

pub fn bits_str(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn parse_bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

/// The basic clopen set `[σ]` of sequences extending `σ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cylinder {
    prefix: Vec<bool>,
}

impl Cylinder {
    pub fn root() -> Self {
        Self { prefix: Vec::new() }
    }

    pub fn new(prefix: Vec<bool>) -> Self {
        Self { prefix }
    }

    pub fn bits(&self) -> &[bool] {
        &self.prefix
    }

    pub fn len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty()
    }

    pub fn child(&self, b: bool) -> Cylinder {
        let mut p = self.prefix.clone();
        p.push(b);
        Cylinder { prefix: p }
    }

    pub fn truncate(&self, n: usize) -> Cylinder {
        Cylinder {
            prefix: self.prefix[..n.min(self.prefix.len())].to_vec(),
        }
    }

    /// `[self] ⊇ [other]`.
    pub fn contains_cylinder(&self, other: &Cylinder) -> bool {
        other.prefix.starts_with(&self.prefix)
    }

    pub fn is_disjoint(&self, other: &Cylinder) -> bool {
        !self.contains_cylinder(other) && !other.contains_cylinder(self)
    }

    pub fn contains(&self, x: &CantorPoint) -> bool {
        self.prefix.iter().enumerate().all(|(i, &b)| x.bit(i) == b)
    }

    pub fn of_point(x: &CantorPoint, n: usize) -> Cylinder {
        Cylinder {
            prefix: x.prefix(n),
        }
    }

    pub fn parse(s: &str) -> Option<Cylinder> {
        let s = s.trim();
        let s = s.strip_prefix("cyl:").unwrap_or(s);
        parse_bits(s).map(Cylinder::new)
    }
}

impl fmt::Display for Cylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cyl:{}", bits_str(&self.prefix))
    }
}

/// `d(x, y) = 2^-n` for the length `n` of the longest common prefix.
pub fn cantor_dist(x: &CantorPoint, y: &CantorPoint, depth: usize) -> Interval {
    assert!(depth >= 1, "depth must be at least 1");
    match x.first_difference(y, depth) {
        Some(n) => Interval::point(pow2(-(n as i64))),
        None => Interval::new(int(0), pow2(-(depth as i64))),
    }
}

/// The ball `B(x, r)` as a cylinder: `[x↾m]` for the least `m` with `2^-m < r`.
pub fn ball_cylinder(center: &CantorPoint, radius: &crate::numerics::Rational) -> Cylinder {
    let m = crate::numerics::rational::least_neg_power_strictly_below(2, radius)
        .expect("ball radius must be positive");
    Cylinder::of_point(center, m as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::{int, ratio};

    fn p(s: &str) -> CantorPoint {
        CantorPoint::parse(s).unwrap()
    }

    #[test]
    fn normalization_makes_equality_structural() {
        assert_eq!(p("prefix=01;period=01"), p("prefix=;period=01"));
        assert_eq!(p("prefix=0;period=00"), p("period=0"));
        assert_eq!(p("prefix=1;period=0101").to_string(), "prefix=;period=10");
        assert_eq!(p("prefix=0;period=01").to_string(), "prefix=0;period=01");
        assert_ne!(p("period=01"), p("period=10"));
    }

    #[test]
    fn distances() {
        let zeros = p("period=0");
        assert_eq!(cantor_dist(&zeros, &zeros, 8), Interval::new(int(0), ratio(1, 256)));
        assert_eq!(cantor_dist(&zeros, &p("period=1"), 8), Interval::point(int(1)));
        let x = p("period=01");
        let y = p("prefix=0100;period=0");
        assert_eq!(cantor_dist(&x, &y, 8), Interval::point(ratio(1, 8)));
    }

    #[test]
    fn exact_difference_of_periodic_points() {
        let x = p("prefix=1;period=011");
        let y = p("prefix=10;period=110");
        assert_eq!(x.first_difference_exact(&y), Some(None));
        let z = p("prefix=1011011;period=0");
        assert_eq!(x.first_difference_exact(&z), Some(Some(8)));
    }

    #[test]
    fn cylinder_relations() {
        let a = Cylinder::new(vec![false, true]);
        let b = a.child(true);
        assert!(a.contains_cylinder(&b));
        assert!(!b.contains_cylinder(&a));
        assert!(a.is_disjoint(&Cylinder::new(vec![true])));
        assert!(b.contains(&p("prefix=011;period=0")));
        assert_eq!(ball_cylinder(&p("period=1"), &ratio(1, 2)).len(), 2);
        assert_eq!(ball_cylinder(&p("period=1"), &ratio(3, 4)).len(), 1);
        assert_eq!(ball_cylinder(&p("period=1"), &int(2)).len(), 0);
    }
}
