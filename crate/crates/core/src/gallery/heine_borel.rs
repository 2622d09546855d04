//! The series gauge `δ(x) = ¼ Σ 2^-n d_n(x)` of a countable open cover and
//! the finite subcover read off a δ-fine cover.

use std::sync::Arc;

use num_traits::Zero;

use super::{GalleryError, Result};
use crate::fine::{find_cover_unit, verify_cover, FineCover, UnitSearch};
use crate::gauges::{parse_index_rules, ContinuousCode, GaugeCode, GaugeError, Verdict};
use crate::numerics::rational::{fmt_rational, int, least_neg_power_strictly_below, parse_rational, pow2, ratio};
use crate::numerics::{Interval, Quad, Rational};
use crate::spaces::{Point, UnitPoint};

/// Open interval `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl OpenInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo >= hi {
            return Err(GalleryError::Spec(format!("empty interval ({}, {})", fmt_rational(&lo), fmt_rational(&hi))));
        }
        Ok(OpenInterval { lo, hi })
    }

    /// `min(1, d(x, U^c))` over every `x` in `i`.
    fn depth_enclosure(&self, i: &Interval) -> Interval {
        let d = |x: &Rational| {
            let v = (x - &self.lo).min(&self.hi - x).max(Rational::zero());
            v.min(int(1))
        };
        let (a, b) = (d(i.lo()), d(i.hi()));
        let mid = (&self.lo + &self.hi) / int(2);
        let top = if i.contains(&mid) { d(&mid) } else { a.clone().max(b.clone()) };
        Interval::new(a.min(b), top)
    }
}

type TailFn = Arc<dyn Fn(u64) -> std::result::Result<OpenInterval, String> + Send + Sync>;

/// A finite head followed by an optional rule for the `m`-th tail interval.
#[derive(Clone)]
pub struct OpenCoverSpec {
    pub head: Vec<OpenInterval>,
    tail: Option<TailFn>,
}

impl std::fmt::Debug for OpenCoverSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OpenCoverSpec").field("head", &self.head).field("tail", &self.tail.is_some()).finish()
    }
}

impl OpenCoverSpec {
    pub fn finite(head: Vec<OpenInterval>) -> Self {
        OpenCoverSpec { head, tail: None }
    }

    /// Tail interval `m` is `(c(m) − r(m), c(m) + r(m))`; it is `U_{head+m}`.
    pub fn with_tail(
        mut self,
        rule: impl Fn(u64) -> (Rational, Rational) + Send + Sync + 'static,
    ) -> Self {
        self.tail = Some(Arc::new(move |m| {
            let (c, r) = rule(m);
            OpenInterval::new(&c - &r, &c + &r).map_err(|e| e.to_string())
        }));
        self
    }

    pub fn has_tail(&self) -> bool {
        self.tail.is_some()
    }

    pub fn interval(&self, n: u64) -> Result<Option<OpenInterval>> {
        let h = self.head.len() as u64;
        if n < h {
            return Ok(Some(self.head[n as usize].clone()));
        }
        match &self.tail {
            Some(t) => t(n - h).map(Some).map_err(GalleryError::Spec),
            None => Ok(None),
        }
    }

    /// `U_0, …, U_k` (fewer when the family is finite).
    pub fn prefix(&self, k: u64) -> Result<Vec<OpenInterval>> {
        let mut out = Vec::new();
        for n in 0..=k {
            match self.interval(n)? {
                Some(u) => out.push(u),
                None => break,
            }
        }
        Ok(out)
    }
}

/// Whether `(a, b)`, or `[a, b]` when `closed`, lies in the union of `us`.
pub fn union_covers(us: &[OpenInterval], a: &Rational, b: &Rational, closed: bool) -> bool {
    let mut reach = a.clone();
    let mut first = true;
    loop {
        let best = us
            .iter()
            .filter(|u| u.lo < reach || (first && !closed && u.lo == reach))
            .map(|u| &u.hi)
            .max();
        match best {
            Some(h) if *h > reach => reach = h.clone(),
            _ => return false,
        }
        first = false;
        if reach > *b || (!closed && reach == *b) {
            return true;
        }
    }
}

/// The series gauge, with the tail past the evaluated terms enclosed by
/// `¼·[0, 2^-K]` since every `d_n ≤ 1`.
pub fn heine_borel_gauge(cov: &OpenCoverSpec) -> ContinuousCode {
    let cov = cov.clone();
    ContinuousCode::unit(move |i, k| {
        let count = if cov.has_tail() { (k as usize + 1).max(cov.head.len()) } else { cov.head.len() };
        let mut sum = Interval::zero();
        for n in 0..count {
            let u = cov.interval(n as u64).map_err(|e| GaugeError::Eval(e.to_string()))?;
            let u = u.expect("index below the family size");
            sum = sum.add(&u.depth_enclosure(i).scale(&pow2(-(n as i64))));
        }
        if cov.has_tail() {
            sum = sum.add(&Interval::new(Rational::zero(), pow2(1 - count as i64)));
        }
        Ok(sum.scale(&ratio(1, 4)))
    })
}

const MAX_PRECISION: u32 = 64;

/// Checks "if `δ(p) > 2^-k` then `(p − δ(p), p + δ(p)) ⊆ ⋃_{n≤k} U_n`".
///
/// `No` is returned only for a verified counterexample.
pub fn check_star(cov: &OpenCoverSpec, g: &ContinuousCode, p: &Rational, k: u32) -> Result<Verdict> {
    let threshold = pow2(-(k as i64));
    let us = cov.prefix(k as u64)?;
    let x = Point::Unit(UnitPoint::rational(p.clone()));
    let mut prec = k + 2;
    loop {
        let d = g.eval_point(&x, prec)?;
        if d.hi() <= &threshold {
            return Ok(Verdict::Yes);
        }
        if d.lo() > &threshold {
            if union_covers(&us, &(p - d.hi()), &(p + d.hi()), false) {
                return Ok(Verdict::Yes);
            }
            if !union_covers(&us, &(p - d.lo()), &(p + d.lo()), false) {
                return Ok(Verdict::No);
            }
        }
        if prec >= MAX_PRECISION {
            return Ok(Verdict::Unknown);
        }
        prec = (prec * 2).min(MAX_PRECISION);
    }
}

/// `k = max_p k_p` with `k_p` least such that `δ(p) > 2^-k_p` is verified;
/// `{U_n : n ≤ k}` is then checked to cover `[0,1]`.
pub fn finite_subcover(cov: &OpenCoverSpec, g: &GaugeCode, c: &FineCover<Quad>, stage: u32) -> Result<u64> {
    let report = verify_cover(g, c, stage)?;
    if report.verdict != Verdict::Yes {
        return Err(GalleryError::Postcondition(format!("cover does not verify ({})", report.verdict)));
    }
    let mut k = 0u64;
    for ball in &c.balls {
        let b = g.bounds(&Point::Unit(UnitPoint::Exact(ball.center.clone())), stage)?;
        let lo = b.lo.filter(|l| *l > Rational::zero()).ok_or_else(|| {
            GalleryError::Postcondition(format!("no positive lower bound at {}", ball.center))
        })?;
        let kp = least_neg_power_strictly_below(2, &lo).expect("positive bound") as u64;
        k = k.max(kp);
    }
    if !union_covers(&cov.prefix(k)?, &Rational::zero(), &int(1), true) {
        return Err(GalleryError::Postcondition(format!("U_0..U_{k} do not cover [0,1]")));
    }
    Ok(k)
}

#[derive(Clone, Debug)]
pub struct HeineBorelReport {
    pub k: u64,
    pub cover: FineCover<Quad>,
}

/// Gauge, cover search, and the finite subcover index.
pub fn heine_borel_demo(cov: &OpenCoverSpec, depth: u32, stage: u32) -> Result<HeineBorelReport> {
    let g = GaugeCode::Continuous(heine_borel_gauge(cov));
    let cover = find_cover_unit(&g, &UnitSearch::new(depth, stage))?
        .cover()
        .ok_or_else(|| GalleryError::Postcondition(format!("no cover found by depth {depth}")))?;
    let k = finite_subcover(cov, &g, &cover, stage)?;
    Ok(HeineBorelReport { k, cover })
}

/// `a/b c/d` per line for the head and an optional `tail: center radius`
/// line whose expressions use the tail index `m`.
pub fn parse_cover_file(text: &str) -> Result<OpenCoverSpec> {
    let mut head = Vec::new();
    let mut tail = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let err = |msg: String| GalleryError::Parse { line: i + 1, msg };
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("tail:") {
            if tail.is_some() {
                return Err(err("second tail rule".into()));
            }
            let rules = parse_index_rules(rest, "m", 2).map_err(|e| err(e.to_string()))?;
            tail = Some(rules);
            continue;
        }
        if tail.is_some() {
            return Err(err("head interval after the tail rule".into()));
        }
        let parts: Vec<_> = line.split_whitespace().collect();
        let [a, b] = parts[..] else {
            return Err(err(format!("expected `lo hi`, got `{line}`")));
        };
        let a = parse_rational(a).map_err(|e| err(e.to_string()))?;
        let b = parse_rational(b).map_err(|e| err(e.to_string()))?;
        head.push(OpenInterval::new(a, b).map_err(|e| err(e.to_string()))?);
    }
    let mut cov = OpenCoverSpec::finite(head);
    if let Some(rules) = tail {
        let [c, r]: [_; 2] = rules.try_into().expect("two rules");
        cov.tail = Some(Arc::new(move |m| {
            let c = c.at(m)?;
            let r = r.at(m)?;
            OpenInterval::new(&c - &r, &c + &r).map_err(|e| e.to_string())
        }));
    }
    Ok(cov)
}

/// The compiled-in `two.cov`.
pub const TWO_COV: &str = "-1/10 6/10\n4/10 11/10\n";

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> OpenCoverSpec {
        parse_cover_file(TWO_COV).unwrap()
    }

    fn at(g: &ContinuousCode, x: Rational, k: u32) -> Interval {
        g.eval_point(&Point::Unit(UnitPoint::rational(x)), k).unwrap()
    }

    #[test]
    fn gauge_values() {
        let g = heine_borel_gauge(&two());
        assert_eq!(at(&g, ratio(1, 2), 8), Interval::point(ratio(3, 80)));
        assert_eq!(at(&g, int(0), 8), Interval::point(ratio(1, 40)));
        // d_0(1/2) = 3/2 is capped at 1
        let one = OpenCoverSpec::finite(vec![OpenInterval::new(int(-1), int(2)).unwrap()]);
        assert_eq!(at(&heine_borel_gauge(&one), ratio(1, 2), 3), Interval::point(ratio(1, 4)));
    }

    #[test]
    fn star_examples() {
        let cov = two();
        let g = heine_borel_gauge(&cov);
        assert_eq!(check_star(&cov, &g, &ratio(1, 2), 1).unwrap(), Verdict::Yes);
        assert_eq!(check_star(&cov, &g, &ratio(1, 2), 5).unwrap(), Verdict::Yes);
    }

    #[test]
    fn union_check_edges() {
        let u = |a, b| OpenInterval::new(ratio(a, 10), ratio(b, 10)).unwrap();
        let us = vec![u(-1, 5), u(5, 11)];
        // 1/2 itself is uncovered
        assert!(!union_covers(&us, &int(0), &int(1), true));
        assert!(union_covers(&us, &int(0), &ratio(1, 2), false));
        assert!(union_covers(&[u(-1, 6), u(4, 11)], &int(0), &int(1), true));
        assert!(!union_covers(&[u(0, 11)], &int(0), &int(1), true));
        assert!(union_covers(&[u(0, 11)], &int(0), &int(1), false));
    }

    #[test]
    fn two_interval_demo() {
        let r = heine_borel_demo(&two(), 12, 16).unwrap();
        assert!(r.k >= 1);
    }

    #[test]
    fn tail_rule_cover() {
        let text = "-1/10 3/10\n1/4 11/10\ntail: 1/(m+2) 4^(-m-2)\n";
        let cov = parse_cover_file(text).unwrap();
        assert_eq!(cov.interval(2).unwrap().unwrap().hi, ratio(1, 2) + ratio(1, 16));
        let r = heine_borel_demo(&cov, 14, 16).unwrap();
        assert!(union_covers(&cov.prefix(r.k).unwrap(), &int(0), &int(1), true));
    }

    #[test]
    fn cover_file_errors() {
        assert!(matches!(parse_cover_file("1/2\n"), Err(GalleryError::Parse { line: 1, .. })));
        assert!(matches!(parse_cover_file("0 1\nx y\n"), Err(GalleryError::Parse { line: 2, .. })));
        assert!(matches!(parse_cover_file("1 0\n"), Err(GalleryError::Parse { line: 1, .. })));
        assert!(matches!(parse_cover_file("tail: m 1\n0 1\n"), Err(GalleryError::Parse { line: 2, .. })));
    }
}
