use std::cmp::Ordering;
use std::fmt::Debug;

use num_traits::{One, Signed, Zero};

use super::{FineError, Result, TaggedPartition};
use crate::gauges::{GaugeCode, Verdict};
use crate::numerics::rational::{fmt_rational, int, ratio};
use crate::numerics::{Quad, Rational};
use crate::spaces::{ball_cylinder, CantorPoint, Cylinder, Point, UnitPoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball<P> {
    pub center: P,
    pub radius: Rational,
}

/// A finite set of balls claimed to cover the whole space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FineCover<P> {
    pub balls: Vec<Ball<P>>,
}

impl<P> FineCover<P> {
    pub fn new(balls: Vec<Ball<P>>) -> Self {
        FineCover { balls }
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &P> {
        self.balls.iter().map(|b| &b.center)
    }
}

/// Centers usable in a [`FineCover`]: exact unit points or Cantor points.
pub trait CoverPoint: Clone + Debug + Send + Sync + Sized {
    fn to_point(&self) -> Point;
    fn render(&self) -> String;
    fn in_space(&self) -> bool;
    /// A point outside every ball, if the balls fail to cover.
    fn uncovered(balls: &[Ball<Self>]) -> Option<Self>;
}

impl CoverPoint for Quad {
    fn to_point(&self) -> Point {
        Point::Unit(UnitPoint::Exact(self.clone()))
    }

    fn render(&self) -> String {
        match self.as_rational() {
            Some(r) => fmt_rational(r),
            None => format!("quad:{self}"),
        }
    }

    fn in_space(&self) -> bool {
        self.cmp_rational(&int(0)) != Ordering::Less && self.cmp_rational(&int(1)) != Ordering::Greater
    }

    fn uncovered(balls: &[Ball<Self>]) -> Option<Self> {
        uncovered_unit(balls)
    }
}

impl CoverPoint for CantorPoint {
    fn to_point(&self) -> Point {
        Point::Cantor(self.clone())
    }

    fn render(&self) -> String {
        self.to_string()
    }

    fn in_space(&self) -> bool {
        true
    }

    fn uncovered(balls: &[Ball<Self>]) -> Option<Self> {
        uncovered_cantor(balls)
    }
}

fn open_interval(b: &Ball<Quad>) -> (Quad, Quad) {
    (b.center.sub_rational(&b.radius), b.center.add_rational(&b.radius))
}

/// Exact covering check of `[0,1]` by open intervals `(p − r, p + r)`.
///
/// Walks a frontier `f` with `[0, f)` covered; the first `f` that no
/// interval straddles is returned as the witness.
pub fn uncovered_unit(balls: &[Ball<Quad>]) -> Option<Quad> {
    let mut iv: Vec<(Quad, Quad)> = balls.iter().map(open_interval).collect();
    iv.sort_by(|a, b| a.0.cmp(&b.0));
    let one = Quad::rational(int(1));
    let mut f = Quad::rational(int(0));
    let mut i = 0;
    let mut reach: Option<Quad> = None;
    loop {
        while i < iv.len() && iv[i].0 < f {
            if reach.as_ref().is_none_or(|r| &iv[i].1 > r) {
                reach = Some(iv[i].1.clone());
            }
            i += 1;
        }
        match &reach {
            Some(r) if r > &f => {
                f = r.clone();
                if f > one {
                    return None;
                }
            }
            _ => return Some(f),
        }
    }
}

/// Exact covering check of `2^ω` by the cylinders of the balls.
pub fn uncovered_cantor(balls: &[Ball<CantorPoint>]) -> Option<CantorPoint> {
    let cyls: Vec<Cylinder> = balls.iter().map(|b| ball_cylinder(&b.center, &b.radius)).collect();
    fn go(sigma: Cylinder, cyls: &[&Cylinder]) -> Option<CantorPoint> {
        if cyls.iter().any(|c| c.contains_cylinder(&sigma)) {
            return None;
        }
        let below: Vec<&Cylinder> = cyls.iter().copied().filter(|c| sigma.contains_cylinder(c)).collect();
        if below.is_empty() {
            return Some(CantorPoint::constant_tail(sigma.bits(), false));
        }
        go(sigma.child(false), &below).or_else(|| go(sigma.child(true), &below))
    }
    let refs: Vec<&Cylinder> = cyls.iter().collect();
    go(Cylinder::root(), &refs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverReport {
    pub verdict: Verdict,
    /// Uncovered point, when the covering condition fails.
    pub witness: Option<String>,
    /// First ball verified to have `r_p > δ(p)`.
    pub failing: Option<usize>,
    pub undecided: Option<usize>,
}

/// Covering (exact) and `r_p ≤ δ(p)` for every ball.
pub fn verify_cover<P: CoverPoint>(g: &GaugeCode, c: &FineCover<P>, stage: u32) -> Result<CoverReport> {
    for (i, b) in c.balls.iter().enumerate() {
        if !b.radius.is_positive() {
            return Err(FineError::BadRadius { index: i });
        }
        if !b.center.in_space() {
            return Err(FineError::Structure(format!("cover point {} outside the space", b.center.render())));
        }
    }
    if let Some(w) = P::uncovered(&c.balls) {
        return Ok(CoverReport {
            verdict: Verdict::No,
            witness: Some(w.render()),
            failing: None,
            undecided: None,
        });
    }
    let mut report = CoverReport { verdict: Verdict::Yes, witness: None, failing: None, undecided: None };
    for (i, b) in c.balls.iter().enumerate() {
        let v = g.verified_at_least(&b.center.to_point(), &b.radius, stage)?;
        match v {
            Verdict::No if report.failing.is_none() => report.failing = Some(i),
            Verdict::Unknown if report.undecided.is_none() => report.undecided = Some(i),
            _ => {}
        }
        report.verdict = report.verdict.and(v);
    }
    Ok(report)
}

/// `P = {ξ_i}` with `r = 2(x_{i+1} − x_i)`; zero-width cells are dropped.
pub fn partition_to_cover(t: &TaggedPartition) -> Result<FineCover<Quad>> {
    let mut balls = Vec::new();
    for (i, (a, b, tag)) in t.cells().enumerate() {
        let w = b - a;
        if w.is_zero() {
            continue;
        }
        let c = tag.exact().ok_or_else(|| FineError::InexactPoint(format!("tag {i}")))?;
        balls.push(Ball { center: c.clone(), radius: w * int(2) });
    }
    Ok(FineCover::new(balls))
}

/// Reverse greedy: drop every ball whose interval is contained in another.
///
/// Duplicate intervals keep their first occurrence, so a duplicated point keeps
/// its larger radius. The result is sorted by center.
pub fn minimize_cover(c: &FineCover<Quad>) -> Result<FineCover<Quad>> {
    if let Some(w) = uncovered_unit(&c.balls) {
        return Err(FineError::NotACover { witness: w.render() });
    }
    let mut order: Vec<(usize, Quad, Quad)> = c
        .balls
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let (l, r) = open_interval(b);
            (i, l, r)
        })
        .collect();
    order.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| b.2.cmp(&a.2)).then(a.0.cmp(&b.0)));
    let mut kept: Vec<Ball<Quad>> = Vec::new();
    let mut reach: Option<Quad> = None;
    for (i, _, r) in order {
        if reach.as_ref().is_none_or(|m| &r > m) {
            reach = Some(r);
            kept.push(c.balls[i].clone());
        }
    }
    Ok(FineCover::new(kept))
}

/// A rational strictly between `lo` and `hi`, the midpoint when rational.
fn rational_between(lo: &Quad, hi: &Quad) -> Rational {
    let mid = lo.add(hi).scale(&ratio(1, 2));
    if let Some(r) = mid.as_rational() {
        return r.clone();
    }
    let mut k = 1;
    loop {
        let d = mid.dyadic_floor(k);
        if lo.cmp_rational(&d) == Ordering::Less && hi.cmp_rational(&d) == Ordering::Greater {
            return d;
        }
        k += 1;
    }
}

/// Cuts at the overlap midpoints of consecutive minimized balls; tags are the
/// centers. Each cell lies inside its tag's ball.
pub fn cover_to_partition(c: &FineCover<Quad>) -> Result<TaggedPartition> {
    for b in &c.balls {
        if !b.center.in_space() {
            return Err(FineError::Structure(format!("cover point {} outside [0,1]", b.center.render())));
        }
    }
    let m = minimize_cover(c)?;
    let balls = m.balls;
    let mut cuts = vec![Rational::zero()];
    for w in balls.windows(2) {
        let (_, r0) = open_interval(&w[0]);
        let (l1, _) = open_interval(&w[1]);
        let lo = std::cmp::max(w[0].center.clone(), l1);
        let hi = std::cmp::min(w[1].center.clone(), r0);
        debug_assert!(lo < hi, "minimized neighbours overlap");
        cuts.push(rational_between(&lo, &hi));
    }
    cuts.push(Rational::one());
    let tags = balls.into_iter().map(|b| UnitPoint::Exact(b.center)).collect();
    TaggedPartition::new(cuts, tags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauges::Space;

    fn ball(c: Rational, r: Rational) -> Ball<Quad> {
        Ball { center: Quad::rational(c), radius: r }
    }

    fn cover(v: Vec<(Rational, Rational)>) -> FineCover<Quad> {
        FineCover::new(v.into_iter().map(|(c, r)| ball(c, r)).collect())
    }

    fn quarter_gauge() -> GaugeCode {
        GaugeCode::constant(Space::Unit, ratio(1, 4))
    }

    #[test]
    fn verify_cover_examples() {
        let c = cover((0..4).map(|i| (ratio(2 * i + 1, 8), ratio(1, 4))).collect());
        assert_eq!(verify_cover(&quarter_gauge(), &c, 0).unwrap().verdict, Verdict::Yes);

        let c = cover(vec![(ratio(1, 8), ratio(1, 4))]);
        let r = verify_cover(&quarter_gauge(), &c, 0).unwrap();
        assert_eq!(r.verdict, Verdict::No);
        let w = Quad::parse(r.witness.as_deref().unwrap()).unwrap();
        assert!(uncovered_unit(&c.balls).is_some());
        assert!(c.balls.iter().all(|b| {
            let (l, h) = open_interval(b);
            !(l < w && w < h)
        }));

        let c = cover(vec![(ratio(1, 2), ratio(3, 4))]);
        let r = verify_cover(&quarter_gauge(), &c, 0).unwrap();
        assert_eq!((r.verdict, r.failing), (Verdict::No, Some(0)));
    }

    #[test]
    fn touching_intervals_leave_a_gap() {
        let c = cover(vec![(ratio(1, 4), ratio(1, 4)), (ratio(3, 4), ratio(1, 2))]);
        assert_eq!(uncovered_unit(&c.balls), Some(Quad::rational(int(0))));
        let c = cover(vec![(int(0), ratio(1, 2)), (int(1), ratio(1, 2))]);
        assert_eq!(uncovered_unit(&c.balls), Some(Quad::rational(ratio(1, 2))));
        let c = cover(vec![(int(0), ratio(3, 5)), (int(1), ratio(3, 5))]);
        assert!(uncovered_unit(&c.balls).is_none());
    }

    #[test]
    fn partition_to_cover_examples() {
        let t = TaggedPartition::new(
            vec![int(0), ratio(1, 2), int(1)],
            vec![UnitPoint::rational(ratio(1, 4)), UnitPoint::rational(ratio(3, 4))],
        )
        .unwrap();
        assert_eq!(
            partition_to_cover(&t).unwrap(),
            cover(vec![(ratio(1, 4), int(1)), (ratio(3, 4), int(1))])
        );
        let t = TaggedPartition::new(vec![int(0), int(1)], vec![UnitPoint::rational(ratio(1, 2))]).unwrap();
        assert_eq!(partition_to_cover(&t).unwrap(), cover(vec![(ratio(1, 2), int(2))]));

        let cuts: Vec<Rational> = (0..=4).map(|i| ratio(i, 4)).collect();
        let tags = (0..4).map(|i| UnitPoint::rational(ratio(2 * i + 1, 8))).collect();
        let t = TaggedPartition::new(cuts, tags).unwrap();
        let c = partition_to_cover(&t).unwrap();
        assert_eq!(c, cover((0..4).map(|i| (ratio(2 * i + 1, 8), ratio(1, 2))).collect()));
        let doubled = quarter_gauge().scaled(int(2));
        assert_eq!(verify_cover(&doubled, &c, 0).unwrap().verdict, Verdict::Yes);
    }

    #[test]
    fn minimize_examples() {
        let c = cover(vec![
            (ratio(1, 4), ratio(1, 2)),
            (ratio(1, 2), ratio(1, 8)),
            (ratio(3, 4), ratio(1, 2)),
        ]);
        let m = minimize_cover(&c).unwrap();
        assert_eq!(m, cover(vec![(ratio(1, 4), ratio(1, 2)), (ratio(3, 4), ratio(1, 2))]));
        assert_eq!(minimize_cover(&m).unwrap(), m);

        let c = cover(vec![(ratio(1, 2), int(1)), (ratio(1, 2), int(1))]);
        assert_eq!(minimize_cover(&c).unwrap().len(), 1);
        let c = cover(vec![(ratio(1, 2), ratio(3, 4)), (ratio(1, 2), int(1))]);
        assert_eq!(minimize_cover(&c).unwrap(), cover(vec![(ratio(1, 2), int(1))]));

        let gap = cover(vec![(ratio(1, 8), ratio(1, 4))]);
        assert!(matches!(minimize_cover(&gap), Err(FineError::NotACover { .. })));
    }

    #[test]
    fn cover_to_partition_examples() {
        let t = cover_to_partition(&cover(vec![(ratio(1, 4), ratio(3, 4)), (ratio(3, 4), ratio(3, 4))])).unwrap();
        assert_eq!(t.cuts(), &[int(0), ratio(1, 2), int(1)]);
        let t = cover_to_partition(&cover(vec![(ratio(1, 2), int(1))])).unwrap();
        assert_eq!(t.cuts(), &[int(0), int(1)]);

        let c = cover((0..4).map(|i| (ratio(2 * i + 1, 8), ratio(1, 4))).collect());
        let t = cover_to_partition(&c).unwrap();
        let expect: Vec<Rational> = (0..=4).map(|i| ratio(i, 4)).collect();
        assert_eq!(t.cuts(), expect.as_slice());
        let doubled = quarter_gauge().scaled(int(2));
        assert_eq!(super::super::verify_partition(&doubled, &t, 0).unwrap().verdict, Verdict::Yes);
    }

    #[test]
    fn irrational_overlap_gets_a_rational_cut() {
        let s = Quad::new(int(0), ratio(1, 4));
        let c = FineCover::new(vec![
            Ball { center: s.clone(), radius: ratio(1, 2) },
            Ball { center: Quad::rational(int(1)), radius: ratio(3, 4) },
        ]);
        let t = cover_to_partition(&c).unwrap();
        let cut = &t.cuts()[1];
        assert!(s.cmp_rational(cut) == Ordering::Less);
    }

    #[test]
    fn cantor_covering() {
        let p = |s: &str| CantorPoint::parse(s).unwrap();
        let balls = vec![
            Ball { center: p("period=0"), radius: ratio(3, 4) },
            Ball { center: p("prefix=1;period=0"), radius: ratio(3, 4) },
        ];
        assert!(uncovered_cantor(&balls).is_none());
        let balls = vec![Ball { center: p("period=0"), radius: ratio(3, 4) }];
        assert_eq!(uncovered_cantor(&balls), Some(p("prefix=1;period=0")));
    }
}
