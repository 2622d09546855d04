use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use super::{Ball, CoverPoint, FineCover, Result};
use crate::gauges::{GaugeCode, Verdict};
use crate::numerics::rational::{fmt_rational, pow2};
use crate::numerics::{Interval, Quad, Rational};
use crate::spaces::{CantorPoint, Cylinder};

/// Extra sample points for a cell, e.g. points of a set the gauge favours.
pub type Sampler = Arc<dyn Fn(&Interval) -> Vec<Quad> + Send + Sync>;

#[derive(Clone)]
pub struct UnitSearch {
    pub depth: u32,
    pub stage: u32,
    pub hints: Vec<Quad>,
    pub sampler: Option<Sampler>,
}

impl UnitSearch {
    pub fn new(depth: u32, stage: u32) -> Self {
        UnitSearch { depth, stage, hints: Vec::new(), sampler: None }
    }

    pub fn with_hints(mut self, hints: Vec<Quad>) -> Self {
        self.hints = hints;
        self.hints.sort();
        self.hints.dedup();
        self
    }

    pub fn with_sampler(mut self, f: impl Fn(&Interval) -> Vec<Quad> + Send + Sync + 'static) -> Self {
        self.sampler = Some(Arc::new(f));
        self
    }
}

#[derive(Clone, Debug)]
pub struct CantorSearch {
    pub depth: u32,
    pub stage: u32,
    pub hints: Vec<CantorPoint>,
    /// A point the canonical samples must avoid.
    pub hidden: Option<CantorPoint>,
}

impl CantorSearch {
    pub fn new(depth: u32, stage: u32) -> Self {
        CantorSearch { depth, stage, hints: Vec::new(), hidden: None }
    }

    pub fn with_hints(mut self, hints: Vec<CantorPoint>) -> Self {
        self.hints = hints;
        self
    }

    pub fn hiding(mut self, z: CantorPoint) -> Self {
        self.hidden = Some(z);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleTrace {
    pub point: String,
    pub verdict: Verdict,
    pub lower: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionTrace<R> {
    pub region: R,
    /// Verdict of the region's acceptance test `∃x ∈ region`.
    pub last_verdict: Verdict,
    pub stage: u32,
    pub samples: Vec<SampleTrace>,
}

/// Regions a search could not resolve within its budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction<R> {
    pub regions: Vec<RegionTrace<R>>,
    pub depth_reached: u32,
}

impl Obstruction<Interval> {
    pub fn measure(&self) -> Rational {
        self.regions.iter().fold(Rational::zero(), |a, r| a + r.region.width())
    }

    pub fn contains(&self, x: &Quad) -> bool {
        self.regions.iter().any(|r| {
            x.cmp_rational(r.region.lo()).is_ge() && x.cmp_rational(r.region.hi()).is_le()
        })
    }

    fn merge_runs(mut self) -> Self {
        let mut out: Vec<RegionTrace<Interval>> = Vec::new();
        for r in self.regions.drain(..) {
            if let Some(prev) = out.last_mut() {
                if prev.region.hi() == r.region.lo() {
                    prev.region = Interval::new(prev.region.lo().clone(), r.region.hi().clone());
                    prev.samples.extend(r.samples);
                    continue;
                }
            }
            out.push(r);
        }
        self.regions = out;
        self
    }
}

impl Obstruction<Cylinder> {
    pub fn measure(&self) -> Rational {
        self.regions.iter().fold(Rational::zero(), |a, r| a + pow2(-(r.region.len() as i64)))
    }

    /// The distinct length-`depth` prefixes of the unresolved cylinders.
    pub fn coarsen(&self, depth: usize) -> Vec<Cylinder> {
        let mut v: Vec<Cylinder> = self.regions.iter().map(|r| r.region.truncate(depth)).collect();
        v.sort();
        v.dedup();
        v
    }
}

#[derive(Clone, Debug)]
pub enum SearchResult<P, R> {
    Cover(FineCover<P>),
    Obstruction(Obstruction<R>),
}

impl<P, R> SearchResult<P, R> {
    pub fn cover(self) -> Option<FineCover<P>> {
        match self {
            SearchResult::Cover(c) => Some(c),
            SearchResult::Obstruction(_) => None,
        }
    }

    pub fn obstruction(self) -> Option<Obstruction<R>> {
        match self {
            SearchResult::Cover(_) => None,
            SearchResult::Obstruction(o) => Some(o),
        }
    }
}

enum Outcome<P> {
    Accepted(Ball<P>),
    Rejected(Vec<SampleTrace>),
}

/// First sample whose verified lower bound beats `threshold`.
fn try_samples<P: CoverPoint>(
    g: &GaugeCode,
    samples: Vec<P>,
    threshold: &Rational,
    stage: u32,
) -> Result<Outcome<P>> {
    let mut trace = Vec::with_capacity(samples.len());
    for x in samples {
        let b = g.bounds(&x.to_point(), stage)?;
        let verdict = b.above(threshold);
        if verdict == Verdict::Yes {
            let radius = b.lo.expect("yes verdicts carry a lower bound");
            return Ok(Outcome::Accepted(Ball { center: x, radius }));
        }
        trace.push(SampleTrace { point: x.render(), verdict, lower: b.lo });
    }
    Ok(Outcome::Rejected(trace))
}

fn dyadic_cell(level: u32, i: &BigInt) -> Interval {
    let w = pow2(-(level as i64));
    let lo = Rational::from_integer(i.clone()) * &w;
    let hi = &lo + &w;
    Interval::new(lo, hi)
}

fn inside(q: &Quad, cell: &Interval) -> bool {
    q.cmp_rational(cell.lo()).is_ge() && q.cmp_rational(cell.hi()).is_le()
}

/// Breadth-first bisection of `[0,1]`.
///
/// A dyadic cell `I` is accepted with sample `m` once `δ(m) > |I|` is
/// verified; the ball `B(m, lo δ(m))` then contains `I`. Cells still open at
/// the depth limit form the obstruction, merged into maximal runs. Cells of
/// one level are evaluated in parallel and collected in index order.
pub fn find_cover_unit(g: &GaugeCode, opts: &UnitSearch) -> Result<SearchResult<Quad, Interval>> {
    let mut pending = vec![BigInt::zero()];
    let mut balls = Vec::new();
    for level in 0..=opts.depth {
        let width = pow2(-(level as i64));
        let outcomes: Vec<Result<Outcome<Quad>>> = pending
            .par_iter()
            .map(|i| {
                let cell = dyadic_cell(level, i);
                let mut samples = vec![
                    Quad::rational(cell.midpoint()),
                    Quad::rational(cell.lo().clone()),
                    Quad::rational(cell.hi().clone()),
                ];
                samples.extend(opts.hints.iter().filter(|h| inside(h, &cell)).cloned());
                if let Some(f) = &opts.sampler {
                    samples.extend(f(&cell).into_iter().filter(|h| inside(h, &cell)));
                }
                let mut seen = Vec::with_capacity(samples.len());
                samples.retain(|s| {
                    if seen.contains(s) {
                        false
                    } else {
                        seen.push(s.clone());
                        true
                    }
                });
                try_samples(g, samples, &width, opts.stage)
            })
            .collect();
        let mut next = Vec::new();
        let mut frontier = Vec::new();
        for (i, o) in pending.iter().zip(outcomes) {
            match o? {
                Outcome::Accepted(b) => balls.push(b),
                Outcome::Rejected(trace) if level == opts.depth => frontier.push(RegionTrace {
                    region: dyadic_cell(level, i),
                    last_verdict: Verdict::Unknown,
                    stage: opts.stage,
                    samples: trace,
                }),
                Outcome::Rejected(_) => {
                    next.push(i * 2);
                    next.push(i * 2 + 1);
                }
            }
        }
        if !frontier.is_empty() {
            let o = Obstruction { regions: frontier, depth_reached: level };
            return Ok(SearchResult::Obstruction(o.merge_runs()));
        }
        if next.is_empty() {
            return Ok(SearchResult::Cover(FineCover::new(balls)));
        }
        pending = next;
    }
    unreachable!("the last level either closes or reports")
}

fn cantor_samples(sigma: &Cylinder, opts: &CantorSearch) -> Vec<CantorPoint> {
    let mut out = Vec::new();
    for b in [false, true] {
        let mut x = CantorPoint::constant_tail(sigma.bits(), b);
        if opts.hidden.as_ref() == Some(&x) {
            let mut p = sigma.bits().to_vec();
            p.push(b);
            x = CantorPoint::constant_tail(&p, !b);
        }
        out.push(x);
    }
    for h in &opts.hints {
        if sigma.contains(h) && !out.contains(h) {
            out.push(h.clone());
        }
    }
    out
}

/// Breadth-first search of the tree of cylinders not yet shown to lie in some
/// `B(x, δ(x))`; `σ` is accepted when a sample has `δ(x) > 2^-|σ|+1`.
pub fn find_cover_cantor(
    g: &GaugeCode,
    opts: &CantorSearch,
) -> Result<SearchResult<CantorPoint, Cylinder>> {
    let mut pending = vec![Cylinder::root()];
    let mut balls = Vec::new();
    for level in 0..=opts.depth {
        let threshold = pow2(1 - level as i64);
        let outcomes: Vec<Result<Outcome<CantorPoint>>> = pending
            .par_iter()
            .map(|sigma| try_samples(g, cantor_samples(sigma, opts), &threshold, opts.stage))
            .collect();
        let mut next = Vec::new();
        let mut frontier = Vec::new();
        for (sigma, o) in pending.iter().zip(outcomes) {
            match o? {
                Outcome::Accepted(b) => balls.push(b),
                Outcome::Rejected(trace) if level == opts.depth => frontier.push(RegionTrace {
                    region: sigma.clone(),
                    last_verdict: Verdict::Unknown,
                    stage: opts.stage,
                    samples: trace,
                }),
                Outcome::Rejected(_) => {
                    next.push(sigma.child(false));
                    next.push(sigma.child(true));
                }
            }
        }
        if !frontier.is_empty() {
            return Ok(SearchResult::Obstruction(Obstruction { regions: frontier, depth_reached: level }));
        }
        if next.is_empty() {
            return Ok(SearchResult::Cover(FineCover::new(balls)));
        }
        pending = next;
    }
    unreachable!("the last level either closes or reports")
}

pub(crate) fn render_interval(i: &Interval) -> String {
    format!("[{},{}]", fmt_rational(i.lo()), fmt_rational(i.hi()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fine::verify_cover;
    use crate::gauges::{ContinuousCode, Space};
    use crate::numerics::rational::{int, ratio};

    /// Level at which a constant gauge `c` is first accepted under the
    /// strict rule `c > 2^-level`.
    fn brute_unit_level(c: &Rational) -> u32 {
        (0..).find(|&l| c > &pow2(-(l as i64))).unwrap()
    }

    fn brute_cantor_level(c: &Rational) -> u32 {
        (0..).find(|&l| c > &pow2(1 - l as i64)).unwrap()
    }

    #[test]
    fn constant_quarter_on_unit() {
        let g = GaugeCode::constant(Space::Unit, ratio(1, 4));
        let c = find_cover_unit(&g, &UnitSearch::new(8, 0)).unwrap().cover().unwrap();
        let level = brute_unit_level(&ratio(1, 4));
        assert_eq!(level, 3);
        assert_eq!(c.len(), 1 << level);
        assert_eq!(verify_cover(&g, &c, 0).unwrap().verdict, Verdict::Yes);
    }

    #[test]
    fn affine_gauge_refines_near_zero() {
        let g = GaugeCode::Continuous(ContinuousCode::unit(|i, _| {
            Ok(i.scale(&ratio(1, 2)).shift(&ratio(1, 16)))
        }));
        let c = find_cover_unit(&g, &UnitSearch::new(10, 8)).unwrap().cover().unwrap();
        assert_eq!(verify_cover(&g, &c, 8).unwrap().verdict, Verdict::Yes);
        let near_zero = c.balls.iter().filter(|b| b.center.cmp_rational(&ratio(1, 8)).is_le());
        let far = c.balls.iter().filter(|b| b.center.cmp_rational(&ratio(7, 8)).is_ge());
        assert!(near_zero.count() > far.count());
    }

    #[test]
    fn too_shallow_search_reports_one_run() {
        let g = GaugeCode::constant(Space::Unit, ratio(1, 64));
        let o = find_cover_unit(&g, &UnitSearch::new(3, 0)).unwrap().obstruction().unwrap();
        assert_eq!(o.regions.len(), 1);
        assert_eq!(o.regions[0].region, Interval::unit());
        assert!(o.regions.iter().all(|r| r.last_verdict == Verdict::Unknown));
    }

    #[test]
    fn constant_gauges_on_cantor() {
        for (c, expect_len) in [(ratio(1, 2), 8usize), (int(1), 4)] {
            let g = GaugeCode::constant(Space::Cantor, c.clone());
            let cover = find_cover_cantor(&g, &CantorSearch::new(4, 0)).unwrap().cover().unwrap();
            assert_eq!(cover.len(), 1 << brute_cantor_level(&c));
            assert_eq!(cover.len(), expect_len);
            assert_eq!(verify_cover(&g, &cover, 0).unwrap().verdict, Verdict::Yes);
        }
        let g = GaugeCode::constant(Space::Cantor, int(1));
        assert!(find_cover_cantor(&g, &CantorSearch::new(1, 0)).unwrap().obstruction().is_some());
    }

    #[test]
    fn hidden_point_is_never_a_canonical_sample() {
        let z = CantorPoint::constant_tail(&[], true);
        let s = CantorSearch::new(4, 0).hiding(z.clone());
        for bits in [vec![], vec![true], vec![true, true, true]] {
            assert!(!cantor_samples(&Cylinder::new(bits), &s).contains(&z));
        }
    }
}
