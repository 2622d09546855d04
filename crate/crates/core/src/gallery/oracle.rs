//! A computable stand-in for an oracle point `Z` on Cantor space: the gauge
//! pins every `X ≠ Z` to a cylinder that excludes `Z`, so no cover can avoid
//! sampling `Z` itself.

use num_traits::Zero;

use super::{GalleryError, Result};
use crate::fine::{find_cover_cantor, CantorSearch, FineCover, SearchResult};
use crate::gauges::{DirectCode, GaugeCode, GaugeError, Space};
use crate::numerics::rational::{int, pow2};
use crate::numerics::{Interval, Rational};
use crate::spaces::{CantorPoint, Cylinder, Point};

#[derive(Clone, Debug)]
pub struct OracleSpec {
    pub z: CantorPoint,
}

/// `f(X)` = first index where `X` and `Z` differ, plus one; `Some(0)` at `Z`.
/// `None` when no difference shows up within `bound` bits of a rule point.
pub fn pin_index(z: &CantorPoint, x: &CantorPoint, bound: usize) -> Option<u64> {
    match x.first_difference_exact(z) {
        Some(Some(i)) => Some(i as u64 + 1),
        Some(None) => Some(0),
        None => x.first_difference(z, bound).map(|i| i as u64 + 1),
    }
}

/// `δ(X) = 2^-f(X)` and `δ(Z) = 1`. An undecided scan yields `[0, 1]`.
pub fn oracle_pin_gauge(spec: &OracleSpec) -> DirectCode {
    let z = spec.z.clone();
    DirectCode::new(Space::Cantor, move |x, stage| {
        let Point::Cantor(x) = x else { return Err(GaugeError::Domain("expected a Cantor point".into())) };
        Ok(match pin_index(&z, x, stage.max(1) as usize) {
            Some(f) => Interval::point(pow2(-(f as i64))),
            None => Interval::new(Rational::zero(), int(1)),
        })
    })
}

#[derive(Clone, Debug)]
pub struct OraclePinReport {
    /// Phase (i): the unresolved region, coarsened to the requested depth.
    pub pinned: Cylinder,
    pub phase1_depth: u32,
    /// Phase (ii): the cover found once `Z` is offered as a sample.
    pub cover: FineCover<CantorPoint>,
}

/// Phase (i) searches to `depth + 2` with `Z` hidden and must stall exactly
/// on `[Z↾depth]`; phase (ii) offers `Z` as a hint and must find a cover
/// containing a point that agrees with `Z` on `depth` bits.
pub fn oracle_pin_demo(spec: &OracleSpec, depth: u32, stage: u32) -> Result<OraclePinReport> {
    let g = GaugeCode::Direct(oracle_pin_gauge(spec));
    let hidden = CantorSearch::new(depth + 2, stage).hiding(spec.z.clone());
    let o = match find_cover_cantor(&g, &hidden)? {
        SearchResult::Cover(c) => {
            return Err(GalleryError::UnexpectedCover(format!("{} cylinders cover without Z", c.len())))
        }
        SearchResult::Obstruction(o) => o,
    };
    let target = Cylinder::of_point(&spec.z, depth as usize);
    let coarse = o.coarsen(depth as usize);
    if coarse != vec![target.clone()] {
        let got: Vec<_> = coarse.iter().map(|c| c.to_string()).collect();
        return Err(GalleryError::Postcondition(format!("phase (i) stalled on {got:?}, expected [{target}]")));
    }
    let hinted = CantorSearch::new(depth, stage).with_hints(vec![spec.z.clone()]);
    let cover = find_cover_cantor(&g, &hinted)?
        .cover()
        .ok_or_else(|| GalleryError::Postcondition("phase (ii) found no cover with Z offered".into()))?;
    let agrees = cover
        .points()
        .any(|p| p.first_difference(&spec.z, depth as usize).is_none());
    if !agrees {
        return Err(GalleryError::Postcondition(format!("no cover point agrees with Z on {depth} bits")));
    }
    Ok(OraclePinReport { pinned: target, phase1_depth: o.depth_reached, cover })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fine::verify_cover;
    use crate::gauges::Verdict;
    use crate::numerics::rational::ratio;

    fn p(s: &str) -> CantorPoint {
        CantorPoint::parse(s).unwrap()
    }

    fn delta(z: &CantorPoint, x: &CantorPoint) -> Interval {
        oracle_pin_gauge(&OracleSpec { z: z.clone() }).eval(&Point::Cantor(x.clone()), 16).unwrap()
    }

    #[test]
    fn gauge_examples() {
        let z = p("prefix=;period=01");
        assert_eq!(delta(&z, &p("prefix=1;period=0")), Interval::point(ratio(1, 2)));
        assert_eq!(delta(&z, &p("prefix=0100;period=0")), Interval::point(ratio(1, 16)));
        assert_eq!(delta(&z, &z), Interval::point(int(1)));
    }

    #[test]
    fn undecided_rule_point_gets_unit_enclosure() {
        let z = CantorPoint::from_rule(|_| false);
        let x = CantorPoint::from_rule(|n| n == 100);
        assert_eq!(delta(&z, &x), Interval::unit());
    }

    #[test]
    fn demo_phases() {
        for (bits, depth) in [("prefix=;period=01", 10), ("prefix=;period=1", 6)] {
            let spec = OracleSpec { z: p(bits) };
            let r = oracle_pin_demo(&spec, depth, 16).unwrap();
            assert_eq!(r.pinned, Cylinder::of_point(&spec.z, depth as usize));
            assert!(r.cover.points().any(|x| x == &spec.z));
            let g = GaugeCode::Direct(oracle_pin_gauge(&spec));
            assert_eq!(verify_cover(&g, &r.cover, 16).unwrap().verdict, Verdict::Yes);
        }
    }
}
