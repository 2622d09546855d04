use std::cmp::Ordering;

use num_traits::{One, Zero};

use super::{FineError, Result};
use crate::gauges::{GaugeCode, Verdict};
use crate::numerics::rational::fmt_rational;
use crate::numerics::Rational;
use crate::spaces::{Point, UnitPoint};

/// `0 = x_0 ≤ ξ_0 ≤ x_1 ≤ … ≤ ξ_{n-1} ≤ x_n = 1`.
#[derive(Clone, Debug)]
pub struct TaggedPartition {
    cuts: Vec<Rational>,
    tags: Vec<UnitPoint>,
}

impl TaggedPartition {
    /// Checks the interleaving exactly for exact tags and by refinement for
    /// approximate ones.
    pub fn new(cuts: Vec<Rational>, tags: Vec<UnitPoint>) -> Result<Self> {
        if cuts.len() != tags.len() + 1 || tags.is_empty() {
            return Err(FineError::Structure(format!(
                "{} cuts but {} tags",
                cuts.len(),
                tags.len()
            )));
        }
        if !cuts[0].is_zero() || !cuts[cuts.len() - 1].is_one() {
            return Err(FineError::Structure("cuts must run from 0 to 1".into()));
        }
        for (i, tag) in tags.iter().enumerate() {
            let (a, b) = (&cuts[i], &cuts[i + 1]);
            if a > b {
                return Err(FineError::Structure(format!("cuts decrease at {i}")));
            }
            let left = tag.cmp_rational(a);
            let right = tag.cmp_rational(b);
            match (left, right) {
                (Some(Ordering::Less), _) | (_, Some(Ordering::Greater)) => {
                    return Err(FineError::Structure(format!(
                        "tag {i} lies outside [{}, {}]",
                        fmt_rational(a),
                        fmt_rational(b)
                    )))
                }
                (None, _) | (_, None) => {
                    return Err(FineError::Structure(format!("tag {i} cannot be placed in its cell")))
                }
                _ => {}
            }
        }
        Ok(TaggedPartition { cuts, tags })
    }

    pub fn cuts(&self) -> &[Rational] {
        &self.cuts
    }

    pub fn tags(&self) -> &[UnitPoint] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn width(&self, i: usize) -> Rational {
        &self.cuts[i + 1] - &self.cuts[i]
    }

    pub fn cells(&self) -> impl Iterator<Item = (&Rational, &Rational, &UnitPoint)> {
        self.tags
            .iter()
            .enumerate()
            .map(move |(i, t)| (&self.cuts[i], &self.cuts[i + 1], t))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionReport {
    pub verdict: Verdict,
    /// First cell verified to violate `δ(ξ_i) ≥ x_{i+1} − x_i`.
    pub failing: Option<usize>,
    /// First cell left undecided.
    pub undecided: Option<usize>,
}

/// Non-strict fineness `δ(ξ_i) ≥ x_{i+1} − x_i` for every cell.
pub fn verify_partition(g: &GaugeCode, t: &TaggedPartition, stage: u32) -> Result<PartitionReport> {
    let mut report = PartitionReport { verdict: Verdict::Yes, failing: None, undecided: None };
    for i in 0..t.len() {
        let w = t.width(i);
        if w.is_zero() {
            continue;
        }
        let v = g.verified_at_least(&Point::Unit(t.tags[i].clone()), &w, stage)?;
        match v {
            Verdict::No if report.failing.is_none() => report.failing = Some(i),
            Verdict::Unknown if report.undecided.is_none() => report.undecided = Some(i),
            _ => {}
        }
        report.verdict = report.verdict.and(v);
    }
    Ok(report)
}
