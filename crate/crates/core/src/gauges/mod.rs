//! Coded gauges and their stage-indexed three-valued semantics.
//!
//! A code never exposes a limit value. Queries return enclosures at a given
//! stage, and verdicts about `δ(x) > q` are assembled from a fixed ladder of
//! checkpoint stages `0, 1, 2, 4, …` so that a `Yes` or `No` seen at one
//! budget is seen at every larger budget.

mod expr;
mod pieces;

pub use expr::{parse_gauge, parse_index_rules, Builtins, ExprError, IndexRule};
pub use pieces::preimage_pieces;

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::numerics::rational::pow2;
use crate::numerics::{Interval, Rational};
use crate::spaces::{Cylinder, Point, SpacesError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GaugeError {
    #[error("Cauchy violation at stage {stage}: {detail}")]
    CauchyViolation { stage: u32, detail: String },
    #[error("point outside the declared domain: {0}")]
    Domain(String),
    #[error("evaluation failed: {0}")]
    Eval(String),
    #[error(transparent)]
    Spaces(#[from] SpacesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Unit,
    Cantor,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::Unit => "unit",
            Space::Cantor => "cantor",
        })
    }
}

/// Input region of a continuous evaluator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Region {
    Unit(Interval),
    Cantor(Cylinder),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

impl Verdict {
    /// Conjunction: `No` dominates, then `Unknown`.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::No, _) | (_, Verdict::No) => Verdict::No,
            (Verdict::Yes, Verdict::Yes) => Verdict::Yes,
            _ => Verdict::Unknown,
        }
    }
}

pub type Result<T> = std::result::Result<T, GaugeError>;

type RegionFn = Arc<dyn Fn(&Region, u32) -> Result<Interval> + Send + Sync>;
type TermFn = Arc<dyn Fn(u64, &Region, u32) -> Result<Interval> + Send + Sync>;
type InnerFn = Arc<dyn Fn(u64) -> Baire1Code + Send + Sync>;
type PointFn = Arc<dyn Fn(&Point, u32) -> Result<Interval> + Send + Sync>;
pub type RegionMap = Arc<dyn Fn(&Region) -> Region + Send + Sync>;
pub type PointMap = Arc<dyn Fn(&Point) -> Point + Send + Sync>;
/// `j ↦ N(j)` with `|f_n(x) − f_m(x)| ≤ 2^-j` for all `n, m ≥ N(j)`.
pub type Modulus = Arc<dyn Fn(u32) -> u64 + Send + Sync>;

/// Evaluator over regions of one space at precision `k`.
#[derive(Clone)]
pub struct ContinuousCode {
    space: Space,
    eval: RegionFn,
}

impl ContinuousCode {
    pub fn new(
        space: Space,
        eval: impl Fn(&Region, u32) -> Result<Interval> + Send + Sync + 'static,
    ) -> Self {
        ContinuousCode { space, eval: Arc::new(eval) }
    }

    pub fn unit(f: impl Fn(&Interval, u32) -> Result<Interval> + Send + Sync + 'static) -> Self {
        Self::new(Space::Unit, move |r, k| match r {
            Region::Unit(i) => f(i, k),
            Region::Cantor(_) => Err(GaugeError::Domain("cylinder given to a unit code".into())),
        })
    }

    pub fn cantor(f: impl Fn(&Cylinder, u32) -> Result<Interval> + Send + Sync + 'static) -> Self {
        Self::new(Space::Cantor, move |r, k| match r {
            Region::Cantor(c) => f(c, k),
            Region::Unit(_) => Err(GaugeError::Domain("interval given to a Cantor code".into())),
        })
    }

    pub fn constant(space: Space, c: Rational) -> Self {
        Self::new(space, move |_, _| Ok(Interval::point(c.clone())))
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn eval_region(&self, region: &Region, k: u32) -> Result<Interval> {
        (self.eval)(region, k)
    }

    pub fn eval_point(&self, x: &Point, k: u32) -> Result<Interval> {
        self.eval_region(&point_region(x, self.space, k)?, k)
    }
}

#[derive(Clone)]
pub struct Baire1Code {
    space: Space,
    term: TermFn,
    modulus: Option<Modulus>,
}

impl Baire1Code {
    pub fn new(
        space: Space,
        term: impl Fn(u64, &Region, u32) -> Result<Interval> + Send + Sync + 'static,
    ) -> Self {
        Baire1Code { space, term: Arc::new(term), modulus: None }
    }

    /// From a sequence of continuous codes.
    pub fn from_terms(
        space: Space,
        terms: impl Fn(u64) -> ContinuousCode + Send + Sync + 'static,
    ) -> Self {
        Self::new(space, move |n, r, k| terms(n).eval_region(r, k))
    }

    pub fn with_modulus(mut self, m: impl Fn(u32) -> u64 + Send + Sync + 'static) -> Self {
        self.modulus = Some(Arc::new(m));
        self
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn modulus(&self) -> Option<&Modulus> {
        self.modulus.as_ref()
    }

    pub fn eval_term(&self, n: u64, region: &Region, k: u32) -> Result<Interval> {
        (self.term)(n, region, k)
    }

    pub fn enclosure(&self, x: &Point, stage: u32) -> Result<Enclosure> {
        let region = point_region(x, self.space, stage)?;
        self.enclosure_on(&region, stage)
    }

    fn pull_back(&self, space: Space, on_region: RegionMap) -> Baire1Code {
        let c = self.clone();
        Baire1Code {
            space,
            term: Arc::new(move |n, r, k| c.eval_term(n, &on_region(r), k)),
            modulus: self.modulus.clone(),
        }
    }

    fn enclosure_on(&self, region: &Region, stage: u32) -> Result<Enclosure> {
        limit_enclosure(self.modulus.as_ref(), stage, |n| self.eval_term(n, region, stage).map(Enclosure::certified))
    }
}

#[derive(Clone)]
pub struct Baire2Code {
    space: Space,
    terms: InnerFn,
    modulus: Option<Modulus>,
}

impl Baire2Code {
    pub fn new(space: Space, terms: impl Fn(u64) -> Baire1Code + Send + Sync + 'static) -> Self {
        Baire2Code { space, terms: Arc::new(terms), modulus: None }
    }

    pub fn with_modulus(mut self, m: impl Fn(u32) -> u64 + Send + Sync + 'static) -> Self {
        self.modulus = Some(Arc::new(m));
        self
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn term(&self, n: u64) -> Baire1Code {
        (self.terms)(n)
    }

    pub fn enclosure(&self, x: &Point, stage: u32) -> Result<Enclosure> {
        let region = point_region(x, self.space, stage)?;
        limit_enclosure(self.modulus.as_ref(), stage, |n| self.term(n).enclosure_on(&region, stage))
    }
}

/// A gauge whose value at a point is produced by a finite computation.
#[derive(Clone)]
pub struct DirectCode {
    space: Space,
    eval: PointFn,
}

impl DirectCode {
    pub fn new(
        space: Space,
        eval: impl Fn(&Point, u32) -> Result<Interval> + Send + Sync + 'static,
    ) -> Self {
        DirectCode { space, eval: Arc::new(eval) }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn eval(&self, x: &Point, stage: u32) -> Result<Interval> {
        check_space(x, self.space)?;
        (self.eval)(x, stage)
    }
}

#[derive(Clone)]
pub enum GaugeCode {
    Continuous(ContinuousCode),
    Baire1(Baire1Code),
    Baire2(Baire2Code),
    Direct(DirectCode),
    /// `c·g` for a rational `c > 0`.
    Scaled(Box<GaugeCode>, Rational),
}

impl fmt::Debug for GaugeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaugeCode::Continuous(c) => write!(f, "Continuous({})", c.space),
            GaugeCode::Baire1(c) => write!(f, "Baire1({})", c.space),
            GaugeCode::Baire2(c) => write!(f, "Baire2({})", c.space),
            GaugeCode::Direct(c) => write!(f, "Direct({})", c.space),
            GaugeCode::Scaled(g, c) => write!(f, "Scaled({g:?}, {c})"),
        }
    }
}

/// An enclosure together with whether it is backed by a declared modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub value: Interval,
    pub certified: bool,
}

impl Enclosure {
    fn certified(value: Interval) -> Self {
        Enclosure { value, certified: true }
    }
}

impl GaugeCode {
    pub fn constant(space: Space, c: Rational) -> Self {
        GaugeCode::Continuous(ContinuousCode::constant(space, c))
    }

    pub fn space(&self) -> Space {
        match self {
            GaugeCode::Continuous(c) => c.space,
            GaugeCode::Baire1(c) => c.space,
            GaugeCode::Baire2(c) => c.space,
            GaugeCode::Direct(c) => c.space,
            GaugeCode::Scaled(g, _) => g.space(),
        }
    }

    pub fn scaled(self, c: Rational) -> Self {
        assert!(c > Rational::zero(), "scale factor must be positive");
        GaugeCode::Scaled(Box::new(self), c)
    }

    /// Whether enclosures can be certified at large enough stages. Codes
    /// without a declared modulus only ever answer `Yes` or `Unknown`.
    pub fn has_certificate(&self) -> bool {
        match self {
            GaugeCode::Continuous(_) | GaugeCode::Direct(_) => true,
            GaugeCode::Baire1(c) => c.modulus.is_some(),
            GaugeCode::Baire2(c) => c.modulus.is_some(),
            GaugeCode::Scaled(g, _) => g.has_certificate(),
        }
    }

    pub fn eval_enclosure(&self, x: &Point, stage: u32) -> Result<Enclosure> {
        match self {
            GaugeCode::Continuous(c) => c.eval_point(x, stage).map(Enclosure::certified),
            GaugeCode::Baire1(c) => c.enclosure(x, stage),
            GaugeCode::Baire2(c) => c.enclosure(x, stage),
            GaugeCode::Direct(c) => c.eval(x, stage).map(Enclosure::certified),
            GaugeCode::Scaled(g, s) => {
                let e = g.eval_enclosure(x, stage)?;
                Ok(Enclosure { value: e.value.scale(s), certified: e.certified })
            }
        }
    }

    /// Best bounds over the checkpoint stages up to `stage`: the largest
    /// admissible lower bound and the smallest certified upper bound.
    pub fn bounds(&self, x: &Point, stage: u32) -> Result<Bounds> {
        let trusted_only = self.has_certificate();
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        let mut last = None;
        for s in checkpoints(stage) {
            let e = self.eval_enclosure(x, s)?;
            if (e.certified || !trusted_only)
                && lo.as_ref().is_none_or(|l| e.value.lo() > l) {
                    lo = Some(e.value.lo().clone());
                }
            if e.certified && hi.as_ref().is_none_or(|h| e.value.hi() < h) {
                hi = Some(e.value.hi().clone());
            }
            last = Some(s);
        }
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l > h {
                return Err(GaugeError::CauchyViolation {
                    stage,
                    detail: format!("lower bound {l} exceeds certified upper bound {h}"),
                });
            }
        }
        Ok(Bounds { lo, hi, stage: last.unwrap_or(0) })
    }

    /// `g ∘ h` for a map `h` from `space` into the code's space, given both on
    /// regions (for evaluators) and on points (for direct codes).
    pub fn pull_back(&self, space: Space, on_region: RegionMap, on_point: PointMap) -> GaugeCode {
        match self {
            GaugeCode::Continuous(c) => {
                let c = c.clone();
                GaugeCode::Continuous(ContinuousCode::new(space, move |r, k| c.eval_region(&on_region(r), k)))
            }
            GaugeCode::Baire1(c) => GaugeCode::Baire1(c.pull_back(space, on_region)),
            GaugeCode::Baire2(c) => {
                let c = c.clone();
                let modulus = c.modulus.clone();
                let inner = move |m| c.term(m).pull_back(space, on_region.clone());
                GaugeCode::Baire2(Baire2Code { space, terms: Arc::new(inner), modulus })
            }
            GaugeCode::Direct(d) => {
                let d = d.clone();
                GaugeCode::Direct(DirectCode::new(space, move |x, k| d.eval(&on_point(x), k)))
            }
            GaugeCode::Scaled(g, c) => {
                GaugeCode::Scaled(Box::new(g.pull_back(space, on_region, on_point)), c.clone())
            }
        }
    }

    /// `δ(x) > q`.
    pub fn verified_above(&self, x: &Point, q: &Rational, stage: u32) -> Result<Verdict> {
        Ok(self.bounds(x, stage)?.above(q))
    }

    /// `δ(x) ≥ q`.
    pub fn verified_at_least(&self, x: &Point, q: &Rational, stage: u32) -> Result<Verdict> {
        Ok(self.bounds(x, stage)?.at_least(q))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
    /// The last checkpoint consulted.
    pub stage: u32,
}

impl Bounds {
    pub fn above(&self, q: &Rational) -> Verdict {
        if self.lo.as_ref().is_some_and(|l| l > q) {
            Verdict::Yes
        } else if self.hi.as_ref().is_some_and(|h| h <= q) {
            Verdict::No
        } else {
            Verdict::Unknown
        }
    }

    pub fn at_least(&self, q: &Rational) -> Verdict {
        if self.lo.as_ref().is_some_and(|l| l >= q) {
            Verdict::Yes
        } else if self.hi.as_ref().is_some_and(|h| h < q) {
            Verdict::No
        } else {
            Verdict::Unknown
        }
    }
}

/// `0, 1, 2, 4, 8, …` up to `stage`.
pub fn checkpoints(stage: u32) -> Vec<u32> {
    let mut v = vec![0];
    let mut s = 1u32;
    while s <= stage {
        v.push(s);
        match s.checked_mul(2) {
            Some(t) => s = t,
            None => break,
        }
    }
    v
}

fn check_space(x: &Point, space: Space) -> Result<()> {
    match (x, space) {
        (Point::Unit(_), Space::Unit) | (Point::Cantor(_), Space::Cantor) => Ok(()),
        _ => Err(GaugeError::Domain(format!("point given to a code on {space}"))),
    }
}

/// The region a point occupies at precision `k`.
pub fn point_region(x: &Point, space: Space, k: u32) -> Result<Region> {
    check_space(x, space)?;
    match x {
        Point::Unit(u) => {
            let a = u.approximant(k);
            if !a.intersects(&Interval::unit()) {
                return Err(GaugeError::Domain(format!("approximant {a} misses [0,1]")));
            }
            Ok(Region::Unit(a))
        }
        Point::Cantor(c) => Ok(Region::Cantor(Cylinder::of_point(c, k as usize))),
    }
}

/// Enclosure of `lim_n a_n` from term enclosures at stage `s`.
///
/// With a modulus the limit lies within `2^-j` of every term past `N(j)`;
/// `j` is chosen with `N(j) ≤ ⌈s/2⌉` so terms `s`, `s−1` and `⌈s/2⌉` all
/// qualify and their bands are intersected. Without one, the trailing
/// block `n ∈ [⌈s/2⌉, s]` is hulled and widened by the last step in the
/// direction of travel.
fn limit_enclosure(
    modulus: Option<&Modulus>,
    s: u32,
    term: impl Fn(u64) -> Result<Enclosure>,
) -> Result<Enclosure> {
    let s64 = s as u64;
    if let Some(n_of) = modulus {
        let half = s64.div_ceil(2);
        let mut best = None;
        for j in 0..=s {
            if n_of(j) <= half {
                best = Some(j);
            } else {
                break;
            }
        }
        if let Some(j) = best {
            let slack = pow2(-(j as i64));
            let mut idx = vec![s64, half];
            if s64 > half + 1 {
                idx.insert(1, s64 - 1);
            }
            idx.dedup();
            let mut value: Option<Interval> = None;
            let mut certified = true;
            for n in idx {
                let e = term(n)?;
                certified &= e.certified;
                let w = e.value.widen(&slack);
                value = Some(match value {
                    None => w,
                    Some(v) => v.intersect(&w).ok_or_else(|| GaugeError::CauchyViolation {
                        stage: s,
                        detail: format!("term {n} leaves the 2^-{j} band of the later terms"),
                    })?,
                });
            }
            return Ok(Enclosure { value: value.expect("non-empty"), certified });
        }
    }
    let start = s64.div_ceil(2);
    let mut hull: Option<Interval> = None;
    let mut prev: Option<Interval> = None;
    let mut last_step: Option<(Interval, Interval)> = None;
    for n in start..=s64 {
        let e = term(n)?.value;
        hull = Some(match hull {
            None => e.clone(),
            Some(h) => h.hull(&e),
        });
        if let Some(p) = prev.take() {
            last_step = Some((p, e.clone()));
        }
        prev = Some(e);
    }
    let mut value = hull.expect("block is non-empty");
    if let Some((p, e)) = last_step {
        let (mp, me) = (p.midpoint(), e.midpoint());
        let gap = (&me - &mp).abs();
        value = if me < mp {
            Interval::new(value.lo() - &gap, value.hi().clone())
        } else {
            Interval::new(value.lo().clone(), value.hi() + &gap)
        };
    }
    Ok(Enclosure { value, certified: false })
}
