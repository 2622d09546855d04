//! An increasing Cauchy sequence whose limit the cover search cannot reach:
//! the gauge `δ_n(x) = |x − z_n|` has a positive value at every sample the
//! search can verify, but vanishes in the limit at `z*`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{GalleryError, Result};
use crate::fine::{find_cover_unit, Obstruction, SearchResult, UnitSearch};
use crate::gauges::{Baire1Code, GaugeCode, GaugeError, Region, Space};
use crate::numerics::rational::pow2;
use crate::numerics::{Interval, Rational};
use crate::spaces::UnitPoint;

#[derive(Clone)]
pub struct CauchySpec {
    term: Arc<dyn Fn(u64) -> Rational + Send + Sync>,
    modulus: Arc<dyn Fn(u32) -> u64 + Send + Sync>,
    pub monotone: bool,
    limit: Option<UnitPoint>,
}

impl CauchySpec {
    pub fn new(
        term: impl Fn(u64) -> Rational + Send + Sync + 'static,
        modulus: impl Fn(u32) -> u64 + Send + Sync + 'static,
        monotone: bool,
    ) -> Self {
        CauchySpec { term: Arc::new(term), modulus: Arc::new(modulus), monotone, limit: None }
    }

    pub fn with_limit(mut self, z: UnitPoint) -> Self {
        self.limit = Some(z);
        self
    }

    /// `z_n = Σ_{1≤i≤n+1} 2^-i²` with `N(j) = ⌈√j⌉`.
    pub fn default_gap() -> Self {
        let limit = UnitPoint::from_approximants(|p| {
            let s = squares_sum(|i| i * i <= p as u64);
            Interval::new(s.clone(), s + pow2(-(p as i64)))
        });
        CauchySpec::new(|n| squares_sum(|i| i <= n + 1), |j| ceil_sqrt(j as u64), true).with_limit(limit)
    }

    pub fn term(&self, n: u64) -> Rational {
        (self.term)(n)
    }

    pub fn modulus(&self, j: u32) -> u64 {
        (self.modulus)(j)
    }

    pub fn limit(&self) -> Option<&UnitPoint> {
        self.limit.as_ref()
    }

    /// Checks monotonicity and the modulus on `n, m ≤ bound`.
    pub fn check_to(&self, bound: u64) -> bool {
        let zs: Vec<_> = (0..=bound).map(|n| self.term(n)).collect();
        if self.monotone && zs.windows(2).any(|w| w[0] > w[1]) {
            return false;
        }
        (0..20u32).all(|j| {
            let start = self.modulus(j).min(bound + 1) as usize;
            let tol = pow2(-(j as i64));
            zs[start..].iter().all(|a| zs[start..].iter().all(|b| (a - b).abs() <= tol))
        })
    }
}

/// `Σ 2^-i²` over `i ≥ 1` with `keep(i)`; `keep` must be a down-set.
fn squares_sum(keep: impl Fn(u64) -> bool) -> Rational {
    let mut s = Rational::zero();
    let mut i = 1u64;
    while keep(i) {
        s += pow2(-((i * i) as i64));
        i += 1;
    }
    s
}

fn ceil_sqrt(j: u64) -> u64 {
    let r = BigInt::from(j).sqrt();
    let r = u64::try_from(r).expect("fits");
    if r * r == j {
        r
    } else {
        r + 1
    }
}

/// Term `n` is `x ↦ |x − z_n|`; the modulus carries over since
/// `|δ_m(x) − δ_n(x)| ≤ |z_m − z_n|`.
pub fn cauchy_gap_gauge(zs: &CauchySpec) -> Baire1Code {
    let term = zs.term.clone();
    let modulus = zs.modulus.clone();
    Baire1Code::new(Space::Unit, move |n, r, _| match r {
        Region::Unit(i) => Ok(i.shift(&-term(n)).abs()),
        Region::Cantor(_) => Err(GaugeError::Domain("the gap gauge lives on [0,1]".into())),
    })
    .with_modulus(move |j| modulus(j))
}

/// Runs the unit search on the gap gauge and checks that it stalls on a
/// single run of width at most `2^(2−depth)` around `z*`.
pub fn gap_obstruction_demo(zs: &CauchySpec, depth: u32, stage: u32) -> Result<Obstruction<Interval>> {
    let g = GaugeCode::Baire1(cauchy_gap_gauge(zs));
    let o = match find_cover_unit(&g, &UnitSearch::new(depth, stage))? {
        SearchResult::Cover(c) => {
            return Err(GalleryError::UnexpectedCover(format!("{} balls cover around the gap", c.len())))
        }
        SearchResult::Obstruction(o) => o,
    };
    if o.regions.len() != 1 {
        return Err(GalleryError::Postcondition(format!("{} unresolved runs, expected 1", o.regions.len())));
    }
    let run = &o.regions[0].region;
    if run.width() > pow2(2 - depth as i64) {
        return Err(GalleryError::Postcondition(format!("run {run} wider than 2^{}", 2 - depth as i64)));
    }
    if let Some(z) = zs.limit() {
        if !z.approximant(depth + 32).is_subset_of(run) {
            return Err(GalleryError::Postcondition(format!("run {run} misses the limit")));
        }
    }
    Ok(o)
}
