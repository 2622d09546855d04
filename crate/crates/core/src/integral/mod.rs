//! The gauge integral: Riemann sums over δ-fine tagged partitions and
//! ε-indexed gauge families, with certified enclosures.

mod catalog;

pub use catalog::{builtin_integrands, lookup, stern_brocot_index, CatalogEntry};

use std::sync::Arc;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::fine::{
    cover_to_partition, find_cover_unit, verify_partition, FineError, Obstruction, SearchResult,
    TaggedPartition, UnitSearch,
};
use crate::gauges::{GaugeCode, Verdict};
use crate::numerics::rational::{fmt_rational, ratio};
use crate::numerics::{Interval, Rational};
use crate::spaces::UnitPoint;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum IntegralError {
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(String),
    #[error("integrand failed at tag {index}: {msg}")]
    Eval { index: usize, msg: String },
    #[error("produced partition is not fine for the family gauge (verdict {0})")]
    NotFine(Verdict),
    #[error(transparent)]
    Fine(#[from] FineError),
}

type Evaluator = Arc<dyn Fn(&UnitPoint, u32) -> Result<Interval, String> + Send + Sync>;

/// Sound evaluator of `f` with exceptional values at finitely many points.
#[derive(Clone)]
pub struct Integrand {
    pub name: String,
    eval: Evaluator,
    special: Vec<(Rational, Rational)>,
}

/// Precision used for tag approximants and irrational values.
pub const VALUE_PRECISION: u32 = 64;

impl Integrand {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&UnitPoint, u32) -> Result<Interval, String> + Send + Sync + 'static,
    ) -> Self {
        Integrand { name: name.into(), eval: Arc::new(eval), special: Vec::new() }
    }

    pub fn with_special(mut self, at: Rational, value: Rational) -> Self {
        self.special.push((at, value));
        self
    }

    /// `Σ c_k x^k` by Horner's rule on the tag enclosure.
    pub fn polynomial(name: impl Into<String>, coeffs: Vec<Rational>) -> Self {
        Self::new(name, move |x, k| {
            let a = x.approximant(k);
            let mut acc = Interval::zero();
            for c in coeffs.iter().rev() {
                acc = acc.mul(&a).shift(c);
            }
            Ok(acc)
        })
    }

    pub fn eval(&self, x: &UnitPoint, k: u32) -> Result<Interval, String> {
        if let Some(r) = x.as_rational() {
            if let Some((_, v)) = self.special.iter().find(|(p, _)| p == r) {
                return Ok(Interval::point(v.clone()));
            }
        }
        (self.eval)(x, k)
    }
}

/// `ε ↦ δ_ε`.
#[derive(Clone)]
pub struct GaugeFamily {
    at: Arc<dyn Fn(&Rational) -> GaugeCode + Send + Sync>,
}

impl GaugeFamily {
    pub fn new(at: impl Fn(&Rational) -> GaugeCode + Send + Sync + 'static) -> Self {
        GaugeFamily { at: Arc::new(at) }
    }

    /// `δ_ε ≡ c·ε`.
    pub fn constant(c: Rational) -> Self {
        Self::new(move |eps| GaugeCode::constant(crate::gauges::Space::Unit, eps * &c))
    }

    pub fn at(&self, eps: &Rational) -> GaugeCode {
        (self.at)(eps)
    }
}

/// Exact enclosure of `Σ f(ξ_i)(x_{i+1} − x_i)`, summed left to right.
pub fn riemann_sum(f: &Integrand, t: &TaggedPartition) -> Result<Interval, IntegralError> {
    let mut sum = Interval::zero();
    for (i, (a, b, tag)) in t.cells().enumerate() {
        let v = f.eval(tag, VALUE_PRECISION).map_err(|msg| IntegralError::Eval { index: i, msg })?;
        sum = sum.add(&v.scale(&(b - a)));
    }
    Ok(sum)
}

#[derive(Clone, Debug)]
pub struct IntegralCertificate {
    pub function: String,
    pub epsilon: Rational,
    pub partition: TaggedPartition,
    pub sum: Interval,
    /// `sum` widened by `ε` on each side.
    pub claim: Interval,
    pub depth: u32,
    pub stage: u32,
}

impl IntegralCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "function": self.function,
            "epsilon": fmt_rational(&self.epsilon),
            "cells": self.partition.len(),
            "sum_lo": fmt_rational(self.sum.lo()),
            "sum_hi": fmt_rational(self.sum.hi()),
            "claim_lo": fmt_rational(self.claim.lo()),
            "claim_hi": fmt_rational(self.claim.hi()),
            "depth": self.depth,
            "stage": self.stage,
        })
    }
}

#[derive(Clone, Debug)]
pub enum IntegralOutcome {
    Certificate(Box<IntegralCertificate>),
    Obstruction(Obstruction<Interval>),
}

/// Searches a cover for `½δ_ε`, converts it to a `δ_ε`-fine partition and
/// encloses its Riemann sum.
pub fn integrate(
    f: &Integrand,
    family: &GaugeFamily,
    eps: &Rational,
    search: &UnitSearch,
) -> Result<IntegralOutcome, IntegralError> {
    if !eps.is_positive() {
        return Err(IntegralError::BadEpsilon(fmt_rational(eps)));
    }
    let g = family.at(eps);
    let half = g.clone().scaled(ratio(1, 2));
    let cover = match find_cover_unit(&half, search)? {
        SearchResult::Cover(c) => c,
        SearchResult::Obstruction(o) => return Ok(IntegralOutcome::Obstruction(o)),
    };
    let partition = cover_to_partition(&cover)?;
    let check = verify_partition(&g, &partition, search.stage)?;
    if check.verdict != Verdict::Yes {
        return Err(IntegralError::NotFine(check.verdict));
    }
    let sum = riemann_sum(f, &partition)?;
    let claim = sum.widen(eps);
    debug_assert!(!claim.width().is_zero());
    Ok(IntegralOutcome::Certificate(Box::new(IntegralCertificate {
        function: f.name.clone(),
        epsilon: eps.clone(),
        partition,
        sum,
        claim,
        depth: search.depth,
        stage: search.stage,
    })))
}
