//! Built-in integrands, each with a gauge family and a closed-form reference.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{GaugeFamily, Integrand};
use crate::gauges::{DirectCode, GaugeCode, GaugeError, Space};
use crate::numerics::rational::{int, pow2, ratio};
use crate::numerics::{Interval, Quad, Rational};
use crate::spaces::{Point, UnitPoint};

#[derive(Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub integrand: Integrand,
    pub family: GaugeFamily,
    /// Exact value of the integral over `[0,1]`.
    pub reference: Rational,
    /// Search hints that the family needs to be coverable.
    pub hints: Vec<Quad>,
    /// Identifies choices baked into the gauge, such as an enumeration.
    pub gauge_id: &'static str,
}

pub fn builtin_integrands() -> Vec<CatalogEntry> {
    vec![
        polynomial_entry("identity", vec![int(0), int(1)]),
        polynomial_entry("square", vec![int(0), int(0), int(1)]),
        sqrt_reciprocal(),
        dirichlet(),
        step(),
    ]
}

pub fn lookup(name: &str) -> Option<CatalogEntry> {
    builtin_integrands().into_iter().find(|e| e.name == name)
}

/// Constant family `ε/(1+L)` with `L` a Lipschitz bound on `[0,1]`.
pub fn polynomial_family(coeffs: &[Rational]) -> GaugeFamily {
    let lip: Rational = coeffs.iter().enumerate().map(|(k, c)| c.abs() * int(k as i64)).sum();
    GaugeFamily::constant(int(1) / (int(1) + lip))
}

fn polynomial_entry(name: &'static str, coeffs: Vec<Rational>) -> CatalogEntry {
    let reference = coeffs.iter().enumerate().map(|(k, c)| c / int(k as i64 + 1)).sum();
    CatalogEntry {
        name,
        family: polynomial_family(&coeffs),
        integrand: Integrand::polynomial(name, coeffs),
        reference,
        hints: Vec::new(),
        gauge_id: "constant",
    }
}

/// Outward enclosure of `1/√r` for `r > 0` with `bits` fractional bits.
fn inv_sqrt(r: &Rational, bits: u32) -> Interval {
    let scale = BigInt::from(1) << (2 * bits);
    let q: BigInt = (r.denom() * scale) / r.numer();
    let s = q.sqrt();
    let unit = pow2(-(bits as i64));
    Interval::new(Rational::from_integer(s.clone()) * &unit, Rational::from_integer(s + 1) * &unit)
}

fn sqrt_reciprocal() -> CatalogEntry {
    let integrand = Integrand::new("sqrt-reciprocal", |x, k| {
        let bits = k + 64;
        if let Some(r) = x.as_rational() {
            if !r.is_positive() {
                return Err("x^-1/2 needs x > 0".into());
            }
            return Ok(inv_sqrt(r, bits));
        }
        let a = x.approximant(k);
        if !a.lo().is_positive() {
            return Err("tag not separated from 0 at this precision".into());
        }
        let lo = inv_sqrt(a.hi(), bits);
        let hi = inv_sqrt(a.lo(), bits);
        Ok(Interval::new(lo.lo().clone(), hi.hi().clone()))
    })
    .with_special(int(0), int(0));
    let family = GaugeFamily::new(|eps| {
        let eps = eps.clone();
        let at_zero = {
            let q = &eps / int(4);
            &q * &q
        };
        GaugeCode::Direct(DirectCode::new(Space::Unit, move |x, stage| {
            let Point::Unit(u) = x else { return Err(GaugeError::Domain("expected a unit point".into())) };
            let half = &eps / int(2);
            match u.cmp_rational(&Rational::zero()) {
                Some(Ordering::Equal) => Ok(Interval::point(at_zero.clone())),
                Some(Ordering::Greater) => {
                    let a = u.approximant(stage);
                    let lo = if a.lo().is_positive() { a.lo().clone() } else { Rational::zero() };
                    Ok(Interval::new(lo, a.hi().clone()).scale(&half))
                }
                _ => {
                    let a = u.approximant(stage);
                    let hi = (a.hi() * &half).max(at_zero.clone());
                    Ok(Interval::new(Rational::zero(), hi))
                }
            }
        }))
    });
    CatalogEntry {
        name: "sqrt-reciprocal",
        integrand,
        family,
        reference: int(2),
        hints: Vec::new(),
        gauge_id: "sqrt-reciprocal:eps2/16-at-0,eps*p/2",
    }
}

/// Deepest Stern–Brocot level resolved exactly.
pub const STERN_BROCOT_LEVELS: u32 = 10;

/// Index of `q ∈ [0,1] ∩ ℚ` in the breadth-first Stern–Brocot order
/// `0, 1, 1/2, 1/3, 2/3, 1/4, 2/5, 3/5, 3/4, …`, or `None` when `q` sits
/// below level [`STERN_BROCOT_LEVELS`].
pub fn stern_brocot_index(q: &Rational) -> Option<u64> {
    if q.is_zero() {
        return Some(0);
    }
    if q == &int(1) {
        return Some(1);
    }
    let (p, d) = (q.numer().clone(), q.denom().clone());
    let (mut lo, mut hi) = ((BigInt::from(0), BigInt::from(1)), (BigInt::from(1), BigInt::from(1)));
    let mut pos: u64 = 0;
    for level in 1..=STERN_BROCOT_LEVELS {
        let m = (&lo.0 + &hi.0, &lo.1 + &hi.1);
        // compare p/d with m.0/m.1
        match (&p * &m.1).cmp(&(&m.0 * &d)) {
            Ordering::Equal => return Some((1u64 << (level - 1)) + 1 + pos),
            Ordering::Less => {
                pos *= 2;
                hi = m;
            }
            Ordering::Greater => {
                pos = pos * 2 + 1;
                lo = m;
            }
        }
    }
    None
}

fn dirichlet() -> CatalogEntry {
    let integrand = Integrand::new("dirichlet", |x, _| match x {
        UnitPoint::Exact(q) if q.is_rational() => Ok(Interval::point(int(1))),
        UnitPoint::Exact(_) => Ok(Interval::zero()),
        UnitPoint::Approx(_) => Ok(Interval::unit()),
    });
    let family = GaugeFamily::new(|eps| {
        let eps = eps.clone();
        GaugeCode::Direct(DirectCode::new(Space::Unit, move |x, _| {
            let Point::Unit(u) = x else { return Err(GaugeError::Domain("expected a unit point".into())) };
            Ok(match u {
                UnitPoint::Exact(q) => match q.as_rational() {
                    None => Interval::point(int(1)),
                    Some(r) => match stern_brocot_index(r) {
                        Some(n) => Interval::point(&eps * pow2(-(n as i64))),
                        // every deeper rational has index above 2^LEVELS
                        None => Interval::new(Rational::zero(), &eps * pow2(-(1i64 << STERN_BROCOT_LEVELS) - 1)),
                    },
                },
                UnitPoint::Approx(_) => Interval::unit(),
            })
        }))
    });
    let root_half = Quad::new(Rational::zero(), ratio(1, 2));
    let hints = (0..4).map(|j| root_half.scale(&ratio(1, 4)).add_rational(&ratio(j, 4))).collect();
    CatalogEntry {
        name: "dirichlet",
        integrand,
        family,
        reference: Rational::zero(),
        hints,
        gauge_id: "dirichlet:stern-brocot-bfs",
    }
}

fn step() -> CatalogEntry {
    let half = ratio(1, 2);
    let integrand = Integrand::new("step", move |x, _| match x.cmp_rational(&half) {
        Some(Ordering::Less) => Ok(Interval::point(int(1))),
        Some(_) => Ok(Interval::zero()),
        None => Ok(Interval::new(Rational::zero(), int(1))),
    });
    CatalogEntry {
        name: "step",
        integrand,
        family: GaugeFamily::constant(ratio(1, 4)),
        reference: ratio(1, 2),
        hints: Vec::new(),
        gauge_id: "constant",
    }
}
