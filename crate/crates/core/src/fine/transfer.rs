use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::{Ball, FineCover, FineError, Result};
use crate::gauges::{DirectCode, GaugeCode, GaugeError, Region, Space};
use crate::numerics::rational::{least_neg_power_below, least_neg_power_strictly_below, pow2, pow3, ratio};
use crate::numerics::{Interval, Quad, Rational};
use crate::spaces::{
    cantor_gap, cantor_preimage, dist_to_cantor_set, phi, phi_cylinder, CantorPoint, Point,
};

/// `δ ∘ φ` on Cantor space for a gauge `δ` on `[0,1]`.
pub fn compose_phi(g: &GaugeCode) -> GaugeCode {
    let on_region = Arc::new(|r: &Region| match r {
        Region::Cantor(c) => Region::Unit(phi_cylinder(c.bits())),
        other => other.clone(),
    });
    let on_point = Arc::new(|x: &Point| match x {
        Point::Cantor(c) => Point::Unit(phi(c)),
        other => other.clone(),
    });
    g.pull_back(Space::Cantor, on_region, on_point)
}

/// Pushes a Cantor-space cover forward: `{φ(p)}` with the same radii.
pub fn transfer_cover_phi(c: &FineCover<CantorPoint>) -> Result<FineCover<Quad>> {
    let mut balls = Vec::with_capacity(c.len());
    for b in &c.balls {
        if !b.radius.is_positive() {
            return Err(FineError::Structure(format!("radius of {} is not positive", b.center)));
        }
        let p = phi(&b.center);
        let q = p.exact().ok_or_else(|| FineError::InexactPoint(b.center.to_string()))?;
        balls.push(Ball { center: q.clone(), radius: b.radius.clone() });
    }
    Ok(FineCover::new(balls))
}

/// `3^-(m+1)` for the least `m ≥ 0` with `2^-m ≤ v`; `0` for `v ≤ 0`.
fn bucket(v: &Rational) -> Rational {
    if !v.is_positive() {
        return Rational::zero();
    }
    let m = if v >= &Rational::one() { 0 } else { least_neg_power_below(2, v).expect("positive") };
    pow3(-(m as i64) - 1)
}

/// The unit-interval gauge `ĝ` attached to a Cantor gauge `δ` through `ψ`.
///
/// On `C` it is `3^-(m+1)` where `2^-m ≤ δ(ψ^-1(z))`, off `C` it is
/// `d(z, C)`. The extra factor `1/3` pays for the digit-gap bound
/// `|ψ(x) − ψ(y)| ≥ 3^-n-1` at a first difference `n`.
pub fn transfer_gauge_psi(g: &GaugeCode) -> GaugeCode {
    let g = g.clone();
    GaugeCode::Direct(DirectCode::new(Space::Unit, move |z, stage| {
        let Point::Unit(u) = z else {
            return Err(GaugeError::Domain("ψ-transfer expects a unit point".into()));
        };
        if let Some(r) = u.as_rational() {
            return match cantor_gap(r)? {
                Some(_) => Ok(dist_to_cantor_set(r)?),
                None => {
                    let x = cantor_preimage(r)?;
                    let b = g.bounds(&Point::Cantor(x), stage)?;
                    let lo = b.lo.as_ref().map_or(Rational::zero(), bucket);
                    let hi = b.hi.as_ref().map_or(ratio(1, 3), bucket);
                    Ok(Interval::new(lo.clone().min(hi.clone()), hi.max(lo)))
                }
            };
        }
        let a = u.approximant(stage);
        let m = a.midpoint().max(Rational::zero()).min(Rational::one());
        let d = dist_to_cantor_set(&m)?;
        let half = a.width() / Rational::from_integer(2.into());
        if d.lo() > &half {
            Ok(Interval::new(d.lo() - &half, d.hi() + &half))
        } else {
            Ok(Interval::new(Rational::zero(), (d.hi() + &half).max(ratio(1, 3))))
        }
    }))
}

/// `2^-(n0−2)` for the least `n0` with `3^-n0 < r`.
///
/// If `ψ(y) ∈ B(ψ(x), r)` then `x`, `y` agree on the first `n0 − 1` bits,
/// which is exactly the cylinder of `B(x, 2^-(n0−2))`.
pub fn psi_radius(r: &Rational) -> Rational {
    let n0 = least_neg_power_strictly_below(3, r).expect("positive radius") as i64;
    pow2(2 - n0)
}

/// Pulls back a `ĝ`-fine unit cover: centers on `C` become `ψ^-1(p)`,
/// centers off `C` are dropped (they cannot reach any point of `C`).
pub fn transfer_cover_psi(c: &FineCover<Quad>) -> Result<FineCover<CantorPoint>> {
    let mut balls = Vec::new();
    for b in &c.balls {
        let Some(r) = b.center.as_rational() else { continue };
        if cantor_gap(r)?.is_some() {
            continue;
        }
        let x = cantor_preimage(r)?;
        balls.push(Ball { center: x, radius: psi_radius(&b.radius) });
    }
    Ok(FineCover::new(balls))
}

/// Points of `C` nearest to a cell's ends and middle: search samples for
/// `ĝ`, whose large values sit on `C`.
pub fn cantor_samples_unit(cell: &Interval) -> Vec<Quad> {
    let clamp = |r: Rational| r.max(Rational::zero()).min(Rational::one());
    let mut out = Vec::new();
    for (z, up) in [(cell.lo().clone(), true), (cell.hi().clone(), false), (cell.midpoint(), true), (cell.midpoint(), false)] {
        let z = clamp(z);
        match cantor_gap(&z) {
            Ok(None) => out.push(Quad::rational(z)),
            Ok(Some((a, b))) => out.push(Quad::rational(if up { b } else { a })),
            Err(_) => {}
        }
    }
    out
}
