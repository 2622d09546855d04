//! The binary map `φ(x) = Σ x(n) 2^-n-1` onto `[0,1]` and the ternary
//! embedding `ψ(x) = Σ 2x(n) 3^-n-1` onto the Cantor set `C`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::cantor::CantorPoint;
use super::unit::UnitPoint;
use super::SpacesError;
use crate::numerics::rational::{int, pow3, ratio};
use crate::numerics::{Interval, Rational};

/// Value of `Σ w·x(n)·base^-n-1` for an eventually periodic `x`.
fn periodic_value(prefix: &[bool], period: &[bool], base: i64, weight: i64) -> Rational {
    let b = BigInt::from(base);
    let mut head = BigInt::zero();
    for &bit in prefix {
        head = head * &b + BigInt::from(if bit { weight } else { 0 });
    }
    let mut block = BigInt::zero();
    for &bit in period {
        block = block * &b + BigInt::from(if bit { weight } else { 0 });
    }
    let bp = num_traits::pow(b.clone(), prefix.len());
    let bl = num_traits::pow(b, period.len());
    Rational::new(head, bp.clone()) + Rational::new(block, (bl - BigInt::one()) * bp)
}

pub fn phi(x: &CantorPoint) -> UnitPoint {
    if let Some((prefix, period)) = x.periodic_parts() {
        return UnitPoint::rational(periodic_value(prefix, period, 2, 1));
    }
    let x = x.clone();
    UnitPoint::from_approximants(move |k| {
        let n = k as usize + 1;
        let mut acc = BigInt::zero();
        for i in 0..n {
            acc = (acc << 1) + BigInt::from(x.bit(i) as u8);
        }
        let den = BigInt::one() << n;
        let lo = Rational::new(acc, den.clone());
        let hi = &lo + Rational::new(BigInt::one(), den);
        Interval::new(lo, hi)
    })
}

/// Image `φ([σ])`, the closed dyadic interval of width `2^-|σ|`.
pub fn phi_cylinder(bits: &[bool]) -> Interval {
    let mut acc = BigInt::zero();
    for &b in bits {
        acc = (acc << 1) + BigInt::from(b as u8);
    }
    let den = BigInt::one() << bits.len();
    let lo = Rational::new(acc, den.clone());
    let hi = &lo + Rational::new(BigInt::one(), den);
    Interval::new(lo, hi)
}

pub fn psi(x: &CantorPoint) -> UnitPoint {
    if let Some((prefix, period)) = x.periodic_parts() {
        return UnitPoint::rational(periodic_value(prefix, period, 3, 2));
    }
    let x = x.clone();
    UnitPoint::from_approximants(move |k| {
        // 3^-n <= 2^-k
        let target = BigInt::one() << (k as usize);
        let mut n = 0usize;
        let mut p = BigInt::one();
        while p < target {
            p *= 3;
            n += 1;
        }
        let mut acc = BigInt::zero();
        for i in 0..n {
            acc = acc * 3 + BigInt::from(2 * (x.bit(i) as u8));
        }
        let lo = Rational::new(acc, p.clone());
        let hi = &lo + Rational::new(BigInt::one(), p);
        Interval::new(lo, hi)
    })
}

/// Image `ψ([σ])`: the closed level-`|σ|` component of the Cantor set.
pub fn psi_cylinder(bits: &[bool]) -> Interval {
    let mut acc = BigInt::zero();
    for &b in bits {
        acc = acc * 3 + BigInt::from(2 * (b as u8));
    }
    let den = num_traits::pow(BigInt::from(3), bits.len());
    let lo = Rational::new(acc, den.clone());
    let hi = &lo + Rational::new(BigInt::one(), den);
    Interval::new(lo, hi)
}

enum Walk {
    InSet(CantorPoint),
    /// Distance to `C` and the complementary interval containing the point.
    Gap(Rational, Rational, Rational),
}

/// Ternary walk of a rational `z ∈ [0,1]` through the Cantor construction.
/// Position `t` is the relative coordinate inside the current component;
/// rational `t` has bounded denominator, so the walk either hits a gap or cycles.
fn walk(z: &Rational) -> Walk {
    let (third, two_thirds) = (ratio(1, 3), ratio(2, 3));
    let mut t = z.clone();
    let mut scale = Rational::one();
    let mut offset = Rational::zero();
    let mut bits = Vec::new();
    let mut seen: HashMap<Rational, usize> = HashMap::new();
    loop {
        if let Some(&start) = seen.get(&t) {
            let period = bits[start..].to_vec();
            bits.truncate(start);
            return Walk::InSet(CantorPoint::periodic(bits, period).expect("cycle is non-empty"));
        }
        seen.insert(t.clone(), bits.len());
        if t <= third {
            bits.push(false);
            t *= int(3);
        } else if t >= two_thirds {
            bits.push(true);
            t = t * int(3) - int(2);
            offset += &scale * &two_thirds;
        } else {
            let d = (&t - &third).min(&two_thirds - &t);
            let left = &offset + &scale * &third;
            let right = &offset + &scale * &two_thirds;
            return Walk::Gap(d * scale, left, right);
        }
        scale /= int(3);
    }
}

fn check_range(z: &Rational) -> Result<(), SpacesError> {
    if z < &Rational::zero() || z > &Rational::one() {
        return Err(SpacesError::OutOfRange(crate::numerics::rational::fmt_rational(z)));
    }
    Ok(())
}

/// Exact `d(z, C)` for rational `z ∈ [0,1]`.
pub fn dist_to_cantor_set(z: &Rational) -> Result<Interval, SpacesError> {
    check_range(z)?;
    Ok(match walk(z) {
        Walk::InSet(_) => Interval::zero(),
        Walk::Gap(d, _, _) => Interval::point(d),
    })
}

/// The open interval of `[0,1] ∖ C` containing `z`, or `None` if `z ∈ C`.
pub fn cantor_gap(z: &Rational) -> Result<Option<(Rational, Rational)>, SpacesError> {
    check_range(z)?;
    Ok(match walk(z) {
        Walk::InSet(_) => None,
        Walk::Gap(_, a, b) => Some((a, b)),
    })
}

/// `ψ^-1(z)` for rational `z ∈ C`, as an eventually periodic point.
pub fn cantor_preimage(z: &Rational) -> Result<CantorPoint, SpacesError> {
    check_range(z)?;
    match walk(z) {
        Walk::InSet(x) => Ok(x),
        Walk::Gap(d, _, _) => Err(SpacesError::NotInCantorSet { distance: Some(d) }),
    }
}

/// First `n` bits of `ψ^-1(z)`.
pub fn psi_preimage_prefix(z: &UnitPoint, n: usize) -> Result<Vec<bool>, SpacesError> {
    if let Some(r) = z.as_rational() {
        return Ok(cantor_preimage(r)?.prefix(n));
    }
    let mut bits = Vec::with_capacity(n);
    let mut k = 8u32;
    while bits.len() < n {
        let comp = psi_cylinder(&bits);
        let w = comp.width() / int(3);
        let left = Interval::new(comp.lo().clone(), comp.lo() + &w);
        let right = Interval::new(comp.hi() - &w, comp.hi().clone());
        let a = z.approximant(k);
        if a.is_subset_of(&left) {
            bits.push(false);
        } else if a.is_subset_of(&right) {
            bits.push(true);
        } else if a.lo() > left.hi() && a.hi() < right.lo() {
            let d = (a.lo() - left.hi()).min(right.lo() - a.hi());
            return Err(SpacesError::NotInCantorSet { distance: Some(d) });
        } else if k >= super::unit::MAX_REFINEMENT {
            return Err(SpacesError::Undecided);
        } else {
            k *= 2;
        }
    }
    Ok(bits)
}

/// Lower bound on `|ψ(x) − ψ(y)|` when `x`, `y` first differ at index `n`:
/// the digit gap `2·3^-n-1` minus the largest possible tail `3^-n-1`.
pub fn psi_separation(n: usize) -> Rational {
    pow3(-(n as i64) - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn p(s: &str) -> CantorPoint {
        CantorPoint::parse(s).unwrap()
    }

    fn r(u: &UnitPoint) -> Rational {
        u.as_rational().unwrap().clone()
    }

    #[test]
    fn phi_values() {
        assert_eq!(r(&phi(&p("prefix=1;period=0"))), ratio(1, 2));
        assert_eq!(r(&phi(&p("period=1"))), int(1));
        assert_eq!(r(&phi(&p("period=01"))), ratio(1, 3));
    }

    #[test]
    fn psi_values() {
        assert_eq!(r(&psi(&p("period=1"))), int(1));
        assert_eq!(r(&psi(&p("prefix=1;period=0"))), ratio(2, 3));
        assert_eq!(r(&psi(&p("prefix=0;period=1"))), ratio(1, 3));
    }

    #[test]
    fn rule_points_match_periodic_values() {
        let rule = CantorPoint::from_rule(|n| n % 2 == 1);
        let a = phi(&rule).approximant(20);
        assert!(a.contains(&ratio(1, 3)));
        let b = psi(&rule).approximant(20);
        assert!(b.contains(&r(&psi(&p("period=01")))));
    }

    #[test]
    fn distances_to_cantor_set() {
        assert_eq!(dist_to_cantor_set(&ratio(1, 3)).unwrap(), Interval::zero());
        assert_eq!(dist_to_cantor_set(&ratio(1, 2)).unwrap(), Interval::point(ratio(1, 6)));
        assert_eq!(dist_to_cantor_set(&ratio(1, 6)).unwrap(), Interval::point(ratio(1, 18)));
        assert!(dist_to_cantor_set(&ratio(3, 2)).is_err());
    }

    /// Brute force over the endpoints of the level-`n` construction.
    fn brute_dist(z: &Rational, level: usize) -> Rational {
        let mut best: Option<Rational> = None;
        for m in 0..(1usize << level) {
            let bits: Vec<bool> = (0..level).map(|i| (m >> (level - 1 - i)) & 1 == 1).collect();
            let c = psi_cylinder(&bits);
            for e in [c.lo(), c.hi()] {
                let d = (z - e).abs();
                if best.as_ref().is_none_or(|b| &d < b) {
                    best = Some(d);
                }
            }
            if c.contains(z) {
                return Rational::zero();
            }
        }
        best.unwrap()
    }

    #[test]
    fn distance_matches_endpoint_brute_force_off_the_set() {
        for den in 2..30i64 {
            for num in 0..=den {
                let z = ratio(num, den);
                let exact = dist_to_cantor_set(&z).unwrap();
                let brute = brute_dist(&z, 6);
                if exact.lo().is_positive() {
                    assert_eq!(exact.lo(), &brute, "z = {z}");
                }
            }
        }
    }

    #[test]
    fn gaps() {
        assert_eq!(cantor_gap(&ratio(1, 2)).unwrap(), Some((ratio(1, 3), ratio(2, 3))));
        assert_eq!(cantor_gap(&ratio(1, 6)).unwrap(), Some((ratio(1, 9), ratio(2, 9))));
        assert_eq!(cantor_gap(&ratio(1, 4)).unwrap(), None);
        assert_eq!(cantor_gap(&ratio(5, 6)).unwrap(), Some((ratio(7, 9), ratio(8, 9))));
    }

    #[test]
    fn separation_is_attained() {
        let x = p("prefix=0;period=1");
        let y = p("prefix=1;period=0");
        let d = r(&psi(&y)) - r(&psi(&x));
        assert_eq!(d, psi_separation(0));
    }

    #[test]
    fn preimage_prefixes() {
        assert_eq!(
            psi_preimage_prefix(&UnitPoint::rational(int(1)), 3).unwrap(),
            vec![true, true, true]
        );
        assert_eq!(
            psi_preimage_prefix(&UnitPoint::rational(ratio(2, 3)), 3).unwrap(),
            vec![true, false, false]
        );
        assert!(matches!(
            psi_preimage_prefix(&UnitPoint::rational(ratio(1, 2)), 1),
            Err(SpacesError::NotInCantorSet { .. })
        ));
        let rule = CantorPoint::from_rule(|n| n % 3 == 0);
        assert_eq!(psi_preimage_prefix(&psi(&rule), 9).unwrap(), rule.prefix(9));
    }
}
