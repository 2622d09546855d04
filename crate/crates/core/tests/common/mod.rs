//! Generators and checks shared by the property and acceptance targets.
#![allow(dead_code)]

use std::cmp::Ordering;

use cousin::gallery::{parse_cover_file, OpenCoverSpec};
use cousin::gauges::{parse_gauge, DirectCode, GaugeCode, GaugeError, Space, Verdict};
use cousin::numerics::rational::{fmt_rational, int, ratio};
use cousin::numerics::Rational;
use cousin::spaces::{CantorPoint, Point, UnitPoint};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_rational(r: &mut Rng8, den: i64) -> Rational {
    ratio(r.gen_range(0..=den), den)
}

pub fn rand_bits(r: &mut Rng8, max: usize, min: usize) -> Vec<bool> {
    let n = r.gen_range(min..=max);
    (0..n).map(|_| r.gen()).collect()
}

pub fn rand_cantor(r: &mut Rng8) -> CantorPoint {
    let prefix = rand_bits(r, 6, 0);
    let period = rand_bits(r, 4, 1);
    CantorPoint::periodic(prefix, period).unwrap()
}

/// `a + b·x + c·|x − d|` with its exact value function.
#[derive(Clone, Debug)]
pub struct Affine {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl Affine {
    pub fn random(r: &mut Rng8) -> Self {
        Affine {
            a: ratio(r.gen_range(1..=64), 256),
            b: ratio(r.gen_range(0..=8), 16),
            c: ratio(r.gen_range(0..=8), 16),
            d: rand_rational(r, 16),
        }
    }

    pub fn body(&self) -> String {
        format!(
            "{} + {}*x + {}*|x - {}|",
            fmt_rational(&self.a),
            fmt_rational(&self.b),
            fmt_rational(&self.c),
            fmt_rational(&self.d)
        )
    }

    pub fn value(&self, x: &Rational) -> Rational {
        let dev = x - &self.d;
        let dev = if dev < Rational::from_integer(0.into()) { -dev } else { dev };
        &self.a + &self.b * x + &self.c * dev
    }

    /// Piecewise linear, so the minimum sits at 0, `d` or 1.
    pub fn minimum(&self) -> Rational {
        [int(0), self.d.clone(), int(1)].iter().map(|x| self.value(x)).min().unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Continuous,
    Baire1Certified,
    Baire1Heuristic,
    Baire2Certified,
    Scaled,
}

/// A random gauge spec with a known limit on rational points.
#[derive(Clone, Debug)]
pub struct GaugeCase {
    pub kind: Kind,
    pub text: String,
    pub base: Affine,
    pub factor: Rational,
}

impl GaugeCase {
    pub fn random(r: &mut Rng8) -> Self {
        let base = Affine::random(r);
        let c = ratio(r.gen_range(1..=4), 4);
        let body = base.body();
        let c = fmt_rational(&c);
        let (kind, text) = match r.gen_range(0..5) {
            0 => (Kind::Continuous, body),
            1 => (Kind::Baire1Certified, format!("baire1(n -> {body} + {c}*2^(-n); modulus j -> j + 1)")),
            2 => (Kind::Baire1Heuristic, format!("baire1(n -> {body} + {c}*2^(-n))")),
            3 => (
                Kind::Baire2Certified,
                format!("baire2(m -> baire1(n -> {body} + {c}*2^(-m-1) + {c}*2^(-n-1); modulus j -> j + 1); modulus j -> j + 1)"),
            ),
            _ => (Kind::Scaled, body),
        };
        let factor = if kind == Kind::Scaled { ratio(r.gen_range(1..=8), 4) } else { int(1) };
        GaugeCase { kind, text, base, factor }
    }

    pub fn code(&self) -> GaugeCode {
        let g = parse_gauge(&self.text, Space::Unit, &()).expect("generated specs parse");
        if self.kind == Kind::Scaled {
            g.scaled(self.factor.clone())
        } else {
            g
        }
    }

    pub fn truth(&self, x: &Rational) -> Rational {
        self.base.value(x) * &self.factor
    }
}

/// Verdicts for `δ(x) > q` at `s1 < s2`: a decided verdict may not change
/// and only certified codes may say `No`.
pub fn check_permanence(case: &GaugeCase, x: &Rational, q: &Rational, s1: u32, s2: u32) -> Result<(), String> {
    let g = case.code();
    let p = Point::Unit(UnitPoint::rational(x.clone()));
    let v1 = g.verified_above(&p, q, s1).map_err(|e| e.to_string())?;
    let v2 = g.verified_above(&p, q, s2).map_err(|e| e.to_string())?;
    if v1 != Verdict::Unknown && v1 != v2 {
        return Err(format!("{}: {v1} at stage {s1} became {v2} at {s2}", case.text));
    }
    if !g.has_certificate() && (v1 == Verdict::No || v2 == Verdict::No) {
        return Err(format!("{}: uncertified code answered no", case.text));
    }
    Ok(())
}

/// Bounds and enclosures contain the true value; continuous enclosures nest.
/// Codes without a modulus carry no such guarantee and are skipped.
pub fn check_soundness(case: &GaugeCase, x: &Rational, s1: u32, s2: u32) -> Result<(), String> {
    if case.kind == Kind::Baire1Heuristic {
        return Ok(());
    }
    let g = case.code();
    let p = Point::Unit(UnitPoint::rational(x.clone()));
    let t = case.truth(x);
    let b = g.bounds(&p, s2).map_err(|e| e.to_string())?;
    if b.lo.as_ref().is_some_and(|l| l > &t) || b.hi.as_ref().is_some_and(|h| h < &t) {
        return Err(format!("{} at {x}: bounds {:?} miss {t}", case.text, b));
    }
    let e1 = g.eval_enclosure(&p, s1).map_err(|e| e.to_string())?;
    let e2 = g.eval_enclosure(&p, s2).map_err(|e| e.to_string())?;
    for e in [&e1, &e2] {
        if e.certified && !e.value.contains(&t) {
            return Err(format!("{} at {x}: enclosure {} misses {t}", case.text, e.value));
        }
    }
    match case.kind {
        Kind::Continuous | Kind::Scaled if !e2.value.is_subset_of(&e1.value) => {
            Err(format!("{}: stage {s2} enclosure {} not inside {}", case.text, e2.value, e1.value))
        }
        _ if e1.certified && e2.certified && !e1.value.intersects(&e2.value) => Err(format!("{}: enclosures at {s1} and {s2} are disjoint", case.text)),
        _ => Ok(()),
    }
}

/// A positive step gauge: value `v_i` on `(b_i, b_{i+1})`, the smaller
/// neighbour at a breakpoint.
pub fn piecewise(breaks: Vec<Rational>, values: Vec<Rational>) -> GaugeCode {
    assert_eq!(breaks.len() + 1, values.len());
    GaugeCode::Direct(DirectCode::new(Space::Unit, move |x, _| {
        let Point::Unit(u) = x else { return Err(GaugeError::Domain("unit".into())) };
        let mut piece = 0;
        for (i, b) in breaks.iter().enumerate() {
            match u.cmp_rational(b) {
                Some(Ordering::Greater) => piece = i + 1,
                Some(Ordering::Equal) => {
                    let v = values[i].clone().min(values[i + 1].clone());
                    return Ok(cousin::numerics::Interval::point(v));
                }
                Some(Ordering::Less) => break,
                None => return Err(GaugeError::Eval("undecided comparison".into())),
            }
        }
        Ok(cousin::numerics::Interval::point(values[piece].clone()))
    }))
}

pub fn random_piecewise(r: &mut Rng8) -> GaugeCode {
    let k = r.gen_range(0..5);
    let mut breaks: Vec<Rational> = (0..k).map(|_| ratio(r.gen_range(1..64), 64)).collect();
    breaks.sort();
    breaks.dedup();
    let values = (0..=breaks.len()).map(|_| ratio(r.gen_range(1..=32), 128)).collect();
    piecewise(breaks, values)
}

/// A head of overlapping intervals covering `[0,1]` plus a decorative tail.
pub fn random_open_cover(r: &mut Rng8) -> (OpenCoverSpec, String) {
    let k = r.gen_range(1..=5);
    let mut cuts: Vec<Rational> = (0..k - 1).map(|_| ratio(r.gen_range(1..32), 32)).collect();
    cuts.push(int(0));
    cuts.push(int(1));
    cuts.sort();
    cuts.dedup();
    let mut text = String::new();
    for w in cuts.windows(2) {
        let ov = ratio(r.gen_range(1..=5), 50);
        text.push_str(&format!("{} {}\n", fmt_rational(&(&w[0] - &ov)), fmt_rational(&(&w[1] + &ov))));
    }
    let d = r.gen_range(2..6);
    text.push_str(&format!("tail: 1/(m+{d}) 4^(-m-2)\n"));
    (parse_cover_file(&text).expect("generated cover parses"), text)
}
