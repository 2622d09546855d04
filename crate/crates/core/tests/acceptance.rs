//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use cousin::fine::{
    cantor_samples_unit, compose_phi, cover_to_partition, find_cover_cantor, find_cover_unit, partition_to_cover,
    transfer_cover_phi, transfer_cover_psi, transfer_gauge_psi, verify_cover, verify_partition, CantorSearch,
    UnitSearch,
};
use cousin::gallery::{
    check_star, gap_obstruction_demo, heine_borel_demo, heine_borel_gauge, oracle_pin_demo, pin_index, CauchySpec,
    GalleryError, OracleSpec,
};
use cousin::gauges::{parse_gauge, Space, Verdict};
use cousin::integral::{integrate, lookup, IntegralOutcome};
use cousin::numerics::rational::{fmt_rational, int, least_neg_power_below, pow2, ratio};
use cousin::numerics::Rational;
use cousin::spaces::Cylinder;
use rand::Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn yes(v: Verdict, what: impl FnOnce() -> String) -> Result<(), String> {
    ensure(v == Verdict::Yes, || format!("{}: verdict {v}", what()))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn factor_two_round_trip() -> Check {
    let mut r = rng(1);
    for i in 0..100 {
        let g = random_piecewise(&mut r);
        let g2 = g.clone().scaled(int(2));
        let half = g.clone().scaled(ratio(1, 2));
        let t = cover_to_partition(&find_cover_unit(&half, &UnitSearch::new(12, 4)).map_err(err)?.cover().ok_or("no cover")?)
            .map_err(err)?;
        yes(verify_partition(&g, &t, 4).map_err(err)?.verdict, || format!("gauge {i}: δ-fine partition"))?;
        yes(verify_cover(&g2, &partition_to_cover(&t).map_err(err)?, 4).map_err(err)?.verdict, || {
            format!("gauge {i}: partition_to_cover against 2δ")
        })?;
        let c = find_cover_unit(&g, &UnitSearch::new(12, 4)).map_err(err)?.cover().ok_or("no cover")?;
        yes(verify_cover(&g, &c, 4).map_err(err)?.verdict, || format!("gauge {i}: δ-fine cover"))?;
        yes(verify_partition(&g2, &cover_to_partition(&c).map_err(err)?, 4).map_err(err)?.verdict, || {
            format!("gauge {i}: cover_to_partition against 2δ")
        })?;
    }
    Ok("100 step gauges, both directions verified".into())
}

fn continuous_cousin() -> Check {
    let mut r = rng(2);
    let mut depths = Vec::new();
    let mut n = 0;
    while n < 50 {
        let (text, m) = if r.gen_bool(0.5) {
            let a = Affine::random(&mut r);
            (a.body(), a.minimum())
        } else {
            let q = rand_rational(&mut r, 8);
            let floor = ratio(r.gen_range(1..=16), 256);
            (format!("max({}, dist(x; {}))", fmt_rational(&floor), fmt_rational(&q)), floor)
        };
        if m < pow2(-8) {
            continue;
        }
        let g = parse_gauge(&text, Space::Unit, &()).map_err(err)?;
        let depth = least_neg_power_below(2, &(&m / int(4))).expect("positive");
        let c = find_cover_unit(&g, &UnitSearch::new(depth, 8))
            .map_err(err)?
            .cover()
            .ok_or_else(|| format!("`{text}` (m = {}): no cover at depth {depth}", fmt_rational(&m)))?;
        yes(verify_cover(&g, &c, 8).map_err(err)?.verdict, || format!("`{text}`"))?;
        depths.push(depth);
        n += 1;
    }
    Ok(format!("50/50 covers, depths {}..{}", depths.iter().min().unwrap(), depths.iter().max().unwrap()))
}

fn heine_borel_extraction() -> Check {
    let mut r = rng(3);
    let mut unknown = 0;
    let mut ks = Vec::new();
    for i in 0..20 {
        let (cov, text) = random_open_cover(&mut r);
        let report = heine_borel_demo(&cov, 20, 16).map_err(|e| format!("spec {i}:\n{text}{e}"))?;
        ks.push(report.k);
        let g = heine_borel_gauge(&cov);
        for _ in 0..1000 {
            let p = rand_rational(&mut r, 4093);
            let k = r.gen_range(0..16u32);
            match check_star(&cov, &g, &p, k).map_err(err)? {
                Verdict::No => return Err(format!("spec {i}: (*) falsified at p = {}, k = {k}", fmt_rational(&p))),
                Verdict::Unknown => unknown += 1,
                Verdict::Yes => {}
            }
        }
    }
    let (lo, hi) = (ks.iter().min().unwrap(), ks.iter().max().unwrap());
    Ok(format!("20 specs, k in {lo}..{hi}, 20000 (*) checks, 0 no, {unknown} unknown"))
}

fn certificate(name: &str, eps: &Rational, depth: u32) -> Result<cousin::integral::IntegralCertificate, String> {
    let e = lookup(name).ok_or("missing catalog entry")?;
    let s = UnitSearch::new(depth, 16).with_hints(e.hints.clone());
    match integrate(&e.integrand, &e.family, eps, &s).map_err(err)? {
        IntegralOutcome::Certificate(c) => Ok(*c),
        IntegralOutcome::Obstruction(o) => Err(format!("{name} at ε = {}: obstruction at depth {}", fmt_rational(eps), o.depth_reached)),
    }
}

fn integral_values() -> Check {
    for k in 0..=10 {
        let eps = pow2(-k);
        let c = certificate("identity", &eps, 24)?;
        ensure(c.claim.contains(&ratio(1, 2)), || format!("identity k={k}: claim {}", c.claim))?;
    }
    let mut widest = Rational::from_integer(0.into());
    for k in 1..=10 {
        let eps = pow2(-k);
        let c = certificate("sqrt-reciprocal", &eps, 40)?;
        ensure(c.claim.contains(&int(2)), || format!("sqrt-reciprocal k={k}: claim misses 2"))?;
        ensure(c.claim.width() <= pow2(3 - k), || format!("sqrt-reciprocal k={k}: width {}", c.claim.width()))?;
        widest = widest.max(c.claim.width() / pow2(3 - k));
    }
    for k in 3..=8 {
        let eps = pow2(-k);
        let c = certificate("dirichlet", &eps, 14)?;
        ensure(c.sum.hi() <= &(&eps * int(4)), || format!("dirichlet k={k}: sum {}", c.sum))?;
    }
    Ok(format!("identity k ≤ 10, sqrt-reciprocal k ≤ 10 (worst width ratio {:.3}), dirichlet k = 3..8", cousin::numerics::rational::to_f64(&widest)))
}

fn baire_one_obstruction() -> Check {
    let zs = CauchySpec::default_gap();
    let mut widths = Vec::new();
    for depth in [12u32, 16, 20] {
        let o = gap_obstruction_demo(&zs, depth, 64).map_err(|e| match e {
            GalleryError::UnexpectedCover(m) => format!("depth {depth}: UNEXPECTED COVER {m}"),
            e => format!("depth {depth}: {e}"),
        })?;
        widths.push(format!("2^{}", -(o.regions[0].region.width().denom().bits() as i64 - 1)));
    }
    Ok(format!("single run around z* at depths 12/16/20, widths {}", widths.join("/")))
}

fn oracle_pinning() -> Check {
    let mut r = rng(6);
    for i in 0..10 {
        let z = rand_cantor(&mut r);
        let report = oracle_pin_demo(&OracleSpec { z: z.clone() }, 10, 16).map_err(|e| format!("Z = {z}: {e}"))?;
        ensure(report.pinned == Cylinder::of_point(&z, 10), || format!("Z {i}: pinned {}", report.pinned))?;
        let mut checked = 0;
        while checked < 500 {
            let x = rand_cantor(&mut r);
            if x == z {
                continue;
            }
            let f = pin_index(&z, &x, 64).ok_or("undecided pin")? as usize;
            ensure(!Cylinder::of_point(&x, f).contains(&z), || format!("Z = {z} lies in [{x}↾{f}]"))?;
            checked += 1;
        }
    }
    Ok("10 oracle points: phase (i) = [Z↾10], phase (ii) holds Z, 5000 exclusions".into())
}

fn transfer_coherence() -> Check {
    let mut r = rng(7);
    for i in 0..20 {
        let a = Affine::random(&mut r);
        let g = parse_gauge(&a.body(), Space::Unit, &()).map_err(err)?;
        let c = find_cover_cantor(&compose_phi(&g), &CantorSearch::new(16, 8))
            .map_err(err)?
            .cover()
            .ok_or_else(|| format!("unit gauge {i}: no Cantor cover"))?;
        let u = transfer_cover_phi(&c).map_err(err)?;
        yes(verify_cover(&g, &u, 8).map_err(err)?.verdict, || format!("φ-transfer of `{}`", a.body()))?;
    }
    for i in 0..10 {
        let text = if i % 2 == 0 {
            format!("const:{}", fmt_rational(&pow2(-r.gen_range(0..4))))
        } else {
            format!("{} + {}*x", fmt_rational(&ratio(r.gen_range(1..=4), 8)), fmt_rational(&ratio(r.gen_range(0..=4), 8)))
        };
        let g = parse_gauge(&text, Space::Cantor, &()).map_err(err)?;
        let h = transfer_gauge_psi(&g);
        let s = UnitSearch::new(18, 8).with_sampler(cantor_samples_unit);
        let u = find_cover_unit(&h, &s).map_err(err)?.cover().ok_or_else(|| format!("`{text}`: no unit cover"))?;
        let c = transfer_cover_psi(&u).map_err(err)?;
        yes(verify_cover(&g, &c, 8).map_err(err)?.verdict, || format!("ψ-transfer of `{text}`"))?;
    }
    Ok("20 φ-transfers and 10 ψ-transfers verified".into())
}

fn verdict_suites() -> Check {
    let mut r = rng(8);
    let trials = 10_000;
    for t in 0..trials {
        let case = GaugeCase::random(&mut r);
        let x = ratio(r.gen_range(0..=64), 64);
        let q = ratio(r.gen_range(1..=128), 256);
        let s1 = r.gen_range(0..24);
        let s2 = s1 + r.gen_range(1..24);
        check_permanence(&case, &x, &q, s1, s2).map_err(|e| format!("trial {t}: {e}"))?;
        check_soundness(&case, &x, s1, s2).map_err(|e| format!("trial {t}: {e}"))?;
    }
    Ok(format!("{trials} permanence + {trials} soundness trials, 0 violations"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("factor-2 round trip", factor_two_round_trip),
        ("continuous Cousin", continuous_cousin),
        ("Heine-Borel extraction", heine_borel_extraction),
        ("gauge integral values", integral_values),
        ("Baire-1 obstruction", baire_one_obstruction),
        ("oracle pinning", oracle_pinning),
        ("transfer coherence", transfer_coherence),
        ("verdict permanence and soundness", verdict_suites),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why}; {secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
