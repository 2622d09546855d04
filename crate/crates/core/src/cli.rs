//! The `cousin` command line.
//!
//! Exit codes: 0 success, 1 bad input, 2 unknown or obstruction, 3 verified
//! failure, 4 a demo construction was falsified.

use std::fs;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::fine::io::{
    cover_csv, obstruction_json, parse_cover_csv, parse_partition_csv, parse_quad, partition_csv, AnyCover,
};
use crate::fine::{
    cover_to_partition, find_cover_cantor, find_cover_unit, verify_cover, verify_partition, CantorSearch,
    SearchResult, UnitSearch,
};
use crate::gallery::{
    cauchy_gap_gauge, gap_obstruction_demo, heine_borel_demo, heine_borel_gauge, oracle_pin_demo,
    oracle_pin_gauge, parse_cover_file, CauchySpec, GalleryError, OracleSpec, TWO_COV,
};
use crate::gauges::{parse_gauge, Baire1Code, Builtins, GaugeCode, Region, Space, Verdict};
use crate::integral::{integrate, lookup, IntegralOutcome};
use crate::numerics::rational::{fmt_rational, parse_rational, pow2, ratio};
use crate::spaces::{bits_str, parse_bits, CantorPoint};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SPEC: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_FAILED: i32 = 3;
pub const EXIT_FALSIFIED: i32 = 4;

pub const STAGE_ENV: &str = "COUSIN_GAUGE_STAGE_DEFAULT";
const STAGE_DEFAULT: u32 = 64;

#[derive(Parser, Debug)]
#[command(name = "cousin", version, about = "Gauge covers, tagged partitions and gauge integrals with exact arithmetic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify an enclosure of a built-in integral.
    Integrate(IntegrateArgs),
    /// Search a δ-fine cover for a gauge.
    Cousin(CousinArgs),
    /// Check a cover or partition CSV against a gauge.
    Verify(VerifyArgs),
    /// Run one of the demonstrations.
    Gallery(GalleryArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Gauge stage (default 64, or $COUSIN_GAUGE_STAGE_DEFAULT).
    #[arg(long)]
    stage: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    output: Option<String>,
    /// Add display-only decimal columns.
    #[arg(long)]
    decimal: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SpaceArg {
    Unit,
    Cantor,
}

#[derive(Args, Debug)]
struct GaugeSource {
    /// Compiled-in gauge: cauchy-gap, baire1-drift, oracle-pin:BITS, heine-borel.
    #[arg(long)]
    preset: Option<String>,
    /// Gauge spec text, or a file containing it.
    #[arg(long)]
    gauge: Option<String>,
    #[arg(long, value_enum)]
    space: Option<SpaceArg>,
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    /// identity, square, sqrt-reciprocal, dirichlet or step.
    #[arg(long)]
    preset: String,
    #[arg(long)]
    epsilon: String,
    #[arg(long, default_value_t = 32)]
    depth: u32,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct CousinArgs {
    #[command(flatten)]
    source: GaugeSource,
    #[arg(long, default_value_t = 16)]
    depth: u32,
    /// Extra sample; `Z` names the oracle point of oracle-pin.
    #[arg(long)]
    hint: Vec<String>,
    /// Emit the tagged partition instead (searched with half the gauge).
    #[arg(long)]
    as_partition: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Cover (`point,radius`) or partition (`left,right,tag`) CSV.
    artifact: String,
    #[command(flatten)]
    source: GaugeSource,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct GalleryArgs {
    #[arg(value_enum)]
    demo: Demo,
    /// Cover file for heine-borel (`two.cov` is compiled in).
    #[arg(long)]
    cover: Option<String>,
    /// Period of the oracle point for oracle-pin.
    #[arg(long, default_value = "0101")]
    bits: String,
    #[arg(long)]
    depth: Option<u32>,
    #[command(flatten)]
    common: Common,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Demo {
    HeineBorel,
    CauchyGap,
    OraclePin,
}

struct Failure {
    code: i32,
    msg: String,
}

impl Failure {
    fn spec(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_SPEC, msg: msg.into() }
    }
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::spec(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_SPEC } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Integrate(a) => cmd_integrate(a),
        Command::Cousin(a) => cmd_cousin(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gallery(a) => cmd_gallery(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    }
}

fn stage(c: &Common) -> Result<u32, Failure> {
    let s = match c.stage {
        Some(s) => s,
        None => match std::env::var(STAGE_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| Failure::spec(format!("{STAGE_ENV}=`{v}` is not a natural")))?,
            Err(_) => STAGE_DEFAULT,
        },
    };
    if s == 0 {
        return Err(Failure::spec("stage must be at least 1"));
    }
    Ok(s)
}

fn emit(c: &Common, text: &str) -> Result<(), Failure> {
    match &c.output {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn check_depth(d: u32) -> Result<(), Failure> {
    if d == 0 {
        return Err(Failure::spec("depth must be at least 1"));
    }
    Ok(())
}

fn cmd_integrate(a: IntegrateArgs) -> Outcome {
    check_depth(a.depth)?;
    let stage = stage(&a.common)?;
    let entry = lookup(&a.preset).ok_or_else(|| Failure::spec(format!("unknown integrand `{}`", a.preset)))?;
    let eps = parse_rational(&a.epsilon)?;
    let search = UnitSearch::new(a.depth, stage).with_hints(entry.hints.clone());
    match integrate(&entry.integrand, &entry.family, &eps, &search)? {
        IntegralOutcome::Certificate(c) => {
            let text = match a.common.format {
                Format::Json => {
                    let mut v = c.to_json();
                    v["gauge"] = json!(entry.gauge_id);
                    v["reference"] = json!(fmt_rational(&entry.reference));
                    pretty(&v)
                }
                Format::Csv => partition_csv(&c.partition, a.common.decimal),
            };
            emit(&a.common, &text)?;
            eprintln!("claim [{}, {}] over {} cells", fmt_rational(c.claim.lo()), fmt_rational(c.claim.hi()), c.partition.len());
            Ok(EXIT_OK)
        }
        IntegralOutcome::Obstruction(o) => {
            emit(&a.common, &pretty(&obstruction_json(&o)))?;
            eprintln!("no cover within depth {}", a.depth);
            Ok(EXIT_UNKNOWN)
        }
    }
}

/// 1/4 + x/2 + 2^-n with modulus j + 1.
fn baire1_drift() -> GaugeCode {
    let code = Baire1Code::new(Space::Unit, |n, r, _| match r {
        Region::Unit(i) => Ok(i.scale(&ratio(1, 2)).shift(&(ratio(1, 4) + pow2(-(n.min(1 << 20) as i64))))),
        Region::Cantor(_) => Err(crate::gauges::GaugeError::Domain("unit gauge".into())),
    });
    GaugeCode::Baire1(code.with_modulus(|j| j as u64 + 1))
}

fn oracle_point(bits: &str) -> Result<CantorPoint, Failure> {
    let period = parse_bits(bits).filter(|b| !b.is_empty()).ok_or_else(|| Failure::spec(format!("bad bits `{bits}`")))?;
    Ok(CantorPoint::periodic(Vec::new(), period)?)
}

fn read_cover_spec(arg: &str) -> Result<crate::gallery::OpenCoverSpec, Failure> {
    let text = if Path::new(arg).exists() {
        fs::read_to_string(arg)?
    } else if Path::new(arg).file_name().is_some_and(|f| f == "two.cov") {
        TWO_COV.to_string()
    } else {
        return Err(Failure::spec(format!("cover file `{arg}` not found")));
    };
    parse_cover_file(&text).map_err(|e| Failure::spec(format!("{arg}: {e}")))
}

struct CliBuiltins;

impl Builtins for CliBuiltins {
    fn resolve(&self, name: &str, arg: &str) -> Option<Result<GaugeCode, String>> {
        Some(match name {
            "heine-borel" => read_cover_spec(arg)
                .map(|c| GaugeCode::Continuous(heine_borel_gauge(&c)))
                .map_err(|f| f.msg),
            "cauchy-gap" => Ok(GaugeCode::Baire1(cauchy_gap_gauge(&CauchySpec::default_gap()))),
            "oracle-pin" => oracle_point(arg)
                .map(|z| GaugeCode::Direct(oracle_pin_gauge(&OracleSpec { z })))
                .map_err(|f| f.msg),
            _ => return None,
        })
    }
}

/// The gauge, its space, and the oracle point when the preset has one.
fn resolve_gauge(src: &GaugeSource) -> Result<(GaugeCode, Option<CantorPoint>), Failure> {
    let want = src.space.map(|s| match s {
        SpaceArg::Unit => Space::Unit,
        SpaceArg::Cantor => Space::Cantor,
    });
    let (g, z) = match (&src.preset, &src.gauge) {
        (Some(_), Some(_)) => return Err(Failure::spec("--preset and --gauge are exclusive")),
        (None, None) => return Err(Failure::spec("one of --preset or --gauge is required")),
        (Some(p), None) => match p.as_str() {
            "cauchy-gap" => (GaugeCode::Baire1(cauchy_gap_gauge(&CauchySpec::default_gap())), None),
            "baire1-drift" => (baire1_drift(), None),
            "heine-borel" => (GaugeCode::Continuous(heine_borel_gauge(&read_cover_spec("two.cov")?)), None),
            other => match other.strip_prefix("oracle-pin:") {
                Some(bits) => {
                    let z = oracle_point(bits)?;
                    (GaugeCode::Direct(oracle_pin_gauge(&OracleSpec { z: z.clone() })), Some(z))
                }
                None => return Err(Failure::spec(format!("unknown preset `{other}`"))),
            },
        },
        (None, Some(text)) => {
            let text = if Path::new(text).is_file() { fs::read_to_string(text)? } else { text.clone() };
            let g = parse_gauge(&text, want.unwrap_or(Space::Unit), &CliBuiltins).map_err(|e| Failure::spec(format!("gauge spec, {e}")))?;
            (g, None)
        }
    };
    if let Some(w) = want {
        if w != g.space() {
            return Err(Failure::spec(format!("gauge lives on {}, not {w}", g.space())));
        }
    }
    Ok((g, z))
}

fn cmd_cousin(a: CousinArgs) -> Outcome {
    check_depth(a.depth)?;
    let stage = stage(&a.common)?;
    let (g, z) = resolve_gauge(&a.source)?;
    let wants_z = a.hint.iter().any(|h| h == "Z");
    let others: Vec<&String> = a.hint.iter().filter(|h| *h != "Z").collect();
    match g.space() {
        Space::Unit => {
            if wants_z {
                return Err(Failure::spec("hint Z needs an oracle-pin preset"));
            }
            let hints = others.iter().map(|h| parse_quad(h).map_err(Failure::spec)).collect::<Result<Vec<_>, _>>()?;
            let search = UnitSearch::new(a.depth, stage).with_hints(hints);
            let g = if a.as_partition { g.scaled(ratio(1, 2)) } else { g };
            match find_cover_unit(&g, &search)? {
                SearchResult::Cover(c) => {
                    let text = if a.as_partition {
                        partition_csv(&cover_to_partition(&c)?, a.common.decimal)
                    } else {
                        cover_csv(&c, a.common.decimal)
                    };
                    emit(&a.common, &text)?;
                    eprintln!("cover with {} balls", c.len());
                    Ok(EXIT_OK)
                }
                SearchResult::Obstruction(o) => {
                    emit(&a.common, &pretty(&obstruction_json(&o)))?;
                    eprintln!("{} unresolved runs at depth {}", o.regions.len(), o.depth_reached);
                    Ok(EXIT_UNKNOWN)
                }
            }
        }
        Space::Cantor => {
            if a.as_partition {
                return Err(Failure::spec("--as-partition applies to the unit interval"));
            }
            let mut hints = others
                .iter()
                .map(|h| cantor_hint(h))
                .collect::<Result<Vec<_>, _>>()?;
            let mut search = CantorSearch::new(a.depth, stage);
            match (&z, wants_z) {
                (Some(z), true) => hints.push(z.clone()),
                (Some(z), false) => search = search.hiding(z.clone()),
                (None, true) => return Err(Failure::spec("hint Z needs an oracle-pin preset")),
                (None, false) => {}
            }
            match find_cover_cantor(&g, &search.with_hints(hints))? {
                SearchResult::Cover(c) => {
                    emit(&a.common, &cover_csv(&c, a.common.decimal))?;
                    eprintln!("cover with {} cylinders", c.len());
                    Ok(EXIT_OK)
                }
                SearchResult::Obstruction(o) => {
                    emit(&a.common, &pretty(&obstruction_json(&o)))?;
                    eprintln!("{} unresolved cylinders at depth {}", o.regions.len(), o.depth_reached);
                    Ok(EXIT_UNKNOWN)
                }
            }
        }
    }
}

fn cantor_hint(h: &str) -> Result<CantorPoint, Failure> {
    CantorPoint::parse(h).map_err(|e| Failure::spec(format!("hint `{h}`: {e}")))
}

fn verdict_exit(v: Verdict) -> i32 {
    match v {
        Verdict::Yes => EXIT_OK,
        Verdict::Unknown => EXIT_UNKNOWN,
        Verdict::No => EXIT_FAILED,
    }
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let stage = stage(&a.common)?;
    let text = fs::read_to_string(&a.artifact).map_err(|e| Failure::spec(format!("{}: {e}", a.artifact)))?;
    let (g, _) = resolve_gauge(&a.source)?;
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let cite = |e: crate::fine::io::CsvError| Failure::spec(format!("{}: {e}", a.artifact));
    let record = if first.trim_start().starts_with("left,") {
        let t = parse_partition_csv(&text).map_err(cite)?;
        let r = verify_partition(&g, &t, stage)?;
        json!({
            "kind": "partition",
            "verdict": r.verdict.to_string(),
            "cells": t.len(),
            "failing": r.failing,
            "undecided": r.undecided,
            "stage": stage,
        })
    } else {
        let (r, n) = match parse_cover_csv(&text).map_err(cite)? {
            AnyCover::Unit(c) => (verify_cover(&g, &c, stage)?, c.len()),
            AnyCover::Cantor(c) => (verify_cover(&g, &c, stage)?, c.len()),
        };
        json!({
            "kind": "cover",
            "verdict": r.verdict.to_string(),
            "balls": n,
            "witness": r.witness,
            "failing": r.failing,
            "undecided": r.undecided,
            "stage": stage,
        })
    };
    let verdict = record["verdict"].as_str().unwrap_or("unknown").to_string();
    emit(&a.common, &pretty(&record))?;
    Ok(verdict_exit(match verdict.as_str() {
        "yes" => Verdict::Yes,
        "no" => Verdict::No,
        _ => Verdict::Unknown,
    }))
}

fn gallery_exit(e: GalleryError) -> Failure {
    let code = match e {
        GalleryError::UnexpectedCover(_) => EXIT_FALSIFIED,
        GalleryError::Postcondition(_) => EXIT_FAILED,
        _ => EXIT_SPEC,
    };
    Failure { code, msg: e.to_string() }
}

fn cmd_gallery(a: GalleryArgs) -> Outcome {
    let stage = stage(&a.common)?;
    let report = match a.demo {
        Demo::HeineBorel => {
            let path = a.cover.clone().unwrap_or_else(|| "two.cov".into());
            let cov = read_cover_spec(&path)?;
            let depth = a.depth.unwrap_or(16);
            check_depth(depth)?;
            let r = heine_borel_demo(&cov, depth, stage).map_err(gallery_exit)?;
            json!({
                "demo": "heine-borel",
                "cover_file": path,
                "balls": r.cover.len(),
                "k": r.k,
                "subcover": cov.prefix(r.k).map_err(gallery_exit)?.iter()
                    .map(|u| format!("({}, {})", fmt_rational(&u.lo), fmt_rational(&u.hi)))
                    .collect::<Vec<_>>(),
                "union_covers_unit": true,
            })
        }
        Demo::CauchyGap => {
            let depth = a.depth.unwrap_or(20);
            check_depth(depth)?;
            let zs = CauchySpec::default_gap();
            let o = gap_obstruction_demo(&zs, depth, stage).map_err(gallery_exit)?;
            let run = &o.regions[0].region;
            json!({
                "demo": "cauchy-gap",
                "depth": depth,
                "run_lo": fmt_rational(run.lo()),
                "run_hi": fmt_rational(run.hi()),
                "run_width": fmt_rational(&run.width()),
                "width_bound": fmt_rational(&pow2(2 - depth as i64)),
                "contains_limit": true,
                "obstruction": obstruction_json(&o),
            })
        }
        Demo::OraclePin => {
            let depth = a.depth.unwrap_or(10);
            check_depth(depth)?;
            let z = oracle_point(&a.bits)?;
            let r = oracle_pin_demo(&OracleSpec { z: z.clone() }, depth, stage).map_err(gallery_exit)?;
            json!({
                "demo": "oracle-pin",
                "z": z.to_string(),
                "depth": depth,
                "phase1_pinned": bits_str(r.pinned.bits()),
                "phase1_search_depth": r.phase1_depth,
                "phase2_cover_size": r.cover.len(),
                "phase2_contains_z": r.cover.points().any(|p| p == &z),
            })
        }
    };
    emit(&a.common, &pretty(&report))?;
    Ok(EXIT_OK)
}
