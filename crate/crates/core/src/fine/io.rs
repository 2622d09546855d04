//! CSV for partitions and covers, JSON for obstruction traces.

use serde_json::{json, Value};

use super::{Ball, CoverPoint, FineCover, Obstruction, RegionTrace, TaggedPartition};
use crate::numerics::rational::{dyadic_floor, fmt_rational, parse_rational, to_decimal};
use crate::numerics::{Interval, Quad, Rational};
use crate::spaces::{CantorPoint, Cylinder, UnitPoint};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("row {row}: {msg}")]
pub struct CsvError {
    pub row: usize,
    pub msg: String,
}

const TAG_PRECISION: u32 = 64;
const LOWER_BITS: u32 = 64;

fn unit_text(p: &UnitPoint) -> String {
    match p.exact() {
        Some(q) => q.render(),
        None => p.serialize(TAG_PRECISION),
    }
}

fn parse_unit(s: &str) -> Result<UnitPoint, String> {
    if let Some(q) = s.strip_prefix("quad:") {
        return Quad::parse(q).map(UnitPoint::Exact).map_err(|e| e.to_string());
    }
    UnitPoint::parse(s).map_err(|e| e.to_string())
}

pub fn parse_quad(s: &str) -> Result<Quad, String> {
    match parse_unit(s)? {
        UnitPoint::Exact(q) => Ok(q),
        UnitPoint::Approx(_) => Err(format!("cover point `{s}` must be exact")),
    }
}

pub fn partition_csv(t: &TaggedPartition, decimal: bool) -> String {
    let mut out = String::from(if decimal { "left,right,tag,left_dec,right_dec\n" } else { "left,right,tag\n" });
    for (a, b, tag) in t.cells() {
        out.push_str(&format!("{},{},{}", fmt_rational(a), fmt_rational(b), unit_text(tag)));
        if decimal {
            out.push_str(&format!(",{},{}", to_decimal(a, 12), to_decimal(b, 12)));
        }
        out.push('\n');
    }
    out
}

fn rows(text: &str, header: &str) -> Result<Vec<(usize, Vec<String>)>, CsvError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim().starts_with(header) => {}
        Some((i, _)) => return Err(CsvError { row: i + 1, msg: format!("expected header `{header}`") }),
        None => return Err(CsvError { row: 1, msg: "empty file".into() }),
    }
    Ok(lines
        .map(|(i, l)| (i + 1, l.split(',').map(|f| f.trim().to_string()).collect()))
        .collect())
}

pub fn parse_partition_csv(text: &str) -> Result<TaggedPartition, CsvError> {
    let mut cuts: Vec<Rational> = Vec::new();
    let mut tags = Vec::new();
    let mut last_row = 1;
    for (row, f) in rows(text, "left,right,tag")? {
        let err = |msg: String| CsvError { row, msg };
        if f.len() < 3 {
            return Err(err("expected left,right,tag".into()));
        }
        let a = parse_rational(&f[0]).map_err(|e| err(e.to_string()))?;
        let b = parse_rational(&f[1]).map_err(|e| err(e.to_string()))?;
        match cuts.last() {
            None => cuts.push(a),
            Some(prev) if *prev == a => {}
            Some(_) => return Err(err("cell does not start where the previous one ended".into())),
        }
        cuts.push(b);
        tags.push(parse_unit(&f[2]).map_err(err)?);
        last_row = row;
    }
    TaggedPartition::new(cuts, tags).map_err(|e| CsvError { row: last_row, msg: e.to_string() })
}

pub fn cover_csv<P: CoverPoint>(c: &FineCover<P>, decimal: bool) -> String {
    let mut out = String::from(if decimal { "point,radius,radius_dec\n" } else { "point,radius\n" });
    for b in &c.balls {
        out.push_str(&format!("{},{}", b.center.render(), fmt_rational(&b.radius)));
        if decimal {
            out.push_str(&format!(",{}", to_decimal(&b.radius, 12)));
        }
        out.push('\n');
    }
    out
}

/// A cover read back from CSV; the space follows from the point syntax.
#[derive(Clone, Debug)]
pub enum AnyCover {
    Unit(FineCover<Quad>),
    Cantor(FineCover<CantorPoint>),
}

pub fn parse_cover_csv(text: &str) -> Result<AnyCover, CsvError> {
    let rows = rows(text, "point,radius")?;
    let cantor = rows.first().is_some_and(|(_, f)| f[0].contains("period="));
    let mut unit = Vec::new();
    let mut cantor_balls = Vec::new();
    for (row, f) in rows {
        let err = |msg: String| CsvError { row, msg };
        if f.len() < 2 {
            return Err(err("expected point,radius".into()));
        }
        let radius = parse_rational(&f[1]).map_err(|e| err(e.to_string()))?;
        if cantor {
            let center = CantorPoint::parse(&f[0]).map_err(|e| err(e.to_string()))?;
            cantor_balls.push(Ball { center, radius });
        } else {
            unit.push(Ball { center: parse_quad(&f[0]).map_err(err)?, radius });
        }
    }
    Ok(if cantor { AnyCover::Cantor(FineCover::new(cantor_balls)) } else { AnyCover::Unit(FineCover::new(unit)) })
}

/// Display form of an obstruction region.
pub trait RegionText {
    fn text(&self) -> String;
}

impl RegionText for Interval {
    fn text(&self) -> String {
        super::search::render_interval(self)
    }
}

impl RegionText for Cylinder {
    fn text(&self) -> String {
        self.to_string()
    }
}

fn trace_json<R: RegionText>(r: &RegionTrace<R>) -> Value {
    let samples: Vec<Value> = r
        .samples
        .iter()
        .map(|s| {
            json!({
                "point": s.point,
                "verdict": s.verdict.to_string(),
                // rounded down to 64 bits, still a valid lower bound
                "lower": s.lower.as_ref().map(|l| fmt_rational(&dyadic_floor(l, LOWER_BITS))),
            })
        })
        .collect();
    json!({
        "region": r.region.text(),
        "last_verdict": r.last_verdict.to_string(),
        "stage": r.stage,
        "samples": samples,
    })
}

pub fn obstruction_json<R: RegionText>(o: &Obstruction<R>) -> Value {
    let regions: Vec<Value> = o.regions.iter().map(trace_json).collect();
    json!({ "depth_reached": o.depth_reached, "regions": regions })
}
