//! Instance text format and solve-report serialization.
//!
//! Instance files are line oriented, `#` starts a comment:
//!
//! ```text
//! scp 1
//! n 4
//! edge 1 2 1
//! edge 2 3 1
//! edge 3 4 1
//! request 1 2 1
//! request 3 4 1 2
//! ```
//!
//! Vertices are numbered from 1. Costs are nonnegative decimals; every cost
//! in a file is scaled to a common fixed-point integer. In reports, vertex,
//! edge and request ids are 1-based (edges and requests in file order, with
//! repeated requests folded into their first occurrence).

use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::circulation::{Instance, InstanceError, Request};
use crate::graph::{BaseGraph, Cost, GraphError};
use crate::homology_tour::{Step, StepKind, Tour};
use crate::solver::{Parameters, SolveReport, Timings};

pub const FORMAT_VERSION: &str = "1";
const MAX_DECIMALS: u32 = 9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    MissingHeader,
    UnsupportedVersion(String),
    UnknownDirective(String),
    Malformed(String),
    MissingVertexCount,
    DanglingEndpoint(usize),
    NegativeCost,
    SelfLoop,
    DuplicateEdge,
    BadDemand,
    ConflictingRequest,
    Disconnected,
}

impl ParseErrorKind {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Self::MissingHeader => "missing-header",
            Self::UnsupportedVersion(_) => "unsupported-version",
            Self::UnknownDirective(_) => "unknown-directive",
            Self::Malformed(_) => "malformed",
            Self::MissingVertexCount => "missing-vertex-count",
            Self::DanglingEndpoint(_) => "dangling-endpoint",
            Self::NegativeCost => "negative-cost",
            Self::SelfLoop => "self-loop",
            Self::DuplicateEdge => "duplicate-edge",
            Self::BadDemand => "bad-demand",
            Self::ConflictingRequest => "conflicting-request",
            Self::Disconnected => "disconnected",
        }
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MissingHeader => write!(f, "expected `scp {FORMAT_VERSION}` header"),
            Self::UnsupportedVersion(v) => write!(f, "unsupported format version {v}"),
            Self::UnknownDirective(d) => write!(f, "unknown directive `{d}`"),
            Self::Malformed(why) => write!(f, "malformed line: {why}"),
            Self::MissingVertexCount => write!(f, "`n` must precede edges and requests"),
            Self::DanglingEndpoint(v) => write!(f, "vertex {v} is outside 1..n"),
            Self::NegativeCost => write!(f, "negative cost"),
            Self::SelfLoop => write!(f, "edge joins a vertex to itself"),
            Self::DuplicateEdge => write!(f, "edge repeats an earlier edge"),
            Self::BadDemand => write!(f, "demand must be a positive integer"),
            Self::ConflictingRequest => write!(f, "repeated request with a different cost"),
            Self::Disconnected => write!(f, "graph not connected"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// 1-based line, when the problem belongs to one.
    pub line: Option<usize>,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {} [{}]", self.kind, self.kind.code()),
            None => write!(f, "{} [{}]", self.kind, self.kind.code()),
        }
    }
}

fn at(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError {
        line: Some(line),
        kind,
    }
}

/// A cost token split into integer and fractional digits.
struct RawCost {
    whole: u64,
    fraction: String,
}

fn parse_raw_cost(token: &str, line: usize) -> Result<RawCost, ParseError> {
    if token.starts_with('-') {
        return Err(at(line, ParseErrorKind::NegativeCost));
    }
    let bad = || at(line, ParseErrorKind::Malformed(format!("bad cost `{token}`")));
    let (whole, fraction) = token.split_once('.').unwrap_or((token, ""));
    if whole.is_empty() || !whole.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    if !fraction.bytes().all(|b| b.is_ascii_digit()) || fraction.len() > MAX_DECIMALS as usize {
        return Err(bad());
    }
    Ok(RawCost {
        whole: whole.parse().map_err(|_| bad())?,
        fraction: fraction.trim_end_matches('0').to_string(),
    })
}

fn scale_cost(raw: &RawCost, decimals: u32, line: usize) -> Result<Cost, ParseError> {
    let overflow = || at(line, ParseErrorKind::Malformed("cost too large".into()));
    let mut frac = raw.fraction.clone();
    while frac.len() < decimals as usize {
        frac.push('0');
    }
    let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| overflow())? };
    i64::try_from(raw.whole)
        .ok()
        .and_then(|w| w.checked_mul(10i64.pow(decimals)))
        .and_then(|w| w.checked_add(frac))
        .ok_or_else(overflow)
}

fn parse_vertex(token: &str, n: usize, line: usize) -> Result<usize, ParseError> {
    let v: usize = token
        .parse()
        .map_err(|_| at(line, ParseErrorKind::Malformed(format!("bad vertex `{token}`"))))?;
    if v == 0 || v > n {
        return Err(at(line, ParseErrorKind::DanglingEndpoint(v)));
    }
    Ok(v - 1)
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut header = false;
    let mut n: Option<usize> = None;
    let mut edges: Vec<(usize, usize, RawCost, usize)> = Vec::new();
    let mut requests: Vec<(usize, usize, RawCost, i64, usize)> = Vec::new();

    for (index, raw_line) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let arity = |lo: usize, hi: usize| {
            if (lo..=hi).contains(&(fields.len() - 1)) {
                Ok(())
            } else {
                Err(at(line, ParseErrorKind::Malformed(format!("`{}` takes {lo}..={hi} arguments", fields[0]))))
            }
        };
        if !header {
            if fields[0] != "scp" {
                return Err(at(line, ParseErrorKind::MissingHeader));
            }
            arity(1, 1)?;
            if fields[1] != FORMAT_VERSION {
                return Err(at(line, ParseErrorKind::UnsupportedVersion(fields[1].into())));
            }
            header = true;
            continue;
        }
        match fields[0] {
            "n" => {
                arity(1, 1)?;
                if n.is_some() {
                    return Err(at(line, ParseErrorKind::Malformed("`n` given twice".into())));
                }
                let count: usize = fields[1]
                    .parse()
                    .ok()
                    .filter(|&c| c > 0)
                    .ok_or_else(|| at(line, ParseErrorKind::Malformed("vertex count must be positive".into())))?;
                n = Some(count);
            }
            "edge" => {
                arity(3, 3)?;
                let n = n.ok_or_else(|| at(line, ParseErrorKind::MissingVertexCount))?;
                let u = parse_vertex(fields[1], n, line)?;
                let v = parse_vertex(fields[2], n, line)?;
                edges.push((u, v, parse_raw_cost(fields[3], line)?, line));
            }
            "request" => {
                arity(3, 4)?;
                let n = n.ok_or_else(|| at(line, ParseErrorKind::MissingVertexCount))?;
                let s = parse_vertex(fields[1], n, line)?;
                let t = parse_vertex(fields[2], n, line)?;
                let cost = parse_raw_cost(fields[3], line)?;
                let demand = match fields.get(4) {
                    None => 1,
                    Some(tok) => tok
                        .parse::<i64>()
                        .ok()
                        .filter(|&d| d > 0)
                        .ok_or_else(|| at(line, ParseErrorKind::BadDemand))?,
                };
                requests.push((s, t, cost, demand, line));
            }
            other => return Err(at(line, ParseErrorKind::UnknownDirective(other.into()))),
        }
    }
    if !header {
        return Err(ParseError {
            line: None,
            kind: ParseErrorKind::MissingHeader,
        });
    }
    let n = n.ok_or(ParseError {
        line: None,
        kind: ParseErrorKind::MissingVertexCount,
    })?;

    let decimals = edges
        .iter()
        .map(|e| &e.2)
        .chain(requests.iter().map(|r| &r.2))
        .map(|c| c.fraction.len() as u32)
        .max()
        .unwrap_or(0);
    let mut scaled_edges = Vec::with_capacity(edges.len());
    for (u, v, cost, line) in &edges {
        scaled_edges.push((*u, *v, scale_cost(cost, decimals, *line)?));
    }
    let graph = BaseGraph::new(n, scaled_edges).map_err(|e| match e {
        GraphError::SelfLoop(i) => at(edges[i].3, ParseErrorKind::SelfLoop),
        GraphError::ParallelEdge { edge, .. } => at(edges[edge].3, ParseErrorKind::DuplicateEdge),
        other => unreachable!("vertex range and cost sign are checked per line: {other}"),
    })?;
    if !graph.is_connected() {
        return Err(ParseError {
            line: None,
            kind: ParseErrorKind::Disconnected,
        });
    }
    let mut reqs = Vec::with_capacity(requests.len());
    for (s, t, cost, demand, line) in &requests {
        if s == t {
            return Err(at(*line, ParseErrorKind::Malformed("request starts and ends at the same vertex".into())));
        }
        reqs.push(Request::new(*s, *t, scale_cost(cost, decimals, *line)?).with_demand(*demand));
    }
    let mut instance = Instance::new(graph, reqs).map_err(|e| match e {
        InstanceError::ConflictingDuplicate { request, .. } => {
            at(requests[request].4, ParseErrorKind::ConflictingRequest)
        }
        other => unreachable!("request fields are checked per line: {other}"),
    })?;
    instance.cost_decimals = decimals;
    Ok(instance)
}

pub fn format_cost(cost: Cost, decimals: u32) -> String {
    if decimals == 0 {
        return cost.to_string();
    }
    let scale = 10i64.pow(decimals);
    let sign = if cost < 0 { "-" } else { "" };
    let abs = cost.abs();
    format!("{sign}{}.{:0width$}", abs / scale, abs % scale, width = decimals as usize)
}

/// Writes an instance in the text format. Merged requests are written once
/// with their total demand.
pub fn write_instance(instance: &Instance) -> String {
    let d = instance.cost_decimals;
    let graph = instance.graph();
    let mut out = format!("scp {FORMAT_VERSION}\nn {}\n", graph.vertex_count());
    for e in graph.edges() {
        out += &format!("edge {} {} {}\n", e.tail + 1, e.head + 1, format_cost(e.cost, d));
    }
    for r in instance.requests() {
        out += &format!("request {} {} {}", r.source + 1, r.target + 1, format_cost(r.cost, d));
        if r.demand != 1 {
            out += &format!(" {}", r.demand);
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

fn cost_value(cost: Cost, decimals: u32) -> Value {
    if decimals == 0 {
        json!(cost)
    } else {
        json!(cost as f64 / 10f64.powi(decimals as i32))
    }
}

pub fn report_to_json(report: &SolveReport) -> Value {
    let steps: Vec<Value> = report
        .tour
        .steps
        .iter()
        .map(|s| {
            json!({
                "kind": s.kind,
                "from": s.from + 1,
                "to": s.to + 1,
                "id": s.id + 1,
            })
        })
        .collect();
    let timings = report.timings.map(|t| {
        json!({
            "circulation": t.circulation,
            "enumeration": t.enumeration,
            "tours": t.tours,
        })
    });
    json!({
        "cost": cost_value(report.cost, report.cost_decimals),
        "cost_decimals": report.cost_decimals,
        "parameters": report.parameters,
        "candidates_evaluated": report.candidates_evaluated,
        "winning_lambda": report.winning_lambda,
        "steps": steps,
        "timings_ms": timings,
    })
}

pub fn emit_report(report: &SolveReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report_to_json(report)).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Text => {
            let p = report.parameters;
            let mut out = format!(
                "cost {}\nparameters n={} m={} p={} r={} k={}\ncandidates {}\nlambda {:?}\n",
                format_cost(report.cost, report.cost_decimals),
                p.n,
                p.m,
                p.p,
                p.r,
                p.k,
                report.candidates_evaluated,
                report.winning_lambda,
            );
            if let Some(t) = report.timings {
                out += &format!(
                    "timings_ms circulation={:.3} enumeration={:.3} tours={:.3}\n",
                    t.circulation, t.enumeration, t.tours
                );
            }
            out += &format!("tour {} steps\n", report.tour.steps.len());
            for s in &report.tour.steps {
                let kind = match s.kind {
                    StepKind::Request => "request",
                    StepKind::Edge => "edge",
                };
                out += &format!("  {kind:<7} {:>3}: {} -> {}\n", s.id + 1, s.from + 1, s.to + 1);
            }
            out
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid report: {0}")]
pub struct ReportError(pub String);

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, ReportError> {
    v.get(key).ok_or_else(|| ReportError(format!("missing `{key}`")))
}

fn as_u64(v: &Value, key: &str) -> Result<u64, ReportError> {
    field(v, key)?
        .as_u64()
        .ok_or_else(|| ReportError(format!("`{key}` is not a nonnegative integer")))
}

fn index_1based(v: &Value, key: &str) -> Result<usize, ReportError> {
    match as_u64(v, key)? {
        0 => Err(ReportError(format!("`{key}` must be at least 1"))),
        x => Ok(x as usize - 1),
    }
}

/// Reads a JSON report back. Inverse of [`emit_report`] in JSON mode.
pub fn parse_report(text: &str) -> Result<SolveReport, ReportError> {
    let v: Value = serde_json::from_str(text).map_err(|e| ReportError(e.to_string()))?;
    let decimals = as_u64(&v, "cost_decimals")? as u32;
    let cost_field = field(&v, "cost")?;
    let cost = if decimals == 0 {
        cost_field.as_i64()
    } else {
        cost_field.as_f64().map(|c| (c * 10f64.powi(decimals as i32)).round() as i64)
    }
    .ok_or_else(|| ReportError("`cost` is not a number".into()))?;
    let parameters: Parameters = serde_json::from_value(field(&v, "parameters")?.clone())
        .map_err(|e| ReportError(format!("parameters: {e}")))?;
    let winning_lambda: Vec<i64> = serde_json::from_value(field(&v, "winning_lambda")?.clone())
        .map_err(|e| ReportError(format!("winning_lambda: {e}")))?;
    let timings: Option<Timings> = serde_json::from_value(field(&v, "timings_ms")?.clone())
        .map_err(|e| ReportError(format!("timings_ms: {e}")))?;
    let steps = field(&v, "steps")?
        .as_array()
        .ok_or_else(|| ReportError("`steps` is not an array".into()))?
        .iter()
        .map(|s| {
            let kind: StepKind = serde_json::from_value(field(s, "kind")?.clone())
                .map_err(|e| ReportError(format!("step kind: {e}")))?;
            Ok(Step {
                kind,
                id: index_1based(s, "id")?,
                from: index_1based(s, "from")?,
                to: index_1based(s, "to")?,
            })
        })
        .collect::<Result<Vec<_>, ReportError>>()?;
    Ok(SolveReport {
        tour: Tour { steps, cost },
        cost,
        cost_decimals: decimals,
        parameters,
        candidates_evaluated: as_u64(&v, "candidates_evaluated")?,
        winning_lambda,
        timings,
    })
}
