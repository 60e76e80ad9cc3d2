//! Reading graphs and finite metrics from files.
//!
//! Three formats are understood:
//!
//! * weighted graph JSON:
//!   `{"type": "weighted_graph", "vertices": [...], "edges": [["u", "v", "7/3"], ...]}`
//! * edge lists: one `u v w` per line, `#` starts a comment,
//! * finite metric JSON:
//!   `{"type": "finite_metric", "points": [...], "distances": [[...], ...]}`.
//!
//! Weights and distances may be integers, rational strings (`"7/3"`) or
//! decimals. A finite metric containing a non-integer JSON number is read in
//! float mode.

use std::collections::HashMap;
use std::path::Path;

use serde_json::Value;

use crate::dist::Dist;
use crate::error::{Error, ParseError, Result};
use crate::metric_graph::{induced_metric, WeightedGraph};
use crate::space::DEFAULT_LEVEL_TOLERANCE;
use crate::zoo::{FiniteMetric, ZooSpace};

/// Parsed content of a space file.
#[derive(Clone, Debug)]
pub enum SpaceFile {
    Graph(WeightedGraph),
    Finite(FiniteMetric),
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Parse(ParseError::Format(msg.into()))
}

fn number(v: &Value, floaty: &mut bool) -> Result<Dist> {
    match v {
        Value::String(s) => Ok(s.parse()?),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Dist::from_int(i))
            } else {
                *floaty = true;
                let f = n.as_f64().ok_or_else(|| format_err(format!("unsupported number {n}")))?;
                Dist::from_f64(f).ok_or_else(|| format_err(format!("unsupported number {n}")))
            }
        }
        other => Err(format_err(format!("expected a number, found {other}"))),
    }
}

fn name_of(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(format_err(format!("expected a vertex name, found {other}"))),
    }
}

fn graph_from_json(obj: &serde_json::Map<String, Value>) -> Result<WeightedGraph> {
    let edges = obj
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| format_err("weighted_graph needs an `edges` array"))?;
    let mut parsed = Vec::with_capacity(edges.len());
    let mut ignored = false;
    for (i, e) in edges.iter().enumerate() {
        let triple = e
            .as_array()
            .filter(|a| a.len() == 3)
            .ok_or_else(|| format_err(format!("edge {i} must be [u, v, weight]")))?;
        parsed.push((name_of(&triple[0])?, name_of(&triple[1])?, number(&triple[2], &mut ignored)?));
    }
    let vertices = match obj.get("vertices") {
        Some(Value::Array(vs)) => vs.iter().map(name_of).collect::<Result<Vec<_>>>()?,
        Some(_) => return Err(format_err("`vertices` must be an array")),
        None => first_appearance(&parsed),
    };
    WeightedGraph::new(vertices, parsed)
}

fn first_appearance(edges: &[(String, String, Dist)]) -> Vec<String> {
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for (u, v, _) in edges {
        for x in [u, v] {
            if seen.insert(x.clone(), ()).is_none() {
                out.push(x.clone());
            }
        }
    }
    out
}

fn finite_from_json(obj: &serde_json::Map<String, Value>) -> Result<FiniteMetric> {
    let rows = obj
        .get("distances")
        .and_then(Value::as_array)
        .ok_or_else(|| format_err("finite_metric needs a `distances` matrix"))?;
    let mut floaty = false;
    let matrix = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| format_err("each distance row must be an array"))?
                .iter()
                .map(|x| number(x, &mut floaty))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let names = match obj.get("points") {
        Some(Value::Array(ps)) => ps.iter().map(name_of).collect::<Result<Vec<_>>>()?,
        Some(_) => return Err(format_err("`points` must be an array")),
        None => (0..matrix.len()).map(|i| i.to_string()).collect(),
    };
    if floaty {
        let tol = obj.get("level_tolerance").and_then(Value::as_f64).unwrap_or(DEFAULT_LEVEL_TOLERANCE);
        let floats: Vec<Vec<f64>> = matrix.iter().map(|r| r.iter().map(Dist::to_f64).collect()).collect();
        FiniteMetric::from_float_matrix(names, &floats, tol)
    } else {
        FiniteMetric::from_exact(names, matrix)
    }
}

/// Parses JSON in either the graph or the finite metric format.
pub fn parse_json(text: &str) -> Result<SpaceFile> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(ParseError::Json(e.to_string())))?;
    let obj = value.as_object().ok_or_else(|| format_err("top level must be an object"))?;
    match obj.get("type").and_then(Value::as_str) {
        Some("weighted_graph") => Ok(SpaceFile::Graph(graph_from_json(obj)?)),
        Some("finite_metric") => Ok(SpaceFile::Finite(finite_from_json(obj)?)),
        Some(other) => Err(format_err(format!("unknown type `{other}`"))),
        None if obj.contains_key("distances") => Ok(SpaceFile::Finite(finite_from_json(obj)?)),
        None if obj.contains_key("edges") => Ok(SpaceFile::Graph(graph_from_json(obj)?)),
        None => Err(format_err("cannot tell the format: no `type`, `edges` or `distances`")),
    }
}

/// Parses an edge list, one `u v w` per line.
pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse(ParseError::Line { line: i + 1, message });
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(format!("expected `u v w`, found {} fields", fields.len())));
        }
        let w: Dist = fields[2].parse().map_err(|e| err(format!("bad weight: {e}")))?;
        edges.push((fields[0].to_string(), fields[1].to_string(), w));
    }
    if edges.is_empty() {
        return Err(format_err("edge list is empty"));
    }
    WeightedGraph::new(first_appearance(&edges), edges)
}

/// Parses file content, choosing the format by its first character.
pub fn parse_space_text(text: &str) -> Result<SpaceFile> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        Ok(SpaceFile::Graph(parse_edge_list(text)?))
    }
}

pub fn read_space_file(path: &Path) -> Result<SpaceFile> {
    parse_space_text(&std::fs::read_to_string(path)?)
}

/// Reads a weighted graph without validating the compatibility conditions.
pub fn load_graph(path: &Path) -> Result<WeightedGraph> {
    match read_space_file(path)? {
        SpaceFile::Graph(g) => Ok(g),
        SpaceFile::Finite(_) => Err(format_err("expected a weighted graph, found a finite metric")),
    }
}

/// Reads a space: graphs must satisfy both compatibility conditions.
pub fn load_space(path: &Path) -> Result<ZooSpace> {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("file").to_string();
    Ok(match read_space_file(path)? {
        SpaceFile::Graph(g) => ZooSpace::Graph(induced_metric(&g)?.with_name(stem)),
        SpaceFile::Finite(m) => ZooSpace::Finite(m.with_name(stem)),
    })
}
