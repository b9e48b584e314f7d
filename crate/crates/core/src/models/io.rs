//! Text formats for graphs, partitions and model specifications.
//!
//! Graph files start with a header `n=<int> alphabet=<01|pm1>` followed by one
//! line `i j v` per nonzero upper-triangle entry (0-indexed). Partition files
//! hold one label per line, `0` marking an outlier.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::graph::{Alphabet, Graph};
use super::partition::Partition;
use super::spec::ModelSpec;
use crate::error::{Error, Result};

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("n={} alphabet={}\n", g.n(), g.alphabet().tag());
    for (i, j, v) in g.upper_nonzeros() {
        writeln!(out, "{i} {j} {v}").unwrap();
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty graph file".into()))?;
    let mut n = None;
    let mut alphabet = None;
    for tok in header.split_whitespace() {
        match tok.split_once('=') {
            Some(("n", v)) => n = Some(v.parse::<usize>().map_err(|e| Error::Parse(format!("bad n: {e}")))?),
            Some(("alphabet", "01")) => alphabet = Some(Alphabet::ZeroOne),
            Some(("alphabet", "pm1")) => alphabet = Some(Alphabet::PlusMinusOne),
            _ => return Err(Error::Parse(format!("unrecognized header token '{tok}'"))),
        }
    }
    let (n, alphabet) = match (n, alphabet) {
        (Some(n), Some(a)) => (n, a),
        _ => return Err(Error::Parse("header must define n= and alphabet=".into())),
    };
    let mut g = Graph::empty(n, alphabet);
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("line {}: expected 'i j v'", lineno + 2)));
        }
        let parse_idx = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)));
        let i = parse_idx(fields[0])?;
        let j = parse_idx(fields[1])?;
        let v = fields[2].parse::<i8>().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?;
        if i >= j {
            return Err(Error::Parse(format!("line {}: entries must be upper-triangle (i < j)", lineno + 2)));
        }
        g.set(i, j, v)?;
    }
    Ok(g)
}

pub fn write_partition(p: &Partition) -> String {
    let mut out = String::with_capacity(p.n() * 2);
    for l in p.labels() {
        writeln!(out, "{l}").unwrap();
    }
    out
}

pub fn parse_partition(text: &str) -> Result<Partition> {
    let labels = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| l.parse::<usize>().map_err(|e| Error::Parse(format!("bad label '{l}': {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Partition::from_labels(labels))
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn read_partition(path: impl AsRef<Path>) -> Result<Partition> {
    parse_partition(&fs::read_to_string(path)?)
}

pub fn read_spec(path: impl AsRef<Path>) -> Result<ModelSpec> {
    let spec: ModelSpec = serde_json::from_str(&fs::read_to_string(path)?)?;
    spec.validated()
}
