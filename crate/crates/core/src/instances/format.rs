//! The `p mids` format: DIMACS edge lines plus `m i` mark lines.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{MarkedGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("vertex {vertex} is absent; the format numbers every vertex 1..n")]
    AbsentVertex { vertex: Vertex },
}

fn parse_error(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

pub fn read_graph(text: &str) -> Result<MarkedGraph, FormatError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    let mut edge_lines: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    let mut marked: Vec<Vertex> = Vec::new();
    let mut mark_lines: HashMap<Vertex, usize> = HashMap::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let mut tokens = raw.split_whitespace();
        let Some(kind) = tokens.next() else { continue };
        let rest: Vec<&str> = tokens.collect();
        match kind {
            "c" => {}
            "p" => {
                if header.is_some() {
                    return Err(parse_error(line, "second header"));
                }
                let [format, n, m] = rest[..] else {
                    return Err(parse_error(line, "header must be `p mids <n> <m>`"));
                };
                if format != "mids" {
                    return Err(parse_error(line, format!("unknown format `{format}`")));
                }
                let n = parse_count(line, n)?;
                let m = parse_count(line, m)?;
                header = Some((n, m));
            }
            "e" | "m" => {
                let Some((n, _)) = header else {
                    return Err(parse_error(
                        line,
                        format!("`{kind}` line before the header"),
                    ));
                };
                let vertex = |tok: &str| -> Result<Vertex, FormatError> {
                    let x = parse_count(line, tok)?;
                    if x == 0 || x > n {
                        return Err(parse_error(line, format!("vertex {x} outside 1..{n}")));
                    }
                    Ok(x - 1)
                };
                if kind == "e" {
                    let [a, b] = rest[..] else {
                        return Err(parse_error(line, "edge line must be `e <i> <j>`"));
                    };
                    let (a, b) = (vertex(a)?, vertex(b)?);
                    if a == b {
                        return Err(parse_error(line, format!("self-loop on vertex {}", a + 1)));
                    }
                    let key = (a.min(b), a.max(b));
                    if let Some(first) = edge_lines.insert(key, line) {
                        return Err(parse_error(
                            line,
                            format!(
                                "duplicate edge {} {} (first on line {first})",
                                key.0 + 1,
                                key.1 + 1
                            ),
                        ));
                    }
                    edges.push(key);
                } else {
                    let [v] = rest[..] else {
                        return Err(parse_error(line, "mark line must be `m <i>`"));
                    };
                    let v = vertex(v)?;
                    if let Some(first) = mark_lines.insert(v, line) {
                        return Err(parse_error(
                            line,
                            format!("vertex {} marked twice (first on line {first})", v + 1),
                        ));
                    }
                    marked.push(v);
                }
            }
            other => return Err(parse_error(line, format!("unknown line type `{other}`"))),
        }
    }

    let Some((n, m)) = header else {
        return Err(parse_error(last_line.max(1), "missing `p mids` header"));
    };
    if edges.len() != m {
        return Err(parse_error(
            last_line.max(1),
            format!("header announces {m} edges, found {}", edges.len()),
        ));
    }
    for &(a, b) in &edges {
        if mark_lines.contains_key(&a) && mark_lines.contains_key(&b) {
            return Err(parse_error(
                edge_lines[&(a, b)],
                format!("edge {} {} joins two marked vertices", a + 1, b + 1),
            ));
        }
    }
    MarkedGraph::new(n, marked, edges).map_err(|e| parse_error(last_line, e.to_string()))
}

fn parse_count(line: usize, tok: &str) -> Result<usize, FormatError> {
    tok.parse()
        .map_err(|_| parse_error(line, format!("`{tok}` is not a non-negative integer")))
}

/// Canonical text: header, edges `i < j` in lexicographic order, then marks
/// in increasing order.
pub fn write_graph(g: &MarkedGraph) -> Result<String, FormatError> {
    if let Some(v) = (0..g.order()).find(|&v| !g.contains(v)) {
        return Err(FormatError::AbsentVertex { vertex: v });
    }
    let mut out = String::new();
    let edges: Vec<_> = g.edges().collect();
    writeln!(out, "p mids {} {}", g.order(), edges.len()).unwrap();
    for (a, b) in edges {
        writeln!(out, "e {} {}", a + 1, b + 1).unwrap();
    }
    for v in g.marked() {
        writeln!(out, "m {}", v + 1).unwrap();
    }
    Ok(out)
}
