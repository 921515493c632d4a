//! Plain-text graph files.
//!
//! ```text
//! # comment
//! graph 3                 | metric 3
//! e 1 2                   | e 1 2 1.5 0.2 -1@0.75
//! e 2 3                   | e 2 3 0.8
//! v 1 0.25                | v 1 bc=robin:0.3
//! v 3 -1                  | v 3 bc=dirichlet
//! ```
//!
//! Vertices are 1-indexed in the file and 0-indexed in memory. A metric
//! edge line carries the length, then an optional potential: a value at 0
//! followed by `value@breakpoint` pieces. Missing vertex lines mean `q = 0`
//! (discrete) or Kirchhoff (metric).

use std::fmt::{self, Write};

use thiserror::Error;

use crate::discrete::Potential;
use crate::graph::Graph;
use crate::metric::{EdgePotential, MetricGraph, VertexCondition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based; 0 for whole-file problems.
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphFile {
    Discrete { graph: Graph, potential: Potential },
    Metric(MetricGraph),
}

impl GraphFile {
    pub fn graph(&self) -> &Graph {
        match self {
            GraphFile::Discrete { graph, .. } => graph,
            GraphFile::Metric(mg) => mg.graph(),
        }
    }

    pub fn is_metric(&self) -> bool {
        matches!(self, GraphFile::Metric(_))
    }

    pub fn parse(text: &str) -> Result<GraphFile, ParseError> {
        parse(text)
    }
}

struct EdgeLine {
    line: usize,
    u: usize,
    v: usize,
    length: Option<f64>,
    potential: Vec<(f64, f64)>,
}

fn parse_vertex(tok: &str, line: usize, count: usize) -> Result<usize, ParseError> {
    match tok.parse::<usize>() {
        Ok(x) if (1..=count).contains(&x) => Ok(x - 1),
        Ok(x) => err(line, format!("vertex {x} out of range 1..={count}")),
        Err(_) => err(line, format!("expected a vertex label, found `{tok}`")),
    }
}

fn parse_real(tok: &str, line: usize, what: &str) -> Result<f64, ParseError> {
    match tok.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => err(line, format!("expected a finite {what}, found `{tok}`")),
    }
}

fn parse_condition(tok: &str, line: usize) -> Result<VertexCondition, ParseError> {
    let Some(bc) = tok.strip_prefix("bc=") else {
        return err(line, format!("expected bc=..., found `{tok}`"));
    };
    match bc {
        "kirchhoff" => Ok(VertexCondition::Kirchhoff),
        "dirichlet" => Ok(VertexCondition::Dirichlet),
        _ => match bc.strip_prefix("robin:") {
            Some(a) => Ok(VertexCondition::Robin(parse_real(a, line, "Robin angle")?)),
            None => err(line, format!("unknown boundary condition `{bc}`")),
        },
    }
}

fn parse(text: &str) -> Result<GraphFile, ParseError> {
    let mut header: Option<(bool, usize, usize)> = None;
    let mut edges: Vec<EdgeLine> = Vec::new();
    let mut vertex_q: Vec<Option<f64>> = Vec::new();
    let mut vertex_bc: Vec<Option<VertexCondition>> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        match head {
            "graph" | "metric" => {
                if header.is_some() {
                    return err(line, "second header line");
                }
                if toks.len() != 2 {
                    return err(line, format!("expected `{head} <vertex count>`"));
                }
                let n = match toks[1].parse::<usize>() {
                    Ok(n) if n >= 2 => n,
                    _ => return err(line, format!("vertex count must be an integer >= 2, found `{}`", toks[1])),
                };
                header = Some((head == "metric", n, line));
                vertex_q = vec![None; n];
                vertex_bc = vec![None; n];
            }
            "e" | "v" => {
                let Some((metric, n, _)) = header else {
                    return err(line, "directive before the `graph`/`metric` header");
                };
                if toks.len() < 2 || (head == "e" && toks.len() < 3) {
                    return err(line, format!("incomplete `{head}` line"));
                }
                if head == "e" {
                    let u = parse_vertex(toks[1], line, n)?;
                    let v = parse_vertex(toks[2], line, n)?;
                    let rest = &toks[3..];
                    if !metric {
                        if !rest.is_empty() {
                            return err(line, "discrete edges take no length or potential");
                        }
                        edges.push(EdgeLine { line, u, v, length: None, potential: Vec::new() });
                        continue;
                    }
                    let Some(len_tok) = rest.first() else {
                        return err(line, "metric edge needs a length");
                    };
                    let length = parse_real(len_tok, line, "length")?;
                    if length <= 0.0 {
                        return err(line, format!("edge length must be positive, found {length}"));
                    }
                    let mut potential = Vec::new();
                    for (j, tok) in rest[1..].iter().enumerate() {
                        let piece = match (j, tok.split_once('@')) {
                            (0, None) => (0.0, parse_real(tok, line, "potential value")?),
                            (0, Some(_)) => return err(line, "the first potential piece starts at 0 and takes no `@`"),
                            (_, Some((q, x))) => (
                                parse_real(x, line, "breakpoint")?,
                                parse_real(q, line, "potential value")?,
                            ),
                            (_, None) => return err(line, format!("expected value@breakpoint, found `{tok}`")),
                        };
                        potential.push(piece);
                    }
                    edges.push(EdgeLine { line, u, v, length: Some(length), potential });
                } else {
                    let u = parse_vertex(toks[1], line, n)?;
                    if toks.len() != 3 {
                        return err(line, "expected `v <vertex> <value>`");
                    }
                    if metric {
                        if vertex_bc[u].is_some() {
                            return err(line, format!("vertex {} given twice", u + 1));
                        }
                        vertex_bc[u] = Some(parse_condition(toks[2], line)?);
                    } else {
                        if vertex_q[u].is_some() {
                            return err(line, format!("vertex {} given twice", u + 1));
                        }
                        if toks[2].starts_with("bc=") {
                            return err(line, "boundary conditions need a `metric` file");
                        }
                        vertex_q[u] = Some(parse_real(toks[2], line, "potential value")?);
                    }
                }
            }
            other => return err(line, format!("unknown directive `{other}`")),
        }
    }

    let Some((metric, n, header_line)) = header else {
        return err(0, "missing `graph <V>` or `metric <V>` header");
    };
    let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e.u, e.v)).collect();
    let graph = Graph::new(n, &pairs).map_err(|e| {
        // point at the offending edge when there is one
        let line = match &e {
            crate::graph::GraphError::SelfLoop { vertex } => edges
                .iter()
                .find(|x| x.u == *vertex && x.v == *vertex)
                .map_or(header_line, |x| x.line),
            crate::graph::GraphError::ParallelEdge { u, v } => edges
                .iter()
                .rev()
                .find(|x| (x.u, x.v) == (*u, *v))
                .map_or(header_line, |x| x.line),
            _ => header_line,
        };
        ParseError {
            line,
            message: e.to_string(),
        }
    })?;
    if !metric {
        let potential = Potential(vertex_q.into_iter().map(|q| q.unwrap_or(0.0)).collect());
        return Ok(GraphFile::Discrete { graph, potential });
    }
    let lengths: Vec<f64> = edges.iter().map(|e| e.length.expect("metric edges carry lengths")).collect();
    let potentials: Vec<EdgePotential> = edges
        .iter()
        .map(|e| {
            if e.potential.is_empty() {
                EdgePotential::zero()
            } else {
                EdgePotential(e.potential.clone())
            }
        })
        .collect();
    let conditions = vertex_bc
        .into_iter()
        .map(|c| c.unwrap_or(VertexCondition::Kirchhoff))
        .collect();
    MetricGraph::new(graph, lengths, conditions, potentials)
        .map(GraphFile::Metric)
        .map_err(|e| {
            let line = match &e {
                crate::metric::MetricError::BadPotential { edge } => edges[*edge].line,
                _ => header_line,
            };
            ParseError {
                line,
                message: e.to_string(),
            }
        })
}

impl fmt::Display for GraphFile {
    /// Canonical form: header, every edge, then every vertex.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        match self {
            GraphFile::Discrete { graph, potential } => {
                writeln!(s, "graph {}", graph.vertex_count())?;
                for &(u, v) in graph.edges() {
                    writeln!(s, "e {} {}", u + 1, v + 1)?;
                }
                for (v, q) in potential.values().iter().enumerate() {
                    writeln!(s, "v {} {}", v + 1, q)?;
                }
            }
            GraphFile::Metric(mg) => {
                let g = mg.graph();
                writeln!(s, "metric {}", g.vertex_count())?;
                for (e, &(u, v)) in g.edges().iter().enumerate() {
                    write!(s, "e {} {} {}", u + 1, v + 1, mg.length(e))?;
                    let pieces = mg.potential(e).pieces();
                    if pieces != EdgePotential::zero().pieces() {
                        for (j, &(x, q)) in pieces.iter().enumerate() {
                            if j == 0 {
                                write!(s, " {q}")?;
                            } else {
                                write!(s, " {q}@{x}")?;
                            }
                        }
                    }
                    writeln!(s)?;
                }
                for (v, c) in mg.conditions().iter().enumerate() {
                    match c {
                        VertexCondition::Kirchhoff => writeln!(s, "v {} bc=kirchhoff", v + 1)?,
                        VertexCondition::Dirichlet => writeln!(s, "v {} bc=dirichlet", v + 1)?,
                        VertexCondition::Robin(a) => writeln!(s, "v {} bc=robin:{a}", v + 1)?,
                    }
                }
            }
        }
        out.write_str(&s)
    }
}
