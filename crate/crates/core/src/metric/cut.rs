//! Cutting a metric graph to a tree through points where an eigenfunction
//! is non-zero, with Robin conditions that keep it an eigenfunction.

use serde::{Deserialize, Serialize};

use super::edge::EdgeFunction;
use super::solve::EigenFunction;
use super::{EdgePotential, MetricError, MetricGraph, VertexCondition};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutPoint {
    pub edge: usize,
    pub x: f64,
    /// Tree vertex closing the first part `[0, x]`.
    pub u_plus: usize,
    /// Tree vertex opening the second part `[x, L]`.
    pub u_minus: usize,
    /// `f'/f` at `u_plus`, derivative into its edge.
    pub a_plus: f64,
    /// `f'/f` at `u_minus`, derivative into its edge.
    pub a_minus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutResult {
    pub tree: MetricGraph,
    pub cut_points: Vec<CutPoint>,
    /// The input eigenfunction carried over to the tree's edges.
    pub function: EigenFunction,
}

/// Cuts every edge of `cut_edges` at the interior point where `|f|` is
/// largest and closes the cut with Robin conditions `f' = a f`.
pub fn cut_to_tree(mg: &MetricGraph, f: &EigenFunction, cut_edges: &[usize]) -> Result<CutResult, MetricError> {
    let vt = 1e-8 * f.sup();
    let mut cuts = Vec::with_capacity(cut_edges.len());
    for &e in cut_edges {
        let x = best_cut_point(&f.edges[e], mg.length(e));
        if f.edges[e].eval(x).0.abs() <= vt {
            return Err(MetricError::NoNonzeroCutPoint { edge: e });
        }
        cuts.push((e, x));
    }
    cut_to_tree_at(mg, f, &cuts)
}

fn best_cut_point(ef: &EdgeFunction, l: f64) -> f64 {
    let mut candidates: Vec<f64> = ef
        .segments
        .iter()
        .flat_map(|s| s.critical_points().into_iter().map(move |t| s.x0 + t))
        .collect();
    candidates.extend([0.25 * l, 0.5 * l, 0.75 * l]);
    candidates
        .into_iter()
        .max_by(|a, b| ef.eval(*a).0.abs().total_cmp(&ef.eval(*b).0.abs()))
        .expect("non-empty candidates")
}

/// Cuts at explicit `(edge, x)` positions.
pub fn cut_to_tree_at(mg: &MetricGraph, f: &EigenFunction, cuts: &[(usize, f64)]) -> Result<CutResult, MetricError> {
    let g = mg.graph();
    let cut_edges: Vec<usize> = cuts.iter().map(|c| c.0).collect();
    let valid = cut_edges.len() == g.cycle_dimension()
        && g.without_edges(&cut_edges).is_ok_and(|t| t.is_tree());
    if !valid {
        return Err(MetricError::InvalidCutSet { edges: cut_edges });
    }
    let nv = g.vertex_count();
    let mut edges = Vec::new();
    let mut lengths = Vec::new();
    let mut potentials = Vec::new();
    let mut functions = Vec::new();
    for e in 0..g.edge_count() {
        if !cut_edges.contains(&e) {
            edges.push(g.edge(e));
            lengths.push(mg.length(e));
            potentials.push(mg.potential(e).clone());
            functions.push(f.edges[e].clone());
        }
    }
    let mut conditions = mg.conditions().to_vec();
    let mut cut_points = Vec::with_capacity(cuts.len());
    for (j, &(e, x)) in cuts.iter().enumerate() {
        let (u, v) = g.edge(e);
        let l = mg.length(e);
        if !(x > 0.0 && x < l) {
            return Err(MetricError::NoNonzeroCutPoint { edge: e });
        }
        let (u_plus, u_minus) = (nv + 2 * j, nv + 2 * j + 1);
        let (fx, dx) = f.edges[e].eval(x);
        if fx == 0.0 {
            return Err(MetricError::NoNonzeroCutPoint { edge: e });
        }
        let a_plus = -dx / fx;
        let a_minus = dx / fx;
        let p = mg.potential(e);
        let (p1, p2) = (p.restrict(0.0, x), p.restrict(x, l));

        edges.push((u, u_plus));
        lengths.push(x);
        let (f0, d0) = f.edges[e].start();
        functions.push(EdgeFunction::from_initial(&pieces_of(&p1, x, f.lambda), f0, d0));
        potentials.push(p1);

        edges.push((u_minus, v));
        lengths.push(l - x);
        functions.push(EdgeFunction::from_initial(&pieces_of(&p2, l - x, f.lambda), fx, dx));
        potentials.push(p2);

        conditions.push(VertexCondition::Robin(a_plus.atan()));
        conditions.push(VertexCondition::Robin(a_minus.atan()));
        cut_points.push(CutPoint {
            edge: e,
            x,
            u_plus,
            u_minus,
            a_plus,
            a_minus,
        });
    }
    let graph = Graph::new(nv + 2 * cuts.len(), &edges)?;
    let tree = MetricGraph::new(graph, lengths, conditions, potentials)?;
    Ok(CutResult {
        tree,
        cut_points,
        function: EigenFunction {
            lambda: f.lambda,
            edges: functions,
        },
    })
}

fn pieces_of(p: &EdgePotential, len: f64, lambda: f64) -> Vec<(f64, f64)> {
    let v = p.pieces();
    v.iter()
        .enumerate()
        .map(|(i, &(x, q))| (v.get(i + 1).map_or(len, |n| n.0) - x, lambda - q))
        .collect()
}
