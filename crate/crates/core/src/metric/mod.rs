//! Metric (quantum) graphs: each edge is an interval carrying
//! `−f'' + q f = λ f`, coupled at the vertices.
//!
//! Edge `e = (u, v)` is parametrized by `x ∈ [0, L_e]` running from `u` to
//! `v`. A boundary condition at a vertex is written in terms of the derivative
//! pointing into the edge: `f' cos α = f sin α`.

mod cut;
mod edge;
mod form;
mod nodal;
mod secular;
mod shooting;
mod solve;
mod star;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};

pub use cut::{cut_to_tree, cut_to_tree_at, CutPoint, CutResult};
pub use edge::{fundamental, propagate, EdgeFunction, Segment};
pub use form::quadratic_form_metric;
pub use nodal::{metric_nodal_count, support_nodal_count_metric};
pub use secular::{counting_function, secular_value, vertex_residual};
pub use solve::{
    check_metric_genericity, eigenfunction, eigenfunctions, find_eigenvalues, find_eigenvalues_with,
    find_lowest, find_lowest_with,
    weyl_deviation, EigenFunction, MetricEigenpair, MetricGenericity,
};
pub use shooting::{shooting_count, shooting_eigenvalues, shooting_sweep, ShootingResult};
pub use star::{
    build_star_counterexample, incommensurability_audit, star_lengths, star_secular, StarOffset,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("{got} {what} given for {expected} edges")]
    EdgeDataLength {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{got} vertex conditions given for {expected} vertices")]
    VertexDataLength { expected: usize, got: usize },
    #[error("edge {edge} has non-positive or non-finite length {length}")]
    BadLength { edge: usize, length: f64 },
    #[error("edge {edge} potential breakpoints must start at 0, increase, and stay below the length")]
    BadPotential { edge: usize },
    #[error("vertex {vertex} has degree {degree}; Robin and Dirichlet conditions need degree 1")]
    BoundaryConditionOnInternalVertex { vertex: usize, degree: usize },
    #[error("could not resolve the spectrum near lambda = {lambda}")]
    ScanResolutionFailure { lambda: f64 },
    #[error("eigenvalue {lambda} has multiplicity {nullity}; choose a basis vector explicitly")]
    DegenerateChoice { lambda: f64, nullity: usize },
    #[error("lambda = {lambda} is not an eigenvalue")]
    NotAnEigenvalue { lambda: f64 },
    #[error("eigenfunction vanishes identically on edge {edge}")]
    IdenticallyZeroEdge { edge: usize },
    #[error("eigenfunction vanishes at vertex {vertex}")]
    ZeroAtVertex { vertex: usize },
    #[error("eigenfunction has no usable cut point on edge {edge}")]
    NoNonzeroCutPoint { edge: usize },
    #[error("edges {edges:?} do not form a co-tree set")]
    InvalidCutSet { edges: Vec<usize> },
    #[error("root {vertex} must be a boundary vertex (degree 1)")]
    NotBoundaryVertex { vertex: usize },
    #[error("k = {k} is within tolerance of a cotangent pole")]
    PoleProximity { k: f64 },
    #[error("Dirichlet vertex {vertex} carries a nonzero value; restrict the test function instead")]
    DirichletForm { vertex: usize },
    #[error("counterexample needs m >= 2 and at least 3 edges (got m = {m}, edges = {edges})")]
    BadStar { m: usize, edges: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum VertexCondition {
    /// Continuity plus vanishing sum of derivatives into the edges; Neumann at a leaf.
    Kirchhoff,
    /// `f' cos α = f sin α` with the derivative pointing into the edge.
    Robin(f64),
    Dirichlet,
}

/// Piecewise-constant potential on one edge: sorted `(breakpoint, value)`
/// pairs, the first at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgePotential(pub Vec<(f64, f64)>);

impl EdgePotential {
    pub fn zero() -> Self {
        EdgePotential(vec![(0.0, 0.0)])
    }

    pub fn constant(q: f64) -> Self {
        EdgePotential(vec![(0.0, q)])
    }

    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.0
    }

    fn check(&self, edge: usize, length: f64) -> Result<(), MetricError> {
        let bad = self.0.is_empty()
            || self.0[0].0 != 0.0
            || self.0.windows(2).any(|w| w[1].0 <= w[0].0)
            || self.0.iter().any(|p| p.0 >= length || !p.1.is_finite());
        if bad {
            return Err(MetricError::BadPotential { edge });
        }
        Ok(())
    }

    /// The part on `[a, b]`, re-based to start at 0.
    pub fn restrict(&self, a: f64, b: f64) -> EdgePotential {
        let mut out = vec![(0.0, self.value_at(a))];
        for &(x, q) in &self.0 {
            if x > a && x < b {
                out.push((x - a, q));
            }
        }
        EdgePotential(out)
    }

    /// The potential seen from the other end of an edge of length `len`.
    pub fn reversed(&self, len: f64) -> EdgePotential {
        let mut out = Vec::with_capacity(self.0.len());
        for (i, &(_, q)) in self.0.iter().enumerate().rev() {
            let end = self.0.get(i + 1).map_or(len, |p| p.0);
            out.push((len - end, q));
        }
        out[0].0 = 0.0;
        EdgePotential(out)
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.0
            .iter()
            .rev()
            .find(|p| p.0 <= x)
            .map_or(self.0[0].1, |p| p.1)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    graph: Graph,
    lengths: Vec<f64>,
    conditions: Vec<VertexCondition>,
    potentials: Vec<EdgePotential>,
}

impl MetricGraph {
    pub fn new(
        graph: Graph,
        lengths: Vec<f64>,
        conditions: Vec<VertexCondition>,
        potentials: Vec<EdgePotential>,
    ) -> Result<Self, MetricError> {
        let m = graph.edge_count();
        if lengths.len() != m {
            return Err(MetricError::EdgeDataLength {
                what: "lengths",
                expected: m,
                got: lengths.len(),
            });
        }
        if potentials.len() != m {
            return Err(MetricError::EdgeDataLength {
                what: "potentials",
                expected: m,
                got: potentials.len(),
            });
        }
        if conditions.len() != graph.vertex_count() {
            return Err(MetricError::VertexDataLength {
                expected: graph.vertex_count(),
                got: conditions.len(),
            });
        }
        for (e, &l) in lengths.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(MetricError::BadLength { edge: e, length: l });
            }
            potentials[e].check(e, l)?;
        }
        for (v, c) in conditions.iter().enumerate() {
            let degree = graph.degree(v);
            if degree != 1 && !matches!(c, VertexCondition::Kirchhoff) {
                return Err(MetricError::BoundaryConditionOnInternalVertex { vertex: v, degree });
            }
        }
        Ok(MetricGraph {
            graph,
            lengths,
            conditions,
            potentials,
        })
    }

    /// Kirchhoff everywhere, zero potential.
    pub fn kirchhoff(graph: Graph, lengths: Vec<f64>) -> Result<Self, MetricError> {
        let conditions = vec![VertexCondition::Kirchhoff; graph.vertex_count()];
        let potentials = vec![EdgePotential::zero(); graph.edge_count()];
        MetricGraph::new(graph, lengths, conditions, potentials)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn length(&self, e: usize) -> f64 {
        self.lengths[e]
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    pub fn conditions(&self) -> &[VertexCondition] {
        &self.conditions
    }

    pub fn condition(&self, v: usize) -> VertexCondition {
        self.conditions[v]
    }

    pub fn potentials(&self) -> &[EdgePotential] {
        &self.potentials
    }

    pub fn potential(&self, e: usize) -> &EdgePotential {
        &self.potentials[e]
    }

    /// `(length, λ − q)` for each constant piece of edge `e`.
    pub fn pieces(&self, e: usize, lambda: f64) -> Vec<(f64, f64)> {
        let p = &self.potentials[e].0;
        let l = self.lengths[e];
        p.iter()
            .enumerate()
            .map(|(i, &(x, q))| {
                let end = p.get(i + 1).map_or(l, |n| n.0);
                (end - x, lambda - q)
            })
            .collect()
    }

    pub fn min_potential(&self) -> f64 {
        self.potentials.iter().map(EdgePotential::min).fold(f64::INFINITY, f64::min)
    }

    pub fn with_lengths(&self, lengths: Vec<f64>) -> Result<Self, MetricError> {
        // breakpoints scale with their edge
        let potentials = self
            .potentials
            .iter()
            .zip(&self.lengths)
            .zip(&lengths)
            .map(|((p, &old), &new)| {
                EdgePotential(p.0.iter().map(|&(x, q)| (x * new / old, q)).collect())
            })
            .collect();
        MetricGraph::new(self.graph.clone(), lengths, self.conditions.clone(), potentials)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::samples::*;

    #[test]
    fn validation() {
        let g = path(3);
        assert!(MetricGraph::kirchhoff(g.clone(), vec![1.0, 2.0]).is_ok());
        assert!(matches!(
            MetricGraph::kirchhoff(g.clone(), vec![1.0]),
            Err(MetricError::EdgeDataLength { .. })
        ));
        assert!(matches!(
            MetricGraph::kirchhoff(g.clone(), vec![1.0, -2.0]),
            Err(MetricError::BadLength { edge: 1, .. })
        ));
        let mut conds = vec![VertexCondition::Kirchhoff; 3];
        conds[1] = VertexCondition::Dirichlet;
        assert!(matches!(
            MetricGraph::new(g.clone(), vec![1.0, 1.0], conds, vec![EdgePotential::zero(); 2]),
            Err(MetricError::BoundaryConditionOnInternalVertex { vertex: 1, degree: 2 })
        ));
        let bad = EdgePotential(vec![(0.0, 1.0), (1.5, 2.0)]);
        assert!(matches!(
            MetricGraph::new(
                g,
                vec![1.0, 1.0],
                vec![VertexCondition::Kirchhoff; 3],
                vec![EdgePotential::zero(), bad]
            ),
            Err(MetricError::BadPotential { edge: 1 })
        ));
    }

    #[test]
    fn pieces_and_potential_helpers() {
        let p = EdgePotential(vec![(0.0, 1.0), (0.25, -2.0), (0.75, 3.0)]);
        let mg = MetricGraph::new(
            path(2),
            vec![1.0],
            vec![VertexCondition::Kirchhoff; 2],
            vec![p.clone()],
        )
        .unwrap();
        assert_eq!(mg.pieces(0, 5.0), vec![(0.25, 4.0), (0.5, 7.0), (0.25, 2.0)]);
        assert_eq!(p.value_at(0.3), -2.0);
        assert_eq!(p.reversed(1.0).0, vec![(0.0, 3.0), (0.25, -2.0), (0.75, 1.0)]);
        assert_eq!(p.restrict(0.5, 1.0).0, vec![(0.0, -2.0), (0.25, 3.0)]);
        assert_eq!(mg.min_potential(), -2.0);
    }
}
