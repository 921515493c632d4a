//! Nodal domains of eigenfunctions on metric graphs.

use super::solve::EigenFunction;
use super::{MetricError, MetricGraph, VertexCondition};
use crate::graph::UnionFind;
use crate::Tolerances;

/// Number of nodal domains; fails on a vanishing non-Dirichlet vertex or an
/// identically vanishing edge.
pub fn metric_nodal_count(mg: &MetricGraph, f: &EigenFunction, tol: &Tolerances) -> Result<usize, MetricError> {
    count_domains(mg, f, tol, true)
}

/// Number of domains of the non-vanishing support: vanishing vertices do
/// not join edges and identically vanishing edges are skipped.
pub fn support_nodal_count_metric(mg: &MetricGraph, f: &EigenFunction, tol: &Tolerances) -> usize {
    count_domains(mg, f, tol, false).expect("support counting does not fail")
}

fn count_domains(mg: &MetricGraph, f: &EigenFunction, tol: &Tolerances, strict: bool) -> Result<usize, MetricError> {
    let g = mg.graph();
    let vt = tol.vanish_rel * f.sup();
    let vanishes: Vec<bool> = (0..g.vertex_count())
        .map(|v| f.vertex_value(mg, v).abs() <= vt)
        .collect();
    if strict {
        if let Some(v) = (0..g.vertex_count())
            .find(|&v| vanishes[v] && !matches!(mg.condition(v), VertexCondition::Dirichlet))
        {
            return Err(MetricError::ZeroAtVertex { vertex: v });
        }
    }

    // segments of edge e are numbered first[e] .. first[e] + zeros
    let mut first = vec![None; g.edge_count()];
    let mut next = 0;
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let ef = &f.edges[e];
        if ef.sup() <= vt {
            if strict {
                return Err(MetricError::IdenticallyZeroEdge { edge: e });
            }
            continue;
        }
        let l = mg.length(e);
        let guard = 1e-9 * l;
        let zeros = ef
            .zeros()
            .into_iter()
            .filter(|&x| !(vanishes[u] && x < guard) && !(vanishes[v] && x > l - guard))
            .count();
        first[e] = Some((next, zeros));
        next += zeros + 1;
    }

    let mut uf = UnionFind::new(next);
    for v in 0..g.vertex_count() {
        if vanishes[v] {
            continue;
        }
        let mut touching = g.incident(v).iter().filter_map(|&(_, e)| {
            let (base, zeros) = first[e]?;
            Some(if g.edge(e).0 == v { base } else { base + zeros })
        });
        if let Some(a) = touching.next() {
            for b in touching {
                uf.union(a, b);
            }
        }
    }
    Ok(uf.count_roots())
}
