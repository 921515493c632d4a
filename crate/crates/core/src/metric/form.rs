//! Quadratic form `Σ_e ∫ (f'² + q f²) + Σ_{deg v = 1} f(v)² tan α_v`.

use super::edge::EdgeFunction;
use super::secular::ends;
use super::{MetricError, MetricGraph, VertexCondition};

/// Evaluates the form on per-edge test functions (stored orientation).
///
/// Dirichlet vertices belong to the domain, not the form: a test function
/// that does not vanish there is rejected.
pub fn quadratic_form_metric(mg: &MetricGraph, f: &[EdgeFunction]) -> Result<f64, MetricError> {
    let g = mg.graph();
    if f.len() != g.edge_count() {
        return Err(MetricError::EdgeDataLength {
            what: "test functions",
            expected: g.edge_count(),
            got: f.len(),
        });
    }
    for (e, ef) in f.iter().enumerate() {
        if (ef.length() - mg.length(e)).abs() > 1e-12 * mg.length(e) {
            return Err(MetricError::BadLength { edge: e, length: ef.length() });
        }
    }
    let sup = f.iter().fold(0.0f64, |m, e| m.max(e.sup()));
    let mut total = 0.0;
    for (e, ef) in f.iter().enumerate() {
        total += ef.integrals().1 + ef.weighted_sq(mg.potential(e).pieces());
    }
    for v in 0..g.vertex_count() {
        if g.degree(v) != 1 {
            continue;
        }
        let (e, start) = ends(mg, v)[0];
        let value = if start { f[e].start().0 } else { f[e].end().0 };
        match mg.condition(v) {
            VertexCondition::Kirchhoff => {}
            VertexCondition::Robin(alpha) => total += value * value * alpha.tan(),
            VertexCondition::Dirichlet => {
                if value.abs() > 1e-12 * sup {
                    return Err(MetricError::DirichletForm { vertex: v });
                }
            }
        }
    }
    Ok(total)
}
