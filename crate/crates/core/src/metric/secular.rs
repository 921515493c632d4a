//! The vertex-condition system and the eigenvalue counting function.

use nalgebra::DMatrix;

use super::edge::EdgeFunction;
use super::{MetricGraph, VertexCondition};
use crate::discrete::eigenvalues;

/// Whole-edge fundamental solutions at `λ`: `(c, s)` with `c(0) = 1, c'(0) = 0`
/// and `s(0) = 0, s'(0) = 1`.
pub(crate) fn edge_basis(mg: &MetricGraph, e: usize, lambda: f64) -> (EdgeFunction, EdgeFunction) {
    let pieces = mg.pieces(e, lambda);
    (
        EdgeFunction::from_initial(&pieces, 1.0, 0.0),
        EdgeFunction::from_initial(&pieces, 0.0, 1.0),
    )
}

/// `[c(L), s(L), c'(L), s'(L)]` for edge `e`.
pub(crate) fn edge_transfer(mg: &MetricGraph, e: usize, lambda: f64) -> [f64; 4] {
    let (mut c, mut cp, mut s, mut sp) = (1.0, 0.0, 0.0, 1.0);
    for (len, z) in mg.pieces(e, lambda) {
        let [a, b, ap, bp] = super::edge::fundamental(z, len);
        (c, cp) = (a * c + b * cp, ap * c + bp * cp);
        (s, sp) = (a * s + b * sp, ap * s + bp * sp);
    }
    [c, s, cp, sp]
}

/// A linear functional on the unknowns `(A_e, B_e)`: coefficients for
/// columns `2e` and `2e + 1`.
#[derive(Clone, Copy)]
struct EndForm {
    edge: usize,
    a: f64,
    b: f64,
}

/// Value and inward derivative at one end of an edge.
fn end_forms(e: usize, at_start: bool, t: &[f64; 4]) -> (EndForm, EndForm) {
    let [c, s, cp, sp] = *t;
    if at_start {
        (EndForm { edge: e, a: 1.0, b: 0.0 }, EndForm { edge: e, a: 0.0, b: 1.0 })
    } else {
        (
            EndForm { edge: e, a: c, b: s },
            EndForm { edge: e, a: -cp, b: -sp },
        )
    }
}

/// Incident edge ends at `v` as `(edge, v is the start)`, in adjacency order.
pub(crate) fn ends(mg: &MetricGraph, v: usize) -> Vec<(usize, bool)> {
    mg.graph()
        .incident(v)
        .iter()
        .map(|&(_, e)| (e, mg.graph().edge(e).0 == v))
        .collect()
}

/// Rows of the vertex system, each a list of `(column, coefficient)`.
fn system_rows(mg: &MetricGraph, lambda: f64) -> Vec<Vec<(usize, f64)>> {
    let transfers: Vec<[f64; 4]> = (0..mg.graph().edge_count())
        .map(|e| edge_transfer(mg, e, lambda))
        .collect();
    let mut rows = Vec::with_capacity(2 * transfers.len());
    let push = |rows: &mut Vec<Vec<(usize, f64)>>, terms: &[(EndForm, f64)]| {
        let mut row = Vec::new();
        for &(f, w) in terms {
            row.push((2 * f.edge, w * f.a));
            row.push((2 * f.edge + 1, w * f.b));
        }
        rows.push(row);
    };
    for v in 0..mg.graph().vertex_count() {
        let forms: Vec<(EndForm, EndForm)> = ends(mg, v)
            .into_iter()
            .map(|(e, start)| end_forms(e, start, &transfers[e]))
            .collect();
        match mg.condition(v) {
            VertexCondition::Kirchhoff => {
                let (f1, _) = forms[0];
                for &(fi, _) in &forms[1..] {
                    push(&mut rows, &[(f1, 1.0), (fi, -1.0)]);
                }
                let flux: Vec<_> = forms.iter().map(|&(_, g)| (g, 1.0)).collect();
                push(&mut rows, &flux);
            }
            VertexCondition::Dirichlet => push(&mut rows, &[(forms[0].0, 1.0)]),
            VertexCondition::Robin(alpha) => {
                let (f, g) = forms[0];
                push(&mut rows, &[(g, alpha.cos()), (f, -alpha.sin())]);
            }
        }
    }
    rows
}

/// The `2|E| × 2|E|` vertex-condition matrix in the unknowns `(A_e, B_e/ω)`,
/// where `A_e, B_e` are the value and slope at the start of edge `e`.
/// With `normalize` every row is scaled to unit length.
pub(crate) fn system_matrix(mg: &MetricGraph, lambda: f64, omega: f64, normalize: bool) -> DMatrix<f64> {
    let rows = system_rows(mg, lambda);
    let n = 2 * mg.graph().edge_count();
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for &(col, x) in row {
            let x = if col % 2 == 1 { x * omega } else { x };
            m[(i, col)] += x;
        }
    }
    if normalize {
        for mut r in m.row_iter_mut() {
            let norm = r.norm();
            if norm > 0.0 {
                r /= norm;
            }
        }
    }
    m
}

/// Determinant of the vertex-condition system in the unscaled start-value
/// basis. It is real-analytic in `λ` and vanishes exactly at the
/// eigenvalues, to the order of their multiplicity.
pub fn secular_value(mg: &MetricGraph, lambda: f64) -> f64 {
    system_matrix(mg, lambda, 1.0, false).determinant()
}

/// Number of eigenvalues strictly below `λ`.
///
/// Splits the form domain into functions vanishing at all vertices and
/// vertex-interpolating solutions: the count is the number of Dirichlet edge
/// eigenvalues below `λ` (zeros of `s_e` inside the edge) plus the number of
/// negative eigenvalues of the symmetric vertex matrix
/// `M_uu = Σ c/s` (edges starting at `u`) `+ Σ s'/s` (edges ending at `u`)
/// `+ tan α_u`, `M_uv = −1/s`, with Dirichlet vertices removed.
pub fn counting_function(mg: &MetricGraph, lambda: f64) -> usize {
    let mut lambda = lambda;
    // a Dirichlet eigenvalue of an edge makes M singular; step off it
    for _ in 0..64 {
        if let Some(count) = count_at(mg, lambda) {
            return count;
        }
        lambda += lambda.abs().max(1.0) * 1e-15;
    }
    count_at(mg, lambda).unwrap_or(usize::MAX)
}

fn count_at(mg: &MetricGraph, lambda: f64) -> Option<usize> {
    let g = mg.graph();
    let free: Vec<Option<usize>> = {
        let mut next = 0;
        mg.conditions()
            .iter()
            .map(|c| {
                if matches!(c, VertexCondition::Dirichlet) {
                    None
                } else {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    };
    let n = free.iter().flatten().count();
    let w = lambda.abs().max(1.0).sqrt();
    // Near a Dirichlet eigenvalue of an edge its block is a huge rank-one
    // term t·vvᵀ plus a bounded rest. Such terms go into a bordered matrix
    // [[A, V], [Vᵀ, −1/t]] whose inertia is In(M) + In(−1/t).
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut border: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    let mut positive_t = 0;
    let mut dirichlet_count = 0;
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let (c_fn, s_fn) = edge_basis(mg, e, lambda);
        let (c, cp) = c_fn.end();
        let (s, sp) = s_fn.end();
        if s == 0.0 {
            return None;
        }
        dirichlet_count += s_fn.zero_count();
        if s.abs() * w < 0.5 {
            let (vec, t) = match (free[u], free[v]) {
                (Some(i), Some(j)) => {
                    entries.push((j, j, cp / c));
                    (vec![(i, 1.0), (j, -1.0 / c)], c / s)
                }
                (Some(i), None) => (vec![(i, 1.0)], c / s),
                (None, Some(j)) => (vec![(j, 1.0)], sp / s),
                (None, None) => continue,
            };
            if t > 0.0 {
                positive_t += 1;
            }
            border.push((vec, -1.0 / t));
            continue;
        }
        if let Some(i) = free[u] {
            entries.push((i, i, c / s));
        }
        if let Some(j) = free[v] {
            entries.push((j, j, sp / s));
        }
        if let (Some(i), Some(j)) = (free[u], free[v]) {
            entries.push((i, j, -1.0 / s));
            entries.push((j, i, -1.0 / s));
        }
    }
    for (v, c) in mg.conditions().iter().enumerate() {
        if let (VertexCondition::Robin(alpha), Some(i)) = (c, free[v]) {
            entries.push((i, i, alpha.tan()));
        }
    }
    let size = n + border.len();
    if size == 0 {
        return Some(dirichlet_count);
    }
    let mut m = DMatrix::zeros(size, size);
    for (i, j, x) in entries {
        m[(i, j)] += x;
    }
    for (b, (vec, d)) in border.iter().enumerate() {
        let r = n + b;
        m[(r, r)] = *d;
        for &(i, x) in vec {
            m[(i, r)] += x;
            m[(r, i)] += x;
        }
    }
    let negatives = eigenvalues(&m).ok()?.iter().filter(|&&x| x < 0.0).count();
    Some(dirichlet_count + negatives.checked_sub(positive_t)?)
}

/// Largest violation of the vertex conditions by per-edge functions, with
/// values measured against `sup |f|` and derivatives against `ω · sup |f|`,
/// `ω = √max(1, |λ|)`.
pub fn vertex_residual(mg: &MetricGraph, lambda: f64, edges: &[EdgeFunction]) -> f64 {
    let omega = lambda.abs().max(1.0).sqrt();
    let sup = edges.iter().fold(0.0f64, |m, f| m.max(f.sup())).max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for v in 0..mg.graph().vertex_count() {
        let vals: Vec<(f64, f64)> = ends(mg, v)
            .into_iter()
            .map(|(e, start)| {
                if start {
                    edges[e].start()
                } else {
                    let (f, d) = edges[e].end();
                    (f, -d)
                }
            })
            .collect();
        match mg.condition(v) {
            VertexCondition::Kirchhoff => {
                for w in &vals[1..] {
                    worst = worst.max((w.0 - vals[0].0).abs() / sup);
                }
                let flux: f64 = vals.iter().map(|x| x.1).sum();
                worst = worst.max(flux.abs() / (omega * sup));
            }
            VertexCondition::Dirichlet => worst = worst.max(vals[0].0.abs() / sup),
            VertexCondition::Robin(alpha) => {
                let (f, g) = vals[0];
                let r = g * alpha.cos() - f * alpha.sin();
                let scale = omega * alpha.cos().abs() + alpha.sin().abs();
                worst = worst.max(r.abs() / (sup * scale));
            }
        }
    }
    worst
}
