//! Finite-difference oracle for metric graph spectra.
//!
//! Each edge is split into equal elements; piecewise-linear functions with
//! a lumped (diagonal) mass matrix give the three-point stencil inside an
//! edge and the Kirchhoff flux balance at a vertex. Dirichlet vertices are
//! removed, Robin vertices add `tan α` to their diagonal.

use nalgebra::{DMatrix, DVector};

use super::VerifyError;
use crate::metric::{MetricGraph, VertexCondition};

/// Number of elements per edge for target mesh size `h`.
pub fn fd_elements(mg: &MetricGraph, h: f64) -> Vec<usize> {
    mg.lengths()
        .iter()
        .map(|l| ((l / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize)
        .collect()
}

/// Ascending eigenvalues of the discretization with mesh size at most `h`,
/// which must not exceed `min_e L_e / 8`.
pub fn fd_oracle(mg: &MetricGraph, h: f64) -> Result<Vec<f64>, VerifyError> {
    let min_len = mg.lengths().iter().copied().fold(f64::INFINITY, f64::min);
    if !(h > 0.0 && h <= min_len / 8.0 * (1.0 + 1e-12)) {
        return Err(VerifyError::Config(format!(
            "mesh size {h} must lie in (0, {}]",
            min_len / 8.0
        )));
    }
    Ok(fd_oracle_elements(mg, &fd_elements(mg, h)))
}

/// The same with an explicit element count per edge; doubling every count
/// halves every element exactly.
pub fn fd_oracle_elements(mg: &MetricGraph, elements: &[usize]) -> Vec<f64> {
    let g = mg.graph();
    let nv = g.vertex_count();
    // node ids: graph vertices first, then interior nodes edge by edge
    let mut node_count = nv;
    let mut interior_start = Vec::with_capacity(g.edge_count());
    for &n in elements {
        interior_start.push(node_count);
        node_count += n - 1;
    }
    let mut k = DMatrix::<f64>::zeros(node_count, node_count);
    let mut mass = DVector::<f64>::zeros(node_count);
    let mut pot = DVector::<f64>::zeros(node_count);
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let n = elements[e];
        let he = mg.length(e) / n as f64;
        let q = mg.potential(e);
        let node = |i: usize| match i {
            0 => u,
            i if i == n => v,
            i => interior_start[e] + i - 1,
        };
        for i in 0..n {
            let (a, b) = (node(i), node(i + 1));
            let w = 1.0 / he;
            k[(a, a)] += w;
            k[(b, b)] += w;
            k[(a, b)] -= w;
            k[(b, a)] -= w;
            let qm = q.value_at((i as f64 + 0.5) * he);
            for x in [a, b] {
                mass[x] += 0.5 * he;
                pot[x] += 0.5 * he * qm;
            }
        }
    }
    for (v, c) in mg.conditions().iter().enumerate() {
        if let VertexCondition::Robin(alpha) = c {
            k[(v, v)] += alpha.tan();
        }
    }
    for i in 0..node_count {
        k[(i, i)] += pot[i];
    }
    let keep: Vec<usize> = (0..node_count)
        .filter(|&i| i >= nv || !matches!(mg.condition(i), VertexCondition::Dirichlet))
        .collect();
    // symmetric form M^{-1/2} K M^{-1/2}
    let a = DMatrix::from_fn(keep.len(), keep.len(), |r, c| {
        let (i, j) = (keep[r], keep[c]);
        k[(i, j)] / (mass[i] * mass[j]).sqrt()
    });
    let mut ev: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}
