//! One metric cut experiment: cut a graph to a tree through an eigenfunction
//! and compare the two spectra.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::interlace::{interlacing_audit, InterlaceAudit, InterlaceMode};
use super::VerifyError;
use crate::metric::{
    cut_to_tree, cut_to_tree_at, eigenfunction, find_eigenvalues_with, find_lowest_with,
    metric_nodal_count, CutResult, MetricEigenpair, MetricGraph,
};
use crate::Tolerances;

const CUT_JITTER: [f64; 5] = [0.0, 1e-6, 1e-5, 1e-4, 1e-3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutAudit {
    pub n: usize,
    pub lambda: f64,
    /// Index of `λ_n` in the tree spectrum.
    pub m: usize,
    pub nu_graph: usize,
    pub nu_tree: usize,
    /// `max_j |a_{j+} + a_{j−}|`
    pub max_a_sum: f64,
    /// Vertex residual of the carried-over eigenfunction on the tree.
    pub residual: f64,
    pub interlacing: InterlaceAudit,
    /// Relative jitter of the cut positions needed for a simple `λ_n` on the tree.
    pub jitter: f64,
}

impl CutAudit {
    pub fn m_ok(&self) -> bool {
        self.m >= self.n
    }
}

/// Cuts `mg` through the eigenfunction of the generic pair `pairs[n − 1]`
/// and audits the tree; `pairs` are the lowest eigenpairs of `mg`.
///
/// When `λ_n` is degenerate on the tree the cut points are moved by a
/// relative jitter `1e−6 … 1e−3`.
pub fn metric_cut_audit(
    mg: &MetricGraph,
    pairs: &[MetricEigenpair],
    n: usize,
    rng: &mut impl Rng,
    tol: &Tolerances,
) -> Result<CutAudit, VerifyError> {
    let pair = pairs[n - 1];
    let f = eigenfunction(mg, &pair)?;
    let nu_graph = metric_nodal_count(mg, &f, tol)?;
    let first = cut_to_tree(mg, &f, &mg.graph().spanning_cut_set())?;
    let gap = tol.gap_rel * pair.lambda.abs().max(1.0);

    let mut last_err = None;
    for jitter in CUT_JITTER {
        let cut = if jitter == 0.0 {
            first.clone()
        } else {
            let positions: Vec<(usize, f64)> = first
                .cut_points
                .iter()
                .map(|c| (c.edge, c.x * (1.0 + jitter * rng.random_range(-1.0..=1.0))))
                .collect();
            match cut_to_tree_at(mg, &f, &positions) {
                Ok(c) => c,
                Err(e) => {
                    last_err = Some(e.into());
                    continue;
                }
            }
        };
        let tree_low = find_eigenvalues_with(&cut.tree, pair.lambda + 2.0 * gap, tol)?;
        let matching: Vec<&MetricEigenpair> = tree_low
            .iter()
            .filter(|t| (t.lambda - pair.lambda).abs() <= 1e-8 * pair.lambda.abs().max(1.0))
            .collect();
        let Some(hit) = matching.last() else {
            last_err = Some(VerifyError::CutLostEigenvalue { lambda: pair.lambda });
            continue;
        };
        if !hit.simple {
            continue;
        }
        return finish(pairs, n, &cut, hit.n, nu_graph, jitter, tol);
    }
    Err(last_err.unwrap_or(VerifyError::CutDegenerate { lambda: pair.lambda }))
}

fn finish(
    pairs: &[MetricEigenpair],
    n: usize,
    cut: &CutResult,
    m: usize,
    nu_graph: usize,
    jitter: f64,
    tol: &Tolerances,
) -> Result<CutAudit, VerifyError> {
    let tree_pairs = find_lowest_with(&cut.tree, pairs.len(), tol)?;
    let base: Vec<f64> = pairs.iter().map(|p| p.lambda).collect();
    let other: Vec<f64> = tree_pairs.iter().map(|p| p.lambda).collect();
    let nu_tree = metric_nodal_count(&cut.tree, &cut.function, tol)?;
    Ok(CutAudit {
        n,
        lambda: pairs[n - 1].lambda,
        m,
        nu_graph,
        nu_tree,
        max_a_sum: cut
            .cut_points
            .iter()
            .map(|c| (c.a_plus + c.a_minus).abs())
            .fold(0.0, f64::max),
        residual: cut.function.residual(&cut.tree),
        interlacing: interlacing_audit(&base, &other, InterlaceMode::Cut),
        jitter,
    })
}
