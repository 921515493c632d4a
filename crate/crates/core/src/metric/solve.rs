//! Eigenvalues by bisection on the counting function, eigenfunctions from
//! the null space of the vertex system.

use serde::{Deserialize, Serialize};

use super::edge::EdgeFunction;
use super::secular::{counting_function, ends, system_matrix, vertex_residual};
use super::{MetricError, MetricGraph, VertexCondition};
use crate::Tolerances;

const MAX_FLOOR_STEPS: usize = 200;

/// One eigenvalue with its global 1-based index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricEigenpair {
    pub n: usize,
    pub lambda: f64,
    /// Size of the cluster this eigenvalue belongs to (1 when separated).
    pub multiplicity: usize,
    /// No other eigenvalue within `gap_rel · max(1, |λ|)`.
    pub simple: bool,
}

impl MetricEigenpair {
    /// `√λ` for `λ ≥ 0`, else 0.
    pub fn k(&self) -> f64 {
        self.lambda.max(0.0).sqrt()
    }
}

/// Eigenfunction as one [`EdgeFunction`] per edge in its stored orientation,
/// normalized to unit `L²` norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenFunction {
    pub lambda: f64,
    pub edges: Vec<EdgeFunction>,
}

impl EigenFunction {
    pub fn vertex_value(&self, mg: &MetricGraph, v: usize) -> f64 {
        let (e, start) = ends(mg, v)[0];
        if start {
            self.edges[e].start().0
        } else {
            self.edges[e].end().0
        }
    }

    pub fn sup(&self) -> f64 {
        self.edges.iter().fold(0.0f64, |m, f| m.max(f.sup()))
    }

    pub fn norm_sq(&self) -> f64 {
        self.edges.iter().map(|f| f.integrals().0).sum()
    }

    pub fn residual(&self, mg: &MetricGraph) -> f64 {
        vertex_residual(mg, self.lambda, &self.edges)
    }
}

/// Count-based bisection: returns `(λ, multiplicity)` clusters in `[lo, hi)`,
/// ascending. `count(λ)` must be the number of eigenvalues below `λ`.
pub(crate) fn bracket_by_count(
    count: &dyn Fn(f64) -> usize,
    lo: f64,
    hi: f64,
) -> Vec<(f64, usize)> {
    let mut out = Vec::new();
    let mut stack = vec![(lo, count(lo), hi, count(hi))];
    while let Some((a, na, b, nb)) = stack.pop() {
        if nb <= na {
            continue;
        }
        let mid = 0.5 * (a + b);
        let width_tol = 1e-14 * a.abs().max(b.abs()).max(1.0);
        if b - a <= width_tol || mid <= a || mid >= b {
            out.push((mid, nb - na));
            continue;
        }
        let nm = count(mid).clamp(na, nb);
        // right half first so the left half is processed next
        stack.push((mid, nm, b, nb));
        stack.push((a, na, mid, nm));
    }
    out
}

/// A `λ` below the whole spectrum.
pub(crate) fn spectral_floor(count: &dyn Fn(f64) -> usize, start: f64) -> Result<f64, MetricError> {
    let mut lo = start;
    for _ in 0..MAX_FLOOR_STEPS {
        if count(lo) == 0 {
            return Ok(lo);
        }
        lo -= 2.0 * lo.abs().max(1.0);
    }
    Err(MetricError::ScanResolutionFailure { lambda: lo })
}

fn pairs_from_clusters(
    clusters: &[(f64, usize)],
    count: &dyn Fn(f64) -> usize,
    tol: &Tolerances,
) -> Vec<MetricEigenpair> {
    let mut out = Vec::new();
    for &(lambda, mult) in clusters {
        let gap = tol.gap_rel * lambda.abs().max(1.0);
        let simple = mult == 1 && count(lambda + gap).saturating_sub(count(lambda - gap)) == 1;
        for _ in 0..mult {
            out.push(MetricEigenpair {
                n: out.len() + 1,
                lambda,
                multiplicity: mult,
                simple,
            });
        }
    }
    out
}

/// All eigenvalues `≤ lambda_max`, ascending with multiplicity.
pub fn find_eigenvalues(mg: &MetricGraph, lambda_max: f64) -> Result<Vec<MetricEigenpair>, MetricError> {
    find_eigenvalues_with(mg, lambda_max, &Tolerances::default())
}

pub fn find_eigenvalues_with(
    mg: &MetricGraph,
    lambda_max: f64,
    tol: &Tolerances,
) -> Result<Vec<MetricEigenpair>, MetricError> {
    if !lambda_max.is_finite() {
        return Err(MetricError::ScanResolutionFailure { lambda: lambda_max });
    }
    let count = |x: f64| counting_function(mg, x);
    let floor = spectral_floor(&count, mg.min_potential() - 1.0)?;
    if lambda_max <= floor {
        return Ok(Vec::new());
    }
    let hi = lambda_max + 1e-14 * lambda_max.abs().max(1.0);
    let clusters = bracket_by_count(&count, floor, hi);
    Ok(pairs_from_clusters(&clusters, &count, tol))
}

/// The lowest `count` eigenvalues. A cluster straddling the cut-off is
/// truncated but keeps its multiplicity.
pub fn find_lowest(mg: &MetricGraph, count: usize) -> Result<Vec<MetricEigenpair>, MetricError> {
    find_lowest_with(mg, count, &Tolerances::default())
}

pub fn find_lowest_with(
    mg: &MetricGraph,
    wanted: usize,
    tol: &Tolerances,
) -> Result<Vec<MetricEigenpair>, MetricError> {
    let count = |x: f64| counting_function(mg, x);
    lowest_by_count(&count, mg.min_potential() - 1.0, wanted, tol)
}

pub(crate) fn lowest_by_count(
    count: &dyn Fn(f64) -> usize,
    start: f64,
    wanted: usize,
    tol: &Tolerances,
) -> Result<Vec<MetricEigenpair>, MetricError> {
    if wanted == 0 {
        return Ok(Vec::new());
    }
    let floor = spectral_floor(count, start)?;
    let mut hi = floor + 1.0;
    let mut steps = 0;
    while count(hi) < wanted {
        hi = floor + 2.0 * (hi - floor);
        steps += 1;
        if steps > MAX_FLOOR_STEPS {
            return Err(MetricError::ScanResolutionFailure { lambda: hi });
        }
    }
    let clusters = bracket_by_count(count, floor, hi);
    let mut pairs = pairs_from_clusters(&clusters, count, tol);
    pairs.truncate(wanted);
    Ok(pairs)
}

/// `√max(1, |λ|)`, the natural derivative scale at `λ`.
pub(crate) fn omega(lambda: f64) -> f64 {
    lambda.abs().max(1.0).sqrt()
}

/// Null space of the vertex system at `λ` as right singular vectors, with
/// their singular values relative to the largest, ascending.
fn null_vectors(mg: &MetricGraph, lambda: f64, dim: usize) -> Vec<(f64, Vec<f64>)> {
    let w = omega(lambda);
    let m = system_matrix(mg, lambda, w, true);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let smax = svd.singular_values.max().max(f64::MIN_POSITIVE);
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    idx.into_iter()
        .take(dim)
        .map(|i| {
            let x: Vec<f64> = v_t.row(i).iter().copied().collect();
            (svd.singular_values[i] / smax, x)
        })
        .collect()
}

fn function_from_vector(mg: &MetricGraph, lambda: f64, x: &[f64]) -> EigenFunction {
    let w = omega(lambda);
    let edges = (0..mg.graph().edge_count())
        .map(|e| EdgeFunction::from_initial(&mg.pieces(e, lambda), x[2 * e], w * x[2 * e + 1]))
        .collect();
    let mut f = EigenFunction { lambda, edges };
    normalize(mg, &mut f);
    f
}

fn normalize(mg: &MetricGraph, f: &mut EigenFunction) {
    let norm = f.norm_sq().sqrt();
    let tol = 1e-8 * f.sup();
    // first vertex value above tolerance is positive
    let sign = (0..mg.graph().vertex_count())
        .map(|v| f.vertex_value(mg, v))
        .find(|x| x.abs() > tol)
        .or_else(|| {
            f.edges
                .iter()
                .flat_map(|e| e.segments.iter())
                .map(|s| if s.f0.abs() > tol { s.f0 } else { s.d0 })
                .find(|x| x.abs() > tol)
        })
        .map_or(1.0, f64::signum);
    for e in &mut f.edges {
        e.scale(sign / norm);
    }
}

/// Eigenfunction of a simple eigenvalue, normalized to unit `L²` norm with
/// the first non-vanishing vertex value positive.
pub fn eigenfunction(mg: &MetricGraph, pair: &MetricEigenpair) -> Result<EigenFunction, MetricError> {
    if pair.multiplicity > 1 {
        return Err(MetricError::DegenerateChoice {
            lambda: pair.lambda,
            nullity: pair.multiplicity,
        });
    }
    let mut v = eigenfunctions(mg, pair.lambda, 1)?;
    Ok(v.remove(0))
}

/// An orthonormal-in-coefficients basis of `dim` eigenfunctions at `λ`
/// (each normalized in `L²`).
pub fn eigenfunctions(mg: &MetricGraph, lambda: f64, dim: usize) -> Result<Vec<EigenFunction>, MetricError> {
    let vecs = null_vectors(mg, lambda, dim);
    if vecs.last().is_none_or(|(s, _)| *s > 1e-6) {
        return Err(MetricError::NotAnEigenvalue { lambda });
    }
    Ok(vecs
        .iter()
        .map(|(_, x)| function_from_vector(mg, lambda, x))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricGenericity {
    pub simple: bool,
    /// Non-Dirichlet vertices where `|ψ| ≤ vanish_rel · sup |ψ|`.
    pub vanishing_vertices: Vec<usize>,
    pub nonvanishing: bool,
    pub generic: bool,
}

pub fn check_metric_genericity(
    mg: &MetricGraph,
    pair: &MetricEigenpair,
    f: &EigenFunction,
    tol: &Tolerances,
) -> MetricGenericity {
    let vt = tol.vanish_rel * f.sup();
    let vanishing_vertices: Vec<usize> = (0..mg.graph().vertex_count())
        .filter(|&v| !matches!(mg.condition(v), VertexCondition::Dirichlet))
        .filter(|&v| f.vertex_value(mg, v).abs() <= vt)
        .collect();
    let nonvanishing = vanishing_vertices.is_empty();
    MetricGenericity {
        simple: pair.simple,
        nonvanishing,
        generic: pair.simple && nonvanishing,
        vanishing_vertices,
    }
}

/// Largest `|#{k_n ≤ K} − (Σ L_e) K / π|` over `K` at the computed `k_n`,
/// just below and at each, for the non-negative part of `eigenvalues`
/// (ascending). Negative eigenvalues count at `K = 0`.
pub fn weyl_deviation(mg: &MetricGraph, eigenvalues: &[f64]) -> f64 {
    let total = mg.total_length();
    let ks: Vec<f64> = eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    let mut worst: f64 = 0.0;
    for &k in &ks {
        let weyl = total * k / std::f64::consts::PI;
        let below = ks.iter().filter(|&&x| x < k).count() as f64;
        let at = ks.partition_point(|&x| x <= k) as f64;
        worst = worst.max((below - weyl).abs()).max((at - weyl).abs());
    }
    worst
}
