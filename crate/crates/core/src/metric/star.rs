//! Dirichlet stars and the construction whose eigenfunction at `k = mπ`
//! vanishes at the centre.
//!
//! With edges `L₁ = 1`, `L₂ = 1/m`, the function `sin(mπx)` on the first two
//! edges (measured from the leaves), suitably weighted and zero elsewhere,
//! is an eigenfunction at `k = mπ`. The remaining lengths are irrational
//! perturbations of 1 so that no other cotangent poles collide.

use serde::{Deserialize, Serialize};

use super::{EdgePotential, MetricError, MetricGraph, VertexCondition};
use crate::graph::samples::star;

/// Side of 1 on which the extra edge lengths `1 ∓ √p/100` are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum StarOffset {
    /// `L_j = 1 − √p_j / 100`: the eigenvalue `(mπ)²` has index `(m−1)(N−1) + 2`.
    #[default]
    Below,
    /// `L_j = 1 + √p_j / 100`: one more cotangent branch per extra edge lies
    /// below `mπ`, so the index becomes `m(N−1) + 1`.
    Above,
}

/// `Σ_j cot(k L_j)`; zero exactly at the eigenvalues of the Dirichlet star
/// away from the poles `k L_j ∈ πℤ`.
pub fn star_secular(lengths: &[f64], k: f64) -> Result<f64, MetricError> {
    let mut sum = 0.0;
    for &l in lengths {
        let (s, c) = (k * l).sin_cos();
        if s.abs() < 1e-12 {
            return Err(MetricError::PoleProximity { k });
        }
        sum += c / s;
    }
    Ok(sum)
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().take_while(|&&p| p * p <= c).all(|&p| !c.is_multiple_of(p)) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Edge lengths `1, 1/m, 1 ∓ √2/100, 1 ∓ √3/100, 1 ∓ √5/100, …`.
pub fn star_lengths(m: usize, edges: usize, offset: StarOffset) -> Vec<f64> {
    let sign = match offset {
        StarOffset::Below => -1.0,
        StarOffset::Above => 1.0,
    };
    let mut lengths = vec![1.0, 1.0 / m as f64];
    lengths.extend(
        first_primes(edges.saturating_sub(2))
            .into_iter()
            .map(|p| 1.0 + sign * (p as f64).sqrt() / 100.0),
    );
    lengths
}

/// Star with `edges` edges (centre 0, edge `j` running from the centre to
/// leaf `j + 1`), Dirichlet leaves, Kirchhoff centre, zero potential.
pub fn build_star_counterexample(m: usize, edges: usize, offset: StarOffset) -> Result<MetricGraph, MetricError> {
    if m < 2 || edges < 3 {
        return Err(MetricError::BadStar { m, edges });
    }
    let mut conditions = vec![VertexCondition::Dirichlet; edges + 1];
    conditions[0] = VertexCondition::Kirchhoff;
    MetricGraph::new(
        star(edges),
        star_lengths(m, edges, offset),
        conditions,
        vec![EdgePotential::zero(); edges],
    )
}

/// `true` when no pair of lengths (other than the first two, which are
/// commensurate by design) satisfies `|a L_i − b L_j| ≤ tol` with integers
/// `1 ≤ a, b ≤ max_coef`.
pub fn incommensurability_audit(lengths: &[f64], max_coef: u32, tol: f64) -> bool {
    for i in 0..lengths.len() {
        for j in i + 1..lengths.len() {
            if (i, j) == (0, 1) {
                continue;
            }
            for a in 1..=max_coef {
                for b in 1..=max_coef {
                    if (a as f64 * lengths[i] - b as f64 * lengths[j]).abs() <= tol {
                        return false;
                    }
                }
            }
        }
    }
    true
}
