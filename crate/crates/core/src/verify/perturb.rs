//! Random jitter until the first `n` eigenpairs are generic.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::discrete::{assemble_hamiltonian, check_genericity_with, eigen_decompose, Potential};
use crate::graph::Graph;
use crate::metric::{check_metric_genericity, eigenfunction, find_lowest_with, MetricGraph};
use crate::Tolerances;

const START: f64 = 1e-6;
const CAP: f64 = 1e-3;
const DRAWS_PER_MAGNITUDE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationLog {
    /// Jitter magnitude that succeeded; 0 when the input was already generic.
    pub magnitude: f64,
    /// Number of perturbed instances tried.
    pub retries: usize,
}

fn magnitudes() -> impl Iterator<Item = f64> {
    std::iter::successors(Some(START), |m| Some(m * 10.0)).take_while(|m| *m <= CAP * (1.0 + 1e-9))
}

fn search<T>(
    base: T,
    rng: &mut impl Rng,
    mut generic: impl FnMut(&T) -> bool,
    mut jitter: impl FnMut(&T, f64, &mut dyn FnMut() -> f64) -> Option<T>,
) -> Result<(T, PerturbationLog), VerifyError> {
    if generic(&base) {
        return Ok((base, PerturbationLog { magnitude: 0.0, retries: 0 }));
    }
    let mut retries = 0;
    let mut last = 0.0;
    for magnitude in magnitudes() {
        last = magnitude;
        for _ in 0..DRAWS_PER_MAGNITUDE {
            retries += 1;
            let mut draw = || rng.random_range(-1.0..=1.0);
            if let Some(candidate) = jitter(&base, magnitude, &mut draw) {
                if generic(&candidate) {
                    return Ok((candidate, PerturbationLog { magnitude, retries }));
                }
            }
        }
    }
    Err(VerifyError::PerturbationExhausted {
        magnitude: last,
        retries,
    })
}

fn discrete_generic_up_to(g: &Graph, q: &Potential, n: usize, tol: &Tolerances) -> bool {
    let Ok(s) = assemble_hamiltonian(g, q).and_then(|h| eigen_decompose(&h)) else {
        return false;
    };
    (1..=n.min(s.len())).all(|k| check_genericity_with(&s, k, tol).generic)
}

/// Additive potential jitter `q_v + δ·U(−1, 1)` until `λ_1 … λ_n` are all
/// generic.
pub fn perturb_discrete_to_generic(
    g: &Graph,
    q: &Potential,
    n: usize,
    rng: &mut impl Rng,
    tol: &Tolerances,
) -> Result<(Potential, PerturbationLog), VerifyError> {
    search(
        q.clone(),
        rng,
        |p| discrete_generic_up_to(g, p, n, tol),
        |p, delta, draw| Some(Potential(p.values().iter().map(|x| x + delta * draw()).collect())),
    )
}

fn metric_generic_up_to(mg: &MetricGraph, n: usize, tol: &Tolerances) -> bool {
    let Ok(pairs) = find_lowest_with(mg, n, tol) else {
        return false;
    };
    pairs.iter().all(|p| {
        p.simple
            && eigenfunction(mg, p).is_ok_and(|f| check_metric_genericity(mg, p, &f, tol).generic)
    })
}

/// Multiplicative length jitter `L_e (1 + δ·U(−1, 1))` until `λ_1 … λ_n`
/// are all generic.
pub fn perturb_metric_to_generic(
    mg: &MetricGraph,
    n: usize,
    rng: &mut impl Rng,
    tol: &Tolerances,
) -> Result<(MetricGraph, PerturbationLog), VerifyError> {
    search(
        mg.clone(),
        rng,
        |m| metric_generic_up_to(m, n, tol),
        |m, delta, draw| {
            let lengths = m.lengths().iter().map(|l| l * (1.0 + delta * draw())).collect();
            m.with_lengths(lengths).ok()
        },
    )
}
