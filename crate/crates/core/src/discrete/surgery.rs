//! Deleting an edge while keeping a given eigenvector.

use crate::graph::Graph;

use super::{DiscreteError, Potential};

/// Result of [`cut_with_surgery`].
#[derive(Debug, Clone, PartialEq)]
pub struct Surgery {
    pub graph: Graph,
    pub potential: Potential,
    /// `φ_{v2} / φ_{v1}`
    pub alpha: f64,
}

/// Deletes the edge `(v1, v2)` and shifts the potential at its endpoints so
/// that `phi` stays an eigenvector with the same eigenvalue:
/// `p_{v1} = q_{v1} − α`, `p_{v2} = q_{v2} − 1/α` with `α = φ_{v2}/φ_{v1}`.
///
/// The quadratic forms then differ by `2ψ₁ψ₂ − αψ₁² − ψ₂²/α`, which is
/// `≤ 0` for `α > 0`.
pub fn cut_with_surgery(
    g: &Graph,
    q: &Potential,
    phi: &[f64],
    v1: usize,
    v2: usize,
) -> Result<Surgery, DiscreteError> {
    q.check(g)?;
    if phi.len() != g.vertex_count() {
        return Err(DiscreteError::VectorLength {
            expected: g.vertex_count(),
            got: phi.len(),
        });
    }
    let edge = g
        .edge_between(v1, v2)
        .ok_or(DiscreteError::NoSuchEdge { u: v1, v: v2 })?;
    if !g.is_deletable(edge) {
        return Err(DiscreteError::DisconnectingCut { u: v1, v: v2 });
    }
    let tol = 1e-8 * phi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for v in [v1, v2] {
        if phi[v].abs() <= tol {
            return Err(DiscreteError::VanishingEndpoint { vertex: v });
        }
    }
    let alpha = phi[v2] / phi[v1];
    let mut p = q.0.clone();
    p[v1] -= alpha;
    p[v2] -= 1.0 / alpha;
    Ok(Surgery {
        graph: g.without_edges(&[edge])?,
        potential: Potential(p),
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{
        assemble_hamiltonian, eigen_decompose, nodal_count, quadratic_form,
    };
    use crate::graph::samples::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn residual(g: &Graph, p: &Potential, lambda: f64, phi: &DVector<f64>) -> f64 {
        let h = assemble_hamiltonian(g, p).unwrap();
        (h * phi - phi * lambda).norm()
    }

    #[test]
    fn triangle_ground_state() {
        let g = cycle(3);
        let q = Potential::zero(3);
        let s = eigen_decompose(&assemble_hamiltonian(&g, &q).unwrap()).unwrap();
        let (lambda, phi) = s.pair(1);
        assert_abs_diff_eq!(lambda, -2.0, epsilon = 1e-12);
        let cut = cut_with_surgery(&g, &q, phi.as_slice(), 0, 2).unwrap();
        assert_abs_diff_eq!(cut.alpha, 1.0, epsilon = 1e-12);
        assert!(cut.graph.is_tree());
        assert_abs_diff_eq!(cut.potential.0[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cut.potential.0[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cut.potential.0[2], -1.0, epsilon = 1e-12);
        assert!(residual(&cut.graph, &cut.potential, lambda, phi) < 1e-12);
    }

    #[test]
    fn equal_endpoints_subtract_one() {
        let g = cycle(4);
        let q = Potential(vec![0.3, -0.2, 0.1, 0.4]);
        let phi = [0.5, 0.5, -0.1, 0.2];
        let cut = cut_with_surgery(&g, &q, &phi, 0, 1).unwrap();
        assert_eq!(cut.alpha, 1.0);
        assert_eq!(cut.potential.0, vec![-0.7, -1.2, 0.1, 0.4]);
    }

    #[test]
    fn rejects_bad_cuts() {
        let q = Potential::zero(3);
        assert!(matches!(
            cut_with_surgery(&path(3), &q, &[1.0, 1.0, 1.0], 0, 1),
            Err(DiscreteError::DisconnectingCut { .. })
        ));
        assert!(matches!(
            cut_with_surgery(&cycle(3), &q, &[1.0, 0.0, 1.0], 0, 1),
            Err(DiscreteError::VanishingEndpoint { vertex: 1 })
        ));
        assert!(matches!(
            cut_with_surgery(&path(3), &q, &[1.0, 1.0, 1.0], 0, 2),
            Err(DiscreteError::NoSuchEdge { .. })
        ));
    }

    #[test]
    fn two_cycle_graph_cut_keeps_eigenpair() {
        let g = two_cycle_graph();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = Potential((0..7).map(|_| rng.random_range(-1.0..1.0)).collect());
        let s = eigen_decompose(&assemble_hamiltonian(&g, &q).unwrap()).unwrap();
        let (lambda, phi) = s.pair(3);
        let cut = cut_with_surgery(&g, &q, phi.as_slice(), 1, 2).unwrap();
        assert!(residual(&cut.graph, &cut.potential, lambda, phi) < 1e-9);
    }

    #[test]
    fn form_difference_and_interlacing() {
        let g = two_cycle_graph();
        let mut seen_pos = false;
        let mut seen_neg = false;
        for seed in 0..30 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = Potential((0..7).map(|_| rng.random_range(-1.0..1.0)).collect());
            let s = eigen_decompose(&assemble_hamiltonian(&g, &q).unwrap()).unwrap();
            let n = rng.random_range(1..=7);
            let (_, phi) = s.pair(n);
            let (v1, v2) = g.edge(6);
            let Ok(cut) = cut_with_surgery(&g, &q, phi.as_slice(), v1, v2) else {
                continue;
            };
            let a = cut.alpha;
            for _ in 0..100 {
                let psi: Vec<f64> = (0..7).map(|_| rng.random_range(-1.0..1.0)).collect();
                let lhs = quadratic_form(&cut.graph, &cut.potential, &psi).unwrap();
                let rhs = quadratic_form(&g, &q, &psi).unwrap() + 2.0 * psi[v1] * psi[v2]
                    - a * psi[v1].powi(2)
                    - psi[v2].powi(2) / a;
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10 * (1.0 + a.abs() + 1.0 / a.abs()));
            }
            let mu = eigen_decompose(&assemble_hamiltonian(&cut.graph, &cut.potential).unwrap())
                .unwrap()
                .eigenvalues;
            let nu_g = nodal_count(&g, phi.as_slice()).unwrap();
            let nu_t = nodal_count(&cut.graph, phi.as_slice()).unwrap();
            if a > 0.0 {
                seen_pos = true;
                for j in 0..7 {
                    assert!(mu[j] <= s.eigenvalues[j] + 1e-9);
                }
                assert!(nu_t == nu_g || nu_t == nu_g + 1);
            } else {
                seen_neg = true;
                for j in 1..7 {
                    assert!(mu[j - 1] <= s.eigenvalues[j] + 1e-9);
                }
                assert_eq!(nu_t, nu_g);
            }
        }
        assert!(seen_pos && seen_neg);
    }
}
