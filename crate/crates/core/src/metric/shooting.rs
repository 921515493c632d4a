//! Shooting from the leaves of a metric tree toward a boundary root.
//!
//! The state carried along an edge is the direction `(f, f')` of the
//! solution satisfying every condition below it, with `'` the derivative
//! toward the root; `R = f'/f` solves `R' = q − λ − R²`. At an internal
//! vertex the outgoing `R` is the sum of the incoming ones.

use serde::{Deserialize, Serialize};

use super::edge::{propagate, Segment};
use super::solve::{lowest_by_count, MetricEigenpair};
use super::{MetricError, MetricGraph, VertexCondition};
use crate::riccati::ExtReal;
use crate::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingResult {
    pub lambda: f64,
    /// `R(λ, r)`, with the derivative pointing into the root.
    pub root_value: ExtReal,
    /// Zeros of the shooting solution strictly inside the tree.
    pub interior_zeros: usize,
}

fn normalized(f: f64, d: f64) -> (f64, f64) {
    let n = f.hypot(d);
    if n == 0.0 {
        (0.0, 1.0)
    } else {
        (f / n, d / n)
    }
}

/// Sweeps `R(λ, ·)` from the leaves to `root`, which must be a leaf.
pub fn shooting_sweep(mt: &MetricGraph, lambda: f64, root: usize) -> Result<ShootingResult, MetricError> {
    let g = mt.graph();
    if g.degree(root) != 1 {
        return Err(MetricError::NotBoundaryVertex { vertex: root });
    }
    let rooted = g.root_tree(root)?;
    // state (f, d) arriving at each vertex from below, summed over children
    let mut state = vec![(1.0, 0.0); g.vertex_count()];
    let mut zeros = 0;
    for &v in rooted.topo_order() {
        let children = rooted.children(v);
        let (f, d) = if children.is_empty() {
            match mt.condition(v) {
                VertexCondition::Kirchhoff => (1.0, 0.0),
                VertexCondition::Robin(alpha) => (alpha.cos(), alpha.sin()),
                VertexCondition::Dirichlet => (0.0, 1.0),
            }
        } else {
            // R_v = Σ d_i / f_i, kept as a fraction to stay finite
            let mut f = 1.0;
            let mut d = 0.0;
            for &w in children {
                let (fw, dw) = state[w];
                (f, d) = normalized(f * fw, d * fw + f * dw);
            }
            if f == 0.0 && v != root {
                zeros += 1;
            }
            (f, d)
        };
        if v == root {
            state[v] = (f, d);
            break;
        }
        let p = rooted.parent(v).expect("non-root has a parent");
        let e = g.edge_between(v, p).expect("tree edge");
        let mut pieces = mt.pieces(e, lambda);
        if g.edge(e).0 != v {
            pieces.reverse();
        }
        let (mut f, mut d) = (f, d);
        for (i, &(len, z)) in pieces.iter().enumerate() {
            let seg = Segment { x0: 0.0, len, z, f0: f, d0: d };
            zeros += seg.zero_count();
            (f, d) = propagate(z, len, f, d);
            (f, d) = normalized(f, d);
            if f == 0.0 && i + 1 < pieces.len() {
                zeros += 1;
            }
        }
        state[v] = (f, d);
        // arriving at the parent: stored per child, combined when p is visited
    }
    let (f, d) = state[root];
    let root_value = if f == 0.0 { ExtReal::Pole } else { ExtReal::Finite(d / f) };
    Ok(ShootingResult {
        lambda,
        root_value,
        interior_zeros: zeros,
    })
}

/// Number of eigenvalues below `λ` from the shooting solution: interior
/// zeros, plus one when `R(λ, r)` lies below `−tan α_r` (the root condition
/// with the derivative pointing into the root).
pub fn shooting_count(mt: &MetricGraph, lambda: f64, root: usize) -> Result<usize, MetricError> {
    let s = shooting_sweep(mt, lambda, root)?;
    let extra = match (mt.condition(root), s.root_value) {
        (VertexCondition::Dirichlet, _) => 0,
        (_, ExtReal::Pole) => 1,
        (VertexCondition::Kirchhoff, ExtReal::Finite(r)) => usize::from(r < 0.0),
        (VertexCondition::Robin(alpha), ExtReal::Finite(r)) => usize::from(r < -alpha.tan()),
    };
    Ok(s.interior_zeros + extra)
}

/// The lowest `count` eigenvalues located with [`shooting_count`] alone.
pub fn shooting_eigenvalues(mt: &MetricGraph, root: usize, count: usize) -> Result<Vec<MetricEigenpair>, MetricError> {
    shooting_sweep(mt, 0.0, root)?;
    let f = |x: f64| shooting_count(mt, x, root).expect("root checked");
    lowest_by_count(&f, mt.min_potential() - 1.0, count, &Tolerances::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::samples::*;
    use crate::metric::{counting_function, find_lowest, EdgePotential};
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_edge_transfer() {
        let l = 1.7;
        let mg = MetricGraph::kirchhoff(path(2), vec![l]).unwrap();
        for k in [0.3, 0.8, 2.0, 3.9] {
            let s = shooting_sweep(&mg, k * k, 1).unwrap();
            let want = -k * (k * l).tan();
            assert_abs_diff_eq!(s.root_value.finite().unwrap(), want, epsilon = 1e-10 * (1.0 + want.abs()));
            assert_eq!(s.interior_zeros, ((k * l) / std::f64::consts::PI + 0.5).floor() as usize);
        }
        let s = shooting_sweep(&mg, -4.0, 1).unwrap();
        assert_eq!(s.interior_zeros, 0);
        assert!(s.root_value.finite().unwrap() > 0.0);
    }

    fn rk4_riccati(q: f64, lambda: f64, r0: f64, len: f64) -> f64 {
        // dR/dx = q − λ − R²
        let n = 20_000;
        let h = len / n as f64;
        let rhs = |r: f64| q - lambda - r * r;
        let mut r = r0;
        for _ in 0..n {
            let k1 = rhs(r);
            let k2 = rhs(r + 0.5 * h * k1);
            let k3 = rhs(r + 0.5 * h * k2);
            let k4 = rhs(r + h * k3);
            r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        r
    }

    #[test]
    fn matches_riccati_ode() {
        // path 2 - 1 - 0 with a Robin leaf at 2, root 0, below the first pole
        let conds = vec![
            VertexCondition::Kirchhoff,
            VertexCondition::Kirchhoff,
            VertexCondition::Robin(0.4),
        ];
        let pots = vec![EdgePotential::constant(0.5), EdgePotential::constant(-0.3)];
        let mg = MetricGraph::new(path(3), vec![0.6, 0.5], conds, pots).unwrap();
        let lambda = 0.9;
        let r1 = rk4_riccati(-0.3, lambda, 0.4f64.tan(), 0.5);
        let r0 = rk4_riccati(0.5, lambda, r1, 0.6);
        let s = shooting_sweep(&mg, lambda, 0).unwrap();
        assert_abs_diff_eq!(s.root_value.finite().unwrap(), r0, epsilon = 1e-9);
    }

    #[test]
    fn counts_agree_with_vertex_matrix() {
        let mg = MetricGraph::kirchhoff(five_vertex_tree(), vec![0.61, 0.93, 1.27, 0.74]).unwrap();
        for i in 0..300 {
            let lambda = -1.0 + 0.37 * i as f64;
            for root in [0, 1, 2] {
                assert_eq!(
                    shooting_count(&mg, lambda, root).unwrap(),
                    counting_function(&mg, lambda),
                    "lambda {lambda} root {root}"
                );
            }
        }
    }

    #[test]
    fn eigenvalues_agree() {
        let mut conds = vec![VertexCondition::Kirchhoff; 5];
        conds[0] = VertexCondition::Dirichlet;
        conds[2] = VertexCondition::Robin(-0.7);
        let mg = MetricGraph::new(
            five_vertex_tree(),
            vec![0.61, 0.93, 1.27, 0.74],
            conds,
            vec![EdgePotential::zero(); 4],
        )
        .unwrap();
        let a = find_lowest(&mg, 12).unwrap();
        for root in [0, 1, 2] {
            let b = shooting_eigenvalues(&mg, root, 12).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert_abs_diff_eq!(x.lambda, y.lambda, epsilon = 1e-8 * x.lambda.abs().max(1.0));
            }
        }
    }

    #[test]
    fn root_must_be_boundary() {
        let mg = MetricGraph::kirchhoff(path(3), vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            shooting_sweep(&mg, 1.0, 1),
            Err(MetricError::NotBoundaryVertex { vertex: 1 })
        ));
    }
}
