//! Seeded random instances.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;

/// Closed interval `[lo, hi]` sampled uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uniform {
    pub lo: f64,
    pub hi: f64,
}

impl Uniform {
    pub fn new(lo: f64, hi: f64) -> Self {
        Uniform { lo, hi }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        if self.hi > self.lo {
            rng.random_range(self.lo..=self.hi)
        } else {
            self.lo
        }
    }

    pub fn is_valid(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi
    }
}

/// Largest cycle dimension a simple graph on `n` vertices can have.
pub fn max_cycle_dimension(n: usize) -> usize {
    if n < 2 {
        0
    } else {
        n * (n - 1) / 2 - (n - 1)
    }
}

/// Random tree on `n ≥ 2` vertices: vertex `i ≥ 1` attaches to a uniform
/// earlier vertex.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
    Graph::new(n, &edges).expect("attachment tree is a valid graph")
}

/// Random tree plus `ell` extra edges between distinct non-adjacent pairs.
/// `ell` is capped at [`max_cycle_dimension`].
pub fn random_connected_graph(rng: &mut impl Rng, n: usize, ell: usize) -> Graph {
    let tree = random_tree(rng, n);
    let mut edges = tree.edges().to_vec();
    let mut free: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !tree.are_adjacent(u, v))
        .collect();
    for _ in 0..ell.min(max_cycle_dimension(n)) {
        let i = rng.random_range(0..free.len());
        edges.push(free.swap_remove(i));
    }
    Graph::new(n, &edges).expect("distinct non-adjacent pairs")
}

/// A uniformly chosen leaf.
pub fn random_leaf(rng: &mut impl Rng, g: &Graph) -> Option<usize> {
    let leaves: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.degree(v) == 1).collect();
    leaves.choose(rng).copied()
}
