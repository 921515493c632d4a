//! Helpers shared by the integration tests and the acceptance target.
#![allow(dead_code)]

use nalgebra::DMatrix;
use nodal_core::discrete::{assemble_hamiltonian, eigen_decompose, Potential};
use nodal_core::riccati::{gershgorin_bounds, riccati_sweep, ExtReal, RiccatiSweep};
use nodal_core::RootedTree;
use std::path::PathBuf;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "graph"))
        .collect();
    files.sort();
    files
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Zero,
    Pole,
}

/// Zeros and poles of every `R_v` found by scanning.
pub struct Scan {
    /// Per vertex, ascending `(λ, kind)`.
    pub events: Vec<Vec<(f64, Kind)>>,
    /// Final cells of the scan as consecutive sweeps.
    pub cells: Vec<(RiccatiSweep, RiccatiSweep)>,
}

fn finite(x: ExtReal) -> Option<f64> {
    x.finite()
}

/// Anything that could hide an event inside `[l, r]`: a sign change or an
/// increase of some `R_v`.
fn active(l: &RiccatiSweep, r: &RiccatiSweep) -> bool {
    l.values.iter().zip(&r.values).any(|(a, b)| match (finite(*a), finite(*b)) {
        (Some(x), Some(y)) => (x > 0.0) != (y > 0.0) || y >= x,
        _ => true,
    })
}

/// Uniform scan with `points` points over the Gershgorin window widened by
/// one, each active cell bisected down to `min_width`.
pub fn scan(t: &RootedTree, q: &Potential, points: usize, min_width: f64) -> Scan {
    let (lo, hi) = gershgorin_bounds(t, q);
    let (lo, hi) = (lo - 1.0, hi + 1.0);
    // sample points landing on an exact pole are nudged by a fraction of `step`
    let sweep = |x: f64, step: f64| {
        (0..8)
            .map(|i| riccati_sweep(t, q, x + step * i as f64 / 64.0).unwrap())
            .find(|s| s.valid)
            .expect("sweep away from poles")
    };
    let step = (hi - lo) / (points - 1) as f64;
    let grid: Vec<RiccatiSweep> = (0..points).map(|i| sweep(lo + step * i as f64, step)).collect();
    let mut cells = Vec::new();
    for w in grid.windows(2) {
        let mut stack = vec![(w[0].clone(), w[1].clone())];
        while let Some((l, r)) = stack.pop() {
            if r.lambda - l.lambda > min_width && active(&l, &r) {
                let m = sweep(0.5 * (l.lambda + r.lambda), r.lambda - l.lambda);
                stack.push((m.clone(), r));
                stack.push((l, m));
            } else {
                cells.push((l, r));
            }
        }
    }
    cells.sort_by(|a, b| a.0.lambda.total_cmp(&b.0.lambda));
    let n = t.vertex_count();
    let mut events = vec![Vec::new(); n];
    for (l, r) in &cells {
        for v in 0..n {
            if let (Some(x), Some(y)) = (finite(l.values[v]), finite(r.values[v])) {
                let mid = 0.5 * (l.lambda + r.lambda);
                if x > 0.0 && y <= 0.0 {
                    events[v].push((mid, Kind::Zero));
                } else if x < 0.0 && y > 0.0 {
                    events[v].push((mid, Kind::Pole));
                }
            }
        }
    }
    Scan { events, cells }
}

/// Eigenvalues of `H` restricted to the subtree hanging from `v` (with `v`).
pub fn subtree_eigenvalues(t: &RootedTree, q: &Potential, v: usize) -> Vec<f64> {
    let h = assemble_hamiltonian(t.graph(), q).unwrap();
    let idx = t.subtree(v);
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| h[(idx[i], idx[j])]);
    eigen_decompose(&sub).unwrap().eigenvalues
}

fn matches(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// `N_v^<` and `N_v^≤`; `None` where some `R_u` is a pole.
fn counters(t: &RootedTree, s: &RiccatiSweep, v: usize) -> Option<(usize, usize)> {
    let mut less = 0;
    for u in t.subtree(v) {
        if u != v && finite(s.values[u])? < 0.0 {
            less += 1;
        }
    }
    let own = usize::from(finite(s.values[v])? < 0.0);
    Some((less, less + own))
}

/// Checks pole/zero duality, monotonicity, interlacing and the counter laws
/// on one tree; returns a description of the first failure.
pub fn check_lemma(t: &RootedTree, q: &Potential, points: usize, tol: f64) -> Result<(), String> {
    let s = scan(t, q, points, 1e-10);
    let n = t.vertex_count();
    for v in 0..n {
        let zeros: Vec<f64> = s.events[v].iter().filter(|e| e.1 == Kind::Zero).map(|e| e.0).collect();
        let poles: Vec<f64> = s.events[v].iter().filter(|e| e.1 == Kind::Pole).map(|e| e.0).collect();

        // zeros of R_v are the eigenvalues of the subtree below and at v
        let oracle = subtree_eigenvalues(t, q, v);
        if !matches(&zeros, &oracle, tol) {
            return Err(format!("vertex {v}: zeros {zeros:?} vs subtree spectrum {oracle:?}"));
        }

        // duality: poles of R_v are the zeros of its children
        let mut child_zeros: Vec<f64> = t
            .children(v)
            .iter()
            .flat_map(|&w| s.events[w].iter().filter(|e| e.1 == Kind::Zero).map(|e| e.0))
            .collect();
        child_zeros.sort_by(f64::total_cmp);
        if !matches(&poles, &child_zeros, tol) {
            return Err(format!("vertex {v}: poles {poles:?} vs child zeros {child_zeros:?}"));
        }

        // interlacing: Z (P Z)*
        let kinds: Vec<Kind> = s.events[v].iter().map(|e| e.1).collect();
        let alternating = !kinds.is_empty()
            && kinds.len() % 2 == 1
            && kinds
                .iter()
                .enumerate()
                .all(|(i, k)| *k == if i % 2 == 0 { Kind::Zero } else { Kind::Pole });
        if !alternating {
            return Err(format!("vertex {v}: events do not alternate: {:?}", s.events[v]));
        }
    }

    for (l, r) in &s.cells {
        for v in 0..n {
            let (Some(x), Some(y)) = (finite(l.values[v]), finite(r.values[v])) else {
                continue;
            };
            let pole = x < 0.0 && y > 0.0;
            let zero = x > 0.0 && y <= 0.0;
            // monotone decrease away from poles
            if !pole && y >= x {
                return Err(format!(
                    "vertex {v}: R increases on [{}, {}] ({x} -> {y})",
                    l.lambda, r.lambda
                ));
            }
            let (Some((la, lb)), Some((ra, rb))) = (counters(t, l, v), counters(t, r, v)) else {
                continue;
            };
            if rb as i64 - lb as i64 != i64::from(zero) {
                return Err(format!("vertex {v}: N<= jumps by {} at {}", rb as i64 - lb as i64, r.lambda));
            }
            if ra as i64 - la as i64 != i64::from(pole) {
                return Err(format!("vertex {v}: N< jumps by {} at {}", ra as i64 - la as i64, r.lambda));
            }
        }
    }
    Ok(())
}
