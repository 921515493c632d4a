//! Riccati variables on rooted discrete trees.
//!
//! For a rooted tree and spectral parameter `λ`, eliminating vertices from
//! the leaves upward gives `R_v = q_v − λ − Σ_{w child of v} 1/R_w`. These
//! are the pivots of an `LDLᵀ` factorization of `H − λ`, so the number of
//! negative `R_v` counts eigenvalues below `λ`, and the zeros of the root
//! value `R_r` are the eigenvalues.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::discrete::{fix_sign, Potential};
use crate::graph::RootedTree;

/// Values closer to zero than this are treated as exact zeros and make the
/// parent a pole.
pub const POLE_TOL: f64 = 1e-12;

const GRID_PER_UNIT: f64 = 64.0;
const MAX_REFINE: u32 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiccatiError {
    #[error("potential has {got} entries, tree has {expected} vertices")]
    PotentialLength { expected: usize, got: usize },
    #[error("Riccati value at vertex {vertex} vanishes or has a pole at lambda = {lambda}")]
    NonGenericSweep { vertex: usize, lambda: f64 },
    #[error("no eigenvalue within the guard band around lambda = {lambda}")]
    NotAnEigenvalue { lambda: f64 },
    #[error("could not isolate eigenvalues in [{a}, {b}]")]
    BracketingFailure { a: f64, b: f64 },
    #[error("eigenvector reconstruction needs at least two vertices")]
    TooSmall,
    #[error("interval [{a}, {b}] is empty or not finite")]
    BadInterval { a: f64, b: f64 },
}

/// A real number or a pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtReal {
    Finite(f64),
    Pole,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::Pole => None,
        }
    }

    pub fn is_negative(self) -> bool {
        matches!(self, ExtReal::Finite(x) if x < 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiccatiSweep {
    pub lambda: f64,
    /// `R_v` for every vertex, root included.
    pub values: Vec<ExtReal>,
    pub root_value: ExtReal,
    /// Number of negative finite `R_v` over the non-root vertices.
    pub n_less: usize,
    /// `false` when some `R_w` fell within [`POLE_TOL`] of zero.
    pub valid: bool,
}

impl RiccatiSweep {
    /// Number of eigenvalues of `H` strictly below `lambda`.
    ///
    /// A pole counts as negative and an exact zero as positive, which is
    /// the limit from the left since every `R_v` decreases in `λ`.
    pub fn count_below(&self) -> usize {
        self.values
            .iter()
            .filter(|v| matches!(v, ExtReal::Pole) || v.is_negative())
            .count()
    }

    /// `N_v^<`-style count restricted to the non-root vertices, poles included.
    fn non_root_below(&self, root: usize) -> usize {
        self.values
            .iter()
            .enumerate()
            .filter(|&(v, x)| v != root && (matches!(x, ExtReal::Pole) || x.is_negative()))
            .count()
    }
}

fn check_potential(t: &RootedTree, q: &Potential) -> Result<(), RiccatiError> {
    if q.values().len() != t.vertex_count() {
        return Err(RiccatiError::PotentialLength {
            expected: t.vertex_count(),
            got: q.values().len(),
        });
    }
    Ok(())
}

/// Evaluates every `R_v(λ)` from the leaves to the root.
pub fn riccati_sweep(t: &RootedTree, q: &Potential, lambda: f64) -> Result<RiccatiSweep, RiccatiError> {
    check_potential(t, q)?;
    let q = q.values();
    let mut values = vec![ExtReal::Pole; t.vertex_count()];
    let mut valid = true;
    for &v in t.topo_order() {
        let mut r = q[v] - lambda;
        let mut pole = false;
        for &w in t.children(v) {
            match values[w] {
                ExtReal::Pole => {}
                ExtReal::Finite(x) if x.abs() < POLE_TOL => {
                    valid = false;
                    pole = true;
                }
                ExtReal::Finite(x) => r -= 1.0 / x,
            }
        }
        values[v] = if pole { ExtReal::Pole } else { ExtReal::Finite(r) };
    }
    let root = t.root();
    let n_less = values
        .iter()
        .enumerate()
        .filter(|&(v, x)| v != root && x.is_negative())
        .count();
    Ok(RiccatiSweep {
        lambda,
        root_value: values[root],
        values,
        n_less,
        valid,
    })
}

/// Gershgorin interval `[min(q_v − deg v), max(q_v + deg v)]` containing the spectrum.
pub fn gershgorin_bounds(t: &RootedTree, q: &Potential) -> (f64, f64) {
    let g = t.graph();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (v, &qv) in q.values().iter().enumerate() {
        let d = g.degree(v) as f64;
        lo = lo.min(qv - d);
        hi = hi.max(qv + d);
    }
    (lo, hi)
}

fn spectral_scale(t: &RootedTree, q: &Potential) -> f64 {
    let (lo, hi) = gershgorin_bounds(t, q);
    lo.abs().max(hi.abs()).max(1.0)
}

/// All eigenvalues of `H` in `[a, b]`, ascending, repeated by multiplicity.
///
/// The interval is covered by a grid of 64 cells per unit of `λ`. Cells are
/// split until each holds one eigenvalue and no pole of `R_r`; there `R_r`
/// is continuous and decreasing, and the eigenvalue is found by bisection on
/// its sign. A cluster that does not separate down to `1e-12·scale` is
/// returned as a repeated eigenvalue.
pub fn locate_eigenvalues(
    t: &RootedTree,
    q: &Potential,
    a: f64,
    b: f64,
) -> Result<Vec<f64>, RiccatiError> {
    check_potential(t, q)?;
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(RiccatiError::BadInterval { a, b });
    }
    let scale = spectral_scale(t, q);
    let b = b + 1e-12 * scale;
    let mut last = None;
    for refine in 0..=MAX_REFINE {
        let cells = ((b - a) * GRID_PER_UNIT * 4f64.powi(refine as i32)).ceil().max(1.0) as usize;
        match locate_on_grid(t, q, a, b, cells, scale) {
            Ok(found) => return Ok(found),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or(RiccatiError::BracketingFailure { a, b }))
}

fn locate_on_grid(
    t: &RootedTree,
    q: &Potential,
    a: f64,
    b: f64,
    cells: usize,
    scale: f64,
) -> Result<Vec<f64>, RiccatiError> {
    let root = t.root();
    let sweep = |x: f64| riccati_sweep(t, q, x).expect("potential checked");
    let mut out = Vec::new();
    let mut left = sweep(a);
    for i in 1..=cells {
        let x = if i == cells { b } else { a + (b - a) * i as f64 / cells as f64 };
        let right = sweep(x);
        if right.count_below() > left.count_below() {
            isolate(&sweep, root, left.clone(), right.clone(), scale, 0, &mut out)?;
        }
        left = right;
    }
    Ok(out)
}

fn isolate(
    sweep: &dyn Fn(f64) -> RiccatiSweep,
    root: usize,
    left: RiccatiSweep,
    right: RiccatiSweep,
    scale: f64,
    depth: u32,
    out: &mut Vec<f64>,
) -> Result<(), RiccatiError> {
    let count = right.count_below().saturating_sub(left.count_below());
    if count == 0 {
        return Ok(());
    }
    let (a, b) = (left.lambda, right.lambda);
    if count == 1 && left.non_root_below(root) == right.non_root_below(root) {
        out.push(bisect_root(sweep, a, b));
        return Ok(());
    }
    if b - a <= 1e-12 * scale {
        let mid = 0.5 * (a + b);
        out.extend(std::iter::repeat_n(mid, count));
        return Ok(());
    }
    if depth > 200 {
        return Err(RiccatiError::BracketingFailure { a, b });
    }
    let mid = sweep(0.5 * (a + b));
    isolate(sweep, root, left, mid.clone(), scale, depth + 1, out)?;
    isolate(sweep, root, mid, right, scale, depth + 1, out)
}

/// Zero of the decreasing, pole-free `R_r` on `[a, b]`.
fn bisect_root(sweep: &dyn Fn(f64) -> RiccatiSweep, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        match sweep(mid).root_value {
            ExtReal::Finite(r) if r > 0.0 => a = mid,
            ExtReal::Finite(r) if r < 0.0 => b = mid,
            ExtReal::Finite(_) => return mid,
            // unreachable inside a pole-free cell; shrink from the left
            ExtReal::Pole => a = mid,
        }
    }
    0.5 * (a + b)
}

/// `ν(ψ⁽ⁿ⁾) = N_r^<(λ_n) + 1` for a generic eigenvalue `λ_n`.
///
/// A tiny `R_v` below a non-root parent comes with a huge `R_parent` of the
/// opposite sign, so the pair contributes one negative value either way and
/// the count does not depend on rounding. Fails with
/// [`RiccatiError::NonGenericSweep`] when a non-root value is a pole or a
/// child of the root has `|R_w| < 1e-8·scale` (the eigenvector nearly
/// vanishes at the root), and with [`RiccatiError::NotAnEigenvalue`] when
/// no eigenvalue lies within `1e-6·scale` of `lambda`.
pub fn nodal_count_via_riccati(t: &RootedTree, q: &Potential, lambda: f64) -> Result<usize, RiccatiError> {
    let scale = spectral_scale(t, q);
    let s = riccati_sweep(t, q, lambda)?;
    let root = t.root();
    for (v, x) in s.values.iter().enumerate() {
        if v == root {
            continue;
        }
        let bad = match x {
            ExtReal::Pole => true,
            ExtReal::Finite(r) => t.parent(v) == Some(root) && r.abs() < 1e-8 * scale,
        };
        if bad {
            return Err(RiccatiError::NonGenericSweep { vertex: v, lambda });
        }
    }
    let eps = 1e-6 * scale;
    let below = riccati_sweep(t, q, lambda - eps)?;
    let above = riccati_sweep(t, q, lambda + eps)?;
    if above.count_below() <= below.count_below() {
        return Err(RiccatiError::NotAnEigenvalue { lambda });
    }
    Ok(s.n_less + 1)
}

/// Unit eigenvector from a sweep at an eigenvalue: `ψ_r = 1` and
/// `ψ_v = ψ_parent / R_v` downward, then normalized with the usual sign
/// convention.
pub fn eigenvector_from_riccati(t: &RootedTree, sweep: &RiccatiSweep) -> Result<DVector<f64>, RiccatiError> {
    let n = t.vertex_count();
    if n < 2 {
        return Err(RiccatiError::TooSmall);
    }
    let root = t.root();
    let mut psi = DVector::zeros(n);
    psi[root] = 1.0;
    for &v in t.topo_order().iter().rev() {
        let Some(p) = t.parent(v) else { continue };
        match sweep.values[v] {
            ExtReal::Finite(r) if r.abs() >= POLE_TOL => psi[v] = psi[p] / r,
            _ => {
                return Err(RiccatiError::NonGenericSweep {
                    vertex: v,
                    lambda: sweep.lambda,
                })
            }
        }
    }
    psi.normalize_mut();
    fix_sign(&mut psi);
    Ok(psi)
}
