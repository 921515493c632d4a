//! Discrete Schrödinger operators `(Hψ)_u = −Σ_{v∼u} ψ_v + q_u ψ_u`.

mod eigen;
mod surgery;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{sign_components, support_sign_components, Graph, GraphError, SignPattern};
use crate::Tolerances;

pub use eigen::{eigen_decompose, eigenvalues, fix_sign, Spectrum};
pub use surgery::{cut_with_surgery, Surgery};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiscreteError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("Jacobi iteration did not converge in {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },
    #[error("potential has {got} entries, graph has {expected} vertices")]
    PotentialLength { expected: usize, got: usize },
    #[error("vector has {got} entries, graph has {expected} vertices")]
    VectorLength { expected: usize, got: usize },
    #[error("edge ({u}, {v}) is not in the graph")]
    NoSuchEdge { u: usize, v: usize },
    #[error("deleting edge ({u}, {v}) disconnects the graph")]
    DisconnectingCut { u: usize, v: usize },
    #[error("eigenvector vanishes at cut endpoint {vertex}")]
    VanishingEndpoint { vertex: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Vertex potential `q_u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential(pub Vec<f64>);

impl Potential {
    pub fn zero(n: usize) -> Self {
        Potential(vec![0.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    fn check(&self, g: &Graph) -> Result<(), DiscreteError> {
        if self.0.len() != g.vertex_count() {
            return Err(DiscreteError::PotentialLength {
                expected: g.vertex_count(),
                got: self.0.len(),
            });
        }
        Ok(())
    }
}

/// `H_jk = −1` for adjacent `j, k`, `q_j` on the diagonal, zero elsewhere.
pub fn assemble_hamiltonian(g: &Graph, q: &Potential) -> Result<DMatrix<f64>, DiscreteError> {
    q.check(g)?;
    let n = g.vertex_count();
    let mut h = DMatrix::from_diagonal(&DVector::from_column_slice(&q.0));
    for &(u, v) in g.edges() {
        h[(u, v)] = -1.0;
        h[(v, u)] = -1.0;
    }
    debug_assert_eq!(h.nrows(), n);
    Ok(h)
}

/// `Σ_jk H_jk ψ_j ψ_k`, evaluated edge by edge.
pub fn quadratic_form(g: &Graph, q: &Potential, psi: &[f64]) -> Result<f64, DiscreteError> {
    q.check(g)?;
    if psi.len() != g.vertex_count() {
        return Err(DiscreteError::VectorLength {
            expected: g.vertex_count(),
            got: psi.len(),
        });
    }
    let diag: f64 = q.0.iter().zip(psi).map(|(qj, x)| qj * x * x).sum();
    let off: f64 = g.edges().iter().map(|&(u, v)| psi[u] * psi[v]).sum();
    Ok(diag - 2.0 * off)
}

/// Strong nodal domain count of `psi`; fails if `psi` vanishes (relative to
/// `vanish_rel · ‖ψ‖∞`) anywhere.
pub fn nodal_count(g: &Graph, psi: &[f64]) -> Result<usize, DiscreteError> {
    nodal_count_with(g, psi, &Tolerances::default())
}

pub fn nodal_count_with(g: &Graph, psi: &[f64], tol: &Tolerances) -> Result<usize, DiscreteError> {
    if psi.len() != g.vertex_count() {
        return Err(DiscreteError::VectorLength {
            expected: g.vertex_count(),
            got: psi.len(),
        });
    }
    let scale = psi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let signs = SignPattern::from_values(psi, tol.vanish_rel * scale)?;
    Ok(sign_components(g, &signs)?)
}

/// Domains of `psi` restricted to the vertices where it does not vanish.
pub fn support_nodal_count(g: &Graph, psi: &[f64], tol: &Tolerances) -> usize {
    let scale = psi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let signs: Vec<i8> = psi
        .iter()
        .map(|&x| {
            if x.abs() <= tol.vanish_rel * scale {
                0
            } else if x > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    support_sign_components(g, &signs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub n: usize,
    pub simple: bool,
    pub nonvanishing: bool,
    pub generic: bool,
}

/// Checks simplicity of `λ_n` and that `ψ⁽ⁿ⁾` has no zero entry (`n` is 1-indexed).
pub fn check_genericity(s: &Spectrum, n: usize) -> GenericityReport {
    check_genericity_with(s, n, &Tolerances::default())
}

pub fn check_genericity_with(s: &Spectrum, n: usize, tol: &Tolerances) -> GenericityReport {
    let gap_tol = tol.gap_rel * s.matrix_norm.max(1.0);
    let i = n - 1;
    let lambda = s.eigenvalues[i];
    let below = i.checked_sub(1).map(|j| lambda - s.eigenvalues[j]);
    let above = s.eigenvalues.get(i + 1).map(|mu| mu - lambda);
    let simple = below.is_none_or(|d| d > gap_tol) && above.is_none_or(|d| d > gap_tol);
    let psi = &s.eigenvectors[i];
    let vanish_tol = tol.vanish_rel * psi.amax();
    let nonvanishing = psi.iter().all(|x| x.abs() > vanish_tol);
    GenericityReport {
        n,
        simple,
        nonvanishing,
        generic: simple && nonvanishing,
    }
}

/// Nodal count and bound verdict for one eigenpair.
///
/// For non-generic pairs `nu` counts domains over the non-vanishing support
/// only and the verdicts are informational.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodalReport {
    pub n: usize,
    pub lambda: f64,
    pub nu: usize,
    pub ell: usize,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub simple: bool,
    pub nonvanishing: bool,
    pub generic: bool,
}

impl NodalReport {
    pub fn new(n: usize, lambda: f64, nu: usize, ell: usize, simple: bool, nonvanishing: bool) -> Self {
        NodalReport {
            n,
            lambda,
            nu,
            ell,
            lower_ok: nu + ell >= n,
            upper_ok: nu <= n,
            simple,
            nonvanishing,
            generic: simple && nonvanishing,
        }
    }

    /// A generic pair outside `n − ℓ ≤ ν ≤ n`.
    pub fn is_violation(&self) -> bool {
        self.generic && !(self.lower_ok && self.upper_ok)
    }
}

/// One [`NodalReport`] per eigenpair of `H(g, q)`.
pub fn verify_bounds(g: &Graph, q: &Potential) -> Result<Vec<NodalReport>, DiscreteError> {
    verify_bounds_with(g, q, &Tolerances::default())
}

pub fn verify_bounds_with(
    g: &Graph,
    q: &Potential,
    tol: &Tolerances,
) -> Result<Vec<NodalReport>, DiscreteError> {
    let h = assemble_hamiltonian(g, q)?;
    let s = eigen_decompose(&h)?;
    Ok(reports_for(g, &s, tol))
}

pub fn reports_for(g: &Graph, s: &Spectrum, tol: &Tolerances) -> Vec<NodalReport> {
    let ell = g.cycle_dimension();
    (1..=s.len())
        .map(|n| {
            let gr = check_genericity_with(s, n, tol);
            let psi = s.eigenvectors[n - 1].as_slice();
            let nu = if gr.nonvanishing {
                nodal_count_with(g, psi, tol).expect("nonvanishing vector")
            } else {
                support_nodal_count(g, psi, tol)
            };
            NodalReport::new(n, s.eigenvalues[n - 1], nu, ell, gr.simple, gr.nonvanishing)
        })
        .collect()
}
