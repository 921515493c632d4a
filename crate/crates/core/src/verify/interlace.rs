//! Interlacing audits between a spectrum and a constrained or cut one.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::discrete::{eigenvalues, DiscreteError};

/// Which inequality chain to check; `base` is always the original spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InterlaceMode {
    /// `other` is the spectrum restricted to a hyperplane:
    /// `λ_n ≤ ρ_n ≤ λ_{n+1}`.
    RankOne,
    /// `other` is the spectrum of a metric cut tree: `μ_k ≤ λ_k`.
    Cut,
    /// `other` is the spectrum after discrete edge surgery with ratio
    /// `α`: `μ_j ≤ λ_j` for `α > 0`, `μ_{j−1} ≤ λ_j` for `α < 0`.
    DiscreteCut { alpha_positive: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterlaceAudit {
    pub ok: bool,
    /// Most negative slack over all checked inequalities (`+∞` if none).
    pub margin: f64,
    pub checked: usize,
}

pub const INTERLACE_SLACK: f64 = -1e-9;

/// Checks the inequality chain of `mode`; both inputs ascending.
pub fn interlacing_audit(base: &[f64], other: &[f64], mode: InterlaceMode) -> InterlaceAudit {
    let mut margin = f64::INFINITY;
    let mut checked = 0;
    let mut slack = |s: f64| {
        margin = margin.min(s);
        checked += 1;
    };
    match mode {
        InterlaceMode::RankOne => {
            for (n, &rho) in other.iter().enumerate() {
                if let Some(&lo) = base.get(n) {
                    slack(rho - lo);
                }
                if let Some(&hi) = base.get(n + 1) {
                    slack(hi - rho);
                }
            }
        }
        InterlaceMode::Cut | InterlaceMode::DiscreteCut { alpha_positive: true } => {
            for (mu, lambda) in other.iter().zip(base) {
                slack(lambda - mu);
            }
        }
        InterlaceMode::DiscreteCut { alpha_positive: false } => {
            for (mu, lambda) in other.iter().zip(base.iter().skip(1)) {
                slack(lambda - mu);
            }
        }
    }
    InterlaceAudit {
        ok: margin >= INTERLACE_SLACK,
        margin,
        checked,
    }
}

/// Orthonormal basis of the complement of `c` as the last `N − 1` columns
/// of the Householder reflection sending `c` to a multiple of `e₁`.
pub fn complement_basis(c: &DVector<f64>) -> DMatrix<f64> {
    let n = c.len();
    let norm = c.norm();
    let mut v = c / norm;
    // reflect onto −sign(c₀) e₁ to avoid cancellation
    let s = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    v[0] += s;
    let vv = v.norm_squared();
    let mut p = DMatrix::identity(n, n);
    if vv > 0.0 {
        p -= (&v * v.transpose()) * (2.0 / vv);
    }
    p.columns(1, n - 1).into_owned()
}

/// Eigenvalues of `h` restricted to `{x : ⟨c, x⟩ = 0}`.
pub fn restricted_spectrum(h: &DMatrix<f64>, c: &DVector<f64>) -> Result<Vec<f64>, DiscreteError> {
    let b = complement_basis(c);
    let r = b.transpose() * h * &b;
    // symmetrize away rounding before the eigensolver checks symmetry
    let r = (&r + r.transpose()) * 0.5;
    eigenvalues(&r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn identical_spectra() {
        let s = [1.0, 2.0, 3.0];
        assert!(interlacing_audit(&s, &s, InterlaceMode::Cut).ok);
        assert!(interlacing_audit(&s, &s, InterlaceMode::DiscreteCut { alpha_positive: true }).ok);
        assert!(interlacing_audit(&s, &s[..2], InterlaceMode::RankOne).ok);
        assert_eq!(interlacing_audit(&s, &s, InterlaceMode::Cut).margin, 0.0);
    }

    #[test]
    fn detects_violations() {
        let a = interlacing_audit(&[1.0, 2.0], &[1.5, 1.9], InterlaceMode::Cut);
        assert!(!a.ok);
        assert_abs_diff_eq!(a.margin, -0.5);
        let a = interlacing_audit(&[1.0, 2.0, 3.0], &[0.9, 2.5], InterlaceMode::RankOne);
        assert!(!a.ok);
        let a = interlacing_audit(&[1.0, 2.0, 3.0], &[1.5, 2.5, 7.0], InterlaceMode::DiscreteCut { alpha_positive: false });
        assert!(a.ok);
        assert_eq!(a.checked, 2);
    }

    #[test]
    fn diagonal_restriction() {
        // restricting diag(1, 2, 3) to x₂ = 0 leaves {1, 3}
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]));
        let c = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let r = restricted_spectrum(&h, &c).unwrap();
        assert_abs_diff_eq!(r[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r[1], 3.0, epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn basis_is_orthonormal_and_orthogonal_to_c(c in proptest::collection::vec(-2.0f64..2.0, 2..8)) {
            let c = DVector::from_vec(c);
            prop_assume!(c.norm() > 1e-3);
            let b = complement_basis(&c);
            let gram = b.transpose() * &b;
            let id = DMatrix::<f64>::identity(c.len() - 1, c.len() - 1);
            prop_assert!((gram - id).amax() < 1e-12);
            prop_assert!((b.transpose() * &c).amax() < 1e-12 * c.norm());
        }
    }
}
