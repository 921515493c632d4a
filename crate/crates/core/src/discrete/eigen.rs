//! Dense symmetric eigensolver (cyclic Jacobi rotations).

use nalgebra::{DMatrix, DVector};

use super::DiscreteError;

const MAX_SWEEPS: usize = 100;

/// Ascending eigenvalues with unit eigenvectors of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<DVector<f64>>,
    /// `max_n ‖Hψ⁽ⁿ⁾ − λ_n ψ⁽ⁿ⁾‖₂`
    pub residual_bound: f64,
    /// Frobenius norm of the decomposed matrix.
    pub matrix_norm: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// The `n`-th eigenpair, 1-indexed.
    pub fn pair(&self, n: usize) -> (f64, &DVector<f64>) {
        (self.eigenvalues[n - 1], &self.eigenvectors[n - 1])
    }
}

/// Row-major dense symmetric working copy.
struct Work {
    n: usize,
    a: Vec<f64>,
}

impl Work {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, x: f64) {
        self.a[i * self.n + j] = x;
        self.a[j * self.n + i] = x;
    }

    fn off_norm_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                s += 2.0 * self.at(i, j).powi(2);
            }
        }
        s
    }
}

/// Eigen-decomposes a symmetric matrix.
///
/// Eigenvalues are ascending (stable with respect to solver order on exact
/// ties). Each eigenvector has unit norm and its first component exceeding
/// `1e-8 · ‖ψ‖∞` in magnitude is positive.
pub fn eigen_decompose(h: &DMatrix<f64>) -> Result<Spectrum, DiscreteError> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(DiscreteError::NotSquare {
            rows: n,
            cols: h.ncols(),
        });
    }
    let norm = h.norm();
    let sym_tol = 1e-12 * norm.max(1.0);
    for i in 0..n {
        for j in i + 1..n {
            if (h[(i, j)] - h[(j, i)]).abs() > sym_tol {
                return Err(DiscreteError::NotSymmetric { row: i, col: j });
            }
        }
    }

    let mut w = Work {
        n,
        a: vec![0.0; n * n],
    };
    for i in 0..n {
        for j in 0..n {
            w.a[i * n + j] = 0.5 * (h[(i, j)] + h[(j, i)]);
        }
    }
    // columns of v are eigenvectors, stored row-major
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let target = (f64::EPSILON * norm).powi(2);
    let mut converged = n < 2;
    for sweep in 0..MAX_SWEEPS {
        if w.off_norm_sq() <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = w.at(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = w.at(p, p);
                let aqq = w.at(q, q);
                // negligible against both diagonal entries: drop it (after warm-up sweeps)
                if sweep > 3 && app.abs() + 100.0 * apq.abs() == app.abs()
                    && aqq.abs() + 100.0 * apq.abs() == aqq.abs()
                {
                    w.set(p, q, 0.0);
                    continue;
                }
                rotate(&mut w, &mut v, p, q);
            }
        }
    }
    if !converged && w.off_norm_sq() > target {
        return Err(DiscreteError::ConvergenceFailure { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w.at(i, i).total_cmp(&w.at(j, j)));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    let mut residual_bound: f64 = 0.0;
    for &k in &order {
        let lambda = w.at(k, k);
        let mut psi = DVector::from_fn(n, |i, _| v[i * n + k]);
        psi.normalize_mut();
        fix_sign(&mut psi);
        let r = (h * &psi - &psi * lambda).norm();
        residual_bound = residual_bound.max(r);
        eigenvalues.push(lambda);
        eigenvectors.push(psi);
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        residual_bound,
        matrix_norm: norm,
    })
}

fn rotate(w: &mut Work, v: &mut [f64], p: usize, q: usize) {
    let n = w.n;
    let apq = w.at(p, q);
    let theta = (w.at(q, q) - w.at(p, p)) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta.is_infinite() { 0.5 / theta } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);

    let app = w.at(p, p) - t * apq;
    let aqq = w.at(q, q) + t * apq;
    w.a[p * n + p] = app;
    w.a[q * n + q] = aqq;
    w.set(p, q, 0.0);
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let g = w.at(r, p);
        let h = w.at(r, q);
        w.set(r, p, g - s * (h + g * tau));
        w.set(r, q, h + s * (g - h * tau));
    }
    for r in 0..n {
        let g = v[r * n + p];
        let h = v[r * n + q];
        v[r * n + p] = g - s * (h + g * tau);
        v[r * n + q] = h + s * (g - h * tau);
    }
}

/// Makes the first entry above `1e-8 · ‖ψ‖∞` positive.
pub fn fix_sign(psi: &mut DVector<f64>) {
    let tol = 1e-8 * psi.amax();
    if let Some(x) = psi.iter().find(|x| x.abs() > tol) {
        if *x < 0.0 {
            psi.neg_mut();
        }
    }
}

/// Eigenvalues only, used where vectors are not needed.
pub fn eigenvalues(h: &DMatrix<f64>) -> Result<Vec<f64>, DiscreteError> {
    Ok(eigen_decompose(h)?.eigenvalues)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn two_by_two_analytic() {
        let h = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]);
        let s = eigen_decompose(&h).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], 1.0, epsilon = 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.eigenvectors[0][0], r, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvectors[0][1], r, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvectors[1][0], r, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvectors[1][1], -r, epsilon = 1e-14);
    }

    #[test]
    fn path_of_three() {
        let h = DMatrix::from_row_slice(3, 3, &[0., -1., 0., -1., 0., -1., 0., -1., 0.]);
        let s = eigen_decompose(&h).unwrap();
        let r2 = 2f64.sqrt();
        for (got, want) in s.eigenvalues.iter().zip([-r2, 0.0, r2]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
        // middle eigenvector (1, 0, -1)/sqrt 2 vanishes on the middle vertex
        assert!(s.eigenvectors[1][1].abs() < 1e-14);
    }

    #[test]
    fn diagonal_is_sorted() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 2.0, 0.5]));
        let s = eigen_decompose(&h).unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, 0.5, 2.0, 3.0]);
        assert_eq!(s.residual_bound, 0.0);
    }

    #[test]
    fn rejects_asymmetric() {
        let h = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            eigen_decompose(&h),
            Err(DiscreteError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn one_by_one_and_empty() {
        let s = eigen_decompose(&DMatrix::from_element(1, 1, 4.0)).unwrap();
        assert_eq!(s.eigenvalues, vec![4.0]);
        assert_eq!(s.eigenvectors[0][0], 1.0);
        assert!(eigen_decompose(&DMatrix::zeros(0, 0)).unwrap().is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn residual_and_orthogonality(n in 1usize..24, entries in proptest::collection::vec(-1.0f64..1.0, 24 * 24)) {
            let h = DMatrix::from_fn(n, n, |i, j| {
                let (a, b) = (i.min(j), i.max(j));
                entries[a * 24 + b]
            });
            let s = eigen_decompose(&h).unwrap();
            prop_assert!(s.residual_bound <= 1e-10 * s.matrix_norm.max(1e-300));
            for w in s.eigenvalues.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            for i in 0..n {
                for j in 0..n {
                    let d = s.eigenvectors[i].dot(&s.eigenvectors[j]);
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((d - want).abs() < 1e-10);
                }
            }
            let trace: f64 = (0..n).map(|i| h[(i, i)]).sum();
            prop_assert!((trace - s.eigenvalues.iter().sum::<f64>()).abs() < 1e-10 * (1.0 + s.matrix_norm));
        }
    }
}
