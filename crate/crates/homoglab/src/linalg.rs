//! Dense Hermitian linear algebra helpers on top of nalgebra: defect
//! measurement, eigensystems with residual checks, and operator norms of
//! Hermitian matrices via their spectrum.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// max |A[q,p] - conj(A[p,q])| over all entries.
pub fn hermitian_defect(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut defect: f64 = 0.0;
    for q in 0..n {
        for p in q..n {
            defect = defect.max((a[(q, p)] - a[(p, q)].conj()).norm());
        }
    }
    defect
}

/// max |A[q,p]| over all entries.
pub fn max_abs(a: &DMatrix<Complex64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Operator norm of a Hermitian matrix: largest absolute eigenvalue.
pub fn op_norm_hermitian(a: &DMatrix<Complex64>) -> f64 {
    a.clone()
        .symmetric_eigenvalues()
        .iter()
        .map(|l| l.abs())
        .fold(0.0, f64::max)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: DVector<f64>,
    /// Column j is the orthonormal eigenvector for `values[j]`.
    pub vectors: DMatrix<Complex64>,
}

/// Full Hermitian eigendecomposition with per-pair residual check
/// ||A v - lambda v|| <= rel_tol * ||A||.
pub fn eigensystem_checked(a: &DMatrix<Complex64>, rel_tol: f64) -> Result<Eigensystem> {
    let se = a.clone().symmetric_eigen();
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        vectors.set_column(col, &se.eigenvectors.column(src));
    }
    let scale = values.iter().map(|l| l.abs()).fold(0.0, f64::max).max(1.0);
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let v = vectors.column(j);
        let res = (a * v - v * Complex64::from(values[j])).norm();
        worst = worst.max(res);
    }
    if worst > rel_tol * scale {
        return Err(Error::Numerical(format!(
            "eigenpair residual {worst:.3e} exceeds {rel_tol:.1e} * ||A|| = {:.3e}",
            rel_tol * scale
        )));
    }
    Ok(Eigensystem { values, vectors })
}

/// Solve the Hermitian positive definite system A x = b by Cholesky; reports
/// a condition diagnostic through the eigenvalue range on failure.
pub fn solve_hpd(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    match a.clone().cholesky() {
        Some(ch) => Ok(ch.solve(b)),
        None => {
            let ev = a.clone().symmetric_eigenvalues();
            let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Err(Error::Numerical(format!(
                "Cholesky failed: matrix not positive definite (eigenvalue range [{lo:.3e}, {hi:.3e}])"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hermitian_sample(n: usize) -> DMatrix<Complex64> {
        let mut a = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let re = ((i * 5 + j * 3) % 7) as f64 / 7.0;
                let im = if i == j {
                    0.0
                } else {
                    ((i + 2 * j) % 5) as f64 / 5.0
                };
                a[(i, j)] = Complex64::new(re, im);
                a[(j, i)] = Complex64::new(re, -im);
            }
            a[(i, i)] += Complex64::new(n as f64, 0.0);
        }
        a
    }

    #[test]
    fn eigensystem_sorted_with_small_residual() {
        let a = hermitian_sample(24);
        let es = eigensystem_checked(&a, 1e-9).unwrap();
        for j in 1..24 {
            assert!(es.values[j] >= es.values[j - 1]);
        }
    }

    #[test]
    fn operator_norm_matches_singular_value() {
        let a = hermitian_sample(16);
        let from_eigs = op_norm_hermitian(&a);
        let svd = a.clone().svd(false, false);
        let sv_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
        assert_relative_eq!(from_eigs, sv_max, max_relative = 1e-9);
    }

    #[test]
    fn defect_detects_non_hermitian_entry() {
        let mut a = hermitian_sample(8);
        assert!(hermitian_defect(&a) < 1e-14);
        a[(2, 5)] += Complex64::new(1e-3, 0.0);
        assert!(hermitian_defect(&a) > 5e-4);
    }

    #[test]
    fn hpd_solve_round_trip() {
        let a = hermitian_sample(12);
        let b = DMatrix::<Complex64>::from_fn(12, 2, |i, j| {
            Complex64::new(i as f64 + 1.0, j as f64 - 0.5)
        });
        let x = solve_hpd(&a, &b).unwrap();
        assert!(((&a * &x) - &b).norm() < 1e-10 * b.norm());
    }
}
