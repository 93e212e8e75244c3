//! Symmetric eigendecomposition (cyclic Jacobi) and the smallest generalized
//! eigenpair used by the multisurface proximal splits.

use crate::error::{Error, Result};
use crate::matrix::{norm2, Matrix};
use crate::numkit::CholeskyFactor;

const MAX_SWEEPS: usize = 64;

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order with the matching eigenvectors as
/// matrix columns.
pub fn sym_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "sym_eigen: {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let scale = a.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !a.is_symmetric(1e-10 * (1.0 + scale)) {
        return Err(Error::InvalidParam(format!(
            "sym_eigen: asymmetry {:.3e}",
            a.asymmetry()
        )));
    }
    if n == 0 {
        return Ok((vec![], Matrix::zeros(0, 0)));
    }

    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let tol = 1e-14 * (1.0 + scale);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m.get(p, q).abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() <= tol {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).partial_cmp(&m.get(j, j)).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, col, v.get(row, src));
        }
    }
    Ok((values, vectors))
}

/// Smallest eigenpair of (A + ridge·I) v = λ (B + ridge·I) v.
///
/// Both inputs must be symmetric; B + ridge·I must be positive definite. The
/// returned eigenvector has unit Euclidean norm.
pub fn min_gen_eigenpair(a: &Matrix, b: &Matrix, ridge: f64) -> Result<(f64, Vec<f64>)> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n || b.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "min_gen_eigenpair: A {}x{}, B {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParam("min_gen_eigenpair: empty".into()));
    }
    if ridge < 0.0 {
        return Err(Error::InvalidParam("min_gen_eigenpair: ridge < 0".into()));
    }
    let mut ar = a.clone();
    ar.add_ridge(ridge);
    let mut br = b.clone();
    br.add_ridge(ridge);

    let chol = CholeskyFactor::new(&br).map_err(|_| {
        Error::NotPositiveDefinite("min_gen_eigenpair: B + ridge I is not PD".into())
    })?;

    // C = L⁻¹ (A + ridge I) L⁻ᵀ, assembled column-wise and symmetrized
    let mut w = Matrix::zeros(n, n);
    for j in 0..n {
        let col = chol.forward_solve(&ar.col(j));
        for i in 0..n {
            w.set(i, j, col[i]);
        }
    }
    let wt = w.transpose();
    let mut c = Matrix::zeros(n, n);
    for j in 0..n {
        let col = chol.forward_solve(&wt.col(j));
        for i in 0..n {
            c.set(j, i, col[i]);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (c.get(i, j) + c.get(j, i));
            c.set(i, j, avg);
            c.set(j, i, avg);
        }
    }

    let (values, vectors) = sym_eigen(&c)?;
    let u: Vec<f64> = (0..n).map(|i| vectors.get(i, 0)).collect();
    let mut vmin = chol.backward_solve(&u);
    let nrm = norm2(&vmin);
    if nrm <= 0.0 || !nrm.is_finite() {
        return Err(Error::NonFinite("min_gen_eigenpair: eigenvector".into()));
    }
    for x in vmin.iter_mut() {
        *x /= nrm;
    }
    Ok((values[0], vmin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::dot;

    #[test]
    fn diagonal_eigen() {
        let a = Matrix::from_vec(3, 3, vec![3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]).unwrap();
        let (vals, vecs) = sym_eigen(&a).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        assert!((vals[2] - 3.0).abs() < 1e-12);
        // eigenvector for λ=1 is e_1
        assert!(vecs.get(1, 0).abs() > 0.99);
    }

    #[test]
    fn two_by_two_known_pair() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let a = Matrix::from_vec(2, 2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let (vals, vecs) = sym_eigen(&a).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        let v0 = [vecs.get(0, 0), vecs.get(1, 0)];
        assert!((v0[0] + v0[1]).abs() < 1e-10);
    }

    #[test]
    fn residual_is_small() {
        let a = Matrix::from_vec(
            3,
            3,
            vec![4.0, 1.0, -2.0, 1.0, 2.0, 0.0, -2.0, 0.0, 3.0],
        )
        .unwrap();
        let (vals, vecs) = sym_eigen(&a).unwrap();
        for j in 0..3 {
            let v: Vec<f64> = (0..3).map(|i| vecs.get(i, j)).collect();
            let av = a.matvec(&v).unwrap();
            for i in 0..3 {
                assert!((av[i] - vals[j] * v[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn generalized_identity_b() {
        let a = Matrix::from_vec(2, 2, vec![2.0, 0.0, 0.0, 5.0]).unwrap();
        let b = Matrix::identity(2);
        let (lambda, v) = min_gen_eigenpair(&a, &b, 0.0).unwrap();
        assert!((lambda - 2.0).abs() < 1e-10);
        assert!((norm2(&v) - 1.0).abs() < 1e-12);
        assert!(v[0].abs() > 0.99);
    }

    #[test]
    fn generalized_scaling_b() {
        // A = diag(2, 5), B = diag(2, 1): ratios 1 and 5, min eigenpair e_1
        let a = Matrix::from_vec(2, 2, vec![2.0, 0.0, 0.0, 5.0]).unwrap();
        let b = Matrix::from_vec(2, 2, vec![2.0, 0.0, 0.0, 1.0]).unwrap();
        let (lambda, v) = min_gen_eigenpair(&a, &b, 0.0).unwrap();
        assert!((lambda - 1.0).abs() < 1e-10);
        let bv = b.matvec(&v).unwrap();
        let av = a.matvec(&v).unwrap();
        let rayleigh = dot(&v, &av) / dot(&v, &bv);
        assert!((rayleigh - 1.0).abs() < 1e-10);
    }

    #[test]
    fn singular_b_rejected_without_ridge() {
        let a = Matrix::identity(2);
        let b = Matrix::zeros(2, 2);
        assert!(min_gen_eigenpair(&a, &b, 0.0).is_err());
        assert!(min_gen_eigenpair(&a, &b, 1e-4).is_ok());
    }
}
