//! Dense complex linear algebra kernels: operator norms and smallest
//! singular values.
//!
//! Full SVD is accurate and fast enough up to roughly 1200×1200; above that
//! the nilpotent-plus-perturbation structure of the matrices here keeps
//! Krylov-free iterations (power iteration on MᴴM, inverse iteration through
//! an LU of the shifted matrix) effective. σ_min of an exactly singular
//! matrix is returned as exactly 0 rather than a rounded tiny value.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::C64;

/// Largest dimension handled by full SVD before switching to iteration.
pub const DENSE_SVD_LIMIT: usize = 1200;
const ITER_REL_TOL: f64 = 1e-10;
const ITER_MAX: usize = 20_000;

/// deterministic unit start vector with varying phase, so it is never
/// orthogonal to the dominant subspace by accident
fn start_vector(n: usize) -> DVector<C64> {
    let mut v = DVector::from_fn(n, |j, _| C64::from_polar(1.0, 0.7 * j as f64 + 0.3));
    v /= C64::new(v.norm(), 0.0);
    v
}

/// ‖M‖ = largest singular value.
pub fn operator_norm(m: &DMatrix<C64>) -> Result<f64> {
    if m.nrows() <= DENSE_SVD_LIMIT && m.ncols() <= DENSE_SVD_LIMIT {
        let sv = m.clone().svd(false, false).singular_values;
        Ok(sv.iter().fold(0.0f64, |a, &b| a.max(b)))
    } else {
        power_iteration_norm(m, ITER_REL_TOL, ITER_MAX)
    }
}

/// Power iteration on MᴴM; converges to ‖M‖ from below.
pub fn power_iteration_norm(m: &DMatrix<C64>, rel_tol: f64, max_iter: usize) -> Result<f64> {
    let mut v = start_vector(m.ncols());
    let mut last = 0.0f64;
    for it in 0..max_iter {
        let w = m * &v;
        let mut y = m.ad_mul(&w);
        let lambda = y.norm();
        if lambda == 0.0 {
            return Ok(0.0);
        }
        y /= C64::new(lambda, 0.0);
        let sigma = lambda.sqrt();
        if it > 0 && (sigma - last).abs() <= rel_tol * sigma {
            return Ok(sigma);
        }
        last = sigma;
        v = y;
    }
    Err(Error::NonConvergence {
        what: "power iteration for the operator norm".into(),
        iterations: max_iter,
        last,
    })
}

/// Smallest singular value of a square matrix.
pub fn smallest_singular(a: &DMatrix<C64>) -> Result<f64> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidArgument(format!(
            "smallest singular value needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() <= DENSE_SVD_LIMIT {
        let sv = a.clone().svd(false, false).singular_values;
        Ok(sv.iter().fold(f64::INFINITY, |m, &s| m.min(s)))
    } else {
        inverse_iteration_smallest(a, ITER_REL_TOL, ITER_MAX)
    }
}

/// Smallest singular value together with the corresponding right singular
/// vector (unit Euclidean norm). Always uses the dense decomposition.
pub fn smallest_singular_pair(a: &DMatrix<C64>) -> Result<(f64, DVector<C64>)> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidArgument(format!(
            "singular pair needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| {
        Error::NonConvergence {
            what: "SVD with right singular vectors".into(),
            iterations: 0,
            last: f64::NAN,
        }
    })?;
    let (mut idx, mut min) = (0usize, f64::INFINITY);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s < min {
            min = s;
            idx = i;
        }
    }
    let v = v_t.row(idx).adjoint();
    Ok((min, v))
}

/// Inverse iteration on (AᴴA)⁻¹ through LU factors of A and Aᴴ. An exactly
/// singular LU short-circuits to σ = 0.
pub fn inverse_iteration_smallest(
    a: &DMatrix<C64>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let lu = a.clone().lu();
    let lu_h = a.adjoint().lu();
    let mut v = start_vector(a.ncols());
    // probe solvability once; an exact zero pivot means a true kernel vector
    if lu_h.solve(&v).is_none() || lu.solve(&lu_h.solve(&v).unwrap()).is_none() {
        return Ok(0.0);
    }
    let mut last = f64::INFINITY;
    for it in 0..max_iter {
        let w = match lu_h.solve(&v) {
            Some(w) => w,
            None => return Ok(0.0),
        };
        let y = match lu.solve(&w) {
            Some(y) => y,
            None => return Ok(0.0),
        };
        let ny = y.norm();
        if !ny.is_finite() || ny == 0.0 {
            // inverse blew past the representable range: kernel to working precision
            return Ok(0.0);
        }
        v = y / C64::new(ny, 0.0);
        let sigma = (a * &v).norm();
        if it > 0 && (sigma - last).abs() <= rel_tol * sigma.max(f64::MIN_POSITIVE) {
            return Ok(sigma);
        }
        last = sigma;
    }
    Err(Error::NonConvergence {
        what: "inverse iteration for the smallest singular value".into(),
        iterations: max_iter,
        last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// deterministic full-rank test matrix with no special structure
    fn dense(n: usize) -> DMatrix<C64> {
        DMatrix::from_fn(n, n, |i, j| {
            let t = (i * 31 + j * 17) as f64;
            c((t * 0.7).sin(), (t * 0.3).cos()) / c(1.0 + (i as f64 - j as f64).abs(), 0.0)
        })
    }

    #[test]
    fn norm_of_diagonal_matrix() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![c(3.0, 0.0), c(0.0, -5.0), c(1.0, 0.0)]));
        assert!((operator_norm(&m).unwrap() - 5.0).abs() <= 1e-12);
        assert!((smallest_singular(&m).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn power_iteration_matches_svd() {
        let m = dense(80);
        let svd = operator_norm(&m).unwrap();
        let pow = power_iteration_norm(&m, 1e-12, 50_000).unwrap();
        assert!(
            (svd - pow).abs() <= 1e-8 * svd,
            "svd {svd} vs power {pow}"
        );
    }

    #[test]
    fn inverse_iteration_matches_svd() {
        let m = dense(80);
        let svd = smallest_singular(&m).unwrap();
        let inv = inverse_iteration_smallest(&m, 1e-12, 50_000).unwrap();
        assert!(
            (svd - inv).abs() <= 1e-8 * svd.max(1e-12),
            "svd {svd} vs inverse iteration {inv}"
        );
    }

    #[test]
    fn exactly_singular_matrix_reports_zero() {
        let mut m = dense(40);
        for j in 0..40 {
            m[(7, j)] = c(0.0, 0.0);
        }
        assert_eq!(inverse_iteration_smallest(&m, 1e-10, 1000).unwrap(), 0.0);
        // dense path: SVD of a matrix with a zero row has σ_min = 0 to roundoff
        assert!(smallest_singular(&m).unwrap() <= 1e-14);
    }

    #[test]
    fn singular_pair_residual_equals_sigma() {
        let m = dense(60);
        let (sigma, v) = smallest_singular_pair(&m).unwrap();
        assert!((v.norm() - 1.0).abs() <= 1e-12);
        let residual = (&m * &v).norm();
        assert!(
            (residual - sigma).abs() <= 1e-12,
            "residual {residual} vs sigma {sigma}"
        );
    }

    #[test]
    fn rectangular_rejected_for_sigma_min() {
        let m = DMatrix::<C64>::zeros(3, 4);
        assert!(smallest_singular(&m).is_err());
        assert!(smallest_singular_pair(&m).is_err());
    }
}
