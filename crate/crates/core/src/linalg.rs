//! Small dense linear-algebra helpers shared by the metric and kinetic code.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Maximum absolute asymmetry `max |A_ij - A_ji|`.
pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

/// Cholesky factorisation of a symmetric positive-definite matrix.
///
/// Symmetry is checked relative to the largest entry, so `tol` is a relative
/// tolerance.
pub fn spd_cholesky(a: &DMatrix<f64>, what: &str, tol: f64) -> Result<Cholesky<f64, Dyn>> {
    if !a.is_square() {
        return Err(Error::Validation(format!(
            "{what} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Validation(format!("{what} has non-finite entries")));
    }
    let scale = a.amax().max(1.0);
    if asymmetry(a) > tol * scale {
        return Err(Error::Validation(format!("{what} is not symmetric")));
    }
    Cholesky::new(a.clone())
        .ok_or_else(|| Error::Validation(format!("{what} is not positive-definite")))
}

/// `log |A|` from its Cholesky factor.
pub fn cholesky_logdet(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
}

pub fn all_finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Quadratic form `aᵀ M b` without allocating.
pub fn bilinear(a: &DVector<f64>, m: &DMatrix<f64>, b: &DVector<f64>) -> f64 {
    let n = a.len();
    let mut acc = 0.0;
    for j in 0..n {
        let mut col = 0.0;
        for i in 0..n {
            col += a[i] * m[(i, j)];
        }
        acc += col * b[j];
    }
    acc
}
