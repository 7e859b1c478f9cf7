//! Small dense solvers with condition monitoring (nalgebra underneath).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Systems whose 2-norm condition number exceeds this are refused.
pub(crate) const MAX_CONDITION: f64 = 1e15;

/// 2-norm condition number from the singular values.
pub(crate) fn condition(a: &DMatrix<f64>) -> f64 {
    let s = a.singular_values();
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Square solve by LU with partial pivoting. Returns the solution and the
/// condition estimate.
pub(crate) fn solve_square(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let cond = condition(a);
    if !(cond < MAX_CONDITION) {
        return Err(Error::IllConditioned { condition: cond });
    }
    let x = a
        .clone()
        .lu()
        .solve(b)
        .ok_or(Error::IllConditioned { condition: cond })?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::IllConditioned { condition: cond });
    }
    Ok((x, cond))
}

/// Ridge-regularised least squares `min |Ax - b|^2 + rho |x|^2` with
/// `rho = ridge * trace(A^T A) / cols`, solved through the SVD of `A`
/// (same minimiser as the regularised normal equations, better conditioned).
///
/// The reported condition is that of `A` itself.
pub(crate) fn ridge_lstsq(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    ridge: f64,
) -> Result<(DVector<f64>, f64)> {
    let cols = a.ncols();
    if cols == 0 {
        return Ok((DVector::zeros(0), 1.0));
    }
    let svd = a.clone().svd(true, true);
    let s = &svd.singular_values;
    let trace: f64 = s.iter().map(|v| v * v).sum();
    let rho = ridge * trace / cols as f64;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = if a.nrows() >= cols && smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if smax == 0.0 {
        // A = 0: the regularised minimiser is x = 0.
        return Ok((DVector::zeros(cols), cond));
    }
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let utb = u.transpose() * b;
    let mut x = DVector::zeros(cols);
    for (i, &si) in s.iter().enumerate() {
        let denom = si * si + rho;
        if denom > 0.0 {
            let c = si * utb[i] / denom;
            x += vt.row(i).transpose() * c;
        }
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::IllConditioned { condition: cond });
    }
    Ok((x, cond))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn square_and_lstsq_agree_on_well_posed_system() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let (x1, c1) = solve_square(&a, &b).unwrap();
        let (x2, c2) = ridge_lstsq(&a, &b, 0.0).unwrap();
        assert_abs_diff_eq!((&a * &x1 - &b).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((x1 - x2).norm(), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(c1, c2, epsilon = 1e-12);
    }

    #[test]
    fn singular_square_is_refused() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        assert!(matches!(solve_square(&a, &b), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn zero_target_gives_zero() {
        let a = DMatrix::from_fn(6, 3, |i, j| ((i + 1) * (j + 2)) as f64);
        let (x, _) = ridge_lstsq(&a, &DVector::zeros(6), 1e-10).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
    }
}
