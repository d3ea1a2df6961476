//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Ascending eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a general real matrix, sorted by real part then imaginary part.
pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    let mut ev: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

pub fn spectral_abscissa(m: &DMatrix<f64>) -> f64 {
    eigenvalues(m).iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max)
}

pub fn is_hurwitz(m: &DMatrix<f64>) -> bool {
    spectral_abscissa(m) < 0.0
}

/// Unit vector spanning (approximately) the null space of `m − λI`,
/// taken from the smallest singular value.
pub fn eigenvector(m: &DMatrix<f64>, lambda: Complex64) -> DVector<Complex64> {
    let n = m.nrows();
    let shifted = DMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { lambda } else { Complex64::new(0.0, 0.0) };
        Complex64::new(m[(i, j)], 0.0) - d
    });
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty matrix");
    v_t.row(k).adjoint()
}

/// Solves `AᵀP + PA = −Q` by vectorization.
pub fn solve_lyapunov(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if !a.is_square() || q.shape() != (n, n) {
        return Err(Error::domain("Lyapunov equation needs square matrices of equal size"));
    }
    let id = DMatrix::<f64>::identity(n, n);
    let at = a.transpose();
    let system = id.kronecker(&at) + at.kronecker(&id);
    let rhs = -DVector::from_column_slice(q.as_slice());
    let sol = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::config("Lyapunov equation is singular"))?;
    let p = DMatrix::from_column_slice(n, n, sol.as_slice());
    Ok((&p + p.transpose()) * 0.5)
}

pub fn max_abs_diff(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax()
}

/// Central-difference Jacobian of `f` at `x`.
pub fn central_difference_jacobian<F>(f: F, x: &DVector<f64>, h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let n = x.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        cols.push((f(&xp)? - f(&xm)?) / (2.0 * h));
    }
    Ok(DMatrix::from_columns(&cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lyapunov_scalar() {
        let a = -DMatrix::<f64>::identity(3, 3);
        let p = solve_lyapunov(&a, &DMatrix::identity(3, 3)).unwrap();
        assert!((p - DMatrix::<f64>::identity(3, 3) * 0.5).amax() < 1e-14);
    }

    #[test]
    fn lyapunov_residual() {
        let a = DMatrix::from_row_slice(2, 2, &[-1.0, 2.0, -3.0, -4.0]);
        let q = DMatrix::<f64>::identity(2, 2);
        let p = solve_lyapunov(&a, &q).unwrap();
        let r = a.transpose() * &p + &p * &a + q;
        assert!(r.amax() < 1e-12);
    }

    #[test]
    fn rotation_eigenpairs() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]);
        let ev = eigenvalues(&m);
        assert!((ev[0] - Complex64::new(0.0, -2.0)).norm() < 1e-12);
        let v = eigenvector(&m, ev[1]);
        let mv = m.map(|x| Complex64::new(x, 0.0)) * &v;
        assert!((mv - v * ev[1]).norm() < 1e-10);
    }

    #[test]
    fn hurwitz() {
        assert!(is_hurwitz(&(-DMatrix::<f64>::identity(2, 2))));
        assert!(!is_hurwitz(&DMatrix::<f64>::identity(2, 2)));
    }
}
