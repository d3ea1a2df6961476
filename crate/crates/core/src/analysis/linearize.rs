//! Linearization at rest points and the temperature bifurcation search.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::rest::{rest_point, RestPointOptions};
use crate::choice::{jacobian_full_from_probs, softmax_unchecked};
use crate::dynamics::{check_scores, FeedbackBlock, FirstOrder, FirstOrderParams, HigherOrder, ScoreSystem};
use crate::game::{tangent_basis, GameSpec};
use crate::linalg::{central_difference_jacobian, eigenvalues, eigenvector};
use crate::{Error, Result};

/// Allowed gap between the analytic and finite-difference Jacobians,
/// relative to `max(1, ‖J‖max)`.
pub const JACOBIAN_CHECK_TOL: f64 = 1e-6;
/// Minimum tangent component for an eigenvector to count as a tangent mode.
pub const TANGENT_MODE_TOL: f64 = 1e-8;

/// Analytic Jacobian of the score dynamics at `z`.
///
/// First order: `γ(DU·Dσ − I)`. Higher order, on the state `[z; ξ]`:
/// `[[γ(DU·Dσ − I − D·Dσ), −γC], [B·Dσ, A]]`.
pub fn analytic_jacobian(
    z: &DVector<f64>,
    game: &GameSpec,
    params: &FirstOrderParams,
    block: Option<&FeedbackBlock>,
) -> Result<DMatrix<f64>> {
    check_scores(z, game)?;
    let counts = game.action_counts();
    let n = game.dim();
    let x = softmax_unchecked(z, params.eps(), counts);
    let ds = jacobian_full_from_probs(&x, params.eps(), counts);
    let du_ds = game.payoff_jacobian(&x)? * &ds;
    let id = DMatrix::<f64>::identity(n, n);
    let g = if params.undiscounted { 1.0 } else { params.gamma };
    let decay = if params.undiscounted { 0.0 } else { 1.0 };
    match block {
        None => Ok((du_ds - id * decay) * g),
        Some(b) => {
            b.check_dim(n)?;
            let mut j = DMatrix::zeros(2 * n, 2 * n);
            let top_left = (du_ds - id * decay - b.d_matrix() * &ds) * g;
            j.view_mut((0, 0), (n, n)).copy_from(&top_left);
            j.view_mut((0, n), (n, n)).copy_from(&(b.c_matrix() * -g));
            j.view_mut((n, 0), (n, n)).copy_from(&(b.b_matrix() * &ds));
            j.view_mut((n, n), (n, n)).copy_from(&b.a_matrix());
            Ok(j)
        }
    }
}

/// Central-difference Jacobian of the same field. The higher-order field is
/// affine in `ξ`, so the filter state is placed at its equilibrium.
pub fn numerical_jacobian(
    z: &DVector<f64>,
    game: &GameSpec,
    params: &FirstOrderParams,
    block: Option<&FeedbackBlock>,
) -> Result<DMatrix<f64>> {
    check_scores(z, game)?;
    let h = 1e-5 * params.eps().min(1.0);
    match block {
        None => {
            let sys = FirstOrder::new(game, *params);
            central_difference_jacobian(|y| Ok(sys.derivative(y)), z, h)
        }
        Some(b) => {
            let sys = HigherOrder::new(game, *params, b.clone())?;
            let x = softmax_unchecked(z, params.eps(), game.action_counts());
            let xi = b.equilibrium(&x)?;
            let n = z.len();
            let y = DVector::from_fn(2 * n, |i, _| if i < n { z[i] } else { xi[i - n] });
            central_difference_jacobian(|y| Ok(sys.derivative(y)), &y, h)
        }
    }
}

/// Analytic Jacobian, cross-checked against central differences.
pub fn dynamics_jacobian(
    z: &DVector<f64>,
    game: &GameSpec,
    params: &FirstOrderParams,
    block: Option<&FeedbackBlock>,
) -> Result<DMatrix<f64>> {
    let j = analytic_jacobian(z, game, params, block)?;
    let fd = numerical_jacobian(z, game, params, block)?;
    let gap = (&j - fd).amax();
    let scale = j.amax().max(1.0);
    if gap > JACOBIAN_CHECK_TOL * scale {
        return Err(Error::domain(format!(
            "analytic and finite-difference Jacobians differ by {gap:e}"
        )));
    }
    Ok(j)
}

/// One eigenvalue of a dynamics Jacobian with the size of its eigenvector's
/// component in the tangent space of the strategy simplices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub eigenvalue: Complex64,
    pub tangent_component: f64,
}

impl Mode {
    pub fn is_tangent(&self) -> bool {
        self.tangent_component > TANGENT_MODE_TOL
    }
}

/// Classifies the spectrum of `j` into tangent and structural modes. The
/// first `Σn^p` state coordinates are scores; eigenvectors are unit-norm.
pub fn modes(j: &DMatrix<f64>, action_counts: &[usize]) -> Result<Vec<Mode>> {
    let e = tangent_basis(action_counts)?.full.map(|v| Complex64::new(v, 0.0));
    let n = e.nrows();
    Ok(eigenvalues(j)
        .into_iter()
        .map(|lam| {
            let v = eigenvector(j, lam);
            let vz = v.rows(0, n).into_owned();
            Mode {
                eigenvalue: lam,
                tangent_component: (e.adjoint() * vz).norm(),
            }
        })
        .collect())
}

/// Largest real part over tangent modes.
pub fn tangent_abscissa(j: &DMatrix<f64>, action_counts: &[usize]) -> Result<f64> {
    Ok(modes(j, action_counts)?
        .iter()
        .filter(|m| m.is_tangent())
        .map(|m| m.eigenvalue.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BifurcationStatus {
    Found,
    NoBifurcationInRange,
    RestPointNotFound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationResult {
    pub status: BifurcationStatus,
    pub eps_star: Option<f64>,
    pub iterations: usize,
    /// Final bracket `[lo, hi]`.
    pub bracket: [f64; 2],
    /// Tangent abscissa at the original range endpoints.
    pub endpoint_abscissa: [f64; 2],
}

/// Tangent spectral abscissa of the linearization at the rest point for
/// temperature `eps`.
pub fn abscissa_at(
    game: &GameSpec,
    params: &FirstOrderParams,
    block: Option<&FeedbackBlock>,
    eps: f64,
) -> Result<Option<f64>> {
    let p = params.with_eps(eps)?;
    let rp = rest_point(game, eps, None, &RestPointOptions::default())?;
    if !rp.found() {
        return Ok(None);
    }
    let j = dynamics_jacobian(&rp.z_star, game, &p, block)?;
    Ok(Some(tangent_abscissa(&j, game.action_counts())?))
}

/// Bisection on the temperature for a sign change of the tangent abscissa.
pub fn bifurcation_epsilon(
    game: &GameSpec,
    params: &FirstOrderParams,
    block: Option<&FeedbackBlock>,
    eps_range: (f64, f64),
    tol: f64,
) -> Result<BifurcationResult> {
    let (mut lo, mut hi) = eps_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::usage(format!("temperature range must satisfy 0 < lo < hi, got [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::usage("tolerance must be positive"));
    }
    let not_found = |lo, hi, ends| BifurcationResult {
        status: BifurcationStatus::RestPointNotFound,
        eps_star: None,
        iterations: 0,
        bracket: [lo, hi],
        endpoint_abscissa: ends,
    };
    let (Some(f_lo), Some(f_hi)) = (abscissa_at(game, params, block, lo)?, abscissa_at(game, params, block, hi)?) else {
        return Ok(not_found(lo, hi, [f64::NAN; 2]));
    };
    let ends = [f_lo, f_hi];
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return Ok(BifurcationResult {
            status: BifurcationStatus::NoBifurcationInRange,
            eps_star: None,
            iterations: 0,
            bracket: [lo, hi],
            endpoint_abscissa: ends,
        });
    }
    let lo_positive = f_lo > 0.0;
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let Some(f_mid) = abscissa_at(game, params, block, mid)? else {
            return Ok(not_found(lo, hi, ends));
        };
        if (f_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(BifurcationResult {
        status: BifurcationStatus::Found,
        eps_star: Some(0.5 * (lo + hi)),
        iterations,
        bracket: [lo, hi],
        endpoint_abscissa: ends,
    })
}
