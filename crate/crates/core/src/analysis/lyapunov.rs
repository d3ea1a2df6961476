//! Storage functions evaluated along recorded trajectories.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::choice::{bregman_lse, Temperature};
use crate::dynamics::{FeedbackBlock, Trajectory};
use crate::linalg::{solve_lyapunov, symmetric_eigenvalues};
use crate::{Error, Result};

/// Largest forward difference still counted as non-increasing.
pub const MONOTONE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LyapunovVerdict {
    NonIncreasing,
    Increasing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovTrace {
    pub values: Vec<f64>,
    pub verdict: LyapunovVerdict,
    /// Largest forward difference `V(t_{k+1}) − V(t_k)`.
    pub max_increase: f64,
}

impl LyapunovTrace {
    fn from_values(values: Vec<f64>) -> Self {
        let max_increase = values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        let verdict = if max_increase <= MONOTONE_TOL {
            LyapunovVerdict::NonIncreasing
        } else {
            LyapunovVerdict::Increasing
        };
        LyapunovTrace { values, verdict, max_increase }
    }

    pub fn is_non_increasing(&self) -> bool {
        self.verdict == LyapunovVerdict::NonIncreasing
    }
}

fn check_dims(traj: &Trajectory, z_star: &DVector<f64>) -> Result<()> {
    if z_star.len() != traj.score_dim {
        return Err(Error::domain(format!(
            "rest point has length {}, trajectory scores have {}",
            z_star.len(),
            traj.score_dim
        )));
    }
    Ok(())
}

/// `V_{z*}(z(t_k))` at every sample.
pub fn lyapunov_trace(traj: &Trajectory, z_star: &DVector<f64>, eps: f64) -> Result<LyapunovTrace> {
    check_dims(traj, z_star)?;
    let t = Temperature::new(eps)?;
    let values = (0..traj.len())
        .map(|k| bregman_lse(&traj.scores(k), z_star, t, &traj.action_counts))
        .collect::<Result<Vec<_>>>()?;
    Ok(LyapunovTrace::from_values(values))
}

/// Storage matrix for the filter's quadratic storage `½ξᵀPξ`.
///
/// Starts from the Lyapunov solution `AᵀP₀ + P₀A = −I` and rescales it so
/// that the dissipation inequality `d/dt ½ξᵀPξ ≤ xᵀv` holds, i.e.
/// `[[AᵀP + PA, PB − Cᵀ], [BᵀP − C, −(D + Dᵀ)]] ⪯ 0`. Returns `P` and the
/// worst eigenvalue of that matrix.
pub fn storage_matrix(block: &FeedbackBlock) -> Result<(DMatrix<f64>, f64)> {
    let a = block.a_matrix();
    let n = a.nrows();
    let p0 = solve_lyapunov(&a, &DMatrix::identity(n, n))?;
    let scale = match block {
        // Only P = (K/a)I removes the cross term; P₀ = I/(2a).
        FeedbackBlock::HighPass { k, .. } => 2.0 * k,
        FeedbackBlock::General { .. } => best_scale(block, &p0),
    };
    let p = p0 * scale;
    let worst = dissipation_margin(block, &p);
    Ok((p, worst))
}

/// Largest eigenvalue of the dissipation matrix for storage `P`.
pub fn dissipation_margin(block: &FeedbackBlock, p: &DMatrix<f64>) -> f64 {
    let (a, b, c, d) = (block.a_matrix(), block.b_matrix(), block.c_matrix(), block.d_matrix());
    let n = a.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&(a.transpose() * p + p * &a));
    let off = p * &b - c.transpose();
    m.view_mut((0, n), (n, n)).copy_from(&off);
    m.view_mut((n, 0), (n, n)).copy_from(&off.transpose());
    m.view_mut((n, n), (n, n)).copy_from(&(-(&d + d.transpose())));
    *symmetric_eigenvalues(&m).last().expect("non-empty")
}

/// Golden-section search of the convex map `c ↦ λ_max(M(cP₀))`.
fn best_scale(block: &FeedbackBlock, p0: &DMatrix<f64>) -> f64 {
    let f = |c: f64| dissipation_margin(block, &(p0 * c));
    let (mut lo, mut hi) = (0.0, 1.0);
    while f(hi) < f(hi / 2.0) && hi < 1e8 {
        hi *= 2.0;
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c1 = hi - g * (hi - lo);
        let c2 = lo + g * (hi - lo);
        if f(c1) <= f(c2) {
            hi = c2;
        } else {
            lo = c1;
        }
    }
    0.5 * (lo + hi)
}

/// `W = V_{z*}(z) + (γ/2)(ξ − ξ*)ᵀP(ξ − ξ*)` along a higher-order trajectory.
/// When `p` is `None` the storage matrix from [`storage_matrix`] is used.
pub fn composite_lyapunov_trace(
    traj: &Trajectory,
    z_star: &DVector<f64>,
    xi_star: &DVector<f64>,
    eps: f64,
    gamma: f64,
    block: &FeedbackBlock,
    p: Option<&DMatrix<f64>>,
) -> Result<LyapunovTrace> {
    check_dims(traj, z_star)?;
    let n = traj.score_dim;
    if xi_star.len() != n {
        return Err(Error::domain("filter equilibrium has the wrong dimension"));
    }
    let p = match p {
        Some(p) => p.clone(),
        None => storage_matrix(block)?.0,
    };
    if p.shape() != (n, n) || (&p - p.transpose()).amax() > 1e-12 {
        return Err(Error::config("storage matrix must be symmetric with the filter's dimension"));
    }
    if symmetric_eigenvalues(&p)[0] <= 0.0 {
        return Err(Error::config("storage matrix is not positive definite"));
    }
    let t = Temperature::new(eps)?;
    let mut values = Vec::with_capacity(traj.len());
    for k in 0..traj.len() {
        let xi = traj
            .filter_state(k)
            .ok_or_else(|| Error::domain("trajectory has no filter state"))?;
        let d = xi - xi_star;
        let v = bregman_lse(&traj.scores(k), z_star, t, &traj.action_counts)?;
        values.push(v + 0.5 * gamma * d.dot(&(&p * &d)));
    }
    Ok(LyapunovTrace::from_values(values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn high_pass_storage() {
        let b = FeedbackBlock::high_pass(1.0, 1.0, 3).unwrap();
        let p0 = solve_lyapunov(&b.a_matrix(), &DMatrix::identity(3, 3)).unwrap();
        assert!((p0 - DMatrix::<f64>::identity(3, 3) * 0.5).amax() < 1e-14);
        let (p, worst) = storage_matrix(&b).unwrap();
        assert!((p - DMatrix::<f64>::identity(3, 3)).amax() < 1e-14);
        assert!(worst <= 1e-12);
    }

    #[test]
    fn general_scale_search_agrees() {
        let b = FeedbackBlock::high_pass(2.0, 0.5, 2).unwrap();
        let (p, _) = storage_matrix(&b.to_general()).unwrap();
        assert!((p - DMatrix::<f64>::identity(2, 2) * 4.0).amax() < 1e-6);
    }
}
