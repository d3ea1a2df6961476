//! Gibbs-entropy soft-max choice map and its log-sum-exp potential.
//!
//! All block functions subtract the block maximum before exponentiating, so
//! temperatures down to `1e-2` and scores in the hundreds stay finite.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::game::{block_ranges, MixedProfile};
use crate::{Error, Result};

/// Temperature `ε > 0` of the soft-max.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Temperature(f64);

impl Temperature {
    pub fn new(eps: f64) -> Result<Self> {
        if eps > 0.0 && eps.is_finite() {
            Ok(Temperature(eps))
        } else {
            Err(Error::domain(format!("temperature must be positive and finite, got {eps}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_finite(z: &[f64]) -> Result<()> {
    if z.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::domain("scores must be finite"))
    }
}

fn check_len(z: &DVector<f64>, action_counts: &[usize]) -> Result<()> {
    let n: usize = action_counts.iter().sum();
    if z.len() != n {
        return Err(Error::domain(format!(
            "score vector has length {}, expected {n}",
            z.len()
        )));
    }
    Ok(())
}

fn block_max(z: &[f64]) -> f64 {
    z.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `exp(z_i/ε) / Σ_j exp(z_j/ε)`.
pub fn softmax_block(z: &[f64], eps: Temperature) -> Result<Vec<f64>> {
    check_finite(z)?;
    let mut out = Vec::with_capacity(z.len());
    softmax_block_into(z, eps.value(), &mut out);
    Ok(out)
}

fn softmax_block_into(z: &[f64], eps: f64, out: &mut Vec<f64>) {
    let m = block_max(z);
    let start = out.len();
    let mut total = 0.0;
    for &v in z {
        let e = ((v - m) / eps).exp();
        total += e;
        out.push(e);
    }
    for v in &mut out[start..] {
        *v /= total;
    }
}

/// Soft-max applied to each player's block.
pub fn softmax(z: &DVector<f64>, eps: Temperature, action_counts: &[usize]) -> Result<MixedProfile> {
    check_len(z, action_counts)?;
    check_finite(z.as_slice())?;
    Ok(MixedProfile::from_softmax(
        action_counts,
        softmax_unchecked(z, eps.value(), action_counts),
    ))
}

/// Block soft-max without validation, for hot loops whose inputs are already
/// known to be finite and correctly sized.
pub(crate) fn softmax_unchecked(z: &DVector<f64>, eps: f64, action_counts: &[usize]) -> DVector<f64> {
    let mut out = Vec::with_capacity(z.len());
    for r in block_ranges(action_counts) {
        softmax_block_into(&z.as_slice()[r], eps, &mut out);
    }
    DVector::from_vec(out)
}

/// `ε ln Σ_j exp(z_j/ε)`.
pub fn log_sum_exp(z: &[f64], eps: Temperature) -> Result<f64> {
    check_finite(z)?;
    Ok(lse_unchecked(z, eps.value()))
}

fn lse_unchecked(z: &[f64], eps: f64) -> f64 {
    let m = block_max(z);
    let s: f64 = z.iter().map(|&v| ((v - m) / eps).exp()).sum();
    m + eps * s.ln()
}

/// `ε⁻¹ (diag(σ) − σσᵀ)`, the Hessian of log-sum-exp.
pub fn softmax_jacobian(z: &[f64], eps: Temperature) -> Result<DMatrix<f64>> {
    let s = softmax_block(z, eps)?;
    Ok(jacobian_from_probs(&s, eps.value()))
}

fn jacobian_from_probs(s: &[f64], eps: f64) -> DMatrix<f64> {
    let k = s.len();
    DMatrix::from_fn(k, k, |i, j| {
        let d = if i == j { s[i] } else { 0.0 };
        (d - s[i] * s[j]) / eps
    })
}

/// Block-diagonal Jacobian `Dσ(z)` of the full soft-max.
pub fn softmax_jacobian_full(
    z: &DVector<f64>,
    eps: Temperature,
    action_counts: &[usize],
) -> Result<DMatrix<f64>> {
    check_len(z, action_counts)?;
    check_finite(z.as_slice())?;
    let x = softmax_unchecked(z, eps.value(), action_counts);
    Ok(jacobian_full_from_probs(&x, eps.value(), action_counts))
}

pub(crate) fn jacobian_full_from_probs(
    x: &DVector<f64>,
    eps: f64,
    action_counts: &[usize],
) -> DMatrix<f64> {
    let n = x.len();
    let mut jac = DMatrix::zeros(n, n);
    for r in block_ranges(action_counts) {
        let b = jacobian_from_probs(&x.as_slice()[r.clone()], eps);
        jac.view_mut((r.start, r.start), b.shape()).copy_from(&b);
    }
    jac
}

/// Bregman divergence of the block log-sum-exp functions,
/// `Σ_p lse(z^p) − lse(z̄^p) − σ(z̄^p)·(z^p − z̄^p)`.
pub fn bregman_lse(
    z: &DVector<f64>,
    z_ref: &DVector<f64>,
    eps: Temperature,
    action_counts: &[usize],
) -> Result<f64> {
    check_len(z, action_counts)?;
    check_len(z_ref, action_counts)?;
    check_finite(z.as_slice())?;
    check_finite(z_ref.as_slice())?;
    let e = eps.value();
    let mut total = 0.0;
    let mut s = Vec::new();
    for r in block_ranges(action_counts) {
        let zb = &z.as_slice()[r.clone()];
        let rb = &z_ref.as_slice()[r];
        s.clear();
        softmax_block_into(rb, e, &mut s);
        let lin: f64 = s.iter().zip(zb.iter().zip(rb)).map(|(p, (a, b))| p * (a - b)).sum();
        total += lse_unchecked(zb, e) - lse_unchecked(rb, e) - lin;
    }
    // Rounding can leave a tiny negative value where the divergence is zero.
    Ok(total.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn t(e: f64) -> Temperature {
        Temperature::new(e).unwrap()
    }

    #[test]
    fn temperature_must_be_positive() {
        assert!(Temperature::new(0.0).is_err());
        assert!(Temperature::new(-1.0).is_err());
        assert!(Temperature::new(f64::NAN).is_err());
    }

    #[test]
    fn uniform_scores() {
        let s = softmax_block(&[0.0, 0.0, 0.0], t(1.0)).unwrap();
        for v in s {
            assert_abs_diff_eq!(v, 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn shift_invariance() {
        let a = softmax_block(&[1.0, 2.0, 3.0], t(1.0)).unwrap();
        let b = softmax_block(&[6.0, 7.0, 8.0], t(1.0)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn low_temperature_concentrates() {
        let s = softmax_block(&[1.0, 0.0, 0.0], t(0.01)).unwrap();
        assert!(s[0] >= 1.0 - 1e-4);
        assert!(s.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn large_scores_do_not_overflow() {
        let s = softmax_block(&[1000.0, 999.0], t(0.01)).unwrap();
        assert!(s.iter().all(|v| v.is_finite()));
        assert_abs_diff_eq!(log_sum_exp(&[1000.0, 1000.0], t(1.0)).unwrap(), 1000.0 + 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(softmax_block(&[f64::NAN, 0.0], t(1.0)).is_err());
        assert!(log_sum_exp(&[f64::INFINITY], t(1.0)).is_err());
        assert!(softmax_jacobian(&[0.0, f64::NAN], t(1.0)).is_err());
    }

    #[test]
    fn softmax_length_mismatch() {
        assert!(softmax(&DVector::zeros(5), t(1.0), &[3, 3]).is_err());
    }

    #[test]
    fn zero_scores_give_centroid() {
        let x = softmax(&DVector::zeros(6), t(1.0), &[3, 3]).unwrap();
        assert!(x.as_vector().iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn lse_of_zero_is_ln_n() {
        assert_abs_diff_eq!(log_sum_exp(&[0.0; 3], t(1.0)).unwrap(), 3f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn uniform_jacobian_entries() {
        let j = softmax_jacobian(&[0.0; 3], t(1.0)).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                let want = if i == k { 2.0 / 9.0 } else { -1.0 / 9.0 };
                assert_abs_diff_eq!(j[(i, k)], want, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn bregman_zero_at_reference_and_along_ones() {
        let z = DVector::from_vec(vec![0.3, -1.2, 2.0, 0.5, 0.1]);
        let counts = [3, 2];
        assert_eq!(bregman_lse(&z, &z, t(0.7), &counts).unwrap(), 0.0);
        let mut shifted = z.clone();
        for i in 0..3 {
            shifted[i] += 4.0;
        }
        for i in 3..5 {
            shifted[i] -= 2.5;
        }
        assert!(bregman_lse(&shifted, &z, t(0.7), &counts).unwrap() < 1e-12);
        assert!(bregman_lse(&z, &DVector::zeros(4), t(0.7), &counts).is_err());
    }
}
