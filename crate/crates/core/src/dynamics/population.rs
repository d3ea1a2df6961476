//! Strategy-space flows induced by the score dynamics, and their
//! population-game reading as mean dynamics of a revision protocol.

use nalgebra::{DMatrix, DVector};

use super::{check_scores, FeedbackBlock, FirstOrderParams, HigherOrderState};
use crate::choice::softmax_unchecked;
use crate::game::{block_ranges, GameSpec, MixedProfile};
use crate::{Error, Result};

/// `ẋ_i = γε⁻¹[x_i(u_i − x·u) − x_i(z_i − x·z)]` per player with `x = σ(z)`.
///
/// Undiscounted parameters drop the score term and the factor `γ`, matching
/// the chain rule applied to `ż = U(σ(z))`.
pub fn induced_strategy_field(z: &DVector<f64>, game: &GameSpec, params: &FirstOrderParams) -> Result<DVector<f64>> {
    check_scores(z, game)?;
    let counts = game.action_counts();
    let x = softmax_unchecked(z, params.eps(), counts);
    let u = game.payoff_vector(&x)?;
    let mut out = DVector::zeros(x.len());
    for r in block_ranges(counts) {
        let xu: f64 = r.clone().map(|i| x[i] * u[i]).sum();
        let xz: f64 = r.clone().map(|i| x[i] * z[i]).sum();
        for i in r {
            out[i] = if params.undiscounted {
                x[i] * (u[i] - xu) / params.eps()
            } else {
                params.gamma / params.eps() * (x[i] * (u[i] - xu) - x[i] * (z[i] - xz))
            };
        }
    }
    Ok(out)
}

/// Entropy form of the same flow, written in strategies only:
/// `ẋ_i = γε⁻¹x_i(u_i − x·u) − γx_i Σ_j x_j ln(x_i/x_j)`.
///
/// Follows from `z_i − x·z = ε Σ_j x_j ln(x_i/x_j)` when `x = σ(z)`.
pub fn induced_strategy_field_entropy(
    x: &MixedProfile,
    game: &GameSpec,
    params: &FirstOrderParams,
) -> Result<DVector<f64>> {
    let xv = x.as_vector();
    if xv.len() != game.dim() || x.action_counts() != game.action_counts() {
        return Err(Error::domain("profile does not match the game's action counts"));
    }
    if !x.is_interior() {
        return Err(Error::domain("entropy form needs an interior profile"));
    }
    let u = game.payoff_vector(xv)?;
    let (g, e) = (params.gamma, params.eps());
    let mut out = DVector::zeros(xv.len());
    for r in block_ranges(game.action_counts()) {
        let xu: f64 = r.clone().map(|i| xv[i] * u[i]).sum();
        for i in r.clone() {
            let rel: f64 = r.clone().map(|j| xv[j] * (xv[i] / xv[j]).ln()).sum();
            out[i] = g / e * xv[i] * (u[i] - xu) - g * xv[i] * rel;
        }
    }
    Ok(out)
}

/// Mean dynamics `ẋ_i = Σ_j x_j ρ_ji − x_i Σ_j ρ_ij` for a protocol with
/// switch rates `ρ_ij = c·x_j·w_j` inside each player block.
fn mean_dynamics(x: &DVector<f64>, w: &DVector<f64>, c: f64, counts: &[usize]) -> DVector<f64> {
    let mut out = DVector::zeros(x.len());
    for r in block_ranges(counts) {
        let k = r.len();
        let rho = DMatrix::from_fn(k, k, |_, j| c * x[r.start + j] * w[r.start + j]);
        for i in 0..k {
            let inflow: f64 = (0..k).map(|j| x[r.start + j] * rho[(j, i)]).sum();
            let outflow: f64 = (0..k).map(|j| rho[(i, j)]).sum();
            out[r.start + i] = inflow - x[r.start + i] * outflow;
        }
    }
    out
}

fn check_profile(x: &MixedProfile, game: &GameSpec) -> Result<()> {
    if x.action_counts() != game.action_counts() {
        return Err(Error::domain("profile does not match the game's action counts"));
    }
    Ok(())
}

/// Mean dynamics of the protocol `ρ_ij = γε⁻¹x_j(u_j − z_j)`, `u = U(x)`.
pub fn revision_protocol_field(
    x: &MixedProfile,
    z: &DVector<f64>,
    game: &GameSpec,
    params: &FirstOrderParams,
) -> Result<DVector<f64>> {
    check_profile(x, game)?;
    check_scores(z, game)?;
    let xv = x.as_vector();
    let u = game.payoff_vector(xv)?;
    let w = u - z;
    Ok(mean_dynamics(xv, &w, params.gamma / params.eps(), game.action_counts()))
}

/// Higher-order protocol `ρ_ij = γε⁻¹x_j(u_j − v_j − z_j)` with the filter
/// output `v = Cξ + Dx`.
pub fn revision_protocol_field_higher(
    x: &MixedProfile,
    state: &HigherOrderState,
    game: &GameSpec,
    params: &FirstOrderParams,
    block: &FeedbackBlock,
) -> Result<DVector<f64>> {
    check_profile(x, game)?;
    check_scores(&state.z, game)?;
    block.check_dim(game.dim())?;
    if state.xi.len() != game.dim() {
        return Err(Error::domain("filter state has the wrong dimension"));
    }
    let xv = x.as_vector();
    let u = game.payoff_vector(xv)?;
    let v = block.c_matrix() * &state.xi + block.d_matrix() * xv;
    let w = u - v - &state.z;
    Ok(mean_dynamics(xv, &w, params.gamma / params.eps(), game.action_counts()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::{softmax, Temperature};
    use crate::presets::{preset, PresetParams};

    #[test]
    fn blocks_sum_to_zero() {
        let g = preset("jordan_mp", &PresetParams::new()).unwrap();
        let p = FirstOrderParams::new(1.5, 0.4).unwrap();
        let z = DVector::from_vec(vec![0.3, -0.7, 1.2, 0.0, -0.4, 0.9]);
        let f = induced_strategy_field(&z, &g, &p).unwrap();
        for r in g.blocks() {
            assert!(f.rows(r.start, r.len()).sum().abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_everything_is_stationary() {
        let g = preset("rps", &PresetParams::new().with("l", 1.0)).unwrap();
        let p = FirstOrderParams::new(1.0, 1.0).unwrap();
        let x = MixedProfile::centroid(&[3]).unwrap();
        let f = revision_protocol_field(&x, &DVector::from_element(3, 0.2), &g, &p).unwrap();
        assert!(f.amax() < 1e-16);
    }

    #[test]
    fn protocol_matches_induced_field() {
        let g = preset("shapley", &PresetParams::new()).unwrap();
        let p = FirstOrderParams::new(2.0, 0.3).unwrap();
        let z = DVector::from_vec(vec![0.1, 0.9, -0.4, 0.5, -0.2, 0.0]);
        let x = softmax(&z, Temperature::new(0.3).unwrap(), g.action_counts()).unwrap();
        let a = revision_protocol_field(&x, &z, &g, &p).unwrap();
        let b = induced_strategy_field(&z, &g, &p).unwrap();
        assert!((a - b).amax() < 1e-12);
    }
}
