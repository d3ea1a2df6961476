//! Score dynamics, their induced strategy flows and discrete-time recursions.
//!
//! First-order scheme: `ż = γ(U(σ(z)) − z)`.
//! Higher-order scheme: the payoff is adjusted by the output of an LTI
//! filter driven by the strategy, `v = Cξ + Dx`, `ξ̇ = Aξ + Bx`.

mod discrete;
mod feedback;
mod integrate;
mod population;

pub use discrete::{
    euler_discrete_step, run_stochastic, stochastic_step, EstimatorMode, StochasticLog,
    StochasticStep,
};
pub use feedback::{verify_feedback_block, FeedbackBlock, FeedbackReport, FrequencyGrid};
pub use integrate::{integrate, FnSystem, IntegrationOptions, Trajectory};
pub use population::{
    induced_strategy_field, induced_strategy_field_entropy, revision_protocol_field,
    revision_protocol_field_higher,
};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::choice::{softmax_unchecked, Temperature};
use crate::game::GameSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderParams {
    pub gamma: f64,
    pub eps: Temperature,
    /// Integrate payoffs without discounting: `ż = U(σ(z))`.
    #[serde(default)]
    pub undiscounted: bool,
}

impl FirstOrderParams {
    pub fn new(gamma: f64, eps: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::domain(format!("learning rate must be positive, got {gamma}")));
        }
        Ok(FirstOrderParams {
            gamma,
            eps: Temperature::new(eps)?,
            undiscounted: false,
        })
    }

    pub fn undiscounted(mut self) -> Self {
        self.undiscounted = true;
        self
    }

    pub fn eps(&self) -> f64 {
        self.eps.value()
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Ok(FirstOrderParams {
            eps: Temperature::new(eps)?,
            ..*self
        })
    }
}

/// Score and filter state of the higher-order scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct HigherOrderState {
    pub z: DVector<f64>,
    pub xi: DVector<f64>,
}

impl HigherOrderState {
    /// Filter state starts at rest.
    pub fn new(z: DVector<f64>) -> Self {
        let xi = DVector::zeros(z.len());
        HigherOrderState { z, xi }
    }

    pub fn stacked(&self) -> DVector<f64> {
        let n = self.z.len();
        DVector::from_fn(2 * n, |i, _| if i < n { self.z[i] } else { self.xi[i - n] })
    }

    pub fn from_stacked(y: &DVector<f64>) -> Self {
        let n = y.len() / 2;
        HigherOrderState {
            z: y.rows(0, n).into_owned(),
            xi: y.rows(n, n).into_owned(),
        }
    }
}

pub(crate) fn check_scores(z: &DVector<f64>, game: &GameSpec) -> Result<()> {
    if z.len() != game.dim() {
        return Err(Error::domain(format!(
            "score vector has length {}, game dimension is {}",
            z.len(),
            game.dim()
        )));
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("scores must be finite"));
    }
    Ok(())
}

/// First-order score field `γ(U(σ(z)) − z)`, or `U(σ(z))` when undiscounted.
pub fn expdrl_field(z: &DVector<f64>, game: &GameSpec, params: &FirstOrderParams) -> Result<DVector<f64>> {
    check_scores(z, game)?;
    Ok(first_order_unchecked(z, game, params))
}

fn first_order_unchecked(z: &DVector<f64>, game: &GameSpec, params: &FirstOrderParams) -> DVector<f64> {
    let x = softmax_unchecked(z, params.eps(), game.action_counts());
    let u = game.payoff_vector(&x).expect("dimension checked");
    if params.undiscounted {
        u
    } else {
        (u - z) * params.gamma
    }
}

/// Higher-order field `(ż, ξ̇)`.
pub fn hexpdrl_field(
    state: &HigherOrderState,
    game: &GameSpec,
    params: &FirstOrderParams,
    block: &FeedbackBlock,
) -> Result<(DVector<f64>, DVector<f64>)> {
    check_scores(&state.z, game)?;
    if state.xi.len() != game.dim() || state.xi.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("filter state must be finite with the game's dimension"));
    }
    block.check_dim(game.dim())?;
    block.require_valid()?;
    Ok(higher_order_unchecked(&state.z, &state.xi, game, params, block))
}

fn higher_order_unchecked(
    z: &DVector<f64>,
    xi: &DVector<f64>,
    game: &GameSpec,
    params: &FirstOrderParams,
    block: &FeedbackBlock,
) -> (DVector<f64>, DVector<f64>) {
    let x = softmax_unchecked(z, params.eps(), game.action_counts());
    let u = game.payoff_vector(&x).expect("dimension checked");
    let (dz, dxi) = match block {
        FeedbackBlock::HighPass { k, a, .. } => {
            let (k, a) = (*k, *a);
            let dz = DVector::from_fn(z.len(), |i, _| {
                let raw = -z[i] + u[i] - k * (xi[i] + x[i]);
                if params.undiscounted {
                    raw + z[i]
                } else {
                    params.gamma * raw
                }
            });
            let dxi = DVector::from_fn(z.len(), |i, _| -a * xi[i] - a * x[i]);
            (dz, dxi)
        }
        FeedbackBlock::General { a, b, c, d, .. } => {
            let v = c * xi + d * &x;
            let dz = if params.undiscounted {
                u - v
            } else {
                (u - z - v) * params.gamma
            };
            (dz, a * xi + b * &x)
        }
    };
    (dz, dxi)
}

/// Autonomous system integrated by [`integrate`].
pub trait ScoreSystem: Sync {
    fn state_dim(&self) -> usize;
    fn derivative(&self, y: &DVector<f64>) -> DVector<f64>;
    /// Strategy profile induced by a state.
    fn strategy(&self, y: &DVector<f64>) -> DVector<f64>;
    /// Player block sizes of the strategy; their sum is the score dimension.
    fn action_counts(&self) -> Vec<usize> {
        vec![self.state_dim()]
    }
}

/// First-order scheme bound to a game.
#[derive(Debug, Clone)]
pub struct FirstOrder<'a> {
    pub game: &'a GameSpec,
    pub params: FirstOrderParams,
}

impl<'a> FirstOrder<'a> {
    pub fn new(game: &'a GameSpec, params: FirstOrderParams) -> Self {
        FirstOrder { game, params }
    }
}

impl ScoreSystem for FirstOrder<'_> {
    fn state_dim(&self) -> usize {
        self.game.dim()
    }

    fn derivative(&self, y: &DVector<f64>) -> DVector<f64> {
        first_order_unchecked(y, self.game, &self.params)
    }

    fn strategy(&self, y: &DVector<f64>) -> DVector<f64> {
        softmax_unchecked(y, self.params.eps(), self.game.action_counts())
    }

    fn action_counts(&self) -> Vec<usize> {
        self.game.action_counts().to_vec()
    }
}

/// Higher-order scheme bound to a game; state is `[z; ξ]`.
#[derive(Debug, Clone)]
pub struct HigherOrder<'a> {
    pub game: &'a GameSpec,
    pub params: FirstOrderParams,
    pub block: FeedbackBlock,
}

impl<'a> HigherOrder<'a> {
    pub fn new(game: &'a GameSpec, params: FirstOrderParams, block: FeedbackBlock) -> Result<Self> {
        block.check_dim(game.dim())?;
        block.require_valid()?;
        Ok(HigherOrder { game, params, block })
    }
}

impl ScoreSystem for HigherOrder<'_> {
    fn state_dim(&self) -> usize {
        2 * self.game.dim()
    }

    fn derivative(&self, y: &DVector<f64>) -> DVector<f64> {
        let n = self.game.dim();
        let z = y.rows(0, n).into_owned();
        let xi = y.rows(n, n).into_owned();
        let (dz, dxi) = higher_order_unchecked(&z, &xi, self.game, &self.params, &self.block);
        DVector::from_fn(2 * n, |i, _| if i < n { dz[i] } else { dxi[i - n] })
    }

    fn strategy(&self, y: &DVector<f64>) -> DVector<f64> {
        let n = self.game.dim();
        softmax_unchecked(&y.rows(0, n).into_owned(), self.params.eps(), self.game.action_counts())
    }

    fn action_counts(&self) -> Vec<usize> {
        self.game.action_counts().to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{preset, PresetParams};
    use approx::assert_abs_diff_eq;

    fn rps(l: f64) -> GameSpec {
        preset("rps", &PresetParams::new().with("l", l)).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(FirstOrderParams::new(0.0, 1.0).is_err());
        assert!(FirstOrderParams::new(1.0, 0.0).is_err());
        assert!(FirstOrderParams::new(1.0, 1.0).is_ok());
    }

    #[test]
    fn rps_rest_point_zero_field() {
        let g = rps(1.0);
        let p = FirstOrderParams::new(1.0, 1.0).unwrap();
        let f = expdrl_field(&DVector::zeros(3), &g, &p).unwrap();
        assert!(f.amax() < 1e-15);
        for l in [0.5, 2.5, 5.0, 8.0] {
            let z = DVector::from_element(3, (1.0 - l) / 3.0);
            let f = expdrl_field(&z, &rps(l), &p).unwrap();
            assert!(f.amax() < 1e-14, "l = {l}");
        }
    }

    #[test]
    fn field_linear_in_gamma() {
        let g = preset("shapley", &PresetParams::new()).unwrap();
        let z = DVector::from_vec(vec![0.3, -0.2, 0.9, -1.0, 0.4, 0.1]);
        let f1 = expdrl_field(&z, &g, &FirstOrderParams::new(1.0, 0.7).unwrap()).unwrap();
        let f4 = expdrl_field(&z, &g, &FirstOrderParams::new(4.0, 0.7).unwrap()).unwrap();
        assert!((f4 - f1 * 4.0).amax() < 1e-14);
    }

    #[test]
    fn undiscounted_field_is_payoff() {
        let g = rps(2.0);
        let p = FirstOrderParams::new(3.0, 1.0).unwrap().undiscounted();
        let z = DVector::from_vec(vec![0.1, 0.5, -0.3]);
        let x = softmax_unchecked(&z, 1.0, &[3]);
        let f = expdrl_field(&z, &g, &p).unwrap();
        assert_eq!(f, g.payoff_vector(&x).unwrap());
    }

    #[test]
    fn field_dimension_and_finiteness() {
        let g = rps(1.0);
        let p = FirstOrderParams::new(1.0, 1.0).unwrap();
        assert!(expdrl_field(&DVector::zeros(4), &g, &p).is_err());
        assert!(expdrl_field(&DVector::from_vec(vec![0.0, f64::NAN, 0.0]), &g, &p).is_err());
    }

    #[test]
    fn zero_gain_block_decouples() {
        let g = rps(5.0);
        let p = FirstOrderParams::new(1.0, 0.8).unwrap();
        let block = FeedbackBlock::high_pass(0.0, 1.0, g.dim()).unwrap();
        let state = HigherOrderState {
            z: DVector::from_vec(vec![0.2, -0.4, 1.1]),
            xi: DVector::from_vec(vec![0.3, 0.3, -0.9]),
        };
        let (dz, _) = hexpdrl_field(&state, &g, &p, &block).unwrap();
        let f = expdrl_field(&state.z, &g, &p).unwrap();
        assert!((dz - f).amax() < 1e-15);
    }

    #[test]
    fn high_pass_matches_hand_expansion() {
        let g = preset("two_player_rps", &PresetParams::new().with("l", 5.0)).unwrap();
        let (gamma, eps, k, a) = (1.3, 0.6, 1.0, 1.0);
        let p = FirstOrderParams::new(gamma, eps).unwrap();
        let z = DVector::from_vec(vec![0.4, -0.1, 0.7, -0.5, 0.2, 0.05]);
        let xi = DVector::from_vec(vec![-0.2, 0.1, 0.3, 0.0, -0.6, 0.25]);
        let state = HigherOrderState { z: z.clone(), xi: xi.clone() };
        let block = FeedbackBlock::high_pass(k, a, 6).unwrap();
        let (dz, dxi) = hexpdrl_field(&state, &g, &p, &block).unwrap();

        // Independent expansion: per-player soft-max and explicit payoff blocks.
        let am = crate::presets::rps_matrix(5.0);
        let sm = |s: &[f64]| {
            let e: Vec<f64> = s.iter().map(|v| (v / eps).exp()).collect();
            let t: f64 = e.iter().sum();
            e.into_iter().map(|v| v / t).collect::<Vec<_>>()
        };
        let x1 = sm(&[z[0], z[1], z[2]]);
        let x2 = sm(&[z[3], z[4], z[5]]);
        let x: Vec<f64> = x1.iter().chain(&x2).copied().collect();
        for i in 0..3 {
            let u1: f64 = (0..3).map(|j| am[(i, j)] * x2[j]).sum();
            let u2: f64 = (0..3).map(|j| am[(i, j)] * x1[j]).sum();
            for (row, u) in [(i, u1), (i + 3, u2)] {
                let want = gamma * (-z[row] + u - k * (xi[row] + x[row]));
                assert_abs_diff_eq!(dz[row], want, epsilon = 1e-14);
                assert_abs_diff_eq!(dxi[row], -a * xi[row] - a * x[row], epsilon = 1e-15);
            }
        }

        // General matrix route agrees with the specialised high-pass path.
        let general = block.to_general();
        let (dz2, dxi2) = hexpdrl_field(&state, &g, &p, &general).unwrap();
        assert!((dz2 - dz).amax() < 1e-14);
        assert!((dxi2 - dxi).amax() < 1e-15);
    }

    #[test]
    fn higher_order_equilibrium() {
        let g = rps(2.5);
        let p = FirstOrderParams::new(1.0, 1.0).unwrap();
        let block = FeedbackBlock::high_pass(1.0, 1.0, 3).unwrap();
        let z = DVector::from_element(3, -0.5);
        let x = softmax_unchecked(&z, 1.0, &[3]);
        // ξ* = −A⁻¹Bx = −x for the high-pass block
        let state = HigherOrderState { z, xi: -x };
        let (dz, dxi) = hexpdrl_field(&state, &g, &p, &block).unwrap();
        assert!(dz.amax() < 1e-15);
        assert!(dxi.amax() < 1e-15);
    }

    #[test]
    fn invalid_block_rejected_by_field() {
        let g = rps(1.0);
        let p = FirstOrderParams::new(1.0, 1.0).unwrap();
        let id = nalgebra::DMatrix::<f64>::identity(3, 3);
        let bad = FeedbackBlock::general(id.clone(), id.clone(), id.clone(), id).unwrap();
        let state = HigherOrderState::new(DVector::zeros(3));
        assert!(matches!(
            hexpdrl_field(&state, &g, &p, &bad),
            Err(Error::Configuration(_))
        ));
    }
}
