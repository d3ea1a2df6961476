//! Discrete-time score recursions: the deterministic Euler step and the
//! stochastic sampled-payoff recursion.

use std::io::Write;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_scores, FirstOrderParams};
use crate::choice::softmax_unchecked;
use crate::dynamics::integrate::fmt17;
use crate::game::{block_ranges, GameSpec};
use crate::{Error, Result};

/// `Z⁺ = Z + αγ(U(σ(Z)) − Z)`; returns `(Z⁺, σ(Z⁺))`.
pub fn euler_discrete_step(
    z: &DVector<f64>,
    game: &GameSpec,
    params: &FirstOrderParams,
    alpha: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    check_scores(z, game)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("step size must be positive, got {alpha}")));
    }
    let counts = game.action_counts();
    let x = softmax_unchecked(z, params.eps(), counts);
    let u = game.payoff_vector(&x)?;
    let next = z + (u - z) * (alpha * params.gamma);
    let x_next = softmax_unchecked(&next, params.eps(), counts);
    Ok((next, x_next))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorMode {
    /// Every action's payoff against the realized opponents is observed.
    FullInfo,
    /// Only the realized payoff is observed, importance-weighted by its probability.
    Bandit,
}

impl std::str::FromStr for EstimatorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full-info" => Ok(EstimatorMode::FullInfo),
            "bandit" => Ok(EstimatorMode::Bandit),
            other => Err(Error::usage(format!("unknown estimator mode `{other}` (full-info, bandit)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticStep {
    pub z: DVector<f64>,
    pub x: DVector<f64>,
    /// Sampled pure actions; for population games `(own, opponent)`.
    pub actions: Vec<usize>,
    /// Realized payoff of each player (one entry for population games).
    pub realized: Vec<f64>,
    /// Payoff-vector estimate `û` used in the update.
    pub estimate: DVector<f64>,
}

fn sample<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Payoff estimate `û` at the current strategy `x`, sampling actions with `rng`.
pub(crate) fn sample_estimate<R: Rng + ?Sized>(
    game: &GameSpec,
    x: &DVector<f64>,
    mode: EstimatorMode,
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<f64>, DVector<f64>)> {
    let n = game.dim();
    let mut est = DVector::zeros(n);
    if game.is_population() {
        let own = sample(x.as_slice(), rng);
        let opp = sample(x.as_slice(), rng);
        let pi = game.pure_payoff(&[own, opp])?[0];
        match mode {
            EstimatorMode::FullInfo => {
                for i in 0..n {
                    est[i] = game.pure_payoff(&[i, opp])?[0];
                }
            }
            EstimatorMode::Bandit => est[own] = pi / x[own],
        }
        return Ok((vec![own, opp], vec![pi], est));
    }

    let blocks = block_ranges(game.action_counts());
    let actions: Vec<usize> = blocks.iter().map(|r| sample(&x.as_slice()[r.clone()], rng)).collect();
    let realized = game.pure_payoff(&actions)?;
    let mut profile = actions.clone();
    for (p, r) in blocks.iter().enumerate() {
        match mode {
            EstimatorMode::FullInfo => {
                for i in 0..r.len() {
                    profile[p] = i;
                    est[r.start + i] = game.pure_payoff(&profile)?[p];
                }
                profile[p] = actions[p];
            }
            EstimatorMode::Bandit => {
                let i = actions[p];
                est[r.start + i] = realized[p] / x[r.start + i];
            }
        }
    }
    Ok((actions, realized, est))
}

/// One step `Z⁺ = Z + α_kγ(û − Z)` with `û` sampled at `X = σ(Z)`.
pub fn stochastic_step<R: Rng + ?Sized>(
    z: &DVector<f64>,
    game: &GameSpec,
    params: &FirstOrderParams,
    alpha: f64,
    rng: &mut R,
    mode: EstimatorMode,
) -> Result<StochasticStep> {
    check_scores(z, game)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!("step size must lie in [0, 1], got {alpha}")));
    }
    let counts = game.action_counts();
    let x = softmax_unchecked(z, params.eps(), counts);
    let (actions, realized, estimate) = sample_estimate(game, &x, mode, rng)?;
    let next = if alpha == 0.0 {
        z.clone()
    } else {
        z + (&estimate - z) * (alpha * params.gamma)
    };
    let x_next = softmax_unchecked(&next, params.eps(), counts);
    Ok(StochasticStep { z: next, x: x_next, actions, realized, estimate })
}

/// Record of a seeded stochastic run.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticLog {
    pub steps: Vec<StochasticStep>,
    pub z0: DVector<f64>,
}

impl StochasticLog {
    pub fn final_strategy(&self) -> Option<&DVector<f64>> {
        self.steps.last().map(|s| &s.x)
    }

    /// CSV rows `k, a_1…a_m, pi_1…pi_r, z…, x…`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let Some(first) = self.steps.first() else {
            w.flush()?;
            return Ok(());
        };
        let mut header = vec!["k".to_string()];
        header.extend((1..=first.actions.len()).map(|i| format!("a_{i}")));
        header.extend((1..=first.realized.len()).map(|i| format!("pi_{i}")));
        header.extend((1..=first.z.len()).map(|i| format!("z_{i}")));
        header.extend((1..=first.x.len()).map(|i| format!("x_{i}")));
        w.write_record(&header)?;
        for (k, s) in self.steps.iter().enumerate() {
            let mut row = vec![k.to_string()];
            row.extend(s.actions.iter().map(|a| a.to_string()));
            row.extend(s.realized.iter().map(|&v| fmt17(v)));
            row.extend(s.z.iter().map(|&v| fmt17(v)));
            row.extend(s.x.iter().map(|&v| fmt17(v)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs `steps` stochastic updates with step sizes `alpha(k)` from a ChaCha
/// generator seeded with `seed`.
pub fn run_stochastic(
    game: &GameSpec,
    params: &FirstOrderParams,
    z0: &DVector<f64>,
    steps: usize,
    alpha: impl Fn(usize) -> f64,
    seed: u64,
    mode: EstimatorMode,
) -> Result<StochasticLog> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = z0.clone();
    let mut log = Vec::with_capacity(steps);
    for k in 0..steps {
        let step = stochastic_step(&z, game, params, alpha(k), &mut rng, mode)?;
        z = step.z.clone();
        log.push(step);
    }
    Ok(StochasticLog { steps: log, z0: z0.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{preset, PresetParams};

    fn mp() -> GameSpec {
        preset("matching_pennies", &PresetParams::new()).unwrap()
    }

    #[test]
    fn unit_step_is_fixed_point_map() {
        let g = preset("rps", &PresetParams::new().with("l", 3.0)).unwrap();
        let p = FirstOrderParams::new(2.0, 0.5).unwrap();
        let z = DVector::from_vec(vec![0.4, -0.3, 0.8]);
        let (next, _) = euler_discrete_step(&z, &g, &p, 0.5).unwrap();
        let u = g.payoff_vector(&softmax_unchecked(&z, 0.5, &[3])).unwrap();
        assert!((next - u).amax() < 1e-15);
    }

    #[test]
    fn euler_rejects_nonpositive_step() {
        let p = FirstOrderParams::new(1.0, 1.0).unwrap();
        assert!(euler_discrete_step(&DVector::zeros(4), &mp(), &p, 0.0).is_err());
    }

    #[test]
    fn zero_step_keeps_scores() {
        let p = FirstOrderParams::new(1.0, 1.0).unwrap();
        let z = DVector::from_vec(vec![0.3, 0.1, -0.2, 0.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = stochastic_step(&z, &mp(), &p, 0.0, &mut rng, EstimatorMode::Bandit).unwrap();
        assert_eq!(s.z, z);
    }

    #[test]
    fn bandit_estimate_is_sparse() {
        let p = FirstOrderParams::new(1.0, 1.0).unwrap();
        let z = DVector::from_vec(vec![0.3, 0.1, -0.2, 0.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let s = stochastic_step(&z, &mp(), &p, 0.1, &mut rng, EstimatorMode::Bandit).unwrap();
            for (player, r) in mp().blocks().into_iter().enumerate() {
                for i in r.clone() {
                    if i - r.start != s.actions[player] {
                        assert_eq!(s.estimate[i], 0.0);
                    } else {
                        assert_ne!(s.estimate[i], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let g = preset("shapley", &PresetParams::new()).unwrap();
        let p = FirstOrderParams::new(1.0, 0.5).unwrap();
        let z0 = DVector::zeros(6);
        let a = run_stochastic(&g, &p, &z0, 200, |k| 1.0 / (k as f64 + 2.0), 7, EstimatorMode::FullInfo).unwrap();
        let b = run_stochastic(&g, &p, &z0, 200, |k| 1.0 / (k as f64 + 2.0), 7, EstimatorMode::FullInfo).unwrap();
        assert_eq!(a, b);
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,a_1,a_2,pi_1,pi_2,z_1"));
        assert_eq!(text.lines().count(), 201);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("bandit".parse::<EstimatorMode>().unwrap(), EstimatorMode::Bandit);
        assert!(matches!("x".parse::<EstimatorMode>(), Err(Error::Usage(_))));
    }
}
