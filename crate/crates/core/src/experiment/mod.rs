//! Run configurations, the seeded simulation pipeline and the built-in
//! reproduction table used by the command-line front end.

mod table;

pub use table::{
    example_ids, examples, find_examples, reproduce, Check, CheckOutcome, ExampleDescriptor, ReproduceReport,
};

use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    composite_lyapunov_trace, convergence_report, lyapunov_trace, rest_points, ConvergenceReport,
    ConvergenceStatus, RestPointOptions,
};
use crate::dynamics::{
    euler_discrete_step, integrate, run_stochastic, EstimatorMode, FeedbackBlock, FirstOrder,
    FirstOrderParams, HigherOrder, HigherOrderState, IntegrationOptions, Trajectory,
};
use crate::game::GameSpec;
use crate::presets::{preset, PresetParams};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum GameSource {
    Preset { name: String, params: PresetParams },
    File(PathBuf),
}

impl GameSource {
    pub fn build(&self) -> Result<GameSpec> {
        match self {
            GameSource::Preset { name, params } => preset(name, params),
            GameSource::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))?;
                GameSpec::from_json(&text)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            GameSource::Preset { name, params } => {
                let mut s = name.clone();
                for (k, v) in params.iter() {
                    s.push_str(&format!("_{k}{v}"));
                }
                s
            }
            GameSource::File(p) => p
                .file_stem()
                .map_or_else(|| "game".to_string(), |s| s.to_string_lossy().into_owned()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    FirstOrder,
    HigherOrder,
    Discrete,
    Stochastic,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::FirstOrder => "first-order",
            Scheme::HigherOrder => "higher-order",
            Scheme::Discrete => "discrete",
            Scheme::Stochastic => "stochastic",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-order" => Ok(Scheme::FirstOrder),
            "higher-order" => Ok(Scheme::HigherOrder),
            "discrete" => Ok(Scheme::Discrete),
            "stochastic" => Ok(Scheme::Stochastic),
            other => Err(Error::usage(format!(
                "unknown scheme `{other}` (first-order, higher-order, discrete, stochastic)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub game: GameSource,
    pub scheme: Scheme,
    pub eps: f64,
    pub gamma: f64,
    /// High-pass gain and corner frequency of the higher-order scheme.
    pub k: f64,
    pub a: f64,
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
    pub seeds: Vec<u64>,
    pub out_dir: Option<PathBuf>,
    pub emit_ternary: bool,
    /// Step size of the Euler recursion; initial step of the stochastic one.
    pub alpha: f64,
    /// Number of stochastic updates.
    pub stochastic_steps: usize,
    pub estimator: EstimatorMode,
}

impl ExperimentConfig {
    pub fn new(game: GameSource) -> Self {
        ExperimentConfig {
            game,
            scheme: Scheme::FirstOrder,
            eps: 1.0,
            gamma: 1.0,
            k: 1.0,
            a: 1.0,
            dt: 0.01,
            t_end: 500.0,
            record_every: 10,
            seeds: vec![0],
            out_dir: None,
            emit_ternary: false,
            alpha: 0.1,
            stochastic_steps: 20_000,
            estimator: EstimatorMode::Bandit,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::usage(format!("{name} must be positive, got {v}")))
            }
        };
        positive("eps", self.eps)?;
        positive("gamma", self.gamma)?;
        positive("dt", self.dt)?;
        positive("t-end", self.t_end)?;
        if self.record_every == 0 {
            return Err(Error::usage("record-every must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(Error::usage("at least one seed is required"));
        }
        match self.scheme {
            Scheme::HigherOrder => {
                positive("a", self.a)?;
                if !(self.k >= 0.0 && self.k.is_finite()) {
                    return Err(Error::usage(format!("K must be non-negative, got {}", self.k)));
                }
            }
            Scheme::Discrete => positive("alpha", self.alpha)?,
            Scheme::Stochastic => {
                if !(self.alpha > 0.0 && self.alpha <= 1.0) {
                    return Err(Error::usage(format!("alpha must lie in (0, 1], got {}", self.alpha)));
                }
            }
            Scheme::FirstOrder => {}
        }
        Ok(())
    }

    pub fn params(&self) -> Result<FirstOrderParams> {
        FirstOrderParams::new(self.gamma, self.eps)
    }

    pub fn block(&self, dim: usize) -> Result<FeedbackBlock> {
        FeedbackBlock::high_pass(self.k, self.a, dim)
    }

    pub fn integration(&self) -> IntegrationOptions {
        IntegrationOptions::new(self.dt, self.t_end, self.record_every)
    }
}

/// Seeded initial scores, uniform in `[−1, 1]ⁿ`.
pub fn initial_scores(dim: usize, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DVector::from_fn(dim, |_, _| rng.random_range(-1.0..=1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedRun {
    pub seed: u64,
    pub status: String,
    pub terminal_x: Option<Vec<f64>>,
    /// Storage value at the end of the run, when the rest point is unique.
    pub terminal_v: Option<f64>,
    /// Time after which `‖x − x*‖∞ < 1e-3` holds for the rest of the run.
    pub settling_time: Option<f64>,
    pub report: Option<ConvergenceReport>,
    pub lyapunov_non_increasing: Option<bool>,
    pub file: Option<String>,
    #[serde(skip)]
    pub trajectory: Option<Trajectory>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub game: String,
    pub scheme: Scheme,
    pub eps: f64,
    pub gamma: f64,
    /// Rest points found by multi-start; the first is used when unique.
    pub rest_points: Vec<Vec<f64>>,
    pub runs: Vec<SeedRun>,
}

impl SimulationSummary {
    pub fn statuses(&self) -> Vec<&str> {
        self.runs.iter().map(|r| r.status.as_str()).collect()
    }

    pub fn all(&self, status: ConvergenceStatus) -> bool {
        self.runs.iter().all(|r| r.status == status.as_str())
    }
}

/// Integrates one seed of the first- or higher-order scheme and attaches the
/// convergence report and storage values relative to `rest`.
pub(crate) fn run_continuous(
    game: &GameSpec,
    params: FirstOrderParams,
    block: Option<&FeedbackBlock>,
    z0: &DVector<f64>,
    opts: &IntegrationOptions,
    rest: Option<&(DVector<f64>, DVector<f64>)>,
) -> Result<(Trajectory, ConvergenceReport)> {
    let mut traj = match block {
        None => integrate(&FirstOrder::new(game, params), z0, opts)?,
        Some(b) => {
            let sys = HigherOrder::new(game, params, b.clone())?;
            integrate(&sys, &HigherOrderState::new(z0.clone()).stacked(), opts)?
        }
    };
    let report = convergence_report(&traj, rest.map(|(_, x)| x))?;
    if let Some((z_star, x_star)) = rest {
        let trace = match block {
            None => Some(lyapunov_trace(&traj, z_star, params.eps())?),
            Some(b) => {
                let xi_star = b.equilibrium(x_star)?;
                // A zero-gain block has no positive-definite storage.
                composite_lyapunov_trace(&traj, z_star, &xi_star, params.eps(), params.gamma, b, None).ok()
            }
        };
        traj.lyapunov = trace.map(|t| t.values);
    }
    Ok((traj, report))
}

fn discrete_trajectory(
    game: &GameSpec,
    params: &FirstOrderParams,
    z0: &DVector<f64>,
    alpha: f64,
    t_end: f64,
    record_every: usize,
) -> Result<Trajectory> {
    let steps = ((t_end / alpha).round() as usize).max(1);
    let counts = game.action_counts();
    let x0 = crate::choice::softmax_unchecked(z0, params.eps(), counts);
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![z0.clone()],
        strategies: vec![x0],
        lyapunov: None,
        score_dim: game.dim(),
        action_counts: counts.to_vec(),
    };
    let mut z = z0.clone();
    for k in 1..=steps {
        let (next, x) = euler_discrete_step(&z, game, params, alpha)?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { last_good_time: (k - 1) as f64 * alpha });
        }
        z = next;
        if k % record_every == 0 || k == steps {
            traj.times.push(k as f64 * alpha);
            traj.states.push(z.clone());
            traj.strategies.push(x);
        }
    }
    Ok(traj)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Runs every seed of the configured scheme. Per-seed failures to integrate
/// are reported with status `diverged`; they do not abort the batch.
pub fn simulate(config: &ExperimentConfig) -> Result<SimulationSummary> {
    config.validate()?;
    let game = config.game.build()?;
    let params = config.params()?;
    let found = rest_points(&game, config.eps, &RestPointOptions::default(), 20, 0)?;
    let unique = (found.len() == 1).then(|| (found[0].z_star.clone(), found[0].x_star.as_vector().clone()));
    let block = match config.scheme {
        Scheme::HigherOrder => Some(config.block(game.dim())?),
        _ => None,
    };
    if let Some(dir) = &config.out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let label = config.game.label();

    let runs: Vec<SeedRun> = config
        .seeds
        .par_iter()
        .map(|&seed| -> Result<SeedRun> {
            let z0 = initial_scores(game.dim(), seed);
            let file_name = format!("{label}_{}_seed{seed}.csv", config.scheme.as_str());
            let path = config.out_dir.as_ref().map(|d| d.join(&file_name));
            let mut run = SeedRun {
                seed,
                status: String::new(),
                terminal_x: None,
                terminal_v: None,
                settling_time: None,
                report: None,
                lyapunov_non_increasing: None,
                file: path.as_ref().map(|_| file_name.clone()),
                trajectory: None,
            };

            if config.scheme == Scheme::Stochastic {
                let alpha0 = config.alpha;
                let log = run_stochastic(
                    &game,
                    &params,
                    &z0,
                    config.stochastic_steps,
                    |k| alpha0 / (k as f64 + 1.0).powf(0.7),
                    seed,
                    config.estimator,
                )?;
                run.status = "completed".into();
                run.terminal_x = log.final_strategy().map(|x| x.as_slice().to_vec());
                if let Some(p) = &path {
                    log.write_csv(std::io::BufWriter::new(std::fs::File::create(p)?))?;
                }
                return Ok(run);
            }

            let outcome = match config.scheme {
                Scheme::Discrete => discrete_trajectory(&game, &params, &z0, config.alpha, config.t_end, config.record_every)
                    .and_then(|t| {
                        let r = convergence_report(&t, unique.as_ref().map(|(_, x)| x))?;
                        Ok((t, r))
                    }),
                _ => run_continuous(&game, params, block.as_ref(), &z0, &config.integration(), unique.as_ref()),
            };
            match outcome {
                Err(Error::Diverged { .. }) => run.status = ConvergenceStatus::Diverged.as_str().into(),
                Err(e) => return Err(e),
                Ok((traj, report)) => {
                    run.status = report.status.as_str().into();
                    run.terminal_x = Some(traj.final_strategy().as_slice().to_vec());
                    run.terminal_v = traj.lyapunov.as_ref().and_then(|v| v.last().copied());
                    run.lyapunov_non_increasing = traj
                        .lyapunov
                        .as_ref()
                        .map(|v| v.windows(2).all(|w| w[1] - w[0] <= crate::analysis::MONOTONE_TOL));
                    run.settling_time = unique.as_ref().and_then(|(_, x)| traj.settling_time(x, 1e-3));
                    run.report = Some(report);
                    if let Some(p) = &path {
                        traj.save_csv(p, config.emit_ternary)?;
                    }
                    run.trajectory = Some(traj);
                }
            }
            Ok(run)
        })
        .collect::<Result<_>>()?;

    let summary = SimulationSummary {
        game: label.clone(),
        scheme: config.scheme,
        eps: config.eps,
        gamma: config.gamma,
        rest_points: found.iter().map(|r| r.x_star.as_vector().as_slice().to_vec()).collect(),
        runs,
    };
    if let Some(dir) = &config.out_dir {
        write_json(&dir.join(format!("{label}_{}_summary.json", config.scheme.as_str())), &summary)?;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(name: &str) -> ExperimentConfig {
        ExperimentConfig::new(GameSource::Preset { name: name.into(), params: PresetParams::new() })
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [Scheme::FirstOrder, Scheme::HigherOrder, Scheme::Discrete, Scheme::Stochastic] {
            assert_eq!(s.as_str().parse::<Scheme>().unwrap(), s);
        }
        assert!(matches!("rk4".parse::<Scheme>(), Err(Error::Usage(_))));
    }

    #[test]
    fn validation() {
        let mut c = cfg("matching_pennies");
        assert!(c.validate().is_ok());
        c.eps = 0.0;
        assert!(c.validate().is_err());
        let mut c = cfg("matching_pennies");
        c.seeds.clear();
        assert!(c.validate().is_err());
        let mut c = cfg("matching_pennies");
        c.scheme = Scheme::Stochastic;
        c.alpha = 1.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn initial_scores_are_seeded() {
        assert_eq!(initial_scores(4, 3), initial_scores(4, 3));
        assert_ne!(initial_scores(4, 3), initial_scores(4, 4));
        assert!(initial_scores(50, 1).iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn discrete_and_stochastic_pipelines() {
        let mut c = cfg("matching_pennies");
        c.scheme = Scheme::Discrete;
        c.t_end = 100.0;
        let s = simulate(&c).unwrap();
        assert_eq!(s.runs[0].status, "converged");

        c.scheme = Scheme::Stochastic;
        c.stochastic_steps = 500;
        let s = simulate(&c).unwrap();
        assert_eq!(s.runs[0].status, "completed");
        assert_eq!(s.runs[0].terminal_x.as_ref().unwrap().len(), 4);
    }
}
