//! Terminal-window diagnosis of a trajectory: rest, cycle, or neither.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::{Error, Result};

pub const CONVERGED_AMPLITUDE: f64 = 1e-6;
pub const CONVERGED_DISTANCE: f64 = 1e-4;
pub const CYCLE_AMPLITUDE: f64 = 1e-3;
pub const CYCLE_DRIFT: f64 = 0.1;
/// Default window: the final fifth of the run.
pub const WINDOW_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceStatus {
    Converged,
    LimitCycle,
    Undetermined,
    Diverged,
}

impl ConvergenceStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConvergenceStatus::Converged => "converged",
            ConvergenceStatus::LimitCycle => "limit-cycle",
            ConvergenceStatus::Undetermined => "undetermined",
            ConvergenceStatus::Diverged => "diverged",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub status: ConvergenceStatus,
    /// Largest per-coordinate `max − min` of the strategy over the window.
    pub amplitude: f64,
    /// `|a₂ − a₁| / max(a₁, a₂)` for the two half-window amplitudes.
    pub drift: f64,
    /// `‖x(T) − x*‖∞` when a rest point was supplied.
    pub terminal_distance: Option<f64>,
    pub window: [f64; 2],
}

fn amplitude(xs: &[DVector<f64>]) -> f64 {
    let Some(first) = xs.first() else { return 0.0 };
    (0..first.len())
        .map(|i| {
            let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x[i]), hi.max(x[i]))
            });
            hi - lo
        })
        .fold(0.0, f64::max)
}

/// Report over the final fifth of the trajectory.
pub fn convergence_report(traj: &Trajectory, rest: Option<&DVector<f64>>) -> Result<ConvergenceReport> {
    let span = traj.final_time() - traj.times[0];
    convergence_report_window(traj, rest, WINDOW_FRACTION * span)
}

/// Report over the final `window` time units; `rest` is a strategy profile.
pub fn convergence_report_window(
    traj: &Trajectory,
    rest: Option<&DVector<f64>>,
    window: f64,
) -> Result<ConvergenceReport> {
    if traj.is_empty() {
        return Err(Error::usage("empty trajectory"));
    }
    let t_end = traj.final_time();
    let span = t_end - traj.times[0];
    if !(window >= 0.0) || window > span {
        return Err(Error::usage(format!(
            "analysis window {window} is longer than the trajectory ({span})"
        )));
    }
    let start = t_end - window;
    let mid = t_end - window / 2.0;
    let first = traj.times.partition_point(|&t| t < start);
    let split = traj.times.partition_point(|&t| t < mid);
    let xs = &traj.strategies[first..];
    if xs.len() < 4 && window > 0.0 {
        return Err(Error::usage("analysis window holds fewer than four samples"));
    }

    let amp = amplitude(xs);
    let a1 = amplitude(&traj.strategies[first..split]);
    let a2 = amplitude(&traj.strategies[split..]);
    let drift = if a1.max(a2) > 0.0 { (a2 - a1).abs() / a1.max(a2) } else { 0.0 };
    let terminal_distance = match rest {
        Some(r) if r.len() != traj.final_strategy().len() => {
            return Err(Error::domain("rest point and trajectory dimensions differ"));
        }
        Some(r) => Some((traj.final_strategy() - r).amax()),
        None => None,
    };

    let status = if amp < CONVERGED_AMPLITUDE && terminal_distance.is_none_or(|d| d < CONVERGED_DISTANCE) {
        ConvergenceStatus::Converged
    } else if amp > CYCLE_AMPLITUDE && drift < CYCLE_DRIFT {
        ConvergenceStatus::LimitCycle
    } else {
        ConvergenceStatus::Undetermined
    };
    Ok(ConvergenceReport {
        status,
        amplitude: amp,
        drift,
        terminal_distance,
        window: [start, t_end],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(f: impl Fn(f64) -> f64) -> Trajectory {
        let times: Vec<f64> = (0..=1000).map(|k| k as f64 * 0.1).collect();
        let strategies: Vec<DVector<f64>> = times
            .iter()
            .map(|&t| DVector::from_vec(vec![f(t), 1.0 - f(t)]))
            .collect();
        Trajectory {
            states: strategies.clone(),
            times,
            strategies,
            lyapunov: None,
            score_dim: 2,
            action_counts: vec![2],
        }
    }

    #[test]
    fn constant_is_converged() {
        let r = convergence_report(&traj(|_| 0.5), None).unwrap();
        assert_eq!(r.status, ConvergenceStatus::Converged);
        assert_eq!(r.amplitude, 0.0);
    }

    #[test]
    fn sustained_oscillation_is_cycle() {
        let r = convergence_report(&traj(|t| 0.5 + 0.2 * t.sin()), None).unwrap();
        assert_eq!(r.status, ConvergenceStatus::LimitCycle);
    }

    #[test]
    fn decaying_oscillation_is_undetermined() {
        let r = convergence_report(&traj(|t| 0.5 + 0.2 * (-0.05 * t).exp() * t.sin()), None).unwrap();
        assert_eq!(r.status, ConvergenceStatus::Undetermined);
    }

    #[test]
    fn far_from_rest_point_is_not_converged() {
        let rest = DVector::from_vec(vec![0.4, 0.6]);
        let r = convergence_report(&traj(|_| 0.5), Some(&rest)).unwrap();
        assert_ne!(r.status, ConvergenceStatus::Converged);
    }

    #[test]
    fn window_too_long() {
        assert!(matches!(
            convergence_report_window(&traj(|_| 0.5), None, 200.0),
            Err(Error::Usage(_))
        ));
    }
}
