//! Fixed-step classical RK4 and the recorded trajectory.

use std::io::Write;
use std::path::Path;

use nalgebra::DVector;

use super::ScoreSystem;
use crate::game::block_ranges;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub dt: f64,
    pub t_end: f64,
    /// Record one sample every this many steps; the final step is always kept.
    pub record_every: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions { dt: 0.01, t_end: 500.0, record_every: 10 }
    }
}

impl IntegrationOptions {
    pub fn new(dt: f64, t_end: f64, record_every: usize) -> Self {
        IntegrationOptions { dt, t_end, record_every }
    }

    fn validate(&self) -> Result<usize> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::domain(format!("step size must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::domain(format!("end time must be positive, got {}", self.t_end)));
        }
        if self.record_every == 0 {
            return Err(Error::domain("record_every must be at least 1"));
        }
        Ok(((self.t_end / self.dt).round() as usize).max(1))
    }
}

/// A plain closure field; the recorded "strategy" is the state itself.
pub struct FnSystem<F> {
    pub dim: usize,
    pub f: F,
}

impl<F> ScoreSystem for FnSystem<F>
where
    F: Fn(&DVector<f64>) -> DVector<f64> + Sync,
{
    fn state_dim(&self) -> usize {
        self.dim
    }

    fn derivative(&self, y: &DVector<f64>) -> DVector<f64> {
        (self.f)(y)
    }

    fn strategy(&self, y: &DVector<f64>) -> DVector<f64> {
        y.clone()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Full integrator states; for the higher-order scheme `[z; ξ]`.
    pub states: Vec<DVector<f64>>,
    pub strategies: Vec<DVector<f64>>,
    pub lyapunov: Option<Vec<f64>>,
    /// Number of leading state components that are scores.
    pub score_dim: usize,
    pub action_counts: Vec<usize>,
}

pub fn integrate<S: ScoreSystem + ?Sized>(
    system: &S,
    y0: &DVector<f64>,
    opts: &IntegrationOptions,
) -> Result<Trajectory> {
    let steps = opts.validate()?;
    let dim = system.state_dim();
    if y0.len() != dim {
        return Err(Error::domain(format!(
            "initial state has length {}, system dimension is {dim}",
            y0.len()
        )));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("initial state must be finite"));
    }

    let dt = opts.dt;
    let capacity = steps / opts.record_every + 2;
    let mut times = Vec::with_capacity(capacity);
    let mut states = Vec::with_capacity(capacity);
    let mut y = y0.clone();
    times.push(0.0);
    states.push(y.clone());

    for k in 1..=steps {
        let k1 = system.derivative(&y);
        let k2 = system.derivative(&(&y + &k1 * (0.5 * dt)));
        let k3 = system.derivative(&(&y + &k2 * (0.5 * dt)));
        let k4 = system.derivative(&(&y + &k3 * dt));
        let next = &y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { last_good_time: (k - 1) as f64 * dt });
        }
        y = next;
        if k % opts.record_every == 0 || k == steps {
            times.push(k as f64 * dt);
            states.push(y.clone());
        }
    }

    let strategies = states.iter().map(|s| system.strategy(s)).collect();
    let action_counts = system.action_counts();
    Ok(Trajectory {
        times,
        states,
        strategies,
        lyapunov: None,
        score_dim: action_counts.iter().sum(),
        action_counts,
    })
}

impl Trajectory {
    pub fn with_action_counts(mut self, counts: &[usize]) -> Self {
        self.action_counts = counts.to_vec();
        self
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn scores(&self, k: usize) -> DVector<f64> {
        self.states[k].rows(0, self.score_dim).into_owned()
    }

    /// Filter part of a higher-order state, if any.
    pub fn filter_state(&self, k: usize) -> Option<DVector<f64>> {
        let s = &self.states[k];
        (s.len() >= 2 * self.score_dim).then(|| s.rows(self.score_dim, self.score_dim).into_owned())
    }

    pub fn final_state(&self) -> &DVector<f64> {
        self.states.last().expect("trajectory has at least one sample")
    }

    pub fn final_strategy(&self) -> &DVector<f64> {
        self.strategies.last().expect("trajectory has at least one sample")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one sample")
    }

    /// First recorded time from which the strategy stays within `tol` of
    /// `target` in the max norm, if it ever does.
    pub fn settling_time(&self, target: &DVector<f64>, tol: f64) -> Option<f64> {
        let mut first = None;
        for (t, x) in self.times.iter().zip(&self.strategies) {
            if (x - target).amax() < tol {
                first.get_or_insert(*t);
            } else {
                first = None;
            }
        }
        first
    }

    /// CSV with `t, z_1…z_n`, the filter state `xi_1…xi_n` of higher-order
    /// runs, `x_1…x_n`, then the storage value (`V`, or `W` with a filter)
    /// when present and ternary coordinates for every three-action player
    /// when requested.
    pub fn write_csv<W: Write>(&self, out: W, ternary: bool) -> Result<()> {
        let n = self.score_dim;
        let xdim = self.strategies.first().map_or(0, |x| x.len());
        let tern_players: Vec<(usize, std::ops::Range<usize>)> = if ternary {
            block_ranges(&self.action_counts)
                .into_iter()
                .enumerate()
                .filter(|(_, r)| r.len() == 3)
                .collect()
        } else {
            Vec::new()
        };

        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("z_{i}")));
        let filter_dim = self.states.first().map_or(0, |y| y.len() - n);
        header.extend((1..=filter_dim).map(|i| format!("xi_{i}")));
        header.extend((1..=xdim).map(|i| format!("x_{i}")));
        if self.lyapunov.is_some() {
            // Composite storage when a filter state is present.
            header.push(if filter_dim > 0 { "W" } else { "V" }.into());
        }
        for (p, _) in &tern_players {
            header.push(format!("tern{}_u", p + 1));
            header.push(format!("tern{}_v", p + 1));
        }
        w.write_record(&header)?;

        let mut row = Vec::with_capacity(header.len());
        for k in 0..self.len() {
            row.clear();
            row.push(fmt17(self.times[k]));
            row.extend(self.states[k].iter().map(|&v| fmt17(v)));
            row.extend(self.strategies[k].iter().map(|&v| fmt17(v)));
            if let Some(v) = &self.lyapunov {
                row.push(fmt17(v[k]));
            }
            for (_, r) in &tern_players {
                let x = &self.strategies[k];
                let (u, v) = ternary_point(x[r.start], x[r.start + 1], x[r.start + 2]);
                row.push(fmt17(u));
                row.push(fmt17(v));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path, ternary: bool) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file), ternary)
    }
}

/// Seventeen significant digits, enough to round-trip an `f64`.
pub(crate) fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Barycentric to planar coordinates on the unit equilateral triangle with
/// vertices e₁ ↦ (0, 0), e₂ ↦ (1, 0), e₃ ↦ (½, √3/2).
pub fn ternary_point(_x1: f64, x2: f64, x3: f64) -> (f64, f64) {
    (x2 + 0.5 * x3, x3 * 3f64.sqrt() / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let sys = FnSystem { dim: 1, f: |y: &DVector<f64>| -y };
        let tr = integrate(&sys, &DVector::from_element(1, 1.0), &IntegrationOptions::new(0.01, 1.0, 1)).unwrap();
        assert!((tr.final_state()[0] - (-1f64).exp()).abs() < 1e-8);
        assert_eq!(tr.len(), 101);
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn final_step_always_recorded() {
        let sys = FnSystem { dim: 1, f: |y: &DVector<f64>| -y };
        let tr = integrate(&sys, &DVector::from_element(1, 1.0), &IntegrationOptions::new(0.1, 1.0, 3)).unwrap();
        assert_eq!(tr.times.len(), 5);
        assert!((tr.final_time() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn blow_up_reports_last_good_time() {
        let sys = FnSystem { dim: 1, f: |y: &DVector<f64>| y.map(|v| v * v * v) };
        let err = integrate(&sys, &DVector::from_element(1, 10.0), &IntegrationOptions::new(0.1, 10.0, 1)).unwrap_err();
        assert!(matches!(err, Error::Diverged { last_good_time } if last_good_time < 10.0));
    }

    #[test]
    fn rejects_bad_options() {
        let sys = FnSystem { dim: 1, f: |y: &DVector<f64>| -y };
        let y0 = DVector::from_element(1, 1.0);
        assert!(integrate(&sys, &y0, &IntegrationOptions::new(0.0, 1.0, 1)).is_err());
        assert!(integrate(&sys, &y0, &IntegrationOptions::new(0.1, -1.0, 1)).is_err());
        assert!(integrate(&sys, &DVector::zeros(2), &IntegrationOptions::new(0.1, 1.0, 1)).is_err());
    }

    #[test]
    fn csv_layout() {
        let sys = FnSystem { dim: 3, f: |y: &DVector<f64>| -y };
        let tr = integrate(&sys, &DVector::from_element(3, 1.0 / 3.0), &IntegrationOptions::new(0.5, 1.0, 1))
            .unwrap()
            .with_action_counts(&[3]);
        let mut buf = Vec::new();
        tr.write_csv(&mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,z_1,z_2,z_3,x_1,x_2,x_3,tern1_u,tern1_v");
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(first[1], 1.0 / 3.0);
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn ternary_vertices() {
        assert_eq!(ternary_point(1.0, 0.0, 0.0), (0.0, 0.0));
        assert_eq!(ternary_point(0.0, 1.0, 0.0), (1.0, 0.0));
        let (u, v) = ternary_point(0.0, 0.0, 1.0);
        assert!((u - 0.5).abs() < 1e-15 && (v - 0.75f64.sqrt()).abs() < 1e-15);
    }
}
