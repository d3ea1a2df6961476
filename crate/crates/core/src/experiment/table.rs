//! Built-in reproduction table: each example runs a list of checks and
//! reports expected, observed and tolerance side by side.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{initial_scores, run_continuous};
use crate::analysis::{
    bifurcation_epsilon, classify, dynamics_jacobian, rest_points, BifurcationStatus,
    ConvergenceStatus, MonotonicityClass, RestPointOptions,
};
use crate::dynamics::{FeedbackBlock, FirstOrderParams, IntegrationOptions};
use crate::game::GameSpec;
use crate::linalg::eigenvalues;
use crate::presets::{preset, PresetParams};
use crate::{Error, Result};

/// Seeds used by convergence checks and by the ordinal speed comparisons.
const CONVERGENCE_SEEDS: u64 = 5;
const SPEED_SEEDS: u64 = 10;
const SETTLE_TOL: f64 = 1e-3;
const BISECTION_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    /// Sorted tangent spectrum of `Φ + Φᵀ`.
    TangentSpectrum { expected: Vec<f64>, tol: f64 },
    /// Sorted full spectrum of `Φ + Φᵀ`.
    FullSpectrum { expected: Vec<f64>, tol: f64 },
    Mu { expected: f64, tol: f64 },
    Class(MonotonicityClass),
    /// Every score component of the unique rest point equals `expected`.
    RestScores { eps: f64, expected: f64, tol: f64 },
    RestStrategy { eps: f64, expected: Vec<f64>, tol: f64 },
    /// Spectrum of the first-order Jacobian at the rest point.
    JacobianSpectrum { eps: f64, expected: Vec<Complex64>, tol: f64 },
    Bifurcation { higher_order: bool, range: (f64, f64), expected: f64, tol: f64 },
    /// Status of every seed. `target` also requires the terminal strategy
    /// to lie within a tolerance of a given profile. Unasserted checks are
    /// recorded without a verdict.
    Convergence {
        eps: f64,
        gamma: f64,
        higher_order: bool,
        expected: ConvergenceStatus,
        target: Option<(Vec<f64>, f64)>,
        asserted: bool,
    },
    /// Range of each action's probability over the final window of a
    /// first-order run, recorded without a verdict.
    Orbit { eps: f64 },
    /// The higher-order scheme settles first on a majority of seeds.
    HigherOrderFaster { eps: f64 },
    /// The larger learning rate settles first on a majority of seeds.
    GammaFaster { eps: f64, slow: f64, fast: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleDescriptor {
    pub id: &'static str,
    pub preset: &'static str,
    pub params: Vec<(&'static str, f64)>,
    pub summary: &'static str,
    /// Each check with a note on where its expected value comes from.
    pub checks: Vec<(Check, &'static str)>,
}

impl ExampleDescriptor {
    pub fn game(&self) -> Result<GameSpec> {
        let mut p = PresetParams::new();
        for (k, v) in &self.params {
            p.insert(k, *v);
        }
        preset(self.preset, &p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub expected: String,
    pub observed: String,
    pub tolerance: String,
    /// `None` for record-only checks.
    pub pass: Option<bool>,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproduceReport {
    pub id: String,
    pub summary: String,
    pub outcomes: Vec<CheckOutcome>,
}

impl ReproduceReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.pass != Some(false))
    }

    pub fn render(&self) -> String {
        let mut s = format!("example {}: {}\n", self.id, self.summary);
        for o in &self.outcomes {
            let verdict = match o.pass {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "NOTE",
            };
            s.push_str(&format!(
                "  [{verdict}] {}\n      expected {}  observed {}  tol {}\n",
                o.check, o.expected, o.observed, o.tolerance
            ));
        }
        s
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn fmt_complex(v: &[Complex64]) -> String {
    let parts: Vec<String> = v.iter().map(|c| format!("{:.6}{:+.6}i", c.re, c.im)).collect();
    format!("{{{}}}", parts.join(", "))
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Greedy matching of two complex spectra; infinite when sizes differ.
fn spectrum_gap(observed: &[Complex64], expected: &[Complex64]) -> f64 {
    if observed.len() != expected.len() {
        return f64::INFINITY;
    }
    let mut pool = observed.to_vec();
    let mut worst: f64 = 0.0;
    for w in expected {
        let (i, d) = pool
            .iter()
            .enumerate()
            .map(|(i, o)| (i, (o - w).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("pool not empty");
        worst = worst.max(d);
        pool.swap_remove(i);
    }
    worst
}

type Rest = (DVector<f64>, DVector<f64>);

fn unique_rest(game: &GameSpec, eps: f64) -> Result<Option<Rest>> {
    let found = rest_points(game, eps, &RestPointOptions::default(), 20, 0)?;
    Ok((found.len() == 1).then(|| (found[0].z_star.clone(), found[0].x_star.as_vector().clone())))
}

fn block_for(game: &GameSpec, higher_order: bool) -> Result<Option<FeedbackBlock>> {
    higher_order.then(|| FeedbackBlock::high_pass(1.0, 1.0, game.dim())).transpose()
}

fn scheme_name(higher_order: bool) -> &'static str {
    if higher_order {
        "higher-order"
    } else {
        "first-order"
    }
}

/// Settling times of one scheme over `seeds` seeds.
fn settling_times(
    game: &GameSpec,
    params: FirstOrderParams,
    block: Option<&FeedbackBlock>,
    rest: &Rest,
    seeds: u64,
) -> Result<Vec<Option<f64>>> {
    let opts = IntegrationOptions::default();
    (0..seeds)
        .into_par_iter()
        .map(|s| {
            let (traj, _) = run_continuous(game, params, block, &initial_scores(game.dim(), s), &opts, Some(rest))?;
            Ok(traj.settling_time(&rest.1, SETTLE_TOL))
        })
        .collect()
}

fn majority_faster(fast: &[Option<f64>], slow: &[Option<f64>]) -> (usize, usize) {
    let wins = fast
        .iter()
        .zip(slow)
        .filter(|(f, s)| match (f, s) {
            (Some(f), Some(s)) => f < s,
            (Some(_), None) => true,
            _ => false,
        })
        .count();
    (wins, fast.len())
}

fn fmt_times(ts: &[Option<f64>]) -> String {
    let parts: Vec<String> = ts
        .iter()
        .map(|t| t.map_or_else(|| "-".to_string(), |t| format!("{t:.1}")))
        .collect();
    parts.join(" ")
}

fn rest_missing(name: String, expected: String, provenance: &str) -> CheckOutcome {
    CheckOutcome {
        check: name,
        expected,
        observed: "no unique rest point".into(),
        tolerance: "-".into(),
        pass: Some(false),
        provenance: provenance.into(),
    }
}

impl Check {
    pub fn run(&self, game: &GameSpec, provenance: &str) -> Result<CheckOutcome> {
        let outcome = |check: String, expected: String, observed: String, tolerance: String, pass: Option<bool>| {
            CheckOutcome { check, expected, observed, tolerance, pass, provenance: provenance.into() }
        };
        match self {
            Check::TangentSpectrum { expected, tol } => {
                let got = sorted(classify(game, 0).tangent_eigenvalues);
                let want = sorted(expected.clone());
                let pass = max_gap(&got, &want) <= *tol;
                Ok(outcome("tangent spectrum".into(), fmt_vec(&want), fmt_vec(&got), format!("{tol:e}"), Some(pass)))
            }
            Check::FullSpectrum { expected, tol } => {
                let got = classify(game, 0).full_eigenvalues.map(sorted).unwrap_or_default();
                let want = sorted(expected.clone());
                let pass = max_gap(&got, &want) <= *tol;
                Ok(outcome("spectrum of Φ+Φᵀ".into(), fmt_vec(&want), fmt_vec(&got), format!("{tol:e}"), Some(pass)))
            }
            Check::Mu { expected, tol } => {
                let mu = classify(game, 200).mu;
                let pass = (mu - expected).abs() <= *tol;
                Ok(outcome("mu".into(), format!("{expected}"), format!("{mu:.6}"), format!("{tol:e}"), Some(pass)))
            }
            Check::Class(want) => {
                let got = classify(game, 200).class;
                Ok(outcome("class".into(), want.as_str().into(), got.as_str().into(), "-".into(), Some(got == *want)))
            }
            Check::RestScores { eps, expected, tol } => {
                let name = format!("rest scores at eps={eps}");
                let Some((z, _)) = unique_rest(game, *eps)? else {
                    return Ok(rest_missing(name, format!("{expected}·1"), provenance));
                };
                let gap = z.iter().map(|v| (v - expected).abs()).fold(0.0, f64::max);
                Ok(outcome(name, format!("{expected:.6}·1"), fmt_vec(z.as_slice()), format!("{tol:e}"), Some(gap <= *tol)))
            }
            Check::RestStrategy { eps, expected, tol } => {
                let name = format!("rest strategy at eps={eps}");
                let Some((_, x)) = unique_rest(game, *eps)? else {
                    return Ok(rest_missing(name, fmt_vec(expected), provenance));
                };
                let pass = max_gap(x.as_slice(), expected) <= *tol;
                Ok(outcome(name, fmt_vec(expected), fmt_vec(x.as_slice()), format!("{tol:e}"), Some(pass)))
            }
            Check::JacobianSpectrum { eps, expected, tol } => {
                let name = format!("first-order Jacobian spectrum at eps={eps}");
                let Some((z, _)) = unique_rest(game, *eps)? else {
                    return Ok(rest_missing(name, fmt_complex(expected), provenance));
                };
                let j = dynamics_jacobian(&z, game, &FirstOrderParams::new(1.0, *eps)?, None)?;
                let got = eigenvalues(&j);
                let pass = spectrum_gap(&got, expected) <= *tol;
                Ok(outcome(name, fmt_complex(expected), fmt_complex(&got), format!("{tol:e}"), Some(pass)))
            }
            Check::Bifurcation { higher_order, range, expected, tol } => {
                let block = block_for(game, *higher_order)?;
                let params = FirstOrderParams::new(1.0, 1.0)?;
                let r = bifurcation_epsilon(game, &params, block.as_ref(), *range, BISECTION_TOL)?;
                let (observed, pass) = match (r.status, r.eps_star) {
                    (BifurcationStatus::Found, Some(e)) => (format!("{e:.6}"), (e - expected).abs() <= *tol),
                    (status, _) => (format!("{status:?}"), false),
                };
                Ok(outcome(
                    format!("{} bifurcation eps*", scheme_name(*higher_order)),
                    format!("{expected:.6}"),
                    observed,
                    format!("{tol:e}"),
                    Some(pass),
                ))
            }
            Check::Convergence { eps, gamma, higher_order, expected, target, asserted } => {
                let params = FirstOrderParams::new(*gamma, *eps)?;
                let block = block_for(game, *higher_order)?;
                let rest = unique_rest(game, *eps)?;
                let opts = IntegrationOptions::default();
                let runs: Vec<(ConvergenceStatus, DVector<f64>)> = (0..CONVERGENCE_SEEDS)
                    .into_par_iter()
                    .map(|s| {
                        let z0 = initial_scores(game.dim(), s);
                        match run_continuous(game, params, block.as_ref(), &z0, &opts, rest.as_ref()) {
                            Ok((traj, rep)) => Ok((rep.status, traj.final_strategy().clone())),
                            Err(Error::Diverged { .. }) => Ok((ConvergenceStatus::Diverged, DVector::zeros(0))),
                            Err(e) => Err(e),
                        }
                    })
                    .collect::<Result<_>>()?;
                let statuses: Vec<&str> = runs.iter().map(|(s, _)| s.as_str()).collect();
                let mut pass = runs.iter().all(|(s, _)| s == expected);
                let mut observed = statuses.join(" ");
                let mut expect = format!("{} on all {CONVERGENCE_SEEDS} seeds", expected.as_str());
                let mut tolerance = "unanimous".to_string();
                if let Some((x, tol)) = target {
                    let worst = runs.iter().map(|(_, xf)| max_gap(xf.as_slice(), x)).fold(0.0, f64::max);
                    pass &= worst <= *tol;
                    observed.push_str(&format!("; worst terminal gap {worst:.2e}"));
                    expect.push_str(&format!(" at {}", fmt_vec(x)));
                    tolerance = format!("unanimous, {tol:e}");
                }
                Ok(outcome(
                    format!("{} (gamma={gamma}) convergence at eps={eps}", scheme_name(*higher_order)),
                    expect,
                    observed,
                    tolerance,
                    asserted.then_some(pass),
                ))
            }
            Check::Orbit { eps } => {
                let params = FirstOrderParams::new(1.0, *eps)?;
                let traj = crate::dynamics::integrate(
                    &crate::dynamics::FirstOrder::new(game, params),
                    &initial_scores(game.dim(), 0),
                    &IntegrationOptions::default(),
                )?;
                let start = traj.times.partition_point(|&t| t < 0.8 * traj.final_time());
                let xs = &traj.strategies[start..];
                let ranges: Vec<String> = (0..game.dim())
                    .map(|i| {
                        let lo = xs.iter().map(|x| x[i]).fold(f64::INFINITY, f64::min);
                        let hi = xs.iter().map(|x| x[i]).fold(f64::NEG_INFINITY, f64::max);
                        format!("[{lo:.3}, {hi:.3}]")
                    })
                    .collect();
                Ok(outcome(
                    format!("first-order orbit at eps={eps}"),
                    "cycle near the pure-profile triangle".into(),
                    format!("action ranges {}", ranges.join(" ")),
                    "-".into(),
                    None,
                ))
            }
            Check::HigherOrderFaster { eps } => {
                let name = format!("higher-order settles first at eps={eps}");
                let Some(rest) = unique_rest(game, *eps)? else {
                    return Ok(rest_missing(name, "majority".into(), provenance));
                };
                let params = FirstOrderParams::new(1.0, *eps)?;
                let block = block_for(game, true)?;
                let first = settling_times(game, params, None, &rest, SPEED_SEEDS)?;
                let higher = settling_times(game, params, block.as_ref(), &rest, SPEED_SEEDS)?;
                let (wins, n) = majority_faster(&higher, &first);
                Ok(outcome(
                    name,
                    format!("> {} of {n} seeds", n / 2),
                    format!("{wins} of {n} (first {} | higher {})", fmt_times(&first), fmt_times(&higher)),
                    format!("settle at {SETTLE_TOL:e}"),
                    Some(2 * wins > n),
                ))
            }
            Check::GammaFaster { eps, slow, fast } => {
                let name = format!("gamma={fast} settles before gamma={slow}");
                let Some(rest) = unique_rest(game, *eps)? else {
                    return Ok(rest_missing(name, "majority".into(), provenance));
                };
                let t_slow = settling_times(game, FirstOrderParams::new(*slow, *eps)?, None, &rest, SPEED_SEEDS)?;
                let t_fast = settling_times(game, FirstOrderParams::new(*fast, *eps)?, None, &rest, SPEED_SEEDS)?;
                let (wins, n) = majority_faster(&t_fast, &t_slow);
                Ok(outcome(
                    name,
                    format!("> {} of {n} seeds", n / 2),
                    format!("{wins} of {n} (slow {} | fast {})", fmt_times(&t_slow), fmt_times(&t_fast)),
                    format!("settle at {SETTLE_TOL:e}"),
                    Some(2 * wins > n),
                ))
            }
        }
    }
}

fn conv(eps: f64, higher_order: bool, expected: ConvergenceStatus) -> Check {
    Check::Convergence { eps, gamma: 1.0, higher_order, expected, target: None, asserted: true }
}

fn both_converge(eps: f64, provenance: &'static str) -> Vec<(Check, &'static str)> {
    vec![
        (conv(eps, false, ConvergenceStatus::Converged), provenance),
        (conv(eps, true, ConvergenceStatus::Converged), provenance),
    ]
}

fn cycle_vs_rest(eps: f64, provenance: &'static str) -> Vec<(Check, &'static str)> {
    vec![
        (conv(eps, false, ConvergenceStatus::LimitCycle), provenance),
        (conv(eps, true, ConvergenceStatus::Converged), provenance),
    ]
}

fn rps_spectrum(l: f64, eps: f64) -> Vec<Complex64> {
    let re = (l - 1.0 - 6.0 * eps) / (6.0 * eps);
    let im = 3f64.sqrt() * (1.0 + l) / (6.0 * eps);
    vec![Complex64::new(-1.0, 0.0), Complex64::new(re, im), Complex64::new(re, -im)]
}

fn rps_example(id: &'static str, l: f64, summary: &'static str) -> ExampleDescriptor {
    let mut checks = vec![
        (Check::TangentSpectrum { expected: vec![l - 1.0; 2], tol: 1e-9 }, "circulant payoff: tangent eigenvalues l−1 twice"),
        (Check::Mu { expected: (l - 1.0) / 2.0, tol: 1e-9 }, "RPS hypo-monotonicity modulus (l−1)/2"),
        (Check::RestScores { eps: 1.0, expected: (1.0 - l) / 3.0, tol: 1e-8 }, "RPS rest scores ((1−l)/3)·1 at the centroid"),
        (
            Check::JacobianSpectrum { eps: 1.0, expected: rps_spectrum(l, 1.0), tol: 1e-6 },
            "RPS linearization: structural −1 and circulant pair",
        ),
    ];
    if l < 7.0 {
        checks.extend(both_converge(1.0, "RPS at eps=1 below the first-order threshold"));
    } else {
        checks.extend(cycle_vs_rest(1.0, "RPS l=8: first-order cycle, higher-order rest"));
        checks.push((
            Check::Bifurcation { higher_order: false, range: (0.5, 2.0), expected: 7.0 / 6.0, tol: 1e-3 },
            "RPS first-order threshold (l−1)/6",
        ));
        checks.push((
            Check::Bifurcation { higher_order: true, range: (0.2, 2.0), expected: 0.86, tol: 0.02 },
            "RPS l=8 higher-order threshold near 0.86 read from the sweep",
        ));
    }
    if l == 2.5 || l == 5.0 {
        checks.push((Check::HigherOrderFaster { eps: 1.0 }, "higher-order learning settles faster on RPS"));
    }
    if l == 5.0 {
        checks.push((
            Check::JacobianSpectrum { eps: 0.5, expected: rps_spectrum(l, 0.5), tol: 1e-6 },
            "RPS linearization at eps=0.5",
        ));
    }
    ExampleDescriptor { id, preset: "rps", params: vec![("l", l)], summary, checks }
}

/// The full built-in table.
pub fn examples() -> Vec<ExampleDescriptor> {
    use ConvergenceStatus::*;
    vec![
        rps_example("1-l1", 1.0, "single-population RPS, zero-sum case"),
        rps_example("1-l2.5", 2.5, "single-population RPS, l=2.5"),
        rps_example("1-l5", 5.0, "single-population RPS, l=5"),
        rps_example("1-l8", 8.0, "single-population RPS past the first-order threshold"),
        ExampleDescriptor {
            id: "2",
            preset: "anticoord123",
            params: vec![],
            summary: "1-2-3 anti-coordination population game",
            checks: vec![
                (Check::Class(MonotonicityClass::StrictlyMonotone), "negative definite diagonal payoff"),
                (
                    Check::RestStrategy { eps: 1.0, expected: vec![0.40, 0.32, 0.27], tol: 0.005 },
                    "reported perturbed equilibrium at eps=1",
                ),
                (
                    Check::RestStrategy { eps: 0.1, expected: vec![6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0], tol: 0.01 },
                    "Nash equilibrium (6,3,2)/11 approached as eps shrinks",
                ),
            ],
        },
        ExampleDescriptor {
            id: "3",
            preset: "matching_pennies",
            params: vec![],
            summary: "matching pennies, learning-rate comparison",
            checks: vec![
                (Check::Class(MonotonicityClass::NullMonotone), "zero-sum: Φ+Φᵀ = 0"),
                (Check::Mu { expected: 0.0, tol: 1e-9 }, "zero-sum: Φ+Φᵀ = 0"),
                (Check::RestStrategy { eps: 1.0, expected: vec![0.5; 4], tol: 1e-8 }, "unique mixed equilibrium"),
                (
                    Check::Convergence { eps: 1.0, gamma: 4.0, higher_order: false, expected: Converged, target: None, asserted: true },
                    "monotone game converges for any learning rate",
                ),
                (conv(1.0, false, Converged), "monotone game converges"),
                (conv(1.0, true, Converged), "monotone game converges"),
                (Check::GammaFaster { eps: 1.0, slow: 1.0, fast: 4.0 }, "larger learning rate settles faster"),
            ],
        },
        ExampleDescriptor {
            id: "4-l1",
            preset: "two_player_rps",
            params: vec![("l", 1.0)],
            summary: "two-player zero-sum RPS",
            checks: [
                vec![
                    (Check::FullSpectrum { expected: vec![0.0; 6], tol: 1e-9 }, "two-player RPS spectrum ±2(l−1), ±(1−l) twice"),
                    (Check::Class(MonotonicityClass::NullMonotone), "zero-sum at l=1"),
                ],
                both_converge(1.0, "monotone two-player RPS converges"),
            ]
            .concat(),
        },
        ExampleDescriptor {
            id: "4-l5",
            preset: "two_player_rps",
            params: vec![("l", 5.0)],
            summary: "two-player RPS, l=5",
            checks: [
                vec![
                    (
                        Check::FullSpectrum { expected: vec![8.0, -8.0, -4.0, 4.0, -4.0, 4.0], tol: 1e-9 },
                        "two-player RPS spectrum ±2(l−1), ±(1−l) twice",
                    ),
                    (Check::Mu { expected: 2.0, tol: 1e-9 }, "modulus (l−1)/2"),
                ],
                both_converge(1.0, "eps=1 lies above both thresholds"),
                vec![
                    (
                        Check::Bifurcation { higher_order: false, range: (0.2, 2.0), expected: 2.0 / 3.0, tol: 1e-3 },
                        "two-player RPS first-order threshold",
                    ),
                    (
                        Check::Bifurcation { higher_order: true, range: (0.1, 2.0), expected: 0.347, tol: 5e-3 },
                        "two-player RPS higher-order threshold with K=a=1",
                    ),
                ],
            ]
            .concat(),
        },
        ExampleDescriptor {
            id: "4-l5-eps0.5",
            preset: "two_player_rps",
            params: vec![("l", 5.0)],
            summary: "two-player RPS between the two thresholds",
            checks: cycle_vs_rest(0.5, "first-order cycle, higher-order rest between thresholds"),
        },
        ExampleDescriptor {
            id: "5-eps1",
            preset: "shapley",
            params: vec![],
            summary: "Shapley game at eps=1",
            checks: [
                vec![
                    (Check::Mu { expected: 0.5, tol: 1e-9 }, "Shapley behaves as RPS with l=0, so mu=1/2"),
                    (Check::Class(MonotonicityClass::HypoMonotone), "Shapley game is hypo-monotone"),
                ],
                both_converge(1.0, "eps=1 exceeds mu"),
            ]
            .concat(),
        },
        ExampleDescriptor {
            id: "5-eps0.1",
            preset: "shapley",
            params: vec![],
            summary: "Shapley game at eps=0.1",
            checks: [
                cycle_vs_rest(0.1, "Shapley cycle under first-order learning at small eps"),
                vec![(Check::Orbit { eps: 0.1 }, "triangular Shapley orbit")],
            ]
            .concat(),
        },
        ExampleDescriptor {
            id: "6",
            preset: "network_zero_sum_mp",
            params: vec![],
            summary: "three-player network of matching-pennies games",
            checks: [
                vec![
                    (Check::Class(MonotonicityClass::NullMonotone), "network zero-sum: Φ+Φᵀ = 0"),
                    (Check::RestStrategy { eps: 1.0, expected: vec![0.5; 6], tol: 1e-8 }, "uniform mixed equilibrium"),
                ],
                both_converge(1.0, "null-monotone network converges"),
            ]
            .concat(),
        },
        ExampleDescriptor {
            id: "7",
            preset: "jordan_mp",
            params: vec![],
            summary: "Jordan matching pennies",
            checks: vec![
                (
                    Check::FullSpectrum { expected: vec![-4.0, 2.0, 2.0, 0.0, 0.0, 0.0], tol: 1e-9 },
                    "eigenvalues of Φ+Φᵀ for the Jordan game",
                ),
                (Check::Mu { expected: 1.0, tol: 1e-9 }, "Jordan modulus 1"),
                (
                    Check::Convergence { eps: 1.0, gamma: 1.0, higher_order: false, expected: Converged, target: None, asserted: false },
                    "eps=1 is the boundary of the guarantee; observed only",
                ),
                (
                    Check::Convergence { eps: 1.0, gamma: 1.0, higher_order: true, expected: Converged, target: None, asserted: false },
                    "eps=1 is the boundary of the guarantee; observed only",
                ),
            ],
        },
        ExampleDescriptor {
            id: "8-A",
            preset: "modified_rps_A",
            params: vec![],
            summary: "modified RPS with matrix A",
            checks: [
                vec![
                    (
                        Check::FullSpectrum { expected: vec![3.3723, -2.3723, -1.0], tol: 1e-3 },
                        "eigenvalues of A+Aᵀ",
                    ),
                    (Check::TangentSpectrum { expected: vec![-1.0], tol: 1e-3 }, "tangent eigenvalue −1"),
                    (Check::Class(MonotonicityClass::StrictlyMonotone), "negative tangent eigenvalue"),
                    (
                        Check::RestStrategy { eps: 1.0, expected: vec![0.379, 0.2997, 0.3213], tol: 1e-3 },
                        "reported perturbed equilibrium at eps=1",
                    ),
                ],
                both_converge(1.0, "strictly monotone game converges"),
            ]
            .concat(),
        },
        ExampleDescriptor {
            id: "8-A-eps0.2",
            preset: "modified_rps_A",
            params: vec![],
            summary: "modified RPS with matrix A at eps=0.2",
            checks: [
                vec![(
                    Check::RestStrategy { eps: 0.2, expected: vec![0.4025, 0.3024, 0.2951], tol: 1e-3 },
                    "reported perturbed equilibrium at eps=0.2",
                )],
                both_converge(0.2, "strictly monotone game converges"),
            ]
            .concat(),
        },
        ExampleDescriptor {
            id: "8-Abar",
            preset: "modified_rps_Abar",
            params: vec![],
            summary: "modified RPS with matrix Ā",
            checks: [
                vec![
                    (
                        Check::FullSpectrum { expected: vec![-3.3723, 2.3723, 1.0], tol: 1e-3 },
                        "eigenvalues of Ā+Āᵀ",
                    ),
                    (Check::TangentSpectrum { expected: vec![1.0], tol: 1e-3 }, "tangent eigenvalue +1"),
                    (Check::Mu { expected: 0.5, tol: 1e-3 }, "modulus 1/2 from the tangent eigenvalue"),
                    (
                        Check::RestStrategy { eps: 1.0, expected: vec![0.2741, 0.3647, 0.3612], tol: 1e-3 },
                        "reported perturbed equilibrium at eps=1",
                    ),
                ],
                both_converge(1.0, "eps=1 exceeds mu"),
            ]
            .concat(),
        },
        ExampleDescriptor {
            id: "8-Abar-eps0.2",
            preset: "modified_rps_Abar",
            params: vec![],
            summary: "modified RPS with matrix Ā at eps=0.2",
            checks: vec![
                (
                    Check::RestStrategy { eps: 0.2, expected: vec![0.2653, 0.3237, 0.4109], tol: 1e-3 },
                    "reported perturbed equilibrium at eps=0.2",
                ),
                (conv(0.2, false, LimitCycle), "first-order cycle below mu"),
                (
                    Check::Convergence {
                        eps: 0.2,
                        gamma: 1.0,
                        higher_order: true,
                        expected: Converged,
                        target: Some((vec![0.2653, 0.3237, 0.4109], 1e-3)),
                        asserted: true,
                    },
                    "higher-order rest at the reported equilibrium",
                ),
            ],
        },
        ExampleDescriptor {
            id: "9",
            preset: "modified_jordan",
            params: vec![],
            summary: "modified Jordan game at eps=0.1",
            checks: cycle_vs_rest(0.1, "first-order cycle, higher-order rest"),
        },
    ]
}

pub fn example_ids() -> Vec<&'static str> {
    examples().iter().map(|e| e.id).collect()
}

/// Examples matching `id` exactly, or every sub-variant of a bare number
/// such as `1` or `8`.
pub fn find_examples(id: &str) -> Result<Vec<ExampleDescriptor>> {
    let all = examples();
    let exact: Vec<_> = all.iter().filter(|e| e.id == id).cloned().collect();
    if !exact.is_empty() {
        return Ok(exact);
    }
    let prefix = format!("{id}-");
    let group: Vec<_> = all.into_iter().filter(|e| e.id.starts_with(&prefix)).collect();
    if group.is_empty() {
        return Err(Error::usage(format!(
            "unknown example `{id}`; valid ids: {}",
            example_ids().join(", ")
        )));
    }
    Ok(group)
}

/// Runs every check of the matching examples.
pub fn reproduce(id: &str) -> Result<Vec<ReproduceReport>> {
    find_examples(id)?
        .into_iter()
        .map(|ex| {
            let game = ex.game()?;
            let outcomes = ex
                .checks
                .iter()
                .map(|(c, prov)| c.run(&game, prov))
                .collect::<Result<_>>()?;
            Ok(ReproduceReport { id: ex.id.into(), summary: ex.summary.into(), outcomes })
        })
        .collect()
}
