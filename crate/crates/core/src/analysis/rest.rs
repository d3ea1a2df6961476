//! Rest points `z = U(σ(z))` of the score dynamics (Nash distributions).

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::choice::{jacobian_full_from_probs, softmax, softmax_unchecked, Temperature};
use crate::game::{GameSpec, MixedProfile};
use crate::{Error, Result};

/// Residual accepted as a rest point.
pub const REST_POINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestPointOptions {
    /// Damping of the fixed-point iteration `z ← (1−β)z + βU(σ(z))`.
    pub beta: f64,
    pub fixed_point_tol: f64,
    pub newton_tol: f64,
    pub max_fixed_point: usize,
    pub max_newton: usize,
    /// Fall back to continuation in the temperature when the direct solve fails.
    pub continuation: bool,
}

impl Default for RestPointOptions {
    fn default() -> Self {
        RestPointOptions {
            beta: 0.5,
            fixed_point_tol: 1e-8,
            newton_tol: 1e-12,
            max_fixed_point: 100_000,
            max_newton: 50,
            continuation: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RestPointStatus {
    Found,
    NotFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    FixedPoint,
    FixedPointNewton,
    Continuation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestPointResult {
    pub z_star: DVector<f64>,
    pub x_star: MixedProfile,
    /// `‖z − U(σ(z))‖∞`.
    pub residual: f64,
    pub iterations: usize,
    pub method: SolveMethod,
    pub status: RestPointStatus,
}

impl RestPointResult {
    pub fn found(&self) -> bool {
        self.status == RestPointStatus::Found
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "z": self.z_star.as_slice(),
            "x": self.x_star.as_vector().as_slice(),
            "residual": self.residual,
            "iterations": self.iterations,
            "method": self.method,
            "status": self.status,
        })
    }
}

struct Solver<'a> {
    game: &'a GameSpec,
    eps: f64,
}

impl Solver<'_> {
    /// `F(z) = U(σ(z)) − z`.
    fn residual(&self, z: &DVector<f64>) -> DVector<f64> {
        let x = softmax_unchecked(z, self.eps, self.game.action_counts());
        self.game.payoff_vector(&x).expect("dimension checked") - z
    }

    fn jacobian(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let counts = self.game.action_counts();
        let x = softmax_unchecked(z, self.eps, counts);
        let du = self.game.payoff_jacobian(&x).expect("dimension checked");
        let n = z.len();
        du * jacobian_full_from_probs(&x, self.eps, counts) - DMatrix::identity(n, n)
    }

    /// Damped fixed-point iteration; stops early once progress stalls.
    fn fixed_point(&self, z: &mut DVector<f64>, opts: &RestPointOptions) -> (f64, usize) {
        let mut best = f64::INFINITY;
        let mut best_at = 0;
        let mut res = self.residual(z).amax();
        let mut it = 0;
        while it < opts.max_fixed_point && res >= opts.fixed_point_tol {
            let f = self.residual(z);
            *z += f * opts.beta;
            it += 1;
            res = self.residual(z).amax();
            if res < 0.999 * best {
                best = res;
                best_at = it;
            } else if it - best_at > 2_000 {
                break;
            }
        }
        (res, it)
    }

    /// Newton's method with a backtracking line search on `‖F‖₂`.
    fn newton(&self, z: &mut DVector<f64>, opts: &RestPointOptions) -> (f64, usize) {
        let mut f = self.residual(z);
        let mut it = 0;
        while it < opts.max_newton && f.amax() >= opts.newton_tol {
            let Some(step) = self.jacobian(z).lu().solve(&(-&f)) else {
                break;
            };
            let norm0 = f.norm();
            let mut t = 1.0;
            let mut accepted = false;
            while t > 1e-10 {
                let trial = &*z + &step * t;
                let ft = self.residual(&trial);
                if ft.norm() <= (1.0 - 1e-4 * t) * norm0 {
                    *z = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            it += 1;
            if !accepted {
                break;
            }
        }
        (f.amax(), it)
    }
}

/// Solves for a rest point from `z0` (zero when absent): damped fixed-point
/// iteration to `fixed_point_tol`, then Newton polishing. If that fails and
/// continuation is enabled, the solution is followed down from a temperature
/// high enough for the fixed-point map to contract.
///
/// Non-convergence is reported through the status, not as an error.
pub fn rest_point(
    game: &GameSpec,
    eps: f64,
    z0: Option<&DVector<f64>>,
    opts: &RestPointOptions,
) -> Result<RestPointResult> {
    let temp = Temperature::new(eps)?;
    let n = game.dim();
    let mut z = match z0 {
        Some(z0) if z0.len() != n => {
            return Err(Error::domain(format!("initial scores have length {}, expected {n}", z0.len())));
        }
        Some(z0) if z0.iter().any(|v| !v.is_finite()) => return Err(Error::domain("initial scores must be finite")),
        Some(z0) => z0.clone(),
        None => DVector::zeros(n),
    };
    let solver = Solver { game, eps };

    let (mut res, mut iterations) = solver.fixed_point(&mut z, opts);
    let mut method = SolveMethod::FixedPoint;
    if res >= opts.newton_tol {
        let (r, it) = solver.newton(&mut z, opts);
        res = r;
        iterations += it;
        method = SolveMethod::FixedPointNewton;
    }

    if res > REST_POINT_TOL && opts.continuation {
        let (zc, rc, itc) = continuation(game, eps, opts);
        if rc < res {
            z = zc;
            res = rc;
            iterations += itc;
            method = SolveMethod::Continuation;
        }
    }

    let x_star = softmax(&z, temp, game.action_counts())?;
    let status = if res <= REST_POINT_TOL { RestPointStatus::Found } else { RestPointStatus::NotFound };
    Ok(RestPointResult { z_star: z, x_star, residual: res, iterations, method, status })
}

/// Follows the rest point from a contracting temperature down to `eps`.
fn continuation(game: &GameSpec, eps: f64, opts: &RestPointOptions) -> (DVector<f64>, f64, usize) {
    let n = game.dim() as f64;
    let eps_hi = (4.0 * game.max_abs_payoff() * n).max(2.0 * eps);
    let stages = 60;
    let ratio = (eps / eps_hi).powf(1.0 / stages as f64);
    let mut z = DVector::zeros(game.dim());
    let mut total = 0;
    let mut res = f64::INFINITY;
    for k in 0..=stages {
        let e = if k == stages { eps } else { eps_hi * ratio.powi(k) };
        let solver = Solver { game, eps: e };
        if k == 0 {
            let (_, it) = solver.fixed_point(&mut z, opts);
            total += it;
        }
        let (r, it) = solver.newton(&mut z, opts);
        res = r;
        total += it;
    }
    (z, res, total)
}

/// Multi-start search: zero plus `starts − 1` seeded uniform initial scores
/// in `[−M, M]ⁿ`, `M = max(1, max |payoff|)`. Results with strategies within
/// `1e-6` are merged; only successful solves are kept.
pub fn rest_points(
    game: &GameSpec,
    eps: f64,
    opts: &RestPointOptions,
    starts: usize,
    seed: u64,
) -> Result<Vec<RestPointResult>> {
    Temperature::new(eps)?;
    let m = game.max_abs_payoff().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inits = vec![DVector::zeros(game.dim())];
    for _ in 1..starts.max(1) {
        inits.push(DVector::from_fn(game.dim(), |_, _| rng.random_range(-m..=m)));
    }
    let direct = RestPointOptions { continuation: false, ..*opts };
    let solved: Vec<RestPointResult> = inits
        .par_iter()
        .map(|z0| rest_point(game, eps, Some(z0), &direct))
        .collect::<Result<_>>()?;

    let mut out: Vec<RestPointResult> = Vec::new();
    for r in solved.into_iter().filter(|r| r.found()) {
        let dup = out
            .iter()
            .any(|o| (o.x_star.as_vector() - r.x_star.as_vector()).amax() < 1e-6);
        if !dup {
            out.push(r);
        }
    }
    if out.is_empty() && opts.continuation {
        let r = rest_point(game, eps, None, opts)?;
        if r.found() {
            out.push(r);
        }
    }
    Ok(out)
}
