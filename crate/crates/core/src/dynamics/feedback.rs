//! LTI payoff-adjustment block `ξ̇ = Aξ + Bx`, `v = Cξ + Dx`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::{spectral_abscissa, symmetric_eigenvalues};
use crate::{Error, Result};

const DC_GAIN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum FeedbackBlock {
    /// `G(s) = Ks/(s + a)` applied to every coordinate: `A = B = −aI`, `C = D = KI`.
    HighPass { k: f64, a: f64, n: usize },
    /// Arbitrary block-diagonal realization.
    General {
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
        hurwitz: bool,
        dc_gain: f64,
    },
}

impl FeedbackBlock {
    pub fn high_pass(k: f64, a: f64, n: usize) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::config(format!("high-pass gain K must be non-negative, got {k}")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::config(format!("high-pass corner a must be positive, got {a}")));
        }
        if n == 0 {
            return Err(Error::config("feedback block needs a positive dimension"));
        }
        Ok(FeedbackBlock::HighPass { k, a, n })
    }

    pub fn general(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        for (name, m) in [("A", &a), ("B", &b), ("C", &c), ("D", &d)] {
            if m.shape() != (n, n) || n == 0 {
                return Err(Error::config(format!("{name} must be a square {n}x{n} matrix")));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::config(format!("{name} has non-finite entries")));
            }
        }
        let hurwitz = spectral_abscissa(&a) < 0.0;
        let dc_gain = dc_gain_matrix(&a, &b, &c, &d).map_or(f64::INFINITY, |h| inf_norm(&h));
        Ok(FeedbackBlock::General { a, b, c, d, hurwitz, dc_gain })
    }

    /// Block-diagonal assembly from per-player `(A, B, C, D)` quadruples.
    pub fn from_player_blocks(blocks: &[[DMatrix<f64>; 4]]) -> Result<Self> {
        let n: usize = blocks.iter().map(|q| q[0].nrows()).sum();
        let mut full: [DMatrix<f64>; 4] = std::array::from_fn(|_| DMatrix::zeros(n, n));
        let mut off = 0;
        for quad in blocks {
            let k = quad[0].nrows();
            for (dst, src) in full.iter_mut().zip(quad) {
                if src.shape() != (k, k) {
                    return Err(Error::config("per-player block matrices must be square and equal-sized"));
                }
                dst.view_mut((off, off), (k, k)).copy_from(src);
            }
            off += k;
        }
        let [a, b, c, d] = full;
        FeedbackBlock::general(a, b, c, d)
    }

    pub fn dim(&self) -> usize {
        match self {
            FeedbackBlock::HighPass { n, .. } => *n,
            FeedbackBlock::General { a, .. } => a.nrows(),
        }
    }

    pub fn a_matrix(&self) -> DMatrix<f64> {
        match self {
            FeedbackBlock::HighPass { a, n, .. } => DMatrix::identity(*n, *n) * -*a,
            FeedbackBlock::General { a, .. } => a.clone(),
        }
    }

    pub fn b_matrix(&self) -> DMatrix<f64> {
        match self {
            FeedbackBlock::HighPass { a, n, .. } => DMatrix::identity(*n, *n) * -*a,
            FeedbackBlock::General { b, .. } => b.clone(),
        }
    }

    pub fn c_matrix(&self) -> DMatrix<f64> {
        match self {
            FeedbackBlock::HighPass { k, n, .. } => DMatrix::identity(*n, *n) * *k,
            FeedbackBlock::General { c, .. } => c.clone(),
        }
    }

    pub fn d_matrix(&self) -> DMatrix<f64> {
        match self {
            FeedbackBlock::HighPass { k, n, .. } => DMatrix::identity(*n, *n) * *k,
            FeedbackBlock::General { d, .. } => d.clone(),
        }
    }

    /// The same block expressed through explicit matrices.
    pub fn to_general(&self) -> Self {
        FeedbackBlock::general(self.a_matrix(), self.b_matrix(), self.c_matrix(), self.d_matrix())
            .expect("matrices from a valid block")
    }

    /// Filter equilibrium `ξ* = −A⁻¹Bx`.
    pub fn equilibrium(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        match self {
            FeedbackBlock::HighPass { .. } => Ok(-x),
            FeedbackBlock::General { a, b, .. } => a
                .clone()
                .lu()
                .solve(&(b * x))
                .map(|v| -v)
                .ok_or_else(|| Error::config("A is singular")),
        }
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::config(format!(
                "feedback block has dimension {}, game dimension is {n}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// Hurwitz `A` and zero DC gain, the structural requirements for
    /// rest-point preservation.
    pub fn require_valid(&self) -> Result<()> {
        if let FeedbackBlock::General { hurwitz, dc_gain, .. } = self {
            if !hurwitz {
                return Err(Error::config("feedback block A is not Hurwitz"));
            }
            if !(*dc_gain <= DC_GAIN_TOL) {
                return Err(Error::config(format!("feedback block DC gain {dc_gain:e} is not zero")));
            }
        }
        Ok(())
    }

    /// Transfer matrix `C(sI − A)⁻¹B + D` at `s = jω`.
    pub fn transfer_at(&self, omega: f64) -> Result<DMatrix<Complex64>> {
        let n = self.dim();
        let to_c = |m: DMatrix<f64>| m.map(|v| Complex64::new(v, 0.0));
        let mut resolvent = -to_c(self.a_matrix());
        for i in 0..n {
            resolvent[(i, i)] += Complex64::new(0.0, omega);
        }
        let inv = resolvent
            .try_inverse()
            .ok_or_else(|| Error::config(format!("jωI − A is singular at ω = {omega}")))?;
        Ok(to_c(self.c_matrix()) * inv * to_c(self.b_matrix()) + to_c(self.d_matrix()))
    }
}

fn dc_gain_matrix(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>, d: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let ainv_b = a.clone().lu().solve(b)?;
    Some(d - c * ainv_b)
}

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Logarithmically spaced frequencies for the positive-realness scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        FrequencyGrid { lo: 1e-3, hi: 1e3, points: 200 }
    }
}

impl FrequencyGrid {
    pub fn omegas(&self) -> Vec<f64> {
        if self.points < 2 {
            return vec![self.lo];
        }
        let (l, h) = (self.lo.log10(), self.hi.log10());
        (0..self.points)
            .map(|i| 10f64.powf(l + (h - l) * i as f64 / (self.points - 1) as f64))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeedbackReport {
    pub hurwitz: bool,
    pub spectral_abscissa: f64,
    pub dc_gain_norm: f64,
    pub dc_gain_ok: bool,
    /// Smallest eigenvalue of `(H + H*)/2` over the grid.
    pub min_hermitian_eigenvalue: f64,
    pub worst_omega: f64,
    pub spr_ok: bool,
}

impl FeedbackReport {
    pub fn passes(&self) -> bool {
        self.hurwitz && self.dc_gain_ok && self.spr_ok
    }
}

pub fn verify_feedback_block(block: &FeedbackBlock, grid: &FrequencyGrid) -> Result<FeedbackReport> {
    if !(grid.lo > 0.0 && grid.hi >= grid.lo && grid.points > 0) {
        return Err(Error::usage("frequency grid needs 0 < lo <= hi and at least one point"));
    }
    let a = block.a_matrix();
    let (b, c, d) = (block.b_matrix(), block.c_matrix(), block.d_matrix());
    let dc = dc_gain_matrix(&a, &b, &c, &d).ok_or_else(|| Error::config("A is singular"))?;
    let abscissa = spectral_abscissa(&a);
    let dc_gain_norm = inf_norm(&dc);

    let n = block.dim();
    let mut min_eig = f64::INFINITY;
    let mut worst_omega = grid.lo;
    for w in grid.omegas() {
        let h = block.transfer_at(w)?;
        let herm = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        // Real symmetric embedding [[Re, −Im], [Im, Re]] has the same spectrum, doubled.
        let emb = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let v = herm[(i % n, j % n)];
            match (i < n, j < n) {
                (true, true) | (false, false) => v.re,
                (true, false) => -v.im,
                (false, true) => v.im,
            }
        });
        let lo = symmetric_eigenvalues(&emb)[0];
        if lo < min_eig {
            min_eig = lo;
            worst_omega = w;
        }
    }
    Ok(FeedbackReport {
        hurwitz: abscissa < 0.0,
        spectral_abscissa: abscissa,
        dc_gain_norm,
        dc_gain_ok: dc_gain_norm <= DC_GAIN_TOL,
        min_hermitian_eigenvalue: min_eig,
        worst_omega,
        spr_ok: min_eig > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn high_pass_passes_all_checks() {
        let block = FeedbackBlock::high_pass(1.0, 1.0, 3).unwrap();
        let r = verify_feedback_block(&block, &FrequencyGrid::default()).unwrap();
        assert!(r.hurwitz && r.dc_gain_ok && r.spr_ok, "{r:?}");
        // Re G(jω) = Kω²/(ω² + a²) is smallest at the low end of the grid.
        assert!((r.min_hermitian_eigenvalue - 1e-6 / (1e-6 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn unstable_a_fails_hurwitz() {
        let id = DMatrix::<f64>::identity(2, 2);
        let block = FeedbackBlock::general(id.clone(), id.clone(), id.clone(), id).unwrap();
        let r = verify_feedback_block(&block, &FrequencyGrid::default()).unwrap();
        assert!(!r.hurwitz);
        assert!(block.require_valid().is_err());
    }

    #[test]
    fn missing_feedthrough_fails_dc_gain() {
        let n = 3;
        let id = DMatrix::<f64>::identity(n, n);
        let block = FeedbackBlock::general(-&id, -&id, id.clone(), DMatrix::zeros(n, n)).unwrap();
        let r = verify_feedback_block(&block, &FrequencyGrid::default()).unwrap();
        assert!(r.hurwitz);
        assert!(!r.dc_gain_ok);
        assert!((r.dc_gain_norm - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singular_a_is_configuration_error() {
        let z = DMatrix::<f64>::zeros(2, 2);
        let id = DMatrix::<f64>::identity(2, 2);
        let block = FeedbackBlock::general(z, id.clone(), id.clone(), id).unwrap();
        assert!(matches!(
            verify_feedback_block(&block, &FrequencyGrid::default()),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn player_blocks_assemble_diagonally() {
        let hp = |k: usize| {
            let id = DMatrix::<f64>::identity(k, k);
            [-&id, -&id, id.clone(), id]
        };
        let block = FeedbackBlock::from_player_blocks(&[hp(3), hp(2)]).unwrap();
        assert_eq!(block.dim(), 5);
        assert_eq!(block.a_matrix(), FeedbackBlock::high_pass(1.0, 1.0, 5).unwrap().a_matrix());
        assert!(block.require_valid().is_ok());
    }

    #[test]
    fn grid_endpoints() {
        let w = FrequencyGrid::default().omegas();
        assert_eq!(w.len(), 200);
        assert!((w[0] - 1e-3).abs() < 1e-18);
        assert!((w[199] - 1e3).abs() < 1e-9);
    }
}
