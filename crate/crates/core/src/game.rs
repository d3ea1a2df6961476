//! Finite games, mixed profiles and tangent spaces of the strategy simplex.
//!
//! A [`GameSpec`] is either a normal-form game with one dense payoff array
//! per player, or a single population matched against itself through a
//! payoff matrix (`U(x) = A x`). Joint actions are stored in row-major order
//! with player 1 as the slowest-varying index.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on block sums for [`MixedProfile`].
pub const SIMPLEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Payoffs {
    /// `payoffs[p][a]` is player `p`'s payoff at flat joint action `a`.
    Normal(Vec<Vec<f64>>),
    /// Single population with random matching: own action `i` against an
    /// opponent playing `j` pays `A[(i, j)]`.
    Population(DMatrix<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    action_counts: Vec<usize>,
    payoffs: Payoffs,
    linear_map: Option<DMatrix<f64>>,
}

/// Index ranges of each player's block inside a concatenated vector.
pub fn block_ranges(action_counts: &[usize]) -> Vec<Range<usize>> {
    let mut start = 0;
    action_counts
        .iter()
        .map(|&k| {
            let r = start..start + k;
            start += k;
            r
        })
        .collect()
}

fn check_counts(action_counts: &[usize]) -> Result<()> {
    if action_counts.is_empty() {
        return Err(Error::domain("a game needs at least one player"));
    }
    if let Some(k) = action_counts.iter().find(|&&k| k < 2) {
        return Err(Error::domain(format!(
            "every player needs at least two actions, got {k}"
        )));
    }
    Ok(())
}

impl GameSpec {
    /// Normal-form game from per-player flat payoff arrays.
    pub fn normal(
        action_counts: Vec<usize>,
        payoffs: Vec<Vec<f64>>,
        linear_map: Option<DMatrix<f64>>,
    ) -> Result<Self> {
        check_counts(&action_counts)?;
        let joint: usize = action_counts.iter().product();
        if payoffs.len() != action_counts.len() {
            return Err(Error::domain(format!(
                "expected {} payoff arrays, got {}",
                action_counts.len(),
                payoffs.len()
            )));
        }
        for (p, arr) in payoffs.iter().enumerate() {
            if arr.len() != joint {
                return Err(Error::domain(format!(
                    "player {} payoff array has {} entries, expected {joint}",
                    p + 1,
                    arr.len()
                )));
            }
            if arr.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain("payoffs must be finite"));
            }
        }
        let game = GameSpec {
            action_counts,
            payoffs: Payoffs::Normal(payoffs),
            linear_map: None,
        };
        game.with_linear_map(linear_map)
    }

    /// Single-population game `U(x) = A x`.
    pub fn population(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::domain("population payoff matrix must be square"));
        }
        check_counts(&[matrix.nrows()])?;
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("payoffs must be finite"));
        }
        Ok(GameSpec {
            action_counts: vec![matrix.nrows()],
            linear_map: Some(matrix.clone()),
            payoffs: Payoffs::Population(matrix),
        })
    }

    /// Two-player game with row payoffs `a` and column payoffs `b`, both
    /// indexed `(row action, column action)`. Player 2's payoff vector is
    /// `b^T x^1`.
    pub fn bimatrix(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Self> {
        if a.shape() != b.shape() {
            return Err(Error::domain("bimatrix payoff shapes differ"));
        }
        let (n1, n2) = a.shape();
        let mut p1 = Vec::with_capacity(n1 * n2);
        let mut p2 = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                p1.push(a[(i, j)]);
                p2.push(b[(i, j)]);
            }
        }
        GameSpec::normal(vec![n1, n2], vec![p1, p2], Some(bimatrix_map(a, b)))
    }

    fn with_linear_map(mut self, map: Option<DMatrix<f64>>) -> Result<Self> {
        if let Some(m) = &map {
            let n = self.dim();
            if m.shape() != (n, n) {
                return Err(Error::domain(format!(
                    "linear map must be {n}x{n}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        self.linear_map = map;
        Ok(self)
    }

    pub fn player_count(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    /// Total number of actions `n`, the dimension of score and strategy vectors.
    pub fn dim(&self) -> usize {
        self.action_counts.iter().sum()
    }

    pub fn blocks(&self) -> Vec<Range<usize>> {
        block_ranges(&self.action_counts)
    }

    pub fn payoffs(&self) -> &Payoffs {
        &self.payoffs
    }

    pub fn is_population(&self) -> bool {
        matches!(self.payoffs, Payoffs::Population(_))
    }

    /// Stored linear game map, if the preset or file supplied one.
    pub fn linear_map(&self) -> Option<&DMatrix<f64>> {
        self.linear_map.as_ref()
    }

    /// Largest absolute pure payoff.
    pub fn max_abs_payoff(&self) -> f64 {
        match &self.payoffs {
            Payoffs::Normal(p) => p.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs())),
            Payoffs::Population(a) => a.amax(),
        }
    }

    fn decode(&self, mut flat: usize, out: &mut [usize]) {
        for (slot, &k) in out.iter_mut().zip(&self.action_counts).rev() {
            *slot = flat % k;
            flat /= k;
        }
    }

    /// Per-player payoffs at a pure profile.
    ///
    /// For population games the profile is the matched pair
    /// `(own action, opponent action)` and a single payoff is returned.
    pub fn pure_payoff(&self, profile: &[usize]) -> Result<Vec<f64>> {
        match &self.payoffs {
            Payoffs::Population(a) => {
                if profile.len() != 2 {
                    return Err(Error::domain(
                        "population games take an (own, opponent) action pair",
                    ));
                }
                let n = a.nrows();
                if profile.iter().any(|&i| i >= n) {
                    return Err(Error::domain(format!("action index out of range 0..{n}")));
                }
                Ok(vec![a[(profile[0], profile[1])]])
            }
            Payoffs::Normal(p) => {
                if profile.len() != self.player_count() {
                    return Err(Error::domain(format!(
                        "profile has {} entries for {} players",
                        profile.len(),
                        self.player_count()
                    )));
                }
                let mut flat = 0;
                for (q, (&i, &k)) in profile.iter().zip(&self.action_counts).enumerate() {
                    if i >= k {
                        return Err(Error::domain(format!(
                            "player {} action {i} out of range 0..{k}",
                            q + 1
                        )));
                    }
                    flat = flat * k + i;
                }
                Ok(p.iter().map(|arr| arr[flat]).collect())
            }
        }
    }

    fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::domain(format!(
                "vector has length {}, game dimension is {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Payoff vector `U(x)`: entry `(p, i)` is player `p`'s expected payoff
    /// for pure action `i` against the others' mixed strategies.
    ///
    /// Evaluated from the payoff tensor (the multilinear extension), so it is
    /// defined for any `x` of the right length.
    pub fn payoff_vector(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(x)?;
        let p = match &self.payoffs {
            Payoffs::Population(a) => return Ok(a * x),
            Payoffs::Normal(p) => p,
        };
        let blocks = self.blocks();
        let players = self.player_count();
        let mut u = DVector::zeros(self.dim());
        let mut idx = vec![0; players];
        let joint: usize = self.action_counts.iter().product();
        for a in 0..joint {
            self.decode(a, &mut idx);
            for q in 0..players {
                let w: f64 = (0..players)
                    .filter(|&r| r != q)
                    .map(|r| x[blocks[r].start + idx[r]])
                    .product();
                u[blocks[q].start + idx[q]] += p[q][a] * w;
            }
        }
        Ok(u)
    }

    /// Exact Jacobian `DU(x)` of the multilinear payoff vector.
    pub fn payoff_jacobian(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_dim(x)?;
        let p = match &self.payoffs {
            Payoffs::Population(a) => return Ok(a.clone()),
            Payoffs::Normal(p) => p,
        };
        let n = self.dim();
        let blocks = self.blocks();
        let players = self.player_count();
        let mut jac = DMatrix::zeros(n, n);
        let mut idx = vec![0; players];
        let joint: usize = self.action_counts.iter().product();
        for a in 0..joint {
            self.decode(a, &mut idx);
            for q in 0..players {
                for r in (0..players).filter(|&r| r != q) {
                    let w: f64 = (0..players)
                        .filter(|&s| s != q && s != r)
                        .map(|s| x[blocks[s].start + idx[s]])
                        .product();
                    jac[(blocks[q].start + idx[q], blocks[r].start + idx[r])] += p[q][a] * w;
                }
            }
        }
        Ok(jac)
    }

    /// Player `p`'s expected payoff `x^p . U^p(x)`.
    pub fn expected_payoff(&self, player: usize, x: &DVector<f64>) -> Result<f64> {
        let u = self.payoff_vector(x)?;
        let r = self
            .blocks()
            .get(player)
            .cloned()
            .ok_or_else(|| Error::domain(format!("no player {player}")))?;
        Ok(x.rows(r.start, r.len()).dot(&u.rows(r.start, r.len())))
    }

    /// Expected payoff of every player summed directly over joint actions.
    pub fn tensor_expectation(&self, x: &DVector<f64>) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        match &self.payoffs {
            Payoffs::Population(a) => Ok(vec![x.dot(&(a * x))]),
            Payoffs::Normal(p) => {
                let blocks = self.blocks();
                let mut idx = vec![0; self.player_count()];
                let mut out = vec![0.0; self.player_count()];
                for a in 0..p[0].len() {
                    self.decode(a, &mut idx);
                    let w: f64 = idx
                        .iter()
                        .zip(&blocks)
                        .map(|(&i, b)| x[b.start + i])
                        .product();
                    for (o, arr) in out.iter_mut().zip(p) {
                        *o += arr[a] * w;
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn to_file(&self) -> GameFile {
        let (payoffs, population) = match &self.payoffs {
            Payoffs::Normal(p) => (p.clone(), None),
            Payoffs::Population(a) => (vec![row_major(a)], Some(true)),
        };
        GameFile {
            players: self.player_count(),
            action_counts: self.action_counts.clone(),
            payoffs,
            linear_map: self.linear_map.as_ref().map(row_major),
            population,
        }
    }

    pub fn from_file(file: &GameFile) -> Result<Self> {
        if file.players != file.action_counts.len() {
            return Err(Error::usage(format!(
                "players = {} but {} action counts given",
                file.players,
                file.action_counts.len()
            )));
        }
        let n: usize = file.action_counts.iter().sum();
        let linear_map = match &file.linear_map {
            Some(flat) if flat.len() != n * n => {
                return Err(Error::usage(format!(
                    "linear_map has {} entries, expected {}",
                    flat.len(),
                    n * n
                )))
            }
            Some(flat) => Some(DMatrix::from_row_slice(n, n, flat)),
            None => None,
        };
        if file.population.unwrap_or(false) {
            if file.players != 1 || file.payoffs.len() != 1 || file.payoffs[0].len() != n * n {
                return Err(Error::usage(
                    "population game needs one player and one n*n payoff array",
                ));
            }
            return GameSpec::population(DMatrix::from_row_slice(n, n, &file.payoffs[0]));
        }
        GameSpec::normal(file.action_counts.clone(), file.payoffs.clone(), linear_map)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GameFile = serde_json::from_str(text)?;
        GameSpec::from_file(&file)
    }
}

/// On-disk game definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    pub players: usize,
    pub action_counts: Vec<usize>,
    /// Per-player flat arrays in row-major joint-action order. For a
    /// population game, a single row-major `n x n` matrix.
    pub payoffs: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear_map: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population: Option<bool>,
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().iter().copied().collect()
}

/// `[[0, A], [B^T, 0]]`.
pub fn bimatrix_map(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (n1, n2) = a.shape();
    let mut phi = DMatrix::zeros(n1 + n2, n1 + n2);
    phi.view_mut((0, n1), (n1, n2)).copy_from(a);
    phi.view_mut((n1, 0), (n2, n1)).copy_from(&b.transpose());
    phi
}

/// Linear game map `Φ` with `U(x) = Φx` on the strategy space, when known.
///
/// Returns the stored map if there is one; otherwise assembles it for
/// two-player games from the payoff tensor. General N-player games without a
/// supplied map return `None`.
pub fn linear_game_map(game: &GameSpec) -> Option<DMatrix<f64>> {
    if let Some(m) = game.linear_map() {
        return Some(m.clone());
    }
    match game.payoffs() {
        Payoffs::Population(a) => Some(a.clone()),
        Payoffs::Normal(p) if game.player_count() == 2 => {
            let (n1, n2) = (game.action_counts()[0], game.action_counts()[1]);
            let a = DMatrix::from_row_slice(n1, n2, &p[0]);
            let b = DMatrix::from_row_slice(n1, n2, &p[1]);
            Some(bimatrix_map(&a, &b))
        }
        Payoffs::Normal(_) => None,
    }
}

/// Payoff vector at a validated mixed profile.
pub fn expected_payoff_vector(game: &GameSpec, x: &MixedProfile) -> Result<DVector<f64>> {
    if x.action_counts() != game.action_counts() {
        return Err(Error::domain("profile does not match the game's action counts"));
    }
    game.payoff_vector(x.as_vector())
}

/// A point of the product of simplices.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile {
    action_counts: Vec<usize>,
    values: DVector<f64>,
}

impl MixedProfile {
    pub fn new(action_counts: &[usize], values: DVector<f64>) -> Result<Self> {
        check_counts(action_counts)?;
        let n: usize = action_counts.iter().sum();
        if values.len() != n {
            return Err(Error::domain(format!(
                "profile has length {}, expected {n}",
                values.len()
            )));
        }
        for (p, r) in block_ranges(action_counts).into_iter().enumerate() {
            let block = values.rows(r.start, r.len());
            if block.iter().any(|&v| !(v >= 0.0)) {
                return Err(Error::domain(format!("player {} block has a negative entry", p + 1)));
            }
            let s = block.sum();
            if (s - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::domain(format!("player {} block sums to {s}", p + 1)));
            }
        }
        Ok(MixedProfile {
            action_counts: action_counts.to_vec(),
            values,
        })
    }

    pub fn centroid(action_counts: &[usize]) -> Result<Self> {
        let values = DVector::from_iterator(
            action_counts.iter().sum(),
            action_counts
                .iter()
                .flat_map(|&k| std::iter::repeat_n(1.0 / k as f64, k)),
        );
        MixedProfile::new(action_counts, values)
    }

    pub(crate) fn from_softmax(action_counts: &[usize], values: DVector<f64>) -> Self {
        MixedProfile {
            action_counts: action_counts.to_vec(),
            values,
        }
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.values
    }

    pub fn block(&self, player: usize) -> &[f64] {
        let r = block_ranges(&self.action_counts)[player].clone();
        &self.values.as_slice()[r]
    }

    /// True when every entry is strictly positive.
    pub fn is_interior(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }
}

/// Orthonormal bases of the zero-sum subspaces `{y : sum(y^p) = 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentBasis {
    pub per_player: Vec<DMatrix<f64>>,
    /// Block-diagonal `n x (n - N)` concatenation.
    pub full: DMatrix<f64>,
}

/// Gram-Schmidt on `e_1 - e_2, e_1 - e_3, ...` for each player, in that order.
pub fn tangent_basis(action_counts: &[usize]) -> Result<TangentBasis> {
    check_counts(action_counts)?;
    let per_player: Vec<DMatrix<f64>> = action_counts
        .iter()
        .map(|&k| {
            let mut cols: Vec<DVector<f64>> = Vec::with_capacity(k - 1);
            for j in 1..k {
                let mut v = DVector::zeros(k);
                v[0] = 1.0;
                v[j] = -1.0;
                for u in &cols {
                    let c = u.dot(&v);
                    v.axpy(-c, u, 1.0);
                }
                v /= v.norm();
                cols.push(v);
            }
            DMatrix::from_columns(&cols)
        })
        .collect();
    let n: usize = action_counts.iter().sum();
    let m = n - action_counts.len();
    let mut full = DMatrix::zeros(n, m);
    let (mut r, mut c) = (0, 0);
    for e in &per_player {
        full.view_mut((r, c), e.shape()).copy_from(e);
        r += e.nrows();
        c += e.ncols();
    }
    Ok(TangentBasis { per_player, full })
}
