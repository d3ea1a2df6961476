//! Built-in example games.
//!
//! | name                  | players | parameters                  |
//! |-----------------------|---------|-----------------------------|
//! | `rps`                 | 1 (pop) | `l` (required)              |
//! | `anticoord123`        | 1 (pop) |                             |
//! | `matching_pennies`    | 2       |                             |
//! | `two_player_rps`      | 2       | `l` (required)              |
//! | `shapley`             | 2       |                             |
//! | `network_zero_sum_mp` | 3       | `k12`, `k13`, `k23` (1,2,3) |
//! | `jordan_mp`           | 3       |                             |
//! | `modified_rps_A`      | 1 (pop) |                             |
//! | `modified_rps_Abar`   | 1 (pop) |                             |
//! | `modified_jordan`     | 3       |                             |

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::game::GameSpec;
use crate::{Error, Result};

pub const PRESET_NAMES: [&str; 10] = [
    "rps",
    "anticoord123",
    "matching_pennies",
    "two_player_rps",
    "shapley",
    "network_zero_sum_mp",
    "jordan_mp",
    "modified_rps_A",
    "modified_rps_Abar",
    "modified_jordan",
];

/// One-line description of a preset and its parameters.
pub fn preset_summary(name: &str) -> Option<&'static str> {
    Some(match name {
        "rps" => "single-population rock-paper-scissors; l (required) is the loss magnitude",
        "anticoord123" => "single-population anti-coordination game with payoff diag(-1, -2, -3)",
        "matching_pennies" => "two-player matching pennies",
        "two_player_rps" => "two-player rock-paper-scissors; l (required) is the loss magnitude",
        "shapley" => "two-player Shapley game",
        "network_zero_sum_mp" => "three players on a triangle of matching-pennies games; k12, k13, k23 (default 1, 2, 3)",
        "jordan_mp" => "three-player Jordan matching pennies",
        "modified_rps_A" => "single-population modified rock-paper-scissors, matrix A",
        "modified_rps_Abar" => "single-population modified rock-paper-scissors, matrix Abar",
        "modified_jordan" => "three-player modified Jordan game",
        _ => return None,
    })
}

/// Named real parameters of a preset, e.g. `l = 5`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PresetParams(BTreeMap<String, f64>);

impl PresetParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.0.insert(key.to_owned(), value);
        self
    }

    pub fn insert(&mut self, key: &str, value: f64) {
        self.0.insert(key.to_owned(), value);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.0.get(key).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Parses `key=value`.
    pub fn parse_assignment(&mut self, text: &str) -> Result<()> {
        let (k, v) = text
            .split_once('=')
            .ok_or_else(|| Error::usage(format!("expected key=value, got {text:?}")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::usage(format!("parameter {k} is not a number: {v:?}")))?;
        self.insert(k.trim(), v);
        Ok(())
    }

    fn check_known(&self, name: &str, allowed: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::usage(format!("preset {name} has no parameter {k:?}"))),
            None => Ok(()),
        }
    }

    fn required(&self, name: &str, key: &str) -> Result<f64> {
        self.get(key)
            .ok_or_else(|| Error::usage(format!("preset {name} requires parameter {key}")))
    }
}

fn mat3(rows: [[f64; 3]; 3]) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |i, j| rows[i][j])
}

fn mat2(rows: [[f64; 2]; 2]) -> DMatrix<f64> {
    DMatrix::from_fn(2, 2, |i, j| rows[i][j])
}

/// Rock-paper-scissors with loss parameter `l`.
pub fn rps_matrix(l: f64) -> DMatrix<f64> {
    mat3([[0.0, -l, 1.0], [1.0, 0.0, -l], [-l, 1.0, 0.0]])
}

pub fn matching_pennies_matrix(k: f64) -> DMatrix<f64> {
    mat2([[k, -k], [-k, k]])
}

pub fn shapley_matrix() -> DMatrix<f64> {
    mat3([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
}

pub fn modified_rps_a() -> DMatrix<f64> {
    mat3([[0.0, -1.0, 3.0], [2.0, 0.0, -1.0], [-1.0, 3.0, 0.0]])
}

pub fn modified_rps_abar() -> DMatrix<f64> {
    mat3([[0.0, -3.0, 1.0], [1.0, 0.0, -2.0], [-3.0, 1.0, 0.0]])
}

pub fn preset(name: &str, params: &PresetParams) -> Result<GameSpec> {
    match name {
        "rps" => {
            params.check_known(name, &["l"])?;
            GameSpec::population(rps_matrix(params.required(name, "l")?))
        }
        "anticoord123" => {
            params.check_known(name, &[])?;
            GameSpec::population(DMatrix::from_diagonal(&nalgebra::dvector![-1.0, -2.0, -3.0]))
        }
        "matching_pennies" => {
            params.check_known(name, &[])?;
            let a = matching_pennies_matrix(1.0);
            GameSpec::bimatrix(&a, &(-&a))
        }
        "two_player_rps" => {
            params.check_known(name, &["l"])?;
            let a = rps_matrix(params.required(name, "l")?);
            GameSpec::bimatrix(&a, &a.transpose())
        }
        "shapley" => {
            params.check_known(name, &[])?;
            let a = shapley_matrix();
            GameSpec::bimatrix(&a, &a.transpose())
        }
        "network_zero_sum_mp" => {
            params.check_known(name, &["k12", "k13", "k23"])?;
            network_zero_sum(
                params.get("k12").unwrap_or(1.0),
                params.get("k13").unwrap_or(2.0),
                params.get("k23").unwrap_or(3.0),
            )
        }
        "jordan_mp" => {
            params.check_known(name, &[])?;
            jordan()
        }
        "modified_rps_A" => {
            params.check_known(name, &[])?;
            GameSpec::population(modified_rps_a())
        }
        "modified_rps_Abar" => {
            params.check_known(name, &[])?;
            GameSpec::population(modified_rps_abar())
        }
        "modified_jordan" => {
            params.check_known(name, &[])?;
            modified_jordan()
        }
        _ => Err(Error::usage(format!(
            "unknown preset {name:?}; known presets: {}",
            PRESET_NAMES.join(", ")
        ))),
    }
}

/// Three players on a triangle, each edge a zero-sum matching-pennies game
/// scaled by its own `k`.
fn network_zero_sum(k12: f64, k13: f64, k23: f64) -> Result<GameSpec> {
    let (a12, a13, a23) = (
        matching_pennies_matrix(k12),
        matching_pennies_matrix(k13),
        matching_pennies_matrix(k23),
    );
    let mut p: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(8)).collect();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                p[0].push(a12[(i, j)] + a13[(i, k)]);
                p[1].push(-a12[(i, j)] + a23[(j, k)]);
                p[2].push(-a13[(i, k)] - a23[(j, k)]);
            }
        }
    }
    let mut phi = DMatrix::zeros(6, 6);
    phi.view_mut((0, 2), (2, 2)).copy_from(&a12);
    phi.view_mut((0, 4), (2, 2)).copy_from(&a13);
    phi.view_mut((2, 4), (2, 2)).copy_from(&a23);
    phi.view_mut((2, 0), (2, 2)).copy_from(&(-a12.transpose()));
    phi.view_mut((4, 0), (2, 2)).copy_from(&(-a13.transpose()));
    phi.view_mut((4, 2), (2, 2)).copy_from(&(-a23.transpose()));
    GameSpec::normal(vec![2, 2, 2], p, Some(phi))
}

/// Three-player matching pennies: 1 wants to match 2, 2 wants to match 3,
/// 3 wants to mismatch 1. Action 0 is heads.
fn jordan() -> Result<GameSpec> {
    let mut p: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(8)).collect();
    let sign = |b: bool| if b { 1.0 } else { -1.0 };
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                p[0].push(sign(i == j));
                p[1].push(sign(j == k));
                p[2].push(sign(k != i));
            }
        }
    }
    #[rustfmt::skip]
    let phi = DMatrix::from_row_slice(6, 6, &[
         0.0,  0.0,  1.0, -1.0,  0.0,  0.0,
         0.0,  0.0, -1.0,  1.0,  0.0,  0.0,
         0.0,  0.0,  0.0,  0.0,  1.0, -1.0,
         0.0,  0.0,  0.0,  0.0, -1.0,  1.0,
        -1.0,  1.0,  0.0,  0.0,  0.0,  0.0,
         1.0, -1.0,  0.0,  0.0,  0.0,  0.0,
    ]);
    GameSpec::normal(vec![2, 2, 2], p, Some(phi))
}

/// Asymmetric cyclic game: `U^1 = M1 x^2`, `U^2 = M2 x^3`, `U^3 = M3 x^1`.
fn modified_jordan() -> Result<GameSpec> {
    let m1 = mat2([[0.0, 2.0], [1.0, 0.0]]);
    let m2 = mat2([[0.0, 1.0], [1.0, 0.0]]);
    let m3 = mat2([[0.0, 1.0 / 3.0], [1.0, 0.0]]);
    let mut p: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(8)).collect();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                p[0].push(m1[(i, j)]);
                p[1].push(m2[(j, k)]);
                p[2].push(m3[(k, i)]);
            }
        }
    }
    let mut phi = DMatrix::zeros(6, 6);
    phi.view_mut((0, 2), (2, 2)).copy_from(&m1);
    phi.view_mut((2, 4), (2, 2)).copy_from(&m2);
    phi.view_mut((4, 0), (2, 2)).copy_from(&m3);
    GameSpec::normal(vec![2, 2, 2], p, Some(phi))
}
