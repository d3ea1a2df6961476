//! Fixtures shared by the benchmarks.

use gamedyn::experiment::initial_scores;
use gamedyn::{preset, GameSpec, PresetParams};
use nalgebra::DVector;

/// Preset with an optional `l` parameter.
pub fn game(name: &str, l: Option<f64>) -> GameSpec {
    let params = match l {
        Some(l) => PresetParams::new().with("l", l),
        None => PresetParams::new(),
    };
    preset(name, &params).expect("built-in preset")
}

/// The games benchmarked throughout, from three to eight joint actions.
pub fn suite() -> Vec<(&'static str, GameSpec)> {
    vec![
        ("rps", game("rps", Some(5.0))),
        ("two_player_rps", game("two_player_rps", Some(5.0))),
        ("network_zero_sum_mp", game("network_zero_sum_mp", None)),
        ("modified_jordan", game("modified_jordan", None)),
    ]
}

pub fn scores(game: &GameSpec) -> DVector<f64> {
    initial_scores(game.dim(), 17)
}
