use gamedyn::analysis::{rest_point, RestPointOptions};
use gamedyn::choice::{bregman_lse, log_sum_exp, softmax, softmax_block, softmax_jacobian, Temperature};
use gamedyn::dynamics::{
    expdrl_field, hexpdrl_field, induced_strategy_field, induced_strategy_field_entropy, integrate,
    FeedbackBlock, FirstOrder, FirstOrderParams, HigherOrderState, IntegrationOptions,
};
use gamedyn::game::expected_payoff_vector;
use gamedyn::{preset, GameSpec, PresetParams};
use nalgebra::DVector;
use proptest::prelude::*;

fn scores(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, n)
}

fn temperature() -> impl Strategy<Value = f64> {
    0.05..3.0f64
}

fn game_by_index(i: usize) -> GameSpec {
    let (name, params) = match i % 6 {
        0 => ("rps", PresetParams::new().with("l", 4.0)),
        1 => ("two_player_rps", PresetParams::new().with("l", 2.0)),
        2 => ("shapley", PresetParams::new()),
        3 => ("network_zero_sum_mp", PresetParams::new()),
        4 => ("modified_jordan", PresetParams::new()),
        _ => ("modified_rps_Abar", PresetParams::new()),
    };
    preset(name, &params).unwrap()
}

proptest! {
    #[test]
    fn softmax_is_interior_and_normalized(z in scores(4), e in temperature()) {
        let s = softmax_block(&z, Temperature::new(e).unwrap()).unwrap();
        prop_assert!(s.iter().all(|&p| p > 0.0 && p <= 1.0));
        prop_assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn softmax_ignores_common_shift(z in scores(3), e in temperature(), c in -50.0..50.0f64) {
        let t = Temperature::new(e).unwrap();
        let shifted: Vec<f64> = z.iter().map(|v| v + c).collect();
        let a = softmax_block(&z, t).unwrap();
        let b = softmax_block(&shifted, t).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        let lse = log_sum_exp(&shifted, t).unwrap() - log_sum_exp(&z, t).unwrap();
        prop_assert!((lse - c).abs() < 1e-9 * c.abs().max(1.0));
    }

    #[test]
    fn jacobian_spectrum_bounded_by_inverse_temperature(z in scores(4), e in temperature()) {
        let j = softmax_jacobian(&z, Temperature::new(e).unwrap()).unwrap();
        let top = j.clone().symmetric_eigen().eigenvalues.max();
        prop_assert!(top <= 1.0 / e + 1e-12);
        for r in 0..4 {
            prop_assert!(j.row(r).sum().abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_is_cocoercive(z in scores(5), w in scores(5), e in temperature()) {
        let t = Temperature::new(e).unwrap();
        let (z, w) = (DVector::from_vec(z), DVector::from_vec(w));
        let ds = softmax(&z, t, &[2, 3]).unwrap().into_vector() - softmax(&w, t, &[2, 3]).unwrap().into_vector();
        let inner = ds.dot(&(&z - &w));
        prop_assert!(inner >= e * ds.norm_squared() - 1e-10);
    }

    #[test]
    fn bregman_sandwich(z in scores(5), w in scores(5), e in temperature()) {
        let t = Temperature::new(e).unwrap();
        let (z, w) = (DVector::from_vec(z), DVector::from_vec(w));
        let v = bregman_lse(&z, &w, t, &[3, 2]).unwrap();
        let ds = softmax(&z, t, &[3, 2]).unwrap().into_vector() - softmax(&w, t, &[3, 2]).unwrap().into_vector();
        prop_assert!(0.5 * e * ds.norm_squared() <= v + 1e-12);
        prop_assert!(v <= (&z - &w).norm_squared() / (2.0 * e) + 1e-12);
    }

    #[test]
    fn induced_field_blocks_sum_to_zero(i in 0usize..6, seed in scores(6), e in 0.1..2.0f64) {
        let g = game_by_index(i);
        let z = DVector::from_fn(g.dim(), |k, _| seed[k % seed.len()]);
        let f = induced_strategy_field(&z, &g, &FirstOrderParams::new(1.0, e).unwrap()).unwrap();
        for r in g.blocks() {
            prop_assert!(f.rows(r.start, r.len()).sum().abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_form_matches_score_form(i in 0usize..6, seed in scores(6), e in 0.2..2.0f64) {
        let g = game_by_index(i);
        let p = FirstOrderParams::new(1.5, e).unwrap();
        let z = DVector::from_fn(g.dim(), |k, _| seed[k % seed.len()] * 0.5);
        let x = softmax(&z, Temperature::new(e).unwrap(), g.action_counts()).unwrap();
        let a = induced_strategy_field(&z, &g, &p).unwrap();
        let b = induced_strategy_field_entropy(&x, &g, &p).unwrap();
        prop_assert!((a - b).amax() < 1e-10);
    }

    #[test]
    fn json_round_trip_is_bitwise(i in 0usize..6, raw in prop::collection::vec(0.01..1.0f64, 9)) {
        let g = game_by_index(i);
        let back = GameSpec::from_json(&g.to_json().unwrap()).unwrap();
        let mut values = Vec::new();
        for r in g.blocks() {
            let total: f64 = r.clone().map(|k| raw[k % raw.len()]).sum();
            values.extend(r.map(|k| raw[k % raw.len()] / total));
        }
        let x = gamedyn::MixedProfile::new(g.action_counts(), DVector::from_vec(values)).unwrap();
        let a = expected_payoff_vector(&g, &x).unwrap();
        let b = expected_payoff_vector(&back, &x).unwrap();
        prop_assert_eq!(a.as_slice(), b.as_slice());
    }
}

#[test]
fn rk4_is_deterministic_and_converges_in_step() {
    let g = preset("matching_pennies", &PresetParams::new()).unwrap();
    let p = FirstOrderParams::new(1.0, 1.0).unwrap();
    let z0 = DVector::from_vec(vec![0.3, -0.2, 0.9, -0.6]);
    let sys = FirstOrder::new(&g, p);
    let a = integrate(&sys, &z0, &IntegrationOptions::new(0.01, 20.0, 100)).unwrap();
    let b = integrate(&sys, &z0, &IntegrationOptions::new(0.01, 20.0, 100)).unwrap();
    assert_eq!(a, b);
    let half = integrate(&sys, &z0, &IntegrationOptions::new(0.005, 20.0, 100)).unwrap();
    assert!((a.final_state() - half.final_state()).amax() <= 1e-8);
}

#[test]
fn higher_order_preserves_rest_points() {
    let g = preset("two_player_rps", &PresetParams::new().with("l", 3.0)).unwrap();
    let p = FirstOrderParams::new(1.0, 0.8).unwrap();
    let r = rest_point(&g, 0.8, None, &RestPointOptions::default()).unwrap();
    assert!(expdrl_field(&r.z_star, &g, &p).unwrap().amax() < 1e-9);
    let block = FeedbackBlock::high_pass(2.0, 0.5, g.dim()).unwrap();
    let state = HigherOrderState {
        z: r.z_star.clone(),
        xi: block.equilibrium(r.x_star.as_vector()).unwrap(),
    };
    let (dz, dxi) = hexpdrl_field(&state, &g, &p, &block).unwrap();
    assert!(dz.amax() < 1e-9 && dxi.amax() < 1e-9);
}
