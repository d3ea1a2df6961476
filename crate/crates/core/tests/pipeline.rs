use gamedyn::dynamics::{euler_discrete_step, integrate, FirstOrder, FirstOrderParams, IntegrationOptions};
use gamedyn::experiment::{find_examples, reproduce, simulate, ExperimentConfig, GameSource, Scheme};
use gamedyn::{preset, Error, PresetParams};
use nalgebra::DVector;

fn config(name: &str, params: PresetParams) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(GameSource::Preset { name: name.into(), params });
    c.t_end = 60.0;
    c.seeds = vec![0, 1, 2];
    c
}

#[test]
fn simulate_writes_deterministic_artifacts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let mut c = config("rps", PresetParams::new().with("l", 2.5));
        c.emit_ternary = true;
        c.out_dir = Some(dir.path().to_path_buf());
        let s = simulate(&c).unwrap();
        assert_eq!(s.statuses(), vec!["converged"; 3]);
        assert!(s.runs.iter().all(|r| r.lyapunov_non_increasing == Some(true)));
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 4);
    for name in &names {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between identical runs");
    }
    let csv = std::fs::read_to_string(a.path().join("rps_l2.5_first-order_seed0.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "t,z_1,z_2,z_3,x_1,x_2,x_3,V,tern1_u,tern1_v");

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.path().join("rps_l2.5_first-order_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["runs"][0]["status"], "converged");
    assert!(summary["runs"][0]["terminal_v"].as_f64().unwrap() < 1e-10);
}

#[test]
fn higher_order_summary_carries_composite_storage() {
    let mut c = config("shapley", PresetParams::new());
    c.scheme = Scheme::HigherOrder;
    c.eps = 0.1;
    c.t_end = 200.0;
    let s = simulate(&c).unwrap();
    assert_eq!(s.statuses(), vec!["converged"; 3]);
    assert!(s.runs.iter().all(|r| r.terminal_v.is_some()));
}

#[test]
fn divergence_is_reported_per_seed() {
    let mut c = config("rps", PresetParams::new().with("l", 2.0));
    c.gamma = 200.0;
    c.dt = 0.5;
    let s = simulate(&c).unwrap();
    assert_eq!(s.statuses(), vec!["diverged"; 3]);
}

#[test]
fn euler_tracks_rk4_for_small_steps() {
    let g = preset("matching_pennies", &PresetParams::new()).unwrap();
    let p = FirstOrderParams::new(1.0, 1.0).unwrap();
    let z0 = DVector::from_vec(vec![0.8, -0.5, 0.2, 0.9]);
    let exact = integrate(&FirstOrder::new(&g, p), &z0, &IntegrationOptions::new(0.001, 10.0, 1000)).unwrap();
    let mut errors = Vec::new();
    for alpha in [0.02f64, 0.01] {
        let mut z = z0.clone();
        for _ in 0..(10.0 / alpha).round() as usize {
            z = euler_discrete_step(&z, &g, &p, alpha).unwrap().0;
        }
        errors.push((z - exact.final_state()).amax());
    }
    assert!(errors[0] < 0.05, "{errors:?}");
    // First order in the step: halving α roughly halves the error.
    assert!((errors[0] / errors[1] - 2.0).abs() < 0.3, "{errors:?}");
}

#[test]
fn reproduce_passes_on_a_clean_example() {
    let reports = reproduce("4-l5-eps0.5").unwrap();
    assert_eq!(reports.len(), 1);
    assert!(reports[0].passed(), "{}", reports[0].render());
}

#[test]
fn unknown_examples_are_usage_errors() {
    let err = find_examples("10").unwrap_err();
    assert!(matches!(err, Error::Usage(ref m) if m.contains("1-l8")));
}
