use std::path::{Path, PathBuf};

use gamedyn::analysis::{bifurcation_epsilon, classify, rest_points, RestPointOptions};
use gamedyn::dynamics::{EstimatorMode, FeedbackBlock, FirstOrderParams};
use gamedyn::experiment::{example_ids, reproduce, simulate, ExperimentConfig, GameSource, Scheme};
use gamedyn::presets::{preset_summary, PRESET_NAMES};
use gamedyn::{Error, PresetParams, Result};
use serde::Serialize;

use crate::args::{ContinuousScheme, EstimatorArg, GameArgs, OutputArgs, SchemeArg, SimulateArgs};

pub const OUT_ENV: &str = "GAMEDYN_OUT";

/// What a command leaves behind: the text for standard output and whether
/// every check it ran passed.
pub struct Outcome {
    pub stdout: String,
    pub passed: bool,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, passed: true }
    }
}

pub fn game_source(args: &GameArgs) -> Result<GameSource> {
    match (&args.preset, &args.game) {
        (Some(name), None) => {
            let mut params = PresetParams::new();
            for p in &args.params {
                params.parse_assignment(p)?;
            }
            Ok(GameSource::Preset { name: name.clone(), params })
        }
        (None, Some(path)) if args.params.is_empty() => Ok(GameSource::File(path.clone())),
        (None, Some(_)) => Err(Error::Usage("--param applies to presets only".into())),
        _ => Err(Error::Usage("give exactly one of --preset or --game".into())),
    }
}

/// The environment variable wins over the flag.
pub fn out_dir(args: &OutputArgs) -> Option<PathBuf> {
    match std::env::var_os(OUT_ENV) {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => args.out.clone(),
    }
}

fn to_json(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))? + "\n")
}

fn save(dir: Option<&Path>, name: &str, text: &str) -> Result<()> {
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}

pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::Usage(format!("cannot parse seeds {text:?}; use e.g. 0,1,2 or 0..10"));
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                if a >= b {
                    return Err(bad());
                }
                seeds.extend(a..b);
            }
            None => seeds.push(part.parse().map_err(|_| bad())?),
        }
    }
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

pub fn cmd_classify(game: &GameArgs, samples: usize, output: &OutputArgs) -> Result<Outcome> {
    let source = game_source(game)?;
    let report = classify(&source.build()?, samples);
    let text = to_json(&report)?;
    save(out_dir(output).as_deref(), &format!("{}_classify.json", source.label()), &text)?;
    Ok(Outcome::ok(text))
}

pub fn cmd_solve(game: &GameArgs, eps: f64, starts: usize, seed: u64, output: &OutputArgs) -> Result<Outcome> {
    let source = game_source(game)?;
    let found = rest_points(&source.build()?, eps, &RestPointOptions::default(), starts, seed)?;
    let values: Vec<_> = found.iter().map(|r| r.to_json()).collect();
    let text = to_json(&serde_json::json!({ "eps": eps, "rest_points": values }))?;
    save(out_dir(output).as_deref(), &format!("{}_rest_eps{eps}.json", source.label()), &text)?;
    Ok(Outcome::ok(text))
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Outcome> {
    let mut config = ExperimentConfig::new(game_source(&args.game)?);
    config.scheme = match args.scheme {
        SchemeArg::FirstOrder => Scheme::FirstOrder,
        SchemeArg::HigherOrder => Scheme::HigherOrder,
        SchemeArg::Discrete => Scheme::Discrete,
        SchemeArg::Stochastic => Scheme::Stochastic,
    };
    config.eps = args.eps;
    config.gamma = args.gamma;
    config.k = args.k;
    config.a = args.a;
    config.dt = args.dt;
    config.t_end = args.t_end;
    config.record_every = args.record_every;
    config.seeds = parse_seeds(&args.seeds)?;
    config.out_dir = out_dir(&args.output);
    config.emit_ternary = args.emit_ternary;
    config.alpha = args.alpha;
    config.stochastic_steps = args.steps;
    config.estimator = match args.estimator {
        EstimatorArg::FullInfo => EstimatorMode::FullInfo,
        EstimatorArg::Bandit => EstimatorMode::Bandit,
    };
    let summary = simulate(&config)?;
    Ok(Outcome::ok(to_json(&summary)?))
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_bifurcation(
    game: &GameArgs,
    scheme: ContinuousScheme,
    gamma: f64,
    k: f64,
    a: f64,
    range: (f64, f64),
    tol: f64,
    output: &OutputArgs,
) -> Result<Outcome> {
    let source = game_source(game)?;
    let g = source.build()?;
    let params = FirstOrderParams::new(gamma, range.1)?;
    let block = match scheme {
        ContinuousScheme::FirstOrder => None,
        ContinuousScheme::HigherOrder => Some(FeedbackBlock::high_pass(k, a, g.dim())?),
    };
    let result = bifurcation_epsilon(&g, &params, block.as_ref(), range, tol)?;
    let text = to_json(&result)?;
    let name = match scheme {
        ContinuousScheme::FirstOrder => "first-order",
        ContinuousScheme::HigherOrder => "higher-order",
    };
    save(out_dir(output).as_deref(), &format!("{}_bifurcation_{name}.json", source.label()), &text)?;
    Ok(Outcome::ok(text))
}

pub fn cmd_reproduce(id: &str, json: bool, output: &OutputArgs) -> Result<Outcome> {
    let reports = reproduce(id)?;
    let passed = reports.iter().all(|r| r.passed());
    let json_text = to_json(&reports)?;
    save(out_dir(output).as_deref(), &format!("reproduce_{id}.json"), &json_text)?;
    let stdout = if json {
        json_text
    } else {
        let mut s: String = reports.iter().map(|r| r.render()).collect();
        s.push_str(if passed { "all checks passed\n" } else { "some checks failed\n" });
        s
    };
    Ok(Outcome { stdout, passed })
}

pub fn cmd_list_games() -> Outcome {
    let mut s = String::from("presets:\n");
    for name in PRESET_NAMES {
        s.push_str(&format!("  {name:<21} {}\n", preset_summary(name).unwrap_or("")));
    }
    s.push_str("examples:\n  ");
    s.push_str(&example_ids().join(" "));
    s.push('\n');
    Outcome::ok(s)
}
