//! Monotonicity classification from the symmetrized game map.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::game::{block_ranges, linear_game_map, tangent_basis, GameSpec};
use crate::linalg::{central_difference_jacobian, symmetric_eigenvalues};
use crate::Result;

/// Sign tolerance separating the three classes.
pub const CLASS_TOL: f64 = 1e-9;
const CLUSTER_TOL: f64 = 1e-8;
const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonotonicityClass {
    StrictlyMonotone,
    NullMonotone,
    HypoMonotone,
}

impl MonotonicityClass {
    pub fn from_lambda_max(lambda_max: f64) -> Self {
        if lambda_max < -CLASS_TOL {
            MonotonicityClass::StrictlyMonotone
        } else if lambda_max <= CLASS_TOL {
            MonotonicityClass::NullMonotone
        } else {
            MonotonicityClass::HypoMonotone
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            MonotonicityClass::StrictlyMonotone => "strictly-monotone",
            MonotonicityClass::NullMonotone => "null-monotone",
            MonotonicityClass::HypoMonotone => "hypo-monotone",
        }
    }
}

/// How the tangent eigenvalues were selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TangentRule {
    /// Eigenvalues of `Φ + Φᵀ` whose eigenspace meets the tangent space.
    EigenvectorInTangent,
    /// Spectrum of the compression `Eᵀ(Φ + Φᵀ)E`.
    Compressed,
    /// Compressed spectrum of a sampled, symmetrized payoff Jacobian.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    #[serde(rename = "eigenvalues")]
    pub tangent_eigenvalues: Vec<f64>,
    pub lambda_max: f64,
    pub mu: f64,
    pub class: MonotonicityClass,
    #[serde(rename = "exact")]
    pub exact_flag: bool,
    pub tangent_rule: TangentRule,
    /// Full spectrum of `Φ + Φᵀ`, when `Φ` is known.
    pub full_eigenvalues: Option<Vec<f64>>,
    /// Spectrum of `Eᵀ(Φ + Φᵀ)E` (or its sampled estimate).
    pub compressed_eigenvalues: Vec<f64>,
    /// `max(0, λ_max(Eᵀ(Φ + Φᵀ)E)/2)`: the smallest modulus for which the
    /// hypo-monotonicity inequality holds on the whole tangent space.
    pub mu_bound: f64,
}

/// Classifies the game.
///
/// With a linear game map, the tangent eigenvalues are the eigenvalues of
/// `Φ + Φᵀ` with an eigenvector in the tangent space (counted with the
/// dimension of that intersection). If no eigenspace meets the tangent space,
/// the compressed spectrum `Eᵀ(Φ + Φᵀ)E` is used instead. Without a map,
/// `sample_count` random interior profiles are probed with central
/// differences and the worst compressed spectrum is reported as an estimate.
pub fn classify(game: &GameSpec, sample_count: usize) -> ClassificationReport {
    let counts = game.action_counts();
    let e = tangent_basis(counts).expect("a valid game has valid action counts").full;
    match linear_game_map(game) {
        Some(phi) => {
            let s = &phi + phi.transpose();
            let full = symmetric_eigenvalues(&s);
            let compressed = symmetric_eigenvalues(&(e.transpose() * &s * &e));
            let in_tangent = eigenvalues_in_tangent(&s, counts);
            let (tangent, rule) = if in_tangent.is_empty() {
                (compressed.clone(), TangentRule::Compressed)
            } else {
                (in_tangent, TangentRule::EigenvectorInTangent)
            };
            report(tangent, rule, true, Some(full), compressed)
        }
        None => {
            let compressed = sampled_spectrum(game, &e, sample_count.max(1));
            report(compressed.clone(), TangentRule::Sampled, false, None, compressed)
        }
    }
}

fn report(
    tangent: Vec<f64>,
    rule: TangentRule,
    exact: bool,
    full: Option<Vec<f64>>,
    compressed: Vec<f64>,
) -> ClassificationReport {
    let lambda_max = tangent.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let comp_max = compressed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ClassificationReport {
        lambda_max,
        mu: (lambda_max / 2.0).max(0.0),
        class: MonotonicityClass::from_lambda_max(lambda_max),
        exact_flag: exact,
        tangent_rule: rule,
        full_eigenvalues: full,
        mu_bound: (comp_max / 2.0).max(0.0),
        compressed_eigenvalues: compressed,
        tangent_eigenvalues: tangent,
    }
}

/// Eigenvalues of the symmetric `s` whose eigenspace intersects the tangent
/// space, each repeated by the dimension of the intersection.
pub fn eigenvalues_in_tangent(s: &DMatrix<f64>, action_counts: &[usize]) -> Vec<f64> {
    let n = s.nrows();
    let eig = s.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    // Rows of `sums` take each player's block sum.
    let blocks = block_ranges(action_counts);
    let sums = DMatrix::from_fn(blocks.len(), n, |p, j| if blocks[p].contains(&j) { 1.0 } else { 0.0 });
    let scale = eig.eigenvalues.amax().max(1.0);

    let mut out = Vec::new();
    let mut start = 0;
    while start < n {
        let lam0 = eig.eigenvalues[order[start]];
        let mut end = start + 1;
        while end < n && (eig.eigenvalues[order[end]] - lam0).abs() <= CLUSTER_TOL * scale {
            end += 1;
        }
        let cols: Vec<DVector<f64>> = order[start..end]
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        let v = DMatrix::from_columns(&cols);
        let rank = (&sums * &v).rank(RANK_TOL);
        let lam = order[start..end].iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / (end - start) as f64;
        for _ in 0..(end - start).saturating_sub(rank) {
            out.push(lam);
        }
        start = end;
    }
    out
}

fn sampled_spectrum(game: &GameSpec, e: &DMatrix<f64>, samples: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let counts = game.action_counts();
    let mut worst: Option<Vec<f64>> = None;
    for _ in 0..samples {
        let mut x = DVector::zeros(game.dim());
        for r in block_ranges(counts) {
            let w: Vec<f64> = r.clone().map(|_| rng.random::<f64>() + 1e-3).collect();
            let t: f64 = w.iter().sum();
            for (i, wi) in r.zip(w) {
                x[i] = wi / t;
            }
        }
        let du = central_difference_jacobian(|y| game.payoff_vector(y), &x, 1e-5)
            .expect("dimension fixed by construction");
        let s = &du + du.transpose();
        let spec = symmetric_eigenvalues(&(e.transpose() * s * e));
        let better = match &worst {
            None => true,
            Some(w) => spec.last() > w.last(),
        };
        if better {
            worst = Some(spec);
        }
    }
    worst.unwrap_or_default()
}

/// Sampled classification that ignores any linear map; used to cross-check
/// the exact route.
pub fn classify_sampled(game: &GameSpec, sample_count: usize) -> Result<ClassificationReport> {
    let e = tangent_basis(game.action_counts())?.full;
    let compressed = sampled_spectrum(game, &e, sample_count.max(1));
    Ok(report(compressed.clone(), TangentRule::Sampled, false, None, compressed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{preset, PresetParams};

    fn game(name: &str) -> GameSpec {
        preset(name, &PresetParams::new()).unwrap()
    }

    #[test]
    fn class_thresholds() {
        assert_eq!(MonotonicityClass::from_lambda_max(-1e-3), MonotonicityClass::StrictlyMonotone);
        assert_eq!(MonotonicityClass::from_lambda_max(5e-10), MonotonicityClass::NullMonotone);
        assert_eq!(MonotonicityClass::from_lambda_max(1e-3), MonotonicityClass::HypoMonotone);
    }

    #[test]
    fn matching_pennies_is_null() {
        let r = classify(&game("matching_pennies"), 10);
        assert_eq!(r.class, MonotonicityClass::NullMonotone);
        assert_eq!(r.mu, 0.0);
        assert!(r.exact_flag);
    }

    #[test]
    fn jordan_modulus() {
        let r = classify(&game("jordan_mp"), 10);
        assert!((r.mu - 1.0).abs() < 1e-9, "{r:?}");
        let mut t = r.tangent_eigenvalues.clone();
        t.sort_by(f64::total_cmp);
        assert_eq!(t.len(), 3);
        assert!((t[0] + 4.0).abs() < 1e-9 && (t[2] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn abar_uses_eigenvector_rule() {
        let r = classify(&game("modified_rps_Abar"), 10);
        assert_eq!(r.tangent_rule, TangentRule::EigenvectorInTangent);
        assert_eq!(r.tangent_eigenvalues.len(), 1);
        assert!((r.mu - 0.5).abs() < 1e-9);
        assert!(r.mu_bound > r.mu);
    }

    #[test]
    fn anticoordination_falls_back_to_compression() {
        let r = classify(&game("anticoord123"), 10);
        assert_eq!(r.tangent_rule, TangentRule::Compressed);
        assert_eq!(r.class, MonotonicityClass::StrictlyMonotone);
    }

    #[test]
    fn sampled_matches_exact_for_bilinear() {
        let g = game("shapley");
        let exact = classify(&g, 10);
        let sampled = classify_sampled(&g, 20).unwrap();
        assert!(!sampled.exact_flag);
        for (a, b) in exact.compressed_eigenvalues.iter().zip(&sampled.compressed_eigenvalues) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}
