use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::experiment::ExperimentResult;
use crate::error::{invalid_arg, Result};

pub const BOOTSTRAP_RESAMPLES: usize = 10_000;
pub const BOOTSTRAP_SEED: u64 = 0x5eed_b007;
pub const CONFIDENCE: f64 = 0.95;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Advantage {
    /// Mean over seeds of the paired difference in final-half attacker rating.
    pub delta: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    pub resamples: usize,
    /// `(seed, strategic − baseline)` in seed order.
    pub per_seed: Vec<(u64, f64)>,
}

impl Advantage {
    pub fn ci_contains_zero(&self) -> bool {
        self.ci_low <= 0.0 && 0.0 <= self.ci_high
    }

    pub fn ci_strictly_positive(&self) -> bool {
        self.ci_low > 0.0
    }
}

/// Percentile bootstrap of the mean of `xs`, resampling whole entries.
pub fn bootstrap_mean_ci(xs: &[f64], resamples: usize, seed: u64, confidence: f64) -> (f64, f64) {
    let n = xs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| xs[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let alpha = (1.0 - confidence) / 2.0;
    let idx = |q: f64| ((q * (resamples - 1) as f64).round() as usize).min(resamples - 1);
    (means[idx(alpha)], means[idx(1.0 - alpha)])
}

/// Paired comparison of a strategic arm against a baseline arm.
///
/// Both arms must use the same seeds and configurations that differ only in
/// the attacker's strategy; results are paired by seed.
pub fn strategic_advantage(
    strategic: &[ExperimentResult],
    baseline: &[ExperimentResult],
) -> Result<Advantage> {
    if strategic.is_empty() {
        return Err(invalid_arg("no strategic results"));
    }
    let mut s: Vec<&ExperimentResult> = strategic.iter().collect();
    let mut b: Vec<&ExperimentResult> = baseline.iter().collect();
    s.sort_by_key(|r| r.config.seed);
    b.sort_by_key(|r| r.config.seed);
    let seeds = |v: &[&ExperimentResult]| v.iter().map(|r| r.config.seed).collect::<Vec<_>>();
    if seeds(&s) != seeds(&b) {
        return Err(invalid_arg(
            "strategic and baseline runs use different seeds",
        ));
    }
    let mut per_seed = Vec::with_capacity(s.len());
    for (x, y) in s.iter().zip(&b) {
        let normalised = y.config.with_strategy(x.config.attacker.strategy);
        if x.config != normalised {
            return Err(invalid_arg(format!(
                "configurations for seed {} differ in more than the attacker's strategy",
                x.config.seed
            )));
        }
        per_seed.push((
            x.config.seed,
            x.summary.final_half_mean - y.summary.final_half_mean,
        ));
    }
    let diffs: Vec<f64> = per_seed.iter().map(|p| p.1).collect();
    let delta = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let (ci_low, ci_high) =
        bootstrap_mean_ci(&diffs, BOOTSTRAP_RESAMPLES, BOOTSTRAP_SEED, CONFIDENCE);
    Ok(Advantage {
        delta,
        ci_low,
        ci_high,
        confidence: CONFIDENCE,
        resamples: BOOTSTRAP_RESAMPLES,
        per_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::sim::{
        run_replicates, AttackerSpec, DriftModel, ExperimentConfig, InitialDistribution, Strategy,
    };

    fn cfg(strategy: Strategy) -> ExperimentConfig {
        ExperimentConfig {
            system: builtin::by_name("logistic").unwrap(),
            pool_size: 6,
            initial: InitialDistribution::Uniform {
                lo: 1400.0,
                hi: 1600.0,
            },
            attacker: AttackerSpec {
                strategy,
                estimate_noise: 0.0,
            },
            rounds: 50,
            drift: DriftModel::GaussianWalk { sigma_d: 5.0 },
            seed: 0,
            band: None,
            record_matches: false,
        }
    }

    #[test]
    fn identical_arms_give_zero() {
        let r = run_replicates(&cfg(Strategy::GreedyGain), &[1, 2, 3]).unwrap();
        let a = strategic_advantage(&r, &r).unwrap();
        assert_eq!(a.delta, 0.0);
        assert!(a.ci_contains_zero());
        assert!(!a.ci_strictly_positive());
    }

    #[test]
    fn mismatches_are_rejected() {
        let s = run_replicates(&cfg(Strategy::GreedyGain), &[1, 2]).unwrap();
        let b = run_replicates(&cfg(Strategy::RandomOpponent), &[1, 3]).unwrap();
        assert!(strategic_advantage(&s, &b).is_err());
        let mut other = cfg(Strategy::RandomOpponent);
        other.rounds = 60;
        let b = run_replicates(&other, &[1, 2]).unwrap();
        assert!(strategic_advantage(&s, &b).is_err());
        let b = run_replicates(&cfg(Strategy::RandomOpponent), &[2, 1]).unwrap();
        assert!(strategic_advantage(&s, &b).is_ok());
    }

    #[test]
    fn bootstrap_brackets_the_mean() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let (lo, hi) = bootstrap_mean_ci(&xs, 10_000, 1, 0.95);
        assert!(lo < 9.5 && 9.5 < hi);
        assert_eq!(bootstrap_mean_ci(&xs, 10_000, 1, 0.95), (lo, hi));
    }
}
