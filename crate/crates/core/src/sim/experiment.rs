use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::drift::{step_drift, DriftModel};
use super::player::{sample_outcome, select_opponent, Player, Strategy};
use crate::curves::check_margin;
use crate::error::{invalid_arg, Error, Result};
use crate::system::RatingSystem;
use crate::Rating;

/// ChaCha8 stream numbers; one per source of randomness so that changing
/// how one source is consumed leaves the others untouched.
pub mod streams {
    pub const INIT: u64 = 0;
    pub const DRIFT: u64 = 1;
    pub const OUTCOME: u64 = 2;
    pub const PAIRING: u64 = 3;
    pub const ESTIMATE: u64 = 4;
    pub const CHOICE: u64 = 5;
}

/// Id of the attacker; everyone else uses [`Strategy::RandomOpponent`].
pub const ATTACKER_ID: usize = 0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialDistribution {
    Uniform { lo: Rating, hi: Rating },
    Normal { mean: Rating, sd: f64 },
}

impl InitialDistribution {
    fn validate(&self) -> Result<()> {
        match *self {
            InitialDistribution::Uniform { lo, hi }
                if lo.is_finite() && hi.is_finite() && lo <= hi =>
            {
                Ok(())
            }
            InitialDistribution::Normal { mean, sd }
                if mean.is_finite() && sd >= 0.0 && sd.is_finite() =>
            {
                Ok(())
            }
            _ => Err(invalid_arg(format!(
                "invalid initial rating distribution {self:?}"
            ))),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Rating {
        match *self {
            InitialDistribution::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            InitialDistribution::Normal { mean, sd } => {
                mean + sd * rng.sample::<f64, _>(StandardNormal)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackerSpec {
    pub strategy: Strategy,
    /// Standard deviation of the attacker's per-round estimate of their own
    /// true rating; zero means exact knowledge.
    #[serde(default)]
    pub estimate_noise: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: RatingSystem,
    pub pool_size: usize,
    pub initial: InitialDistribution,
    pub attacker: AttackerSpec,
    pub rounds: usize,
    #[serde(default)]
    pub drift: DriftModel,
    #[serde(default)]
    pub seed: u64,
    /// Restricts the attacker to opponents P-close to their current rating.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<f64>,
    /// Keep every match, not only the attacker's.
    #[serde(default)]
    pub record_matches: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pool_size < 2 {
            return Err(invalid_arg(format!(
                "pool size must be at least 2, got {}",
                self.pool_size
            )));
        }
        if self.rounds < 1 {
            return Err(invalid_arg("rounds must be at least 1"));
        }
        self.initial.validate()?;
        self.drift.validate()?;
        if let Some(p) = self.band {
            check_margin(p)?;
        }
        let noise = self.attacker.estimate_noise;
        if !(noise >= 0.0 && noise.is_finite()) {
            return Err(invalid_arg(format!(
                "estimate noise must be >= 0, got {noise}"
            )));
        }
        if let Strategy::FixedOffset { offset } = self.attacker.strategy {
            if !offset.is_finite() {
                return Err(invalid_arg("fixed offset must be finite"));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&crate::config::read_text(path)?)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn with_strategy(&self, strategy: Strategy) -> Self {
        let mut c = self.clone();
        c.attacker.strategy = strategy;
        c
    }
}

/// The attacker's match in one round, as seen before the match.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackerRow {
    pub round: usize,
    pub attacker_current: Rating,
    pub attacker_true: Rating,
    pub opponent_id: Option<usize>,
    pub opponent_current: Option<Rating>,
    pub winner: Option<usize>,
    /// `α(winner, loser)`; zero when the round was skipped.
    pub transfer: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchRow {
    pub round: usize,
    pub player_a: usize,
    pub player_b: usize,
    pub winner: usize,
    pub transfer: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Mean attacker current rating over the second half of the rounds.
    pub final_half_mean: f64,
    pub final_half_true_mean: f64,
    /// `final_half_mean − final_half_true_mean`.
    pub final_half_misrating: f64,
    pub skipped_rounds: usize,
    pub matches_played: usize,
    /// Largest deviation of the pool's rating sum from its initial value.
    pub max_conservation_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// Everyone's starting rating, by id; current and true ratings start equal.
    pub initial_ratings: Vec<Rating>,
    /// Everyone's current rating after the last round, by id.
    pub final_ratings: Vec<Rating>,
    /// After each round.
    pub attacker_current: Vec<Rating>,
    pub attacker_true: Vec<Rating>,
    pub pool_mean: Vec<f64>,
    pub pool_variance: Vec<f64>,
    pub attacker_log: Vec<AttackerRow>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matches: Option<Vec<MatchRow>>,
    pub summary: Summary,
}

fn stream(seed: u64, s: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(s);
    rng
}

fn neumaier_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

struct Rngs {
    drift: ChaCha8Rng,
    outcome: ChaCha8Rng,
    pairing: ChaCha8Rng,
    estimate: ChaCha8Rng,
    choice: ChaCha8Rng,
}

/// Plays one match between pool indices `a` and `b`; returns `(winner index, transfer)`.
fn play(
    sys: &RatingSystem,
    rng: &mut ChaCha8Rng,
    pool: &mut [Player],
    a: usize,
    b: usize,
) -> Result<(usize, f64)> {
    let a_wins = sample_outcome(rng, sys, pool[a].true_rating, pool[b].true_rating)?;
    let (w, l) = if a_wins { (a, b) } else { (b, a) };
    let transfer = sys.adjustment(pool[w].current, pool[l].current)?;
    pool[w].current += transfer;
    pool[l].current -= transfer;
    Ok((w, transfer))
}

/// Runs one seeded experiment.
///
/// Each round the attacker (id 0) picks an opponent and plays; the remaining
/// players are shuffled and paired at random (an odd one out sits the round
/// out); then every true rating drifts, in id order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let sys = &config.system;
    let seed = config.seed;
    let mut init = stream(seed, streams::INIT);
    let mut rngs = Rngs {
        drift: stream(seed, streams::DRIFT),
        outcome: stream(seed, streams::OUTCOME),
        pairing: stream(seed, streams::PAIRING),
        estimate: stream(seed, streams::ESTIMATE),
        choice: stream(seed, streams::CHOICE),
    };
    let mut pool: Vec<Player> = (0..config.pool_size)
        .map(|id| {
            let strategy = if id == ATTACKER_ID {
                config.attacker.strategy
            } else {
                Strategy::RandomOpponent
            };
            Player::new(id, config.initial.sample(&mut init), strategy)
        })
        .collect();
    let initial_ratings: Vec<Rating> = pool.iter().map(|p| p.current).collect();
    let initial_sum = neumaier_sum(initial_ratings.iter().copied());

    let n_rounds = config.rounds;
    let mut attacker_current = Vec::with_capacity(n_rounds);
    let mut attacker_true = Vec::with_capacity(n_rounds);
    let mut pool_mean = Vec::with_capacity(n_rounds);
    let mut pool_variance = Vec::with_capacity(n_rounds);
    let mut attacker_log = Vec::with_capacity(n_rounds);
    let mut matches = config.record_matches.then(Vec::new);
    let mut skipped = 0;
    let mut played = 0;
    let mut max_err = 0.0f64;
    let mut others: Vec<usize> = Vec::with_capacity(config.pool_size);

    for round in 0..n_rounds {
        let me = &pool[ATTACKER_ID];
        let estimate = if config.attacker.estimate_noise > 0.0 {
            me.true_rating
                + config.attacker.estimate_noise * rngs.estimate.sample::<f64, _>(StandardNormal)
        } else {
            me.true_rating
        };
        let choice = select_opponent(&mut rngs.choice, me, &pool, sys, config.band, estimate)?;
        let mut row = AttackerRow {
            round,
            attacker_current: me.current,
            attacker_true: me.true_rating,
            opponent_id: None,
            opponent_current: None,
            winner: None,
            transfer: 0.0,
        };
        match choice {
            Some(opp) => {
                row.opponent_id = Some(pool[opp].id);
                row.opponent_current = Some(pool[opp].current);
                let (w, transfer) = play(sys, &mut rngs.outcome, &mut pool, ATTACKER_ID, opp)?;
                row.winner = Some(pool[w].id);
                row.transfer = transfer;
                played += 1;
                if let Some(m) = matches.as_mut() {
                    m.push(MatchRow {
                        round,
                        player_a: ATTACKER_ID,
                        player_b: pool[opp].id,
                        winner: pool[w].id,
                        transfer,
                    });
                }
            }
            None => {
                // Keep the outcome stream aligned with rounds that did play.
                let _: f64 = rngs.outcome.random();
                skipped += 1;
            }
        }
        attacker_log.push(row);

        others.clear();
        others.extend((0..pool.len()).filter(|&i| i != ATTACKER_ID && Some(i) != choice));
        others.shuffle(&mut rngs.pairing);
        for pair in others.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            let (w, transfer) = play(sys, &mut rngs.outcome, &mut pool, a, b)?;
            played += 1;
            if let Some(m) = matches.as_mut() {
                m.push(MatchRow {
                    round,
                    player_a: pool[a].id,
                    player_b: pool[b].id,
                    winner: pool[w].id,
                    transfer,
                });
            }
        }

        for p in pool.iter_mut() {
            p.true_rating = step_drift(&mut rngs.drift, p.true_rating, &config.drift);
        }

        let sum = neumaier_sum(pool.iter().map(|p| p.current));
        max_err = max_err.max((sum - initial_sum).abs());
        let n = pool.len() as f64;
        let mean = sum / n;
        let var = neumaier_sum(pool.iter().map(|p| (p.current - mean).powi(2))) / n;
        pool_mean.push(mean);
        pool_variance.push(var);
        attacker_current.push(pool[ATTACKER_ID].current);
        attacker_true.push(pool[ATTACKER_ID].true_rating);
    }

    let half = n_rounds / 2;
    let tail = |v: &[f64]| {
        let t = &v[half..];
        t.iter().sum::<f64>() / t.len() as f64
    };
    let final_half_mean = tail(&attacker_current);
    let final_half_true_mean = tail(&attacker_true);
    Ok(ExperimentResult {
        config: config.clone(),
        initial_ratings,
        final_ratings: pool.iter().map(|p| p.current).collect(),
        attacker_current,
        attacker_true,
        pool_mean,
        pool_variance,
        attacker_log,
        matches,
        summary: Summary {
            final_half_mean,
            final_half_true_mean,
            final_half_misrating: final_half_mean - final_half_true_mean,
            skipped_rounds: skipped,
            matches_played: played,
            max_conservation_error: max_err,
        },
    })
}

/// Runs `config` once per seed, in parallel; results come back in seed order.
pub fn run_replicates(config: &ExperimentConfig, seeds: &[u64]) -> Result<Vec<ExperimentResult>> {
    config.validate()?;
    seeds
        .par_iter()
        .map(|&s| run_experiment(&config.with_seed(s)))
        .collect::<Result<Vec<_>>>()
}

impl ExperimentResult {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(Error::from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    pub(crate) fn config(system: &str, strategy: Strategy) -> ExperimentConfig {
        ExperimentConfig {
            system: builtin::by_name(system).unwrap(),
            pool_size: 12,
            initial: InitialDistribution::Normal {
                mean: 1500.0,
                sd: 150.0,
            },
            attacker: AttackerSpec {
                strategy,
                estimate_noise: 0.0,
            },
            rounds: 400,
            drift: DriftModel::GaussianWalk { sigma_d: 20.0 },
            seed: 9,
            band: None,
            record_matches: true,
        }
    }

    #[test]
    fn single_round_two_players() {
        let mut c = config("sonas", Strategy::RandomOpponent);
        c.pool_size = 2;
        c.rounds = 1;
        let r = run_experiment(&c).unwrap();
        assert_eq!(r.matches.as_ref().unwrap().len(), 1);
        assert_eq!(r.attacker_log.len(), 1);
        assert_eq!(r.attacker_log[0].opponent_id, Some(1));
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = config("sonas", Strategy::RandomOpponent);
        c.rounds = 0;
        assert!(run_experiment(&c).is_err());
        let mut c = config("sonas", Strategy::RandomOpponent);
        c.pool_size = 1;
        assert!(run_experiment(&c).is_err());
        let mut c = config("sonas", Strategy::RandomOpponent);
        c.band = Some(0.7);
        assert!(run_experiment(&c).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let c = config("logistic", Strategy::GreedyGain);
        assert_eq!(run_experiment(&c).unwrap(), run_experiment(&c).unwrap());
        assert_ne!(
            run_experiment(&c).unwrap().attacker_current,
            run_experiment(&c.with_seed(10)).unwrap().attacker_current
        );
    }

    #[test]
    fn replicates_independent_of_thread_count() {
        let c = config("logistic-unclamped", Strategy::GreedyGain);
        let seeds = [1, 2, 3, 4];
        let a = run_replicates(&c, &seeds).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| run_replicates(&c, &seeds).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn conserves_total_rating_and_logs_exact_transfers() {
        for name in ["sonas", "logistic-unclamped", "logistic-rating-sum"] {
            let r = run_experiment(&config(name, Strategy::GreedyGain)).unwrap();
            assert!(r.summary.max_conservation_error <= 1e-9, "{name}");
            let sys = &r.config.system;
            for row in &r.attacker_log {
                let (Some(w), Some(opp)) = (row.winner, row.opponent_current) else {
                    continue;
                };
                let expect = if w == ATTACKER_ID {
                    sys.adjustment(row.attacker_current, opp).unwrap()
                } else {
                    sys.adjustment(opp, row.attacker_current).unwrap()
                };
                assert_eq!(row.transfer, expect);
            }
        }
    }

    #[test]
    fn drift_stream_is_shared_across_strategies() {
        let a = run_experiment(&config("logistic", Strategy::GreedyGain)).unwrap();
        let b = run_experiment(&config("logistic", Strategy::RandomOpponent)).unwrap();
        assert_eq!(a.attacker_true, b.attacker_true);
    }

    #[test]
    fn band_skips_rounds_when_nobody_is_close() {
        let mut c = config("sonas", Strategy::RandomOpponent);
        c.initial = InitialDistribution::Uniform {
            lo: 0.0,
            hi: 100_000.0,
        };
        c.band = Some(0.05);
        c.drift = DriftModel::None;
        let r = run_experiment(&c).unwrap();
        assert!(r.summary.skipped_rounds > 0);
        assert_eq!(
            r.summary.skipped_rounds + r.attacker_log.iter().filter(|x| x.winner.is_some()).count(),
            c.rounds
        );
    }

    #[test]
    fn config_json_round_trip() {
        let c = config("tanh", Strategy::FixedOffset { offset: -50.0 });
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
    }
}
