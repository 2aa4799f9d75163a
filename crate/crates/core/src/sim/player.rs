use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curves::p_close;
use crate::error::{invalid_arg, Result};
use crate::system::{GainQuery, RatingSystem};
use crate::Rating;

/// Gains within this distance of the best count as tied.
pub const GAIN_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Strategy {
    #[default]
    RandomOpponent,
    /// Picks the opponent with the highest expected gain, treating every
    /// opponent as correctly rated.
    GreedyGain,
    /// Picks the opponent rated nearest to `current + offset`.
    FixedOffset { offset: f64 },
}

impl Strategy {
    pub fn label(&self) -> String {
        match self {
            Strategy::RandomOpponent => "random".into(),
            Strategy::GreedyGain => "greedy".into(),
            Strategy::FixedOffset { offset } => format!("offset({offset})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Player {
    pub id: usize,
    pub current: Rating,
    pub true_rating: Rating,
    pub strategy: Strategy,
}

impl Player {
    pub fn new(id: usize, rating: Rating, strategy: Strategy) -> Self {
        Self {
            id,
            current: rating,
            true_rating: rating,
            strategy,
        }
    }
}

/// Draws one uniform `u ∈ [0, 1)`; the first player wins iff `u < σ(x*, y*)`.
pub fn sample_outcome<R: Rng + ?Sized>(
    rng: &mut R,
    sys: &RatingSystem,
    x_star: Rating,
    y_star: Rating,
) -> Result<bool> {
    let s = sys.sigma(x_star, y_star)?;
    let u: f64 = rng.random();
    Ok(u < s)
}

/// Chooses an opponent for `chooser` from `pool` and returns its index.
///
/// With a band, only opponents whose current rating is P-close to the
/// chooser's current rating are eligible. `estimate` is the chooser's belief
/// about their own true rating, used by [`Strategy::GreedyGain`]. Ties go to
/// the lowest id. Returns `None` when nobody is eligible.
pub fn select_opponent<R: Rng + ?Sized>(
    rng: &mut R,
    chooser: &Player,
    pool: &[Player],
    sys: &RatingSystem,
    band: Option<f64>,
    estimate: Rating,
) -> Result<Option<usize>> {
    let mut eligible = Vec::with_capacity(pool.len());
    for (i, p) in pool.iter().enumerate() {
        if p.id == chooser.id {
            continue;
        }
        if let Some(b) = band {
            if !p_close(sys.curve(), chooser.current, p.current, b)? {
                continue;
            }
        }
        eligible.push(i);
    }
    if eligible.is_empty() {
        return Ok(None);
    }
    eligible.sort_by_key(|&i| pool[i].id);
    let pick = match chooser.strategy {
        Strategy::RandomOpponent => eligible[rng.random_range(0..eligible.len())],
        Strategy::GreedyGain => {
            let gains = eligible
                .iter()
                .map(|&i| {
                    sys.expected_gain(&GainQuery::against_correct(
                        chooser.current,
                        estimate,
                        pool[i].current,
                    ))
                })
                .collect::<Result<Vec<f64>>>()?;
            let best = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let at = gains
                .iter()
                .position(|&g| g >= best - GAIN_TIE_TOLERANCE)
                .ok_or_else(|| invalid_arg("expected gain is NaN for every opponent"))?;
            eligible[at]
        }
        Strategy::FixedOffset { offset } => {
            let target = chooser.current + offset;
            let mut best = eligible[0];
            for &i in &eligible[1..] {
                if (pool[i].current - target).abs() < (pool[best].current - target).abs() {
                    best = i;
                }
            }
            best
        }
    };
    Ok(Some(pick))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pool(ratings: &[f64]) -> Vec<Player> {
        ratings
            .iter()
            .enumerate()
            .map(|(i, &r)| Player::new(i + 1, r, Strategy::RandomOpponent))
            .collect()
    }

    fn win_rate(sys: &RatingSystem, xs: f64, ys: f64, n: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let wins = (0..n)
            .filter(|_| sample_outcome(&mut rng, sys, xs, ys).unwrap())
            .count();
        wins as f64 / n as f64
    }

    #[test]
    fn outcome_rates_match_sigma() {
        let n = 100_000;
        let three_sd = |p: f64| 3.0 * (p * (1.0 - p) / n as f64).sqrt();
        let sonas = builtin::by_name("sonas").unwrap();
        assert!((win_rate(&sonas, 1500.0, 1500.0, n) - 0.5).abs() < three_sd(0.5));
        assert!((win_rate(&sonas, 1700.0, 1500.0, n) - 0.7).abs() < three_sd(0.7));
    }

    #[test]
    fn certain_outcome_always_wins() {
        let curve = crate::curves::SkillCurve::sonas(0.00125, 400.0).unwrap();
        let sys = RatingSystem::new(curve, crate::system::KFunction::Constant(32.0));
        assert_eq!(sys.sigma(2000.0, 1000.0).unwrap(), 1.0);
        assert_eq!(win_rate(&sys, 2000.0, 1000.0, 10_000), 1.0);
    }

    #[test]
    fn greedy_elo_picks_midpoint() {
        let sys = builtin::by_name("logistic-unclamped").unwrap();
        let ratings: Vec<f64> = (0..=60).map(|i| 1300.0 + 10.0 * i as f64).collect();
        let pool = pool(&ratings);
        let me = Player {
            id: 0,
            current: 1500.0,
            true_rating: 1700.0,
            strategy: Strategy::GreedyGain,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let i = select_opponent(&mut rng, &me, &pool, &sys, None, 1700.0)
            .unwrap()
            .unwrap();
        assert_eq!(pool[i].current, 1600.0);
    }

    #[test]
    fn greedy_sonas_in_band_takes_lowest_id() {
        let sys = builtin::by_name("sonas").unwrap();
        let pool = pool(&[1450.0, 1700.0, 1300.0, 1560.0, 2300.0]);
        let me = Player {
            id: 0,
            current: 1500.0,
            true_rating: 1600.0,
            strategy: Strategy::GreedyGain,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let i = select_opponent(&mut rng, &me, &pool, &sys, Some(0.3), 1600.0)
            .unwrap()
            .unwrap();
        assert_eq!(pool[i].id, 1);
        // Unbanded, the saturated opponent at 2300 offers no gain.
        let i = select_opponent(&mut rng, &me, &pool[3..], &sys, None, 1600.0)
            .unwrap()
            .unwrap();
        assert_eq!(pool[3 + i].id, 4);
    }

    #[test]
    fn band_can_empty_the_pool() {
        let sys = builtin::by_name("sonas").unwrap();
        let pool = pool(&[2500.0]);
        let me = Player::new(0, 1500.0, Strategy::RandomOpponent);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            select_opponent(&mut rng, &me, &pool, &sys, Some(0.3), 1500.0).unwrap(),
            None
        );
    }

    #[test]
    fn fixed_offset_picks_nearest() {
        let sys = builtin::by_name("sonas").unwrap();
        let pool = pool(&[1400.0, 1590.0, 1610.0, 1800.0]);
        let me = Player::new(0, 1500.0, Strategy::FixedOffset { offset: 100.0 });
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let i = select_opponent(&mut rng, &me, &pool, &sys, None, 1500.0)
            .unwrap()
            .unwrap();
        assert_eq!(pool[i].id, 2);
    }

    #[test]
    fn random_choice_is_reproducible() {
        let sys = builtin::by_name("sonas").unwrap();
        let pool = pool(&[1400.0, 1450.0, 1500.0, 1550.0, 1600.0]);
        let me = Player::new(0, 1500.0, Strategy::RandomOpponent);
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|_| {
                    select_opponent(&mut rng, &me, &pool, &sys, None, 1500.0)
                        .unwrap()
                        .unwrap()
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }
}
