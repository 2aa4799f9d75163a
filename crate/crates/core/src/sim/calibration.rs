use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::experiment::ExperimentResult;
use super::player::sample_outcome;
use crate::error::{invalid_arg, Result};
use crate::system::RatingSystem;
use crate::Rating;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayerCalibration {
    pub id: usize,
    pub rating: Rating,
    pub matches: usize,
    /// Sum of the rating changes the player's matches produced.
    pub total_change: f64,
    /// `sqrt(Σ K² σ (1 − σ))`, the standard deviation of `total_change` when
    /// every expected change is zero.
    pub sd: f64,
}

impl PlayerCalibration {
    /// `total_change / sd`, or zero for a player without matches.
    pub fn z(&self) -> f64 {
        if self.sd > 0.0 {
            self.total_change / self.sd
        } else {
            0.0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub matches: usize,
    pub players: Vec<PlayerCalibration>,
}

impl CalibrationReport {
    pub fn max_abs_z(&self) -> f64 {
        self.players.iter().map(|p| p.z().abs()).fold(0.0, f64::max)
    }

    /// Every player's total change lies within `k` standard deviations of zero.
    pub fn within(&self, k: f64) -> bool {
        self.players
            .iter()
            .all(|p| p.total_change.abs() <= k * p.sd)
    }

    fn add(&mut self, w: usize, l: usize, transfer: f64, var: f64) {
        self.matches += 1;
        for (i, d) in [(w, transfer), (l, -transfer)] {
            let p = &mut self.players[i];
            p.matches += 1;
            p.total_change += d;
            p.sd += var;
        }
    }

    fn finish(mut self) -> Self {
        for p in &mut self.players {
            p.sd = p.sd.sqrt();
        }
        self
    }

    fn empty(ratings: &[Rating]) -> Self {
        Self {
            matches: 0,
            players: ratings
                .iter()
                .enumerate()
                .map(|(id, &rating)| PlayerCalibration {
                    id,
                    rating,
                    matches: 0,
                    total_change: 0.0,
                    sd: 0.0,
                })
                .collect(),
        }
    }
}

/// Plays `matches` uniformly random pairings among correctly rated players
/// whose ratings are held fixed, accumulating the change each match would
/// apply. Fairness makes every player's expected total change zero.
pub fn calibration_probe(
    sys: &RatingSystem,
    ratings: &[Rating],
    matches: usize,
    seed: u64,
) -> Result<CalibrationReport> {
    if ratings.len() < 2 {
        return Err(invalid_arg("calibration needs at least two players"));
    }
    let mut pick = ChaCha8Rng::seed_from_u64(seed);
    let mut outcome = ChaCha8Rng::seed_from_u64(seed);
    outcome.set_stream(1);
    let mut report = CalibrationReport::empty(ratings);
    let n = ratings.len();
    for _ in 0..matches {
        let a = pick.random_range(0..n);
        let b = (a + 1 + pick.random_range(0..n - 1)) % n;
        let (x, y) = (ratings[a], ratings[b]);
        let (w, l) = if sample_outcome(&mut outcome, sys, x, y)? {
            (a, b)
        } else {
            (b, a)
        };
        let s = sys.sigma(x, y)?;
        let k = sys.k(x, y);
        report.add(
            w,
            l,
            sys.adjustment(ratings[w], ratings[l])?,
            k * k * s * (1.0 - s),
        );
    }
    Ok(report.finish())
}

/// The same accounting over a finished experiment's match log. Only
/// meaningful without drift, where true ratings stay at their initial values.
pub fn live_calibration(result: &ExperimentResult) -> Result<CalibrationReport> {
    let matches = result
        .matches
        .as_ref()
        .ok_or_else(|| invalid_arg("experiment was run without record_matches"))?;
    let sys = &result.config.system;
    let truth = &result.initial_ratings;
    let mut report = CalibrationReport::empty(truth);
    for m in matches {
        let (a, b) = (m.player_a, m.player_b);
        let l = if m.winner == a { b } else { a };
        let s = sys.sigma(truth[a], truth[b])?;
        let k = sys.k(truth[a], truth[b]);
        report.add(m.winner, l, m.transfer, k * k * s * (1.0 - s));
    }
    Ok(report.finish())
}
