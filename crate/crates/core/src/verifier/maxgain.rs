use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Result};
use crate::system::{GainQuery, RatingSystem};
use crate::Rating;

const GOLDEN_ITERATIONS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaxGain {
    /// The opponent rating maximising `|γ(x, x* | y, y)|`, with the signed gain there.
    Opponent { rating: Rating, gain: f64 },
    /// `|γ|` varies by less than the tolerance over the search interval.
    Indifferent { gain: f64 },
}

impl MaxGain {
    pub fn rating(&self) -> Option<Rating> {
        match self {
            MaxGain::Opponent { rating, .. } => Some(*rating),
            MaxGain::Indifferent { .. } => None,
        }
    }
}

/// Best correctly-rated opponent for a player at `x` whose true rating is `x_star`.
///
/// Scans `[lo, hi]` at `resolution`, then refines inside the best cell by
/// golden-section search. Ties on the scan go to the lowest rating.
pub fn find_max_gain_opponent(
    sys: &RatingSystem,
    x: Rating,
    x_star: Rating,
    (lo, hi): (Rating, Rating),
    resolution: f64,
    tol: f64,
) -> Result<MaxGain> {
    if !(lo < hi) || !(resolution > 0.0) {
        return Err(invalid_arg(format!(
            "search needs lo < hi and resolution > 0, got ({lo}, {hi}) at {resolution}"
        )));
    }
    let mid = (x + x_star) / 2.0;
    if !(lo..=hi).contains(&mid) {
        return Err(invalid_arg(format!(
            "search interval ({lo}, {hi}) must contain {mid}"
        )));
    }
    let gain = |y: Rating| sys.expected_gain(&GainQuery::against_correct(x, x_star, y));
    let steps = ((hi - lo) / resolution).ceil() as usize;
    let mut best: Option<(Rating, f64)> = None;
    let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=steps {
        let y = if i == steps {
            hi
        } else {
            lo + i as f64 * resolution
        };
        let v = gain(y)?.abs();
        vmin = vmin.min(v);
        vmax = vmax.max(v);
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((y, v));
        }
    }
    let (y0, _) = best.expect("at least one sample");
    if vmax - vmin < tol {
        return Ok(MaxGain::Indifferent { gain: gain(y0)? });
    }

    let (mut a, mut b) = ((y0 - resolution).max(lo), (y0 + resolution).min(hi));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (gain(c)?.abs(), gain(d)?.abs());
    for _ in 0..GOLDEN_ITERATIONS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = gain(c)?.abs();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = gain(d)?.abs();
        }
        if b - a < 1e-9 * (1.0 + a.abs()) {
            break;
        }
    }
    let refined = (a + b) / 2.0;
    let rating = if gain(refined)?.abs() >= gain(y0)?.abs() {
        refined
    } else {
        y0
    };
    Ok(MaxGain::Opponent {
        rating,
        gain: gain(rating)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn elo_midpoint() {
        let s = builtin::by_name("logistic-unclamped").unwrap();
        let m = find_max_gain_opponent(&s, 1500.0, 1700.0, (1400.0, 1800.0), 1.0, 1e-9).unwrap();
        let y = m.rating().unwrap();
        assert!((y - 1600.0).abs() <= 1.0, "{y}");
        // Brute-force argmax at 0.01 resolution agrees.
        let mut best = (0.0, f64::NEG_INFINITY);
        for i in 0..=40_000 {
            let y = 1400.0 + i as f64 * 0.01;
            let g = s
                .expected_gain(&GainQuery::against_correct(1500.0, 1700.0, y))
                .unwrap();
            if g > best.1 {
                best = (y, g);
            }
        }
        assert!((best.0 - 1600.0).abs() < 0.011);
        if let MaxGain::Opponent { gain, .. } = m {
            // 32 (σ(1700, 1600) − σ(1500, 1600)) via mpmath.
            assert!((gain - 8.964_159_987_384_645).abs() < 1e-9);
        }
    }

    #[test]
    fn sonas_in_band_is_indifferent() {
        let s = builtin::by_name("sonas").unwrap();
        let m = find_max_gain_opponent(&s, 1500.0, 1600.0, (1300.0, 1800.0), 5.0, 1e-9).unwrap();
        match m {
            MaxGain::Indifferent { gain } => assert!((gain - 3.2).abs() < 1e-12),
            other => panic!("expected indifference, got {other:?}"),
        }
    }

    #[test]
    fn correctly_rated_player_is_indifferent() {
        let s = builtin::by_name("logistic").unwrap();
        let m = find_max_gain_opponent(&s, 1500.0, 1500.0, (1000.0, 2000.0), 10.0, 1e-12).unwrap();
        assert_eq!(m, MaxGain::Indifferent { gain: 0.0 });
    }

    #[test]
    fn interval_must_contain_midpoint() {
        let s = builtin::by_name("logistic").unwrap();
        assert!(find_max_gain_opponent(&s, 1500.0, 1700.0, (1650.0, 1800.0), 1.0, 1e-9).is_err());
        assert!(find_max_gain_opponent(&s, 1500.0, 1700.0, (1800.0, 1400.0), 1.0, 1e-9).is_err());
    }
}
