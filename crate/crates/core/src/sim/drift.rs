use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Result};
use crate::Rating;

/// How true ratings move between rounds.
///
/// Normal variates come from `rand_distr::StandardNormal`, which uses the
/// Ziggurat method. Walk models draw exactly one variate per call, even when
/// `sigma_d` is zero, so every arm of an experiment consumes the drift stream
/// identically.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriftModel {
    #[default]
    None,
    GaussianWalk {
        sigma_d: f64,
    },
    /// `true ← true + κ (anchor − true) + N(0, σ_d²)`.
    MeanReverting {
        kappa: f64,
        anchor: Rating,
        sigma_d: f64,
    },
}

impl DriftModel {
    pub fn validate(&self) -> Result<()> {
        let sd_ok = |s: f64| s >= 0.0 && s.is_finite();
        match *self {
            DriftModel::None => Ok(()),
            DriftModel::GaussianWalk { sigma_d } if sd_ok(sigma_d) => Ok(()),
            DriftModel::MeanReverting {
                kappa,
                anchor,
                sigma_d,
            } if sd_ok(sigma_d) && kappa > 0.0 && kappa <= 1.0 && anchor.is_finite() => Ok(()),
            _ => Err(invalid_arg(format!(
                "drift needs sigma_d >= 0 and kappa in (0, 1], got {self:?}"
            ))),
        }
    }
}

pub fn step_drift<R: Rng + ?Sized>(rng: &mut R, true_rating: Rating, model: &DriftModel) -> Rating {
    match *model {
        DriftModel::None => true_rating,
        DriftModel::GaussianWalk { sigma_d } => {
            let z: f64 = rng.sample(StandardNormal);
            true_rating + sigma_d * z
        }
        DriftModel::MeanReverting {
            kappa,
            anchor,
            sigma_d,
        } => {
            let z: f64 = rng.sample(StandardNormal);
            // Written as a convex combination so that κ = 1 lands on the anchor exactly.
            (1.0 - kappa) * true_rating + kappa * anchor + sigma_d * z
        }
    }
}
