//! Seeded Monte-Carlo experiments on a pool of players with hidden true
//! ratings.
//!
//! One player, the attacker, chooses opponents by a [`Strategy`]; everyone
//! else is paired at random. Comparing a strategic attacker with a random
//! one under identical seeds measures how much rating opponent selection
//! buys ([`strategic_advantage`]).

mod calibration;
mod drift;
mod experiment;
pub mod output;
mod player;
mod stats;

pub use calibration::{calibration_probe, live_calibration, CalibrationReport, PlayerCalibration};
pub use drift::{step_drift, DriftModel};
pub use experiment::{
    run_experiment, run_replicates, streams, AttackerRow, AttackerSpec, ExperimentConfig,
    ExperimentResult, InitialDistribution, MatchRow, Summary, ATTACKER_ID,
};
pub use player::{sample_outcome, select_opponent, Player, Strategy, GAIN_TIE_TOLERANCE};
pub use stats::{
    bootstrap_mean_ci, strategic_advantage, Advantage, BOOTSTRAP_RESAMPLES, BOOTSTRAP_SEED,
    CONFIDENCE,
};
