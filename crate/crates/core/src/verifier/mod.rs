//! Grid-based decision procedures.
//!
//! A check either finds a violation larger than its tolerance (refuted, with
//! a witness that can be re-evaluated in isolation) or certifies that none
//! exists on the grid (holds). "Holds" is a bounded statement about the grid
//! at that tolerance, not a proof; every report records the grid it used.

mod chain;
mod characterize;
mod checks;
mod dispatch;
mod grid;
mod maxgain;
mod report;

pub use chain::{
    build_skill_chain, chain_bound, check_full_scale, predicted_span, verify_chain_identity,
    ChainOptions, ChainResult, ChainTermination, BISECTION_ITERATIONS, LINK_SLACK,
};
pub use characterize::{cross_check_characterization, CrossCheck};
pub use checks::{
    check_bisector_linear, check_draw_free, check_fairness, check_opponent_indifference,
    check_p_constant_k, check_p_opponent_indifference, check_p_separable, check_strong_oi,
    check_translation_invariance, default_tolerance, witness_residual, CheckOptions,
    ANALYTIC_TOLERANCE, TABULATED_TOLERANCE,
};
pub use dispatch::run_property;
pub use grid::{Grid, DEFAULT_MAX_POINTS, DEFAULT_TUPLE_BUDGET};
pub use maxgain::{find_max_gain_opponent, MaxGain};
pub use report::{CheckParams, PForm, Property, PropertyReport, Verdict, Witness};
