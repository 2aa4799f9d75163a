//! Skill chains: ascending ratings each beating the previous with
//! probability at least `p`.
//!
//! On a separable curve the links telescope, so a chain `r_1 < … < r_N`
//! with `σ(r_i, r_{i−1}) = p` satisfies `σ(r_N, r_1) = (N − 1) p − (N − 2) / 2`.
//! Because `σ ≤ 1`, such a chain has at most `⌊2p / (2p − 1)⌋` ratings.

use serde::{Deserialize, Serialize};

use super::report::{CheckParams, Property, PropertyReport, Witness};
use crate::curves::SkillCurve;
use crate::error::{invalid_arg, Result};
use crate::Rating;

pub const BISECTION_ITERATIONS: usize = 60;
/// Links are accepted at `σ ≥ p − LINK_SLACK` so that exact-`p` links are
/// found despite rounding in σ.
pub const LINK_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainTermination {
    /// Stopped at `⌊2p / (2p − 1)⌋` ratings because the caller asked to.
    BoundReached,
    /// No rating below the ceiling beats the last link with probability `p`.
    CurveSaturated,
    /// The requested number of ratings was reached.
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainResult {
    pub p: f64,
    pub ratings: Vec<Rating>,
    /// `achieved[i] = σ(r_{i+1}, r_i)`; one shorter than `ratings`.
    pub achieved: Vec<f64>,
    pub terminated_reason: ChainTermination,
    pub ceiling: Rating,
    /// `⌊2p / (2p − 1)⌋`.
    pub bound: usize,
    /// `(N − 1) p − (N − 2) / 2` for each prefix length `N`, reported for
    /// structurally separable curves only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub predicted: Option<Vec<f64>>,
}

impl ChainResult {
    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainOptions {
    /// Maximum number of ratings in the chain, including `r_1`.
    pub budget: usize,
    /// Highest rating the bisection may propose.
    pub ceiling: Rating,
    pub stop_at_bound: bool,
}

impl ChainOptions {
    pub fn new(budget: usize, ceiling: Rating) -> Self {
        Self {
            budget,
            ceiling,
            stop_at_bound: false,
        }
    }
}

/// `⌊2p / (2p − 1)⌋`, with a small allowance so that exact integers such as
/// `p = 0.6 → 6` survive binary rounding.
pub fn chain_bound(p: f64) -> usize {
    (2.0 * p / (2.0 * p - 1.0) + 1e-9).floor() as usize
}

/// `σ(r_N, r_1)` on a separable curve whose links are all exactly `p`.
pub fn predicted_span(p: f64, n: usize) -> f64 {
    let n = n as f64;
    (n - 1.0) * p - (n - 2.0) / 2.0
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.5 && p < 1.0 {
        Ok(())
    } else {
        Err(invalid_arg(format!(
            "chain probability must lie in (0.5, 1), got {p}"
        )))
    }
}

/// Greedily extends `r_1` by the smallest rating achieving `σ(r, r_prev) ≥ p`.
pub fn build_skill_chain(
    curve: &SkillCurve,
    p: f64,
    r1: Rating,
    opts: &ChainOptions,
) -> Result<ChainResult> {
    check_p(p)?;
    if opts.budget == 0 {
        return Err(invalid_arg("chain budget must be at least 1"));
    }
    if !(r1.is_finite() && opts.ceiling.is_finite() && opts.ceiling >= r1) {
        return Err(invalid_arg(format!(
            "chain start {r1} must be finite and not above the ceiling {}",
            opts.ceiling
        )));
    }
    let bound = chain_bound(p);
    let target = p - LINK_SLACK;
    let mut ratings = vec![r1];
    let mut achieved = Vec::new();
    let reason = loop {
        if ratings.len() >= opts.budget {
            break ChainTermination::BudgetExhausted;
        }
        if opts.stop_at_bound && ratings.len() >= bound {
            break ChainTermination::BoundReached;
        }
        let prev = *ratings.last().unwrap();
        if curve.eval(opts.ceiling, prev)? < target {
            break ChainTermination::CurveSaturated;
        }
        let (mut lo, mut hi) = (prev, opts.ceiling);
        for _ in 0..BISECTION_ITERATIONS {
            let mid = lo + (hi - lo) / 2.0;
            if curve.eval(mid, prev)? >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if !(hi > prev) {
            break ChainTermination::CurveSaturated;
        }
        achieved.push(curve.eval(hi, prev)?);
        ratings.push(hi);
    };
    let predicted = curve
        .is_structurally_separable()
        .then(|| (1..=ratings.len()).map(|n| predicted_span(p, n)).collect());
    Ok(ChainResult {
        p,
        ratings,
        achieved,
        terminated_reason: reason,
        ceiling: opts.ceiling,
        bound,
        predicted,
    })
}

/// Compares `σ(r_N, r_1)` with `(N − 1) p − (N − 2) / 2` for every prefix.
///
/// A mismatch refutes the identity for this curve. A full match is only a
/// certificate on structurally separable curves; elsewhere it is reported as
/// inconclusive.
pub fn verify_chain_identity(
    curve: &SkillCurve,
    chain: &ChainResult,
    tol: f64,
) -> Result<PropertyReport> {
    let params = CheckParams {
        p: Some(chain.p),
        tolerance: tol,
        grid: None,
        form: None,
    };
    let r1 = chain.ratings[0];
    let mut worst: Option<(f64, usize)> = None;
    for (i, &rn) in chain.ratings.iter().enumerate() {
        let n = i + 1;
        let r = (curve.eval(rn, r1)? - predicted_span(chain.p, n)).abs();
        let r = if r.is_nan() { f64::INFINITY } else { r };
        if worst.is_none_or(|(w, _)| r > w) {
            worst = Some((r, n));
        }
    }
    let (residual, n) = worst.expect("chain has at least one rating");
    let witness = Witness::new(&[
        ("n", n as f64),
        ("r_n", chain.ratings[n - 1]),
        ("r_1", r1),
        ("predicted", predicted_span(chain.p, n)),
    ]);
    let report = PropertyReport::new(Property::ChainIdentity, params)
        .decide(residual, Some(witness))
        .metric("length", chain.len() as f64)
        .metric("bound", chain.bound as f64);
    if report.holds() && !curve.is_structurally_separable() {
        let mut r =
            report.with_note("identity matched, but the curve is not separable by construction");
        r.verdict = super::report::Verdict::Inconclusive;
        return Ok(r);
    }
    Ok(report)
}

/// Full scale on the search region: holds when the chain reaches its budget
/// below the ceiling, refuted when it saturates first.
pub fn check_full_scale(
    curve: &SkillCurve,
    p: f64,
    r1: Rating,
    opts: &ChainOptions,
) -> Result<PropertyReport> {
    let chain = build_skill_chain(curve, p, r1, opts)?;
    let params = CheckParams {
        p: Some(p),
        tolerance: 0.0,
        grid: None,
        form: None,
    };
    let report = PropertyReport::new(Property::FullScale, params);
    let last = *chain.ratings.last().unwrap();
    let report = match chain.terminated_reason {
        ChainTermination::CurveSaturated => {
            let gap = p - curve.eval(opts.ceiling, last)?;
            let witness = Witness::new(&[("r_last", last), ("ceiling", opts.ceiling), ("p", p)]);
            report.decide(gap, Some(witness))
        }
        _ => report.decide(0.0, None),
    };
    Ok(report
        .metric("length", chain.len() as f64)
        .metric("budget", opts.budget as f64)
        .metric("last", last))
}
