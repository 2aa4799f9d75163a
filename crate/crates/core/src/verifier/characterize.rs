use serde::{Deserialize, Serialize};

use super::checks::{
    check_bisector_linear, check_p_constant_k, check_p_opponent_indifference, check_p_separable,
    check_strong_oi, CheckOptions,
};
use super::grid::Grid;
use super::report::{CheckParams, Property, PropertyReport, Verdict};
use crate::error::Result;
use crate::system::RatingSystem;

/// The characterization cross-check together with every component report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub report: PropertyReport,
    pub components: Vec<PropertyReport>,
}

impl CrossCheck {
    pub fn component(&self, p: Property) -> Option<&PropertyReport> {
        self.components.iter().find(|r| r.property == p)
    }
}

fn flag(v: bool) -> f64 {
    if v {
        1.0
    } else {
        0.0
    }
}

/// Evaluates both sides of two biconditionals independently and checks
/// that they agree:
///
/// - P opponent indifference ⇔ P separable ∧ P-constant K;
/// - strong P opponent indifference ⇔ P separable with a linear bisector ∧
///   P-constant K.
///
/// Disagreement means an implementation defect. Systems that are trivial on
/// the grid, and component checks that are themselves inconclusive, give an
/// inconclusive verdict.
pub fn cross_check_characterization(
    sys: &RatingSystem,
    p: f64,
    grid: &Grid,
    opts: &CheckOptions,
) -> Result<CrossCheck> {
    let params = CheckParams {
        p: Some(p),
        tolerance: opts.tolerance,
        grid: Some(*grid),
        form: Some(opts.form),
    };
    let p_oi = check_p_opponent_indifference(sys, p, grid, opts)?;
    let strong = check_strong_oi(sys, grid, Some(p), opts)?;
    let (sep, bisector) = check_p_separable(sys.curve(), p, grid, opts)?;
    let k = check_p_constant_k(sys, p, grid, opts)?;
    let linear = match &bisector {
        Some(b) => check_bisector_linear(b, grid, opts)?,
        None => PropertyReport::inconclusive(
            Property::BisectorLinear,
            params.clone(),
            "no bisector was extracted",
        ),
    };
    let components = vec![p_oi, strong, sep, k, linear];
    let [p_oi, strong, sep, k, linear] = [0, 1, 2, 3, 4].map(|i| &components[i]);

    let trivial = k.verdict == Verdict::Inconclusive
        && k.note.as_deref().is_some_and(|n| n.contains("trivial"));
    let report = PropertyReport::new(Property::Characterization, params.clone());
    if trivial {
        let report = PropertyReport::inconclusive(
            Property::Characterization,
            params,
            "system is trivial on the grid; the characterizations assume a nontrivial system",
        );
        return Ok(CrossCheck { report, components });
    }
    if let Some(r) = components
        .iter()
        .find(|r| r.verdict == Verdict::Inconclusive)
    {
        let report = PropertyReport::inconclusive(
            Property::Characterization,
            params,
            format!("component {} is inconclusive", r.property),
        );
        return Ok(CrossCheck { report, components });
    }

    let lhs_weak = p_oi.holds();
    let rhs_weak = sep.holds() && k.holds();
    let lhs_strong = strong.holds();
    let rhs_strong = sep.holds() && linear.holds() && k.holds();
    let disagreements = u8::from(lhs_weak != rhs_weak) + u8::from(lhs_strong != rhs_strong);
    let mut report = report
        .decide(f64::from(disagreements), None)
        .metric("p_oi", flag(lhs_weak))
        .metric("p_separable_and_p_constant_k", flag(rhs_weak))
        .metric("strong_p_oi", flag(lhs_strong))
        .metric("linear_p_separable_and_p_constant_k", flag(rhs_strong));
    if let Some(slope) = linear.metrics.get("slope") {
        report = report.metric("bisector_slope", *slope);
    }
    if disagreements > 0 {
        report = report.with_note("the two sides of a biconditional disagree");
    }
    Ok(CrossCheck { report, components })
}
