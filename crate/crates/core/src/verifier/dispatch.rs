use super::chain::{build_skill_chain, check_full_scale, verify_chain_identity, ChainOptions};
use super::characterize::cross_check_characterization;
use super::checks::{
    check_bisector_linear, check_draw_free, check_fairness, check_opponent_indifference,
    check_p_constant_k, check_p_opponent_indifference, check_p_separable, check_strong_oi,
    check_translation_invariance, CheckOptions,
};
use super::grid::Grid;
use super::report::{Property, PropertyReport, Verdict};
use crate::error::{invalid_arg, Result};
use crate::system::RatingSystem;

/// Runs the check for `prop`.
///
/// `p` is required for the P-restricted properties. The chain-based
/// properties start a chain of link probability `chain_p` at the bottom of
/// the grid and allow it `budget` ratings.
pub fn run_property(
    sys: &RatingSystem,
    prop: Property,
    p: Option<f64>,
    grid: &Grid,
    opts: &CheckOptions,
    chain_p: f64,
    budget: usize,
) -> Result<PropertyReport> {
    let need = || p.ok_or_else(|| invalid_arg(format!("{prop} needs a margin P")));
    let curve = sys.curve();
    let chain_opts = ChainOptions::new(budget, grid.lo + 1e6);
    Ok(match prop {
        Property::DrawFree => check_draw_free(curve, grid, opts)?,
        Property::Fairness => check_fairness(sys, grid, opts)?,
        Property::Oi => check_opponent_indifference(sys, grid, opts)?,
        Property::POi => check_p_opponent_indifference(sys, need()?, grid, opts)?,
        Property::StrongOi => check_strong_oi(sys, grid, None, opts)?,
        Property::StrongPOi => check_strong_oi(sys, grid, Some(need()?), opts)?,
        Property::PSeparable => check_p_separable(curve, need()?, grid, opts)?.0,
        Property::PConstantK => check_p_constant_k(sys, need()?, grid, opts)?,
        Property::TranslationInvariant => check_translation_invariance(curve, grid, opts)?,
        Property::BisectorLinear => match check_p_separable(curve, need()?, grid, opts)? {
            (_, Some(b)) => check_bisector_linear(&b, grid, opts)?,
            (sep, None) => {
                let mut r = sep;
                r.property = Property::BisectorLinear;
                r.verdict = Verdict::Inconclusive;
                r.note = Some("curve is not P-separable on the grid, so it has no bisector".into());
                r.witness = None;
                r
            }
        },
        Property::FullScale => check_full_scale(curve, chain_p, grid.lo, &chain_opts)?,
        Property::ChainIdentity => {
            let chain = build_skill_chain(curve, chain_p, grid.lo, &chain_opts)?;
            verify_chain_identity(curve, &chain, opts.tolerance)?
        }
        Property::Characterization => {
            cross_check_characterization(sys, need()?, grid, opts)?.report
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_property_dispatches() {
        let sys = crate::builtin::by_name("sonas").unwrap();
        let grid = Grid::new(1200.0, 1800.0, 100.0).unwrap();
        let opts = CheckOptions::for_curve(sys.curve());
        for prop in Property::ALL {
            let r = run_property(&sys, prop, Some(0.3), &grid, &opts, 0.9, 50).unwrap();
            assert_eq!(r.property, prop);
        }
        assert!(run_property(&sys, Property::POi, None, &grid, &opts, 0.9, 50).is_err());
    }
}
