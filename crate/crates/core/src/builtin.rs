//! Named reference systems.
//!
//! | name | curve | K |
//! |---|---|---|
//! | `sonas` | Sonas-like, a = 0.001, s = 400 | 32 |
//! | `logistic` | logistic, scale 400, clamp 400 | 32 |
//! | `logistic-unclamped` | logistic, scale 400 | 32 |
//! | `tanh` | separable, β(x) = 0.4 tanh((x − 1500) / 500) on 1500 ± 350 | 32 |
//! | `ramp` | separable, β(x) = 0.001 (x − 1500) on 1500 ± 250 | 32 |
//! | `trivial` | σ ≡ 0.5 | 32 |
//!
//! Each of the first four also has a `-rating-sum` twin with
//! `K(x, y) = 16 + 0.008 (x + y)`.

use crate::curves::{BisectorTable, SkillCurve};
use crate::error::{invalid_arg, Result};
use crate::system::{KFunction, RatingSystem};

pub const DEFAULT_K: f64 = 32.0;
pub const RATING_SUM_C0: f64 = 16.0;
pub const RATING_SUM_C1: f64 = 0.008;

pub const NAMES: [&str; 10] = [
    "sonas",
    "sonas-rating-sum",
    "logistic",
    "logistic-rating-sum",
    "logistic-unclamped",
    "logistic-unclamped-rating-sum",
    "tanh",
    "tanh-rating-sum",
    "ramp",
    "trivial",
];

pub fn sonas_curve() -> SkillCurve {
    SkillCurve::sonas(0.001, 400.0).expect("valid parameters")
}

pub fn logistic_curve() -> SkillCurve {
    SkillCurve::logistic(400.0, Some(400.0)).expect("valid parameters")
}

pub fn logistic_unclamped_curve() -> SkillCurve {
    SkillCurve::logistic(400.0, None).expect("valid parameters")
}

pub fn tanh_bisector() -> BisectorTable {
    BisectorTable::tanh(1500.0, 0.4, 500.0, 350.0, 1.0).expect("valid parameters")
}

pub fn tanh_curve() -> SkillCurve {
    SkillCurve::separable(tanh_bisector()).expect("span below 0.5")
}

pub fn ramp_curve() -> SkillCurve {
    SkillCurve::separable(BisectorTable::ramp(1500.0, 0.001, 250.0).expect("valid parameters"))
        .expect("span of exactly 0.5")
}

pub fn constant_k() -> KFunction {
    KFunction::Constant(DEFAULT_K)
}

pub fn rating_sum_k() -> KFunction {
    KFunction::RatingSum {
        c0: RATING_SUM_C0,
        c1: RATING_SUM_C1,
    }
}

pub fn by_name(name: &str) -> Result<RatingSystem> {
    let (base, k) = match name.strip_suffix("-rating-sum") {
        Some(base) if base != "ramp" && base != "trivial" => (base, rating_sum_k()),
        _ => (name, constant_k()),
    };
    let curve = match base {
        "sonas" => sonas_curve(),
        "logistic" => logistic_curve(),
        "logistic-unclamped" => logistic_unclamped_curve(),
        "tanh" => tanh_curve(),
        "ramp" => ramp_curve(),
        "trivial" => SkillCurve::Trivial,
        _ => {
            return Err(invalid_arg(format!(
                "unknown builtin system `{name}` (known: {})",
                NAMES.join(", ")
            )))
        }
    };
    Ok(RatingSystem::new(curve, k))
}

/// Every built-in system, in [`NAMES`] order.
pub fn all() -> Vec<(&'static str, RatingSystem)> {
    NAMES
        .iter()
        .map(|&n| (n, by_name(n).expect("builtin")))
        .collect()
}

/// The four reference curves crossed with constant and rating-sum K.
pub fn characterization_family() -> Vec<(&'static str, RatingSystem)> {
    NAMES[..8]
        .iter()
        .map(|&n| (n, by_name(n).expect("builtin")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        assert_eq!(all().len(), NAMES.len());
        assert!(by_name("ramp-rating-sum").is_err());
        assert!(by_name("").is_err());
    }

    #[test]
    fn family_pairs_curves_with_both_k() {
        let fam = characterization_family();
        assert_eq!(fam.len(), 8);
        for pair in fam.chunks(2) {
            assert_eq!(pair[0].1.curve(), pair[1].1.curve());
            assert_eq!(pair[0].1.k_function(), &constant_k());
            assert_eq!(pair[1].1.k_function(), &rating_sum_k());
        }
    }

    #[test]
    fn rating_sum_positive_on_reference_range() {
        let k = rating_sum_k();
        assert!(k.eval(0.0, 0.0) > 0.0);
        assert!(k.eval(1000.0, 1000.0) < k.eval(2000.0, 2000.0));
    }
}
