//! Skill curves and bisectors.
//!
//! Every curve is evaluated on a canonical argument order: the value for
//! `x >= y` is computed directly (it lies in `[0.5, 1]`) and the value for
//! `x < y` is its reflection `1 - σ(y, x)`. Since `1 - s` is exact for
//! `s ∈ [0.5, 1]`, `σ(x, y) + σ(y, x) == 1` holds bit-for-bit for every
//! analytic variant. Raw (non-symmetrized) tabulated curves are the one
//! exception and are evaluated as stored.

mod bisector;
mod tabulated;

pub use bisector::BisectorTable;
pub use tabulated::TabulatedCurve;

use serde::{Deserialize, Serialize};

use crate::config::CurveConfig;
use crate::error::{invalid_arg, Error, Result};
use crate::Rating;

/// Base-10 logistic `1 / (1 + 10^(-d / scale))` with the rating difference
/// optionally clamped to `[-clamp, clamp]` first.
#[derive(Clone, Debug, PartialEq)]
pub struct LogisticCurve {
    scale: f64,
    clamp: Option<f64>,
}

impl LogisticCurve {
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `None` means the difference is never clamped.
    pub fn clamp(&self) -> Option<f64> {
        self.clamp
    }

    fn upper(&self, d: f64) -> f64 {
        let d = match self.clamp {
            Some(c) => d.min(c),
            None => d,
        };
        1.0 / (1.0 + 10f64.powf(-d / self.scale))
    }
}

/// Linear curve `a (x - y) + 0.5` inside `|x - y| <= s`, flat at
/// `0.5 ± a s` outside.
#[derive(Clone, Debug, PartialEq)]
pub struct SonasCurve {
    a: f64,
    s: f64,
}

impl SonasCurve {
    pub fn slope(&self) -> f64 {
        self.a
    }

    pub fn threshold(&self) -> f64 {
        self.s
    }

    fn upper(&self, d: f64) -> f64 {
        0.5 + self.a * d.min(self.s)
    }
}

/// A skill curve `σ : R² → [0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveConfig", into = "CurveConfig")]
pub enum SkillCurve {
    ThresholdedLogistic(LogisticCurve),
    SonasLike(SonasCurve),
    /// `σ(x, y) = β(x) − β(y) + 0.5` for a bisector `β` of span at most 0.5.
    Separable(BisectorTable),
    Tabulated(TabulatedCurve),
    /// `σ ≡ 0.5`.
    Trivial,
}

impl SkillCurve {
    pub fn logistic(scale: f64, clamp: Option<f64>) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidCurve(format!(
                "logistic scale must be > 0, got {scale}"
            )));
        }
        if let Some(c) = clamp {
            if !(c > 0.0) || c.is_nan() {
                return Err(Error::InvalidCurve(format!(
                    "logistic clamp must be > 0, got {c}"
                )));
            }
        }
        Ok(SkillCurve::ThresholdedLogistic(LogisticCurve {
            scale,
            clamp,
        }))
    }

    pub fn sonas(a: f64, s: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && s.is_finite() && s > 0.0) {
            return Err(Error::InvalidCurve(format!(
                "Sonas-like curve needs a > 0 and s > 0, got a = {a}, s = {s}"
            )));
        }
        if a * s > 0.5 {
            return Err(Error::InvalidCurve(format!(
                "Sonas-like curve needs a·s <= 0.5, got {}",
                a * s
            )));
        }
        Ok(SkillCurve::SonasLike(SonasCurve { a, s }))
    }

    /// A globally separable curve. The bisector's range must fit in an
    /// interval of length 0.5 so that every value stays inside `[0, 1]`.
    pub fn separable(bisector: BisectorTable) -> Result<Self> {
        if bisector.span() > 0.5 {
            return Err(Error::InvalidCurve(format!(
                "bisector span {} exceeds 0.5",
                bisector.span()
            )));
        }
        Ok(SkillCurve::Separable(bisector))
    }

    pub fn tabulated(table: TabulatedCurve) -> Self {
        SkillCurve::Tabulated(table)
    }

    /// Evaluates `σ(x, y)`.
    pub fn eval(&self, x: Rating, y: Rating) -> Result<f64> {
        match self {
            SkillCurve::Tabulated(t) => t.eval(x, y),
            SkillCurve::Trivial => Ok(0.5),
            _ => Ok(self.reflect(x, y)),
        }
    }

    fn reflect(&self, x: Rating, y: Rating) -> f64 {
        if x >= y {
            self.upper(x, y)
        } else {
            1.0 - self.upper(y, x)
        }
    }

    // Value for x >= y; always in [0.5, 1].
    fn upper(&self, x: Rating, y: Rating) -> f64 {
        match self {
            SkillCurve::ThresholdedLogistic(c) => c.upper(x - y),
            SkillCurve::SonasLike(c) => c.upper(x - y),
            SkillCurve::Separable(b) => (b.value(x) - b.value(y) + 0.5).clamp(0.5, 1.0),
            SkillCurve::Tabulated(_) | SkillCurve::Trivial => unreachable!("not reflected"),
        }
    }

    /// Ratings on which the curve is defined, when bounded.
    pub fn domain(&self) -> Option<(Rating, Rating)> {
        match self {
            SkillCurve::Tabulated(t) => Some(t.bounds()),
            _ => None,
        }
    }

    /// Short name used in reports and plots.
    pub fn label(&self) -> String {
        match self {
            SkillCurve::ThresholdedLogistic(c) => match c.clamp {
                Some(clamp) => format!("logistic(scale={}, clamp={clamp})", c.scale),
                None => format!("logistic(scale={}, unclamped)", c.scale),
            },
            SkillCurve::SonasLike(c) => format!("sonas(a={}, s={})", c.a, c.s),
            SkillCurve::Separable(b) => format!("separable({} samples)", b.points().len()),
            SkillCurve::Tabulated(t) => format!("tabulated({}x{})", t.axis().len(), t.axis().len()),
            SkillCurve::Trivial => "trivial".to_string(),
        }
    }

    /// True when the curve is separable by construction, so the skill-chain
    /// identity must hold exactly.
    pub fn is_structurally_separable(&self) -> bool {
        matches!(self, SkillCurve::Separable(_) | SkillCurve::Trivial)
    }
}

/// Evaluates `σ(x, y)`.
pub fn eval_sigma(curve: &SkillCurve, x: Rating, y: Rating) -> Result<f64> {
    curve.eval(x, y)
}

/// Samples `β(x) := σ(x, m)` across `[lo, hi]`.
///
/// Samples sit at `m + k · resolution`, plus both endpoints, so the table
/// passes through `β(m) = 0.5`. On a separable curve the result is a bisector
/// anchored at `m`.
pub fn extract_bisector(
    curve: &SkillCurve,
    m: Rating,
    lo: Rating,
    hi: Rating,
    resolution: f64,
) -> Result<BisectorTable> {
    if !(lo < hi) {
        return Err(invalid_arg(format!("empty domain ({lo}, {hi})")));
    }
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(invalid_arg(format!(
            "resolution must be > 0, got {resolution}"
        )));
    }
    if !(lo..=hi).contains(&m) {
        return Err(invalid_arg(format!("reference {m} outside ({lo}, {hi})")));
    }
    let below = ((m - lo) / resolution).floor() as i64;
    let above = ((hi - m) / resolution).floor() as i64;
    let mut xs = Vec::with_capacity((below + above + 3) as usize);
    if m - below as f64 * resolution > lo {
        xs.push(lo);
    }
    for k in -below..=above {
        xs.push(m + k as f64 * resolution);
    }
    if *xs.last().unwrap() < hi {
        xs.push(hi);
    }
    let points = xs
        .into_iter()
        .map(|x| {
            let v = if x == m { 0.5 } else { curve.eval(x, m)? };
            Ok((x, v))
        })
        .collect::<Result<Vec<_>>>()?;
    BisectorTable::new(points, m)
}

/// Whether `x` and `y` are P-close: `σ(x, y) ∈ (0.5 − P, 0.5 + P)`.
pub fn p_close(curve: &SkillCurve, x: Rating, y: Rating, p: f64) -> Result<bool> {
    p_close_with(curve, x, y, p, 0.0)
}

/// [`p_close`] with an open-interval slack: pairs within `eps_open` of the
/// boundary count as outside, i.e. the test is
/// `0.5 − P + eps_open < σ < 0.5 + P − eps_open`.
pub fn p_close_with(
    curve: &SkillCurve,
    x: Rating,
    y: Rating,
    p: f64,
    eps_open: f64,
) -> Result<bool> {
    check_margin(p)?;
    if !(eps_open >= 0.0) {
        return Err(invalid_arg(format!(
            "open-interval slack must be >= 0, got {eps_open}"
        )));
    }
    let s = curve.eval(x, y)?;
    // Compared against the interval ends rather than |s - 0.5| so that
    // boundary values computed as 0.5 ± P land exactly on the boundary.
    Ok(s > 0.5 - p + eps_open && s < 0.5 + p - eps_open)
}

pub(crate) fn check_margin(p: f64) -> Result<()> {
    if p > 0.0 && p <= 0.5 {
        Ok(())
    } else {
        Err(invalid_arg(format!("P must lie in (0, 0.5], got {p}")))
    }
}
