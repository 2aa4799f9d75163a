//! Rating systems: a skill curve plus a K-function.
//!
//! The K-function `K(x, y) = α(x, y) + α(y, x)` is the total stake of a
//! match. Fairness pins the split of that stake: the winner of current
//! rating `x` against `y` receives `α(x, y) = K(x, y) · (1 − σ(x, y))`,
//! which equals `K(x, y) · σ(y, x)` on any draw-free curve.

use serde::{Deserialize, Serialize};

use crate::config::{KConfig, SystemConfig};
use crate::curves::SkillCurve;
use crate::error::{Error, Result};
use crate::Rating;

/// Symmetric, strictly positive K-function on a square grid, interpolated
/// bilinearly and held flat outside the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct KTable {
    axis: Vec<Rating>,
    values: Vec<f64>,
}

impl KTable {
    /// `values[i][j]` is `K(axis[i], axis[j])`. The matrix is symmetrized by
    /// averaging with its transpose.
    pub fn new(axis: Vec<Rating>, values: Vec<Vec<f64>>) -> Result<Self> {
        let n = axis.len();
        if n == 0 {
            return Err(Error::InvalidK(
                "tabulated K needs at least one rating".into(),
            ));
        }
        if axis.windows(2).any(|w| !(w[0] < w[1])) || axis.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidK(
                "tabulated K axis must be finite and strictly increasing".into(),
            ));
        }
        if values.len() != n || values.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidK(format!(
                "tabulated K needs a {n}x{n} matrix"
            )));
        }
        let mut flat = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let v = (values[i][j] + values[j][i]) / 2.0;
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidK(format!(
                        "K({}, {}) = {v} must be finite and > 0",
                        axis[i], axis[j]
                    )));
                }
                flat[i * n + j] = v;
            }
        }
        Ok(Self { axis, values: flat })
    }

    pub fn axis(&self) -> &[Rating] {
        &self.axis
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.values
            .chunks(self.axis.len())
            .map(<[f64]>::to_vec)
            .collect()
    }

    fn locate(&self, v: Rating) -> (usize, f64) {
        let a = &self.axis;
        let n = a.len();
        if n == 1 || v <= a[0] {
            return (0, 0.0);
        }
        if v >= a[n - 1] {
            return (n - 2, 1.0);
        }
        let i = a.partition_point(|&p| p <= v) - 1;
        (i, (v - a[i]) / (a[i + 1] - a[i]))
    }

    fn eval(&self, x: Rating, y: Rating) -> f64 {
        let n = self.axis.len();
        if n == 1 {
            return self.values[0];
        }
        let (i, tx) = self.locate(x);
        let (j, ty) = self.locate(y);
        let at = |a: usize, b: usize| self.values[a * n + b];
        (1.0 - tx) * (1.0 - ty) * at(i, j)
            + tx * (1.0 - ty) * at(i + 1, j)
            + (1.0 - tx) * ty * at(i, j + 1)
            + tx * ty * at(i + 1, j + 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum KFunction {
    /// Elo's K-factor.
    Constant(f64),
    /// `K(x, y) = c0 + c1 · (x + y)`; positive wherever `x + y > −c0 / c1`.
    RatingSum {
        c0: f64,
        c1: f64,
    },
    Tabulated(KTable),
}

impl KFunction {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidK(format!("constant K must be > 0, got {c}")));
        }
        Ok(KFunction::Constant(c))
    }

    pub fn rating_sum(c0: f64, c1: f64) -> Result<Self> {
        if !(c0 > 0.0 && c0.is_finite() && c1 >= 0.0 && c1.is_finite()) {
            return Err(Error::InvalidK(format!(
                "rating-sum K needs c0 > 0 and c1 >= 0, got c0 = {c0}, c1 = {c1}"
            )));
        }
        Ok(KFunction::RatingSum { c0, c1 })
    }

    pub fn tabulated(axis: Vec<Rating>, values: Vec<Vec<f64>>) -> Result<Self> {
        KTable::new(axis, values).map(KFunction::Tabulated)
    }

    pub fn eval(&self, x: Rating, y: Rating) -> f64 {
        match self {
            KFunction::Constant(c) => *c,
            KFunction::RatingSum { c0, c1 } => c0 + c1 * (x + y),
            KFunction::Tabulated(t) => t.eval(x, y),
        }
    }

    pub fn label(&self) -> String {
        match self {
            KFunction::Constant(c) => format!("K={c}"),
            KFunction::RatingSum { c0, c1 } => format!("K={c0}+{c1}(x+y)"),
            KFunction::Tabulated(t) => format!("K=tabulated({})", t.axis.len()),
        }
    }
}

/// The four arguments of the expected gain `γ(x, x* | y, y*)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainQuery {
    /// Chooser's current rating.
    pub x: Rating,
    /// Chooser's true rating.
    pub x_star: Rating,
    /// Opponent's current rating.
    pub y: Rating,
    /// Opponent's true rating.
    pub y_star: Rating,
}

impl GainQuery {
    pub fn new(x: Rating, x_star: Rating, y: Rating, y_star: Rating) -> Self {
        Self {
            x,
            x_star,
            y,
            y_star,
        }
    }

    /// A correctly rated opponent at `y`.
    pub fn against_correct(x: Rating, x_star: Rating, y: Rating) -> Self {
        Self::new(x, x_star, y, y)
    }

    /// How far the opponent's true rating sits above their current rating.
    pub fn misrating(&self) -> f64 {
        self.y_star - self.y
    }

    /// The same match seen from the opponent's side.
    pub fn swapped(&self) -> Self {
        Self::new(self.y, self.y_star, self.x, self.x_star)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemConfig", into = "SystemConfig")]
pub struct RatingSystem {
    curve: SkillCurve,
    k: KFunction,
}

impl RatingSystem {
    pub fn new(curve: SkillCurve, k: KFunction) -> Self {
        Self { curve, k }
    }

    pub fn curve(&self) -> &SkillCurve {
        &self.curve
    }

    pub fn k_function(&self) -> &KFunction {
        &self.k
    }

    pub fn label(&self) -> String {
        format!("{} / {}", self.curve.label(), self.k.label())
    }

    pub fn sigma(&self, x: Rating, y: Rating) -> Result<f64> {
        self.curve.eval(x, y)
    }

    pub fn k(&self, x: Rating, y: Rating) -> f64 {
        self.k.eval(x, y)
    }

    /// Points `α(x, y)` awarded to a winner of current rating `x` beating `y`.
    pub fn adjustment(&self, x: Rating, y: Rating) -> Result<f64> {
        Ok(self.k(x, y) * (1.0 - self.sigma(x, y)?))
    }

    /// Expected gain in the K-form `K(x, y) · (σ(x*, y*) − σ(x, y))`.
    pub fn expected_gain(&self, q: &GainQuery) -> Result<f64> {
        Ok(self.k(q.x, q.y) * (self.sigma(q.x_star, q.y_star)? - self.sigma(q.x, q.y)?))
    }

    /// Expected gain straight from the definition,
    /// `α(x, y) σ(x*, y*) − α(y, x) σ(y*, x*)`.
    pub fn expected_gain_definitional(&self, q: &GainQuery) -> Result<f64> {
        let win = self.adjustment(q.x, q.y)? * self.sigma(q.x_star, q.y_star)?;
        let loss = self.adjustment(q.y, q.x)? * self.sigma(q.y_star, q.x_star)?;
        Ok(win - loss)
    }

    /// Zero-sum update: returns `(new winner rating, new loser rating)`.
    pub fn apply_match(&self, winner: Rating, loser: Rating) -> Result<(Rating, Rating)> {
        let delta = self.adjustment(winner, loser)?;
        Ok((winner + delta, loser - delta))
    }

    /// `γ(x, x | y, y)` in definitional form; zero for any fair system.
    pub fn fairness_residual(&self, x: Rating, y: Rating) -> Result<f64> {
        self.expected_gain_definitional(&GainQuery::new(x, x, y, y))
    }
}

impl TryFrom<SystemConfig> for RatingSystem {
    type Error = Error;

    fn try_from(cfg: SystemConfig) -> Result<Self> {
        Ok(Self::new(cfg.curve.try_into()?, cfg.k.try_into()?))
    }
}

impl From<RatingSystem> for SystemConfig {
    fn from(sys: RatingSystem) -> Self {
        SystemConfig {
            curve: sys.curve.into(),
            k: sys.k.into(),
        }
    }
}

impl TryFrom<KConfig> for KFunction {
    type Error = Error;

    fn try_from(cfg: KConfig) -> Result<Self> {
        match cfg {
            KConfig::Constant { c } => KFunction::constant(c),
            KConfig::RatingSum { c0, c1 } => KFunction::rating_sum(c0, c1),
            KConfig::Tabulated { axis, values } => KFunction::tabulated(axis, values),
        }
    }
}

impl From<KFunction> for KConfig {
    fn from(k: KFunction) -> Self {
        match k {
            KFunction::Constant(c) => KConfig::Constant { c },
            KFunction::RatingSum { c0, c1 } => KConfig::RatingSum { c0, c1 },
            KFunction::Tabulated(t) => KConfig::Tabulated {
                values: t.matrix(),
                axis: t.axis,
            },
        }
    }
}
