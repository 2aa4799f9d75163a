use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Result};
use crate::Rating;

pub const DEFAULT_MAX_POINTS: usize = 2001;
pub const DEFAULT_TUPLE_BUDGET: u64 = 500_000_000;

fn default_max_points() -> usize {
    DEFAULT_MAX_POINTS
}

fn default_tuple_budget() -> u64 {
    DEFAULT_TUPLE_BUDGET
}

/// Evenly spaced ratings `lo, lo + step, …`, closed with `hi`.
///
/// `max_points` caps the grid itself; `tuple_budget` caps how many tuples a
/// check may enumerate before it gives up with an inconclusive verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: Rating,
    pub hi: Rating,
    pub step: f64,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
    #[serde(default = "default_tuple_budget")]
    pub tuple_budget: u64,
}

impl Grid {
    pub fn new(lo: Rating, hi: Rating, step: f64) -> Result<Self> {
        Self::with_limits(lo, hi, step, DEFAULT_MAX_POINTS, DEFAULT_TUPLE_BUDGET)
    }

    pub fn with_limits(
        lo: Rating,
        hi: Rating,
        step: f64,
        max_points: usize,
        tuple_budget: u64,
    ) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid_arg(format!(
                "grid needs finite lo < hi, got ({lo}, {hi})"
            )));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(invalid_arg(format!("grid step must be > 0, got {step}")));
        }
        let g = Self {
            lo,
            hi,
            step,
            max_points,
            tuple_budget,
        };
        if g.len() > max_points {
            return Err(invalid_arg(format!(
                "grid has {} points, more than the limit of {max_points}",
                g.len()
            )));
        }
        Ok(g)
    }

    pub fn with_tuple_budget(mut self, budget: u64) -> Self {
        self.tuple_budget = budget;
        self
    }

    fn interior_count(&self) -> usize {
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize
    }

    pub fn len(&self) -> usize {
        let n = self.interior_count();
        let last = self.lo + n as f64 * self.step;
        if last < self.hi - 1e-9 * self.step {
            n + 2
        } else {
            n + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<Rating> {
        let n = self.interior_count();
        let mut pts: Vec<Rating> = (0..=n).map(|i| self.lo + i as f64 * self.step).collect();
        let last = pts[n];
        if last < self.hi - 1e-9 * self.step {
            pts.push(self.hi);
        } else {
            pts[n] = self.hi;
        }
        pts
    }

    pub fn midpoint(&self) -> Rating {
        let pts = self.points();
        pts[(pts.len() - 1) / 2]
    }

    pub fn describe(&self) -> String {
        format!("[{}, {}] step {}", self.lo, self.hi, self.step)
    }
}
