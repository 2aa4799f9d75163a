use crate::error::{Error, Result};
use crate::Rating;

/// A weakly increasing piecewise-linear function sampled at sorted ratings.
///
/// Values are held flat beyond the first and last sample. The reference
/// point records where the table was anchored (for an extracted bisector,
/// the rating `m` with `β(m) = 0.5`).
#[derive(Clone, Debug, PartialEq)]
pub struct BisectorTable {
    points: Vec<(Rating, f64)>,
    reference: Rating,
}

impl BisectorTable {
    pub fn new(points: Vec<(Rating, f64)>, reference: Rating) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidCurve("bisector table has no samples".into()));
        }
        if points
            .iter()
            .any(|&(x, v)| !x.is_finite() || !v.is_finite())
        {
            return Err(Error::InvalidCurve(
                "bisector samples must be finite".into(),
            ));
        }
        for w in points.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::InvalidCurve(format!(
                    "bisector ratings must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidCurve(format!(
                    "bisector must be weakly increasing (value drops at {})",
                    w[1].0
                )));
            }
        }
        if !reference.is_finite() {
            return Err(Error::InvalidCurve(
                "bisector reference must be finite".into(),
            ));
        }
        Ok(Self { points, reference })
    }

    /// Samples `f` at `lo, lo + resolution, …, hi` (the last sample lands on `hi`).
    pub fn from_fn(
        lo: Rating,
        hi: Rating,
        resolution: f64,
        reference: Rating,
        f: impl Fn(Rating) -> f64,
    ) -> Result<Self> {
        if !(lo < hi) || !(resolution > 0.0) {
            return Err(Error::InvalidCurve(format!(
                "cannot sample ({lo}, {hi}) at resolution {resolution}"
            )));
        }
        let n = ((hi - lo) / resolution).ceil() as usize;
        let points = (0..=n)
            .map(|i| {
                let x = if i == n {
                    hi
                } else {
                    lo + i as f64 * resolution
                };
                (x, f(x))
            })
            .collect();
        Self::new(points, reference)
    }

    /// `amplitude · tanh((x − center) / width)` sampled on
    /// `center ± half_range`, flat beyond.
    pub fn tanh(
        center: Rating,
        amplitude: f64,
        width: f64,
        half_range: f64,
        resolution: f64,
    ) -> Result<Self> {
        if !(amplitude >= 0.0 && width > 0.0 && half_range > 0.0) {
            return Err(Error::InvalidCurve(
                "tanh bisector needs amplitude >= 0, width > 0, half_range > 0".into(),
            ));
        }
        Self::from_fn(
            center - half_range,
            center + half_range,
            resolution,
            center,
            |x| amplitude * ((x - center) / width).tanh(),
        )
    }

    /// Linear with `slope` on `center ± half_width`, flat beyond. Its span is
    /// `2 · slope · half_width`.
    pub fn ramp(center: Rating, slope: f64, half_width: f64) -> Result<Self> {
        if !(slope >= 0.0 && half_width > 0.0) {
            return Err(Error::InvalidCurve(
                "ramp bisector needs slope >= 0 and half_width > 0".into(),
            ));
        }
        Self::new(
            vec![
                (center - half_width, -slope * half_width),
                (center + half_width, slope * half_width),
            ],
            center,
        )
    }

    pub fn points(&self) -> &[(Rating, f64)] {
        &self.points
    }

    pub fn reference(&self) -> Rating {
        self.reference
    }

    /// Rating range covered by samples.
    pub fn range(&self) -> (Rating, Rating) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }

    /// `max(value) − min(value)`.
    pub fn span(&self) -> f64 {
        self.points[self.points.len() - 1].1 - self.points[0].1
    }

    pub fn value(&self, x: Rating) -> f64 {
        let pts = &self.points;
        if x <= pts[0].0 {
            return pts[0].1;
        }
        let last = pts[pts.len() - 1];
        if x >= last.0 {
            return last.1;
        }
        // First sample strictly greater than x; 1 <= i < len.
        let i = pts.partition_point(|&(px, _)| px <= x);
        let (x0, v0) = pts[i - 1];
        let (x1, v1) = pts[i];
        if x == x0 {
            return v0;
        }
        let t = (x - x0) / (x1 - x0);
        v0 + t * (v1 - v0)
    }

    /// The same table shifted vertically by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            points: self.points.iter().map(|&(x, v)| (x, v + c)).collect(),
            reference: self.reference,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_and_extrapolates_flat() {
        let b = BisectorTable::new(vec![(0.0, 0.0), (10.0, 1.0), (20.0, 1.0)], 0.0).unwrap();
        assert_eq!(b.value(-5.0), 0.0);
        assert_eq!(b.value(5.0), 0.5);
        assert_eq!(b.value(10.0), 1.0);
        assert_eq!(b.value(15.0), 1.0);
        assert_eq!(b.value(99.0), 1.0);
    }

    #[test]
    fn rejects_decreasing_or_unsorted() {
        assert!(BisectorTable::new(vec![(0.0, 1.0), (1.0, 0.5)], 0.0).is_err());
        assert!(BisectorTable::new(vec![(1.0, 0.0), (0.0, 0.5)], 0.0).is_err());
        assert!(BisectorTable::new(vec![(0.0, 0.0), (0.0, 0.5)], 0.0).is_err());
        assert!(BisectorTable::new(vec![], 0.0).is_err());
    }

    #[test]
    fn tanh_span_within_half() {
        let b = BisectorTable::tanh(1500.0, 0.4, 500.0, 350.0, 1.0).unwrap();
        // 0.8 · tanh(0.7)
        assert!((b.span() - 0.483_494_221_693_730_8).abs() < 1e-12);
        assert_eq!(b.range(), (1150.0, 1850.0));
        assert_eq!(b.value(1500.0), 0.0);
    }

    #[test]
    fn ramp_has_requested_span() {
        let b = BisectorTable::ramp(1500.0, 0.001, 250.0).unwrap();
        assert!((b.span() - 0.5).abs() < 1e-15);
        assert!((b.value(1600.0) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn shift_preserves_differences() {
        let b = BisectorTable::tanh(0.0, 0.4, 500.0, 300.0, 10.0).unwrap();
        let s = b.shifted(0.25);
        for x in [-250.0, -3.0, 0.0, 121.0] {
            assert!((s.value(x) - b.value(x) - 0.25).abs() < 1e-15);
        }
    }
}
