use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::Rating;

/// A skill curve measured on a square grid of ratings.
///
/// The same sorted axis is used for both arguments. Values are interpolated
/// bilinearly when `interpolate` is set; otherwise only grid nodes may be
/// queried. Queries outside the axis range are always a domain error.
///
/// With `symmetrize` set, each cell is replaced at load time by
/// `(σ(x, y) + 1 − σ(y, x)) / 2`, which makes the table draw-free.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedCurve {
    axis: Vec<Rating>,
    // Row-major: values[i * n + j] = σ(axis[i], axis[j]).
    values: Vec<f64>,
    interpolate: bool,
    symmetrized: bool,
}

#[derive(Deserialize)]
struct CsvCell {
    x: f64,
    y: f64,
    sigma: f64,
}

impl TabulatedCurve {
    /// Builds a table from `(x, y, σ)` cells covering every pair of a common
    /// axis exactly once.
    pub fn from_cells(
        cells: &[(Rating, Rating, f64)],
        interpolate: bool,
        symmetrize: bool,
    ) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidCurve("tabulated curve has no cells".into()));
        }
        let key = |v: f64| v.to_bits();
        let mut xs: Vec<f64> = cells.iter().map(|c| c.0).collect();
        let mut ys: Vec<f64> = cells.iter().map(|c| c.1).collect();
        for v in xs.iter().chain(ys.iter()) {
            if !v.is_finite() {
                return Err(Error::InvalidCurve(
                    "tabulated ratings must be finite".into(),
                ));
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        if xs != ys {
            return Err(Error::InvalidCurve(
                "tabulated curve must use the same ratings for x and y".into(),
            ));
        }
        let n = xs.len();
        if cells.len() != n * n {
            return Err(Error::InvalidCurve(format!(
                "tabulated curve needs {} cells for a {n}x{n} grid, got {}",
                n * n,
                cells.len()
            )));
        }
        let index: BTreeMap<u64, usize> =
            xs.iter().enumerate().map(|(i, &x)| (key(x), i)).collect();
        let mut values = vec![f64::NAN; n * n];
        for &(x, y, s) in cells {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::InvalidCurve(format!(
                    "σ({x}, {y}) = {s} is outside [0, 1]"
                )));
            }
            let slot = &mut values[index[&key(x)] * n + index[&key(y)]];
            if !slot.is_nan() {
                return Err(Error::InvalidCurve(format!("duplicate cell ({x}, {y})")));
            }
            *slot = s;
        }
        if symmetrize {
            let raw = values.clone();
            for i in 0..n {
                for j in 0..n {
                    values[i * n + j] = (raw[i * n + j] + 1.0 - raw[j * n + i]) / 2.0;
                }
            }
        }
        let table = Self {
            axis: xs,
            values,
            interpolate,
            symmetrized: symmetrize,
        };
        table.check_monotone()?;
        Ok(table)
    }

    /// Reads a CSV with header `x,y,sigma`.
    pub fn from_csv_reader(reader: impl Read, interpolate: bool, symmetrize: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["x", "y", "sigma"] {
            return Err(Error::InvalidCurve(format!(
                "tabulated CSV header must be `x,y,sigma`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut cells = Vec::new();
        for row in rdr.deserialize() {
            let c: CsvCell = row?;
            cells.push((c.x, c.y, c.sigma));
        }
        Self::from_cells(&cells, interpolate, symmetrize)
    }

    pub fn from_csv_path(path: &Path, interpolate: bool, symmetrize: bool) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file, interpolate, symmetrize)
    }

    /// Writes the table as `x,y,sigma` rows.
    pub fn cells(&self) -> Vec<(Rating, Rating, f64)> {
        let n = self.axis.len();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push((self.axis[i], self.axis[j], self.values[i * n + j]));
            }
        }
        out
    }

    pub fn axis(&self) -> &[Rating] {
        &self.axis
    }

    pub fn interpolates(&self) -> bool {
        self.interpolate
    }

    pub fn is_symmetrized(&self) -> bool {
        self.symmetrized
    }

    pub fn bounds(&self) -> (Rating, Rating) {
        (self.axis[0], self.axis[self.axis.len() - 1])
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.axis.len() + j]
    }

    fn check_monotone(&self) -> Result<()> {
        let n = self.axis.len();
        for i in 0..n {
            for j in 0..n {
                if i + 1 < n && self.at(i + 1, j) < self.at(i, j) {
                    return Err(Error::InvalidCurve(format!(
                        "tabulated σ decreases in its first argument at ({}, {})",
                        self.axis[i + 1],
                        self.axis[j]
                    )));
                }
                if j + 1 < n && self.at(i, j + 1) > self.at(i, j) {
                    return Err(Error::InvalidCurve(format!(
                        "tabulated σ increases in its second argument at ({}, {})",
                        self.axis[i],
                        self.axis[j + 1]
                    )));
                }
            }
        }
        Ok(())
    }

    // Returns (lower index, weight of the upper neighbour).
    fn locate(&self, v: Rating) -> Option<(usize, f64)> {
        let axis = &self.axis;
        let n = axis.len();
        if !(v >= axis[0] && v <= axis[n - 1]) {
            return None;
        }
        if n == 1 {
            return Some((0, 0.0));
        }
        let i = axis.partition_point(|&a| a <= v).clamp(1, n - 1) - 1;
        let t = (v - axis[i]) / (axis[i + 1] - axis[i]);
        Some((i, t))
    }

    pub fn eval(&self, x: Rating, y: Rating) -> Result<f64> {
        let off = || Error::OffGrid { x, y };
        let (i, tx) = self.locate(x).ok_or_else(off)?;
        let (j, ty) = self.locate(y).ok_or_else(off)?;
        if !self.interpolate {
            let on_node = |t: f64| t == 0.0 || t == 1.0;
            if !(on_node(tx) && on_node(ty)) {
                return Err(off());
            }
        }
        let n = self.axis.len();
        let (i1, j1) = ((i + 1).min(n - 1), (j + 1).min(n - 1));
        let v = (1.0 - tx) * (1.0 - ty) * self.at(i, j)
            + tx * (1.0 - ty) * self.at(i1, j)
            + (1.0 - tx) * ty * self.at(i, j1)
            + tx * ty * self.at(i1, j1);
        Ok(v.clamp(0.0, 1.0))
    }
}
