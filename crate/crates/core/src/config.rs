//! JSON configuration for curves, K-functions and rating systems.
//!
//! ```json
//! {
//!   "curve": { "variant": "sonas", "a": 0.001, "s": 400 },
//!   "k": { "variant": "constant", "c": 32 }
//! }
//! ```
//!
//! A tabulated curve may point at a CSV file with header `x,y,sigma`; a
//! relative path is resolved against the directory of the config file when
//! loaded through [`SystemConfig::load`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::curves::{BisectorTable, SkillCurve, TabulatedCurve};
use crate::error::{Error, Result};
use crate::system::RatingSystem;
use crate::Rating;

fn yes() -> bool {
    true
}

fn default_resolution() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BisectorConfig {
    Points {
        points: Vec<(Rating, f64)>,
        #[serde(default)]
        reference: Option<Rating>,
    },
    Tanh {
        center: Rating,
        amplitude: f64,
        width: f64,
        half_range: f64,
        #[serde(default = "default_resolution")]
        resolution: f64,
    },
    Ramp {
        center: Rating,
        slope: f64,
        half_width: f64,
    },
}

impl TryFrom<BisectorConfig> for BisectorTable {
    type Error = Error;

    fn try_from(cfg: BisectorConfig) -> Result<Self> {
        match cfg {
            BisectorConfig::Points { points, reference } => {
                let reference = reference
                    .or_else(|| points.first().map(|p| p.0))
                    .unwrap_or(0.0);
                BisectorTable::new(points, reference)
            }
            BisectorConfig::Tanh {
                center,
                amplitude,
                width,
                half_range,
                resolution,
            } => BisectorTable::tanh(center, amplitude, width, half_range, resolution),
            BisectorConfig::Ramp {
                center,
                slope,
                half_width,
            } => BisectorTable::ramp(center, slope, half_width),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveConfig {
    Logistic {
        scale: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        clamp: Option<f64>,
    },
    Sonas {
        a: f64,
        s: f64,
    },
    Separable {
        bisector: BisectorConfig,
    },
    Tabulated {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        csv: Option<PathBuf>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cells: Option<Vec<(Rating, Rating, f64)>>,
        #[serde(default = "yes")]
        interpolate: bool,
        #[serde(default = "yes")]
        symmetrize: bool,
    },
    Trivial,
}

impl CurveConfig {
    fn resolve_paths(&mut self, base: &Path) {
        if let CurveConfig::Tabulated { csv: Some(p), .. } = self {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

impl TryFrom<CurveConfig> for SkillCurve {
    type Error = Error;

    fn try_from(cfg: CurveConfig) -> Result<Self> {
        match cfg {
            CurveConfig::Logistic { scale, clamp } => SkillCurve::logistic(scale, clamp),
            CurveConfig::Sonas { a, s } => SkillCurve::sonas(a, s),
            CurveConfig::Separable { bisector } => SkillCurve::separable(bisector.try_into()?),
            CurveConfig::Tabulated {
                csv,
                cells,
                interpolate,
                symmetrize,
            } => {
                let table = match (csv, cells) {
                    (Some(path), None) => {
                        TabulatedCurve::from_csv_path(&path, interpolate, symmetrize)?
                    }
                    (None, Some(cells)) => {
                        TabulatedCurve::from_cells(&cells, interpolate, symmetrize)?
                    }
                    _ => {
                        return Err(Error::Config(
                            "tabulated curve needs exactly one of `csv` or `cells`".into(),
                        ))
                    }
                };
                Ok(SkillCurve::tabulated(table))
            }
            CurveConfig::Trivial => Ok(SkillCurve::Trivial),
        }
    }
}

impl From<SkillCurve> for CurveConfig {
    fn from(curve: SkillCurve) -> Self {
        match curve {
            SkillCurve::ThresholdedLogistic(c) => CurveConfig::Logistic {
                scale: c.scale(),
                clamp: c.clamp(),
            },
            SkillCurve::SonasLike(c) => CurveConfig::Sonas {
                a: c.slope(),
                s: c.threshold(),
            },
            SkillCurve::Separable(b) => CurveConfig::Separable {
                bisector: BisectorConfig::Points {
                    points: b.points().to_vec(),
                    reference: Some(b.reference()),
                },
            },
            // Cells are written after symmetrization, so re-applying it is a no-op.
            SkillCurve::Tabulated(t) => CurveConfig::Tabulated {
                csv: None,
                cells: Some(t.cells()),
                interpolate: t.interpolates(),
                symmetrize: t.is_symmetrized(),
            },
            SkillCurve::Trivial => CurveConfig::Trivial,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum KConfig {
    Constant {
        c: f64,
    },
    RatingSum {
        c0: f64,
        c1: f64,
    },
    Tabulated {
        axis: Vec<Rating>,
        values: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub curve: CurveConfig,
    pub k: KConfig,
}

impl SystemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads a config file, resolving relative CSV paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        cfg.curve.resolve_paths(base);
        Ok(cfg)
    }

    pub fn build(self) -> Result<RatingSystem> {
        RatingSystem::try_from(self)
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

/// Loads a system from a config path or from `builtin:<name>`.
pub fn load_system(spec: &str) -> Result<RatingSystem> {
    match spec.strip_prefix("builtin:") {
        Some(name) => crate::builtin::by_name(name),
        None => SystemConfig::load(Path::new(spec))?.build(),
    }
}
