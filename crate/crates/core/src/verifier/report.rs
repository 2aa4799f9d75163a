use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::error::{invalid_arg, Error};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    DrawFree,
    Fairness,
    Oi,
    POi,
    StrongOi,
    StrongPOi,
    PSeparable,
    PConstantK,
    TranslationInvariant,
    BisectorLinear,
    FullScale,
    ChainIdentity,
    Characterization,
}

impl Property {
    pub const ALL: [Property; 13] = [
        Property::DrawFree,
        Property::Fairness,
        Property::Oi,
        Property::POi,
        Property::StrongOi,
        Property::StrongPOi,
        Property::PSeparable,
        Property::PConstantK,
        Property::TranslationInvariant,
        Property::BisectorLinear,
        Property::FullScale,
        Property::ChainIdentity,
        Property::Characterization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::DrawFree => "draw_free",
            Property::Fairness => "fairness",
            Property::Oi => "oi",
            Property::POi => "p_oi",
            Property::StrongOi => "strong_oi",
            Property::StrongPOi => "strong_p_oi",
            Property::PSeparable => "p_separable",
            Property::PConstantK => "p_constant_k",
            Property::TranslationInvariant => "translation_invariant",
            Property::BisectorLinear => "bisector_linear",
            Property::FullScale => "full_scale",
            Property::ChainIdentity => "chain_identity",
            Property::Characterization => "characterization",
        }
    }

    /// Whether the check needs a margin `P`.
    pub fn needs_p(self) -> bool {
        matches!(
            self,
            Property::POi
                | Property::StrongPOi
                | Property::PSeparable
                | Property::PConstantK
                | Property::BisectorLinear
                | Property::Characterization
        )
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Property::ALL.iter().map(|p| p.name()).collect();
                invalid_arg(format!(
                    "unknown property `{s}` (known: {})",
                    known.join(", ")
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Refuted,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "HOLDS",
            Verdict::Refuted => "REFUTED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// How a tuple of ratings is tested for P-closeness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PForm {
    /// Only the lowest and highest rating of the tuple must be P-close.
    #[default]
    ExtremePair,
    /// Every pair in the tuple must be P-close.
    Pairwise,
}

/// Named ratings (and derived values) reproducing a violation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl Witness {
    pub fn new(pairs: &[(&str, f64)]) -> Self {
        Self {
            names: pairs.iter().map(|p| p.0.to_string()).collect(),
            values: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .names
            .iter()
            .zip(&self.values)
            .map(|(n, v)| format!("{n}={v}"))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<f64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub form: Option<PForm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub verdict: Verdict,
    /// Worst residual seen; `f64::MAX` if evaluation produced NaN or infinity.
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    pub params: CheckParams,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl PropertyReport {
    pub(crate) fn new(property: Property, params: CheckParams) -> Self {
        Self {
            property,
            verdict: Verdict::Inconclusive,
            max_residual: 0.0,
            witness: None,
            params,
            metrics: BTreeMap::new(),
            note: None,
        }
    }

    pub(crate) fn inconclusive(
        property: Property,
        params: CheckParams,
        note: impl Into<String>,
    ) -> Self {
        let mut r = Self::new(property, params);
        r.note = Some(note.into());
        r
    }

    /// Sets the verdict from the worst residual against the tolerance.
    pub(crate) fn decide(mut self, residual: f64, witness: Option<Witness>) -> Self {
        let residual = if residual.is_finite() {
            residual
        } else {
            f64::MAX
        };
        self.max_residual = residual;
        if residual > self.params.tolerance {
            self.verdict = Verdict::Refuted;
            self.witness = witness;
        } else {
            self.verdict = Verdict::Holds;
        }
        self
    }

    pub(crate) fn metric(mut self, name: &str, value: f64) -> Self {
        self.metrics.insert(name.to_string(), value);
        self
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: {} (max residual {:.3e}",
            self.property, self.verdict, self.max_residual
        );
        if let Some(p) = self.params.p {
            s.push_str(&format!(", P={p}"));
        }
        s.push_str(&format!(", tol={:e}", self.params.tolerance));
        if let Some(g) = &self.params.grid {
            s.push_str(&format!(", grid {}", g.describe()));
        }
        s.push(')');
        if let Some(w) = &self.witness {
            s.push_str(&format!(" witness {w}"));
        }
        if let Some(n) = &self.note {
            s.push_str(&format!(" [{n}]"));
        }
        s
    }
}
