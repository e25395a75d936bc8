//! Named spacetimes with their expected classification.
//!
//! Presets are stored as data in the same `key = value` format the command
//! line tool reads, so a preset file can be copied and edited. Each expected
//! value carries a provenance: where the claim comes from.

mod config;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{parse, Bindings, ParseError};
use crate::warp::{
    classify, ClassificationReport, ConditionStatus, FailureMode, Interval, IntervalParseError, SamplerConfig,
    Spacetime, Verdict, WarpError,
};

pub use config::{parse_config, ConfigEntry, ConfigError};

const SOURCES: [&str; 6] = [
    include_str!("presets/einstein-de-sitter.conf"),
    include_str!("presets/friedmann-like.conf"),
    include_str!("presets/gaussian.conf"),
    include_str!("presets/minkowski.conf"),
    include_str!("presets/radiation.conf"),
    include_str!("presets/steady-state.conf"),
];

/// Tolerance when matching expected slice positions.
pub const SLICE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown preset `{name}`; valid presets: {}", valid.join(", "))]
    UnknownPreset { name: String, valid: Vec<String> },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    Invalid { key: String, value: String, reason: String },
    #[error("warping function: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Interval(#[from] IntervalParseError),
    #[error(transparent)]
    Warp(#[from] WarpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProvenanceKind {
    /// Stated for this model in the literature the preset reproduces.
    Literature,
    /// Follows from `f` by a short hand computation.
    HandDerived,
    /// True by construction.
    Definitional,
}

impl ProvenanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProvenanceKind::Literature => "literature",
            ProvenanceKind::HandDerived => "hand-derived",
            ProvenanceKind::Definitional => "definitional",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub kind: ProvenanceKind,
    pub note: String,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.as_str(), self.note)
    }
}

impl std::str::FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, note) = s.split_once(':').ok_or("expected `kind: note`")?;
        let kind = match kind.trim() {
            "literature" => ProvenanceKind::Literature,
            "hand-derived" => ProvenanceKind::HandDerived,
            "definitional" => ProvenanceKind::Definitional,
            k => return Err(format!("unknown provenance kind `{k}`")),
        };
        Ok(Provenance {
            kind,
            note: note.trim().to_string(),
        })
    }
}

/// An expected value with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fixture<T> {
    pub value: T,
    pub provenance: Provenance,
}

/// Frozen expectations for the preset's default region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expected {
    pub verdict: Fixture<Verdict>,
    pub failure_mode: Option<Fixture<FailureMode>>,
    pub ncc: Option<Fixture<ConditionStatus>>,
    /// Positions of the maximal slices in the region.
    pub slices: Option<Fixture<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Preset {
    pub name: String,
    pub description: String,
    /// Warping function `f(t)`.
    pub expression: String,
    /// Interval text; endpoints may use the parameters, e.g. `(-a,a)`.
    pub interval: String,
    pub n: usize,
    pub params: Bindings,
    /// Default analysis region, same syntax as `interval`.
    pub region: String,
    pub expected: Expected,
}

/// Short listing entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PresetSummary {
    pub name: String,
    pub description: String,
    pub expression: String,
    pub interval: String,
    pub n: usize,
    pub params: Bindings,
}

fn invalid(key: &str, value: &str, reason: impl Into<String>) -> CatalogError {
    CatalogError::Invalid {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn fixture<T>(
    map: &BTreeMap<&str, &str>,
    key: &'static str,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<Option<Fixture<T>>, CatalogError> {
    let ek = format!("expected.{key}");
    let pk = format!("provenance.{key}");
    let Some(v) = map.get(ek.as_str()) else {
        return Ok(None);
    };
    let p = map.get(pk.as_str()).ok_or_else(|| invalid(&ek, v, format!("`{pk}` is required")))?;
    Ok(Some(Fixture {
        value: parse(v).map_err(|e| invalid(&ek, v, e))?,
        provenance: p.parse().map_err(|e: String| invalid(&pk, p, e))?,
    }))
}

fn parse_slices(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<f64>().map_err(|_| format!("bad slice position `{x}`")))
        .collect()
}

const KEYS: [&str; 7] = ["name", "description", "f", "interval", "n", "region", "preset"];
const FIXTURES: [&str; 4] = ["verdict", "failure_mode", "ncc", "slices"];

impl Preset {
    /// Parses a preset file.
    pub fn from_config(text: &str) -> Result<Self, CatalogError> {
        let entries = parse_config(text)?;
        let mut map = BTreeMap::new();
        let mut params = Bindings::new();
        for e in &entries {
            let k = e.key.as_str();
            if let Some(p) = k.strip_prefix("param.") {
                let v = e.value.parse::<f64>().map_err(|_| invalid(k, &e.value, "not a number"))?;
                params.insert(p.to_string(), v);
            } else if KEYS.contains(&k)
                || FIXTURES
                    .iter()
                    .any(|f| k.strip_suffix(f).is_some_and(|p| p == "expected." || p == "provenance."))
            {
                map.insert(k, e.value.as_str());
            } else {
                return Err(CatalogError::UnknownKey(k.to_string()));
            }
        }
        let get = |k: &'static str| map.get(k).copied().ok_or(CatalogError::Missing(k));
        let n_text = get("n")?;
        let n = n_text.parse::<usize>().map_err(|_| invalid("n", n_text, "not a positive integer"))?;
        let verdict = fixture(&map, "verdict", |s| s.parse())?.ok_or(CatalogError::Missing("expected.verdict"))?;
        Ok(Preset {
            name: get("name")?.to_string(),
            description: map.get("description").unwrap_or(&"").to_string(),
            expression: get("f")?.to_string(),
            interval: get("interval")?.to_string(),
            n,
            params,
            region: get("region")?.to_string(),
            expected: Expected {
                verdict,
                failure_mode: fixture(&map, "failure_mode", |s| s.parse())?,
                ncc: fixture(&map, "ncc", |s| s.parse())?,
                slices: fixture(&map, "slices", parse_slices)?,
            },
        })
    }

    /// Serializes back to the preset file format.
    pub fn to_config(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: &str| {
            if v.is_empty() {
                s.push_str(&format!("{k} =\n"));
            } else {
                s.push_str(&format!("{k} = {v}\n"));
            }
        };
        kv("name", &self.name);
        kv("description", &self.description);
        kv("f", &self.expression);
        kv("interval", &self.interval);
        kv("n", &self.n.to_string());
        for (p, v) in &self.params {
            kv(&format!("param.{p}"), &format!("{v:?}"));
        }
        kv("region", &self.region);
        let e = &self.expected;
        kv("expected.verdict", e.verdict.value.as_str());
        kv("provenance.verdict", &e.verdict.provenance.to_string());
        if let Some(f) = &e.failure_mode {
            kv("expected.failure_mode", f.value.as_str());
            kv("provenance.failure_mode", &f.provenance.to_string());
        }
        if let Some(f) = &e.ncc {
            kv("expected.ncc", f.value.as_str());
            kv("provenance.ncc", &f.provenance.to_string());
        }
        if let Some(f) = &e.slices {
            let v: Vec<String> = f.value.iter().map(|x| format!("{x:?}")).collect();
            kv("expected.slices", &v.join(", "));
            kv("provenance.slices", &f.provenance.to_string());
        }
        s
    }

    pub fn summary(&self) -> PresetSummary {
        PresetSummary {
            name: self.name.clone(),
            description: self.description.clone(),
            expression: self.expression.clone(),
            interval: self.interval.clone(),
            n: self.n,
            params: self.params.clone(),
        }
    }

    /// Default bindings overridden by `overrides`.
    pub fn bindings(&self, overrides: &Bindings) -> Bindings {
        let mut b = self.params.clone();
        b.extend(overrides.iter().map(|(k, v)| (k.clone(), *v)));
        b
    }

    pub fn interval_with(&self, overrides: &Bindings) -> Result<Interval, CatalogError> {
        Ok(Interval::parse_with(&self.interval, &self.bindings(overrides))?)
    }

    pub fn region_with(&self, overrides: &Bindings) -> Result<Interval, CatalogError> {
        Ok(Interval::parse_with(&self.region, &self.bindings(overrides))?)
    }

    pub fn region(&self) -> Result<Interval, CatalogError> {
        self.region_with(&Bindings::new())
    }

    /// The preset's spacetime, optionally with another dimension or parameters.
    pub fn spacetime_with(&self, n: Option<usize>, overrides: &Bindings) -> Result<Spacetime, CatalogError> {
        Ok(Spacetime::new(
            n.unwrap_or(self.n),
            self.interval_with(overrides)?,
            parse(&self.expression)?,
            self.bindings(overrides),
        )?)
    }

    pub fn spacetime(&self) -> Result<Spacetime, CatalogError> {
        self.spacetime_with(None, &Bindings::new())
    }

    /// Differences between a report and the frozen expectations; empty when they agree.
    pub fn mismatches(&self, report: &ClassificationReport) -> Vec<String> {
        let e = &self.expected;
        let mut out = Vec::new();
        if report.verdict != e.verdict.value {
            out.push(format!("verdict: expected {}, got {}", e.verdict.value, report.verdict));
        }
        if let Some(f) = &e.failure_mode {
            if report.failure_mode != Some(f.value) {
                out.push(format!("failure mode: expected {}, got {:?}", f.value, report.failure_mode));
            }
        }
        if let Some(f) = &e.ncc {
            if report.ncc.status != f.value {
                out.push(format!("ncc: expected {}, got {}", f.value.as_str(), report.ncc.status.as_str()));
            }
        }
        if let Some(f) = &e.slices {
            let got: Vec<f64> = report.maximal_slices.iter().map(|s| s.t0).collect();
            let ok = got.len() == f.value.len() && got.iter().zip(&f.value).all(|(g, w)| (g - w).abs() <= SLICE_TOL);
            if !ok {
                out.push(format!("slices: expected {:?}, got {:?}", f.value, got));
            }
        }
        out
    }

    /// Classifies the preset on its default region.
    pub fn classify_default(&self) -> Result<ClassificationReport, CatalogError> {
        let st = self.spacetime()?;
        Ok(classify(&st, &self.region()?, &SamplerConfig::default())?)
    }
}

/// All builtin presets, sorted by name.
pub fn presets() -> Vec<Preset> {
    let mut v: Vec<Preset> = SOURCES
        .iter()
        .map(|s| Preset::from_config(s).expect("builtin preset files are valid"))
        .collect();
    v.sort_by(|a, b| a.name.cmp(&b.name));
    v
}

pub fn list_presets() -> Vec<PresetSummary> {
    presets().iter().map(Preset::summary).collect()
}

pub fn get_preset(name: &str) -> Result<Preset, CatalogError> {
    let all = presets();
    let valid = all.iter().map(|p| p.name.clone()).collect();
    all.into_iter().find(|p| p.name == name).ok_or(CatalogError::UnknownPreset {
        name: name.to_string(),
        valid,
    })
}
