pub mod analyze;
pub mod check;
pub mod classify;
pub mod presets;

use std::io::Write;

use serde::Serialize;
use warpgeom::catalog::get_preset;
use warpgeom::expr::{Bindings, WarpExpr};
use warpgeom::warp::{Interval, Spacetime};

use crate::error::{parse_error, CliError};
use crate::settings::Settings;

/// Spacetime as described by the merged settings, before the dimension is fixed.
#[derive(Debug, Clone)]
pub struct SpacetimeSpec {
    pub preset: Option<String>,
    pub expression: String,
    pub interval: String,
    pub region: Option<String>,
    /// Explicit `n`, if any.
    pub n: Option<usize>,
    pub default_n: usize,
    pub params: Bindings,
}

/// Resolved spacetime as echoed in results.
#[derive(Debug, Clone, Serialize)]
pub struct SpacetimeEcho {
    pub preset: Option<String>,
    pub f: String,
    pub interval: String,
    pub n: usize,
    pub params: Bindings,
}

const DEFAULT_N: usize = 3;
const DEFAULT_INTERVAL: &str = "(-inf,inf)";

pub fn resolve(s: &Settings) -> Result<SpacetimeSpec, CliError> {
    let overrides = s.params()?;
    let n = s.parse::<usize>("n")?;
    match (s.get("preset"), s.get("f")) {
        (Some(_), Some(_)) => Err(CliError::input("give either a preset or an expression `f`, not both")),
        (None, None) => Err(CliError::input("a preset or an expression `f` is required")),
        (Some(name), None) => {
            let p = get_preset(name)?;
            Ok(SpacetimeSpec {
                preset: Some(p.name.clone()),
                params: p.bindings(&overrides),
                expression: p.expression,
                interval: s.get("interval").unwrap_or(&p.interval).to_string(),
                region: Some(s.get("region").unwrap_or(&p.region).to_string()),
                n,
                default_n: p.n,
            })
        }
        (None, Some(f)) => Ok(SpacetimeSpec {
            preset: None,
            expression: f.to_string(),
            interval: s.get("interval").unwrap_or(DEFAULT_INTERVAL).to_string(),
            region: s.get("region").map(str::to_string),
            n,
            default_n: DEFAULT_N,
            params: overrides,
        }),
    }
}

impl SpacetimeSpec {
    pub fn dimension(&self) -> usize {
        self.n.unwrap_or(self.default_n)
    }

    pub fn parse_interval(&self, key: &str, text: &str) -> Result<Interval, CliError> {
        Interval::parse_with(text, &self.params).map_err(|e| CliError::input(format!("{key}: {e}")))
    }

    pub fn interval(&self) -> Result<Interval, CliError> {
        self.parse_interval("interval", &self.interval)
    }

    /// The region, defaulting to the whole interval.
    pub fn region(&self) -> Result<Interval, CliError> {
        match &self.region {
            Some(r) => self.parse_interval("region", r),
            None => self.interval(),
        }
    }

    pub fn build(&self, n: usize) -> Result<Spacetime, CliError> {
        let expr = WarpExpr::parse(&self.expression)
            .map_err(|e| parse_error("invalid warping function", &self.expression, &e))?;
        Ok(Spacetime::new(n, self.interval()?, expr, self.params.clone())?)
    }

    pub fn echo(&self, st: &Spacetime) -> SpacetimeEcho {
        SpacetimeEcho {
            preset: self.preset.clone(),
            f: self.expression.clone(),
            interval: st.interval().to_string(),
            n: st.n(),
            params: self.params.clone(),
        }
    }
}

/// Output format among `allowed`, the first being the default.
pub fn format<'a>(s: &Settings, allowed: &[&'a str]) -> Result<&'a str, CliError> {
    match s.get("format") {
        None => Ok(allowed[0]),
        Some(f) => allowed.iter().copied().find(|a| *a == f).ok_or_else(|| {
            CliError::input(format!("unknown format `{f}`; expected one of {}", allowed.join(", ")))
        }),
    }
}

/// Writes to the `output` path if set, otherwise to `out`.
pub fn emit(s: &Settings, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match s.get("output") {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {path}: {e}")))
        }
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Eval(format!("cannot write output: {e}"))),
    }
}
