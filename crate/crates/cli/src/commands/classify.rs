use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;
use warpgeom::warp::{classify, ClassificationReport, SamplerConfig};

use super::{emit, format, resolve, SpacetimeEcho};
use crate::error::{CliError, EXIT_OK};
use crate::output::{fmt_f64, to_json, Document};
use crate::settings::Settings;

pub const KEYS: [&str; 3] = ["tol", "truncation", "grid"];

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyResults {
    pub spacetime: SpacetimeEcho,
    pub region: String,
    pub verdict: &'static str,
    pub failure_mode: Option<&'static str>,
    pub slices: Vec<f64>,
    pub report: ClassificationReport,
}

pub fn sampler_config(s: &Settings) -> Result<SamplerConfig, CliError> {
    let mut cfg = SamplerConfig::default();
    if let Some(t) = s.parse::<f64>("tol")? {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::input("`tol` must be positive"));
        }
        cfg.tol = t;
    }
    if let Some(t) = s.parse::<f64>("truncation")? {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::input("`truncation` must be positive"));
        }
        cfg.truncation = Some(t);
    }
    if let Some(g) = s.parse::<usize>("grid")? {
        if g < 3 {
            return Err(CliError::input("`grid` must be at least 3"));
        }
        cfg.grid = g;
    }
    Ok(cfg)
}

pub fn run(s: &Settings, out: &mut dyn Write) -> Result<i32, CliError> {
    let fmt = format(s, &["json", "text"])?;
    let spec = resolve(s)?;
    let st = spec.build(spec.dimension())?;
    let region = spec.region()?;
    let report = classify(&st, &region, &sampler_config(s)?)?;
    let results = ClassifyResults {
        spacetime: spec.echo(&st),
        region: region.to_string(),
        verdict: report.verdict.as_str(),
        failure_mode: report.failure_mode.map(|m| m.as_str()),
        slices: report.maximal_slices.iter().map(|m| m.t0).collect(),
        report,
    };
    let text = match fmt {
        "json" => {
            let mut doc = Document::new("classify", s.echo(), results);
            doc.diagnostics = doc.results.report.notes.clone();
            to_json(&doc)
        }
        _ => render_text(&results),
    };
    emit(s, &text, out)?;
    Ok(EXIT_OK)
}

fn render_text(r: &ClassifyResults) -> String {
    let rep = &r.report;
    let mut s = String::new();
    let _ = writeln!(s, "f(t) = {}  on {}  (n = {})", r.spacetime.f, r.spacetime.interval, r.spacetime.n);
    let _ = writeln!(s, "region: {}", r.region);
    let _ = writeln!(s, "verdict: {}", r.verdict);
    if let Some(m) = r.failure_mode {
        let _ = writeln!(s, "failure mode: {m}");
    }
    let slices: Vec<String> = r.slices.iter().map(|t| fmt_f64(*t)).collect();
    let _ = writeln!(s, "maximal slices: [{}]", slices.join(", "));
    let _ = writeln!(s, "criterion inf: {}", fmt_f64(rep.criterion_inf.lower));
    let _ = writeln!(s, "inf |div dt|: {}", fmt_f64(rep.div_abs_inf.lower));
    for (name, c) in [("NCC", &rep.ncc), ("WEC", &rep.wec), ("SEC", &rep.sec), ("DEC", &rep.dec)] {
        let _ = writeln!(s, "{name}: {}", c.status.as_str());
    }
    for note in &rep.notes {
        let _ = writeln!(s, "note: {note}");
    }
    s
}
