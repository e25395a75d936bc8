use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use nalgebra::DVector;
use serde::Serialize;
use warpgeom::hypersurface::{
    intrinsic_ricci, make_graph, mean_curvature, parse_node_array, ricci_kt_n, verify_hessian_identity,
    verify_lemma1, FrameData, GraphHypersurface, GraphSource, HypersurfaceError, TangentField,
};
use warpgeom::warp::{check_ncc, Interval, SamplerConfig};

use super::{emit, format, resolve, SpacetimeEcho, SpacetimeSpec};
use crate::error::{parse_error, CliError, EXIT_CHECK_FAILED, EXIT_OK};
use crate::output::{fmt_f64, to_json, Document};
use crate::settings::Settings;

pub const KEYS: [&str; 8] = [
    "graph",
    "nodes",
    "domain",
    "res",
    "tol",
    "maximality-tol",
    "require-maximal",
    "checks",
];

pub const CHECKS: [&str; 6] = ["spacelike", "mean-curvature", "hessian", "ricci-kt-n", "ricci-bound", "lemma1"];

pub const DEFAULT_RES: usize = 33;
pub const DEFAULT_TOL: f64 = 1e-3;
pub const DEFAULT_MAXIMALITY_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckBlock {
    pub check: &'static str,
    pub status: Status,
    pub values: BTreeMap<&'static str, f64>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphEcho {
    pub graph: Option<String>,
    pub nodes: Option<String>,
    pub domain: Vec<[f64; 2]>,
    pub res: Vec<usize>,
    pub spacing: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResults {
    pub spacetime: SpacetimeEcho,
    pub graph: GraphEcho,
    pub tolerance: f64,
    pub maximality_tolerance: f64,
    pub require_maximal: bool,
    pub checks: Vec<CheckBlock>,
    pub all_passed: bool,
}

/// Splits `[a,b]x[c,d]x…` into its factors; brackets must balance.
pub fn split_domain(text: &str) -> Result<Vec<&str>, CliError> {
    let bad = || CliError::input(format!("domain `{text}`: expected a product like [-1,1]x[-1,1]"));
    let s = text.trim();
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = None;
    let mut expect_sep = false;
    for (i, c) in s.char_indices() {
        if start.is_none() {
            if c.is_whitespace() {
                continue;
            }
            if expect_sep {
                if c == 'x' || c == '×' {
                    expect_sep = false;
                    continue;
                }
                return Err(bad());
            }
            if c != '[' && c != '(' {
                return Err(bad());
            }
            start = Some(i);
        }
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => {
                depth -= 1;
                if depth == 0 {
                    out.push(&s[start.take().expect("open factor")..=i]);
                    expect_sep = true;
                }
            }
            _ => {}
        }
    }
    if start.is_some() || !expect_sep {
        return Err(bad());
    }
    Ok(out)
}

fn parse_res(text: &str, n: usize) -> Result<Vec<usize>, CliError> {
    let parts: Vec<&str> = text.split(['x', ',']).map(str::trim).collect();
    let res: Vec<usize> = parts
        .iter()
        .map(|p| p.parse::<usize>().map_err(|_| CliError::input(format!("bad resolution `{text}`"))))
        .collect::<Result<_, _>>()?;
    match res.len() {
        1 => Ok(vec![res[0]; n]),
        k if k == n => Ok(res),
        k => Err(CliError::input(format!("resolution lists {k} axes but the domain has {n}"))),
    }
}

fn domain(spec: &SpacetimeSpec, text: &str) -> Result<Vec<(f64, f64)>, CliError> {
    split_domain(text)?
        .into_iter()
        .map(|f| {
            let iv: Interval = spec.parse_interval("domain", f)?;
            if !(iv.lo.closed && iv.hi.closed) {
                return Err(CliError::input(format!("domain factor {f} must be a closed interval")));
            }
            Ok((iv.lo.value, iv.hi.value))
        })
        .collect()
}

/// Requires max |H| within tolerance and the null convergence condition on the range of `τ`.
fn maximal_precondition(gh: &GraphHypersurface, max_h: f64, tol: f64) -> Result<(), String> {
    if !(max_h <= tol) {
        return Err(HypersurfaceError::NotMaximal { max_h, tol }.to_string());
    }
    let (lo, hi) = gh.tau_range();
    match check_ncc(gh.spacetime(), &Interval::closed(lo, hi), &SamplerConfig::default()) {
        Ok(v) if v.holds() => Ok(()),
        Ok(v) => Err(format!(
            "null convergence condition not established on [{lo}, {hi}] ({}, margin {:e})",
            v.status.as_str(),
            v.margin
        )),
        Err(e) => Err(e.to_string()),
    }
}

pub fn run(s: &Settings, out: &mut dyn Write) -> Result<i32, CliError> {
    let fmt = format(s, &["json", "text"])?;
    let tol = s.parse::<f64>("tol")?.unwrap_or(DEFAULT_TOL);
    let max_tol = s.parse::<f64>("maximality-tol")?.unwrap_or(DEFAULT_MAXIMALITY_TOL);
    if !(tol >= 0.0 && max_tol >= 0.0) {
        return Err(CliError::input("tolerances must be non-negative"));
    }
    let require_maximal = s.flag("require-maximal")?;
    let requested: Vec<&'static str> = match s.get("checks") {
        None => CHECKS.to_vec(),
        Some(list) => list
            .split(',')
            .map(|c| {
                let c = c.trim();
                CHECKS.iter().copied().find(|k| *k == c).ok_or_else(|| {
                    CliError::input(format!("unknown check `{c}`; expected some of {}", CHECKS.join(", ")))
                })
            })
            .collect::<Result<_, _>>()?,
    };

    let spec = resolve(s)?;
    let dom_text = s.get("domain").ok_or_else(|| CliError::input("`domain` is required, e.g. [-1,1]x[-1,1]"))?;
    let bounds = domain(&spec, dom_text)?;
    let n = bounds.len();
    if let Some(k) = spec.n.filter(|k| *k != n) {
        return Err(CliError::input(format!("n = {k} but the domain has {n} axes")));
    }
    let st = spec.build(n)?;

    let (source, res) = match (s.get("graph"), s.get("nodes")) {
        (Some(_), Some(_)) => return Err(CliError::input("give either `graph` or `nodes`, not both")),
        (None, None) => return Err(CliError::input("a graph expression or a node-array file is required")),
        (Some(g), None) => {
            let src = GraphSource::parse(g, n).map_err(|e| parse_error("invalid graph function", g, &e))?;
            let res = parse_res(s.get("res").unwrap_or(&DEFAULT_RES.to_string()), n)?;
            (src, res)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("cannot read node array {path}: {e}")))?;
            let (dims, values) = parse_node_array(&text).map_err(|e| CliError::input(format!("{path}: {e}")))?;
            if dims.len() != n {
                return Err(CliError::input(format!(
                    "{path}: node array has {} axes but the domain has {n}",
                    dims.len()
                )));
            }
            if let Some(r) = s.get("res") {
                if parse_res(r, n)? != dims {
                    return Err(CliError::input(format!("{path}: dims {dims:?} disagree with res `{r}`")));
                }
            }
            (GraphSource::Nodes(values), dims)
        }
    };
    let gh = make_graph(&st, &bounds, &res, &source)?;

    let mc = mean_curvature(&gh)?;
    let max_h = mc.trace.max_abs();
    let precondition = maximal_precondition(&gh, max_h, max_tol);
    let gated = |name: &'static str, reason: &str| CheckBlock {
        check: name,
        status: if require_maximal { Status::Fail } else { Status::Skipped },
        values: BTreeMap::new(),
        reason: Some(reason.to_string()),
    };

    let mut checks = Vec::new();
    for name in CHECKS.iter().copied().filter(|c| requested.contains(c)) {
        let block = match name {
            "spacelike" => {
                let m = gh.spacelike_margin();
                CheckBlock {
                    check: name,
                    status: Status::of(m > 0.0),
                    values: BTreeMap::from([("margin", m)]),
                    reason: None,
                }
            }
            "mean-curvature" => {
                let r = mc.residual.max_abs();
                CheckBlock {
                    check: name,
                    status: Status::of(r <= tol),
                    values: BTreeMap::from([
                        ("max_abs_h", max_h),
                        ("max_abs_h_laplacian", mc.laplacian.max_abs()),
                        ("residual", r),
                    ]),
                    reason: None,
                }
            }
            "hessian" => {
                let h = verify_hessian_identity(&gh)?;
                let r = h.residual.max_abs();
                CheckBlock {
                    check: name,
                    status: Status::of(r <= tol),
                    values: BTreeMap::from([("residual", r), ("max_lhs", h.lhs.max_abs())]),
                    reason: None,
                }
            }
            "ricci-kt-n" => {
                let k = ricci_kt_n(&gh)?;
                let r = k.residual.max_abs();
                CheckBlock {
                    check: name,
                    status: Status::of(r <= tol),
                    values: BTreeMap::from([("residual", r), ("max_abs_closed_form", k.closed_form.max_abs())]),
                    reason: None,
                }
            }
            "ricci-bound" => match &precondition {
                Err(reason) => gated(name, reason),
                Ok(()) => {
                    let (min_ricci, min_slack) = ricci_bound(&gh)?;
                    CheckBlock {
                        check: name,
                        status: Status::of(min_slack >= -tol),
                        values: BTreeMap::from([("min_ricci", min_ricci), ("min_slack", min_slack)]),
                        reason: None,
                    }
                }
            },
            _ => match verify_lemma1(&gh, max_tol) {
                Ok(rep) => CheckBlock {
                    check: name,
                    status: Status::of(rep.min_slack >= -tol),
                    values: BTreeMap::from([("min_slack", rep.min_slack), ("max_abs_h", rep.max_h)]),
                    reason: None,
                },
                Err(e @ (HypersurfaceError::NotMaximal { .. } | HypersurfaceError::NccViolated { .. })) => {
                    gated(name, &e.to_string())
                }
                Err(e) => return Err(e.into()),
            },
        };
        checks.push(block);
    }

    let all_passed = checks.iter().all(|c| c.status != Status::Fail);
    let grid = gh.grid();
    let results = CheckResults {
        spacetime: spec.echo(&st),
        graph: GraphEcho {
            graph: s.get("graph").map(str::to_string),
            nodes: s.get("nodes").map(str::to_string),
            domain: bounds.iter().map(|&(a, b)| [a, b]).collect(),
            res: grid.res().to_vec(),
            spacing: grid.spacing().to_vec(),
        },
        tolerance: tol,
        maximality_tolerance: max_tol,
        require_maximal,
        checks,
        all_passed,
    };
    let text = match fmt {
        "json" => {
            let mut doc = Document::new("check", s.echo(), results);
            doc.diagnostics = doc
                .results
                .checks
                .iter()
                .filter_map(|c| c.reason.as_ref().map(|r| format!("{}: {r}", c.check)))
                .collect();
            to_json(&doc)
        }
        _ => render_text(&results),
    };
    emit(s, &text, out)?;
    Ok(if all_passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// Minimum of `Ric(Y,Y)` and of `Ric(Y,Y) - ((n-1)/n²) div(∂t)² |Y|²` over the
/// coordinate fields and the tangential part of `∂t`.
fn ricci_bound(gh: &GraphHypersurface) -> Result<(f64, f64), CliError> {
    let n = gh.n();
    let (mut min_ricci, mut min_slack) = (f64::INFINITY, f64::INFINITY);
    let mut consider = |y: &TangentField<'_>| -> Result<(), CliError> {
        let r = intrinsic_ricci(gh, y)?;
        min_ricci = min_ricci.min(r.ricci.min());
        min_slack = min_slack.min(r.ricci.zip_with(&r.divergence_bound, |a, b| a - b).min());
        Ok(())
    };
    for k in 0..n {
        consider(&|_: &[f64], _: &FrameData| {
            let mut v = DVector::zeros(n);
            v[k] = 1.0;
            v
        })?;
    }
    consider(&|_: &[f64], fr: &FrameData| fr.dt_tangent())?;
    Ok((min_ricci, min_slack))
}

fn render_text(r: &CheckResults) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "f(t) = {}  on {}  (n = {})", r.spacetime.f, r.spacetime.interval, r.spacetime.n);
    let _ = writeln!(s, "grid: {:?} nodes, tolerance {}", r.graph.res, fmt_f64(r.tolerance));
    for c in &r.checks {
        let vals: Vec<String> = c.values.iter().map(|(k, v)| format!("{k}={}", fmt_f64(*v))).collect();
        let _ = write!(s, "{:<15} {:<8} {}", c.check, c.status.as_str(), vals.join(" "));
        if let Some(reason) = &c.reason {
            let _ = write!(s, "({reason})");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "{}", if r.all_passed { "all checks passed" } else { "some checks failed" });
    s
}
