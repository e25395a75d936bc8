//! Sampling-based infimum bounds over a region of the time axis.
//!
//! The region is covered by a uniform grid (open ends excluded), the best
//! local minima are refined by recursive bracket shrinking, and every open
//! or infinite end is probed by a geometric sequence whose limit is
//! estimated by Aitken extrapolation. The resulting bracket is sound for
//! functions whose variation between samples is below the tolerance; no
//! interval arithmetic is involved.

use rayon::prelude::*;
use serde::Serialize;

use super::{Interval, WarpError};

/// Local minima refined per infimum call.
const MAX_CANDIDATES: usize = 4;
/// Points evaluated per refinement level.
const LEVEL_POINTS: usize = 5;
/// Probe values beyond this magnitude that keep growing are reported as infinite.
const DIVERGENCE_FLOOR: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerConfig {
    /// Initial grid size over the region.
    pub grid: usize,
    /// Refinement levels per local minimum; each level halves the bracket.
    pub refine_depth: usize,
    /// Margin tolerance for conditions and infimum brackets.
    pub tol: f64,
    /// Target `|f'(t0)|` for maximal slices.
    pub root_tol: f64,
    /// Length of the geometric endpoint probe sequence.
    pub probe_steps: usize,
    /// Replaces infinite region ends by `±truncation`.
    pub truncation: Option<f64>,
    /// Endpoint limits below this magnitude count as vanishing.
    pub decay_tol: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            grid: 257,
            refine_depth: 20,
            tol: 1e-9,
            root_tol: 1e-12,
            probe_steps: 12,
            truncation: None,
            decay_tol: 1e-6,
        }
    }
}

/// Estimated limit of a function toward an open or infinite region end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum EndpointLimit {
    Finite(f64),
    PosInf,
    NegInf,
    /// Closed end (sampled directly) or no probe could be evaluated.
    NotEvaluated,
}

impl EndpointLimit {
    pub fn finite(&self) -> Option<f64> {
        match self {
            EndpointLimit::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

/// Bracket `[lower, upper]` for the infimum of a sampled function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalBound {
    pub lower: f64,
    /// Smallest value actually attained by a sample.
    pub upper: f64,
    /// Where `upper` was attained.
    pub argmin: f64,
    /// Final bracket width of the refinement.
    pub refined_to: f64,
    pub endpoint_limits: (EndpointLimit, EndpointLimit),
    /// False when the last refinement level still improved by more than `tol`.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum End {
    Closed,
    Open(f64),
    Infinite,
}

/// Concrete sample points for a region.
#[derive(Debug, Clone)]
pub(crate) struct Plan {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub spacing: f64,
    pub lo: End,
    pub hi: End,
}

impl Plan {
    pub fn new(region: &Interval, cfg: &SamplerConfig) -> Result<Self, WarpError> {
        let trunc = || {
            cfg.truncation
                .filter(|t| t.is_finite() && *t > 0.0)
                .ok_or(WarpError::UnboundedRegion(*region))
        };
        let (lo_v, hi_v) = (region.lo.value, region.hi.value);
        let (a, lo) = if lo_v.is_infinite() {
            let t = trunc()?;
            let a = if hi_v > -t { -t } else { hi_v - t };
            (a, End::Infinite)
        } else if region.lo.closed {
            (lo_v, End::Closed)
        } else {
            (lo_v, End::Open(lo_v))
        };
        let (b, hi) = if hi_v.is_infinite() {
            let t = trunc()?;
            let b = if a < t { t } else { a + t };
            (b, End::Infinite)
        } else if region.hi.closed {
            (hi_v, End::Closed)
        } else {
            (hi_v, End::Open(hi_v))
        };
        if a == b {
            return Ok(Self {
                a,
                b,
                nodes: vec![a],
                spacing: 0.0,
                lo,
                hi,
            });
        }
        let m = cfg.grid.max(3);
        let spacing = (b - a) / (m - 1) as f64;
        let nodes = (0..m)
            .filter(|&i| !(i == 0 && matches!(lo, End::Open(_))))
            .filter(|&i| !(i == m - 1 && matches!(hi, End::Open(_))))
            .map(|i| if i == m - 1 { b } else { a + spacing * i as f64 })
            .collect();
        Ok(Self {
            a,
            b,
            nodes,
            spacing,
            lo,
            hi,
        })
    }

    /// Geometric probe points toward the lower (`upper = false`) or upper end.
    pub fn probes(&self, upper: bool, steps: usize) -> Vec<f64> {
        let end = if upper { self.hi } else { self.lo };
        let dir = if upper { 1.0 } else { -1.0 };
        match end {
            End::Closed => Vec::new(),
            End::Open(e) => (1..=steps)
                .map(|k| e - dir * self.spacing * 0.5f64.powi(k as i32))
                .collect(),
            End::Infinite => {
                let start = if upper { self.b } else { self.a };
                let s = start.abs().max(1.0);
                (1..=steps)
                    .map(|k| start + dir * s * (2f64.powi(k as i32) - 1.0))
                    .collect()
            }
        }
    }
}

/// Evaluates on all points in parallel and returns the first error in point order.
pub(crate) fn eval_all<F>(points: &[f64], f: &F) -> Result<Vec<f64>, WarpError>
where
    F: Fn(f64) -> Result<f64, WarpError> + Sync,
{
    let results: Vec<Result<f64, WarpError>> = points.par_iter().map(|&t| f(t)).collect();
    results.into_iter().collect()
}

/// Probe values up to the first failing evaluation.
pub(crate) fn probe_values<F>(points: &[f64], f: &F) -> Vec<(f64, f64)>
where
    F: Fn(f64) -> Result<f64, WarpError>,
{
    points
        .iter()
        .map_while(|&t| f(t).ok().filter(|v| v.is_finite()).map(|v| (t, v)))
        .collect()
}

/// Aitken Δ² estimate of the limit of a probe sequence, or its divergence.
pub(crate) fn estimate_limit(values: &[f64]) -> EndpointLimit {
    let k = values.len();
    match k {
        0 => EndpointLimit::NotEvaluated,
        1 | 2 => EndpointLimit::Finite(values[k - 1]),
        _ => {
            let (v0, v1, v2) = (values[k - 3], values[k - 2], values[k - 1]);
            let (d1, d2) = (v1 - v0, v2 - v1);
            if d1 * d2 > 0.0 && d2.abs() > d1.abs() && v2.abs() > DIVERGENCE_FLOOR {
                return if d2 > 0.0 {
                    EndpointLimit::PosInf
                } else {
                    EndpointLimit::NegInf
                };
            }
            let denom = d2 - d1;
            if d2.abs() >= d1.abs() || denom == 0.0 {
                return EndpointLimit::Finite(v2);
            }
            let est = v2 - d2 * d2 / denom;
            EndpointLimit::Finite(if est.is_finite() { est } else { v2 })
        }
    }
}

/// Limit of `f` toward one end of `region` from the geometric probe sequence.
pub fn endpoint_limit<F>(
    region: &Interval,
    cfg: &SamplerConfig,
    upper: bool,
    f: F,
) -> Result<EndpointLimit, WarpError>
where
    F: Fn(f64) -> Result<f64, WarpError>,
{
    let plan = Plan::new(region, cfg)?;
    let probes = probe_values(&plan.probes(upper, cfg.probe_steps), &f);
    let values: Vec<f64> = probes.iter().map(|p| p.1).collect();
    Ok(estimate_limit(&values))
}

struct Refined {
    t: f64,
    value: f64,
    width: f64,
    last_gain: f64,
}

fn refine<F>(f: &F, mut l: f64, mut r: f64, start: (f64, f64), depth: usize) -> Result<Refined, WarpError>
where
    F: Fn(f64) -> Result<f64, WarpError> + Sync,
{
    let (lo_bound, hi_bound) = (l, r);
    let (mut bt, mut bv) = start;
    let mut last_gain = 0.0;
    for _ in 0..depth {
        if r <= l {
            break;
        }
        let pts: Vec<f64> = (0..LEVEL_POINTS)
            .map(|i| l + (r - l) * i as f64 / (LEVEL_POINTS - 1) as f64)
            .collect();
        let vals = eval_all(&pts, f)?;
        let prev = bv;
        for (&t, &v) in pts.iter().zip(&vals) {
            if v < bv {
                bv = v;
                bt = t;
            }
        }
        last_gain = prev - bv;
        let w = (r - l) / 4.0;
        l = (bt - w).max(lo_bound);
        r = (bt + w).min(hi_bound);
    }
    Ok(Refined {
        t: bt,
        value: bv,
        width: r - l,
        last_gain,
    })
}

/// Brackets `inf f` over `region`.
///
/// Infinite region ends need `cfg.truncation`. Values at geometric probes
/// toward open or infinite ends count as attained; their extrapolated limits
/// only lower the `lower` end of the bracket.
pub fn infimum<F>(region: &Interval, cfg: &SamplerConfig, f: F) -> Result<IntervalBound, WarpError>
where
    F: Fn(f64) -> Result<f64, WarpError> + Sync,
{
    let plan = Plan::new(region, cfg)?;
    let values = eval_all(&plan.nodes, &f)?;

    let mut best_i = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best_i] {
            best_i = i;
        }
    }
    let (mut argmin, mut upper) = (plan.nodes[best_i], values[best_i]);

    let m = values.len();
    let mut refined_to: f64 = 0.0;
    let mut slack: f64 = 0.0;
    let mut converged = true;
    if m > 1 {
        let mut minima: Vec<usize> = (0..m)
            .filter(|&i| (i == 0 || values[i] <= values[i - 1]) && (i + 1 == m || values[i] <= values[i + 1]))
            .collect();
        minima.sort_by(|&x, &y| values[x].total_cmp(&values[y]).then(x.cmp(&y)));
        minima.truncate(MAX_CANDIDATES);
        for i in minima {
            let l = plan.nodes[i.saturating_sub(1)];
            let r = plan.nodes[(i + 1).min(m - 1)];
            let res = refine(&f, l, r, (plan.nodes[i], values[i]), cfg.refine_depth)?;
            refined_to = refined_to.max(res.width);
            slack = slack.max(res.last_gain);
            if res.last_gain > cfg.tol {
                converged = false;
            }
            if res.value < upper {
                upper = res.value;
                argmin = res.t;
            }
        }
    }

    let mut limits = [EndpointLimit::NotEvaluated; 2];
    let mut lower_cap = upper;
    for (side, upper_end) in [(0, false), (1, true)] {
        let probes = probe_values(&plan.probes(upper_end, cfg.probe_steps), &f);
        for &(t, v) in &probes {
            if v < upper {
                upper = v;
                argmin = t;
            }
        }
        let vals: Vec<f64> = probes.iter().map(|p| p.1).collect();
        limits[side] = estimate_limit(&vals);
        match limits[side] {
            EndpointLimit::Finite(l) => lower_cap = lower_cap.min(l),
            EndpointLimit::NegInf => lower_cap = f64::NEG_INFINITY,
            _ => {}
        }
    }
    lower_cap = lower_cap.min(upper);

    let lower = if m == 1 && plan.lo == End::Closed && plan.hi == End::Closed {
        upper
    } else {
        lower_cap - cfg.tol - slack
    };
    Ok(IntervalBound {
        lower,
        upper,
        argmin,
        refined_to,
        endpoint_limits: (limits[0], limits[1]),
        converged,
    })
}
