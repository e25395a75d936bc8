//! Uniqueness / non-existence verdicts for complete maximal hypersurfaces.
//!
//! Under the null convergence condition on the region:
//! * if `inf |div ∂t| > 0` no complete maximal hypersurface has its time
//!   range there (non-existence);
//! * else if `inf((n+1)(f'/f)² - n f''/f) > 0` the only candidates are the
//!   maximal slices `f'(t0) = 0` (unique-slices).
//!
//! Verdicts apply to hypersurfaces whose time range lies in the analyzed
//! region, not to the whole interval.

use serde::Serialize;

use super::sampler::{endpoint_limit, End, Plan};
use super::{
    check_ncc, energy_conditions, infimum, maximal_slices, ConditionStatus, ConditionVerdict, Interval,
    IntervalBound, MaximalSlice, SamplerConfig, SliceKind, Spacetime, WarpError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    UniqueSlices,
    NonExistence,
    Inconclusive,
}

/// Why the criterion infimum is not positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureMode {
    /// `f'` and `f''` vanish together somewhere in the region.
    SimultaneousVanishing,
    /// `(f'/f)²` and `(log f)''` both tend to zero at an open or infinite end.
    EndpointDecay,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub ncc: ConditionVerdict,
    pub wec: ConditionVerdict,
    pub sec: ConditionVerdict,
    pub dec: ConditionVerdict,
    pub criterion_inf: IntervalBound,
    pub div_abs_inf: IntervalBound,
    pub maximal_slices: Vec<MaximalSlice>,
    pub verdict: Verdict,
    pub failure_mode: Option<FailureMode>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub const ALL: [Verdict; 3] = [Verdict::UniqueSlices, Verdict::NonExistence, Verdict::Inconclusive];

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::UniqueSlices => "unique-slices",
            Verdict::NonExistence => "non-existence",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl FailureMode {
    pub const ALL: [FailureMode; 3] = [
        FailureMode::SimultaneousVanishing,
        FailureMode::EndpointDecay,
        FailureMode::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FailureMode::SimultaneousVanishing => "simultaneous-vanishing",
            FailureMode::EndpointDecay => "endpoint-decay",
            FailureMode::Other => "other",
        }
    }
}

impl std::str::FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown verdict `{s}`"))
    }
}

impl std::str::FromStr for FailureMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown failure mode `{s}`"))
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::fmt::Display for FailureMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Checks the two endpoint limits that make the criterion infimum vanish.
fn decaying_end(st: &Spacetime, region: &Interval, cfg: &SamplerConfig) -> Result<Option<bool>, WarpError> {
    let plan = Plan::new(region, cfg)?;
    for (upper, end) in [(false, plan.lo), (true, plan.hi)] {
        if end == End::Closed {
            continue;
        }
        let h2 = endpoint_limit(region, cfg, upper, |t| st.hubble(t).map(|h| h * h))?;
        let lf = endpoint_limit(region, cfg, upper, |t| st.log_f_second(t))?;
        let small = |l: Option<f64>| l.is_some_and(|v| v.abs() <= cfg.decay_tol);
        if small(h2.finite()) && small(lf.finite()) {
            return Ok(Some(upper));
        }
    }
    Ok(None)
}

pub fn classify(st: &Spacetime, region: &Interval, cfg: &SamplerConfig) -> Result<ClassificationReport, WarpError> {
    st.check_region(region)?;
    let ncc = check_ncc(st, region, cfg)?;
    let ec = energy_conditions(st, region, cfg)?;
    let criterion_inf = infimum(region, cfg, |t| st.criterion_value(t))?;
    let div_abs_inf = infimum(region, cfg, |t| st.div_dt(t).map(f64::abs))?;
    let slices = maximal_slices(st, region, cfg)?;

    let mut notes = Vec::new();
    match ncc.status {
        ConditionStatus::Holds => {}
        ConditionStatus::Fails => notes.push(format!(
            "null convergence condition fails: (log f)'' = {:e} at t = {}",
            ncc.margin,
            ncc.witness.unwrap_or(f64::NAN)
        )),
        ConditionStatus::Unknown => notes.push(format!(
            "null convergence condition undecided: max (log f)'' = {:e} is within tolerance of 0",
            ncc.margin
        )),
    }
    if !criterion_inf.converged || !div_abs_inf.converged {
        notes.push("infimum refinement did not converge; bounds are widened".to_string());
    }

    let mut failure_mode = None;
    let verdict = if ncc.holds() && div_abs_inf.lower > 0.0 {
        notes.push(format!("inf |div(dt)| >= {:e} on the region", div_abs_inf.lower));
        Verdict::NonExistence
    } else if ncc.holds() && criterion_inf.lower > 0.0 {
        notes.push(format!(
            "criterion infimum >= {:e}; {} maximal slice(s) in the region",
            criterion_inf.lower,
            slices.len()
        ));
        Verdict::UniqueSlices
    } else {
        failure_mode = Some(if let Some(s) = slices.iter().find(|s| s.kind == SliceKind::Degenerate) {
            notes.push(format!("f' and f'' vanish together at t = {}", s.t0));
            FailureMode::SimultaneousVanishing
        } else if let Some(upper) = decaying_end(st, region, cfg)? {
            notes.push(format!(
                "(f'/f)^2 and (log f)'' both tend to 0 toward the {} end",
                if upper { "upper" } else { "lower" }
            ));
            FailureMode::EndpointDecay
        } else {
            FailureMode::Other
        });
        Verdict::Inconclusive
    };

    Ok(ClassificationReport {
        ncc,
        wec: ec.wec,
        sec: ec.sec,
        dec: ec.dec,
        criterion_inf,
        div_abs_inf,
        maximal_slices: slices,
        verdict,
        failure_mode,
        notes,
    })
}
