use serde::Serialize;

use super::{infimum, Interval, SamplerConfig, Spacetime, WarpError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionStatus {
    Holds,
    Fails,
    Unknown,
}

impl ConditionStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ConditionStatus::Holds => "holds",
            ConditionStatus::Fails => "fails",
            ConditionStatus::Unknown => "unknown",
        }
    }
}

impl std::str::FromStr for ConditionStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [ConditionStatus::Holds, ConditionStatus::Fails, ConditionStatus::Unknown]
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown condition status `{s}`"))
    }
}

/// Outcome of checking `g(t) ≤ 0` over a region.
///
/// `margin` is the largest sampled value of `g` (negative means slack);
/// `witness` is where it occurs, or where the condition is violated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionVerdict {
    pub status: ConditionStatus,
    pub witness: Option<f64>,
    pub margin: f64,
}

impl ConditionVerdict {
    pub fn holds(&self) -> bool {
        self.status == ConditionStatus::Holds
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyConditions {
    pub wec: ConditionVerdict,
    pub sec: ConditionVerdict,
    pub dec: ConditionVerdict,
}

type Component<'a> = Box<dyn Fn(f64) -> Result<f64, WarpError> + Sync + 'a>;

impl Spacetime {
    /// Fails unless `region` lies in the closure of `I` with its closed ends inside `I`.
    pub fn check_region(&self, region: &Interval) -> Result<(), WarpError> {
        let i = &self.interval;
        let ok = region.within_closure_of(i)
            && (!region.lo.closed || i.contains(region.lo.value))
            && (!region.hi.closed || i.contains(region.hi.value));
        if ok {
            Ok(())
        } else {
            Err(WarpError::RegionOutsideInterval {
                region: *region,
                interval: *i,
            })
        }
    }
}

/// Checks that every component is `≤ tol` on the region.
fn check_all(region: &Interval, cfg: &SamplerConfig, parts: &[Component<'_>]) -> Result<ConditionVerdict, WarpError> {
    let mut margin = f64::NEG_INFINITY;
    let mut at = None;
    let mut proven = true;
    let mut violation: Option<(f64, f64)> = None;
    for g in parts {
        let b = infimum(region, cfg, |t| g(t).map(|v| -v))?;
        let attained = -b.upper;
        if attained > margin {
            margin = attained;
            at = Some(b.argmin);
        }
        if attained > cfg.tol && violation.is_none_or(|(m, _)| attained > m) {
            violation = Some((attained, b.argmin));
        }
        if -b.lower > cfg.tol {
            proven = false;
        }
    }
    Ok(match violation {
        Some((m, t)) => ConditionVerdict {
            status: ConditionStatus::Fails,
            witness: Some(t),
            margin: m,
        },
        None => ConditionVerdict {
            status: if proven {
                ConditionStatus::Holds
            } else {
                ConditionStatus::Unknown
            },
            witness: at,
            margin,
        },
    })
}

/// Null convergence condition, `(log f)'' ≤ 0`.
pub fn check_ncc(st: &Spacetime, region: &Interval, cfg: &SamplerConfig) -> Result<ConditionVerdict, WarpError> {
    st.check_region(region)?;
    check_all(region, cfg, &[Box::new(|t| st.log_f_second(t))])
}

/// Weak (`ρ ≥ 0`, `ρ+p ≥ 0`), strong (`ρ+p ≥ 0`, `ρ+np ≥ 0`) and dominant (`ρ ≥ |p|`)
/// energy conditions of the comoving perfect fluid.
pub fn energy_conditions(
    st: &Spacetime,
    region: &Interval,
    cfg: &SamplerConfig,
) -> Result<EnergyConditions, WarpError> {
    st.check_region(region)?;
    let n = st.n() as f64;
    let fluid = |t| st.fluid_state(t);
    let wec = check_all(
        region,
        cfg,
        &[
            Box::new(|t| fluid(t).map(|s| -s.rho)),
            Box::new(|t| fluid(t).map(|s| -(s.rho + s.p))),
        ],
    )?;
    let sec = check_all(
        region,
        cfg,
        &[
            Box::new(|t| fluid(t).map(|s| -(s.rho + s.p))),
            Box::new(|t| fluid(t).map(|s| -(s.rho + n * s.p))),
        ],
    )?;
    let dec = check_all(region, cfg, &[Box::new(|t| fluid(t).map(|s| s.p.abs() - s.rho))])?;
    Ok(EnergyConditions { wec, sec, dec })
}
