use serde::Serialize;

use super::sampler::{eval_all, Plan};
use super::{Interval, SamplerConfig, Spacetime, WarpError};

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SliceKind {
    /// `f'' < 0`: the slice separates expansion from contraction.
    Max,
    Min,
    /// `f''` vanishes too (within `tol`).
    Degenerate,
}

/// A maximal slice `{t0} × ℝⁿ`, i.e. a zero of `f'`.
///
/// `f_prime` and `f_second` are the raw derivatives at `t0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaximalSlice {
    pub t0: f64,
    pub kind: SliceKind,
    pub f_prime: f64,
    pub f_second: f64,
}

fn classify_root(st: &Spacetime, t0: f64, cfg: &SamplerConfig) -> Result<MaximalSlice, WarpError> {
    let j = st.jet(t0)?;
    let kind = if (j.d2 / j.v).abs() <= cfg.tol {
        SliceKind::Degenerate
    } else if j.d2 < 0.0 {
        SliceKind::Max
    } else {
        SliceKind::Min
    };
    Ok(MaximalSlice {
        t0,
        kind,
        f_prime: j.d1,
        f_second: j.d2,
    })
}

/// Bisects a sign change of `f'/f` on `[a, b]` until `|f'/f| ≤ root_tol`.
fn bisect(st: &Spacetime, mut a: f64, mut fa: f64, mut b: f64, root_tol: f64) -> Result<Option<f64>, WarpError> {
    let df = |t| st.hubble(t);
    let mut fb = df(b)?;
    for _ in 0..MAX_BISECTIONS {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = df(m)?;
        if fm.abs() <= root_tol {
            return Ok(Some(m));
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    // bracket collapsed to adjacent floats
    let (t, v) = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
    Ok((v.abs() <= root_tol).then_some(t))
}

/// Zeros of `f'` on the region's sampling grid, each refined by bisection.
///
/// Zeros are located on the Hubble function `f'/f`, which has the same sign
/// as `f'` but does not underflow where `f` itself is tiny; likewise a slice
/// is degenerate when `|f''/f| ≤ tol`.
///
/// Isolated grid zeros and bracketed sign changes yield one slice each. A run
/// of consecutive grid zeros (as for constant `f`) is reported once, as a
/// degenerate slice at the middle of the run.
pub fn maximal_slices(st: &Spacetime, region: &Interval, cfg: &SamplerConfig) -> Result<Vec<MaximalSlice>, WarpError> {
    st.check_region(region)?;
    let plan = Plan::new(region, cfg)?;
    let nodes = &plan.nodes;
    let d1 = eval_all(nodes, &|t| st.hubble(t))?;
    let zero = |i: usize| d1[i].abs() <= cfg.root_tol;

    let mut out = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        if zero(i) {
            let start = i;
            while i + 1 < nodes.len() && zero(i + 1) {
                i += 1;
            }
            let mut s = classify_root(st, nodes[(start + i) / 2], cfg)?;
            if i > start {
                s.kind = SliceKind::Degenerate;
            }
            out.push(s);
        } else if i + 1 < nodes.len() && !zero(i + 1) && (d1[i] < 0.0) != (d1[i + 1] < 0.0) {
            if let Some(t0) = bisect(st, nodes[i], d1[i], nodes[i + 1], cfg.root_tol)? {
                out.push(classify_root(st, t0, cfg)?);
            }
        }
        i += 1;
    }
    Ok(out)
}
