//! Rotationally symmetric maximal graphs `t = u(|x|)`.
//!
//! Maximal graphs are critical points of the area `∫ f(u)^{n-1} √(f(u)² - |Du|²) dx`.
//! For `u = u(r)` the Euler–Lagrange equation is first order in the momentum
//! `q = f^{n-1} u' / W`, `W = √(f² - u'²)`:
//!
//! ```text
//! q' + (n-1) q / r = -[(n-1) f^{n-2} f' W + f^n f' / W]
//! u' = q f / √(f^{2(n-1)} + q²)
//! ```
//!
//! `q` stays finite exactly while the graph is spacelike. At a regular
//! center `q(0) = 0` and `q'(0) = -S(0)/n` where `S` is the bracket.

use std::sync::Arc;

use super::grid::Grid;
use super::{from_values, GraphHypersurface, HypersurfaceError};
use crate::warp::Spacetime;

/// Initial data for the radial equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialSeed {
    /// Smooth through the axis: `u(0) = u0`, `u'(0) = 0`.
    Regular { u0: f64 },
    /// `u(r0) = u0`, `u'(r0) = slope`; integrated both ways from `r0 > 0`.
    Annular { r0: f64, u0: f64, slope: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Accepted plus rejected steps before giving up.
    pub max_steps: usize,
    /// Step cap as a fraction of the integration range; keeps interpolation accurate.
    pub max_step_fraction: f64,
    /// Stop once `f(u)² - u'² ≤ spacelike_eps`.
    pub spacelike_eps: f64,
}

impl Default for RadialOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-12,
            max_steps: 200_000,
            max_step_fraction: 1.0 / 256.0,
            spacelike_eps: 1e-12,
        }
    }
}

/// Why an integration ended before its target radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialStop {
    pub r: f64,
    pub reason: String,
}

/// Accepted integration points `(r, u, u')`, sorted by `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// Set when either direction stopped early.
    pub stop: Option<RadialStop>,
}

impl RadialProfile {
    pub fn range(&self) -> (f64, f64) {
        (self.r[0], *self.r.last().expect("nonempty profile"))
    }

    /// Cubic Hermite interpolation between accepted points.
    pub fn eval(&self, r: f64) -> Option<f64> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&r) {
            return None;
        }
        let k = self.r.partition_point(|&x| x <= r).clamp(1, self.r.len() - 1) - 1;
        if self.r.len() == 1 {
            return Some(self.u[0]);
        }
        let (r0, r1) = (self.r[k], self.r[k + 1]);
        let h = r1 - r0;
        let s = (r - r0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        Some(h00 * self.u[k] + h10 * h * self.du[k] + h01 * self.u[k + 1] + h11 * h * self.du[k + 1])
    }
}

struct Rhs<'a> {
    st: &'a Spacetime,
    n: f64,
}

enum Fail {
    Interval,
    Spacelike,
}

impl Rhs<'_> {
    /// `(u', q', W²)`.
    fn eval(&self, r: f64, y: [f64; 2]) -> Result<([f64; 2], f64), Fail> {
        let [u, q] = y;
        let j = self.st.jet(u).map_err(|_| Fail::Interval)?;
        let n = self.n;
        let (f, fp) = (j.v, j.d1);
        let big_f = f.powf(n - 1.0);
        let d = big_f.hypot(q);
        let du = q * f / d;
        let w = f * big_f / d;
        if !(w > 0.0) || !q.is_finite() {
            return Err(Fail::Spacelike);
        }
        let s = (n - 1.0) * f.powf(n - 2.0) * fp * w + f.powf(n) * fp / w;
        let dq = if r == 0.0 { -s / n } else { -(n - 1.0) * q / r - s };
        Ok(([du, dq], w * w))
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus the embedded fourth-order ones.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Dormand–Prince 5(4) from `r0` toward `r1` (either direction).
/// Returns accepted points `(r, u, u')` in integration order.
fn integrate(
    rhs: &Rhs<'_>,
    r0: f64,
    y0: [f64; 2],
    r1: f64,
    opts: &RadialOptions,
) -> (Vec<(f64, f64, f64)>, Option<RadialStop>) {
    let dir = (r1 - r0).signum();
    let span = (r1 - r0).abs();
    let h_max = span * opts.max_step_fraction;
    let stop = |r: f64, why: &str| Some(RadialStop { r, reason: why.to_string() });

    let (k1, _) = match rhs.eval(r0, y0) {
        Ok(v) => v,
        Err(_) => return (Vec::new(), stop(r0, "initial data is not spacelike inside the interval")),
    };
    let mut out = vec![(r0, y0[0], k1[0])];
    if span == 0.0 {
        return (out, None);
    }
    let (mut r, mut y, mut k_first) = (r0, y0, k1);
    let mut h = h_max.min(1e-3 * span.max(1e-300)).max(1e-12 * span);
    let h_min = 1e-14 * span.max(1.0);
    for _ in 0..opts.max_steps {
        if (r1 - r) * dir <= 0.0 {
            return (out, None);
        }
        let h_step = h.min((r1 - r).abs());
        let mut k = [[0.0; 2]; 7];
        k[0] = k_first;
        let mut failed = None;
        for s in 1..7 {
            let mut ys = y;
            for (m, a) in A[s].iter().enumerate().take(s) {
                ys[0] += dir * h_step * a * k[m][0];
                ys[1] += dir * h_step * a * k[m][1];
            }
            match rhs.eval(r + dir * C[s] * h_step, ys) {
                Ok((ks, _)) => k[s] = ks,
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failed {
            if h_step <= h_min {
                let why = match e {
                    Fail::Interval => "u left the time interval",
                    Fail::Spacelike => "spacelikeness lost",
                };
                return (out, stop(r, why));
            }
            h = 0.25 * h_step;
            continue;
        }
        // 5th-order solution equals the last stage's input (FSAL)
        let mut y_new = y;
        for m in 0..6 {
            y_new[0] += dir * h_step * A[6][m] * k[m][0];
            y_new[1] += dir * h_step * A[6][m] * k[m][1];
        }
        let mut err2 = 0.0;
        for c in 0..2 {
            let e: f64 = (0..7).map(|m| E[m] * k[m][c]).sum::<f64>() * h_step;
            let sc = opts.atol + opts.rtol * y[c].abs().max(y_new[c].abs());
            err2 += (e / sc).powi(2);
        }
        let err = (err2 / 2.0).sqrt();
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        if err <= 1.0 {
            r += dir * h_step;
            if (r1 - r) * dir < 1e-15 * span {
                r = r1;
            }
            y = y_new;
            k_first = k[6];
            out.push((r, y[0], k_first[0]));
            let (_, w2) = rhs.eval(r, y).unwrap_or(([0.0; 2], 0.0));
            if w2 <= opts.spacelike_eps {
                return (out, stop(r, "spacelikeness lost"));
            }
            h = (h_step * factor).min(h_max);
        } else {
            h = h_step * factor.min(1.0);
        }
        if h < h_min {
            return (out, stop(r, "step size underflow (stiffness budget exceeded)"));
        }
    }
    (out, stop(r, "step budget exceeded"))
}

/// Integrates the radial maximal equation over `[r_lo, r_hi]` from `seed`.
pub fn radial_profile(
    st: &Spacetime,
    seed: RadialSeed,
    r_lo: f64,
    r_hi: f64,
    opts: &RadialOptions,
) -> Result<RadialProfile, HypersurfaceError> {
    let rhs = Rhs { st, n: st.n() as f64 };
    let (start, y0) = match seed {
        RadialSeed::Regular { u0 } => (0.0, [u0, 0.0]),
        RadialSeed::Annular { r0, u0, slope } => {
            let j = st.jet(u0)?;
            let w2 = j.v * j.v - slope * slope;
            if !(r0 > 0.0) || !(w2 > 0.0) {
                return Err(HypersurfaceError::Radial {
                    r: r0,
                    reason: "annular seed needs r0 > 0 and |slope| < f(u0)".into(),
                });
            }
            (r0, [u0, j.v.powi(st.n() as i32 - 1) * slope / w2.sqrt()])
        }
    };
    let (back, stop_b) = if r_lo < start {
        integrate(&rhs, start, y0, r_lo, opts)
    } else {
        (Vec::new(), None)
    };
    let (fwd, stop_f) = integrate(&rhs, start, y0, r_hi.max(start), opts);
    let mut pts: Vec<(f64, f64, f64)> = back.into_iter().skip(1).rev().collect();
    pts.extend(fwd);
    if pts.is_empty() {
        return Err(HypersurfaceError::Radial {
            r: start,
            reason: stop_f.map_or_else(|| "no solution".into(), |s| s.reason),
        });
    }
    Ok(RadialProfile {
        r: pts.iter().map(|p| p.0).collect(),
        u: pts.iter().map(|p| p.1).collect(),
        du: pts.iter().map(|p| p.2).collect(),
        stop: stop_f.or(stop_b),
    })
}

/// Samples a radial maximal solution onto a box grid.
pub fn radial_maximal_patch(
    st: &Spacetime,
    bounds: &[(f64, f64)],
    res: &[usize],
    seed: RadialSeed,
    opts: &RadialOptions,
) -> Result<GraphHypersurface, HypersurfaceError> {
    super::check_box(st.n(), bounds, res)?;
    let grid = Arc::new(Grid::new(bounds, res));
    let radius = |i: usize| grid.coords(i).iter().map(|x| x * x).sum::<f64>().sqrt();
    let (mut r_lo, mut r_hi) = (f64::INFINITY, 0.0_f64);
    for i in 0..grid.len() {
        let r = radius(i);
        r_lo = r_lo.min(r);
        r_hi = r_hi.max(r);
    }
    let prof = radial_profile(st, seed, r_lo, r_hi, opts)?;
    let (lo, hi) = prof.range();
    if r_lo < lo || r_hi > hi {
        let stop = prof.stop.unwrap_or(RadialStop {
            r: if r_lo < lo { lo } else { hi },
            reason: "solution does not cover the box".into(),
        });
        return Err(HypersurfaceError::Radial {
            r: stop.r,
            reason: stop.reason,
        });
    }
    let u = (0..grid.len())
        .map(|i| prof.eval(radius(i)).expect("covered radius"))
        .collect();
    from_values(st, grid, u)
}

/// Regular radial maximal graph with `u(0) = u0` over the cube `[-L, L]ⁿ`,
/// `L = r_max/√n`, so the corners sit at radius `r_max`.
pub fn radial_maximal_graph(
    st: &Spacetime,
    r_max: f64,
    u0: f64,
    res: usize,
) -> Result<GraphHypersurface, HypersurfaceError> {
    let n = st.n();
    let half = r_max / (n as f64).sqrt();
    radial_maximal_patch(
        st,
        &vec![(-half, half); n],
        &vec![res; n],
        RadialSeed::Regular { u0 },
        &RadialOptions::default(),
    )
}
