//! Robertson-Walker spacetimes `I ×_f ℝⁿ` with metric `-dt² + f(t)² |dx|²`.
//!
//! Everything here depends on the warping function only through the jet
//! `(f, f', f'')` at a time `t`. Region-wide statements (conditions,
//! infima, maximal slices, the final verdict) are sampling-based: an
//! adaptive grid plus local refinement and geometric endpoint probes. They
//! assume `f` is smooth on the sampled region and are not proofs.

mod classify;
mod conditions;
mod interval;
mod sampler;
mod slices;

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{Bindings, EvalError, Jet2, WarpExpr};

pub use classify::{classify, ClassificationReport, FailureMode, Verdict};
pub use conditions::{check_ncc, energy_conditions, ConditionStatus, ConditionVerdict, EnergyConditions};
pub use interval::{Endpoint, Interval, IntervalParseError};
pub use sampler::{endpoint_limit, infimum, EndpointLimit, IntervalBound, SamplerConfig};
pub use slices::{maximal_slices, MaximalSlice, SliceKind};

/// Half-width of the window used to spot-check positivity on unbounded intervals.
const POSITIVITY_WINDOW: f64 = 10.0;
const POSITIVITY_SAMPLES: usize = 257;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WarpError {
    #[error("spatial dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("warping function must depend on `t` only, found variables {0:?}")]
    WrongVariables(Vec<String>),
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("t = {t} lies outside the interval {interval}")]
    OutsideInterval { t: f64, interval: Interval },
    #[error("region {region} is not contained in the closure of {interval}")]
    RegionOutsideInterval { region: Interval, interval: Interval },
    #[error("region {0} is unbounded; a truncation bound is required")]
    UnboundedRegion(Interval),
    #[error("warping function is not positive at t = {t} (f = {value})")]
    NonPositiveWarp { t: f64, value: f64 },
    #[error("evaluation failed at t = {t}: {source}")]
    Eval {
        t: f64,
        #[source]
        source: EvalError,
    },
}

/// Perfect-fluid energy density and pressure (geometrized units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluidState {
    pub rho: f64,
    pub p: f64,
}

/// The spacetime `I ×_f ℝⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spacetime {
    n: usize,
    interval: Interval,
    warp: WarpExpr,
    bindings: Bindings,
}

impl Spacetime {
    /// Validates `n ≥ 2`, the bindings, and positivity of `f` on a sample of `I`.
    pub fn new(
        n: usize,
        interval: Interval,
        warp: WarpExpr,
        bindings: Bindings,
    ) -> Result<Self, WarpError> {
        if n < 2 {
            return Err(WarpError::InvalidDimension(n));
        }
        if warp.vars() != ["t"] {
            return Err(WarpError::WrongVariables(warp.vars().to_vec()));
        }
        if let Some(p) = warp.unbound_param(&bindings) {
            return Err(WarpError::UnboundParameter(p.to_string()));
        }
        let st = Self {
            n,
            interval,
            warp,
            bindings,
        };
        st.check_positivity()?;
        Ok(st)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn warp(&self) -> &WarpExpr {
        &self.warp
    }

    pub fn bindings(&self) -> &Bindings {
        &self.bindings
    }

    /// Same spacetime in another spatial dimension.
    pub fn with_dimension(&self, n: usize) -> Result<Self, WarpError> {
        if n < 2 {
            return Err(WarpError::InvalidDimension(n));
        }
        Ok(Self { n, ..self.clone() })
    }

    fn check_positivity(&self) -> Result<(), WarpError> {
        let lo = self.interval.lo.value.max(-POSITIVITY_WINDOW);
        let hi = self.interval.hi.value.min(POSITIVITY_WINDOW);
        if lo > hi {
            return Ok(());
        }
        let m = POSITIVITY_SAMPLES;
        for i in 0..m {
            let t = lo + (hi - lo) * i as f64 / (m - 1) as f64;
            if self.interval.contains(t) {
                self.jet(t)?;
            }
        }
        Ok(())
    }

    /// `(f, f', f'')` at `t`; fails outside `I` or where `f ≤ 0`.
    pub fn jet(&self, t: f64) -> Result<Jet2, WarpError> {
        if !self.interval.contains(t) {
            return Err(WarpError::OutsideInterval {
                t,
                interval: self.interval,
            });
        }
        let j = self
            .warp
            .eval_jet2(t, &self.bindings)
            .map_err(|source| WarpError::Eval { t, source })?;
        if j.v <= 0.0 {
            return Err(WarpError::NonPositiveWarp { t, value: j.v });
        }
        Ok(j)
    }

    /// Hubble function `f'/f`; `div(∂t) = n f'/f`.
    pub fn hubble(&self, t: f64) -> Result<f64, WarpError> {
        let j = self.jet(t)?;
        Ok(j.d1 / j.v)
    }

    /// `div(∂t) = n f'/f`.
    pub fn div_dt(&self, t: f64) -> Result<f64, WarpError> {
        Ok(self.n as f64 * self.hubble(t)?)
    }

    /// `(log f)'' = f''/f - (f'/f)²`; the null convergence condition is `(log f)'' ≤ 0`.
    pub fn log_f_second(&self, t: f64) -> Result<f64, WarpError> {
        let j = self.jet(t)?;
        let h = j.d1 / j.v;
        Ok(j.d2 / j.v - h * h)
    }

    /// `(n+1)(f'/f)² - n f''/f`.
    pub fn criterion_value(&self, t: f64) -> Result<f64, WarpError> {
        let j = self.jet(t)?;
        let n = self.n as f64;
        let h = j.d1 / j.v;
        Ok((n + 1.0) * h * h - n * j.d2 / j.v)
    }

    /// Density and pressure of the comoving perfect fluid:
    /// `8πρ = n(n-1)/2 (f'/f)²`, `8πp = -(n-1) f''/f - (n-1)(n-2)/2 (f'/f)²`.
    pub fn fluid_state(&self, t: f64) -> Result<FluidState, WarpError> {
        let j = self.jet(t)?;
        let n = self.n as f64;
        let h2 = (j.d1 / j.v).powi(2);
        let rho8 = 0.5 * n * (n - 1.0) * h2;
        let p8 = -(n - 1.0) * j.d2 / j.v - 0.5 * (n - 1.0) * (n - 2.0) * h2;
        Ok(FluidState {
            rho: rho8 / (8.0 * PI),
            p: p8 / (8.0 * PI),
        })
    }

    /// `8π/(n-1) · ((n²+2)/n · ρ + n p)`, which equals [`Self::criterion_value`].
    pub fn criterion_fluid_form(&self, t: f64) -> Result<f64, WarpError> {
        let FluidState { rho, p } = self.fluid_state(t)?;
        let n = self.n as f64;
        Ok(8.0 * PI / (n - 1.0) * ((n * n + 2.0) / n * rho + n * p))
    }

    /// Ambient Ricci tensor at time `t` applied to two vectors given by
    /// coordinate components `(v_t, v_1, …, v_n)`:
    /// `Ric(∂t,∂t) = -n f''/f`, `Ric(∂i,∂j) = (f f'' + (n-1) f'²) δij`, mixed terms vanish.
    pub fn ambient_ricci(&self, t: f64, v: &[f64], w: &[f64]) -> Result<f64, WarpError> {
        assert_eq!(v.len(), self.n + 1, "vector must have n+1 components");
        assert_eq!(w.len(), self.n + 1, "vector must have n+1 components");
        let j = self.jet(t)?;
        let n = self.n as f64;
        let tt = -n * j.d2 / j.v;
        let ff = j.v * j.d2 + (n - 1.0) * j.d1 * j.d1;
        let spatial: f64 = v[1..].iter().zip(&w[1..]).map(|(a, b)| a * b).sum();
        Ok(tt * v[0] * w[0] + ff * spatial)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn st(src: &str, interval: Interval, n: usize) -> Spacetime {
        let a = Bindings::from([("a".to_string(), 1.0)]);
        let e = parse(src).unwrap();
        let b = if e.params().is_empty() { Bindings::new() } else { a };
        Spacetime::new(n, interval, e, b).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn hubble_examples() {
        let s = st("exp(t)", Interval::real_line(), 3);
        for t in [-3.0, 0.0, 2.5] {
            assert!(close(s.hubble(t).unwrap(), 1.0, 1e-15));
        }
        assert_eq!(st("1", Interval::real_line(), 3).hubble(4.0).unwrap(), 0.0);
        let eds = st("t^(2/3)", Interval::open(0.0, f64::INFINITY), 3);
        assert!(close(eds.hubble(1.0).unwrap(), 2.0 / 3.0, 1e-15));
    }

    #[test]
    fn log_f_second_examples() {
        let g = st("exp(-t^2)", Interval::real_line(), 3);
        assert!(close(g.log_f_second(0.7).unwrap(), -2.0, 1e-14));
        let fr = st("sqrt(a^2-t^2)", Interval::open(-1.0, 1.0), 3);
        assert!(close(fr.log_f_second(0.0).unwrap(), -1.0, 1e-15));
        assert_eq!(st("exp(t)", Interval::real_line(), 3).log_f_second(1.3).unwrap(), 0.0);
    }

    #[test]
    fn criterion_examples() {
        for n in 2..6 {
            let g = st("exp(-t^2)", Interval::real_line(), n);
            let t = 1.5_f64;
            let want = 2.0 * n as f64 + 4.0 * t * t;
            assert!(close(g.criterion_value(t).unwrap(), want, 1e-12 * want));
        }
        assert_eq!(st("1", Interval::real_line(), 3).criterion_value(0.3).unwrap(), 0.0);
    }

    #[test]
    fn fluid_examples() {
        let eds = st("t^(2/3)", Interval::open(0.0, f64::INFINITY), 3);
        let fl = eds.fluid_state(1.0).unwrap();
        assert!(close(fl.rho, 1.0 / (6.0 * PI), 1e-15));
        assert!(fl.p.abs() < 1e-15);
        assert!(close(eds.criterion_fluid_form(1.0).unwrap(), 22.0 / 9.0, 1e-14));
        assert!(close(eds.criterion_value(1.0).unwrap(), 22.0 / 9.0, 1e-14));

        let ss = st("exp(t)", Interval::real_line(), 3);
        let fl = ss.fluid_state(0.4).unwrap();
        assert!(close(8.0 * PI * fl.rho, 3.0, 1e-13));
        assert!(close(8.0 * PI * fl.p, -3.0, 1e-13));
        assert!((fl.rho + fl.p).abs() < 1e-15);

        let m = st("1", Interval::real_line(), 3).fluid_state(0.0).unwrap();
        assert_eq!((m.rho, m.p), (0.0, 0.0));
    }

    #[test]
    fn ambient_ricci_examples() {
        let eds = st("t^(2/3)", Interval::open(0.0, f64::INFINITY), 3);
        let dt = [1.0, 0.0, 0.0, 0.0];
        assert!(close(eds.ambient_ricci(1.0, &dt, &dt).unwrap(), 2.0 / 3.0, 1e-15));
        let m = st("1", Interval::real_line(), 3);
        let v = [0.3, -1.0, 2.0, 0.5];
        assert_eq!(m.ambient_ricci(0.0, &v, &dt).unwrap(), 0.0);
        assert_eq!(m.ambient_ricci(0.0, &v, &v).unwrap(), 0.0);
    }

    #[test]
    fn construction_errors() {
        let e = parse("exp(t)").unwrap();
        assert_eq!(
            Spacetime::new(1, Interval::real_line(), e.clone(), Bindings::new()).unwrap_err(),
            WarpError::InvalidDimension(1)
        );
        let e = parse("sqrt(a^2-t^2)").unwrap();
        assert!(matches!(
            Spacetime::new(3, Interval::open(-1.0, 1.0), e.clone(), Bindings::new()),
            Err(WarpError::UnboundParameter(_))
        ));
        let b = Bindings::from([("a".to_string(), 1.0)]);
        assert!(matches!(
            Spacetime::new(3, Interval::open(-2.0, 2.0), e, b),
            Err(WarpError::Eval { .. })
        ));
        assert!(matches!(
            Spacetime::new(3, Interval::real_line(), parse("t").unwrap(), Bindings::new()),
            Err(WarpError::NonPositiveWarp { .. })
        ));
        let s = st("exp(t)", Interval::open(0.0, 1.0), 3);
        assert!(matches!(s.jet(1.0), Err(WarpError::OutsideInterval { .. })));
    }
}
