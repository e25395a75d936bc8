//! Python bindings: `import warpgeom`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use warpgeom::catalog::{get_preset, list_presets};
use warpgeom::expr::{Bindings, WarpExpr};
use warpgeom::hypersurface::{
    make_graph, mean_curvature, radial_maximal_patch, ricci_kt_n, verify_hessian_identity, verify_lemma1,
    GraphHypersurface, GraphSource, RadialOptions, RadialSeed,
};
use warpgeom::warp::{classify, Interval, SamplerConfig};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn bindings(params: Option<Bindings>) -> Bindings {
    params.unwrap_or_default()
}

/// A parsed expression in `t` with named parameters.
#[pyclass(module = "warpgeom", name = "Expr", frozen)]
struct Expr(WarpExpr);

#[pymethods]
impl Expr {
    #[new]
    fn new(source: &str) -> PyResult<Self> {
        WarpExpr::parse(source).map(Self).map_err(err)
    }

    /// `(f, f', f'')` at `t`.
    #[pyo3(signature = (t, params=None))]
    fn jet(&self, t: f64, params: Option<Bindings>) -> PyResult<(f64, f64, f64)> {
        let j = self.0.eval_jet2(t, &bindings(params)).map_err(err)?;
        Ok((j.v, j.d1, j.d2))
    }

    fn params(&self) -> Vec<String> {
        self.0.params().iter().cloned().collect()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr({:?})", self.0.to_string())
    }
}

/// Robertson-Walker spacetime `-dt² + f(t)²|dx|²` with an n-dimensional flat fiber.
#[pyclass(module = "warpgeom", name = "Spacetime", frozen)]
struct Spacetime {
    inner: warpgeom::warp::Spacetime,
    region: Interval,
}

#[pymethods]
impl Spacetime {
    #[new]
    #[pyo3(signature = (f, interval="(-inf,inf)", n=3, params=None, region=None))]
    fn new(f: &str, interval: &str, n: usize, params: Option<Bindings>, region: Option<&str>) -> PyResult<Self> {
        let b = bindings(params);
        let iv = Interval::parse_with(interval, &b).map_err(err)?;
        let region = match region {
            Some(r) => Interval::parse_with(r, &b).map_err(err)?,
            None => iv,
        };
        let expr = WarpExpr::parse(f).map_err(err)?;
        let inner = warpgeom::warp::Spacetime::new(n, iv, expr, b).map_err(err)?;
        Ok(Self { inner, region })
    }

    /// A builtin preset, optionally with another dimension or parameter values.
    #[staticmethod]
    #[pyo3(signature = (name, n=None, params=None))]
    fn preset(name: &str, n: Option<usize>, params: Option<Bindings>) -> PyResult<Self> {
        let p = get_preset(name).map_err(err)?;
        let b = bindings(params);
        Ok(Self {
            inner: p.spacetime_with(n, &b).map_err(err)?,
            region: p.region_with(&b).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn f(&self) -> String {
        self.inner.warp().to_string()
    }

    #[getter]
    fn interval(&self) -> String {
        self.inner.interval().to_string()
    }

    #[getter]
    fn region(&self) -> String {
        self.region.to_string()
    }

    fn jet(&self, t: f64) -> PyResult<(f64, f64, f64)> {
        let j = self.inner.jet(t).map_err(err)?;
        Ok((j.v, j.d1, j.d2))
    }

    fn hubble(&self, t: f64) -> PyResult<f64> {
        self.inner.hubble(t).map_err(err)
    }

    fn log_f_second(&self, t: f64) -> PyResult<f64> {
        self.inner.log_f_second(t).map_err(err)
    }

    /// `(n+1)(f'/f)² - n f''/f`
    fn criterion(&self, t: f64) -> PyResult<f64> {
        self.inner.criterion_value(t).map_err(err)
    }

    fn criterion_fluid_form(&self, t: f64) -> PyResult<f64> {
        self.inner.criterion_fluid_form(t).map_err(err)
    }

    /// `(rho, p)`
    fn fluid(&self, t: f64) -> PyResult<(f64, f64)> {
        let s = self.inner.fluid_state(t).map_err(err)?;
        Ok((s.rho, s.p))
    }

    /// Verdict, failure mode, maximal slices and the criterion infimum over `region`.
    #[pyo3(signature = (region=None))]
    fn classify<'py>(&self, py: Python<'py>, region: Option<&str>) -> PyResult<Bound<'py, PyDict>> {
        let region = match region {
            Some(r) => Interval::parse_with(r, self.inner.bindings()).map_err(err)?,
            None => self.region,
        };
        let r = classify(&self.inner, &region, &SamplerConfig::default()).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("region", region.to_string())?;
        d.set_item("verdict", r.verdict.as_str())?;
        d.set_item("failure_mode", r.failure_mode.map(|m| m.as_str()))?;
        d.set_item("slices", r.maximal_slices.iter().map(|s| s.t0).collect::<Vec<_>>())?;
        d.set_item("criterion_inf", (r.criterion_inf.lower, r.criterion_inf.upper))?;
        for (k, c) in [("ncc", &r.ncc), ("wec", &r.wec), ("sec", &r.sec), ("dec", &r.dec)] {
            d.set_item(k, c.status.as_str())?;
        }
        d.set_item("notes", r.notes)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Spacetime(f={:?}, interval={:?}, n={})", self.f(), self.interval(), self.n())
    }
}

/// Spacelike graph `t = u(x)` sampled on a box grid.
#[pyclass(module = "warpgeom", name = "Graph", frozen)]
struct Graph(GraphHypersurface);

fn box_res(domain: &[(f64, f64)], res: usize) -> Vec<usize> {
    vec![res; domain.len()]
}

#[pymethods]
impl Graph {
    /// `u` is an expression in `x_1, …, x_n`; `domain` has one `(lo, hi)` per axis.
    #[new]
    #[pyo3(signature = (spacetime, u, domain, res=33))]
    fn new(spacetime: &Spacetime, u: &str, domain: Vec<(f64, f64)>, res: usize) -> PyResult<Self> {
        let n = spacetime.inner.n();
        let src = GraphSource::parse(u, n).map_err(err)?;
        make_graph(&spacetime.inner, &domain, &box_res(&domain, res), &src)
            .map(Self)
            .map_err(err)
    }

    /// Radial maximal solution through `u(r0) = u0`, `u'(r0) = slope` (`r0 = 0` for the regular seed).
    #[staticmethod]
    #[pyo3(signature = (spacetime, domain, u0, res=33, r0=0.0, slope=0.0))]
    fn radial(spacetime: &Spacetime, domain: Vec<(f64, f64)>, u0: f64, res: usize, r0: f64, slope: f64) -> PyResult<Self> {
        let seed = if r0 == 0.0 {
            RadialSeed::Regular { u0 }
        } else {
            RadialSeed::Annular { r0, u0, slope }
        };
        radial_maximal_patch(&spacetime.inner, &domain, &box_res(&domain, res), seed, &RadialOptions::default())
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn res(&self) -> Vec<usize> {
        self.0.grid().res().to_vec()
    }

    /// Node values of `u`, row-major.
    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    fn tau_range(&self) -> (f64, f64) {
        self.0.tau_range()
    }

    fn max_mean_curvature(&self) -> PyResult<f64> {
        Ok(mean_curvature(&self.0).map_err(err)?.max_abs())
    }

    /// Worst disagreement of the two mean-curvature routes.
    fn mean_curvature_residual(&self) -> PyResult<f64> {
        Ok(mean_curvature(&self.0).map_err(err)?.residual.max_abs())
    }

    fn hessian_residual(&self) -> PyResult<f64> {
        Ok(verify_hessian_identity(&self.0).map_err(err)?.residual.max_abs())
    }

    fn ricci_kt_n_residual(&self) -> PyResult<f64> {
        Ok(ricci_kt_n(&self.0).map_err(err)?.residual.max_abs())
    }

    /// `(min_slack, max_h)`; raises if the graph is not maximal within the tolerance.
    #[pyo3(signature = (maximality_tol=1e-4))]
    fn lemma1(&self, maximality_tol: f64) -> PyResult<(f64, f64)> {
        let r = verify_lemma1(&self.0, maximality_tol).map_err(err)?;
        Ok((r.min_slack, r.max_h))
    }
}

/// Names of the builtin presets.
#[pyfunction]
fn presets() -> Vec<String> {
    list_presets().into_iter().map(|p| p.name).collect()
}

#[pymodule]
#[pyo3(name = "warpgeom")]
fn warpgeom_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Expr>()?;
    m.add_class::<Spacetime>()?;
    m.add_class::<Graph>()?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
