//! Spacelike graphs `t = u(x)` over a box in the flat fiber, sampled on a
//! uniform grid, and the discrete geometry needed to check the curvature
//! identities of maximal hypersurfaces numerically.
//!
//! All derivatives are centered second-order differences. Nothing is
//! one-sided: every stencil application shrinks the valid region by one
//! node, and each [`DiscreteField`] records the boundary band it has lost.
//!
//! | quantity                     | margin |
//! |------------------------------|--------|
//! | `Du`, frame, metric, `N`     | 1      |
//! | `A`, `H`, `Δτ`, `Hess τ`     | 2      |
//! | Codazzi / metric Ricci, `Δ sinh²φ` | 3 |
//!
//! Orientation: `N` is future pointing, so `ḡ(N, ∂t) = -cosh φ ≤ -1`, and
//! `A X = -∇̄_X N`, `H = -tr(A)/n`. With these conventions a slice `t = t0`
//! has `H = f'(t0)/f(t0)` and the future hyperboloid `u = √(a²+|x|²)` in
//! Minkowski space has `H = +1/a`.

mod ambient;
mod extrinsic;
mod grid;
mod identities;
mod radial;

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::expr::{EvalError, Jet2, WarpExpr};
use crate::warp::{ConditionVerdict, Spacetime, WarpError};

pub use ambient::{ambient_ricci, AmbientCurvature};
pub use extrinsic::{mean_curvature, shape_operator, MeanCurvature, ShapeOperator};
pub use grid::{DiscreteField, Grid};
pub use identities::{
    intrinsic_ricci, intrinsic_ricci_from_metric, ricci_kt_n, verify_hessian_identity, verify_lemma1,
    HessianCheck, IntrinsicRicci, Lemma1Report, RicciKtN, TangentField,
};
pub use radial::{
    radial_maximal_graph, radial_maximal_patch, radial_profile, RadialOptions, RadialProfile, RadialSeed, RadialStop,
};

use grid::{d1, map_band};

/// Smallest number of nodes per axis; leaves room for the widest stencil chain.
pub const MIN_RES: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HypersurfaceError {
    #[error("box has {got} axes but the fiber has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("axis {axis}: need at least {MIN_RES} nodes, got {res}")]
    TooFewNodes { axis: usize, res: usize },
    #[error("axis {axis}: empty or non-finite range [{lo}, {hi}]")]
    BadBox { axis: usize, lo: f64, hi: f64 },
    #[error("expected {expected} node values, got {got}")]
    NodeCount { expected: usize, got: usize },
    #[error("graph function must use the variables {expected:?}, found {got:?}")]
    WrongVariables { expected: Vec<String>, got: Vec<String> },
    #[error("unbound parameter `{0}` in the graph function")]
    UnboundParameter(String),
    #[error("graph function failed at node {node:?}: {source}")]
    Eval {
        node: Vec<usize>,
        #[source]
        source: EvalError,
    },
    #[error("u = {value} at node {node:?} (x = {x:?}) lies outside the time interval")]
    LeavesInterval { node: Vec<usize>, x: Vec<f64>, value: f64 },
    #[error("graph is not spacelike: at node {node:?} (x = {x:?}) f(u)² - |Du|² = {margin}")]
    NotSpacelike { node: Vec<usize>, x: Vec<f64>, margin: f64 },
    #[error("stencil needs margin {needed} but the grid has only {res:?} nodes")]
    StencilRoom { needed: usize, res: Vec<usize> },
    #[error("graph is not maximal: max |H| = {max_h:e} exceeds {tol:e}")]
    NotMaximal { max_h: f64, tol: f64 },
    #[error("null convergence condition not established on the time range [{lo}, {hi}] ({status:?}, margin {margin:e})")]
    NccViolated {
        lo: f64,
        hi: f64,
        status: crate::warp::ConditionStatus,
        margin: f64,
    },
    #[error("vector field has {got} components, expected {expected}")]
    VectorLength { expected: usize, got: usize },
    #[error("radial integration stopped at r = {r}: {reason}")]
    Radial { r: f64, reason: String },
    #[error(transparent)]
    Warp(#[from] WarpError),
}

impl HypersurfaceError {
    pub(crate) fn ncc(lo: f64, hi: f64, v: &ConditionVerdict) -> Self {
        Self::NccViolated {
            lo,
            hi,
            status: v.status,
            margin: v.margin,
        }
    }
}

/// Where the node values of `u` come from.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    /// An expression in `x_1, …, x_n`; parameters are taken from the spacetime's bindings.
    Expr(WarpExpr),
    /// Row-major node values, last axis fastest.
    Nodes(Vec<f64>),
}

impl GraphSource {
    /// Parses an expression in `x_1, …, x_n`.
    pub fn parse(source: &str, n: usize) -> Result<Self, crate::expr::ParseError> {
        WarpExpr::parse_with_vars(source, &coordinate_names(n)).map(Self::Expr)
    }
}

/// `x_1, …, x_n`.
pub fn coordinate_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x_{i}")).collect()
}

/// Per-node frame of the graph, all in ambient coordinates `(t, x_1, …, x_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameData {
    /// `∂_i u`
    pub du: DVector<f64>,
    /// `(f, f', f'')` at `τ = u`.
    pub warp: Jet2,
    /// Columns `e_i = ∂_i + (∂_i u) ∂_t`, shape `(n+1) × n`.
    pub tangents: DMatrix<f64>,
    /// Future-pointing unit normal `N = cosh φ (∂_t + f⁻² Du·∂_x)`.
    pub normal: DVector<f64>,
    /// `g_ij = f² δ_ij - ∂_i u ∂_j u`
    pub metric: DMatrix<f64>,
    pub metric_inv: DMatrix<f64>,
    pub cosh_phi: f64,
    /// `|Du|² / (f² - |Du|²)`, free of the cancellation in `cosh² - 1`.
    pub sinh2_phi: f64,
    /// `√det g = f^{n-1} √(f² - |Du|²)`
    pub sqrt_det: f64,
}

impl FrameData {
    fn new(du: DVector<f64>, warp: Jet2) -> Self {
        let n = du.len();
        let f = warp.v;
        let f2 = f * f;
        let p2 = du.norm_squared();
        let w2 = f2 - p2;
        let cosh_phi = f / w2.sqrt();
        let mut tangents = DMatrix::zeros(n + 1, n);
        for i in 0..n {
            tangents[(0, i)] = du[i];
            tangents[(i + 1, i)] = 1.0;
        }
        let mut normal = DVector::zeros(n + 1);
        normal[0] = cosh_phi;
        for i in 0..n {
            normal[i + 1] = cosh_phi * du[i] / f2;
        }
        let ppt = &du * du.transpose();
        let metric = DMatrix::identity(n, n) * f2 - &ppt;
        let metric_inv = (DMatrix::identity(n, n) + ppt / w2) / f2;
        Self {
            du,
            warp,
            tangents,
            normal,
            metric,
            metric_inv,
            cosh_phi,
            sinh2_phi: p2 / w2,
            sqrt_det: f.powi(n as i32 - 1) * w2.sqrt(),
        }
    }

    pub fn dim(&self) -> usize {
        self.du.len()
    }

    /// `f'/f` at `τ`.
    pub fn hubble(&self) -> f64 {
        self.warp.d1 / self.warp.v
    }

    /// `(log f)''` at `τ`.
    pub fn log_f_second(&self) -> f64 {
        let h = self.hubble();
        self.warp.d2 / self.warp.v - h * h
    }

    /// Ambient metric `-v_t w_t + f² v·w`.
    pub fn ambient_dot(&self, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let f2 = self.warp.v * self.warp.v;
        -v[0] * w[0] + f2 * v.rows(1, self.dim()).dot(&w.rows(1, self.dim()))
    }

    /// Induced metric `g(X, Y)` on tangent components.
    pub fn dot(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.metric * y))
    }

    /// Tangent components of `∂_t^T = -∇τ`, i.e. `-g^{ij} ∂_j u`.
    pub fn dt_tangent(&self) -> DVector<f64> {
        -(&self.metric_inv * &self.du)
    }

    /// Ambient components of a tangent vector.
    pub fn push_forward(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.tangents * y
    }
}

/// A spacelike graph `t = u(x)` sampled on a grid. Immutable after construction.
#[derive(Debug)]
pub struct GraphHypersurface {
    st: Spacetime,
    grid: Arc<Grid>,
    u: Vec<f64>,
    frames: Vec<Option<FrameData>>,
    shape: OnceLock<ShapeOperator>,
    christoffel: OnceLock<Vec<Option<Vec<f64>>>>,
}

impl Clone for GraphHypersurface {
    fn clone(&self) -> Self {
        Self {
            st: self.st.clone(),
            grid: self.grid.clone(),
            u: self.u.clone(),
            frames: self.frames.clone(),
            shape: OnceLock::new(),
            christoffel: OnceLock::new(),
        }
    }
}

/// Builds and validates a graph over `bounds` (one `(a_i, b_i)` per fiber axis).
pub fn make_graph(
    st: &Spacetime,
    bounds: &[(f64, f64)],
    res: &[usize],
    source: &GraphSource,
) -> Result<GraphHypersurface, HypersurfaceError> {
    let n = st.n();
    check_box(n, bounds, res)?;
    let grid = Arc::new(Grid::new(bounds, res));
    let u = match source {
        GraphSource::Nodes(values) => {
            if values.len() != grid.len() {
                return Err(HypersurfaceError::NodeCount {
                    expected: grid.len(),
                    got: values.len(),
                });
            }
            values.clone()
        }
        GraphSource::Expr(e) => {
            let want = coordinate_names(n);
            if e.vars() != want.as_slice() {
                return Err(HypersurfaceError::WrongVariables {
                    expected: want,
                    got: e.vars().to_vec(),
                });
            }
            if let Some(p) = e.unbound_param(st.bindings()) {
                return Err(HypersurfaceError::UnboundParameter(p.to_string()));
            }
            let vals = map_band(&grid, 0, |i| Some(e.eval(&grid.coords(i), st.bindings())));
            let mut u = Vec::with_capacity(grid.len());
            for (i, v) in vals.into_iter().enumerate() {
                match v.expect("band 0 covers every node") {
                    Ok(x) => u.push(x),
                    Err(source) => {
                        return Err(HypersurfaceError::Eval {
                            node: grid.multi_index(i),
                            source,
                        })
                    }
                }
            }
            u
        }
    };
    from_values(st, grid, u)
}

fn check_box(n: usize, bounds: &[(f64, f64)], res: &[usize]) -> Result<(), HypersurfaceError> {
    if bounds.len() != n || res.len() != n {
        return Err(HypersurfaceError::DimensionMismatch {
            expected: n,
            got: if bounds.len() != n { bounds.len() } else { res.len() },
        });
    }
    for (axis, (&(lo, hi), &r)) in bounds.iter().zip(res).enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(HypersurfaceError::BadBox { axis, lo, hi });
        }
        if r < MIN_RES {
            return Err(HypersurfaceError::TooFewNodes { axis, res: r });
        }
    }
    Ok(())
}

fn from_values(st: &Spacetime, grid: Arc<Grid>, u: Vec<f64>) -> Result<GraphHypersurface, HypersurfaceError> {
    let n = grid.dim();
    if let Some(i) = (0..grid.len()).find(|&i| !st.interval().contains(u[i])) {
        return Err(HypersurfaceError::LeavesInterval {
            node: grid.multi_index(i),
            x: grid.coords(i),
            value: u[i],
        });
    }
    let jets: Vec<Result<Jet2, WarpError>> = map_band(&grid, 0, |i| Some(st.jet(u[i])))
        .into_iter()
        .map(|j| j.expect("band 0 covers every node"))
        .collect();
    let mut warp = Vec::with_capacity(jets.len());
    for j in jets {
        warp.push(j?);
    }

    let frames = map_band(&grid, 1, |i| {
        let du = DVector::from_fn(n, |a, _| d1(&grid, &u, i, a));
        Some(FrameData::new(du, warp[i]))
    });

    // worst spacelike margin, first in node order on ties
    let mut worst: Option<(usize, f64)> = None;
    for (i, fr) in frames.iter().enumerate() {
        if let Some(fr) = fr {
            let margin = fr.warp.v * fr.warp.v - fr.du.norm_squared();
            if !(margin > 0.0) && worst.is_none_or(|(_, m)| margin < m) {
                worst = Some((i, margin));
            }
        }
    }
    if let Some((i, margin)) = worst {
        return Err(HypersurfaceError::NotSpacelike {
            node: grid.multi_index(i),
            x: grid.coords(i),
            margin,
        });
    }

    Ok(GraphHypersurface {
        st: st.clone(),
        grid,
        u,
        frames,
        shape: OnceLock::new(),
        christoffel: OnceLock::new(),
    })
}

impl GraphHypersurface {
    pub fn spacetime(&self) -> &Spacetime {
        &self.st
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub(crate) fn grid_arc(&self) -> Arc<Grid> {
        self.grid.clone()
    }

    pub fn n(&self) -> usize {
        self.grid.dim()
    }

    /// Node values of `τ = u`, row-major.
    pub fn values(&self) -> &[f64] {
        &self.u
    }

    /// `τ` as a field (margin 0).
    pub fn tau(&self) -> DiscreteField {
        DiscreteField::tabulate(self.grid.clone(), 0, |i| self.u[i])
    }

    /// Frame at a flat node index; `None` on the boundary.
    pub fn frame(&self, idx: usize) -> Option<&FrameData> {
        self.frames.get(idx).and_then(Option::as_ref)
    }

    #[cfg(test)]
    pub(crate) fn frames(&self) -> &[Option<FrameData>] {
        &self.frames
    }

    /// Smallest `f(u)² - |Du|²` over interior nodes.
    pub fn spacelike_margin(&self) -> f64 {
        self.frames
            .iter()
            .flatten()
            .map(|fr| fr.warp.v * fr.warp.v - fr.du.norm_squared())
            .fold(f64::INFINITY, f64::min)
    }

    /// `(min u, max u)` over all nodes.
    pub fn tau_range(&self) -> (f64, f64) {
        self.u
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Field computed from each interior frame.
    pub fn frame_field<F>(&self, f: F) -> DiscreteField
    where
        F: Fn(&FrameData) -> f64 + Sync,
    {
        DiscreteField::tabulate(self.grid.clone(), 1, |i| f(self.frames[i].as_ref().expect("margin-1 frame")))
    }

    pub(crate) fn need_margin(&self, needed: usize) -> Result<(), HypersurfaceError> {
        if self.grid.res().iter().all(|&r| r > 2 * needed) {
            Ok(())
        } else {
            Err(HypersurfaceError::StencilRoom {
                needed,
                res: self.grid.res().to_vec(),
            })
        }
    }
}

/// `cosh φ`, `sinh²φ`, and `|∇τ|² = g^{ij} ∂_i u ∂_j u` (equal to `sinh²φ`).
#[derive(Debug, Clone)]
pub struct HyperbolicAngle {
    pub cosh: DiscreteField,
    pub sinh2: DiscreteField,
    pub grad_tau_norm2: DiscreteField,
}

impl HyperbolicAngle {
    /// `max |g^{ij}u_i u_j - (cosh²φ - 1)|`.
    pub fn identity_residual(&self) -> f64 {
        self.grad_tau_norm2
            .zip_with(&self.cosh, |g, c| (g - (c * c - 1.0)).abs())
            .max_abs()
    }
}

pub fn hyperbolic_angle(gh: &GraphHypersurface) -> HyperbolicAngle {
    HyperbolicAngle {
        cosh: gh.frame_field(|fr| fr.cosh_phi),
        sinh2: gh.frame_field(|fr| fr.sinh2_phi),
        grad_tau_norm2: gh.frame_field(|fr| fr.du.dot(&(&fr.metric_inv * &fr.du))),
    }
}

/// `Δh = |g|^{-1/2} ∂_i(|g|^{1/2} g^{ij} ∂_j h)`: centered gradient, flux at
/// the node, centered divergence. The result loses two nodes of margin.
pub fn laplace_beltrami(gh: &GraphHypersurface, field: &DiscreteField) -> Result<DiscreteField, HypersurfaceError> {
    if field.grid() != gh.grid() {
        return Err(HypersurfaceError::DimensionMismatch {
            expected: gh.n(),
            got: field.grid().dim(),
        });
    }
    let out_margin = field.margin().max(0) + 2;
    gh.need_margin(out_margin)?;
    let grid = gh.grid_arc();
    let n = gh.n();
    let data = field.raw();
    let flux_margin = field.margin() + 1;
    let flux: Vec<Option<DVector<f64>>> = map_band(&grid, flux_margin, |i| {
        let fr = gh.frame(i)?;
        let grad = DVector::from_fn(n, |a, _| d1(&grid, data, i, a));
        Some(&fr.metric_inv * grad * fr.sqrt_det)
    });
    Ok(DiscreteField::tabulate(grid.clone(), out_margin, |i| {
        let fr = gh.frame(i).expect("margin-1 frame");
        let div: f64 = (0..n)
            .map(|a| {
                let s = grid.stride(a);
                let up = flux[i + s].as_ref().expect("flux band")[a];
                let dn = flux[i - s].as_ref().expect("flux band")[a];
                (up - dn) / (2.0 * grid.spacing()[a])
            })
            .sum();
        div / fr.sqrt_det
    }))
}

/// Parses the node-array text format: a header line `dims r1 … rn`, then
/// `r1·…·rn` whitespace-separated values of `u` in row-major order.
pub fn parse_node_array(text: &str) -> Result<(Vec<usize>, Vec<f64>), String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or("empty node array")?;
    let mut words = header.split_whitespace();
    if words.next() != Some("dims") {
        return Err("node array must start with a `dims r1 ... rn` header".into());
    }
    let res: Vec<usize> = words
        .map(|w| w.parse::<usize>().map_err(|_| format!("bad resolution `{w}` in header")))
        .collect::<Result<_, _>>()?;
    if res.is_empty() {
        return Err("header lists no dimensions".into());
    }
    let values: Vec<f64> = lines
        .flat_map(str::split_whitespace)
        .map(|w| w.parse::<f64>().map_err(|_| format!("bad value `{w}`")))
        .collect::<Result<_, _>>()?;
    let want: usize = res.iter().product();
    if values.len() != want {
        return Err(format!("expected {want} values, found {}", values.len()));
    }
    Ok((res, values))
}

/// Inverse of [`parse_node_array`].
pub fn write_node_array(res: &[usize], values: &[f64]) -> String {
    let mut out = String::from("dims");
    for r in res {
        out.push_str(&format!(" {r}"));
    }
    out.push('\n');
    let row = *res.last().unwrap_or(&1);
    for chunk in values.chunks(row.max(1)) {
        let line: Vec<String> = chunk.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
