use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::grid::{map_band, DiscreteField, Grid};
use super::{laplace_beltrami, GraphHypersurface, HypersurfaceError};

/// Per-node shape operator `A e_i = -∇̄_{e_i} N` as a matrix acting on tangent
/// components (column `i` holds `A e_i`). Defined on margin 2.
#[derive(Debug, Clone)]
pub struct ShapeOperator {
    grid: Arc<Grid>,
    mats: Vec<Option<DMatrix<f64>>>,
}

impl ShapeOperator {
    pub const MARGIN: usize = 2;

    pub fn get(&self, idx: usize) -> Option<&DMatrix<f64>> {
        self.mats.get(idx).and_then(Option::as_ref)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn trace(&self) -> DiscreteField {
        self.field(|a| a.trace())
    }

    /// Scalar field from each node's matrix.
    pub fn field<F>(&self, f: F) -> DiscreteField
    where
        F: Fn(&DMatrix<f64>) -> f64 + Sync,
    {
        DiscreteField::tabulate(self.grid.clone(), Self::MARGIN, |i| f(self.mats[i].as_ref().expect("margin-2 node")))
    }

    /// `max_ij |(gA)_ij - (gA)_ji|`; the continuum operator is `g`-self-adjoint.
    pub fn self_adjoint_residual(&self, gh: &GraphHypersurface) -> DiscreteField {
        DiscreteField::tabulate(self.grid.clone(), Self::MARGIN, |i| {
            let ga = &gh.frame(i).expect("frame").metric * self.mats[i].as_ref().expect("margin-2 node");
            (&ga - ga.transpose()).abs().max()
        })
    }
}

/// Centered differences of the normal's ambient components along each `e_i`,
/// plus the ambient Christoffel correction, projected onto the tangent space.
pub fn shape_operator(gh: &GraphHypersurface) -> Result<&ShapeOperator, HypersurfaceError> {
    gh.need_margin(ShapeOperator::MARGIN)?;
    Ok(gh.shape.get_or_init(|| compute(gh)))
}

fn compute(gh: &GraphHypersurface) -> ShapeOperator {
    let grid = gh.grid_arc();
    let n = gh.n();
    let mats = map_band(&grid, ShapeOperator::MARGIN, |i| {
        let fr = gh.frame(i)?;
        let (f, fp) = (fr.warp.v, fr.warp.d1);
        let hub = fp / f;
        let nrm = &fr.normal;
        let mut proj = DMatrix::zeros(n, n);
        for a in 0..n {
            let s = grid.stride(a);
            let up = &gh.frame(i + s)?.normal;
            let dn = &gh.frame(i - s)?.normal;
            let mut v: DVector<f64> = -(up - dn) / (2.0 * grid.spacing()[a]);
            // Γ(e_a, N) with e_a = ∂_a + u_a ∂_t
            v[0] -= f * fp * nrm[a + 1];
            for j in 0..n {
                let delta = if j == a { nrm[0] } else { 0.0 };
                v[j + 1] -= hub * (fr.du[a] * nrm[j + 1] + delta);
            }
            for l in 0..n {
                proj[(l, a)] = -v[0] * fr.du[l] + f * f * v[l + 1];
            }
        }
        Some(&fr.metric_inv * proj)
    });
    ShapeOperator { grid, mats }
}

/// Mean curvature by two routes and their disagreement.
#[derive(Debug, Clone)]
pub struct MeanCurvature {
    /// `-tr(A)/n`
    pub trace: DiscreteField,
    /// `(Δτ + (f'/f)(n + |∇τ|²)) / (n cosh φ)`
    pub laplacian: DiscreteField,
    /// `|trace - laplacian|`
    pub residual: DiscreteField,
}

impl MeanCurvature {
    pub fn max_abs(&self) -> f64 {
        self.trace.max_abs()
    }
}

pub fn mean_curvature(gh: &GraphHypersurface) -> Result<MeanCurvature, HypersurfaceError> {
    let a = shape_operator(gh)?;
    let n = gh.n() as f64;
    let trace = a.field(|m| -m.trace() / n);
    let lap_tau = laplace_beltrami(gh, &gh.tau())?;
    let laplacian = DiscreteField::tabulate(gh.grid_arc(), 2, |i| {
        let fr = gh.frame(i).expect("frame");
        let dt = lap_tau.get(i).expect("margin-2 value");
        (dt + fr.hubble() * (n + fr.sinh2_phi)) / (n * fr.cosh_phi)
    });
    let residual = trace.zip_with(&laplacian, |x, y| (x - y).abs());
    Ok(MeanCurvature {
        trace,
        laplacian,
        residual,
    })
}
