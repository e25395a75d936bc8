//! Discrete checks of the pointwise identities satisfied by spacelike graphs.

use nalgebra::{DMatrix, DVector};

use super::ambient::AmbientCurvature;
use super::extrinsic::{mean_curvature, shape_operator};
use super::grid::{d1, d2, map_band, DiscreteField};
use super::{laplace_beltrami, FrameData, GraphHypersurface, HypersurfaceError};
use crate::warp::{check_ncc, Interval, SamplerConfig};

/// Induced Christoffel symbols `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il - ∂_l g_ij)`
/// from centered differences of `g`, margin 2. Layout `[(k*n + i)*n + j]`.
fn christoffel(gh: &GraphHypersurface) -> &[Option<Vec<f64>>] {
    gh.christoffel.get_or_init(|| {
        let grid = gh.grid_arc();
        let n = gh.n();
        map_band(&grid, 2, |idx| {
            let fr = gh.frame(idx)?;
            // dg[l][i][j] = ∂_l g_ij
            let mut dg = vec![0.0; n * n * n];
            for l in 0..n {
                let s = grid.stride(l);
                let (up, dn) = (&gh.frame(idx + s)?.metric, &gh.frame(idx - s)?.metric);
                let h2 = 2.0 * grid.spacing()[l];
                for i in 0..n {
                    for j in 0..n {
                        dg[(l * n + i) * n + j] = (up[(i, j)] - dn[(i, j)]) / h2;
                    }
                }
            }
            let mut gam = vec![0.0; n * n * n];
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut s = 0.0;
                        for l in 0..n {
                            let c = dg[(i * n + j) * n + l] + dg[(j * n + i) * n + l] - dg[(l * n + i) * n + j];
                            s += fr.metric_inv[(k, l)] * c;
                        }
                        gam[(k * n + i) * n + j] = 0.5 * s;
                    }
                }
            }
            Some(gam)
        })
    })
}

/// Both sides of the trace-norm identity for the Hessian of `τ`:
///
/// `|Hess τ|² = (f'/f)²(n-1+cosh⁴φ) + cosh²φ tr(A²) + 2(f'/f) cosh φ g(A∂_t^T, ∂_t^T) - 2nH (f'/f) cosh φ`.
///
/// The last term vanishes on maximal hypersurfaces; `rhs_maximal` omits it.
#[derive(Debug, Clone)]
pub struct HessianCheck {
    pub lhs: DiscreteField,
    pub rhs: DiscreteField,
    pub rhs_maximal: DiscreteField,
    /// `|lhs - rhs|`
    pub residual: DiscreteField,
}

pub fn verify_hessian_identity(gh: &GraphHypersurface) -> Result<HessianCheck, HypersurfaceError> {
    let a = shape_operator(gh)?;
    let gam = christoffel(gh);
    let grid = gh.grid_arc();
    let n = gh.n();
    let u = gh.values();
    let pairs = map_band(&grid, 2, |idx| {
        let fr = gh.frame(idx)?;
        let g_inv = &fr.metric_inv;
        let gm = gam[idx].as_ref()?;
        let hess = DMatrix::from_fn(n, n, |i, j| {
            let corr: f64 = (0..n).map(|k| gm[(k * n + i) * n + j] * fr.du[k]).sum();
            d2(&grid, u, idx, i, j) - corr
        });
        let m = g_inv * &hess;
        let lhs = (&m * &m).trace();

        let am = a.get(idx)?;
        let (c, hub) = (fr.cosh_phi, fr.hubble());
        let w = fr.dt_tangent();
        let rhs_max = hub * hub * ((n - 1) as f64 + c.powi(4))
            + c * c * (am * am).trace()
            + 2.0 * hub * c * fr.dot(&(am * &w), &w);
        let rhs = rhs_max + 2.0 * hub * c * am.trace();
        Some((lhs, rhs, rhs_max))
    });
    let pick = |k: usize| {
        DiscreteField::from_band(
            grid.clone(),
            2,
            pairs.iter().map(|p| p.map(|t| [t.0, t.1, t.2][k])).collect(),
        )
    };
    let (lhs, rhs, rhs_maximal) = (pick(0), pick(1), pick(2));
    let residual = lhs.zip_with(&rhs, |x, y| (x - y).abs());
    Ok(HessianCheck {
        lhs,
        rhs,
        rhs_maximal,
        residual,
    })
}

/// `Ric̄(K^T, N)` for `K = f(t) ∂_t`, against `(n-1) f cosh φ sinh²φ (log f)''`.
#[derive(Debug, Clone)]
pub struct RicciKtN {
    /// Via Codazzi: `Ric̄(Y, N) = Y(tr A) - (div A)(Y)`, a discrete quantity (margin 3).
    pub codazzi: DiscreteField,
    /// Ambient Ricci applied to the frame's ambient components (margin 1).
    pub components: DiscreteField,
    pub closed_form: DiscreteField,
    /// `|codazzi - closed_form|`
    pub residual: DiscreteField,
}

pub fn ricci_kt_n(gh: &GraphHypersurface) -> Result<RicciKtN, HypersurfaceError> {
    gh.need_margin(3)?;
    let a = shape_operator(gh)?;
    let gam = christoffel(gh);
    let grid = gh.grid_arc();
    let n = gh.n();
    let st = gh.spacetime();
    let nf = n as f64;

    let closed_form = gh.frame_field(|fr| (nf - 1.0) * fr.warp.v * fr.cosh_phi * fr.sinh2_phi * fr.log_f_second());
    let components = gh.frame_field(|fr| {
        let f = fr.warp.v;
        let c = fr.cosh_phi;
        // K^T = f(∂_t - cosh φ N)
        let mut kt = -&fr.normal * (f * c);
        kt[0] += f;
        let tt = -nf * fr.warp.d2 / f;
        let ff = f * fr.warp.d2 + (nf - 1.0) * fr.warp.d1 * fr.warp.d1;
        tt * kt[0] * fr.normal[0] + ff * kt.rows(1, n).dot(&fr.normal.rows(1, n))
    });
    debug_assert!(st.n() == n);

    let tr = a.trace();
    let codazzi = DiscreteField::tabulate(grid.clone(), 3, |idx| {
        let fr = gh.frame(idx).expect("frame");
        let am = a.get(idx).expect("A");
        let gm = gam[idx].as_ref().expect("Γ");
        let g = |k: usize, i: usize, j: usize| gm[(k * n + i) * n + j];
        let mut div = DVector::zeros(n);
        for m in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                let st_i = grid.stride(i);
                let up = a.get(idx + st_i).expect("A");
                let dn = a.get(idx - st_i).expect("A");
                s += (up[(i, m)] - dn[(i, m)]) / (2.0 * grid.spacing()[i]);
                for k in 0..n {
                    s += g(i, i, k) * am[(k, m)] - g(k, i, m) * am[(i, k)];
                }
            }
            div[m] = s;
        }
        let dtr = DVector::from_fn(n, |j, _| d1(&grid, tr.raw(), idx, j));
        let y = fr.dt_tangent() * fr.warp.v;
        y.dot(&dtr) - y.dot(&div)
    });
    let residual = codazzi.zip_with(&closed_form, |x, y| (x - y).abs());
    Ok(RicciKtN {
        codazzi,
        components,
        closed_form,
        residual,
    })
}

/// Ricci curvature of the induced metric along a tangent field `Y`, by the
/// Gauss equation `Ric(Y,Y) = Σ_k ḡ(R̄(Y,E_k)E_k, Y) - tr(A) g(AY,Y) + g(AY,AY)`
/// over a `g`-orthonormal frame `E_k`. Margin 2.
#[derive(Debug, Clone)]
pub struct IntrinsicRicci {
    pub ricci: DiscreteField,
    /// `Σ_k ḡ(R̄(Y,E_k)E_k, Y)` from the ambient Riemann tensor.
    pub ambient_sum: DiscreteField,
    /// `(n-1)(f'/f)²|Y|² - (n-2)(log f)'' g(Y,∇τ)² - (log f)'' |∇τ|²|Y|²`
    pub ambient_closed_form: DiscreteField,
    /// `-tr(A) g(AY,Y) + g(AY,AY)`
    pub extrinsic: DiscreteField,
    /// `g(Y, Y)`
    pub norm2: DiscreteField,
    /// `((n-1)/n²) div(∂_t)² |Y|²`, the lower bound for maximal graphs under the null convergence condition.
    pub divergence_bound: DiscreteField,
}

/// Tangent vector field given by its components in the coordinate basis `e_i`.
pub type TangentField<'a> = dyn Fn(&[f64], &FrameData) -> DVector<f64> + Sync + 'a;

pub fn intrinsic_ricci(gh: &GraphHypersurface, y: &TangentField<'_>) -> Result<IntrinsicRicci, HypersurfaceError> {
    let a = shape_operator(gh)?;
    let grid = gh.grid_arc();
    let n = gh.n();
    let nf = n as f64;
    let rows = map_band(&grid, 2, |idx| {
        let fr = gh.frame(idx)?;
        let am = a.get(idx)?;
        let yv = y(&grid.coords(idx), fr);
        let curv = AmbientCurvature::new(n, fr.warp);
        // E = L^{-T} with g = L Lᵀ
        let chol = fr.metric.clone().cholesky()?;
        let e = chol.l().transpose().try_inverse()?;
        let ya = fr.push_forward(&yv);
        let ambient_sum: f64 = (0..n)
            .map(|k| {
                let ek = fr.push_forward(&e.column(k).into_owned());
                curv.curvature_form(&ya, &ek, &ek, &ya)
            })
            .sum();
        let ay = am * &yv;
        let extrinsic = -am.trace() * fr.dot(&ay, &yv) + fr.dot(&ay, &ay);
        let norm2 = fr.dot(&yv, &yv);
        let lf = fr.log_f_second();
        let hub = fr.hubble();
        let w = fr.dt_tangent();
        let yg = fr.dot(&yv, &w);
        let closed = (nf - 1.0) * hub * hub * norm2 - (nf - 2.0) * lf * yg * yg - lf * fr.sinh2_phi * norm2;
        let bound = (nf - 1.0) / (nf * nf) * (nf * hub).powi(2) * norm2;
        Some([ambient_sum + extrinsic, ambient_sum, closed, extrinsic, norm2, bound])
    });
    let pick = |k: usize| DiscreteField::from_band(grid.clone(), 2, rows.iter().map(|r| r.map(|v| v[k])).collect());
    Ok(IntrinsicRicci {
        ricci: pick(0),
        ambient_sum: pick(1),
        ambient_closed_form: pick(2),
        extrinsic: pick(3),
        norm2: pick(4),
        divergence_bound: pick(5),
    })
}

/// `Ric(Y, Y)` of the induced metric computed from the metric alone:
/// Christoffel symbols and their derivatives by centered differences. Margin 3.
pub fn intrinsic_ricci_from_metric(
    gh: &GraphHypersurface,
    y: &TangentField<'_>,
) -> Result<DiscreteField, HypersurfaceError> {
    gh.need_margin(3)?;
    let gam = christoffel(gh);
    let grid = gh.grid_arc();
    let n = gh.n();
    let at = |idx: usize, k: usize, i: usize, j: usize| gam[idx].as_ref().expect("Γ")[(k * n + i) * n + j];
    Ok(DiscreteField::tabulate(grid.clone(), 3, |idx| {
        let fr = gh.frame(idx).expect("frame");
        let yv = y(&grid.coords(idx), fr);
        let dgam = |l: usize, k: usize, i: usize, j: usize| {
            let s = grid.stride(l);
            (at(idx + s, k, i, j) - at(idx - s, k, i, j)) / (2.0 * grid.spacing()[l])
        };
        // Ric_bd = ∂_a Γ^a_db - ∂_d Γ^a_ab + Γ^a_ae Γ^e_db - Γ^a_de Γ^e_ab
        let mut ric = DMatrix::zeros(n, n);
        for b in 0..n {
            for d in 0..n {
                let mut s = 0.0;
                for a_ in 0..n {
                    s += dgam(a_, a_, d, b) - dgam(d, a_, a_, b);
                    for e in 0..n {
                        s += at(idx, a_, a_, e) * at(idx, e, d, b) - at(idx, a_, d, e) * at(idx, e, a_, b);
                    }
                }
                ric[(b, d)] = s;
            }
        }
        yv.dot(&(&ric * &yv))
    }))
}

/// Pointwise form of the inequality `½ Δ sinh²φ ≥ ((n+1)(f'/f)² - n f''/f) sinh⁴φ`
/// on a maximal graph.
#[derive(Debug, Clone)]
pub struct Lemma1Report {
    /// `½ Δ sinh²φ` (margin 3)
    pub lhs: DiscreteField,
    /// `((n+1)(f'/f)² - n f''/f) sinh⁴φ` (margin 1)
    pub rhs: DiscreteField,
    /// `lhs - rhs` (margin 3)
    pub slack: DiscreteField,
    pub min_slack: f64,
    /// `max |H|` that passed the maximality precondition.
    pub max_h: f64,
}

/// Requires `max |H| ≤ maximality_tol` and the null convergence condition on
/// the range of `τ`.
pub fn verify_lemma1(gh: &GraphHypersurface, maximality_tol: f64) -> Result<Lemma1Report, HypersurfaceError> {
    gh.need_margin(3)?;
    let max_h = mean_curvature(gh)?.max_abs();
    if !(max_h <= maximality_tol) {
        return Err(HypersurfaceError::NotMaximal {
            max_h,
            tol: maximality_tol,
        });
    }
    let (lo, hi) = gh.tau_range();
    let ncc = check_ncc(gh.spacetime(), &Interval::closed(lo, hi), &SamplerConfig::default())?;
    if !ncc.holds() {
        return Err(HypersurfaceError::ncc(lo, hi, &ncc));
    }
    let n = gh.n() as f64;
    let sinh2 = gh.frame_field(|fr| fr.sinh2_phi);
    let lhs = laplace_beltrami(gh, &sinh2)?.map(|v| 0.5 * v);
    let rhs = gh.frame_field(|fr| {
        let hub = fr.hubble();
        ((n + 1.0) * hub * hub - n * fr.warp.d2 / fr.warp.v) * fr.sinh2_phi * fr.sinh2_phi
    });
    let slack = lhs.zip_with(&rhs, |l, r| l - r);
    Ok(Lemma1Report {
        min_slack: slack.min(),
        lhs,
        rhs,
        slack,
        max_h,
    })
}
