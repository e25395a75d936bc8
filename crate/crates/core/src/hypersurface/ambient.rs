use nalgebra::DVector;

use crate::expr::Jet2;
use crate::warp::{Spacetime, WarpError};

/// `Ric(v, w)` of `-dt² + f² |dx|²` at time `t`; ambient components `(v_t, v_1, …, v_n)`.
pub fn ambient_ricci(st: &Spacetime, t: f64, v: &[f64], w: &[f64]) -> Result<f64, WarpError> {
    st.ambient_ricci(t, v, w)
}

/// Levi-Civita connection and Riemann tensor of `-dt² + f(t)² |dx|²` at one
/// time, in coordinates `(t, x_1, …, x_n)` with index 0 for `t`.
///
/// Nonzero Christoffel symbols: `Γ^t_ij = f f' δ_ij`,
/// `Γ^i_tj = Γ^i_jt = (f'/f) δ_ij`.
#[derive(Debug, Clone)]
pub struct AmbientCurvature {
    n: usize,
    f: Jet2,
    /// `riemann[((a*d + b)*d + c)*d + e] = R^a_{bce}`, `d = n+1`.
    riemann: Vec<f64>,
}

impl AmbientCurvature {
    pub fn new(n: usize, f: Jet2) -> Self {
        let d = n + 1;
        let gamma = |a: usize, b: usize, c: usize| christoffel(f, a, b, c);
        // only ∂_t of Γ is nonzero
        let dgamma = |a: usize, b: usize, c: usize| {
            let (v, d1, d2) = (f.v, f.d1, f.d2);
            match (a, b, c) {
                (0, b, c) if b > 0 && b == c => d1 * d1 + v * d2,
                (a, 0, c) | (a, c, 0) if a > 0 && a == c => d2 / v - (d1 / v).powi(2),
                _ => 0.0,
            }
        };
        let mut riemann = vec![0.0; d * d * d * d];
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        // R^a_bce = ∂_c Γ^a_eb - ∂_e Γ^a_cb + Γ^a_ck Γ^k_eb - Γ^a_ek Γ^k_cb
                        let mut r = 0.0;
                        if c == 0 {
                            r += dgamma(a, e, b);
                        }
                        if e == 0 {
                            r -= dgamma(a, c, b);
                        }
                        for k in 0..d {
                            r += gamma(a, c, k) * gamma(k, e, b) - gamma(a, e, k) * gamma(k, c, b);
                        }
                        riemann[((a * d + b) * d + c) * d + e] = r;
                    }
                }
            }
        }
        Self { n, f, riemann }
    }

    pub fn at(st: &Spacetime, t: f64) -> Result<Self, WarpError> {
        Ok(Self::new(st.n(), st.jet(t)?))
    }

    pub fn christoffel(&self, a: usize, b: usize, c: usize) -> f64 {
        christoffel(self.f, a, b, c)
    }

    /// `R^a_{bcd}` with `R(X,Y)Z = ∇_X∇_Y Z - ∇_Y∇_X Z - ∇_[X,Y] Z`.
    pub fn riemann(&self, a: usize, b: usize, c: usize, e: usize) -> f64 {
        let d = self.n + 1;
        self.riemann[((a * d + b) * d + c) * d + e]
    }

    pub fn metric(&self, a: usize, b: usize) -> f64 {
        match (a, b) {
            (0, 0) => -1.0,
            (a, b) if a == b => self.f.v * self.f.v,
            _ => 0.0,
        }
    }

    /// `ḡ(R(x, y) z, w)`.
    pub fn curvature_form(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let d = self.n + 1;
        let mut s = 0.0;
        for a in 0..d {
            let wa = self.metric(a, a) * w[a];
            if wa == 0.0 {
                continue;
            }
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        s += wa * self.riemann(a, b, c, e) * z[b] * x[c] * y[e];
                    }
                }
            }
        }
        s
    }

    /// Contraction `Ric_{be} = R^a_{bae}`.
    pub fn ricci(&self, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let d = self.n + 1;
        let mut s = 0.0;
        for b in 0..d {
            for e in 0..d {
                let r: f64 = (0..d).map(|a| self.riemann(a, b, a, e)).sum();
                s += r * v[b] * w[e];
            }
        }
        s
    }
}

fn christoffel(f: Jet2, a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, b, c) if b > 0 && b == c => f.v * f.d1,
        (a, 0, c) | (a, c, 0) if a > 0 && a == c => f.d1 / f.v,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
        DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn minkowski_is_flat() {
        let c = AmbientCurvature::new(3, Jet2::new(1.0, 0.0, 0.0));
        assert!(c.riemann.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn contraction_matches_closed_form_ricci() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..5 {
            for _ in 0..20 {
                let f = Jet2::new(rng.random_range(0.2..3.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                let c = AmbientCurvature::new(n, f);
                let (v, w) = (random_vec(&mut rng, n + 1), random_vec(&mut rng, n + 1));
                let nn = n as f64;
                let closed = -nn * f.d2 / f.v * v[0] * w[0]
                    + (f.v * f.d2 + (nn - 1.0) * f.d1 * f.d1) * v.rows(1, n).dot(&w.rows(1, n));
                let got = c.ricci(&v, &w);
                assert!((got - closed).abs() < 1e-12 * (1.0 + closed.abs()), "{got} vs {closed}");
            }
        }
    }

    #[test]
    fn curvature_form_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = AmbientCurvature::new(3, Jet2::new(1.3, 0.7, -0.4));
        let v: Vec<_> = (0..4).map(|_| random_vec(&mut rng, 4)).collect();
        let r = |a: usize, b: usize, x: usize, y: usize| c.curvature_form(&v[a], &v[b], &v[x], &v[y]);
        assert!((r(0, 1, 2, 3) + r(1, 0, 2, 3)).abs() < 1e-12);
        assert!((r(0, 1, 2, 3) + r(0, 1, 3, 2)).abs() < 1e-12);
        assert!((r(0, 1, 2, 3) - r(2, 3, 0, 1)).abs() < 1e-12);
        assert!((r(0, 1, 2, 3) + r(1, 2, 0, 3) + r(2, 0, 1, 3)).abs() < 1e-12);
    }

    #[test]
    fn slice_sectional_curvature() {
        // spatial planes: K = (f'/f)², cancelled in the slice by the extrinsic term
        let f = Jet2::new(2.0, 0.6, 0.1);
        let c = AmbientCurvature::new(3, f);
        let (x, y) = (DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]), DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]));
        let k = c.curvature_form(&x, &y, &y, &x) / (f.v.powi(4));
        assert!((k - (f.d1 / f.v).powi(2)).abs() < 1e-14);
    }
}
