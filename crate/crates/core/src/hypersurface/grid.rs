use std::sync::Arc;

use rayon::prelude::*;

/// Uniform tensor grid over an axis-aligned box, stored row-major
/// (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    res: Vec<usize>,
    h: Vec<f64>,
    strides: Vec<usize>,
    len: usize,
}

impl Grid {
    pub(crate) fn new(bounds: &[(f64, f64)], res: &[usize]) -> Self {
        let n = bounds.len();
        let mut strides = vec![1; n];
        for a in (0..n.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * res[a + 1];
        }
        Self {
            lo: bounds.iter().map(|b| b.0).collect(),
            hi: bounds.iter().map(|b| b.1).collect(),
            res: res.to_vec(),
            h: bounds
                .iter()
                .zip(res)
                .map(|(b, &r)| (b.1 - b.0) / (r - 1) as f64)
                .collect(),
            strides,
            len: res.iter().product(),
        }
    }

    pub fn dim(&self) -> usize {
        self.res.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn res(&self) -> &[usize] {
        &self.res
    }

    pub fn spacing(&self) -> &[f64] {
        &self.h
    }

    /// Largest spacing over the axes.
    pub fn h_max(&self) -> f64 {
        self.h.iter().cloned().fold(0.0, f64::max)
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.lo.iter().cloned().zip(self.hi.iter().cloned()).collect()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for a in 0..self.dim() {
            out[a] = idx / self.strides[a];
            idx %= self.strides[a];
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> Option<usize> {
        if multi.len() != self.dim() || multi.iter().zip(&self.res).any(|(i, r)| i >= r) {
            return None;
        }
        Some(multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum())
    }

    pub fn coords(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .enumerate()
            .map(|(a, &i)| if i + 1 == self.res[a] { self.hi[a] } else { self.lo[a] + self.h[a] * i as f64 })
            .collect()
    }

    /// Distance, in nodes, to the nearest boundary face.
    pub fn depth(&self, idx: usize) -> usize {
        let mut rem = idx;
        let mut d = usize::MAX;
        for a in 0..self.dim() {
            let i = rem / self.strides[a];
            rem %= self.strides[a];
            d = d.min(i.min(self.res[a] - 1 - i));
        }
        d
    }

    /// Physical distance to the nearest boundary face, as a fraction of that axis' length.
    fn inset_fraction(&self, idx: usize) -> f64 {
        let x = self.coords(idx);
        (0..self.dim())
            .map(|a| {
                let len = self.hi[a] - self.lo[a];
                ((x[a] - self.lo[a]).min(self.hi[a] - x[a])) / len
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates `f` on every node of depth `≥ margin`, in parallel; other nodes get `None`.
pub(crate) fn map_band<T, F>(grid: &Grid, margin: usize, f: F) -> Vec<Option<T>>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync,
{
    (0..grid.len())
        .into_par_iter()
        .map(|i| if grid.depth(i) >= margin { f(i) } else { None })
        .collect()
}

/// Scalar values on the nodes of a grid that lie at least `margin` nodes
/// inside the boundary. Stencils consume one node of margin per derivative.
#[derive(Debug, Clone)]
pub struct DiscreteField {
    grid: Arc<Grid>,
    margin: usize,
    data: Vec<f64>,
}

impl DiscreteField {
    pub(crate) fn from_band(grid: Arc<Grid>, margin: usize, values: Vec<Option<f64>>) -> Self {
        let data = values.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect();
        Self { grid, margin, data }
    }

    pub(crate) fn tabulate<F>(grid: Arc<Grid>, margin: usize, f: F) -> Self
    where
        F: Fn(usize) -> f64 + Sync,
    {
        let values = map_band(&grid, margin, |i| Some(f(i)));
        Self::from_band(grid, margin, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Boundary band width consumed by stencils.
    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn spacing(&self) -> &[f64] {
        self.grid.spacing()
    }

    /// Nodes per axis of the valid band.
    pub fn shape(&self) -> Vec<usize> {
        self.grid.res().iter().map(|r| r.saturating_sub(2 * self.margin)).collect()
    }

    pub fn get(&self, idx: usize) -> Option<f64> {
        (self.grid.depth(idx) >= self.margin).then(|| self.data[idx])
    }

    pub fn at(&self, multi: &[usize]) -> Option<f64> {
        self.grid.flat_index(multi).and_then(|i| self.get(i))
    }

    /// `(flat index, value)` over the valid band.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.data.len())
            .filter(move |&i| self.grid.depth(i) >= self.margin)
            .map(move |i| (i, self.data[i]))
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> Vec<f64> {
        self.iter().map(|(_, v)| v).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.iter().map(|(_, v)| v).fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.iter().map(|(_, v)| v).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `(index, value)` of the smallest value, first in index order on ties.
    pub fn argmin(&self) -> Option<(usize, f64)> {
        self.iter().fold(None, |best, (i, v)| match best {
            Some((_, bv)) if bv <= v => best,
            _ => Some((i, v)),
        })
    }

    /// Max |value| over valid nodes whose distance to the boundary is at
    /// least `fraction` of the box length on every axis. Comparing this across
    /// resolutions keeps the measured region fixed while margins shrink.
    pub fn max_abs_inner(&self, fraction: f64) -> f64 {
        self.iter()
            .filter(|&(i, _)| self.grid.inset_fraction(i) >= fraction - 1e-12)
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max)
    }

    /// Minimum over the same inner region as [`Self::max_abs_inner`].
    pub fn min_inner(&self, fraction: f64) -> f64 {
        self.iter()
            .filter(|&(i, _)| self.grid.inset_fraction(i) >= fraction - 1e-12)
            .map(|(_, v)| v)
            .fold(f64::INFINITY, f64::min)
    }

    /// Pointwise combination on the band shared by both fields.
    pub fn zip_with<F>(&self, other: &DiscreteField, f: F) -> DiscreteField
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        assert!(Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid);
        let margin = self.margin.max(other.margin);
        DiscreteField::tabulate(self.grid.clone(), margin, |i| f(self.data[i], other.data[i]))
    }

    pub fn map<F>(&self, f: F) -> DiscreteField
    where
        F: Fn(f64) -> f64 + Sync,
    {
        DiscreteField::tabulate(self.grid.clone(), self.margin, |i| f(self.data[i]))
    }

    pub(crate) fn raw(&self) -> &[f64] {
        &self.data
    }
}

/// Centered first difference along `axis`.
#[inline]
pub(crate) fn d1(grid: &Grid, data: &[f64], idx: usize, axis: usize) -> f64 {
    let s = grid.stride(axis);
    (data[idx + s] - data[idx - s]) / (2.0 * grid.spacing()[axis])
}

/// Centered second difference; mixed partials use the four-corner stencil.
#[inline]
pub(crate) fn d2(grid: &Grid, data: &[f64], idx: usize, a: usize, b: usize) -> f64 {
    let (sa, sb) = (grid.stride(a), grid.stride(b));
    let (ha, hb) = (grid.spacing()[a], grid.spacing()[b]);
    if a == b {
        (data[idx + sa] - 2.0 * data[idx] + data[idx - sa]) / (ha * ha)
    } else {
        (data[idx + sa + sb] - data[idx + sa - sb] - data[idx - sa + sb] + data[idx - sa - sb]) / (4.0 * ha * hb)
    }
}
