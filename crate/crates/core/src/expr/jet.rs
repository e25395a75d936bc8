//! Second-order forward-mode jets.
//!
//! A [`Jet2`] carries `(v, d1, d2)`: the value of a scalar function of one
//! variable together with its first and second derivatives at a point.
//! Arithmetic propagates the truncated Taylor expansion exactly, so a jet
//! seeded with [`Jet2::variable`] yields exact derivatives up to rounding.

use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Jet2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Self { v, d1, d2 }
    }

    pub const fn constant(v: f64) -> Self {
        Self { v, d1: 0.0, d2: 0.0 }
    }

    /// The independent variable evaluated at `x`.
    pub const fn variable(x: f64) -> Self {
        Self { v: x, d1: 1.0, d2: 0.0 }
    }

    pub fn is_constant(&self) -> bool {
        self.d1 == 0.0 && self.d2 == 0.0
    }

    /// Applies an outer function given its value and first two derivatives at `self.v`.
    #[inline]
    pub fn chain(self, g: f64, dg: f64, ddg: f64) -> Self {
        Self {
            v: g,
            d1: dg * self.d1,
            d2: ddg * self.d1 * self.d1 + dg * self.d2,
        }
    }

    /// Reciprocal; `None` when the value is zero.
    pub fn recip(self) -> Option<Self> {
        if self.v == 0.0 {
            return None;
        }
        let r = 1.0 / self.v;
        Some(self.chain(r, -r * r, 2.0 * r * r * r))
    }

    pub fn checked_div(self, rhs: Self) -> Option<Self> {
        rhs.recip().map(|r| self * r)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    /// Natural log; requires a positive value.
    pub fn ln(self) -> Option<Self> {
        if self.v <= 0.0 {
            return None;
        }
        let r = 1.0 / self.v;
        Some(self.chain(self.v.ln(), r, -r * r))
    }

    /// Square root; requires a positive value (the derivative blows up at 0).
    pub fn sqrt(self) -> Option<Self> {
        if self.v <= 0.0 {
            return None;
        }
        let s = self.v.sqrt();
        Some(self.chain(s, 0.5 / s, -0.25 / (s * self.v)))
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(c, s, c)
    }

    /// `self^c` for a constant exponent.
    ///
    /// Integer exponents accept any base (with `0^k` for `k < 0` rejected);
    /// non-integer exponents need a positive base.
    pub fn powc(self, c: f64) -> Option<Self> {
        if c == 0.0 {
            return Some(Self::constant(1.0));
        }
        let x = self.v;
        if c.fract() == 0.0 && c.abs() <= i32::MAX as f64 {
            let k = c as i32;
            if x == 0.0 && k < 0 {
                return None;
            }
            // x^(k-2) is undefined at x = 0 for k = 1; use the closed forms instead.
            let (g, dg, ddg) = match k {
                1 => (x, 1.0, 0.0),
                2 => (x * x, 2.0 * x, 2.0),
                _ => (
                    x.powi(k),
                    c * x.powi(k - 1),
                    c * (c - 1.0) * x.powi(k - 2),
                ),
            };
            return Some(self.chain(g, dg, ddg));
        }
        if x <= 0.0 {
            return None;
        }
        Some(self.chain(
            x.powf(c),
            c * x.powf(c - 1.0),
            c * (c - 1.0) * x.powf(c - 2.0),
        ))
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.v + rhs.v, self.d1 + rhs.d1, self.d2 + rhs.d2)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.v - rhs.v, self.d1 - rhs.d1, self.d2 - rhs.d2)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.v * rhs.v,
            self.d1 * rhs.v + self.v * rhs.d1,
            self.d2 * rhs.v + 2.0 * self.d1 * rhs.d1 + self.v * rhs.d2,
        )
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.v * rhs, self.d1 * rhs, self.d2 * rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Self {
        Self::new(-self.v, -self.d1, -self.d2)
    }
}
