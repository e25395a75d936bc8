use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{Bindings, WarpExpr};

/// One end of an interval; infinite ends are always open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Endpoint {
    pub value: f64,
    pub closed: bool,
}

/// A real interval with per-end openness, e.g. `(0,5]` or `(-inf,inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: Endpoint,
    pub hi: Endpoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid interval `{text}`: {reason}")]
pub struct IntervalParseError {
    pub text: String,
    pub reason: &'static str,
}

impl Interval {
    pub fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo: Endpoint { value: lo, closed: false },
            hi: Endpoint { value: hi, closed: false },
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo: Endpoint { value: lo, closed: true },
            hi: Endpoint { value: hi, closed: true },
        }
    }

    pub fn real_line() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn new(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Result<Self, &'static str> {
        if lo.is_nan() || hi.is_nan() {
            return Err("NaN endpoint");
        }
        if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err("endpoints out of order");
        }
        if (lo.is_infinite() && lo_closed) || (hi.is_infinite() && hi_closed) {
            return Err("infinite endpoints must be open");
        }
        if lo > hi {
            return Err("endpoints out of order");
        }
        if lo == hi && !(lo_closed && hi_closed) {
            return Err("empty interval");
        }
        Ok(Self {
            lo: Endpoint { value: lo, closed: lo_closed },
            hi: Endpoint { value: hi, closed: hi_closed },
        })
    }

    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lo.closed { t >= self.lo.value } else { t > self.lo.value };
        let below = if self.hi.closed { t <= self.hi.value } else { t < self.hi.value };
        above && below
    }

    /// True when `other` lies inside the closure of `self`.
    pub fn within_closure_of(&self, other: &Interval) -> bool {
        self.lo.value >= other.lo.value && self.hi.value <= other.hi.value
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo.value == self.hi.value
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.value.is_finite() && self.hi.value.is_finite()
    }
}

fn fmt_end(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo.closed { '[' } else { '(' },
            fmt_end(self.lo.value),
            fmt_end(self.hi.value),
            if self.hi.closed { ']' } else { ')' }
        )
    }
}

fn parse_end(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        other => other.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

/// Endpoints may be constant expressions in the bound parameters, e.g. `(-a,a)`.
fn parse_end_with(s: &str, bindings: &Bindings) -> Option<f64> {
    parse_end(s).or_else(|| {
        let e = WarpExpr::parse_with_vars::<&str>(s.trim(), &[]).ok()?;
        e.eval(&[], bindings).ok().filter(|v| v.is_finite())
    })
}

impl Interval {
    /// Like [`FromStr`], but endpoints may also be expressions in `bindings`.
    pub fn parse_with(text: &str, bindings: &Bindings) -> Result<Self, IntervalParseError> {
        parse_interval(text, |s| parse_end_with(s, bindings))
    }
}

fn parse_interval(text: &str, end: impl Fn(&str) -> Option<f64>) -> Result<Interval, IntervalParseError> {
    let err = |reason| IntervalParseError {
        text: text.to_string(),
        reason,
    };
    let s = text.trim();
    let mut chars = s.chars();
    let lo_closed = match chars.next() {
        Some('[') => true,
        Some('(') | Some(']') => false,
        _ => return Err(err("expected '[' or '('")),
    };
    let hi_closed = match chars.next_back() {
        Some(']') => true,
        Some(')') | Some('[') => false,
        _ => return Err(err("expected ']' or ')'")),
    };
    let body = chars.as_str();
    let (a, b) = body.split_once(',').ok_or_else(|| err("expected two comma-separated endpoints"))?;
    let lo = end(a).ok_or_else(|| err("bad lower endpoint"))?;
    let hi = end(b).ok_or_else(|| err("bad upper endpoint"))?;
    Interval::new(lo, lo_closed, hi, hi_closed).map_err(err)
}

impl FromStr for Interval {
    type Err = IntervalParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        parse_interval(text, parse_end)
    }
}
