//! Scalars that flow through surface evaluation: plain floats, first and
//! second order Taylor jets, and intervals. Surface maps are written once,
//! generically over [`Scalar`], and evaluated in whichever arithmetic the
//! caller needs.

mod complex;
pub mod expr;
mod interval;
mod parse;
mod taylor;

pub use complex::Cx;
pub use expr::{Assignments, Expr, Func, SurfaceDef};
pub use interval::Interval;
pub use parse::{parse, parse_expr};
pub use taylor::{Jet1, Jet2};

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Real arithmetic shared by all evaluation modes.
pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(c: f64) -> Self;
    /// Point value (midpoint for intervals).
    fn val(&self) -> f64;
    /// False when dividing by `self` could blow up.
    fn is_safe_divisor(&self) -> bool;
    /// False when `self` could reach non-positive values.
    fn is_positive(&self) -> bool;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;

    fn scale(self, c: f64) -> Self {
        self * Self::cst(c)
    }

    fn sqr(self) -> Self {
        self * self
    }

    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return Self::cst(1.0) / self.powi(-n);
        }
        let mut acc = Self::cst(1.0);
        let mut base = self;
        let mut k = n as u32;
        let mut first = true;
        while k > 0 {
            if k & 1 == 1 {
                acc = if first { base } else { acc * base };
                first = false;
            }
            k >>= 1;
            if k > 0 {
                base = base * base;
            }
        }
        acc
    }
}

impl Scalar for f64 {
    fn cst(c: f64) -> Self {
        c
    }
    fn val(&self) -> f64 {
        *self
    }
    fn is_safe_divisor(&self) -> bool {
        self.abs() >= crate::tol::DIVISOR_FLOOR
    }
    fn is_positive(&self) -> bool {
        *self > 0.0
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_powi_matches_float() {
        for n in -4..9 {
            let a = Jet1::<1>::var(1.3, 0);
            let p = a.powi(n);
            assert!((p.v - 1.3f64.powi(n)).abs() < 1e-12);
            assert!((p.g[0] - n as f64 * 1.3f64.powi(n - 1)).abs() < 1e-11);
        }
    }
}
