use super::Scalar;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// First-order jet in `N` variables: value and gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1<const N: usize> {
    pub v: f64,
    pub g: [f64; N],
}

impl<const N: usize> Jet1<N> {
    pub fn constant(v: f64) -> Self {
        Jet1 { v, g: [0.0; N] }
    }

    /// The `i`-th coordinate function at value `v`.
    pub fn var(v: f64, i: usize) -> Self {
        let mut g = [0.0; N];
        g[i] = 1.0;
        Jet1 { v, g }
    }

    pub fn new(v: f64, g: [f64; N]) -> Self {
        Jet1 { v, g }
    }

    /// Applies a scalar function given its value and derivative at `self.v`.
    fn chain(self, f: f64, df: f64) -> Self {
        let mut g = self.g;
        for x in g.iter_mut() {
            *x *= df;
        }
        Jet1 { v: f, g }
    }
}

impl<const N: usize> Add for Jet1<N> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self.v += o.v;
        for i in 0..N {
            self.g[i] += o.g[i];
        }
        self
    }
}

impl<const N: usize> Sub for Jet1<N> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        self.v -= o.v;
        for i in 0..N {
            self.g[i] -= o.g[i];
        }
        self
    }
}

impl<const N: usize> Mul for Jet1<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut g = [0.0; N];
        for i in 0..N {
            g[i] = self.g[i] * o.v + self.v * o.g[i];
        }
        Jet1 { v: self.v * o.v, g }
    }
}

impl<const N: usize> Div for Jet1<N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = 1.0 / o.v;
        let q = self.v * inv;
        let mut g = [0.0; N];
        for i in 0..N {
            g[i] = (self.g[i] - q * o.g[i]) * inv;
        }
        Jet1 { v: q, g }
    }
}

impl<const N: usize> Neg for Jet1<N> {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.v = -self.v;
        for x in self.g.iter_mut() {
            *x = -*x;
        }
        self
    }
}

impl<const N: usize> Scalar for Jet1<N> {
    fn cst(c: f64) -> Self {
        Jet1::constant(c)
    }
    fn val(&self) -> f64 {
        self.v
    }
    fn is_safe_divisor(&self) -> bool {
        self.v.abs() >= crate::tol::DIVISOR_FLOOR
    }
    fn is_positive(&self) -> bool {
        self.v > 0.0
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.v.ln(), 1.0 / self.v)
    }
    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.chain(r, 0.5 / r)
    }
    fn powi(self, n: i32) -> Self {
        let d = if n == 0 { 0.0 } else { n as f64 * self.v.powi(n - 1) };
        self.chain(self.v.powi(n), d)
    }
}

/// Second-order truncated Taylor jet in `N` variables: value, gradient and
/// the symmetric Hessian. One evaluation pass yields the full 2-jet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2<const N: usize> {
    pub v: f64,
    pub g: [f64; N],
    pub h: [[f64; N]; N],
}

impl<const N: usize> Jet2<N> {
    pub fn constant(v: f64) -> Self {
        Jet2 { v, g: [0.0; N], h: [[0.0; N]; N] }
    }

    pub fn var(v: f64, i: usize) -> Self {
        let mut j = Self::constant(v);
        j.g[i] = 1.0;
        j
    }

    /// Seeds all `N` coordinates at `point`.
    pub fn vars(point: [f64; N]) -> [Self; N] {
        let mut out = [Self::constant(0.0); N];
        for i in 0..N {
            out[i] = Self::var(point[i], i);
        }
        out
    }

    /// Scalar function with value `f`, first and second derivatives `d1`, `d2`.
    fn chain(self, f: f64, d1: f64, d2: f64) -> Self {
        let mut out = Self::constant(f);
        for i in 0..N {
            out.g[i] = d1 * self.g[i];
            for j in 0..N {
                out.h[i][j] = d1 * self.h[i][j] + d2 * self.g[i] * self.g[j];
            }
        }
        out
    }
}

impl<const N: usize> Add for Jet2<N> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self.v += o.v;
        for i in 0..N {
            self.g[i] += o.g[i];
            for j in 0..N {
                self.h[i][j] += o.h[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Sub for Jet2<N> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        self.v -= o.v;
        for i in 0..N {
            self.g[i] -= o.g[i];
            for j in 0..N {
                self.h[i][j] -= o.h[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Mul for Jet2<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Self::constant(self.v * o.v);
        for i in 0..N {
            out.g[i] = self.g[i] * o.v + self.v * o.g[i];
            for j in 0..N {
                out.h[i][j] = self.h[i][j] * o.v
                    + self.v * o.h[i][j]
                    + self.g[i] * o.g[j]
                    + self.g[j] * o.g[i];
            }
        }
        out
    }
}

impl<const N: usize> Div for Jet2<N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = 1.0 / o.v;
        let r = o.chain(inv, -inv * inv, 2.0 * inv * inv * inv);
        self * r
    }
}

impl<const N: usize> Neg for Jet2<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.chain(-self.v, -1.0, 0.0)
    }
}

impl<const N: usize> Scalar for Jet2<N> {
    fn cst(c: f64) -> Self {
        Jet2::constant(c)
    }
    fn val(&self) -> f64 {
        self.v
    }
    fn is_safe_divisor(&self) -> bool {
        self.v.abs() >= crate::tol::DIVISOR_FLOOR
    }
    fn is_positive(&self) -> bool {
        self.v > 0.0
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let inv = 1.0 / self.v;
        self.chain(self.v.ln(), inv, -inv * inv)
    }
    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.v))
    }
    fn powi(self, n: i32) -> Self {
        let x = self.v;
        let nf = n as f64;
        let d1 = if n == 0 { 0.0 } else { nf * x.powi(n - 1) };
        let d2 = if n == 0 || n == 1 { 0.0 } else { nf * (nf - 1.0) * x.powi(n - 2) };
        self.chain(x.powi(n), d1, d2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f<T: Scalar>(x: T, y: T) -> T {
        (x * y).sin() + x.exp() / (T::cst(2.0) + y.cos()) - (x.sqr() + T::cst(1.0)).sqrt().ln()
    }

    #[test]
    fn jet2_matches_finite_differences() {
        let (x0, y0) = (0.3, -0.7);
        let [x, y] = Jet2::<2>::vars([x0, y0]);
        let j = f(x, y);
        let h = 1e-4;
        let fd = |dx: f64, dy: f64| f(x0 + dx, y0 + dy);
        let gx = (fd(h, 0.0) - fd(-h, 0.0)) / (2.0 * h);
        let gy = (fd(0.0, h) - fd(0.0, -h)) / (2.0 * h);
        let hxx = (fd(h, 0.0) - 2.0 * fd(0.0, 0.0) + fd(-h, 0.0)) / (h * h);
        let hxy = (fd(h, h) - fd(h, -h) - fd(-h, h) + fd(-h, -h)) / (4.0 * h * h);
        assert!((j.v - f(x0, y0)).abs() < 1e-14);
        assert!((j.g[0] - gx).abs() < 1e-7);
        assert!((j.g[1] - gy).abs() < 1e-7);
        assert!((j.h[0][0] - hxx).abs() < 1e-5);
        assert!((j.h[0][1] - hxy).abs() < 1e-5);
        assert_eq!(j.h[0][1], j.h[1][0]);
    }

    #[test]
    fn jet1_agrees_with_jet2_gradient() {
        let j2 = f(Jet2::<2>::var(0.5, 0), Jet2::<2>::var(0.2, 1));
        let j1 = f(Jet1::<2>::var(0.5, 0), Jet1::<2>::var(0.2, 1));
        for i in 0..2 {
            assert!((j1.g[i] - j2.g[i]).abs() < 1e-13);
        }
    }
}
