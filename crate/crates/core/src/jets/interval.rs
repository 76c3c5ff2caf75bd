use super::Scalar;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Closed interval with outward rounding. Evaluating a surface map over an
/// `Interval` box gives the natural interval extension, which is what the
/// root counter uses for exclusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi || lo.is_nan() || hi.is_nan());
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn entire() -> Self {
        Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        if self.lo.is_finite() && self.hi.is_finite() {
            0.5 * (self.lo + self.hi)
        } else if self.lo.is_finite() {
            f64::MAX
        } else if self.hi.is_finite() {
            f64::MIN
        } else {
            0.0
        }
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    fn out(lo: f64, hi: f64) -> Self {
        if lo.is_nan() || hi.is_nan() {
            return Self::entire();
        }
        Interval { lo: lo.next_down(), hi: hi.next_up() }
    }

    fn hull4(a: f64, b: f64, c: f64, d: f64) -> Self {
        let lo = a.min(b).min(c).min(d);
        let hi = a.max(b).max(c).max(d);
        Self::out(lo, hi)
    }

    /// True if `x + 2πk` lies in the interval for some integer k.
    fn hits(&self, x: f64) -> bool {
        let k = ((self.lo - x) / TAU).ceil();
        x + k * TAU <= self.hi
    }
}

impl Add for Interval {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::out(self.lo + o.lo, self.hi + o.hi)
    }
}

impl Sub for Interval {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::out(self.lo - o.hi, self.hi - o.lo)
    }
}

impl Mul for Interval {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        // 0 * inf must not poison the product
        let m = |a: f64, b: f64| if a == 0.0 || b == 0.0 { 0.0 } else { a * b };
        Self::hull4(m(self.lo, o.lo), m(self.lo, o.hi), m(self.hi, o.lo), m(self.hi, o.hi))
    }
}

impl Div for Interval {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        if o.contains(0.0) {
            return Self::entire();
        }
        let inv = Self::out(1.0 / o.hi, 1.0 / o.lo);
        self * inv
    }
}

impl Neg for Interval {
    type Output = Self;
    fn neg(self) -> Self {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Scalar for Interval {
    fn cst(c: f64) -> Self {
        Interval::point(c)
    }
    fn val(&self) -> f64 {
        self.mid()
    }
    fn is_safe_divisor(&self) -> bool {
        let f = crate::tol::DIVISOR_FLOOR;
        self.lo >= f || self.hi <= -f
    }
    fn is_positive(&self) -> bool {
        self.lo > 0.0
    }
    fn sin(self) -> Self {
        (self - Interval::point(FRAC_PI_2)).cos()
    }
    fn cos(self) -> Self {
        if !(self.width() < TAU) {
            return Interval::new(-1.0, 1.0);
        }
        let a = self.lo.cos();
        let b = self.hi.cos();
        let mut lo = a.min(b);
        let mut hi = a.max(b);
        if self.hits(0.0) {
            hi = 1.0;
        }
        if self.hits(PI) {
            lo = -1.0;
        }
        let r = Self::out(lo, hi);
        Interval { lo: r.lo.max(-1.0), hi: r.hi.min(1.0) }
    }
    fn exp(self) -> Self {
        let r = Self::out(self.lo.exp(), self.hi.exp());
        Interval { lo: r.lo.max(0.0), hi: r.hi }
    }
    fn ln(self) -> Self {
        let lo = if self.lo > 0.0 { self.lo.ln() } else { f64::NEG_INFINITY };
        let hi = if self.hi > 0.0 { self.hi.ln() } else { f64::NEG_INFINITY };
        Self::out(lo, hi)
    }
    fn sqrt(self) -> Self {
        let lo = self.lo.max(0.0).sqrt();
        let hi = self.hi.max(0.0).sqrt();
        let r = Self::out(lo, hi);
        Interval { lo: r.lo.max(0.0), hi: r.hi }
    }
    fn sqr(self) -> Self {
        let a = self.lo * self.lo;
        let b = self.hi * self.hi;
        if self.contains(0.0) {
            Interval { lo: 0.0, hi: a.max(b).next_up() }
        } else {
            let r = Self::out(a.min(b), a.max(b));
            Interval { lo: r.lo.max(0.0), hi: r.hi }
        }
    }
    fn powi(self, n: i32) -> Self {
        match n {
            0 => Interval::point(1.0),
            1 => self,
            2 => self.sqr(),
            n if n < 0 => Interval::point(1.0) / self.powi(-n),
            n if n % 2 == 0 => self.sqr().powi(n / 2),
            n => self * self.powi(n - 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(i: Interval, k: usize, n: usize) -> f64 {
        i.lo + (i.hi - i.lo) * k as f64 / n as f64
    }

    proptest! {
        #[test]
        fn enclosure_holds(a in -4.0f64..4.0, w in 0.0f64..3.0, b in -4.0f64..4.0, v in 0.0f64..3.0) {
            let x = Interval::new(a, a + w);
            let y = Interval::new(b, b + v);
            let f = |x: Interval, y: Interval| (x * y).sin() + x.cos() * y.sqr() - (x - y).exp();
            let fi = f(x, y);
            for k in 0..=8 {
                for l in 0..=8 {
                    let (xs, ys) = (sample(x, k, 8), sample(y, l, 8));
                    let fv = (xs * ys).sin() + xs.cos() * ys * ys - (xs - ys).exp();
                    prop_assert!(fi.contains(fv), "{fv} not in {fi:?}");
                }
            }
        }
    }

    #[test]
    fn cos_extrema_are_caught() {
        let c = Interval::new(-0.1, 0.1).cos();
        assert!(c.hi >= 1.0 && c.lo < 0.996);
        let s = Interval::new(1.0, 2.0).sin();
        assert!(s.hi >= 1.0);
        let t = Interval::new(3.0, 3.3).cos();
        assert!(t.lo <= -1.0);
    }

    #[test]
    fn division_by_zero_straddling_is_entire() {
        let q = Interval::point(1.0) / Interval::new(-1.0, 1.0);
        assert!(q.lo.is_infinite() && q.hi.is_infinite());
        assert!(!Interval::new(-1.0, 1.0).is_safe_divisor());
    }
}
