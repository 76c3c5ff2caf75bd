use super::Scalar;
use std::ops::{Add, Mul, Neg, Sub};

/// Complex number over an arbitrary [`Scalar`]; `num_complex` only covers
/// float component types.
#[derive(Debug, Clone, Copy)]
pub struct Cx<T> {
    pub re: T,
    pub im: T,
}

impl<T: Scalar> Cx<T> {
    pub fn new(re: T, im: T) -> Self {
        Cx { re, im }
    }

    pub fn real(re: T) -> Self {
        Cx { re, im: T::cst(0.0) }
    }

    pub fn cst(re: f64, im: f64) -> Self {
        Cx { re: T::cst(re), im: T::cst(im) }
    }

    pub fn conj(self) -> Self {
        Cx { re: self.re, im: -self.im }
    }

    pub fn norm_sqr(self) -> T {
        self.re * self.re + self.im * self.im
    }

    pub fn scale(self, c: T) -> Self {
        Cx { re: self.re * c, im: self.im * c }
    }

    /// Division that refuses near-zero denominators.
    pub fn checked_div(self, d: Self) -> crate::Result<Self> {
        if !(d.re.is_safe_divisor() || d.im.is_safe_divisor()) {
            return Err(crate::Error::Domain(format!(
                "division by {:e}{:+e}i",
                d.re.val(),
                d.im.val()
            )));
        }
        let n = d.norm_sqr();
        let num = self * d.conj();
        Ok(Cx { re: num.re / n, im: num.im / n })
    }

    pub fn exp(self) -> Self {
        let r = self.re.exp();
        Cx { re: r * self.im.cos(), im: r * self.im.sin() }
    }

    pub fn sin(self) -> Self {
        let (ch, sh) = cosh_sinh(self.im);
        Cx { re: self.re.sin() * ch, im: self.re.cos() * sh }
    }

    pub fn cos(self) -> Self {
        let (ch, sh) = cosh_sinh(self.im);
        Cx { re: self.re.cos() * ch, im: -(self.re.sin() * sh) }
    }

    pub fn powi(self, n: i32) -> crate::Result<Self> {
        if n < 0 {
            return Cx::cst(1.0, 0.0).checked_div(self.powi(-n)?);
        }
        let mut acc = Cx::cst(1.0, 0.0);
        for _ in 0..n {
            acc = acc * self;
        }
        Ok(acc)
    }
}

fn cosh_sinh<T: Scalar>(x: T) -> (T, T) {
    let e = x.exp();
    let f = (-x).exp();
    ((e + f).scale(0.5), (e - f).scale(0.5))
}

impl<T: Scalar> Add for Cx<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Cx { re: self.re + o.re, im: self.im + o.im }
    }
}

impl<T: Scalar> Sub for Cx<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Cx { re: self.re - o.re, im: self.im - o.im }
    }
}

impl<T: Scalar> Mul for Cx<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Cx {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl<T: Scalar> Neg for Cx<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Cx { re: -self.re, im: -self.im }
    }
}
