//! Real 2-planes in ℂ², their Wirtinger angle, and the circle of slopes of
//! complex lines that fail to be transverse to them.

use crate::linalg::{self, R4};
use crate::{Error, Result, Tolerances};
use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type Unitary = Matrix2<Complex64>;

/// Direction of a complex line through the origin, as a point of ℙ¹(ℂ):
/// the line `ℂ·(u, v)`, which in the chart reads `y = (v/u) x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slope {
    u: Complex64,
    v: Complex64,
}

impl Slope {
    /// Normalizes `(u, v)` to unit norm with a fixed phase (first nonzero
    /// entry real positive).
    pub fn new(u: Complex64, v: Complex64) -> Result<Slope> {
        let n = (u.norm_sqr() + v.norm_sqr()).sqrt();
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::InvalidInput("slope (0, 0) is not a point of P1".into()));
        }
        let (mut u, mut v) = (u / n, v / n);
        let lead = if u.norm() > 1e-15 { u } else { v };
        let phase = lead.conj() / lead.norm();
        u *= phase;
        v *= phase;
        Ok(Slope { u, v })
    }

    pub fn chart(l: Complex64) -> Slope {
        Slope::new(Complex64::new(1.0, 0.0), l).expect("finite slope")
    }

    pub fn real(l: f64) -> Slope {
        Slope::chart(Complex64::new(l, 0.0))
    }

    pub fn infinity() -> Slope {
        Slope { u: Complex64::new(0.0, 0.0), v: Complex64::new(1.0, 0.0) }
    }

    pub fn homogeneous(&self) -> (Complex64, Complex64) {
        (self.u, self.v)
    }

    /// `λ = v/u`, or `None` for the vertical direction.
    pub fn value(&self) -> Option<Complex64> {
        if self.u.norm() < 1e-15 {
            None
        } else {
            Some(self.v / self.u)
        }
    }

    /// Co-slope `1/λ = u/v`, or `None` for the horizontal direction.
    pub fn co_value(&self) -> Option<Complex64> {
        if self.v.norm() < 1e-15 {
            None
        } else {
            Some(self.u / self.v)
        }
    }

    /// `|u1 v2 - u2 v1|`, the chordal distance on ℙ¹.
    pub fn distance(&self, o: &Slope) -> f64 {
        (self.u * o.v - self.v * o.u).norm()
    }

    pub fn eq_proj(&self, o: &Slope, tol: f64) -> bool {
        self.distance(o) < tol
    }

    /// Real generators `w, Jw` of the complex line `D_λ`, unit length.
    pub fn generators(&self) -> (R4, R4) {
        let w = [self.u.re, self.u.im, self.v.re, self.v.im];
        (w, linalg::j(&w))
    }

    pub fn transform(&self, m: &Unitary) -> Slope {
        let z = m * nalgebra::Vector2::new(self.u, self.v);
        Slope::new(z[0], z[1]).expect("unitary image is nonzero")
    }
}

/// Kind of the zero set of a Hermitian form on ℙ¹.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CircleKind {
    Circle,
    /// Degenerate point circle (`det H = 0`).
    Point,
    /// Definite form, empty zero set.
    Empty,
}

/// Circle on the Riemann sphere: zero set of
/// `A|u|² + 2 Re(conj(B) conj(u) v) + D|v|²`, i.e. in the chart
/// `A + 2 Re(conj(B) λ) + D|λ|² = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereCircle {
    pub a: f64,
    pub b: Complex64,
    pub d: f64,
}

impl SphereCircle {
    /// From the chart polynomial `a + c1 λ1 + c2 λ2 + d |λ|²`; normalized.
    pub fn from_coefficients(a: f64, c1: f64, c2: f64, d: f64) -> SphereCircle {
        SphereCircle { a, b: Complex64::new(c1 / 2.0, c2 / 2.0), d }.normalized()
    }

    /// Frobenius norm of the Hermitian matrix.
    pub fn frobenius(&self) -> f64 {
        (self.a * self.a + 2.0 * self.b.norm_sqr() + self.d * self.d).sqrt()
    }

    /// Unit Frobenius norm, first nonzero of `(A, Re B, Im B, D)` positive.
    pub fn normalized(&self) -> SphereCircle {
        let n = self.frobenius();
        if n == 0.0 {
            return *self;
        }
        let mut c = SphereCircle { a: self.a / n, b: self.b / n, d: self.d / n };
        let lead = [c.a, c.b.re, c.b.im, c.d].into_iter().find(|x| x.abs() > 1e-14).unwrap_or(0.0);
        if lead < 0.0 {
            c = SphereCircle { a: -c.a, b: -c.b, d: -c.d };
        }
        c
    }

    /// Hermitian matrix `M` with `z* M z` the form value at `z = (u, v)`.
    pub fn matrix(&self) -> Matrix2<Complex64> {
        Matrix2::new(Complex64::new(self.a, 0.0), self.b.conj(), self.b, Complex64::new(self.d, 0.0))
    }

    fn from_matrix(m: &Matrix2<Complex64>) -> SphereCircle {
        SphereCircle { a: m[(0, 0)].re, b: 0.5 * (m[(1, 0)] + m[(0, 1)].conj()), d: m[(1, 1)].re }
    }

    pub fn value(&self, s: &Slope) -> f64 {
        let (u, v) = s.homogeneous();
        self.a * u.norm_sqr() + 2.0 * (self.b.conj() * u.conj() * v).re + self.d * v.norm_sqr()
    }

    pub fn value_chart(&self, l: Complex64) -> f64 {
        self.a + 2.0 * (self.b.conj() * l).re + self.d * l.norm_sqr()
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b.norm_sqr()
    }

    pub fn spectral_norm(&self) -> f64 {
        let tr = 0.5 * (self.a + self.d);
        let disc = (0.25 * (self.a - self.d).powi(2) + self.b.norm_sqr()).sqrt();
        tr.abs() + disc
    }

    /// Classification from the sign of the determinant of the normalized form.
    /// `angle_tol` is the Wirtinger angle below which a circle is a point.
    pub fn kind(&self, angle_tol: f64) -> CircleKind {
        let det = self.normalized().det();
        let eps = 0.25 * angle_tol * angle_tol;
        if det < -eps {
            CircleKind::Circle
        } else if det <= eps {
            CircleKind::Point
        } else {
            CircleKind::Empty
        }
    }

    /// Center and radius in the λ-chart; `None` for lines through ∞ (`D = 0`).
    pub fn center_radius(&self) -> Option<(Complex64, f64)> {
        if self.d.abs() < 1e-14 * self.frobenius() {
            return None;
        }
        let c = -self.b / self.d;
        let r2 = (self.b.norm_sqr() - self.a * self.d) / (self.d * self.d);
        Some((c, r2.max(0.0).sqrt()))
    }

    /// Image under the Möbius map induced by `m` on ℙ¹.
    pub fn transform(&self, m: &Unitary) -> SphereCircle {
        let h = m * self.matrix() * m.adjoint();
        SphereCircle::from_matrix(&h).normalized()
    }

    /// Equality of zero sets as Hermitian forms up to positive scale.
    pub fn residual(&self, o: &SphereCircle) -> f64 {
        let (p, q) = (self.normalized(), o.normalized());
        ((p.a - q.a).powi(2) + 2.0 * (p.b - q.b).norm_sqr() + (p.d - q.d).powi(2)).sqrt()
    }

    /// Point of the circle at intrinsic angle `phi`, after diagonalizing the
    /// form. `None` for a definite (empty) form.
    pub fn point_at(&self, phi: f64) -> Option<Slope> {
        let eig = self.matrix().symmetric_eigen();
        let (ip, im) = if eig.eigenvalues[0] >= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
        let sp = eig.eigenvalues[ip];
        let sm = -eig.eigenvalues[im];
        if sp < -1e-15 || sm < -1e-15 {
            return None;
        }
        let wp = eig.eigenvectors.column(ip).into_owned();
        let wm = eig.eigenvectors.column(im).into_owned();
        let z = wp * Complex64::new(sm.max(0.0).sqrt(), 0.0) + wm * Complex64::from_polar(sp.max(0.0).sqrt(), phi);
        Slope::new(z[0], z[1]).ok()
    }

    /// `n` points of the circle, uniform in its intrinsic angle. For a point
    /// circle all samples coincide; an empty form yields nothing.
    pub fn sample(&self, n: usize) -> Vec<Slope> {
        (0..n)
            .filter_map(|k| self.point_at(std::f64::consts::TAU * k as f64 / n as f64))
            .collect()
    }
}

/// Non-transversality test result. `margin` is the form value normalized by
/// the spectral norm, so it is scale free and ±1 at extreme slopes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transversality {
    pub transverse: bool,
    pub margin: f64,
}

/// Oriented real 2-plane of ℂ², stored by an orthonormal frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealPlane2 {
    t1: R4,
    t2: R4,
}

impl RealPlane2 {
    /// Oriented span of `a, b`, orthonormalized.
    pub fn from_frame(a: R4, b: R4) -> Result<RealPlane2> {
        let na = linalg::norm(&a);
        if !(na > 1e-12) {
            return Err(Error::InvalidInput("degenerate frame".into()));
        }
        let t1 = linalg::scale(&a, 1.0 / na);
        let mut t2 = linalg::axpy(&b, -linalg::dot(&b, &t1), &t1);
        t2 = linalg::axpy(&t2, -linalg::dot(&t2, &t1), &t1);
        let n2 = linalg::norm(&t2);
        if !(n2 > 1e-10 * linalg::norm(&b).max(na)) {
            return Err(Error::InvalidInput("frame vectors are dependent".into()));
        }
        Ok(RealPlane2 { t1, t2: linalg::scale(&t2, 1.0 / n2) })
    }

    /// Common kernel of two real linear forms, oriented so that
    /// `(t1, t2, f1, f2)` is direct.
    pub fn from_covectors(f1: R4, f2: R4) -> Result<RealPlane2> {
        let s = linalg::singular_values(2, 4, &[f1, f2].concat());
        if !(s[1] > 1e-10 * s[0]) {
            return Err(Error::InvalidInput("covectors have rank < 2".into()));
        }
        let k = linalg::complement(&[f1, f2]);
        let (t1, mut t2) = (k[0], k[1]);
        if linalg::det4(&t1, &t2, &f1, &f2) < 0.0 {
            t2 = linalg::scale(&t2, -1.0);
        }
        Ok(RealPlane2 { t1, t2 })
    }

    pub fn frame(&self) -> (R4, R4) {
        (self.t1, self.t2)
    }

    /// Orthonormal covectors `(n1, n2)` with `(t1, t2, n1, n2)` direct.
    pub fn covectors(&self) -> (R4, R4) {
        let k = linalg::complement(&[self.t1, self.t2]);
        let (n1, mut n2) = (k[0], k[1]);
        if linalg::det4(&self.t1, &self.t2, &n1, &n2) < 0.0 {
            n2 = linalg::scale(&n2, -1.0);
        }
        (n1, n2)
    }

    /// Same plane with the opposite orientation.
    pub fn flipped(&self) -> RealPlane2 {
        RealPlane2 { t1: self.t1, t2: linalg::scale(&self.t2, -1.0) }
    }

    /// Holomorphic angle θ ∈ [0, π] with `J t1 = cos θ t2 + sin θ n`, `n ⟂ P`.
    pub fn wirtinger_angle(&self) -> f64 {
        let jt1 = linalg::j(&self.t1);
        let c = linalg::dot(&jt1, &self.t2);
        let rest = linalg::axpy(&linalg::axpy(&jt1, -c, &self.t2), -linalg::dot(&jt1, &self.t1), &self.t1);
        linalg::norm(&rest).atan2(c)
    }

    /// Orientation with θ ∈ [0, π/2], and whether it had to be reversed.
    pub fn canonical(&self) -> (RealPlane2, bool) {
        if self.wirtinger_angle() > std::f64::consts::FRAC_PI_2 {
            (self.flipped(), true)
        } else {
            (*self, false)
        }
    }

    pub fn is_complex(&self, tol: &Tolerances) -> bool {
        let t = self.wirtinger_angle();
        t.min(std::f64::consts::PI - t) <= tol.angle
    }

    /// Coefficients `(A, c1, c2, D)` of `A + c1 λ1 + c2 λ2 + D |λ|²` computed
    /// from the covectors `f_k = α_k x1 + β_k x2 + γ_k y1 + δ_k y2`. With the
    /// direct orthonormal covectors this equals `det[t1, t2, v1, v2]` for
    /// `v1 = (1, λ)`, `v2 = (i, iλ)`.
    pub fn circle_coefficients(&self) -> [f64; 4] {
        let (f1, f2) = self.covectors();
        let [a1, b1, g1, d1] = f1;
        let [a2, b2, g2, d2] = f2;
        [
            a1 * b2 - a2 * b1,
            a1 * d2 - a2 * d1 + b2 * g1 - b1 * g2,
            -(b1 * d2 - b2 * d1 + a1 * g2 - a2 * g1),
            g1 * d2 - g2 * d1,
        ]
    }

    /// The critical circle, normalized.
    pub fn critical_circle(&self) -> SphereCircle {
        let [a, c1, c2, d] = self.circle_coefficients();
        SphereCircle::from_coefficients(a, c1, c2, d)
    }

    /// Orientation-carrying (unnormalized) form: `det[t1, t2, w, Jw]` at a
    /// unit homogeneous representative `w` of the slope.
    pub fn oriented_value(&self, s: &Slope) -> f64 {
        let (w, jw) = s.generators();
        linalg::det4(&self.t1, &self.t2, &w, &jw)
    }

    pub fn is_transverse(&self, s: &Slope, tol: &Tolerances) -> Transversality {
        let c = self.critical_circle();
        let margin = c.value(s) / c.spectral_norm();
        Transversality { transverse: margin.abs() > tol.transv, margin }
    }

    /// Image of the plane under a unitary map of ℂ².
    pub fn transform(&self, m: &Unitary) -> RealPlane2 {
        let f = |t: &R4| {
            let z = linalg::to_c2(t);
            let w = m * nalgebra::Vector2::new(z[0], z[1]);
            linalg::from_c2(&[w[0], w[1]])
        };
        RealPlane2 { t1: f(&self.t1), t2: f(&self.t2) }
    }

    /// The plane `{y2 = 0, cos θ y1 + sin θ x2 = 0}` oriented by
    /// `(∂x1, cos θ ∂x2 - sin θ ∂y1)`, whose angle is θ.
    pub fn normal_form_plane(theta: f64) -> RealPlane2 {
        let (s, c) = theta.sin_cos();
        RealPlane2 { t1: [1.0, 0.0, 0.0, 0.0], t2: [0.0, c, -s, 0.0] }
    }

    /// Unitary `U` sending the (canonically oriented) plane to its normal
    /// form, together with θ ∈ (0, π/2] and whether the orientation flipped.
    pub fn normal_form(&self, tol: &Tolerances) -> Result<NormalForm> {
        let (p, flipped) = self.canonical();
        let theta = p.wirtinger_angle();
        if theta <= tol.angle {
            return Err(Error::ComplexTangent { angle: theta });
        }
        let (t1, t2) = p.frame();
        let c = theta.cos();
        let s = theta.sin();
        let m = linalg::scale(&linalg::axpy(&t2, -c, &linalg::j(&t1)), 1.0 / s);
        let a = linalg::to_c2(&t1);
        let b = linalg::to_c2(&m);
        let basis = Matrix2::new(a[0], b[0], a[1], b[1]);
        let flip = Matrix2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
        );
        Ok(NormalForm { u: flip * basis.adjoint(), theta, flipped })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalForm {
    pub u: Unitary,
    pub theta: f64,
    pub flipped: bool,
}

/// Normal-form circle `cos θ |λ|² = sin θ λ2`.
pub fn normal_form_circle(theta: f64) -> SphereCircle {
    SphereCircle::from_coefficients(0.0, 0.0, theta.sin(), -theta.cos())
}

/// Haar-random element of U(2) from four Gaussian-free uniforms in [0, 1).
pub fn unitary_from_uniforms(r: [f64; 4]) -> Unitary {
    use std::f64::consts::TAU;
    let cos_t = r[0].sqrt();
    let sin_t = (1.0 - r[0]).sqrt();
    let a = Complex64::from_polar(cos_t, TAU * r[1]);
    let b = Complex64::from_polar(sin_t, TAU * r[2]);
    let ph = Complex64::from_polar(1.0, TAU * r[3]);
    Matrix2::new(a, -b.conj(), b, a.conj()) * ph
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    const E: [R4; 4] = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];

    #[test]
    fn angles_of_reference_planes() {
        let r2 = RealPlane2::from_frame(E[0], E[2]).unwrap();
        assert!((r2.wirtinger_angle() - FRAC_PI_2).abs() < 1e-15);
        let line = RealPlane2::from_frame(E[0], E[1]).unwrap();
        assert_eq!(line.wirtinger_angle(), 0.0);
        let p = RealPlane2::from_frame(E[0], [0.0, 0.3f64.cos(), 0.3f64.sin(), 0.0]).unwrap();
        assert!((p.wirtinger_angle() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn r2_circle_is_real_axis() {
        let r2 = RealPlane2::from_frame(E[0], E[2]).unwrap();
        let c = r2.critical_circle();
        assert!(c.a.abs() < 1e-15 && c.d.abs() < 1e-15 && c.b.re.abs() < 1e-15);
        let t = r2.is_transverse(&Slope::chart(Complex64::i()), &Tolerances::default());
        assert!(t.transverse && (t.margin.abs() - 1.0).abs() < 1e-12);
        let t = r2.is_transverse(&Slope::real(1.0), &Tolerances::default());
        assert!(!t.transverse);
    }

    #[test]
    fn normal_form_circle_through_zero_and_i_tan() {
        let p = RealPlane2::from_covectors(E[3], [0.0, FRAC_PI_4.sin(), FRAC_PI_4.cos(), 0.0]).unwrap();
        let c = p.critical_circle();
        let (center, r) = c.center_radius().unwrap();
        assert!((center - Complex64::new(0.0, 0.5)).norm() < 1e-12);
        assert!((r - 0.5).abs() < 1e-12);
        assert!(!p.is_transverse(&Slope::chart(Complex64::i()), &Tolerances::default()).transverse);
    }

    #[test]
    fn complex_line_gives_point_circle() {
        let line = RealPlane2::from_covectors(E[2], E[3]).unwrap();
        let c = line.critical_circle();
        assert_eq!(c.kind(1e-7), CircleKind::Point);
        let (center, r) = c.center_radius().unwrap();
        assert!(center.norm() < 1e-14 && r < 1e-7);
    }

    #[test]
    fn r2_normal_form() {
        let r2 = RealPlane2::from_frame(E[0], E[2]).unwrap();
        let nf = r2.normal_form(&Tolerances::default()).unwrap();
        assert!((nf.theta - FRAC_PI_2).abs() < 1e-14);
        let (f1, f2) = r2.transform(&nf.u).covectors();
        // span of the image covectors is span{dy2, dx2}
        for f in [f1, f2] {
            assert!(f[0].abs() < 1e-12 && f[2].abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_points_lie_on_circle() {
        let p = RealPlane2::from_frame([0.3, -1.0, 0.2, 0.5], [1.0, 0.1, -0.4, 0.9]).unwrap();
        let c = p.critical_circle();
        for s in c.sample(64) {
            assert!(c.value(&s).abs() < 1e-13);
        }
    }
}
