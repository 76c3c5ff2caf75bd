use super::efunc::{e_gradient, e_value, frame};
use super::{MapJet2, SurfacePatch};
use crate::linalg::{self, R4};
use crate::planes::{RealPlane2, Slope};
use crate::{Error, Result, Tolerances};
use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::Serialize;

/// A point of a surface with a critical slope there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPair {
    pub param: [f64; 2],
    pub z: R4,
    pub slope: Slope,
    pub exceptional: bool,
    /// Normalized E-value at the pair.
    pub e_value: f64,
    /// Unit-speed derivative of E along the critical direction.
    pub de_value: f64,
}

/// The four exceptionality predicates, each with its own margin. A predicate
/// holds when its margin is below `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceptionalReport {
    pub pair: CriticalPair,
    pub conditions: [bool; 4],
    pub margins: [f64; 4],
    pub tolerance: f64,
    /// Parameter direction `d` with `Du·d = v` spanning `T_pS ∩ D_λ`.
    pub direction: [f64; 2],
    pub v: R4,
}

impl ExceptionalReport {
    /// True when every margin is either below `tolerance/factor` or above
    /// `tolerance*factor`.
    pub fn is_clear(&self, factor: f64) -> bool {
        self.margins.iter().all(|&m| m < self.tolerance / factor || m > self.tolerance * factor)
    }

    pub fn agree(&self) -> bool {
        self.conditions.iter().all(|&c| c == self.conditions[0])
    }

    pub fn all_true(&self) -> bool {
        self.conditions.iter().all(|&c| c)
    }
}

/// `u0 w_y − v0 w_x`: vanishes exactly on the complex line of the slope.
pub(crate) fn phi(l: &Slope, w: &R4) -> Complex64 {
    let (u0, v0) = l.homogeneous();
    let z = linalg::to_c2(w);
    u0 * z[1] - v0 * z[0]
}

/// Unit parameter direction spanning the kernel of `d ↦ φ(Du·d)`.
pub(crate) fn critical_direction(us: &R4, ut: &R4, l: &Slope) -> [f64; 2] {
    let a = phi(l, us);
    let b = phi(l, ut);
    let m = Matrix2::new(a.re, b.re, a.im, b.im);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let k = if svd.singular_values[0] < svd.singular_values[1] { 0 } else { 1 };
    [vt[(k, 0)], vt[(k, 1)]]
}

/// Unit normal of the real hyperplane `T_pS + D_λ`.
pub(crate) fn hyperplane_normal(us: &R4, ut: &R4, l: &Slope) -> R4 {
    let (w, jw) = l.generators();
    let nu = linalg::normalize(us);
    let nt = linalg::normalize(ut);
    let rows = [nu, nt, w, jw];
    let m = Matrix4::from_fn(|r, c| rows[r][c]);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut k = 0;
    for i in 1..4 {
        if svd.singular_values[i] < svd.singular_values[k] {
            k = i;
        }
    }
    [vt[(k, 0)], vt[(k, 1)], vt[(k, 2)], vt[(k, 3)]]
}

/// Signed normal curvature of the surface along the critical direction,
/// measured against `T_pS + D_λ`: `⟨n*, u_dd⟩ / |u_d|²`, with the sign of
/// `n*` as returned (callers needing continuity align it themselves).
pub fn signed_curvature_margin(j: &MapJet2<2>, l: &Slope) -> (f64, R4) {
    let d = critical_direction(&j.jac[0], &j.jac[1], l);
    let v = j.first(&d);
    let n = hyperplane_normal(&j.jac[0], &j.jac[1], l);
    (linalg::dot(&n, &j.second(&d)) / linalg::dot(&v, &v), n)
}

fn fd4<F: Fn(f64) -> Result<T>, T>(f: F, h: f64, comb: impl Fn(T, T, T, T) -> T) -> Result<T> {
    Ok(comb(f(2.0 * h)?, f(h)?, f(-h)?, f(-2.0 * h)?))
}

/// Evaluates the four equivalent characterizations of an exceptional pair,
/// each by its own route: the curvature vector, the derivative of E along
/// the critical direction, the intercept drift along the traced critical
/// curve, and the first-order motion of the critical circle.
pub fn exceptional_tests(s: &SurfacePatch, p: [f64; 2], l: &Slope, tol: &Tolerances) -> Result<ExceptionalReport> {
    let j = s.jet2::<2>(p)?;
    s.immersed_jacobian(&p)?;
    let plane = RealPlane2::from_frame(j.jac[0], j.jac[1])?;
    if plane.is_complex(tol) {
        let t = plane.wirtinger_angle();
        return Err(Error::ComplexTangent { angle: t.min(std::f64::consts::PI - t) });
    }
    let e = e_value(j.jac[0], j.jac[1], l);
    if e.abs() >= tol.crit {
        return Err(Error::NotCritical { e });
    }
    let d = critical_direction(&j.jac[0], &j.jac[1], l);
    let v = j.first(&d);
    let vn = linalg::norm(&v);

    // (1) curvature vector modulo T_pS lies in the line
    let (m1s, _) = signed_curvature_margin(&j, l);
    let m1 = m1s.abs();

    // (2) dE(v) = 0, or E singular
    let (_, g) = e_gradient(s, p, l)?;
    let gn = (g[0] * g[0] + g[1] * g[1]).sqrt();
    let m2 = if gn < 1e-10 { 0.0 } else { (g[0] * d[0] + g[1] * d[1]).abs() / vn };

    // (3) intercept of the λ-line along a regular parametrization of C_λ
    let m3 = if gn < 1e-10 {
        0.0
    } else {
        let n0 = [g[0] / gn, g[1] / gn];
        let t0 = [-n0[1], n0[0]];
        let on_curve = |sig: f64| -> Result<Complex64> {
            let mut eta = 0.0;
            for _ in 0..30 {
                let q = [p[0] + sig * t0[0] + eta * n0[0], p[1] + sig * t0[1] + eta * n0[1]];
                let (eq, gq) = e_gradient(s, q, l)?;
                if eq.abs() < 1e-15 {
                    break;
                }
                let slope = gq[0] * n0[0] + gq[1] * n0[1];
                if slope.abs() < 1e-14 {
                    return Err(Error::TraceFailure("critical curve folds over its tangent".into()));
                }
                eta -= eq / slope;
            }
            let q = [p[0] + sig * t0[0] + eta * n0[0], p[1] + sig * t0[1] + eta * n0[1]];
            Ok(phi(l, &s.point(&q)?))
        };
        let h = 1e-3;
        let dmu = fd4(on_curve, h, |a, b, c, d| (-a + 8.0 * b - 8.0 * c + d) / (12.0 * h))?;
        let ut = linalg::axpy(&linalg::scale(&j.jac[0], t0[0]), t0[1], &j.jac[1]);
        dmu.norm() / linalg::norm(&ut)
    };

    // (4) λ stays on the moving critical circle to first order along v
    let m4 = {
        let q = |t: f64| -> Result<f64> {
            let (a, b) = frame(s, [p[0] + t * d[0], p[1] + t * d[1]])?;
            Ok(RealPlane2::from_frame(a, b)?.oriented_value(l))
        };
        let h = 1e-3;
        fd4(q, h, |a, b, c, d| (-a + 8.0 * b - 8.0 * c + d) / (12.0 * h))?.abs() / vn
    };

    let margins = [m1, m2, m3, m4];
    let conditions = margins.map(|m| m < tol.exc);
    let pair = CriticalPair {
        param: p,
        z: j.value,
        slope: *l,
        exceptional: m2 < tol.exc,
        e_value: e,
        de_value: m2,
    };
    Ok(ExceptionalReport { pair, conditions, margins, tolerance: tol.exc, direction: d, v })
}
