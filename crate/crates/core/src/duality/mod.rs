//! The dual projection `π: (z, d) ↦ d` onto the plane of lines, dual
//! varieties `Ň = π(p*N)`, biduality and exceptional hypersurfaces.
//!
//! In the chart of non-vertical lines `y = λx + μ` the contact form reads
//! `dy − λ dx = dμ + x dλ`, so on the dual side the point coordinate `x`
//! plays the role of the fiber coordinate. The co-slope chart has the same
//! structure with `x = κy + ν`.

mod bidual;
mod hypersurface;

pub use bidual::{bidual_roundtrip, BidualReport, BidualRoute};
pub use hypersurface::{exceptional_hypersurface_test, HypersurfaceReport, HypersurfaceSample};

use crate::contact::{lift, Chart, ContactElement, Exclusion, TangentFrame, C3};
use crate::linalg::{self, C2, R4};
use crate::surfaces::SurfacePatch;
use crate::{Error, Result, Tolerances};
use num_complex::Complex64;
use serde::Serialize;

/// Relative singular-value threshold for the rank of `dπ`.
pub const PI_RANK: f64 = 1e-7;

/// A line of ℙ², `ξ0 Z0 + ξ1 Z1 + ξ2 Z2 = 0`, with `ξ` of unit norm and
/// its largest entry real positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualPoint {
    pub xi: [Complex64; 3],
}

impl DualPoint {
    pub fn new(xi: [Complex64; 3]) -> Result<DualPoint> {
        let n = xi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 1e-300) || !n.is_finite() {
            return Err(Error::InvalidInput("zero line coordinates".into()));
        }
        let mut k = 0;
        for i in 1..3 {
            if xi[i].norm() > xi[k].norm() * (1.0 + 1e-12) {
                k = i;
            }
        }
        let phase = xi[k].conj() / (xi[k].norm() * n);
        Ok(DualPoint { xi: xi.map(|z| z * phase) })
    }

    /// The line `y = λx + μ`.
    pub fn from_chart(l: Complex64, mu: Complex64) -> DualPoint {
        DualPoint::new([-mu, -l, Complex64::new(1.0, 0.0)]).expect("nonzero")
    }

    /// `(λ, μ)`, or `None` for a vertical line.
    pub fn chart(&self) -> Option<(Complex64, Complex64)> {
        let d = self.xi[2];
        if d.norm() < 1e-14 {
            return None;
        }
        Some((-self.xi[1] / d, -self.xi[0] / d))
    }

    /// Normalized incidence residual with the affine point `z`.
    pub fn incidence(&self, z: &C2) -> f64 {
        let r = self.xi[0] + self.xi[1] * z[0] + self.xi[2] * z[1];
        r.norm() / (1.0 + z[0].norm_sqr() + z[1].norm_sqr()).sqrt()
    }

    /// Chordal distance in the dual plane.
    pub fn distance(&self, o: &DualPoint) -> f64 {
        linalg::chordal3(&self.xi, &o.xi)
    }
}

/// The line through `w.z` with slope `w.slope`.
pub fn pi_project(w: &ContactElement) -> DualPoint {
    let (u, v) = w.slope.homogeneous();
    let [x, y] = w.z;
    // v (X - x) - u (Y - y) = 0
    DualPoint::new([u * y - v * x, v, -u]).expect("slope is nonzero")
}

/// Dual chart coordinates of `dπ(v)`: `(δc, δb − c δa − a δc)` where
/// `(a, b, c)` are the element's coordinates in the vector's chart.
pub(crate) fn dpi(w: &ContactElement, chart: Chart, v: &C3) -> Result<[Complex64; 2]> {
    let [a, _, c] = w.coords(chart).ok_or_else(|| Error::InvalidInput("element outside the frame's chart".into()))?;
    Ok([v[2], v[1] - c * v[0] - a * v[2]])
}

/// `dπ` applied to a tangent frame, as real 4-vectors `(Re δc, Im δc, Re δν, Im δν)`.
pub(crate) fn dpi_frame(w: &ContactElement, frame: &TangentFrame) -> Result<Vec<R4>> {
    let on = crate::contact::orthonormal_frame(w.coords(frame.chart).map(|c| c[2]).unwrap_or_default(), &frame.vecs)?;
    on.iter().map(|v| dpi(w, frame.chart, v).map(|d| linalg::from_c2(&d))).collect()
}

/// Rank of `dπ` on the tangent space spanned by `frame`.
pub fn pi_rank(w: &ContactElement, frame: &TangentFrame) -> Result<usize> {
    let cols = dpi_frame(w, frame)?;
    let mut data = Vec::with_capacity(4 * cols.len());
    for r in 0..4 {
        for c in &cols {
            data.push(c[r]);
        }
    }
    let s = linalg::singular_values(4, cols.len(), &data);
    let top = s.first().copied().unwrap_or(0.0);
    Ok(s.iter().filter(|&&x| x > PI_RANK * top).count())
}

#[derive(Debug, Clone, Serialize)]
pub struct DualSample {
    pub point: DualPoint,
    pub element: ContactElement,
    pub param: Vec<f64>,
    pub fiber_angle: Option<f64>,
    pub pi_rank: usize,
    pub complex_tangent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DualCloud {
    pub source: String,
    pub samples: Vec<DualSample>,
    pub excluded: Vec<Exclusion>,
}

impl DualCloud {
    pub fn max_incidence(&self) -> f64 {
        self.samples.iter().map(|s| s.point.incidence(&s.element.z)).fold(0.0, f64::max)
    }

    pub fn max_rank(&self) -> usize {
        self.samples.iter().map(|s| s.pi_rank).max().unwrap_or(0)
    }
}

/// `π(p*N)` over the lift's sample grid, each sample annotated with the
/// rank of `dπ` on the lift. Exclusions of the lift are carried over.
pub fn dual_variety(n: &SurfacePatch, grid: usize, fiber: usize, tol: &Tolerances) -> Result<DualCloud> {
    let m = lift(n, grid, fiber, tol)?;
    let mut samples = Vec::with_capacity(m.samples.len());
    for s in m.samples {
        samples.push(DualSample {
            point: pi_project(&s.element),
            pi_rank: pi_rank(&s.element, &s.frame)?,
            element: s.element,
            param: s.param,
            fiber_angle: s.fiber_angle,
            complex_tangent: s.complex_tangent,
        });
    }
    Ok(DualCloud { source: m.source_name, samples, excluded: m.excluded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planes::Slope;
    use crate::surfaces::Catalog;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn projection_examples() {
        let w = ContactElement::new([c(0.0, 0.0); 2], Slope::chart(c(0.3, -2.0)));
        let (l, mu) = pi_project(&w).chart().unwrap();
        assert!((l - c(0.3, -2.0)).norm() < 1e-15 && mu.norm() < 1e-15);
        let w = ContactElement::new([c(1.0, 0.0), c(2.0, 1.0)], Slope::chart(c(0.0, 1.0)));
        let (l, mu) = pi_project(&w).chart().unwrap();
        assert!((l - c(0.0, 1.0)).norm() < 1e-15 && (mu - c(2.0, 0.0)).norm() < 1e-15);
        let w = ContactElement::new([c(3.0, 0.0), c(-1.0, 4.0)], Slope::infinity());
        let d = pi_project(&w);
        assert!(d.chart().is_none());
        assert!(d.incidence(&[c(3.0, 0.0), c(7.0, -2.0)]) < 1e-15);
        assert!(d.incidence(&[c(2.0, 0.0), c(7.0, -2.0)]) > 1e-2);
    }

    #[test]
    fn dual_contact_identity() {
        // ω(v) = δμ + x δλ along any vector
        let w = ContactElement::new([c(0.4, -1.0), c(2.0, 0.5)], Slope::chart(c(0.3, 0.7)));
        let v = [c(1.0, 2.0), c(-0.5, 0.1), c(0.2, -0.9)];
        let [dl, dmu] = dpi(&w, Chart::Slope, &v).unwrap();
        let om = crate::contact::contact_form_eval(&w, &v);
        assert!((om - (dmu + w.z[0] * dl)).norm() < 1e-15);
    }

    #[test]
    fn real_plane_is_self_dual() {
        let d = dual_variety(&SurfacePatch::from_catalog(Catalog::R2), 5, 12, &Tolerances::default()).unwrap();
        assert!(d.max_incidence() < 1e-12);
        for s in &d.samples {
            assert_eq!(s.pi_rank, 2);
            let xi = s.point.xi;
            assert!(xi.iter().all(|z| z.im.abs() < 1e-12), "{xi:?}");
        }
    }

    #[test]
    fn conic_dual_is_the_dual_conic() {
        let d = dual_variety(&SurfacePatch::from_catalog(Catalog::ComplexConic), 6, 4, &Tolerances::default()).unwrap();
        assert_eq!(d.samples.len(), 36);
        for s in &d.samples {
            let (l, mu) = s.point.chart().unwrap();
            assert!((mu + l * l / 4.0).norm() < 1e-9 * (1.0 + l.norm_sqr()), "{l} {mu}");
            assert_eq!(s.pi_rank, 2);
        }
    }

    #[test]
    fn torus_dual_is_three_dimensional() {
        let d = dual_variety(&SurfacePatch::from_catalog(Catalog::CliffordTorus), 4, 24, &Tolerances::default()).unwrap();
        assert!(d.max_incidence() < 1e-12);
        // the symmetric fiber sampling hits the three pencil slopes exactly
        let full = d.samples.iter().filter(|s| s.pi_rank == 3).count();
        assert_eq!(full, d.samples.len() - 3 * 16);
        // pencil slopes drop the rank
        for s in d.samples.iter().filter(|s| s.pi_rank < 3) {
            let (u, v) = s.element.slope.homogeneous();
            let z = s.element.z;
            let through_origin = (v * z[0] - u * z[1]).norm();
            assert!(u.norm() < 1e-3 || v.norm() < 1e-3 || through_origin < 1e-3, "{:?}", s.element);
        }
    }
}
