//! The contact manifold of pointed complex lines, `X = {(z, d) : z ∈ d}`,
//! in its two affine charts, and the semi-legendrian lifts of real
//! submanifolds of ℂ².
//!
//! In the slope chart a point is `(x, y, λ)` and the contact form is
//! `ω = dy − λ dx`. The co-slope chart swaps the roles of `x` and `y` and
//! uses `κ = 1/λ`; in its own coordinates `(a, b, c) = (y, x, κ)` the form
//! has the same expression `db − c da`.

pub(crate) mod lift;
mod patch;
mod verify;

pub use lift::{hypersurface_slope, lift, Exclusion, LiftKind, LiftSample, LiftedPatch};
pub use patch::ContactPatch;
pub use verify::{
    creased_sphere, gluing_check, holomorphic_legendrian_test, projection_distance, verify_projection_lemmas,
    GluingPoint, GluingReport, HolomorphicLegendrian, ProjectionCheck, ProjectionReport,
};

use crate::linalg::C2;
use crate::planes::Slope;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C3 = [Complex64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// `(x, y, λ)`.
    Slope,
    /// `(y, x, 1/λ)`.
    CoSlope,
}

impl Chart {
    pub fn other(self) -> Chart {
        match self {
            Chart::Slope => Chart::CoSlope,
            Chart::CoSlope => Chart::Slope,
        }
    }
}

/// A point `z` of ℂ² together with a complex line through it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactElement {
    pub z: C2,
    pub slope: Slope,
}

impl ContactElement {
    pub fn new(z: C2, slope: Slope) -> ContactElement {
        ContactElement { z, slope }
    }

    /// The better conditioned chart: slope chart while `|λ| ≤ 1`.
    pub fn chart(&self) -> Chart {
        let (u, v) = self.slope.homogeneous();
        if v.norm() <= u.norm() {
            Chart::Slope
        } else {
            Chart::CoSlope
        }
    }

    /// Chart coordinates, `None` when the fiber coordinate is infinite there.
    pub fn coords(&self, chart: Chart) -> Option<C3> {
        match chart {
            Chart::Slope => self.slope.value().map(|l| [self.z[0], self.z[1], l]),
            Chart::CoSlope => self.slope.co_value().map(|k| [self.z[1], self.z[0], k]),
        }
    }

    pub fn from_coords(chart: Chart, c: C3) -> ContactElement {
        match chart {
            Chart::Slope => ContactElement { z: [c[0], c[1]], slope: Slope::chart(c[2]) },
            Chart::CoSlope => ContactElement {
                z: [c[1], c[0]],
                slope: Slope::new(c[2], Complex64::new(1.0, 0.0)).expect("nonzero"),
            },
        }
    }
}

/// Tangent vectors of a contact patch, in the coordinates of one chart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentFrame {
    pub chart: Chart,
    pub vecs: Vec<C3>,
}

impl TangentFrame {
    /// The same vectors expressed in the other chart at `w`.
    pub fn swapped(&self, w: &ContactElement) -> Result<TangentFrame> {
        let c = w
            .coords(self.chart)
            .ok_or_else(|| Error::InvalidInput("element outside the frame's chart".into()))?[2];
        if c.norm() < 1e-14 {
            return Err(Error::InvalidInput("fiber coordinate vanishes; the other chart is singular here".into()));
        }
        let vecs = self.vecs.iter().map(|v| [v[1], v[0], -v[2] / (c * c)]).collect();
        Ok(TangentFrame { chart: self.chart.other(), vecs })
    }
}

/// `ω(v) = δb − c δa` at `w`, with `v` given in the slope chart when `λ` is
/// finite and in the co-slope chart otherwise.
pub fn contact_form_eval(w: &ContactElement, v: &C3) -> Complex64 {
    let chart = if w.slope.value().is_some() { Chart::Slope } else { Chart::CoSlope };
    let c = w.coords(chart).expect("chart chosen to be valid")[2];
    v[1] - c * v[0]
}

fn form_in(chart_c: Complex64, v: &C3) -> Complex64 {
    v[1] - chart_c * v[0]
}

/// Orthonormalizes `vecs` for the metric `|δa|² + |δb|² + |δc|²/(1+|c|²)²`
/// (Fubini–Study along the fiber), which is invariant under the chart swap.
pub(crate) fn orthonormal_frame(c: Complex64, vecs: &[C3]) -> Result<Vec<C3>> {
    let rho = 1.0 / (1.0 + c.norm_sqr());
    let ip = |a: &C3, b: &C3| -> f64 {
        (a[0].conj() * b[0] + a[1].conj() * b[1]).re + rho * rho * (a[2].conj() * b[2]).re
    };
    let scale = vecs.iter().map(|v| ip(v, v).sqrt()).fold(0.0, f64::max);
    let mut out: Vec<C3> = Vec::new();
    for v in vecs {
        let mut w = *v;
        for _ in 0..2 {
            for o in &out {
                let k = ip(o, &w);
                w = [w[0] - o[0] * k, w[1] - o[1] * k, w[2] - o[2] * k];
            }
        }
        let n = ip(&w, &w).sqrt();
        if !(n > 1e-9 * scale) {
            return Err(Error::ImmersionFailure { at: Vec::new(), sigma: n });
        }
        out.push([w[0] / n, w[1] / n, w[2] / n]);
    }
    Ok(out)
}

/// Singular values of the real 2×k matrix `[Re ω(v_i); Im ω(v_i)]` of the
/// normalized form `ω/√(1+|c|²)` on a metric-orthonormal frame, descending.
pub fn omega_singular_values(w: &ContactElement, frame: &TangentFrame) -> Result<[f64; 2]> {
    let c = w
        .coords(frame.chart)
        .ok_or_else(|| Error::InvalidInput("element outside the frame's chart".into()))?[2];
    let on = orthonormal_frame(c, &frame.vecs)?;
    let norm = (1.0 + c.norm_sqr()).sqrt();
    let mut data = Vec::with_capacity(2 * on.len());
    let vals: Vec<Complex64> = on.iter().map(|v| form_in(c, v) / norm).collect();
    data.extend(vals.iter().map(|z| z.re));
    data.extend(vals.iter().map(|z| z.im));
    let s = crate::linalg::singular_values(2, on.len(), &data);
    Ok([s.first().copied().unwrap_or(0.0), s.get(1).copied().unwrap_or(0.0)])
}

/// How far the tangent space spanned by `frame` is from meeting the contact
/// plane in dimension ≥ 2. For a 3-frame this is the second singular value
/// of the normalized form matrix; for a 2-frame the largest one.
pub fn semi_legendrian_defect(w: &ContactElement, frame: &TangentFrame) -> Result<f64> {
    let s = omega_singular_values(w, frame)?;
    Ok(match frame.vecs.len() {
        0 | 1 => 0.0,
        2 => s[0],
        3 => s[1],
        _ => 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn form_examples() {
        let w = ContactElement::new([c(0.0, 0.0); 2], Slope::real(0.0));
        assert_eq!(contact_form_eval(&w, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]), c(0.0, 0.0));
        assert_eq!(contact_form_eval(&w, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]), c(1.0, 0.0));
        let w = ContactElement::new([c(0.0, 0.0); 2], Slope::chart(c(2.0, 1.0)));
        let v = contact_form_eval(&w, &[c(1.0, 0.0), c(2.0, 1.0), c(5.0, 0.0)]);
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn vertical_element_uses_swapped_chart() {
        let w = ContactElement::new([c(3.0, 0.0), c(1.0, 0.0)], Slope::infinity());
        assert_eq!(w.chart(), Chart::CoSlope);
        assert_eq!(w.coords(Chart::Slope), None);
        // (δa, δb) = (δy, δx): a vertical move is legendrian
        assert!(contact_form_eval(&w, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).norm() < 1e-15);
        let back = ContactElement::from_coords(Chart::CoSlope, w.coords(Chart::CoSlope).unwrap());
        assert!(back.slope.eq_proj(&w.slope, 1e-15) && back.z == w.z);
    }

    #[test]
    fn hyperplane_lift_frame_is_rank_one() {
        let w = ContactElement::new([c(0.0, 0.0); 2], Slope::real(0.0));
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let f = TangentFrame {
            chart: Chart::Slope,
            vecs: vec![[one, zero, zero], [c(0.0, 1.0), zero, zero], [zero, one, zero]],
        };
        assert!(semi_legendrian_defect(&w, &f).unwrap() < 1e-15);
    }

    #[test]
    fn fiberless_plane_defect() {
        // {(x, 0, 1)} with the fiber direction added: ω-values (−1, −i, 0)
        let w = ContactElement::new([c(0.0, 0.0); 2], Slope::real(1.0));
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let f = TangentFrame {
            chart: Chart::Slope,
            vecs: vec![[one, zero, zero], [c(0.0, 1.0), zero, zero], [zero, zero, one]],
        };
        let d = semi_legendrian_defect(&w, &f).unwrap();
        assert!((d - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn defect_is_chart_invariant() {
        let w = ContactElement::new([c(0.3, -0.2), c(1.1, 0.4)], Slope::chart(c(0.7, 0.5)));
        let f = TangentFrame {
            chart: Chart::Slope,
            vecs: vec![
                [c(1.0, 0.2), c(0.3, -0.1), c(0.5, 0.5)],
                [c(-0.4, 0.9), c(0.2, 0.8), c(-1.0, 0.3)],
                [c(0.1, 0.1), c(1.0, -0.6), c(0.2, 0.0)],
            ],
        };
        let a = semi_legendrian_defect(&w, &f).unwrap();
        let b = semi_legendrian_defect(&w, &f.swapped(&w).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} {b}");
        assert!(a > 1e-3);
    }
}
