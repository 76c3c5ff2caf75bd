use super::{semi_legendrian_defect, Chart, ContactElement, TangentFrame, C3};
use crate::jets::{Cx, Jet1, Scalar};
use crate::linalg::{self, R4};
use crate::planes::{RealPlane2, Slope};
use crate::surfaces::SurfacePatch;
use crate::{Error, Result, Tolerances};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LiftKind {
    /// Hypersurface: one slope per point, the complex tangent line.
    Section,
    /// Surface: the critical circle over each point.
    CircleBundle,
    /// Curve or point: the whole fiber.
    FullFiber,
    /// A patch given directly in contact coordinates.
    Raw,
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftSample {
    pub param: Vec<f64>,
    /// Intrinsic circle angle (circle bundles) or fiber index angle.
    pub fiber_angle: Option<f64>,
    pub element: ContactElement,
    pub frame: TangentFrame,
    pub defect: f64,
    /// The base tangent plane is a complex line; the sample is its point fiber.
    pub complex_tangent: bool,
}

/// A base sample that could not be lifted, with the reason.
#[derive(Debug, Clone, Serialize)]
pub struct Exclusion {
    pub param: Vec<f64>,
    pub reason: String,
    #[serde(skip)]
    pub error: Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftedPatch {
    pub source_name: String,
    pub dim: usize,
    pub kind: LiftKind,
    pub samples: Vec<LiftSample>,
    pub excluded: Vec<Exclusion>,
}

impl LiftedPatch {
    pub fn max_defect(&self) -> f64 {
        self.samples.iter().map(|s| s.defect).fold(0.0, f64::max)
    }
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Slope of the unique complex line inside the real hyperplane with normal
/// `n`: the line `conj(n_x) δx + conj(n_y) δy = 0`.
pub fn hypersurface_slope(n: &R4) -> Result<Slope> {
    let z = linalg::to_c2(n);
    Slope::new(z[1].conj(), -z[0].conj())
}

fn det3<T: Scalar>(a: [T; 3], b: [T; 3], c: [T; 3]) -> T {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Normal of the span of three vectors of ℝ⁴ (generalized cross product).
pub(crate) fn cross3<T: Scalar>(c: &[[T; 4]; 3]) -> [T; 4] {
    let minor = |skip: usize| -> T {
        let rows: Vec<usize> = (0..4).filter(|&r| r != skip).collect();
        let col = |k: usize| [c[k][rows[0]], c[k][rows[1]], c[k][rows[2]]];
        det3(col(0), col(1), col(2))
    };
    [minor(0), -minor(1), minor(2), -minor(3)]
}

fn jet_columns<const K: usize, const N: usize>(s: &SurfacePatch, p: [f64; K]) -> Result<(R4, [[Jet1<N>; 4]; K])> {
    let j = s.jet2::<K>(p)?;
    let mut cols = [[Jet1::<N>::constant(0.0); 4]; K];
    for i in 0..K {
        for r in 0..4 {
            let mut g = [0.0; N];
            for (k, gk) in g.iter_mut().enumerate().take(K) {
                *gk = j.hess[i][k][r];
            }
            cols[i][r] = Jet1::new(j.jac[i][r], g);
        }
    }
    Ok((j.value, cols))
}

fn c_of<const N: usize>(z: &Cx<Jet1<N>>) -> Complex64 {
    cx(z.re.v, z.im.v)
}

fn c_grad<const N: usize>(z: &Cx<Jet1<N>>, i: usize) -> Complex64 {
    cx(z.re.g[i], z.im.g[i])
}

fn chart_vector(chart: Chart, dz: [Complex64; 2], dc: Complex64) -> C3 {
    match chart {
        Chart::Slope => [dz[0], dz[1], dc],
        Chart::CoSlope => [dz[1], dz[0], dc],
    }
}

/// Divides `num/den` choosing the chart where the quotient is at most one
/// in modulus; returns the chart and the fiber coordinate as a jet.
fn fiber_coordinate<const N: usize>(x: Cx<Jet1<N>>, y: Cx<Jet1<N>>) -> Result<(Chart, Cx<Jet1<N>>)> {
    // the slope is y/x
    if y.norm_sqr().v <= x.norm_sqr().v {
        Ok((Chart::Slope, y.checked_div(x)?))
    } else {
        Ok((Chart::CoSlope, x.checked_div(y)?))
    }
}

fn base_dz(col: &R4) -> [Complex64; 2] {
    linalg::to_c2(col)
}

pub(crate) fn section_sample(s: &SurfacePatch, p: [f64; 3]) -> Result<LiftSample> {
    s.immersed_jacobian(&p)?;
    let (value, cols) = jet_columns::<3, 3>(s, p)?;
    let n = cross3(&cols);
    // complex line conj(n_x) δx + conj(n_y) δy = 0 has direction (conj n_y, -conj n_x)
    let u = Cx::new(n[2], -n[3]);
    let v = -Cx::new(n[0], -n[1]);
    let (chart, c) = fiber_coordinate(u, v)?;
    let slope = Slope::new(cx(u.re.v, u.im.v), cx(v.re.v, v.im.v))?;
    let z = linalg::to_c2(&value);
    let element = ContactElement::new(z, slope);
    let vecs = (0..3)
        .map(|i| {
            let col = cols[i].map(|x| x.v);
            chart_vector(chart, base_dz(&col), c_grad(&c, i))
        })
        .collect();
    debug_assert!({
        let w = element.coords(chart).unwrap()[2];
        (w - c_of(&c)).norm() < 1e-9 * (1.0 + w.norm())
    });
    let frame = TangentFrame { chart, vecs };
    let defect = semi_legendrian_defect(&element, &frame)?;
    Ok(LiftSample { param: p.to_vec(), fiber_angle: None, element, frame, defect, complex_tangent: false })
}

/// Tangent 3-frame of the critical-circle bundle at `(p, l)`: the kernel of
/// the gradient of `det[u_s, u_t, w(c), Jw(c)]` in `(s, t, Re c, Im c)`.
pub(crate) fn circle_frame(s: &SurfacePatch, p: [f64; 2], l: &Slope) -> Result<TangentFrame> {
    let (_, cols2) = jet_columns::<2, 4>(s, p)?;
    let chart = ContactElement::new([cx(0.0, 0.0); 2], *l).chart();
    let c = ContactElement::new([cx(0.0, 0.0); 2], *l).coords(chart).expect("chart picked to be valid")[2];
    let c1 = Jet1::<4>::var(c.re, 2);
    let c2 = Jet1::<4>::var(c.im, 3);
    let one = Jet1::<4>::constant(1.0);
    let zero = Jet1::<4>::constant(0.0);
    let (w, jw) = match chart {
        Chart::Slope => ([one, zero, c1, c2], [zero, one, -c2, c1]),
        Chart::CoSlope => ([c1, c2, one, zero], [-c2, c1, zero, one]),
    };
    let f = crate::surfaces::det4_rows(&[cols2[0], cols2[1], w, jw]);
    let gn = f.g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = linalg::norm(&cols2[0].map(|x| x.v)) * linalg::norm(&cols2[1].map(|x| x.v));
    if !(gn > 1e-10 * scale.max(1e-300)) {
        return Err(Error::ImmersionFailure { at: p.to_vec(), sigma: gn });
    }
    let us = cols2[0].map(|x| x.v);
    let ut = cols2[1].map(|x| x.v);
    let vecs = linalg::complement(&[f.g])
        .into_iter()
        .map(|k| {
            let d = linalg::axpy(&linalg::scale(&us, k[0]), k[1], &ut);
            chart_vector(chart, base_dz(&d), cx(k[2], k[3]))
        })
        .collect();
    Ok(TangentFrame { chart, vecs })
}

/// Point fiber over a complex tangent: the tangent line's slope, with the
/// 2-frame of the curve `p ↦ (u(p), slope of du(p))`.
fn tangent_line_sample(s: &SurfacePatch, p: [f64; 2]) -> Result<LiftSample> {
    let (value, cols) = jet_columns::<2, 2>(s, p)?;
    let k = if linalg::norm(&cols[0].map(|x| x.v)) >= linalg::norm(&cols[1].map(|x| x.v)) { 0 } else { 1 };
    let x = Cx::new(cols[k][0], cols[k][1]);
    let y = Cx::new(cols[k][2], cols[k][3]);
    let (chart, c) = fiber_coordinate(x, y)?;
    let slope = Slope::new(c_of(&x), c_of(&y))?;
    let element = ContactElement::new(linalg::to_c2(&value), slope);
    let vecs = (0..2)
        .map(|i| chart_vector(chart, base_dz(&cols[i].map(|x| x.v)), c_grad(&c, i)))
        .collect();
    let frame = TangentFrame { chart, vecs };
    let defect = semi_legendrian_defect(&element, &frame)?;
    Ok(LiftSample { param: p.to_vec(), fiber_angle: None, element, frame, defect, complex_tangent: true })
}

enum BaseOutcome {
    Samples(Vec<LiftSample>),
    Excluded(Exclusion, Vec<LiftSample>),
}

fn excluded(p: &[f64], e: Error, keep: Vec<LiftSample>) -> BaseOutcome {
    BaseOutcome::Excluded(Exclusion { param: p.to_vec(), reason: e.to_string(), error: e }, keep)
}

fn circle_samples(s: &SurfacePatch, p: [f64; 2], fiber: usize, tol: &Tolerances) -> BaseOutcome {
    let plane = match s.immersed_jacobian(&p).and_then(|(_, c)| RealPlane2::from_frame(c[0], c[1])) {
        Ok(pl) => pl,
        Err(e) => return excluded(&p, e, Vec::new()),
    };
    if plane.is_complex(tol) {
        let t = plane.wirtinger_angle();
        let e = Error::ComplexTangent { angle: t.min(std::f64::consts::PI - t) };
        let keep = tangent_line_sample(s, p).into_iter().collect();
        return excluded(&p, e, keep);
    }
    let z = linalg::to_c2(&s.point(&p).expect("immersed point evaluates"));
    let circle = plane.critical_circle();
    let mut out = Vec::with_capacity(fiber);
    for k in 0..fiber {
        let phi = std::f64::consts::TAU * k as f64 / fiber as f64;
        let Some(l) = circle.point_at(phi) else {
            return excluded(&p, Error::DegenerateLocus, Vec::new());
        };
        let element = ContactElement::new(z, l);
        let r = circle_frame(s, p, &l).and_then(|frame| {
            let defect = semi_legendrian_defect(&element, &frame)?;
            Ok(LiftSample { param: p.to_vec(), fiber_angle: Some(phi), element, frame, defect, complex_tangent: false })
        });
        match r {
            Ok(smp) => out.push(smp),
            Err(e) => return excluded(&p, e, Vec::new()),
        }
    }
    BaseOutcome::Samples(out)
}

/// Slope at sphere angles `(θ, φ)`: `(cos θ/2, sin θ/2 e^{iφ})`.
fn sphere_slope(theta: f64, phi: f64) -> Slope {
    Slope::new(cx((theta / 2.0).cos(), 0.0), Complex64::from_polar((theta / 2.0).sin(), phi)).expect("unit pair")
}

/// `n` slopes spread evenly over ℙ¹ (golden-angle spiral on the sphere).
pub(crate) fn fiber_slopes(n: usize) -> Vec<(f64, Slope)> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let zc = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let phi = golden * k as f64;
            (phi, sphere_slope(zc.acos(), phi))
        })
        .collect()
}

fn full_fiber_samples(s: &SurfacePatch, p: &[f64], fiber: usize) -> BaseOutcome {
    let (v, cols) = match s.immersed_jacobian(p) {
        Ok(x) => x,
        Err(e) => return excluded(p, e, Vec::new()),
    };
    let z = linalg::to_c2(&v);
    let mut out = Vec::with_capacity(fiber);
    for (phi, l) in fiber_slopes(fiber) {
        let element = ContactElement::new(z, l);
        let chart = element.chart();
        let mut vecs: Vec<C3> = cols.iter().map(|c| chart_vector(chart, base_dz(c), cx(0.0, 0.0))).collect();
        vecs.push([cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]);
        vecs.push([cx(0.0, 0.0), cx(0.0, 0.0), cx(0.0, 1.0)]);
        let frame = TangentFrame { chart, vecs };
        match semi_legendrian_defect(&element, &frame) {
            Ok(defect) => out.push(LiftSample {
                param: p.to_vec(),
                fiber_angle: Some(phi),
                element,
                frame,
                defect,
                complex_tangent: false,
            }),
            Err(e) => return excluded(p, e, Vec::new()),
        }
    }
    BaseOutcome::Samples(out)
}

/// The canonical semi-legendrian lift `p*N` sampled over an `n^k` base grid:
/// a section for hypersurfaces, `fiber` points of each critical circle for
/// surfaces, `fiber` slopes of the whole fiber for curves and points.
/// Base samples that cannot be lifted are listed in `excluded`; complex
/// tangent points of a surface are excluded from the circle bundle but keep
/// their point fiber (the tangent line) as a sample.
pub fn lift(s: &SurfacePatch, grid: usize, fiber: usize, tol: &Tolerances) -> Result<LiftedPatch> {
    let k = s.dim();
    let kind = match k {
        3 => LiftKind::Section,
        2 => LiftKind::CircleBundle,
        _ => LiftKind::FullFiber,
    };
    if fiber == 0 && k < 3 {
        return Err(Error::InvalidInput("fiber sample count must be positive".into()));
    }
    let base = if k == 0 { vec![Vec::new()] } else { s.grid(grid) };
    let outcomes: Vec<BaseOutcome> = base
        .par_iter()
        .map(|p| match k {
            3 => match section_sample(s, [p[0], p[1], p[2]]) {
                Ok(smp) => BaseOutcome::Samples(vec![smp]),
                Err(e) => excluded(p, e, Vec::new()),
            },
            2 => circle_samples(s, [p[0], p[1]], fiber, tol),
            _ => full_fiber_samples(s, p, fiber),
        })
        .collect();
    let mut samples = Vec::new();
    let mut excl = Vec::new();
    for o in outcomes {
        match o {
            BaseOutcome::Samples(v) => samples.extend(v),
            BaseOutcome::Excluded(e, keep) => {
                excl.push(e);
                samples.extend(keep);
            }
        }
    }
    Ok(LiftedPatch { source_name: s.name().to_string(), dim: k, kind, samples, excluded: excl })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::Catalog;

    #[test]
    fn levi_flat_hyperplane_has_zero_section() {
        let h = SurfacePatch::parse("h", "params: a b c\nx1 = a\nx2 = b\ny1 = c").unwrap();
        let m = lift(&h, 3, 0, &Tolerances::default()).unwrap();
        assert_eq!(m.kind, LiftKind::Section);
        assert_eq!(m.samples.len(), 27);
        for smp in &m.samples {
            assert!(smp.element.slope.eq_proj(&Slope::real(0.0), 1e-15));
            assert!(smp.defect < 1e-15);
        }
    }

    #[test]
    fn sphere_section_is_semi_legendrian() {
        let s3 = SurfacePatch::parse(
            "s3",
            "params: a b c\ndomain: [0.2, 1.3] x [0, 6.283185307179586] x [0, 6.283185307179586]\nx = cos(a)*exp(i*b)\ny = sin(a)*exp(i*c)",
        )
        .unwrap();
        let m = lift(&s3, 4, 0, &Tolerances::default()).unwrap();
        assert!(m.excluded.is_empty());
        assert!(m.max_defect() < 1e-12, "{}", m.max_defect());
        // the complex tangent of S³ at z is orthogonal to z: slope -conj(x)/conj(y)
        for smp in &m.samples {
            let z = smp.element.z;
            let (u, v) = smp.element.slope.homogeneous();
            assert!((z[0].conj() * u + z[1].conj() * v).norm() < 1e-12);
        }
    }

    #[test]
    fn real_plane_fibers_are_the_real_circle() {
        let m = lift(&SurfacePatch::from_catalog(Catalog::R2), 4, 16, &Tolerances::default()).unwrap();
        assert_eq!(m.samples.len(), 16 * 16);
        for smp in &m.samples {
            let (u, v) = smp.element.slope.homogeneous();
            assert!((u * v.conj()).im.abs() < 1e-12);
            assert!(smp.defect < 1e-12);
        }
    }

    #[test]
    fn torus_lift_is_semi_legendrian() {
        let m = lift(&SurfacePatch::from_catalog(Catalog::CliffordTorus), 5, 32, &Tolerances::default()).unwrap();
        assert!(m.excluded.is_empty());
        assert!(m.max_defect() < 1e-9, "{}", m.max_defect());
    }

    #[test]
    fn complex_curves_keep_tangent_lines() {
        for c in [Catalog::ComplexLine, Catalog::ComplexConic] {
            let m = lift(&SurfacePatch::from_catalog(c), 4, 8, &Tolerances::default()).unwrap();
            assert_eq!(m.excluded.len(), 16);
            assert_eq!(m.samples.len(), 16);
            assert!(m.samples.iter().all(|s| s.complex_tangent && s.defect < 1e-12), "{}", m.max_defect());
        }
    }

    #[test]
    fn curve_lift_is_full_fiber() {
        let c = SurfacePatch::parse("c", "params: s\nx = s\ny = i*s^2").unwrap();
        let m = lift(&c, 3, 10, &Tolerances::default()).unwrap();
        assert_eq!(m.kind, LiftKind::FullFiber);
        assert_eq!(m.samples.len(), 30);
        assert!(m.max_defect() < 1e-14);
        let pt = SurfacePatch::parse("p", "params:\nx = 1\ny = 2").unwrap();
        let m = lift(&pt, 3, 10, &Tolerances::default()).unwrap();
        assert_eq!(m.samples.len(), 10);
        assert!(m.max_defect() < 1e-14);
    }
}
