//! Counting transverse intersections of complex lines with compact surfaces,
//! censuses of the dual plane and wall-crossing probes.
//!
//! A line `ξ` meets the surface where `F(s, t) = ξ · Z(s, t)` vanishes, `Z`
//! being the homogeneous coordinates of the patch. Boxes of the parameter
//! domain are discarded when the interval extension of `F` misses zero in
//! its real or imaginary part; surviving leaf boxes seed a damped Newton
//! solve. Nothing depends on an affine chart, so points at infinity and the
//! double cover of ℙ²(ℝ) need no special care beyond deduplication in ℙ².

mod sample;

pub use sample::{census, CensusCase, CensusReport, LineRecord, Region, CENSUS_SCHEMA};

use crate::contact::lift::circle_frame;
use crate::contact::{Chart, ContactElement};
use crate::duality::{dpi_frame, DualPoint, PI_RANK};
use crate::jets::{Cx, Interval, Jet1};
use crate::linalg::{self, R4};
use crate::planes::Slope;
use crate::surfaces::{exceptional_tests, SurfacePatch};
use crate::{Error, Result, Tolerances};
use num_complex::Complex64;
use serde::Serialize;

/// Roots closer than this in ℙ² are the same point.
pub const ROOT_DEDUP: f64 = 1e-6;
/// Normalized residual accepted as a root.
const ROOT_RESIDUAL: f64 = 1e-12;
/// Roots of an open patch this close to the boundary (relative to the box
/// width) make the count unstable.
const BOUNDARY_BAND: f64 = 1e-2;

/// Resolution controls of the root search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Resolution {
    /// Bisections per parameter axis before Newton takes over.
    pub depth: u32,
    pub newton_iters: usize,
    /// Largest number of boxes examined.
    pub budget: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution { depth: 8, newton_iters: 60, budget: 400_000 }
    }
}

impl Resolution {
    pub const DEPTH_RANGE: (u32, u32) = (4, 14);
    pub const MAX_BUDGET: usize = 50_000_000;

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = Self::DEPTH_RANGE;
        if self.depth < lo || self.depth > hi {
            return Err(Error::InvalidInput(format!("subdivision depth {} outside [{lo}, {hi}]", self.depth)));
        }
        if self.newton_iters == 0 || self.newton_iters > 1000 {
            return Err(Error::InvalidInput(format!("{} Newton iterations", self.newton_iters)));
        }
        if self.budget == 0 || self.budget > Self::MAX_BUDGET {
            return Err(Error::InvalidInput(format!("box budget {} outside [1, {}]", self.budget, Self::MAX_BUDGET)));
        }
        Ok(())
    }
}

/// A line and the surface it is intersected with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineQuery {
    pub line: DualPoint,
    pub surface: String,
    pub resolution: Resolution,
}

impl LineQuery {
    pub fn new(s: &SurfacePatch, line: DualPoint) -> LineQuery {
        LineQuery { line, surface: s.name().to_string(), resolution: Resolution::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Root {
    pub param: [f64; 2],
    /// Unit homogeneous coordinates of the intersection point.
    pub point: [Complex64; 3],
    /// Transversality margin: `|det dF|` on Fubini–Study unit tangents, 0
    /// when the line is tangent to the surface.
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntersectionCount {
    pub count: usize,
    pub roots: Vec<Root>,
    pub boxes: usize,
}

struct Eval {
    f: Complex64,
    /// `∂F/∂s`, `∂F/∂t`.
    df: [Complex64; 2],
    z: [Complex64; 3],
    dz: [[Complex64; 3]; 2],
}

impl Eval {
    fn znorm(&self) -> f64 {
        self.z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    fn residual(&self) -> f64 {
        self.f.norm() / self.znorm()
    }
}

fn evaluate(s: &SurfacePatch, xi: &[Complex64; 3], p: [f64; 2]) -> Result<Eval> {
    let vars = [Jet1::<2>::var(p[0], 0), Jet1::<2>::var(p[1], 1)];
    let zj = s.eval_homogeneous(&vars)?;
    let z = zj.map(|c| Complex64::new(c.re.v, c.im.v));
    let dz = [0, 1].map(|i| zj.map(|c| Complex64::new(c.re.g[i], c.im.g[i])));
    let f = (0..3).map(|k| xi[k] * z[k]).sum();
    let df = [0, 1].map(|i| (0..3).map(|k| xi[k] * dz[i][k]).sum());
    Ok(Eval { f, df, z, dz })
}

/// Tangent vectors projected orthogonally to `Z` and divided by `|Z|`,
/// pushed through the unit functional `ξ`.
fn transversality(xi: &[Complex64; 3], e: &Eval) -> f64 {
    let n = e.znorm();
    let zh = e.z.map(|c| c / n);
    let mut a = [Complex64::new(0.0, 0.0); 2];
    let mut len = [0.0; 2];
    for i in 0..2 {
        let ip: Complex64 = (0..3).map(|k| zh[k].conj() * e.dz[i][k]).sum();
        let t: Vec<Complex64> = (0..3).map(|k| (e.dz[i][k] - ip * zh[k]) / n).collect();
        len[i] = t.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        a[i] = (0..3).map(|k| xi[k] * t[k]).sum();
    }
    if !(len[0] * len[1] > 0.0) {
        return 0.0;
    }
    (a[0].conj() * a[1]).im.abs() / (len[0] * len[1])
}

/// True if the interval extension of `F` over the box misses zero.
fn excluded(s: &SurfacePatch, xi: &[Complex64; 3], b: &[Interval; 2]) -> bool {
    let z = match s.eval_homogeneous(b) {
        Ok(z) => z,
        Err(_) => return false,
    };
    let mut f = Cx::<Interval>::cst(0.0, 0.0);
    for k in 0..3 {
        f = f + Cx::<Interval>::cst(xi[k].re, xi[k].im) * z[k];
    }
    !f.re.contains(0.0) || !f.im.contains(0.0)
}

enum Polish {
    Root([f64; 2], Eval),
    /// Descent stalled at a positive residual.
    Stalled(f64),
}

/// Levenberg–Marquardt on `|F|²`; undamped it is Newton's method.
fn polish(s: &SurfacePatch, xi: &[Complex64; 3], start: [f64; 2], iters: usize) -> Result<Polish> {
    let mut p = start;
    let mut e = evaluate(s, xi, p)?;
    let mut nu = 1e-6;
    for _ in 0..iters {
        if e.residual() < ROOT_RESIDUAL {
            return Ok(Polish::Root(p, e));
        }
        let j = [[e.df[0].re, e.df[1].re], [e.df[0].im, e.df[1].im]];
        let r = [e.f.re, e.f.im];
        let a = [
            [j[0][0] * j[0][0] + j[1][0] * j[1][0], j[0][0] * j[0][1] + j[1][0] * j[1][1]],
            [j[0][0] * j[0][1] + j[1][0] * j[1][1], j[0][1] * j[0][1] + j[1][1] * j[1][1]],
        ];
        let g = [j[0][0] * r[0] + j[1][0] * r[1], j[0][1] * r[0] + j[1][1] * r[1]];
        let scale = a[0][0] + a[1][1];
        if !(scale > 0.0) || !scale.is_finite() {
            break;
        }
        let mut stepped = false;
        while nu < 1e12 {
            let m = [[a[0][0] + nu * scale, a[0][1]], [a[1][0], a[1][1] + nu * scale]];
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            let d = [-(m[1][1] * g[0] - m[0][1] * g[1]) / det, -(m[0][0] * g[1] - m[1][0] * g[0]) / det];
            let q = [p[0] + d[0], p[1] + d[1]];
            if let Ok(eq) = evaluate(s, xi, q) {
                if eq.residual() < e.residual() {
                    let tiny = d[0].abs().max(d[1].abs()) < 1e-16 * (1.0 + p[0].abs().max(p[1].abs()));
                    p = q;
                    e = eq;
                    nu = (nu / 10.0).max(1e-15);
                    stepped = !tiny;
                    break;
                }
            }
            nu *= 10.0;
        }
        if !stepped {
            break;
        }
    }
    if e.residual() < ROOT_RESIDUAL {
        Ok(Polish::Root(p, e))
    } else {
        Ok(Polish::Stalled(e.residual()))
    }
}

#[derive(Clone, Copy)]
struct Cell {
    lo: [f64; 2],
    hi: [f64; 2],
    level: [u32; 2],
}

/// Counts the transverse intersection points of the line with the patch.
///
/// Fails with `WallProximity` when a root has a transversality margin
/// below `tol.wall`, when the descent stalls at a normalized residual below
/// `tol.wall` (the line nearly touches the surface) or, on open patches,
/// when a root sits at the boundary of the parameter box.
pub fn count_intersections(s: &SurfacePatch, q: &LineQuery, tol: &Tolerances) -> Result<IntersectionCount> {
    let res = q.resolution;
    res.validate()?;
    if q.surface != s.name() {
        return Err(Error::InvalidInput(format!("query is for `{}`, not `{}`", q.surface, s.name())));
    }
    if s.dim() != 2 {
        return Err(Error::InvalidInput(format!("need a 2-patch, `{}` has {} parameters", s.name(), s.dim())));
    }
    let xi = q.line.xi;
    let dom = s.domain();
    let mut stack = vec![Cell { lo: [dom[0].0, dom[1].0], hi: [dom[0].1, dom[1].1], level: [0, 0] }];
    let mut boxes = 0;
    let mut leaves = Vec::new();
    while let Some(c) = stack.pop() {
        boxes += 1;
        if boxes > res.budget {
            return Err(Error::BudgetExceeded(res.budget));
        }
        let b = [Interval::new(c.lo[0], c.hi[0]), Interval::new(c.lo[1], c.hi[1])];
        if excluded(s, &xi, &b) {
            continue;
        }
        if c.level[0] >= res.depth && c.level[1] >= res.depth {
            leaves.push(c);
            continue;
        }
        let ax = if c.level[0] <= c.level[1] { 0 } else { 1 };
        let mid = 0.5 * (c.lo[ax] + c.hi[ax]);
        let (mut a, mut b) = (c, c);
        a.hi[ax] = mid;
        b.lo[ax] = mid;
        a.level[ax] += 1;
        b.level[ax] += 1;
        stack.push(b);
        stack.push(a);
    }
    // leaves in a fixed order so that the reported roots are reproducible
    leaves.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
    let mut roots: Vec<Root> = Vec::new();
    for c in &leaves {
        // centre and quarter points, so that two close roots in one leaf are
        // both reached
        let (mx, my) = (0.5 * (c.lo[0] + c.hi[0]), 0.5 * (c.lo[1] + c.hi[1]));
        let (qx, qy) = (0.25 * (c.hi[0] - c.lo[0]), 0.25 * (c.hi[1] - c.lo[1]));
        for start in [[mx, my], [mx - qx, my - qy], [mx + qx, my - qy], [mx - qx, my + qy], [mx + qx, my + qy]] {
            match polish(s, &xi, start, res.newton_iters)? {
                Polish::Stalled(r) => {
                    if r < tol.wall {
                        return Err(Error::WallProximity { distance: r });
                    }
                }
                Polish::Root(p, e) => {
                    let p = s.wrap(&p);
                    let p = [p[0], p[1]];
                    if !s.is_compact() {
                        let band = (0..2)
                            .filter(|&i| !s.periodic()[i])
                            .map(|i| {
                                let (a, b) = dom[i];
                                (p[i] - a).min(b - p[i]) / (b - a)
                            })
                            .fold(f64::INFINITY, f64::min);
                        if band < -BOUNDARY_BAND {
                            continue;
                        }
                        if band < BOUNDARY_BAND {
                            return Err(Error::WallProximity { distance: band.max(0.0) });
                        }
                    }
                    let n = e.znorm();
                    let point = e.z.map(|c| c / n);
                    if roots.iter().any(|r| linalg::chordal3(&r.point, &point) < ROOT_DEDUP) {
                        continue;
                    }
                    let margin = transversality(&xi, &e);
                    if margin < tol.wall {
                        return Err(Error::WallProximity { distance: margin });
                    }
                    roots.push(Root { param: p, point, margin });
                }
            }
        }
    }
    Ok(IntersectionCount { count: roots.len(), roots, boxes })
}

/// Outcome of counting on both sides of the dual hypersurface.
#[derive(Debug, Clone, Serialize)]
pub struct WallProbe {
    pub wall: DualPoint,
    /// Chart of the dual coordinates `(c, ν)` the normal is expressed in.
    pub chart: Chart,
    /// Unit normal of the dual hypersurface, `(Re c, Im c, Re ν, Im ν)`.
    pub normal: R4,
    pub h: f64,
    pub minus: DualPoint,
    pub plus: DualPoint,
    pub n_minus: usize,
    pub n_plus: usize,
    /// Smallest of the four exceptionality margins at the wall sample.
    pub margin: f64,
    /// `|n_plus − n_minus| = 2`.
    pub jump_ok: bool,
}

/// The line with dual chart coordinates `(c, ν)`: `y = cx + ν` in the slope
/// chart, `x = cy + ν` in the co-slope chart.
pub fn line_from_dual_chart(chart: Chart, c: Complex64, nu: Complex64) -> DualPoint {
    match chart {
        Chart::Slope => DualPoint::from_chart(c, nu),
        Chart::CoSlope => DualPoint::new([-nu, Complex64::new(1.0, 0.0), -c]).expect("nonzero"),
    }
}

/// Counts intersections at the two lines `π(p, l) ± h·n`, `n` the unit
/// normal of the dual hypersurface at the image of the critical pair.
pub fn wall_crossing_probe(
    s: &SurfacePatch,
    p: [f64; 2],
    l: &Slope,
    h: f64,
    res: &Resolution,
    tol: &Tolerances,
) -> Result<WallProbe> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("probe offset {h}")));
    }
    let report = exceptional_tests(s, p, l, tol)?;
    let margin = report.margins.iter().cloned().fold(f64::INFINITY, f64::min);
    if margin <= 10.0 * tol.exc {
        return Err(Error::ExceptionalPoint { margin });
    }
    let z = linalg::to_c2(&s.point(&p)?);
    let element = ContactElement::new(z, *l);
    let frame = circle_frame(s, p, l)?;
    let cols = dpi_frame(&element, &frame)?;
    let mut data = Vec::with_capacity(4 * cols.len());
    for r in 0..4 {
        for c in &cols {
            data.push(c[r]);
        }
    }
    let rank = linalg::rank(4, cols.len(), &data, PI_RANK);
    if rank < 3 {
        return Err(Error::RankDrop { rank });
    }
    let normal = linalg::complement(&cols)[0];
    let chart = frame.chart;
    let [a, b, c] = element.coords(chart).expect("frame chart holds the element");
    let nu = b - c * a;
    let side = |sign: f64| {
        let d = linalg::to_c2(&linalg::scale(&normal, sign * h));
        line_from_dual_chart(chart, c + d[0], nu + d[1])
    };
    let (minus, plus) = (side(-1.0), side(1.0));
    let n_minus = count_intersections(s, &LineQuery { line: minus, surface: s.name().into(), resolution: *res }, tol)?.count;
    let n_plus = count_intersections(s, &LineQuery { line: plus, surface: s.name().into(), resolution: *res }, tol)?.count;
    Ok(WallProbe {
        wall: crate::duality::pi_project(&element),
        chart,
        normal,
        h,
        minus,
        plus,
        n_minus,
        n_plus,
        margin,
        jump_ok: n_minus.abs_diff(n_plus) == 2,
    })
}

/// Number of points of `|x| = 1, |λx + μ| = 1`: the circle of radius `|λ|`
/// about `μ` against the unit circle. `None` on tangency or coincidence.
pub fn torus_oracle(l: Complex64, mu: Complex64) -> Option<usize> {
    let (r, d) = (l.norm(), mu.norm());
    let gap = (d - (r - 1.0).abs()).min(r + 1.0 - d);
    if gap.abs() < 1e-12 {
        None
    } else if gap > 0.0 {
        Some(2)
    } else {
        Some(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::Catalog;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn count(s: &SurfacePatch, l: Complex64, mu: Complex64) -> Result<usize> {
        count_intersections(s, &LineQuery::new(s, DualPoint::from_chart(l, mu)), &Tolerances::default()).map(|r| r.count)
    }

    #[test]
    fn torus_examples() {
        let t = SurfacePatch::from_catalog(Catalog::CliffordTorus);
        assert_eq!(count(&t, c(1.0, 0.0), c(3.0, 0.0)).unwrap(), 0);
        assert_eq!(count(&t, c(1.0, 0.0), c(1.0, 0.0)).unwrap(), 2);
        assert_eq!(count(&t, c(0.3, 0.8), c(-0.2, 0.9)).unwrap(), torus_oracle(c(0.3, 0.8), c(-0.2, 0.9)).unwrap());
        // y = x meets the torus along a whole circle
        let r = count(&t, c(1.0, 0.0), c(0.0, 0.0));
        assert!(matches!(r, Err(Error::WallProximity { .. })), "{r:?}");
    }

    #[test]
    fn torus_roots_lie_on_the_line() {
        let t = SurfacePatch::from_catalog(Catalog::CliffordTorus);
        let line = DualPoint::from_chart(c(0.7, -0.4), c(0.5, 0.6));
        let r = count_intersections(&t, &LineQuery::new(&t, line), &Tolerances::default()).unwrap();
        assert_eq!(r.count, 2);
        for root in &r.roots {
            let f: Complex64 = (0..3).map(|k| line.xi[k] * root.point[k]).sum();
            assert!(f.norm() < 1e-12);
            assert!(root.margin > 1e-3);
        }
    }

    #[test]
    fn real_projective_plane_counts_one() {
        let s = SurfacePatch::from_catalog(Catalog::P2rChart);
        for (l, mu) in [(c(0.3, 1.2), c(-0.5, 0.2)), (c(-2.0, 0.1), c(1.0, -3.0)), (c(0.0, -0.7), c(0.4, 0.4))] {
            assert_eq!(count(&s, l, mu).unwrap(), 1, "{l} {mu}");
        }
        // a real line meets ℙ²(ℝ) along a circle
        assert!(matches!(count(&s, c(0.5, 0.0), c(1.0, 0.0)), Err(Error::WallProximity { .. })));
    }

    #[test]
    fn conic_counts_two() {
        let s = SurfacePatch::from_catalog(Catalog::ComplexConic);
        for (l, mu) in [(c(0.3, 1.2), c(-0.5, 0.2)), (c(4.0, 0.0), c(1.0, 0.0)), (c(0.0, 0.0), c(0.0, 2.0))] {
            assert_eq!(count(&s, l, mu).unwrap(), 2, "{l} {mu}");
        }
        // tangent to y = x² at x = 1
        assert!(matches!(count(&s, c(2.0, 0.0), c(-1.0, 0.0)), Err(Error::WallProximity { .. })));
    }

    #[test]
    fn vertical_line_needs_no_chart() {
        let t = SurfacePatch::from_catalog(Catalog::CliffordTorus);
        // x = 1 meets the torus in the circle {1} × C2: on the wall
        let q = LineQuery::new(&t, DualPoint::new([c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap());
        assert!(matches!(count_intersections(&t, &q, &Tolerances::default()), Err(Error::WallProximity { .. })));
        // x = 2 misses it
        let q = LineQuery::new(&t, DualPoint::new([c(-2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap());
        assert_eq!(count_intersections(&t, &q, &Tolerances::default()).unwrap().count, 0);
    }

    #[test]
    fn budget_is_enforced() {
        let t = SurfacePatch::from_catalog(Catalog::CliffordTorus);
        let mut q = LineQuery::new(&t, DualPoint::from_chart(c(1.0, 0.0), c(1.0, 0.0)));
        q.resolution.budget = 10;
        assert_eq!(count_intersections(&t, &q, &Tolerances::default()).unwrap_err(), Error::BudgetExceeded(10));
        q.resolution.depth = 30;
        assert!(matches!(count_intersections(&t, &q, &Tolerances::default()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn torus_wall_probe() {
        let t = SurfacePatch::from_catalog(Catalog::CliffordTorus);
        let (s0, t0, r) = (0.4, 1.3, 0.5);
        let l = Slope::chart(Complex64::from_polar(r, t0 - s0));
        let w = wall_crossing_probe(&t, [s0, t0], &l, 0.02, &Resolution::default(), &Tolerances::default()).unwrap();
        let mut got = [w.n_minus, w.n_plus];
        got.sort();
        assert_eq!(got, [0, 2], "{w:?}");
        assert!(w.jump_ok);
    }

    #[test]
    fn fold_of_the_paraboloid() {
        let s = SurfacePatch::resolve("graph:paraboloid.surf").unwrap();
        let w = wall_crossing_probe(&s, [0.0, 0.0], &Slope::real(0.0), 0.02, &Resolution::default(), &Tolerances::default()).unwrap();
        let mut got = [w.n_minus, w.n_plus];
        got.sort();
        assert_eq!(got, [0, 2], "{w:?}");
    }

    #[test]
    fn exceptional_wall_point_is_refused() {
        let s = SurfacePatch::resolve("graph:exceptional.surf").unwrap();
        let r = wall_crossing_probe(&s, [0.0, 0.0], &Slope::real(0.0), 0.02, &Resolution::default(), &Tolerances::default());
        assert!(matches!(r, Err(Error::ExceptionalPoint { .. })), "{r:?}");
    }
}
