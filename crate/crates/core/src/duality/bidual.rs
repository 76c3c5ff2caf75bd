use super::{dpi_frame, pi_project, DualPoint, PI_RANK};
use crate::contact::lift::circle_frame;
use crate::contact::{Chart, ContactElement};
use crate::jets::Jet1;
use crate::linalg::{self, R4};
use crate::planes::{RealPlane2, Slope};
use crate::surfaces::{exceptional_tests, SurfacePatch};
use crate::{Error, Result, Tolerances};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

/// Half-width of the parameter grid on which the round trip is measured.
const GRID_STEP: f64 = 2e-3;
const GRID_HALF: i32 = 2;
/// Points of a dual critical circle used on the surface route.
const CIRCLE_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BidualRoute {
    /// The dual germ is a smooth real hypersurface; its complex tangent
    /// lines give back points.
    Hypersurface,
    /// `dπ` has rank 2 on the whole neighbourhood: the dual is a surface and
    /// its own critical circles give back lines of points.
    Surface,
}

#[derive(Debug, Clone, Serialize)]
pub struct BidualReport {
    pub route: BidualRoute,
    pub dual_point: DualPoint,
    /// Largest distance of a returned point to the surface.
    pub distance: f64,
    /// Distance of the point returned at the base sample to the base point.
    pub base_error: f64,
    pub samples: usize,
    /// Smallest of the four exceptionality margins at the base pair.
    pub margin: f64,
    pub passed: bool,
}

/// Slope on the critical circle at `p` nearest to `l`, by minimum-norm
/// Newton steps on `det[u_s, u_t, w(c), Jw(c)]` in the fiber coordinate.
fn nearest_critical(s: &SurfacePatch, p: [f64; 2], l: &Slope) -> Result<Slope> {
    let (_, cols) = s.immersed_jacobian(&p)?;
    let w0 = ContactElement::new([Complex64::new(0.0, 0.0); 2], *l);
    let chart = w0.chart();
    let mut c = w0.coords(chart).expect("chart picked to be valid")[2];
    let us = cols[0].map(Jet1::<2>::constant);
    let ut = cols[1].map(Jet1::<2>::constant);
    let scale = linalg::norm(&cols[0]) * linalg::norm(&cols[1]);
    for _ in 0..50 {
        let c1 = Jet1::<2>::var(c.re, 0);
        let c2 = Jet1::<2>::var(c.im, 1);
        let one = Jet1::constant(1.0);
        let zero = Jet1::constant(0.0);
        let (w, jw) = match chart {
            Chart::Slope => ([one, zero, c1, c2], [zero, one, -c2, c1]),
            Chart::CoSlope => ([c1, c2, one, zero], [-c2, c1, zero, one]),
        };
        let f = crate::surfaces::det4_rows(&[us, ut, w, jw]);
        if f.v.abs() < 1e-15 * scale {
            break;
        }
        let g2 = f.g[0] * f.g[0] + f.g[1] * f.g[1];
        if !(g2 > 1e-24 * scale * scale) {
            return Err(Error::ComplexTangent { angle: 0.0 });
        }
        c -= Complex64::new(f.g[0], f.g[1]) * (f.v / g2);
    }
    Ok(match chart {
        Chart::Slope => Slope::chart(c),
        Chart::CoSlope => Slope::new(c, Complex64::new(1.0, 0.0))?,
    })
}

/// Dual chart coordinates `(c, ν)` of the element in `chart`.
fn dual_coords(w: &ContactElement, chart: Chart) -> Result<(Complex64, Complex64)> {
    let [a, b, c] = w.coords(chart).ok_or_else(|| Error::InvalidInput("element outside chart".into()))?;
    Ok((c, b - c * a))
}

/// Point `(a, b) = (a, ν + c a)` back in ℂ², in the chart's coordinate order.
fn back_to_point(chart: Chart, c: Complex64, nu: Complex64, a: Complex64) -> R4 {
    let b = nu + c * a;
    let z = match chart {
        Chart::Slope => [a, b],
        Chart::CoSlope => [b, a],
    };
    linalg::from_c2(&z)
}

fn left_singular(cols: &[R4]) -> (Vec<R4>, Vec<f64>) {
    let m = DMatrix::from_fn(4, cols.len(), |r, c| cols[c][r]);
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap());
    (
        idx.iter().map(|&k| [u[(0, k)], u[(1, k)], u[(2, k)], u[(3, k)]]).collect(),
        idx.iter().map(|&k| svd.singular_values[k]).collect(),
    )
}

struct DualGerm {
    q: [f64; 2],
    element: ContactElement,
    chart: Chart,
    dirs: Vec<R4>,
    rank: usize,
}

/// Rebuilds the surface from its dual: starting at the critical pair
/// `(p, l)`, the lift is followed over a small parameter grid, pushed to the
/// dual plane by `π`, lifted there with the dual contact structure and
/// projected back to ℂ². The reported distance is the largest distance of
/// the returned points to the surface.
pub fn bidual_roundtrip(s: &SurfacePatch, p: [f64; 2], l: &Slope, tol: &Tolerances) -> Result<BidualReport> {
    let report = exceptional_tests(s, p, l, tol)?;
    let margin = report.margins.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut germs = Vec::new();
    for i in -GRID_HALF..=GRID_HALF {
        for j in -GRID_HALF..=GRID_HALF {
            let q = [p[0] + GRID_STEP * i as f64, p[1] + GRID_STEP * j as f64];
            if !s.contains(&q) {
                continue;
            }
            let lq = if (i, j) == (0, 0) { *l } else { nearest_critical(s, q, l)? };
            let z = linalg::to_c2(&s.point(&q)?);
            let element = ContactElement::new(z, lq);
            let frame = circle_frame(s, q, &lq)?;
            let cols = dpi_frame(&element, &frame)?;
            let (dirs, vals) = left_singular(&cols);
            let rank = vals.iter().filter(|&&v| v > PI_RANK * vals[0].max(1e-300)).count();
            germs.push(DualGerm { q, element, chart: frame.chart, dirs, rank });
        }
    }
    let base = germs.iter().position(|g| g.q == p).expect("base point is on the grid");
    let route = if germs.iter().all(|g| g.rank == 2) {
        BidualRoute::Surface
    } else {
        if margin <= 10.0 * tol.exc {
            return Err(Error::ExceptionalPoint { margin });
        }
        if let Some(g) = germs.iter().find(|g| g.rank < 3) {
            return Err(Error::RankDrop { rank: g.rank });
        }
        BidualRoute::Hypersurface
    };
    let z0 = s.point(&p)?;
    let mut distance: f64 = 0.0;
    let mut base_error = f64::INFINITY;
    let mut count = 0;
    for (k, g) in germs.iter().enumerate() {
        let (c, nu) = dual_coords(&g.element, g.chart)?;
        let returned: Vec<R4> = match route {
            BidualRoute::Hypersurface => {
                // complex tangent of the dual hypersurface: conj(n_c) δc + conj(n_ν) δν = 0,
                // and on dual contact planes δν = −a δc
                let n = linalg::complement(&g.dirs[..3]);
                let nz = linalg::to_c2(&n[0]);
                if nz[1].norm() < 1e-12 {
                    return Err(Error::RankDrop { rank: 3 });
                }
                let a = nz[0].conj() / nz[1].conj();
                vec![back_to_point(g.chart, c, nu, a)]
            }
            BidualRoute::Surface => {
                let plane = RealPlane2::from_frame(g.dirs[0], g.dirs[1])?;
                plane
                    .critical_circle()
                    .sample(CIRCLE_POINTS)
                    .iter()
                    .filter_map(|sigma| sigma.value())
                    .map(|sigma| back_to_point(g.chart, c, nu, -sigma))
                    .collect()
            }
        };
        for z in returned {
            let (_, d) = s.closest_point(&z, &g.q)?;
            distance = distance.max(d);
            if k == base {
                base_error = base_error.min(linalg::norm(&linalg::sub(&z, &z0)));
            }
            count += 1;
        }
    }
    let passed = distance < tol.bidual && (route == BidualRoute::Surface || base_error < tol.bidual);
    Ok(BidualReport {
        route,
        dual_point: pi_project(&germs[base].element),
        distance,
        base_error,
        samples: count,
        margin,
        passed,
    })
}
