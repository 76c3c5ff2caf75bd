use super::lift::{section_sample, LiftedPatch};
use super::{omega_singular_values, orthonormal_frame, Chart, ContactElement, TangentFrame, C3};
use crate::linalg::{self, R4};
use crate::planes::{RealPlane2, Slope};
use crate::surfaces::{condition_c_defect, SurfacePatch};
use crate::{Error, Result, Tolerances};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

/// Singular values of `dp` on a metric-orthonormal frame below this count
/// as zero.
const DP_RANK: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProjectionCheck {
    /// `dp` has rank 3: the slope must be that of the projected hyperplane.
    HyperplaneSlope,
    /// `dp` has rank 2: the slope must be critical for the projected plane.
    CriticalSlope,
    /// `dp` has rank ≤ 1: vertical patch, nothing to compare.
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolomorphicLegendrian {
    /// Largest singular value of the normalized contact form on the tangent plane.
    pub omega_residual: f64,
    /// Distance of `i·T` from `T` (zero for a complex line).
    pub complex_residual: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionReport {
    pub rank: usize,
    pub samples: usize,
    pub max_defect: f64,
    pub semi_legendrian: bool,
    pub check: ProjectionCheck,
    /// Worst slope distance (rank 3) or normalized E-value (rank 2).
    pub max_residual: f64,
    pub holds: bool,
    /// Worst holomorphic-legendrian test, for 2-dimensional patches.
    pub holomorphic_legendrian: Option<HolomorphicLegendrian>,
}

/// Base components `(δx, δy)` of a chart vector, as a real 4-vector.
fn dp(chart: Chart, v: &C3) -> R4 {
    let z = match chart {
        Chart::Slope => [v[0], v[1]],
        Chart::CoSlope => [v[1], v[0]],
    };
    linalg::from_c2(&z)
}

fn fiber_coord(w: &ContactElement, chart: Chart) -> Result<Complex64> {
    Ok(w.coords(chart).ok_or_else(|| Error::InvalidInput("element outside the frame's chart".into()))?[2])
}

/// Images under `dp` of a metric-orthonormal frame, with their left
/// singular vectors and values.
fn projected(w: &ContactElement, frame: &TangentFrame) -> Result<(Vec<R4>, Vec<f64>)> {
    let on = orthonormal_frame(fiber_coord(w, frame.chart)?, &frame.vecs)?;
    let cols: Vec<R4> = on.iter().map(|v| dp(frame.chart, v)).collect();
    let m = DMatrix::from_fn(4, cols.len().max(1), |r, c| cols.get(c).map_or(0.0, |v| v[r]));
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap());
    let dirs = idx.iter().map(|&k| [u[(0, k)], u[(1, k)], u[(2, k)], u[(3, k)]]).collect();
    let vals = idx.iter().map(|&k| svd.singular_values[k]).collect();
    Ok((dirs, vals))
}

/// Complex-linearity and contact-form annihilation of a 2-frame.
pub fn holomorphic_legendrian_test(w: &ContactElement, frame: &TangentFrame, tol: &Tolerances) -> Result<HolomorphicLegendrian> {
    if frame.vecs.len() != 2 {
        return Err(Error::InvalidInput(format!("need a 2-frame, got {} vectors", frame.vecs.len())));
    }
    let c = fiber_coord(w, frame.chart)?;
    let omega_residual = omega_singular_values(w, frame)?[0];
    let on = orthonormal_frame(c, &frame.vecs)?;
    let rho = 1.0 / (1.0 + c.norm_sqr());
    let ip = |a: &C3, b: &C3| -> f64 {
        (a[0].conj() * b[0] + a[1].conj() * b[1]).re + rho * rho * (a[2].conj() * b[2]).re
    };
    let ie = on[0].map(|z| z * Complex64::i());
    let k = ip(&on[1], &ie);
    let r = [ie[0] - on[1][0] * k, ie[1] - on[1][1] * k, ie[2] - on[1][2] * k];
    let complex_residual = ip(&r, &r).max(0.0).sqrt();
    let accepted = omega_residual < tol.legendrian && complex_residual < tol.legendrian;
    Ok(HolomorphicLegendrian { omega_residual, complex_residual, accepted })
}

/// Checks the conclusion of the projection lemmas that matches the rank of
/// `dp` on the patch: on rank 3 the slope equals the slope of the projected
/// tangent hyperplane, on rank 2 it is critical for the projected tangent
/// plane. Two-dimensional patches additionally get the holomorphic
/// legendrian test.
pub fn verify_projection_lemmas(m: &LiftedPatch, tol: &Tolerances) -> Result<ProjectionReport> {
    if m.samples.is_empty() {
        return Err(Error::InconclusiveSampling("patch has no samples".into()));
    }
    let mut ranks = Vec::with_capacity(m.samples.len());
    let mut residual: f64 = 0.0;
    let mut worst_hl: Option<HolomorphicLegendrian> = None;
    let mut projections = Vec::with_capacity(m.samples.len());
    for s in &m.samples {
        let (dirs, vals) = projected(&s.element, &s.frame)?;
        ranks.push(vals.iter().filter(|&&v| v > DP_RANK).count());
        projections.push(dirs);
    }
    let rank = ranks[0];
    if ranks.iter().any(|&r| r != rank) {
        let mut distinct = ranks.clone();
        distinct.sort_unstable();
        distinct.dedup();
        return Err(Error::MixedRank { ranks: distinct });
    }
    let check = match rank {
        3 => ProjectionCheck::HyperplaneSlope,
        2 => ProjectionCheck::CriticalSlope,
        _ => ProjectionCheck::Vertical,
    };
    for (s, dirs) in m.samples.iter().zip(&projections) {
        let r = match check {
            ProjectionCheck::HyperplaneSlope => {
                let n = linalg::complement(&dirs[..3]);
                super::hypersurface_slope(&n[0])?.distance(&s.element.slope)
            }
            ProjectionCheck::CriticalSlope => {
                let plane = RealPlane2::from_frame(dirs[0], dirs[1])?;
                plane.oriented_value(&s.element.slope).abs()
            }
            ProjectionCheck::Vertical => 0.0,
        };
        residual = residual.max(r);
        if s.frame.vecs.len() == 2 {
            let hl = holomorphic_legendrian_test(&s.element, &s.frame, tol)?;
            worst_hl = Some(match worst_hl {
                None => hl,
                Some(w) => HolomorphicLegendrian {
                    omega_residual: w.omega_residual.max(hl.omega_residual),
                    complex_residual: w.complex_residual.max(hl.complex_residual),
                    accepted: w.accepted && hl.accepted,
                },
            });
        }
    }
    let max_defect = m.max_defect();
    let semi_legendrian = max_defect < tol.legendrian;
    Ok(ProjectionReport {
        rank,
        samples: m.samples.len(),
        max_defect,
        semi_legendrian,
        check,
        max_residual: residual,
        holds: semi_legendrian && residual < tol.crit,
        holomorphic_legendrian: worst_hl,
    })
}

/// Sampled Hausdorff distance between `n` and the projection of its lift:
/// every projected sample is matched to the patch by closest-point search,
/// every lifted base point to the nearest projected sample.
pub fn projection_distance(n: &SurfacePatch, m: &LiftedPatch) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut projected: Vec<R4> = Vec::with_capacity(m.samples.len());
    for s in &m.samples {
        let z = linalg::from_c2(&s.element.z);
        let (_, d) = n.closest_point(&z, &s.param)?;
        worst = worst.max(d);
        projected.push(z);
    }
    let mut bases: Vec<&Vec<f64>> = m.samples.iter().map(|s| &s.param).collect();
    bases.dedup();
    for p in bases {
        let b = n.point(p)?;
        let d = projected.iter().map(|z| linalg::norm(&linalg::sub(z, &b))).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct GluingPoint {
    pub crease_param: Vec<f64>,
    pub top_param: Vec<f64>,
    /// Limit slope of the top-stratum section along the first approach.
    pub limit: Slope,
    pub approaches: usize,
    /// Largest distance between limits along different approaches.
    pub spread: f64,
    /// Normalized E-value of the limit slope on the crease tangent plane.
    pub circle_residual: f64,
    /// Condition (C) defect along the approaches.
    pub condition_c: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GluingReport {
    pub points: Vec<GluingPoint>,
    pub max_spread: f64,
    pub max_circle_residual: f64,
    pub max_condition_c: f64,
    /// One slope per crease point, on its critical circle.
    pub single_section: bool,
}

fn strictly_inside(s: &SurfacePatch, p: &[f64]) -> bool {
    p.iter()
        .zip(s.domain())
        .zip(s.periodic())
        .all(|((x, (a, b)), per)| *per || (*x > *a && *x < *b))
}

/// Steps `10^(-2 - n/4)`, from 1e-2 down to 1e-8.
fn approach_steps() -> Vec<f64> {
    (0..=24).map(|n| 10f64.powf(-2.0 - n as f64 / 4.0)).collect()
}

/// Limits of the section lift of the hypersurface `top` over the points of
/// the surface `crease` on its boundary, along every coordinate-diagonal
/// approach from inside the parameter box. The closure of the top lift
/// meets each crease fiber in a single slope when the limits agree; that
/// slope must lie on the crease's critical circle.
pub fn gluing_check(top: &SurfacePatch, crease: &SurfacePatch, crease_grid: usize, tol: &Tolerances) -> Result<GluingReport> {
    if top.dim() != 3 || crease.dim() != 2 {
        return Err(Error::InvalidInput("gluing needs a 3-dimensional top stratum and a 2-dimensional crease".into()));
    }
    let starts = top.grid(8);
    let steps = approach_steps();
    let mut dirs: Vec<[f64; 3]> = Vec::new();
    for a in -1..=1 {
        for b in -1..=1 {
            for c in -1..=1 {
                if (a, b, c) != (0, 0, 0) {
                    let v = [a as f64, b as f64, c as f64];
                    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                    dirs.push(v.map(|x| x / n));
                }
            }
        }
    }
    let mut points = Vec::new();
    for q in crease.grid(crease_grid) {
        let target = crease.point(&q)?;
        let start = starts
            .iter()
            .min_by(|a, b| {
                let da = top.point(a).map(|z| linalg::norm(&linalg::sub(&z, &target))).unwrap_or(f64::INFINITY);
                let db = top.point(b).map(|z| linalg::norm(&linalg::sub(&z, &target))).unwrap_or(f64::INFINITY);
                da.partial_cmp(&db).unwrap()
            })
            .expect("nonempty grid");
        let (p, dist) = top.closest_point(&target, start)?;
        if dist > 1e-9 {
            return Err(Error::InvalidInput(format!("crease point {q:?} is {dist:.3e} away from the top stratum")));
        }
        let p: Vec<f64> = p
            .iter()
            .zip(top.domain())
            .zip(top.periodic())
            .map(|((x, (a, b)), per)| if *per { *x } else { x.clamp(*a, *b) })
            .collect();
        let plane = RealPlane2::from_frame(crease.immersed_jacobian(&q)?.1[0], crease.immersed_jacobian(&q)?.1[1])?;
        let mut limits: Vec<Slope> = Vec::new();
        let mut cond: f64 = 0.0;
        for d in &dirs {
            let seq: Vec<Vec<f64>> = steps.iter().map(|e| p.iter().zip(d).map(|(x, di)| x + e * di).collect()).collect();
            if !seq.iter().all(|s| strictly_inside(top, s)) {
                continue;
            }
            let last = seq.last().unwrap();
            limits.push(section_sample(top, [last[0], last[1], last[2]])?.element.slope);
            cond = cond.max(condition_c_defect(crease, &q, top, &seq, tol.legendrian)?.defect);
        }
        let Some(limit) = limits.first().copied() else {
            return Err(Error::InvalidInput(format!("no approach into the top stratum at crease point {q:?}")));
        };
        let mut spread: f64 = 0.0;
        for a in &limits {
            for b in &limits {
                spread = spread.max(a.distance(b));
            }
        }
        points.push(GluingPoint {
            crease_param: q,
            top_param: p,
            limit,
            approaches: limits.len(),
            spread,
            circle_residual: plane.oriented_value(&limit).abs(),
            condition_c: cond,
        });
    }
    let max_spread = points.iter().map(|g| g.spread).fold(0.0, f64::max);
    let max_circle_residual = points.iter().map(|g| g.circle_residual).fold(0.0, f64::max);
    let max_condition_c = points.iter().map(|g| g.condition_c).fold(0.0, f64::max);
    Ok(GluingReport {
        points,
        max_spread,
        max_circle_residual,
        max_condition_c,
        single_section: max_spread < tol.legendrian && max_circle_residual < tol.legendrian,
    })
}

/// Radius of the crease sphere of the lens example.
const LENS_CREASE: f64 = 0.8660254037844386;

/// A creased 3-sphere in ℂ²: two smooth caps
/// `|x|² + y1² + (|y2| + 1/2)² = 1` glued along the 2-sphere
/// `{y2 = 0, |x|² + y1² = 3/4}`. Returns `[upper cap, lower cap, crease]`,
/// the caps parametrized by spherical coordinates in `(x1, x2, y1)`.
pub fn creased_sphere() -> [SurfacePatch; 3] {
    let cap = |sign: &str| {
        format!(
            "params: r a b\ndomain: [0, {LENS_CREASE}] x [0.2, 2.94] x [0, 6.283185307179586]\nperiodic: b\n\
             x1 = r*sin(a)*cos(b)\nx2 = r*sin(a)*sin(b)\ny1 = r*cos(a)\ny2 = {sign}(sqrt(1 - r^2) - 0.5)"
        )
    };
    let crease = format!(
        "params: a b\ndomain: [0.2, 2.94] x [0, 6.283185307179586]\nperiodic: b\n\
         x1 = {LENS_CREASE}*sin(a)*cos(b)\nx2 = {LENS_CREASE}*sin(a)*sin(b)\ny1 = {LENS_CREASE}*cos(a)\ny2 = 0"
    );
    [
        SurfacePatch::parse("lens-upper", &cap("")).expect("valid definition"),
        SurfacePatch::parse("lens-lower", &cap("-")).expect("valid definition"),
        SurfacePatch::parse("lens-crease", &crease).expect("valid definition"),
    ]
}

#[cfg(test)]
mod tests {
    use super::super::{lift, ContactPatch};
    use super::*;
    use crate::surfaces::Catalog;

    #[test]
    fn legendrian_curve_is_accepted() {
        let w = ContactPatch::parse("w", "params: s t\nx = s + i*t\ny = (s + i*t)^2/2\nl = s + i*t").unwrap();
        let m = w.sample(5).unwrap();
        let r = verify_projection_lemmas(&m, &Tolerances::default()).unwrap();
        let hl = r.holomorphic_legendrian.unwrap();
        assert!(hl.accepted && hl.omega_residual < 1e-12 && hl.complex_residual < 1e-12, "{hl:?}");
        assert_eq!(r.rank, 2);
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn fiberless_plane_is_rejected() {
        let w = ContactPatch::parse("p", "params: s t\nx = s + i*t\ny = 0\nl = 1").unwrap();
        let m = w.sample(3).unwrap();
        let r = verify_projection_lemmas(&m, &Tolerances::default()).unwrap();
        let hl = r.holomorphic_legendrian.unwrap();
        assert!(!hl.accepted);
        assert!((hl.omega_residual - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(!r.semi_legendrian && !r.holds);
    }

    #[test]
    fn catalog_round_trips() {
        let tol = Tolerances::default();
        let h = SurfacePatch::parse("h", "params: a b c\nx1 = a\nx2 = b\ny1 = c + a^2").unwrap();
        let m = lift(&h, 4, 0, &tol).unwrap();
        let r = verify_projection_lemmas(&m, &tol).unwrap();
        assert_eq!(r.check, ProjectionCheck::HyperplaneSlope);
        assert!(r.holds && r.max_residual < 1e-12, "{r:?}");
        for c in Catalog::ALL {
            let s = SurfacePatch::from_catalog(c);
            let m = lift(&s, 6, 12, &tol).unwrap();
            assert!(projection_distance(&s, &m).unwrap() < 1e-10, "{c:?}");
            let r = verify_projection_lemmas(&m, &tol).unwrap();
            assert_eq!(r.check, ProjectionCheck::CriticalSlope, "{c:?}");
            assert!(r.holds, "{c:?} {r:?}");
        }
    }

    #[test]
    fn mixed_frames_are_refused() {
        let mut m = lift(&SurfacePatch::from_catalog(Catalog::R2), 2, 4, &Tolerances::default()).unwrap();
        let pt = lift(&SurfacePatch::parse("p", "params:\nx = 0\ny = 0").unwrap(), 1, 4, &Tolerances::default()).unwrap();
        m.samples.extend(pt.samples);
        assert!(matches!(verify_projection_lemmas(&m, &Tolerances::default()), Err(Error::MixedRank { .. })));
    }

    #[test]
    fn lens_caps_glue_in_single_sections() {
        let [upper, lower, crease] = creased_sphere();
        let tol = Tolerances::default();
        let mut limits = Vec::new();
        for cap in [&upper, &lower] {
            let r = gluing_check(cap, &crease, 3, &tol).unwrap();
            assert!(r.single_section, "{} {}", r.max_spread, r.max_circle_residual);
            assert!(r.max_condition_c < 1e-6, "{}", r.max_condition_c);
            assert!(r.points.iter().all(|g| g.approaches >= 3));
            limits.push(r.points[4].limit);
        }
        // the two caps meet the crease at an angle: their sections differ
        assert!(limits[0].distance(&limits[1]) > 0.1);
    }
}
