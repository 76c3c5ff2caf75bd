use super::pi_rank;
use crate::contact::lift::{cross3, section_sample};
use crate::contact::hypersurface_slope;
use crate::linalg::{self, R4};
use crate::planes::Slope;
use crate::surfaces::SurfacePatch;
use crate::{Error, Result, Tolerances};
use num_complex::Complex64;
use serde::Serialize;

/// Radius of the circle in the tangent line on which `d ∩ H` is searched.
const PROBE_RADIUS: f64 = 1e-2;
const PROBE_ANGLES: usize = 64;
/// `|g| / PROBE_RADIUS` below this counts as a point of `d ∩ H`.
const ON_SURFACE: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct HypersurfaceSample {
    pub param: Vec<f64>,
    pub slope: Slope,
    /// A point of `d ∩ H` was found on the probe circle.
    pub curve: bool,
    /// Slope distance between the complex tangent at that point and `d`,
    /// divided by the probe radius; at the closest point when no curve exists.
    pub drift: f64,
    /// Angle in `d` of the best probe direction.
    pub angle: f64,
    pub exceptional: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypersurfaceReport {
    pub exceptional: bool,
    pub samples: Vec<HypersurfaceSample>,
    /// First sample where the tangent line leaves tangency.
    pub witness: Option<HypersurfaceSample>,
    /// Largest rank of `dπ` on the section lift: the dimension of the dual.
    pub dual_dimension: usize,
}

fn normal_at(h: &SurfacePatch, q: &[f64]) -> Result<R4> {
    let (_, cols) = h.immersed_jacobian(q)?;
    let n = cross3(&[cols[0], cols[1], cols[2]]);
    Ok(linalg::normalize(&n))
}

struct Probe {
    g: f64,
    drift: f64,
}

/// Signed distance of `target` to `h` near `start`, and the slope drift of
/// the complex tangent at the foot point.
fn probe(h: &SurfacePatch, target: &R4, start: &[f64], slope: &Slope) -> Result<Probe> {
    let (q, _) = h.closest_point(target, start)?;
    let n = normal_at(h, &q)?;
    let foot = h.point(&q)?;
    let g = linalg::dot(&n, &linalg::sub(target, &foot));
    let tangent = hypersurface_slope(&n)?;
    Ok(Probe { g, drift: tangent.distance(slope) / PROBE_RADIUS })
}

fn examine(h: &SurfacePatch, p: &[f64], tol: &Tolerances) -> Result<HypersurfaceSample> {
    let smp = section_sample(h, [p[0], p[1], p[2]])?;
    let slope = smp.element.slope;
    let z = linalg::from_c2(&smp.element.z);
    let (u, v) = slope.homogeneous();
    let at = |theta: f64| -> Result<Probe> {
        let r = Complex64::from_polar(PROBE_RADIUS, theta);
        let target = linalg::add(&z, &linalg::from_c2(&[u * r, v * r]));
        probe(h, &target, p, &slope)
    };
    let thetas: Vec<f64> = (0..PROBE_ANGLES).map(|k| std::f64::consts::TAU * k as f64 / PROBE_ANGLES as f64).collect();
    let probes: Vec<Probe> = thetas.iter().map(|&t| at(t)).collect::<Result<_>>()?;
    let scale = probes.iter().map(|q| q.g.abs()).fold(0.0, f64::max);
    // candidates: sign changes and local minima of |g|, refined by bisection
    // or golden section
    let mut best: Option<(f64, Probe)> = None;
    let mut consider = |theta: f64, pr: Probe| {
        let better = match &best {
            None => true,
            Some((_, b)) => {
                let on_b = b.g.abs() < ON_SURFACE * PROBE_RADIUS;
                let on_p = pr.g.abs() < ON_SURFACE * PROBE_RADIUS;
                (on_p && !on_b) || (on_p == on_b && if on_p { pr.drift < b.drift } else { pr.g.abs() < b.g.abs() })
            }
        };
        if better {
            best = Some((theta, pr));
        }
    };
    let n = thetas.len();
    for k in 0..n {
        let (ga, gb) = (probes[k].g, probes[(k + 1) % n].g);
        let (ta, mut tb) = (thetas[k], thetas[(k + 1) % n]);
        if tb < ta {
            tb += std::f64::consts::TAU;
        }
        if scale < ON_SURFACE * PROBE_RADIUS {
            consider(ta, at(ta)?);
            continue;
        }
        if ga == 0.0 || ga * gb < 0.0 {
            let (mut lo, mut hi) = (ta, tb);
            let mut glo = ga;
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                let gm = at(mid)?.g;
                if gm == 0.0 || (gm < 0.0) == (glo < 0.0) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            consider(lo, at(lo)?);
        }
        let gp = probes[(k + n - 1) % n].g.abs();
        if ga.abs() <= gp && ga.abs() <= gb.abs() {
            let (mut a, mut b) = (ta - (tb - ta), tb);
            let phi = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..60 {
                let c = b - phi * (b - a);
                let d = a + phi * (b - a);
                if at(c)?.g.abs() < at(d)?.g.abs() {
                    b = d;
                } else {
                    a = c;
                }
            }
            let t = 0.5 * (a + b);
            consider(t, at(t)?);
        }
    }
    let (angle, pr) = best.expect("probe circle is sampled");
    let curve = pr.g.abs() < ON_SURFACE * PROBE_RADIUS;
    let exceptional = curve && pr.drift < tol.exc;
    Ok(HypersurfaceSample { param: p.to_vec(), slope, curve, drift: pr.drift, angle, exceptional })
}

/// Tests whether the complex tangent line `d` of `h` at each sampled point
/// stays tangent along a curve of `d ∩ h` through the point. The curve is
/// searched on a circle of radius 1e-2 in `d`; a point-like intersection
/// makes the sample non-exceptional, with the drift at the closest probe.
pub fn exceptional_hypersurface_test(h: &SurfacePatch, grid: usize, tol: &Tolerances) -> Result<HypersurfaceReport> {
    if h.dim() != 3 {
        return Err(Error::InvalidInput(format!("need a 3-parameter hypersurface, got {}", h.dim())));
    }
    let mut samples = Vec::new();
    let mut dual_dimension = 0;
    for p in h.grid(grid) {
        let smp = section_sample(h, [p[0], p[1], p[2]])?;
        dual_dimension = dual_dimension.max(pi_rank(&smp.element, &smp.frame)?);
        samples.push(examine(h, &p, tol).map_err(|e| match e {
            Error::ImmersionFailure { .. } | Error::Domain(_) => {
                Error::TraceFailure(format!("d ∩ H could not be followed at {p:?}: {e}"))
            }
            other => other,
        })?);
    }
    let witness = samples.iter().find(|s| !s.exceptional).cloned();
    Ok(HypersurfaceReport { exceptional: witness.is_none(), samples, witness, dual_dimension })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levi_flat_hyperplane_is_exceptional() {
        let h = SurfacePatch::parse("h", "params: a b c\nx1 = a\nx2 = b\ny1 = c").unwrap();
        let r = exceptional_hypersurface_test(&h, 2, &Tolerances::default()).unwrap();
        assert!(r.exceptional);
        assert!(r.dual_dimension <= 2);
    }

    #[test]
    fn torus_dual_is_exceptional() {
        let h = SurfacePatch::parse(
            "torus-dual",
            "params: r s t\ndomain: [0.2, 0.8] x [0, 6.283185307179586] x [0, 6.283185307179586]\n\
             x = r*exp(i*(t - s))\ny = (1 - r)*exp(i*t)",
        )
        .unwrap();
        let r = exceptional_hypersurface_test(&h, 2, &Tolerances::default()).unwrap();
        assert!(r.exceptional, "{:?}", r.witness);
        assert_eq!(r.dual_dimension, 2);
    }

    #[test]
    fn sphere_is_not_exceptional() {
        let h = SurfacePatch::parse(
            "s3",
            "params: a b c\ndomain: [0.2, 1.3] x [0, 6.283185307179586] x [0, 6.283185307179586]\n\
             x = cos(a)*exp(i*b)\ny = sin(a)*exp(i*c)",
        )
        .unwrap();
        let r = exceptional_hypersurface_test(&h, 2, &Tolerances::default()).unwrap();
        assert!(!r.exceptional);
        let w = r.witness.unwrap();
        assert!(!w.curve && w.drift > 0.1, "{w:?}");
        assert_eq!(r.dual_dimension, 3);
    }
}
