use super::efunc::{e_function, e_gradient};
use super::SurfacePatch;
use crate::planes::Slope;
use crate::tol::{DEDUP_RADIUS, TRACE_STEP, TRACE_STEP_MAX};
use crate::{Error, Result, Tolerances};
use serde::Serialize;

const MAX_STEPS: usize = 20_000;
const CORRECTOR_TOL: f64 = 1e-13;

/// Samples of a critical curve `C_λ` in parameter space.
#[derive(Debug, Clone, Serialize)]
pub struct TracedCurve {
    pub slope: Slope,
    pub params: Vec<[f64; 2]>,
    pub closed: bool,
    /// Largest |E| over the samples.
    pub max_e: f64,
}

/// Newton projection onto `{E = 0}` along the gradient.
fn correct(s: &SurfacePatch, l: &Slope, mut p: [f64; 2], iters: usize) -> Option<([f64; 2], usize)> {
    for k in 0..iters {
        let (e, g) = e_gradient(s, p, l).ok()?;
        if e.abs() < CORRECTOR_TOL {
            return Some((p, k));
        }
        let g2 = g[0] * g[0] + g[1] * g[1];
        if !(g2 > 1e-24) {
            return None;
        }
        p = [p[0] - e * g[0] / g2, p[1] - e * g[1] / g2];
    }
    let e = e_function(s, p, l).ok()?;
    (e.abs() < CORRECTOR_TOL * 10.0).then_some((p, iters))
}

fn unit_perp(g: [f64; 2]) -> [f64; 2] {
    let n = (g[0] * g[0] + g[1] * g[1]).sqrt();
    [-g[1] / n, g[0] / n]
}

/// Signed parameter difference `a - b` with periodic coordinates reduced.
fn diff(s: &SurfacePatch, a: &[f64; 2], b: &[f64; 2]) -> [f64; 2] {
    let mut d = [a[0] - b[0], a[1] - b[1]];
    for i in 0..2 {
        if s.periodic()[i] {
            let (lo, hi) = s.domain()[i];
            let w = hi - lo;
            d[i] = (d[i] + 0.5 * w).rem_euclid(w) - 0.5 * w;
        }
    }
    d
}

fn seg_distance(s: &SurfacePatch, target: &[f64; 2], a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let ab = diff(s, b, a);
    let at = diff(s, target, a);
    let l2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if l2 > 0.0 { ((at[0] * ab[0] + at[1] * ab[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
    ((at[0] - t * ab[0]).powi(2) + (at[1] - t * ab[1]).powi(2)).sqrt()
}

enum Stop {
    Closed,
    Boundary,
    Exhausted,
}

fn march(s: &SurfacePatch, l: &Slope, seed: [f64; 2], dir: f64, out: &mut Vec<[f64; 2]>) -> Result<Stop> {
    let (_, g0) = e_gradient(s, seed, l)?;
    let t0 = unit_perp(g0);
    let mut tau = [dir * t0[0], dir * t0[1]];
    let mut p = seed;
    let mut h = TRACE_STEP;
    let mut travelled = 0.0;
    for _ in 0..MAX_STEPS {
        let q0 = [p[0] + h * tau[0], p[1] + h * tau[1]];
        let attempt = correct(s, l, q0, 12).and_then(|(q, it)| {
            let (_, g) = e_gradient(s, q, l).ok()?;
            let mut t = unit_perp(g);
            if t[0] * tau[0] + t[1] * tau[1] < 0.0 {
                t = [-t[0], -t[1]];
            }
            let d = diff(s, &q, &p);
            let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
            let turn = (t[0] * tau[0] + t[1] * tau[1]).clamp(-1.0, 1.0).acos();
            (len < 2.0 * h && turn < 0.3).then_some((q, t, it, turn, len))
        });
        let Some((q, t, it, turn, len)) = attempt else {
            h *= 0.5;
            if h < 1e-9 {
                if out.is_empty() {
                    return Err(Error::TraceFailure("continuation step underflow".into()));
                }
                return Ok(Stop::Exhausted);
            }
            continue;
        };
        if !s.contains(&q) {
            return Ok(Stop::Boundary);
        }
        travelled += len;
        if travelled > 3.0 * TRACE_STEP && seg_distance(s, &seed, &p, &q) < DEDUP_RADIUS.max(h * h) {
            return Ok(Stop::Closed);
        }
        let w = s.wrap(&q);
        out.push([w[0], w[1]]);
        p = q;
        tau = t;
        if it <= 2 && turn < 0.05 {
            h = (1.5 * h).min(TRACE_STEP_MAX);
        }
    }
    Ok(Stop::Exhausted)
}

/// Predictor–corrector continuation of `{E = 0}` through `seed`, in both
/// directions, until the curve closes or leaves the parameter box.
pub fn trace_c_lambda(s: &SurfacePatch, l: &Slope, seed: [f64; 2], tol: &Tolerances) -> Result<TracedCurve> {
    let e0 = e_function(s, seed, l)?;
    let r = 1e-2;
    let mut flat = e0.abs() < tol.crit;
    for k in 0..16 {
        if !flat {
            break;
        }
        let a = std::f64::consts::TAU * k as f64 / 16.0;
        let q = [seed[0] + r * a.cos(), seed[1] + r * a.sin()];
        flat = e_function(s, q, l).map(|e| e.abs() < tol.crit).unwrap_or(false);
    }
    if flat {
        return Err(Error::DegenerateLocus);
    }
    if e0.abs() >= tol.crit {
        return Err(Error::NotCritical { e: e0 });
    }
    let (_, g) = e_gradient(s, seed, l)?;
    let gn = (g[0] * g[0] + g[1] * g[1]).sqrt();
    if gn < 1e-8 {
        return Err(Error::SingularStart { grad: gn });
    }
    let (start, _) = correct(s, l, seed, 20).ok_or_else(|| Error::TraceFailure("seed correction failed".into()))?;
    let mut fwd = Vec::new();
    let stop = march(s, l, start, 1.0, &mut fwd)?;
    let mut params = vec![start];
    let closed = matches!(stop, Stop::Closed);
    if closed {
        params.extend(fwd);
    } else {
        let mut bwd = Vec::new();
        march(s, l, start, -1.0, &mut bwd)?;
        bwd.reverse();
        bwd.push(start);
        bwd.extend(fwd);
        params = bwd;
    }
    let mut max_e: f64 = 0.0;
    for p in &params {
        max_e = max_e.max(e_function(s, *p, l)?.abs());
    }
    Ok(TracedCurve { slope: *l, params, closed, max_e })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::Catalog;
    use num_complex::Complex64;

    #[test]
    fn fold_curve_is_s_zero() {
        let s = SurfacePatch::resolve("graph:fold.surf").unwrap();
        let c = trace_c_lambda(&s, &Slope::real(0.0), [0.0, 0.0], &Tolerances::default()).unwrap();
        assert!(!c.closed);
        assert!(c.params.len() > 20);
        for p in &c.params {
            assert!(p[0].abs() < 1e-10);
        }
        let ts: Vec<f64> = c.params.iter().map(|p| p[1]).collect();
        assert!(ts.iter().cloned().fold(f64::MAX, f64::min) < -0.9);
        assert!(ts.iter().cloned().fold(f64::MIN, f64::max) > 0.9);
        assert!(c.max_e < 1e-8);
    }

    #[test]
    fn exceptional_curve_is_t_zero() {
        let s = SurfacePatch::resolve("graph:exceptional.surf").unwrap();
        let c = trace_c_lambda(&s, &Slope::real(0.0), [0.0, 0.0], &Tolerances::default()).unwrap();
        for p in &c.params {
            assert!(p[1].abs() < 1e-10);
        }
    }

    #[test]
    fn r2_is_degenerate() {
        let s = SurfacePatch::from_catalog(Catalog::R2);
        let r = trace_c_lambda(&s, &Slope::real(0.0), [0.0, 0.0], &Tolerances::default());
        assert_eq!(r.unwrap_err(), Error::DegenerateLocus);
    }

    #[test]
    fn torus_curve_closes() {
        // slope 2 e^{i(t-s)} with t - s = 0.4 is critical along the line t = s + 0.4
        let s = SurfacePatch::from_catalog(Catalog::CliffordTorus);
        let l = Slope::chart(Complex64::from_polar(2.0, 0.4));
        let c = trace_c_lambda(&s, &l, [1.0, 1.4], &Tolerances::default()).unwrap();
        assert!(c.closed);
        for p in &c.params {
            let d = (p[1] - p[0] - 0.4).rem_euclid(std::f64::consts::TAU);
            assert!(d.min(std::f64::consts::TAU - d) < 1e-9);
        }
    }
}
