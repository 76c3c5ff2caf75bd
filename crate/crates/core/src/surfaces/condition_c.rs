use super::SurfacePatch;
use crate::linalg::{self, R4};
use crate::{Error, Result};
use nalgebra::{Matrix4, SMatrix};
use serde::Serialize;

/// Largest variation of the tangent projectors over the tail that still
/// counts as convergence.
const TAIL_VARIATION: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct ConditionC {
    /// Largest principal-angle sine over the last quarter of the sequence.
    pub defect: f64,
    pub holds: bool,
    /// Defect at every point of the sequence.
    pub per_point: Vec<f64>,
    /// Spread of the tangent projectors over the tail.
    pub variation: f64,
    /// Distance of the last sequence point to the limit point.
    pub gap: f64,
}

fn orthonormal(cols: &[R4]) -> Vec<R4> {
    let mut out: Vec<R4> = Vec::new();
    for c in cols {
        let mut v = *c;
        for _ in 0..2 {
            for o in &out {
                v = linalg::axpy(&v, -linalg::dot(&v, o), o);
            }
        }
        let n = linalg::norm(&v);
        if n > 1e-12 {
            out.push(linalg::scale(&v, 1.0 / n));
        }
    }
    out
}

fn projector(basis: &[R4]) -> Matrix4<f64> {
    let mut p = Matrix4::zeros();
    for b in basis {
        let v = nalgebra::Vector4::from(*b);
        p += v * v.transpose();
    }
    p
}

/// Whether the tangent spaces of `yj` along `seq` converge to a space that
/// contains the tangent space of `yi` at `yi_param`.
pub fn condition_c_defect(
    yi: &SurfacePatch,
    yi_param: &[f64],
    yj: &SurfacePatch,
    seq: &[Vec<f64>],
    tol: f64,
) -> Result<ConditionC> {
    if yi.dim() >= yj.dim() {
        return Err(Error::InvalidInput(format!(
            "small stratum has dimension {} but the big one has {}",
            yi.dim(),
            yj.dim()
        )));
    }
    if seq.len() < 4 {
        return Err(Error::InvalidInput("approach sequence needs at least 4 points".into()));
    }
    let (target, ti) = yi.immersed_jacobian(yi_param)?;
    let qi = orthonormal(&ti);
    let qm = SMatrix::<f64, 4, 3>::from_fn(|r, c| qi.get(c).map_or(0.0, |v| v[r]));
    let mut per_point = Vec::with_capacity(seq.len());
    let mut projectors = Vec::with_capacity(seq.len());
    for y in seq {
        let (_, tj) = yj.immersed_jacobian(y)?;
        let p = projector(&orthonormal(&tj));
        let resid = (Matrix4::identity() - p) * qm;
        per_point.push(resid.svd(false, false).singular_values.max());
        projectors.push(p);
    }
    let gap = linalg::norm(&linalg::sub(&yj.point(seq.last().unwrap())?, &target));
    let tail = seq.len() / 2;
    let last = seq.len() - seq.len() / 4;
    let mut variation: f64 = 0.0;
    for a in tail..seq.len() {
        for b in a + 1..seq.len() {
            variation = variation.max((projectors[a] - projectors[b]).norm());
        }
    }
    if variation > TAIL_VARIATION {
        return Err(Error::NonConvergent { variation });
    }
    let defect = per_point[last..].iter().cloned().fold(0.0, f64::max);
    Ok(ConditionC { defect, holds: defect < tol, per_point, variation, gap })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(f: impl Fn(f64) -> Vec<f64>) -> Vec<Vec<f64>> {
        (8..64).map(|n| f((-(n as f64) / 4.0).exp())).collect()
    }

    #[test]
    fn point_in_plane() {
        let yi = SurfacePatch::parse("origin", "params:\nx = 0\ny = 0").unwrap();
        let yj = SurfacePatch::parse("plane", "params: s t\nx = s\ny = t").unwrap();
        let r = condition_c_defect(&yi, &[], &yj, &seq(|b| vec![b, -b]), 1e-6).unwrap();
        assert_eq!(r.defect, 0.0);
        assert!(r.holds && r.gap < 1e-6);
    }

    #[test]
    fn axis_in_graph() {
        let yi = SurfacePatch::parse("axis", "params: a\nx1 = a").unwrap();
        let yj = SurfacePatch::parse("graph", "params: a b\nx1 = a\nx2 = b\ny2 = a^2").unwrap();
        let r = condition_c_defect(&yi, &[0.0], &yj, &seq(|b| vec![b, b]), 1e-4).unwrap();
        // sin of the angle is 2b/sqrt(1 + 4b²) at the point (b, b)
        for (k, d) in r.per_point.iter().enumerate() {
            let b = (-((k + 8) as f64) / 4.0).exp();
            assert!((d - 2.0 * b / (1.0 + 4.0 * b * b).sqrt()).abs() < 1e-12);
        }
        assert!(r.holds);
    }

    #[test]
    fn missing_direction_is_a_defect() {
        // tangent planes {∂x2, ∂y1 + 2b ∂y2} never contain ∂x1
        let yi = SurfacePatch::parse("axis", "params: a\nx1 = a").unwrap();
        let yj = SurfacePatch::parse("graph", "params: a b\nx2 = a\ny1 = b\ny2 = b^2").unwrap();
        let r = condition_c_defect(&yi, &[0.0], &yj, &seq(|b| vec![0.0, b]), 1e-6).unwrap();
        assert!((r.defect - 1.0).abs() < 1e-12);
        assert!(!r.holds);
    }

    #[test]
    fn oscillating_tangents() {
        let yi = SurfacePatch::parse("axis", "params: a\nx1 = a").unwrap();
        let yj = SurfacePatch::parse("wave", "params: a b\nx1 = a\nx2 = b\ny1 = b*sin(ln(b))").unwrap();
        let r = condition_c_defect(&yi, &[0.0], &yj, &seq(|b| vec![b, b]), 1e-6);
        assert!(matches!(r, Err(Error::NonConvergent { .. })), "{r:?}");
    }
}
