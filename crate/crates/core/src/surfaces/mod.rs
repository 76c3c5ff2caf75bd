//! Real submanifold patches of ℂ² ⊂ ℙ²: catalog entries and user
//! definitions, their jets, and the critical-locus machinery built on top.

mod catalog;
mod classify;
mod condition_c;
mod efunc;
mod exceptional;
mod trace;

pub use catalog::Catalog;
pub use classify::{classify_exceptional_surface, Classification, ClassifyEvidence, LeafFamily};
pub use condition_c::{condition_c_defect, ConditionC};
pub use efunc::{e_function, e_gradient, tangent_plane};
pub use exceptional::{exceptional_tests, signed_curvature_margin, CriticalPair, ExceptionalReport};
pub use trace::{trace_c_lambda, TracedCurve};
pub(crate) use efunc::det4_generic as det4_rows;

use crate::jets::{self, Cx, Jet1, Jet2, Scalar, SurfaceDef};
use crate::linalg::{self, R4};
use crate::{Error, Result};
use std::sync::Arc;

/// Bundled definition files, reachable as `graph:<name>` without a file on disk.
pub const BUNDLED: [(&str, &str); 6] = [
    ("paraboloid.surf", include_str!("../../surfaces/paraboloid.surf")),
    ("fold.surf", include_str!("../../surfaces/fold.surf")),
    ("exceptional.surf", include_str!("../../surfaces/exceptional.surf")),
    ("parabola-product.surf", include_str!("../../surfaces/parabola-product.surf")),
    ("levi-flat.surf", include_str!("../../surfaces/levi-flat.surf")),
    ("complex-tangent.surf", include_str!("../../surfaces/complex-tangent.surf")),
];

#[derive(Debug, Clone)]
enum Source {
    Catalog(Catalog),
    Def(Arc<SurfaceDef>),
}

/// A C² parametrized patch `u: box ⊂ ℝ^k → ℙ²`, `k ≤ 3`.
#[derive(Debug, Clone)]
pub struct SurfacePatch {
    name: String,
    source: Source,
    domain: Vec<(f64, f64)>,
    periodic: Vec<bool>,
    compact: bool,
}

/// Value and Jacobian of a patch in real coordinates `(x1, x2, y1, y2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapJet1<const K: usize> {
    pub value: R4,
    pub jac: [R4; K],
}

/// Value, Jacobian columns and Hessian blocks `hess[i][j] = ∂i∂j u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapJet2<const K: usize> {
    pub value: R4,
    pub jac: [R4; K],
    pub hess: [[R4; K]; K],
}

impl<const K: usize> MapJet2<K> {
    /// Second derivative along the parameter direction `d`.
    pub fn second(&self, d: &[f64; K]) -> R4 {
        let mut out = [0.0; 4];
        for i in 0..K {
            for j in 0..K {
                out = linalg::axpy(&out, d[i] * d[j], &self.hess[i][j]);
            }
        }
        out
    }

    /// First derivative along `d`.
    pub fn first(&self, d: &[f64; K]) -> R4 {
        let mut out = [0.0; 4];
        for i in 0..K {
            out = linalg::axpy(&out, d[i], &self.jac[i]);
        }
        out
    }
}

fn components<T: Scalar>(z: &[Cx<T>; 2]) -> [T; 4] {
    [z[0].re, z[0].im, z[1].re, z[1].im]
}

impl SurfacePatch {
    pub fn from_catalog(c: Catalog) -> SurfacePatch {
        let (domain, periodic, compact) = c.layout();
        SurfacePatch { name: c.name().to_string(), source: Source::Catalog(c), domain, periodic, compact }
    }

    /// Wraps a parsed definition. Without a `domain:` header the box is
    /// `[-1, 1]^k`; a patch is compact when every parameter is periodic.
    pub fn from_def(name: &str, def: SurfaceDef) -> Result<SurfacePatch> {
        let k = def.dim();
        if k > 3 {
            return Err(Error::InvalidInput(format!("{k} parameters; at most 3 are supported")));
        }
        let domain = def.domain.clone().unwrap_or_else(|| vec![(-1.0, 1.0); k]);
        let mut periodic = vec![false; k];
        for &i in &def.periodic {
            periodic[i] = true;
        }
        let compact = k > 0 && periodic.iter().all(|&p| p);
        Ok(SurfacePatch { name: name.to_string(), source: Source::Def(Arc::new(def)), domain, periodic, compact })
    }

    pub fn parse(name: &str, text: &str) -> Result<SurfacePatch> {
        Self::from_def(name, jets::parse(text)?)
    }

    /// Resolves a catalog name or `graph:<file>`. A file that does not exist
    /// on disk is looked up among the bundled definitions.
    pub fn resolve(spec: &str) -> Result<SurfacePatch> {
        if let Some(path) = spec.strip_prefix("graph:") {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    let base = std::path::Path::new(path).file_name().and_then(|f| f.to_str()).unwrap_or(path);
                    match BUNDLED.iter().find(|(n, _)| *n == base) {
                        Some((_, t)) => t.to_string(),
                        None => return Err(Error::Io(format!("{path}: {e}"))),
                    }
                }
            };
            return Self::parse(spec, &text);
        }
        Catalog::from_name(spec)
            .map(Self::from_catalog)
            .ok_or_else(|| Error::InvalidInput(format!("unknown surface `{spec}`")))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.domain.len()
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }

    /// Compactness is declared (catalog identifications or periodic
    /// parameters), never inferred.
    pub fn is_compact(&self) -> bool {
        self.compact
    }

    pub fn catalog(&self) -> Option<Catalog> {
        match &self.source {
            Source::Catalog(c) => Some(*c),
            Source::Def(_) => None,
        }
    }

    /// Homogeneous coordinates `(Z0, Z1, Z2)` with `x = Z1/Z0`, `y = Z2/Z0`.
    pub fn eval_homogeneous<T: Scalar>(&self, p: &[T]) -> Result<[Cx<T>; 3]> {
        match &self.source {
            Source::Catalog(c) => c.eval(p),
            Source::Def(d) => {
                let [x, y] = d.eval(p)?;
                Ok([Cx::cst(1.0, 0.0), x, y])
            }
        }
    }

    /// Affine point `(x, y)`; fails near the line at infinity.
    pub fn eval_affine<T: Scalar>(&self, p: &[T]) -> Result<[Cx<T>; 2]> {
        match &self.source {
            Source::Def(d) => d.eval(p),
            Source::Catalog(c) => {
                let z = c.eval(p)?;
                if z[0].norm_sqr().val().sqrt() < 1e-9 * (z[1].norm_sqr().val() + z[2].norm_sqr().val()).sqrt() {
                    return Err(Error::Domain("point at infinity of the affine chart".into()));
                }
                Ok([z[1].checked_div(z[0])?, z[2].checked_div(z[0])?])
            }
        }
    }

    pub fn point(&self, p: &[f64]) -> Result<R4> {
        Ok(components(&self.eval_affine(p)?))
    }

    pub fn jet1<const K: usize>(&self, p: [f64; K]) -> Result<MapJet1<K>> {
        self.check_dim(K)?;
        let vars: Vec<Jet1<K>> = (0..K).map(|i| Jet1::var(p[i], i)).collect();
        let c = components(&self.eval_affine(&vars)?);
        let mut jac = [[0.0; 4]; K];
        for (r, comp) in c.iter().enumerate() {
            for i in 0..K {
                jac[i][r] = comp.g[i];
            }
        }
        Ok(MapJet1 { value: c.map(|x| x.v), jac })
    }

    pub fn jet2<const K: usize>(&self, p: [f64; K]) -> Result<MapJet2<K>> {
        self.check_dim(K)?;
        let vars = Jet2::<K>::vars(p);
        let c = components(&self.eval_affine(&vars)?);
        let mut jac = [[0.0; 4]; K];
        let mut hess = [[[0.0; 4]; K]; K];
        for (r, comp) in c.iter().enumerate() {
            for i in 0..K {
                jac[i][r] = comp.g[i];
                for j in 0..K {
                    hess[i][j][r] = comp.h[i][j];
                }
            }
        }
        Ok(MapJet2 { value: c.map(|x| x.v), jac, hess })
    }

    /// Jacobian columns for any parameter count.
    pub fn jacobian(&self, p: &[f64]) -> Result<(R4, Vec<R4>)> {
        match p.len() {
            0 => Ok((self.point(p)?, Vec::new())),
            1 => self.jet1::<1>([p[0]]).map(|j| (j.value, j.jac.to_vec())),
            2 => self.jet1::<2>([p[0], p[1]]).map(|j| (j.value, j.jac.to_vec())),
            3 => self.jet1::<3>([p[0], p[1], p[2]]).map(|j| (j.value, j.jac.to_vec())),
            n => Err(Error::InvalidInput(format!("{n} parameters"))),
        }
    }

    /// Jacobian with an immersion check (smallest singular value above the floor).
    pub fn immersed_jacobian(&self, p: &[f64]) -> Result<(R4, Vec<R4>)> {
        let (v, cols) = self.jacobian(p)?;
        if !cols.is_empty() {
            let mut data = Vec::with_capacity(4 * cols.len());
            for r in 0..4 {
                for c in &cols {
                    data.push(c[r]);
                }
            }
            let s = linalg::singular_values(4, cols.len(), &data);
            let sigma = *s.last().unwrap();
            if !(sigma > crate::tol::IMMERSION_FLOOR) {
                return Err(Error::ImmersionFailure { at: p.to_vec(), sigma });
            }
        }
        Ok((v, cols))
    }

    fn check_dim(&self, k: usize) -> Result<()> {
        if k != self.dim() {
            return Err(Error::InvalidInput(format!("patch `{}` has {} parameters, not {k}", self.name, self.dim())));
        }
        Ok(())
    }

    /// True if `p` is inside the parameter box (periodic directions always are).
    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(&self.domain)
            .zip(&self.periodic)
            .all(|((x, (a, b)), per)| *per || (*x >= *a && *x <= *b))
    }

    /// Reduces periodic coordinates into their box.
    pub fn wrap(&self, p: &[f64]) -> Vec<f64> {
        p.iter()
            .zip(&self.domain)
            .zip(&self.periodic)
            .map(|((x, (a, b)), per)| if *per { a + (x - a).rem_euclid(b - a) } else { *x })
            .collect()
    }

    /// Parameter distance respecting periodic identifications.
    pub fn param_distance(&self, p: &[f64], q: &[f64]) -> f64 {
        p.iter()
            .zip(q)
            .zip(&self.domain)
            .zip(&self.periodic)
            .map(|(((x, y), (a, b)), per)| {
                let mut d = (x - y).abs();
                if *per {
                    let w = b - a;
                    d = d.rem_euclid(w);
                    d = d.min(w - d);
                }
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `n^k` cell-centred parameter samples in lexicographic order.
    pub fn grid(&self, n: usize) -> Vec<Vec<f64>> {
        let k = self.dim();
        let mut out = Vec::new();
        let total = n.pow(k as u32);
        for idx in 0..total {
            let mut rem = idx;
            let mut p = vec![0.0; k];
            for i in (0..k).rev() {
                let c = rem % n;
                rem /= n;
                let (a, b) = self.domain[i];
                p[i] = a + (b - a) * (c as f64 + 0.5) / n as f64;
            }
            out.push(p);
        }
        out
    }

    /// Closest point of the patch to `target`, by damped Gauss–Newton from
    /// `start`. Returns the parameter and the distance.
    pub fn closest_point(&self, target: &R4, start: &[f64]) -> Result<(Vec<f64>, f64)> {
        let k = self.dim();
        let mut p = start.to_vec();
        let mut best = linalg::norm(&linalg::sub(&self.point(&p)?, target));
        for _ in 0..60 {
            let (v, cols) = self.jacobian(&p)?;
            let r = linalg::sub(&v, target);
            let mut a = vec![0.0; k * k];
            let mut g = vec![0.0; k];
            for i in 0..k {
                g[i] = -linalg::dot(&cols[i], &r);
                for j in 0..k {
                    a[i * k + j] = linalg::dot(&cols[i], &cols[j]);
                }
                a[i * k + i] *= 1.0 + 1e-12;
            }
            let Some(step) = linalg::solve(k, &a, &g) else { break };
            let mut t = 1.0;
            let mut moved = false;
            for _ in 0..30 {
                let q: Vec<f64> = p.iter().zip(&step).map(|(x, s)| x + t * s).collect();
                if let Ok(vq) = self.point(&q) {
                    let dq = linalg::norm(&linalg::sub(&vq, target));
                    if dq < best {
                        best = dq;
                        p = q;
                        moved = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            let sn: f64 = step.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !moved || sn * t < 1e-15 {
                break;
            }
        }
        Ok((p, best))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_differentiated_jets() {
        let s = SurfacePatch::parse("e", "params: s t\nx = s\ny = t + i*s*t").unwrap();
        let j = s.jet2::<2>([0.0, 0.0]).unwrap();
        assert_eq!(j.jac[0], [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(j.jac[1], [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(j.hess[0][1][3], 1.0);
        assert_eq!(j.hess[1][0][3], 1.0);
        assert_eq!(j.hess[0][0][3], 0.0);
        let f = SurfacePatch::parse("f", "params: s t\nx = s\ny = t + i*s^2/2").unwrap();
        let j = f.jet2::<2>([0.0, 0.0]).unwrap();
        assert_eq!(j.hess[0][0][3], 1.0);
        assert_eq!(j.hess[0][1][3], 0.0);
        assert_eq!(j.hess[1][1][3], 0.0);
    }

    #[test]
    fn constant_map_has_zero_jet() {
        let c = SurfacePatch::parse("c", "params: s t\nx = 2 + i\ny = -1").unwrap();
        let j = c.jet2::<2>([0.3, 0.4]).unwrap();
        assert_eq!(j.value, [2.0, 1.0, -1.0, 0.0]);
        assert!(j.jac.iter().flatten().all(|&x| x == 0.0));
        assert!(j.hess.iter().flatten().flatten().all(|&x| x == 0.0));
        assert!(matches!(c.immersed_jacobian(&[0.0, 0.0]), Err(Error::ImmersionFailure { .. })));
    }

    #[test]
    fn bundled_graphs_resolve() {
        for (name, _) in BUNDLED {
            let s = SurfacePatch::resolve(&format!("graph:{name}")).unwrap();
            assert_eq!(s.dim(), 2);
        }
        assert!(matches!(SurfacePatch::resolve("graph:/nonexistent/none.surf"), Err(Error::Io(_))));
    }

    #[test]
    fn closest_point_recovers_parameter() {
        let s = SurfacePatch::resolve("graph:paraboloid.surf").unwrap();
        let target = s.point(&[0.2, -0.1]).unwrap();
        let (p, d) = s.closest_point(&target, &[0.25, -0.05]).unwrap();
        assert!(d < 1e-12);
        assert!((p[0] - 0.2).abs() < 1e-9 && (p[1] + 0.1).abs() < 1e-9);
    }

    #[test]
    fn periodic_distance_wraps() {
        let t = SurfacePatch::resolve("clifford-torus").unwrap();
        let tau = std::f64::consts::TAU;
        assert!(t.param_distance(&[0.01, 0.0], &[tau - 0.01, 0.0]) < 0.0201);
        assert!(t.is_compact());
    }
}
