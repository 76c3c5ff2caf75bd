use super::exceptional::{critical_direction, exceptional_tests, phi, signed_curvature_margin, CriticalPair};
use super::SurfacePatch;
use crate::linalg::{self, R4};
use crate::planes::{RealPlane2, Slope, SphereCircle};
use crate::{Error, Result, Tolerances};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

const CIRCLE_SAMPLES: usize = 128;
const LEAF_STEPS: usize = 16;
const LEAF_STEP: f64 = 0.00625;
const LEAF_TOL: f64 = 1e-7;
const NON_LEAF: f64 = 1e-6;
const CONCURRENT: f64 = 1e-6;
const CIRCLE_FIXED: f64 = 1e-6;
const DRIFT_STEP: f64 = 1e-2;
/// Transverse offset and slope window of the foliation check.
const FOLIATION_STEP: f64 = 1e-2;
const FOLIATION_SLOPE: f64 = 0.1;
/// Sampled margin small enough to look for a touching zero nearby.
const TOUCH: f64 = 0.2;
/// Refined margin accepted as a zero.
const ROOT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    ComplexCurve,
    RealAffinePlane,
    PencilProduct,
    LeviFlatFamily,
    Generic,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::ComplexCurve => "complex-curve",
            Classification::RealAffinePlane => "real-affine-plane",
            Classification::PencilProduct => "pencil-product",
            Classification::LeviFlatFamily => "levi-flat-family",
            Classification::Generic => "generic",
        }
    }
}

/// Exceptional slopes whose critical curve stays inside their line, followed
/// across the sample grid.
#[derive(Debug, Clone, Serialize)]
pub struct LeafFamily {
    pub params: Vec<[f64; 2]>,
    pub slopes: Vec<Slope>,
    /// Line coordinates `ξ` with `ξ · (1, x, y) = 0`, unit norm.
    pub lines: Vec<[Complex64; 3]>,
    /// `σ3/σ1` of the stacked line coordinates; zero for a pencil.
    pub concurrency: f64,
    /// Common point of the lines when they are concurrent.
    pub center: Option<[Complex64; 3]>,
    pub max_drift: f64,
}

impl LeafFamily {
    pub fn is_pencil(&self) -> bool {
        self.center.is_some()
    }
}

/// A slope critical at `to` that leaves the critical circle of `from`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CircleDrift {
    pub from: [f64; 2],
    pub to: [f64; 2],
    pub slope: Slope,
    /// `|form(from)(slope)| / ‖form‖`.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyEvidence {
    pub samples: usize,
    pub complex_samples: usize,
    pub skipped: usize,
    pub min_angle: f64,
    pub max_angle: f64,
    /// Largest distance between normalized critical circles of two samples.
    pub circle_variation: f64,
    /// Largest curvature margin over all sampled critical pairs.
    pub max_margin: f64,
    /// Samples where every critical slope is exceptional.
    pub flat_samples: usize,
    /// Leaf curves lying in a line without neighbouring leaves.
    pub isolated_leaves: usize,
    pub families: Vec<LeafFamily>,
    pub witness: Option<CriticalPair>,
    pub witness_margins: Option<[f64; 4]>,
    pub circle_drift: Option<CircleDrift>,
}

struct Sample {
    param: [f64; 2],
    angle: f64,
    circle: Option<SphereCircle>,
    max_margin: f64,
    leaves: Vec<(Slope, f64)>,
    isolated: usize,
}

/// Curvature margin along the critical circle, with the hyperplane normal
/// kept continuous so that sign changes mark exceptional slopes.
fn margin_at(j: &super::MapJet2<2>, circle: &SphereCircle, a: f64, reference: &R4) -> Option<(f64, R4, Slope)> {
    let l = circle.point_at(a)?;
    let (m, n) = signed_curvature_margin(j, &l);
    if linalg::dot(&n, reference) < 0.0 {
        Some((-m, linalg::scale(&n, -1.0), l))
    } else {
        Some((m, n, l))
    }
}

fn exceptional_slopes(j: &super::MapJet2<2>, circle: &SphereCircle) -> (Vec<Slope>, f64) {
    let mut vals = Vec::with_capacity(CIRCLE_SAMPLES + 1);
    let mut reference = [0.0; 4];
    for k in 0..=CIRCLE_SAMPLES {
        let a = TAU * k as f64 / CIRCLE_SAMPLES as f64;
        let Some((m, n, _)) = margin_at(j, circle, a, &reference) else { return (Vec::new(), 0.0) };
        reference = n;
        vals.push((a, m, n));
    }
    let max = vals.iter().map(|v| v.1.abs()).fold(0.0, f64::max);
    let mut roots = Vec::new();
    for w in vals.windows(2) {
        let ((a0, m0, n0), (a1, m1, _)) = (w[0], w[1]);
        if m0 == 0.0 {
            roots.push(a0);
        } else if m1 != 0.0 && m0.signum() != m1.signum() {
            let (mut lo, mut hi, mut mlo) = (a0, a1, m0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let Some((mm, _, _)) = margin_at(j, circle, mid, &n0) else { break };
                if mm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if mm.signum() == mlo.signum() {
                    lo = mid;
                    mlo = mm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }
    // zeros of even order show up as local minima of |m|
    let n = CIRCLE_SAMPLES;
    let step = TAU / n as f64;
    for k in 0..n {
        let (m0, m1, m2) = (vals[(k + n - 1) % n].1.abs(), vals[k].1.abs(), vals[k + 1].1.abs());
        if m1 <= m0 && m1 <= m2 && m1 < TOUCH {
            let f = |a| margin_at(j, circle, a, &vals[k].2).map_or(f64::INFINITY, |x| x.0.abs());
            let a = golden_min(f, vals[k].0 - step, vals[k].0 + step);
            if f(a) < ROOT {
                roots.push(a);
            }
        }
    }
    let mut out: Vec<Slope> = Vec::new();
    for a in roots {
        if let Some(l) = circle.point_at(a) {
            if !out.iter().any(|o| o.eq_proj(&l, 1e-6)) {
                out.push(l);
            }
        }
    }
    (out, max)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// How far the line of slope `l` through the moving point drifts when `p`
/// follows the critical direction field of `l`.
fn leaf_drift(s: &SurfacePatch, p: [f64; 2], l: &Slope) -> Result<f64> {
    let mu0 = phi(l, &s.point(&p)?);
    let field = |q: [f64; 2], prev: [f64; 2]| -> Result<[f64; 2]> {
        let j = s.jet1::<2>(q)?;
        let d = critical_direction(&j.jac[0], &j.jac[1], l);
        Ok(if d[0] * prev[0] + d[1] * prev[1] < 0.0 { [-d[0], -d[1]] } else { d })
    };
    let j0 = s.jet1::<2>(p)?;
    let d0 = critical_direction(&j0.jac[0], &j0.jac[1], l);
    let mut drift: f64 = 0.0;
    for sign in [1.0, -1.0] {
        let mut q = p;
        let mut dir = [sign * d0[0], sign * d0[1]];
        for _ in 0..LEAF_STEPS {
            let h = LEAF_STEP;
            let k1 = field(q, dir)?;
            let k2 = field([q[0] + 0.5 * h * k1[0], q[1] + 0.5 * h * k1[1]], k1)?;
            let k3 = field([q[0] + 0.5 * h * k2[0], q[1] + 0.5 * h * k2[1]], k2)?;
            let k4 = field([q[0] + h * k3[0], q[1] + h * k3[1]], k3)?;
            let next = [
                q[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                q[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            ];
            if !s.contains(&next) {
                break;
            }
            dir = k4;
            q = next;
            drift = drift.max((phi(l, &s.point(&q)?) - mu0).norm());
        }
    }
    Ok(drift)
}

fn line_through(z: &R4, l: &Slope) -> [Complex64; 3] {
    let (u, v) = l.homogeneous();
    let c = linalg::to_c2(z);
    let xi = [u * c[1] - v * c[0], v, -u];
    let n = xi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    xi.map(|a| a / n)
}

fn concurrency(lines: &[[Complex64; 3]]) -> (f64, Option<[Complex64; 3]>) {
    if lines.len() < 3 {
        return (0.0, None);
    }
    let m = DMatrix::from_fn(lines.len(), 3, |r, c| lines[r][c]);
    let svd = m.svd(false, true);
    let sv = &svd.singular_values;
    let mut order = [0usize, 1, 2];
    order.sort_by(|a, b| sv[*b].partial_cmp(&sv[*a]).unwrap());
    let ratio = sv[order[2]] / sv[order[0]];
    if ratio < CONCURRENT {
        let vt = svd.v_t.expect("requested");
        let k = order[2];
        let c = [vt[(k, 0)].conj(), vt[(k, 1)].conj(), vt[(k, 2)].conj()];
        (ratio, Some(c))
    } else {
        (ratio, None)
    }
}

/// Leaf test for a single exceptional slope: `Some(drift)` when the critical
/// curve of `l` stays in its line.
fn leaf(s: &SurfacePatch, p: [f64; 2], l: &Slope) -> Result<Option<f64>> {
    let d = leaf_drift(s, p, l)?;
    if d < LEAF_TOL {
        Ok(Some(d))
    } else if d < NON_LEAF {
        Err(Error::InconclusiveSampling(format!("leaf drift {d:.3e} at {p:?} between {LEAF_TOL:e} and {NON_LEAF:e}")))
    } else {
        Ok(None)
    }
}

/// Whether a leaf at `p` has neighbouring leaves with nearby slopes, as
/// opposed to being a single curve that happens to lie in a line.
fn foliates(s: &SurfacePatch, p: [f64; 2], l: &Slope, tol: &Tolerances) -> Result<bool> {
    let j = s.jet1::<2>(p)?;
    let d = critical_direction(&j.jac[0], &j.jac[1], l);
    let mut q = [p[0] - FOLIATION_STEP * d[1], p[1] + FOLIATION_STEP * d[0]];
    if !s.contains(&q) {
        q = [p[0] + FOLIATION_STEP * d[1], p[1] - FOLIATION_STEP * d[0]];
    }
    let Ok(jq) = s.jet2::<2>(q) else { return Ok(false) };
    let Ok(plane) = RealPlane2::from_frame(jq.jac[0], jq.jac[1]) else { return Ok(false) };
    if plane.is_complex(tol) {
        return Ok(false);
    }
    let (slopes, _) = exceptional_slopes(&jq, &plane.critical_circle());
    let Some(near) = slopes.into_iter().min_by(|a, b| a.distance(l).partial_cmp(&b.distance(l)).unwrap()) else {
        return Ok(false);
    };
    Ok(near.distance(l) < FOLIATION_SLOPE && leaf_drift(s, q, &near)? < LEAF_TOL)
}

fn examine(s: &SurfacePatch, p: [f64; 2], tol: &Tolerances) -> Result<Option<Sample>> {
    let j = match s.jet2::<2>(p) {
        Ok(j) => j,
        Err(_) => return Ok(None),
    };
    if s.immersed_jacobian(&p).is_err() {
        return Ok(None);
    }
    let Ok(plane) = RealPlane2::from_frame(j.jac[0], j.jac[1]) else { return Ok(None) };
    let t = plane.wirtinger_angle();
    let angle = t.min(std::f64::consts::PI - t);
    let mut smp = Sample { param: p, angle, circle: None, max_margin: 0.0, leaves: Vec::new(), isolated: 0 };
    if plane.is_complex(tol) {
        return Ok(Some(smp));
    }
    let circle = plane.critical_circle();
    let (slopes, max_margin) = exceptional_slopes(&j, &circle);
    smp.circle = Some(circle);
    smp.max_margin = max_margin;
    if max_margin >= tol.exc {
        for l in slopes {
            if let Some(d) = leaf(s, p, &l)? {
                if foliates(s, p, &l, tol)? {
                    smp.leaves.push((l, d));
                } else {
                    smp.isolated += 1;
                }
            }
        }
    }
    Ok(Some(smp))
}

/// Best assignment of `cur` to `prev` by total slope distance.
fn match_slopes(prev: &[Slope], cur: &[Slope]) -> Vec<usize> {
    fn permute(k: usize, used: &mut Vec<bool>, acc: &mut Vec<usize>, best: &mut (f64, Vec<usize>), cost: f64, prev: &[Slope], cur: &[Slope]) {
        if cost >= best.0 {
            return;
        }
        if k == prev.len() {
            *best = (cost, acc.clone());
            return;
        }
        for i in 0..cur.len() {
            if !used[i] {
                used[i] = true;
                acc.push(i);
                permute(k + 1, used, acc, best, cost + prev[k].distance(&cur[i]), prev, cur);
                acc.pop();
                used[i] = false;
            }
        }
    }
    let mut best = (f64::INFINITY, Vec::new());
    permute(0, &mut vec![false; cur.len()], &mut Vec::new(), &mut best, 0.0, prev, cur);
    best.1
}

fn group_families(s: &SurfacePatch, samples: &[&Sample]) -> Result<Vec<LeafFamily>> {
    let k = samples[0].leaves.len();
    if let Some(bad) = samples.iter().find(|x| x.leaves.len() != k) {
        return Err(Error::InconclusiveSampling(format!(
            "{} leaf slopes at {:?} but {k} at {:?}",
            bad.leaves.len(),
            bad.param,
            samples[0].param
        )));
    }
    let mut fams: Vec<LeafFamily> = (0..k)
        .map(|_| LeafFamily { params: Vec::new(), slopes: Vec::new(), lines: Vec::new(), concurrency: 0.0, center: None, max_drift: 0.0 })
        .collect();
    // slot[i][f]: index into samples[i].leaves belonging to family f
    let mut slots: Vec<Vec<usize>> = Vec::with_capacity(samples.len());
    for (i, smp) in samples.iter().enumerate() {
        let order = if i == 0 {
            (0..k).collect()
        } else {
            let near = (0..i)
                .min_by(|a, b| {
                    let da = s.param_distance(&samples[*a].param, &smp.param);
                    let db = s.param_distance(&samples[*b].param, &smp.param);
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            let prev: Vec<Slope> = slots[near].iter().map(|&x| samples[near].leaves[x].0).collect();
            let cur: Vec<Slope> = smp.leaves.iter().map(|x| x.0).collect();
            match_slopes(&prev, &cur)
        };
        for (f, &x) in order.iter().enumerate() {
            let (l, drift) = smp.leaves[x];
            let z = s.point(&smp.param)?;
            fams[f].params.push(smp.param);
            fams[f].slopes.push(l);
            fams[f].lines.push(line_through(&z, &l));
            fams[f].max_drift = fams[f].max_drift.max(drift);
        }
        slots.push(order);
    }
    for f in &mut fams {
        let (c, center) = concurrency(&f.lines);
        f.concurrency = c;
        f.center = center;
    }
    Ok(fams)
}

fn witness(s: &SurfacePatch, p: [f64; 2], tol: &Tolerances) -> Result<Option<(CriticalPair, [f64; 4])>> {
    let j = s.jet2::<2>(p)?;
    let circle = RealPlane2::from_frame(j.jac[0], j.jac[1])?.critical_circle();
    let mut best: Option<(f64, Slope)> = None;
    for k in 0..CIRCLE_SAMPLES {
        let Some(l) = circle.point_at(TAU * k as f64 / CIRCLE_SAMPLES as f64) else { continue };
        let m = signed_curvature_margin(&j, &l).0.abs();
        if best.map_or(true, |b| m > b.0) {
            best = Some((m, l));
        }
    }
    let Some((_, l)) = best else { return Ok(None) };
    let r = exceptional_tests(s, p, &l, tol)?;
    Ok((!r.pair.exceptional).then_some((r.pair, r.margins)))
}

fn circle_drift(s: &SurfacePatch, p: [f64; 2], tol: &Tolerances) -> Option<CircleDrift> {
    let c0 = super::tangent_plane(s, p).ok()?.critical_circle();
    let mut best: Option<CircleDrift> = None;
    for axis in 0..2 {
        let mut q = p;
        q[axis] += DRIFT_STEP;
        if !s.contains(&q) {
            q[axis] -= 2.0 * DRIFT_STEP;
        }
        let Ok(plane) = super::tangent_plane(s, q) else { continue };
        if plane.is_complex(tol) {
            continue;
        }
        for l in plane.critical_circle().sample(CIRCLE_SAMPLES) {
            let r = c0.value(&l).abs() / c0.spectral_norm();
            if best.map_or(true, |b| r > b.residual) {
                best = Some(CircleDrift { from: p, to: q, slope: l, residual: r });
            }
        }
    }
    best
}

/// Sorts a 2-patch into the cases of the structure theory of exceptional
/// surfaces by sampling an `n × n` parameter grid.
pub fn classify_exceptional_surface(
    s: &SurfacePatch,
    n: usize,
    tol: &Tolerances,
) -> Result<(Classification, ClassifyEvidence)> {
    if s.dim() != 2 {
        return Err(Error::InvalidInput(format!("classification needs a 2-patch, `{}` has {}", s.name(), s.dim())));
    }
    let grid: Vec<[f64; 2]> = s.grid(n.max(2)).into_iter().map(|p| [p[0], p[1]]).collect();
    let examined: Vec<Result<Option<Sample>>> = grid.par_iter().map(|p| examine(s, *p, tol)).collect();
    let mut all = Vec::new();
    let mut skipped = 0;
    for e in examined {
        match e? {
            Some(x) => all.push(x),
            None => skipped += 1,
        }
    }
    let complex_samples = all.iter().filter(|x| x.circle.is_none()).count();
    let min_angle = all.iter().map(|x| x.angle).fold(f64::INFINITY, f64::min);
    let max_angle = all.iter().map(|x| x.angle).fold(0.0, f64::max);
    let mut ev = ClassifyEvidence {
        samples: all.len(),
        complex_samples,
        skipped,
        min_angle,
        max_angle,
        circle_variation: 0.0,
        max_margin: 0.0,
        flat_samples: 0,
        isolated_leaves: 0,
        families: Vec::new(),
        witness: None,
        witness_margins: None,
        circle_drift: None,
    };
    if all.is_empty() {
        return Err(Error::InconclusiveSampling("no usable sample on the grid".into()));
    }
    if complex_samples == all.len() {
        return Ok((Classification::ComplexCurve, ev));
    }
    let real: Vec<&Sample> = all.iter().filter(|x| x.circle.is_some()).collect();
    if real.len() < 3 {
        return Err(Error::InconclusiveSampling(format!("only {} non-complex samples", real.len())));
    }
    let c0 = real[0].circle.unwrap();
    ev.circle_variation = real.iter().map(|x| x.circle.unwrap().residual(&c0)).fold(0.0, f64::max);
    ev.max_margin = real.iter().map(|x| x.max_margin).fold(0.0, f64::max);

    let centre = [
        0.5 * (s.domain()[0].0 + s.domain()[0].1),
        0.5 * (s.domain()[1].0 + s.domain()[1].1),
    ];
    let hub = real
        .iter()
        .min_by(|a, b| {
            s.param_distance(&a.param, &centre).partial_cmp(&s.param_distance(&b.param, &centre)).unwrap()
        })
        .unwrap()
        .param;
    ev.circle_drift = circle_drift(s, hub, tol);

    let flat = real.iter().all(|x| x.max_margin < tol.exc);
    if flat {
        if ev.circle_variation < CIRCLE_FIXED {
            return Ok((Classification::RealAffinePlane, ev));
        }
        return Err(Error::InconclusiveSampling(format!(
            "every critical pair is exceptional but the circle moves by {:.3e}",
            ev.circle_variation
        )));
    }
    // flat points, where every critical slope is exceptional, carry no leaf data
    let curved: Vec<&Sample> = real.iter().copied().filter(|x| x.max_margin >= tol.exc).collect();
    ev.flat_samples = real.len() - curved.len();
    ev.isolated_leaves = curved.iter().map(|x| x.isolated).sum();
    ev.families = group_families(s, &curved)?;
    if let Some((w, m)) = witness(s, hub, tol)? {
        ev.witness = Some(w);
        ev.witness_margins = Some(m);
    }
    let pencils = ev.families.iter().filter(|f| f.is_pencil()).count();
    let class = if pencils >= 2 {
        Classification::PencilProduct
    } else if !ev.families.is_empty() {
        Classification::LeviFlatFamily
    } else {
        Classification::Generic
    };
    Ok((class, ev))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classify(spec: &str) -> (Classification, ClassifyEvidence) {
        let s = SurfacePatch::resolve(spec).unwrap();
        classify_exceptional_surface(&s, 5, &Tolerances::default()).unwrap()
    }

    #[test]
    fn catalog_classes() {
        assert_eq!(classify("r2").0, Classification::RealAffinePlane);
        assert_eq!(classify("p2r-chart").0, Classification::RealAffinePlane);
        assert_eq!(classify("complex-line").0, Classification::ComplexCurve);
        assert_eq!(classify("complex-conic").0, Classification::ComplexCurve);
    }

    #[test]
    fn torus_has_three_pencils() {
        let (c, ev) = classify("clifford-torus");
        assert_eq!(c, Classification::PencilProduct);
        assert_eq!(ev.families.len(), 3);
        assert!(ev.families.iter().all(|f| f.is_pencil()));
        assert!(ev.witness.is_some());
    }

    #[test]
    fn generic_graph() {
        let s = SurfacePatch::parse("g", "params: s t\nx = s + i*t^2/2\ny = t + i*s^2/2").unwrap();
        let (c, ev) = classify_exceptional_surface(&s, 5, &Tolerances::default()).unwrap();
        assert_eq!(c, Classification::Generic);
        assert!(ev.families.is_empty());
        // the diagonal s = t lies in the line y = x but has no neighbouring leaves
        assert!(ev.isolated_leaves > 0);
        assert!(!ev.witness.unwrap().exceptional);
    }

    #[test]
    fn real_x_graphs_are_foliated_by_vertical_lines() {
        // x = s real: each curve s = const lies in the line x = s
        for f in ["paraboloid.surf", "fold.surf"] {
            let (c, ev) = classify(&format!("graph:{f}"));
            assert_eq!(c, Classification::LeviFlatFamily, "{f}");
            assert_eq!(ev.families.len(), 1);
            let centre = ev.families[0].center.unwrap();
            assert!(centre[0].norm() < 1e-8 && centre[1].norm() < 1e-8, "{centre:?}");
        }
    }

    #[test]
    fn bilinear_graph_has_two_pencils() {
        // y = t(1 + ix): lines x = s and the lines through (i, 0)
        let (c, ev) = classify("graph:exceptional.surf");
        assert_eq!(c, Classification::PencilProduct);
        assert_eq!(ev.families.len(), 2);
    }

    #[test]
    fn levi_flat_graph() {
        let (c, ev) = classify("graph:levi-flat.surf");
        assert_eq!(c, Classification::LeviFlatFamily);
        assert_eq!(ev.families.len(), 1);
        assert_eq!(ev.flat_samples, 1);
    }

    #[test]
    fn parabola_product_circle_moves() {
        let (c, ev) = classify("graph:parabola-product.surf");
        assert_eq!(c, Classification::PencilProduct);
        let w = ev.witness.unwrap();
        assert!(!w.exceptional);
        let d = ev.circle_drift.unwrap();
        assert!(d.residual > 1e-3);
        // the tangent slope 1 + 2εi at (0, ε) is off the real circle at 0
        let l = Slope::chart(Complex64::new(1.0, 2.0 * DRIFT_STEP));
        let c0 = super::super::tangent_plane(&SurfacePatch::resolve("graph:parabola-product.surf").unwrap(), [0.0, 0.0])
            .unwrap()
            .critical_circle();
        assert!(c0.value(&l).abs() > 1e-3);
    }
}
