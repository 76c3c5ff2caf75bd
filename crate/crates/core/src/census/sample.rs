use super::{count_intersections, LineQuery, Resolution};
use crate::duality::DualPoint;
use crate::surfaces::{classify_exceptional_surface, Classification, SurfacePatch};
use crate::{Error, Result, Tolerances};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

pub const CENSUS_SCHEMA: &str = "crdual.census.v1";
/// Neighbours examined per sample when joining regions.
const NEIGHBOURS: usize = 6;
/// Grid of the cross-check against the classification.
const CLASSIFY_GRID: usize = 8;

/// Radical inverse of `i` in base `b`.
fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// Halton points in bases 2, 3, 5, 7 with a seeded Cranley–Patterson
/// rotation, mapped to lines distributed by the Fubini–Study volume: the
/// squared moduli of `ξ` are uniform on the simplex and the phases are
/// uniform.
fn sample_lines(seed: u64, n: usize) -> Vec<DualPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: [f64; 4] = std::array::from_fn(|_| rng.gen::<f64>());
    (0..n)
        .map(|i| {
            let u: [f64; 4] =
                std::array::from_fn(|k| (radical_inverse(i as u64 + 1, [2, 3, 5, 7][k]) + shift[k]).fract());
            let r = u[0].sqrt();
            let w = [1.0 - r, r * (1.0 - u[1]), r * u[1]];
            DualPoint::new([
                Complex64::new(w[0].sqrt(), 0.0),
                Complex64::from_polar(w[1].sqrt(), TAU * u[2]),
                Complex64::from_polar(w[2].sqrt(), TAU * u[3]),
            ])
            .expect("weights sum to one")
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct LineRecord {
    pub line: DualPoint,
    /// `None` for wall samples.
    pub count: Option<usize>,
    /// Proximity estimate that excluded a wall sample.
    pub wall_distance: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Region {
    pub count: usize,
    pub size: usize,
    /// Index of the first sample of the region.
    pub representative: usize,
    pub line: DualPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CensusCase {
    /// One count everywhere off the wall.
    Constant,
    /// At least two counts: the line family crosses the dual hypersurface.
    Varying,
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub schema: String,
    pub surface: String,
    pub seed: u64,
    pub resolution: Resolution,
    pub lines: Vec<LineRecord>,
    pub accepted: usize,
    pub wall_samples: Vec<usize>,
    pub histogram: BTreeMap<usize, usize>,
    pub regions: Vec<Region>,
    pub case: CensusCase,
    /// All counts have the same parity.
    pub parity_constant: bool,
    pub classification: String,
    /// Constant counts go with complex curves and compactified real planes,
    /// varying counts with everything else.
    pub consistent: bool,
}

impl CensusReport {
    pub fn counts(&self) -> Vec<usize> {
        self.histogram.keys().copied().collect()
    }

    /// Number of accepted samples with the given count.
    pub fn share(&self, count: usize) -> f64 {
        *self.histogram.get(&count).unwrap_or(&0) as f64 / self.accepted.max(1) as f64
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut j = i;
        while self.0[j] != r {
            let next = self.0[j];
            self.0[j] = r;
            j = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins, keeping representatives independent of order
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Midpoint of the shorter Fubini–Study arc between two lines.
fn midpoint(a: &DualPoint, b: &DualPoint) -> Result<DualPoint> {
    let ip: Complex64 = (0..3).map(|k| b.xi[k].conj() * a.xi[k]).sum();
    let phase = if ip.norm() > 0.0 { ip / ip.norm() } else { Complex64::new(1.0, 0.0) };
    DualPoint::new(std::array::from_fn(|k| a.xi[k] + b.xi[k] * phase))
}

/// Counts intersections with `n` quasi-random lines and clusters the lines
/// of equal count into regions. Two samples are joined when one is among the
/// other's nearest neighbours and the midpoint of their arc has the same
/// count and is not itself a wall sample.
pub fn census(s: &SurfacePatch, seed: u64, n: usize, res: &Resolution, tol: &Tolerances) -> Result<CensusReport> {
    if !s.is_compact() {
        return Err(Error::InvalidInput(format!("`{}` is not declared compact", s.name())));
    }
    if n == 0 {
        return Err(Error::InvalidInput("census needs at least one line".into()));
    }
    res.validate()?;
    let lines = sample_lines(seed, n);
    let query = |line: DualPoint| LineQuery { line, surface: s.name().to_string(), resolution: *res };
    let outcomes: Vec<Result<LineRecord>> = lines
        .par_iter()
        .map(|&line| match count_intersections(s, &query(line), tol) {
            Ok(r) => Ok(LineRecord { line, count: Some(r.count), wall_distance: None }),
            Err(Error::WallProximity { distance }) => Ok(LineRecord { line, count: None, wall_distance: Some(distance) }),
            Err(e) => Err(e),
        })
        .collect();
    let records: Vec<LineRecord> = outcomes.into_iter().collect::<Result<_>>()?;
    let accepted_idx: Vec<usize> = (0..n).filter(|&i| records[i].count.is_some()).collect();
    let wall_samples: Vec<usize> = (0..n).filter(|&i| records[i].count.is_none()).collect();
    let mut histogram = BTreeMap::new();
    for &i in &accepted_idx {
        *histogram.entry(records[i].count.unwrap()).or_insert(0) += 1;
    }

    // candidate edges between equal counts among nearest neighbours
    let candidates: Vec<(usize, usize)> = accepted_idx
        .par_iter()
        .flat_map_iter(|&i| {
            let mut near: Vec<(f64, usize)> = accepted_idx
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| (records[i].line.distance(&records[j].line), j))
                .collect();
            near.sort_by(|a, b| a.partial_cmp(b).unwrap());
            near.truncate(NEIGHBOURS);
            near.into_iter()
                .filter(|&(_, j)| records[j].count == records[i].count && i < j)
                .map(move |(_, j)| (i, j))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut candidates = candidates;
    candidates.sort();
    candidates.dedup();
    let joined: Vec<Result<bool>> = candidates
        .par_iter()
        .map(|&(i, j)| {
            let m = midpoint(&records[i].line, &records[j].line)?;
            match count_intersections(s, &query(m), tol) {
                Ok(r) => Ok(Some(r.count) == records[i].count),
                Err(Error::WallProximity { .. }) => Ok(false),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut uf = UnionFind((0..n).collect());
    for (&(i, j), ok) in candidates.iter().zip(joined) {
        if ok? {
            uf.union(i, j);
        }
    }
    let mut by_root: BTreeMap<usize, Region> = BTreeMap::new();
    for &i in &accepted_idx {
        let r = uf.find(i);
        by_root
            .entry(r)
            .or_insert(Region { count: records[i].count.unwrap(), size: 0, representative: r, line: records[r].line })
            .size += 1;
    }
    let regions: Vec<Region> = by_root.into_values().collect();

    let case = if histogram.len() >= 2 { CensusCase::Varying } else { CensusCase::Constant };
    let parity_constant = histogram.keys().map(|c| c % 2).collect::<std::collections::BTreeSet<_>>().len() <= 1;
    let (class, _) = classify_exceptional_surface(s, CLASSIFY_GRID, tol)?;
    let flat = matches!(class, Classification::ComplexCurve | Classification::RealAffinePlane);
    let consistent = match case {
        CensusCase::Constant => flat || histogram.is_empty(),
        CensusCase::Varying => !flat,
    };
    Ok(CensusReport {
        schema: CENSUS_SCHEMA.to_string(),
        surface: s.name().to_string(),
        seed,
        resolution: *res,
        accepted: accepted_idx.len(),
        lines: records,
        wall_samples,
        histogram,
        regions,
        case,
        parity_constant,
        classification: class.name().to_string(),
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::Catalog;

    #[test]
    fn halton_prefix() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - 7.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn sampler_is_seeded() {
        let a = sample_lines(3, 50);
        assert_eq!(a, sample_lines(3, 50));
        assert_ne!(a, sample_lines(4, 50));
        for l in &a {
            let n: f64 = l.xi.iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn midpoint_is_equidistant() {
        let a = DualPoint::from_chart(Complex64::new(0.2, 1.0), Complex64::new(-1.0, 0.3));
        let b = DualPoint::new([Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0), Complex64::new(0.5, -0.5)]).unwrap();
        let m = midpoint(&a, &b).unwrap();
        assert!((m.distance(&a) - m.distance(&b)).abs() < 1e-12);
        assert!(m.distance(&a) < a.distance(&b));
    }

    #[test]
    fn small_torus_census() {
        let t = SurfacePatch::from_catalog(Catalog::CliffordTorus);
        let r = census(&t, 11, 120, &Resolution::default(), &Tolerances::default()).unwrap();
        assert_eq!(r.counts(), vec![0, 2]);
        assert_eq!(r.case, CensusCase::Varying);
        assert!(r.parity_constant && r.consistent, "{}", r.classification);
        assert_eq!(r.regions.iter().map(|g| g.size).sum::<usize>(), r.accepted);
    }

    #[test]
    fn open_patches_are_refused() {
        let s = SurfacePatch::from_catalog(Catalog::R2);
        assert!(matches!(census(&s, 1, 10, &Resolution::default(), &Tolerances::default()), Err(Error::InvalidInput(_))));
    }
}
