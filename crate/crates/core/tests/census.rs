use crdual::census::{census, count_intersections, torus_oracle, LineQuery, Resolution};
use crdual::duality::DualPoint;
use crdual::surfaces::{Catalog, SurfacePatch};
use crdual::{Error, Tolerances};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Distance of `(λ, μ)` to the tangency set of the circle–circle problem,
/// scaled like the normalized residual of the counter.
fn oracle_wall_distance(l: Complex64, mu: Complex64) -> f64 {
    let (r, d) = (l.norm(), mu.norm());
    let gap = (d - (r - 1.0).abs()).abs().min((r + 1.0 - d).abs());
    gap / (1.0 + r * r + d * d).sqrt()
}

#[test]
fn torus_matches_the_circle_oracle() {
    let t = SurfacePatch::from_catalog(Catalog::CliffordTorus);
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut compared, mut walls) = (0, 0);
    for _ in 0..10_000 {
        let l = Complex64::from_polar(rng.gen_range(0.0..3.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let mu = Complex64::from_polar(rng.gen_range(0.0..4.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let got = count_intersections(&t, &LineQuery::new(&t, DualPoint::from_chart(l, mu)), &tol);
        let far = oracle_wall_distance(l, mu) > 1e-2;
        match got {
            Ok(r) => {
                assert_eq!(Some(r.count), torus_oracle(l, mu), "λ={l} μ={mu}");
                compared += 1;
            }
            Err(Error::WallProximity { .. }) => {
                assert!(!far, "λ={l} μ={mu} flagged far from the wall");
                walls += 1;
            }
            Err(e) => panic!("{e}"),
        }
    }
    assert!(compared > 9_000, "{compared} compared, {walls} walls");
}

#[test]
fn census_is_deterministic() {
    let t = SurfacePatch::from_catalog(Catalog::CliffordTorus);
    let res = Resolution::default();
    let tol = Tolerances::default();
    let a = serde_json::to_string(&census(&t, 5, 200, &res, &tol).unwrap()).unwrap();
    let b = serde_json::to_string(&census(&t, 5, 200, &res, &tol).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn constant_counts() {
    let tol = Tolerances::default();
    let res = Resolution::default();
    let p = census(&SurfacePatch::from_catalog(Catalog::P2rChart), 3, 300, &res, &tol).unwrap();
    assert_eq!(p.counts(), vec![1]);
    assert!(p.consistent, "{}", p.classification);
    let c = census(&SurfacePatch::from_catalog(Catalog::ComplexConic), 3, 300, &res, &tol).unwrap();
    assert_eq!(c.counts(), vec![2]);
    assert!(c.consistent, "{}", c.classification);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Along a segment of lines the torus count changes by two at a time.
    #[test]
    fn counts_jump_by_two(a in 0.1f64..2.5, b in 0.0f64..std::f64::consts::TAU, c in 0.1f64..3.5, d in 0.0f64..std::f64::consts::TAU, e in 0.1f64..3.5) {
        let t = SurfacePatch::from_catalog(Catalog::CliffordTorus);
        let tol = Tolerances::default();
        let l = Complex64::from_polar(a, b);
        let mut last: Option<usize> = None;
        for k in 0..=20 {
            let r = c + (e - c) * k as f64 / 20.0;
            let mu = Complex64::from_polar(r, d);
            match count_intersections(&t, &LineQuery::new(&t, DualPoint::from_chart(l, mu)), &tol) {
                Ok(n) => {
                    prop_assert_eq!(n.count % 2, 0);
                    if let Some(m) = last {
                        prop_assert!(m.abs_diff(n.count) == 0 || m.abs_diff(n.count) == 2);
                    }
                    last = Some(n.count);
                }
                Err(Error::WallProximity { .. }) => {}
                Err(err) => return Err(TestCaseError::fail(err.to_string())),
            }
        }
    }

    /// Roots returned by the counter lie on the line and are distinct.
    #[test]
    fn roots_are_incident(l1 in -2.0f64..2.0, l2 in -2.0f64..2.0, m1 in -2.0f64..2.0, m2 in -2.0f64..2.0) {
        let s = SurfacePatch::from_catalog(Catalog::ComplexConic);
        let line = DualPoint::from_chart(Complex64::new(l1, l2), Complex64::new(m1, m2));
        if let Ok(r) = count_intersections(&s, &LineQuery::new(&s, line), &Tolerances::default()) {
            prop_assert_eq!(r.count, 2);
            for root in &r.roots {
                let f: Complex64 = (0..3).map(|k| line.xi[k] * root.point[k]).sum();
                prop_assert!(f.norm() < 1e-10);
            }
        }
    }
}
