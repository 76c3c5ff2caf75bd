use crdual::contact::{lift, semi_legendrian_defect};
use crdual::duality::{dual_variety, pi_project, DualPoint};
use crdual::linalg;
use crdual::planes::{unitary_from_uniforms, RealPlane2, Slope};
use crdual::surfaces::SurfacePatch;
use crdual::Tolerances;
use num_complex::Complex64;
use proptest::prelude::*;

fn frame() -> impl Strategy<Value = ([f64; 4], [f64; 4])> {
    (prop::array::uniform4(-1.0f64..1.0), prop::array::uniform4(-1.0f64..1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// The critical circle is equivariant under U(2).
    #[test]
    fn circle_is_unitarily_equivariant((a, b) in frame(), r in prop::array::uniform4(0.0f64..1.0)) {
        let Ok(p) = RealPlane2::from_frame(a, b) else { return Ok(()) };
        let u = unitary_from_uniforms(r);
        let moved = p.critical_circle().transform(&u);
        prop_assert!(moved.residual(&p.transform(&u).critical_circle()) < 1e-9);
        prop_assert!((p.wirtinger_angle() - p.transform(&u).wirtinger_angle()).abs() < 1e-9);
    }

    /// Slopes on the circle are exactly the non-transverse ones.
    #[test]
    fn circle_points_are_non_transverse((a, b) in frame(), phi in 0.0f64..std::f64::consts::TAU) {
        let Ok(p) = RealPlane2::from_frame(a, b) else { return Ok(()) };
        if let Some(s) = p.critical_circle().point_at(phi) {
            let (t1, t2) = p.frame();
            let (w, jw) = s.generators();
            prop_assert!(linalg::det4(&t1, &t2, &w, &jw).abs() < 1e-12);
        }
    }

    /// Reversing the orientation maps θ to π − θ.
    #[test]
    fn flip_reflects_the_angle((a, b) in frame()) {
        let Ok(p) = RealPlane2::from_frame(a, b) else { return Ok(()) };
        prop_assert!((p.wirtinger_angle() + p.flipped().wirtinger_angle() - std::f64::consts::PI).abs() < 1e-12);
    }

    /// The line π(z, λ) passes through z and has slope λ.
    #[test]
    fn projection_is_incident(x in prop::array::uniform4(-3.0f64..3.0), l1 in -3.0f64..3.0, l2 in -3.0f64..3.0) {
        let z = linalg::to_c2(&x);
        let l = Complex64::new(l1, l2);
        let w = crdual::contact::ContactElement::new(z, Slope::chart(l));
        let d = pi_project(&w);
        prop_assert!(d.incidence(&z) < 1e-12);
        let (lam, _) = d.chart().unwrap();
        prop_assert!((lam - l).norm() < 1e-9 * (1.0 + l.norm()));
        let again = DualPoint::new(d.xi.map(|c| c * Complex64::from_polar(2.5, 0.7))).unwrap();
        prop_assert!(again.distance(&d) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Lifts of random quadratic graphs are semi-legendrian and their dual
    /// points are incident with the base points.
    #[test]
    fn random_graph_lifts(c in prop::array::uniform6(-1.0f64..1.0)) {
        let text = format!(
            "params: s t\ndomain: [-0.5, 0.5] x [-0.5, 0.5]\nx = s + ({:.4})*t^2\ny = t + ({:.4} + {:.4}*i)*s^2 + ({:.4} + {:.4}*i)*s*t + ({:.4})*i*t^2",
            c[0], c[1], c[2], c[3], c[4], c[5]
        );
        let s = SurfacePatch::parse("g", &text).unwrap();
        let tol = Tolerances::default();
        let m = lift(&s, 3, 6, &tol).unwrap();
        for smp in &m.samples {
            prop_assert!(semi_legendrian_defect(&smp.element, &smp.frame).unwrap() < 1e-9);
        }
        let d = dual_variety(&s, 3, 6, &tol).unwrap();
        prop_assert!(d.max_incidence() < 1e-12);
    }
}
