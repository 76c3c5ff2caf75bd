use crate::jets::{Cx, Scalar};
use crate::{Error, Result};
use std::f64::consts::{PI, TAU};

/// Built-in surfaces, evaluated natively in homogeneous coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Catalog {
    /// `(s, t) ↦ (s, t)`, the real plane, on `[-1, 1]²`.
    R2,
    /// `(s, t) ↦ (s + it, 0)` on `[-1, 1]²`.
    ComplexLine,
    /// The conic `y = x²` as a sphere:
    /// `[cos²(s/2) : cos(s/2) sin(s/2) e^{it} : sin²(s/2) e^{2it}]`.
    ComplexConic,
    /// `(s, t) ↦ (e^{is}, e^{it})`, product of two unit circles.
    CliffordTorus,
    /// ℙ²(ℝ) covered twice by the sphere `[cos s : sin s cos t : sin s sin t]`.
    P2rChart,
}

impl Catalog {
    pub const ALL: [Catalog; 5] =
        [Catalog::R2, Catalog::ComplexLine, Catalog::ComplexConic, Catalog::CliffordTorus, Catalog::P2rChart];

    pub fn name(self) -> &'static str {
        match self {
            Catalog::R2 => "r2",
            Catalog::ComplexLine => "complex-line",
            Catalog::ComplexConic => "complex-conic",
            Catalog::CliffordTorus => "clifford-torus",
            Catalog::P2rChart => "p2r-chart",
        }
    }

    pub fn from_name(s: &str) -> Option<Catalog> {
        Catalog::ALL.into_iter().find(|c| c.name() == s)
    }

    /// Parameter box, periodic flags and declared compactness.
    pub(crate) fn layout(self) -> (Vec<(f64, f64)>, Vec<bool>, bool) {
        match self {
            Catalog::R2 | Catalog::ComplexLine => (vec![(-1.0, 1.0); 2], vec![false; 2], false),
            Catalog::ComplexConic | Catalog::P2rChart => (vec![(0.0, PI), (0.0, TAU)], vec![false, true], true),
            Catalog::CliffordTorus => (vec![(0.0, TAU); 2], vec![true; 2], true),
        }
    }

    pub(crate) fn eval<T: Scalar>(self, p: &[T]) -> Result<[Cx<T>; 3]> {
        if p.len() != 2 {
            return Err(Error::InvalidInput(format!("catalog surfaces take 2 parameters, got {}", p.len())));
        }
        let (s, t) = (p[0], p[1]);
        let one = Cx::cst(1.0, 0.0);
        Ok(match self {
            Catalog::R2 => [one, Cx::real(s), Cx::real(t)],
            Catalog::ComplexLine => [one, Cx::new(s, t), Cx::cst(0.0, 0.0)],
            Catalog::ComplexConic => {
                let h = s.scale(0.5);
                let (c, sn) = (h.cos(), h.sin());
                let e1 = Cx::new(t.cos(), t.sin());
                let t2 = t.scale(2.0);
                let e2 = Cx::new(t2.cos(), t2.sin());
                [Cx::real(c * c), e1.scale(c * sn), e2.scale(sn * sn)]
            }
            Catalog::CliffordTorus => [one, Cx::new(s.cos(), s.sin()), Cx::new(t.cos(), t.sin())],
            Catalog::P2rChart => [Cx::real(s.cos()), Cx::real(s.sin() * t.cos()), Cx::real(s.sin() * t.sin())],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::SurfacePatch;

    #[test]
    fn conic_satisfies_its_equation() {
        let c = SurfacePatch::from_catalog(Catalog::ComplexConic);
        for p in c.grid(5) {
            let [x, y] = c.eval_affine(&p).unwrap();
            let x2 = x * x;
            assert!((x2.re - y.re).abs() < 1e-10 && (x2.im - y.im).abs() < 1e-10);
        }
    }

    #[test]
    fn torus_on_unit_circles() {
        let c = SurfacePatch::from_catalog(Catalog::CliffordTorus);
        for p in c.grid(4) {
            let [x, y] = c.eval_affine(&p).unwrap();
            assert!((x.norm_sqr() - 1.0).abs() < 1e-14 && (y.norm_sqr() - 1.0).abs() < 1e-14);
        }
    }
}
