//! Small fixed-size helpers on ℝ⁴ ≅ ℂ² shared by every module.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

pub type R4 = [f64; 4];
pub type C2 = [Complex64; 2];

pub fn dot(a: &R4, b: &R4) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

pub fn norm(a: &R4) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: &R4, c: f64) -> R4 {
    [a[0] * c, a[1] * c, a[2] * c, a[3] * c]
}

pub fn add(a: &R4, b: &R4) -> R4 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

pub fn sub(a: &R4, b: &R4) -> R4 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

/// `a + c b`
pub fn axpy(a: &R4, c: f64, b: &R4) -> R4 {
    [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2], a[3] + c * b[3]]
}

pub fn normalize(a: &R4) -> R4 {
    scale(a, 1.0 / norm(a))
}

/// Multiplication by `i` on ℂ².
pub fn j(a: &R4) -> R4 {
    [-a[1], a[0], -a[3], a[2]]
}

pub fn to_c2(a: &R4) -> C2 {
    [Complex64::new(a[0], a[1]), Complex64::new(a[2], a[3])]
}

pub fn from_c2(z: &C2) -> R4 {
    [z[0].re, z[0].im, z[1].re, z[1].im]
}

/// Determinant of the matrix with columns `a, b, c, d`.
pub fn det4(a: &R4, b: &R4, c: &R4, d: &R4) -> f64 {
    Matrix4::from_columns(&[(*a).into(), (*b).into(), (*c).into(), (*d).into()]).determinant()
}

/// Singular values, largest first, of a `rows × cols` row-major matrix.
pub fn singular_values(rows: usize, cols: usize, data: &[f64]) -> Vec<f64> {
    let m = DMatrix::from_row_slice(rows, cols, data);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Numerical rank with a threshold relative to the largest singular value.
pub fn rank(rows: usize, cols: usize, data: &[f64], rel: f64) -> usize {
    let s = singular_values(rows, cols, data);
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel * top).count()
}

/// Orthonormal basis of the orthogonal complement of `vs` in ℝ⁴.
pub fn complement(vs: &[R4]) -> Vec<R4> {
    let mut basis: Vec<R4> = Vec::new();
    for v in vs {
        if let Some(u) = reduce(v, &basis) {
            basis.push(u);
        }
    }
    let k = basis.len();
    for e in 0..4 {
        let mut v = [0.0; 4];
        v[e] = 1.0;
        if let Some(u) = reduce(&v, &basis) {
            basis.push(u);
        }
    }
    basis.split_off(k)
}

/// Gram-Schmidt step; `None` if `v` is (numerically) in the span.
fn reduce(v: &R4, basis: &[R4]) -> Option<R4> {
    let mut w = *v;
    for _ in 0..2 {
        for b in basis {
            w = axpy(&w, -dot(&w, b), b);
        }
    }
    let n = norm(&w);
    if n < 1e-9 * norm(v).max(1e-300) {
        None
    } else {
        Some(scale(&w, 1.0 / n))
    }
}

/// Solves a small dense system by LU, `None` when singular.
pub fn solve(n: usize, a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let m = DMatrix::from_row_slice(n, n, a);
    let rhs = nalgebra::DVector::from_row_slice(b);
    m.lu().solve(&rhs).map(|x| x.iter().copied().collect())
}

/// Chordal distance between the points of ℙ² spanned by unit vectors
/// `a`, `b`: the norm of `a ∧ b`, accurate down to rounding even for
/// nearby points.
pub fn chordal3(a: &[Complex64; 3], b: &[Complex64; 3]) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in i + 1..3 {
            s += (a[i] * b[j] - a[j] * b[i]).norm_sqr();
        }
    }
    s.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal_and_orthogonal() {
        let a = [1.0, 2.0, 0.5, -1.0];
        let b = [0.0, 1.0, 3.0, 1.0];
        let c = complement(&[a, b]);
        assert_eq!(c.len(), 2);
        for u in &c {
            assert!(dot(u, &a).abs() < 1e-12 && dot(u, &b).abs() < 1e-12);
            assert!((norm(u) - 1.0).abs() < 1e-12);
        }
        assert!(dot(&c[0], &c[1]).abs() < 1e-12);
    }

    #[test]
    fn j_squares_to_minus_one() {
        let a = [0.3, -1.0, 2.0, 0.7];
        assert_eq!(j(&j(&a)), scale(&a, -1.0));
        let z = to_c2(&a);
        let iz = [z[0] * Complex64::i(), z[1] * Complex64::i()];
        assert_eq!(from_c2(&iz), j(&a));
    }
}
