use super::SurfacePatch;
use crate::jets::{Jet1, Scalar};
use crate::linalg::R4;
use crate::planes::{RealPlane2, Slope};
use crate::Result;

/// Determinant of the 4×4 matrix with rows `m[0..4]`, in any scalar type.
pub(crate) fn det4_generic<T: Scalar>(m: &[[T; 4]; 4]) -> T {
    let s0 = m[0][0] * m[1][1] - m[1][0] * m[0][1];
    let s1 = m[0][0] * m[1][2] - m[1][0] * m[0][2];
    let s2 = m[0][0] * m[1][3] - m[1][0] * m[0][3];
    let s3 = m[0][1] * m[1][2] - m[1][1] * m[0][2];
    let s4 = m[0][1] * m[1][3] - m[1][1] * m[0][3];
    let s5 = m[0][2] * m[1][3] - m[1][2] * m[0][3];
    let c5 = m[2][2] * m[3][3] - m[3][2] * m[2][3];
    let c4 = m[2][1] * m[3][3] - m[3][1] * m[2][3];
    let c3 = m[2][1] * m[3][2] - m[3][1] * m[2][2];
    let c2 = m[2][0] * m[3][3] - m[3][0] * m[2][3];
    let c1 = m[2][0] * m[3][2] - m[3][0] * m[2][2];
    let c0 = m[2][0] * m[3][1] - m[3][0] * m[2][1];
    s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0
}

/// Normalized E-value `det[u_s, u_t, w, Jw] / (|u_s| |u_t| |w| |Jw|)` from
/// tangent vectors in any scalar type; `w` is a unit generator of the line.
pub(crate) fn e_value<T: Scalar>(us: [T; 4], ut: [T; 4], s: &Slope) -> T {
    let (w, jw) = s.generators();
    let m = [us, ut, w.map(T::cst), jw.map(T::cst)];
    let n = |v: &[T; 4]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]).sqrt();
    det4_generic(&m) / (n(&us) * n(&ut))
}

/// Oriented tangent plane of a 2-patch, orientation from the parameter order.
pub fn tangent_plane(s: &SurfacePatch, p: [f64; 2]) -> Result<RealPlane2> {
    let (_, cols) = s.immersed_jacobian(&p)?;
    RealPlane2::from_frame(cols[0], cols[1])
}

/// `E(p, λ)`: its zero set in the parameter plane is the critical curve `C_λ`.
/// Sign follows the direct basis `(∂x1, ∂x2, ∂y1, ∂y2)`.
pub fn e_function(s: &SurfacePatch, p: [f64; 2], l: &Slope) -> Result<f64> {
    let (_, cols) = s.immersed_jacobian(&p)?;
    Ok(e_value(cols[0], cols[1], l))
}

/// `E` and its exact parameter gradient, from the 2-jet.
pub fn e_gradient(s: &SurfacePatch, p: [f64; 2], l: &Slope) -> Result<(f64, [f64; 2])> {
    s.immersed_jacobian(&p)?;
    let j = s.jet2::<2>(p)?;
    let lift = |k: usize| -> [Jet1<2>; 4] {
        let mut out = [Jet1::constant(0.0); 4];
        for r in 0..4 {
            out[r] = Jet1::new(j.jac[k][r], [j.hess[k][0][r], j.hess[k][1][r]]);
        }
        out
    };
    let e = e_value(lift(0), lift(1), l);
    Ok((e.v, e.g))
}

/// Tangent vectors at `p` as plain arrays.
pub(crate) fn frame(s: &SurfacePatch, p: [f64; 2]) -> Result<(R4, R4)> {
    let (_, cols) = s.immersed_jacobian(&p)?;
    Ok((cols[0], cols[1]))
}
