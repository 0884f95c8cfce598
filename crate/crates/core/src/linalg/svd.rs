use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{usage, Result};

/// Singular values below this fraction of the largest are treated as zero.
pub const SINGULAR_CUTOFF: f64 = 1e-14;

/// `M = U diag(sigma) V*` for a 2x2 matrix.
#[derive(Debug, Clone)]
pub struct Svd2 {
    pub u: ComplexMatrix,
    /// `sigma[0] >= sigma[1] >= 0`.
    pub sigma: [f64; 2],
    pub v: ComplexMatrix,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Unit vector orthogonal to the unit vector `(a, b)`.
fn complement(a: Complex64, b: Complex64) -> [Complex64; 2] {
    [-b.conj(), a.conj()]
}

fn columns(c0: [Complex64; 2], c1: [Complex64; 2]) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[[c0[0], c1[0]], [c0[1], c1[1]]])
}

/// Leading eigenvector of the Hermitian matrix `[[a, b], [conj(b), d]]`.
fn hermitian_top_vector(a: f64, b: Complex64, d: f64) -> [Complex64; 2] {
    let half_gap = 0.5 * (a - d);
    let lambda = 0.5 * (a + d) + half_gap.hypot(b.norm());
    // Two candidate null vectors of (H - lambda I); take the better scaled one.
    let c1 = [b, Complex64::new(lambda - a, 0.0)];
    let c2 = [Complex64::new(lambda - d, 0.0), b.conj()];
    let n1 = c1[0].norm().hypot(c1[1].norm());
    let n2 = c2[0].norm().hypot(c2[1].norm());
    let (v, n) = if n1 >= n2 { (c1, n1) } else { (c2, n2) };
    if n == 0.0 {
        [Complex64::new(1.0, 0.0), zero()]
    } else {
        [v[0] / n, v[1] / n]
    }
}

/// Singular value decomposition of a 2x2 complex matrix.
///
/// `v1` is the top eigenvector of `M*M`, `u1 = M v1 / |M v1|`; the second
/// singular vectors are the orthogonal complements, with the phase of `u2`
/// chosen so that `sigma[1] = u2* M v2` is real and nonnegative.
pub fn svd_2x2(m: &ComplexMatrix) -> Result<Svd2> {
    if m.rows() != 2 || m.cols() != 2 {
        return usage(format!("svd_2x2 needs a 2x2 matrix, got {}x{}", m.rows(), m.cols()));
    }
    if m.max_abs() == 0.0 {
        return Ok(Svd2 {
            u: ComplexMatrix::identity(2),
            sigma: [0.0, 0.0],
            v: ComplexMatrix::identity(2),
        });
    }
    let mtm = m.adjoint().matmul(m);
    let v1 = hermitian_top_vector(mtm[(0, 0)].re, mtm[(0, 1)], mtm[(1, 1)].re);
    let mv1 = m.mul_vec(&v1);
    let s1 = mv1[0].norm().hypot(mv1[1].norm());
    let u1 = [mv1[0] / s1, mv1[1] / s1];
    let v2 = complement(v1[0], v1[1]);
    let mut u2 = complement(u1[0], u1[1]);
    let mv2 = m.mul_vec(&v2);
    let proj = u2[0].conj() * mv2[0] + u2[1].conj() * mv2[1];
    let s2 = proj.norm();
    if s2 > 0.0 {
        let phase = proj / s2;
        u2 = [u2[0] * phase, u2[1] * phase];
    }
    Ok(Svd2 {
        u: columns(u1, u2),
        sigma: [s1, s2],
        v: columns(v1, v2),
    })
}

impl Svd2 {
    /// `U diag(f(sigma)) V*`-style products: returns `left diag(d) right*`.
    pub(crate) fn compose(left: &ComplexMatrix, d: [f64; 2], right: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_fn(2, 2, |i, j| {
            left[(i, 0)] * d[0] * right[(j, 0)].conj() + left[(i, 1)] * d[1] * right[(j, 1)].conj()
        })
    }

    /// Square roots of the singular values, with the cutoff applied.
    pub(crate) fn sqrt_sigma(&self) -> [f64; 2] {
        let cut = SINGULAR_CUTOFF * self.sigma[0];
        let f = |s: f64| if s < cut || s == 0.0 { 0.0 } else { s.sqrt() };
        [f(self.sigma[0]), f(self.sigma[1])]
    }
}
