//! Eigendecomposition of small dense complex matrices.
//!
//! Householder reduction to upper Hessenberg form followed by single-shift
//! complex QR with Wilkinson shifts. The Schur vectors are accumulated so the
//! eigenvectors can be recovered from the triangular factor by back
//! substitution.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{usage, Error, Result};

/// Largest dimension accepted by [`eigen_small`] unless the caller says otherwise.
pub const DEFAULT_MAX_DIM: usize = 8;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 120;

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: Complex64,
    /// Right eigenvector with unit Euclidean norm.
    pub vector: Vec<Complex64>,
}

/// Sum of the diagonal entries.
pub fn trace(a: &ComplexMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return usage(format!("trace needs a square matrix, got {}x{}", a.rows(), a.cols()));
    }
    Ok((0..a.rows()).map(|i| a[(i, i)]).sum())
}

/// Full eigendecomposition of a square matrix with at most `max_dim` rows.
pub fn eigen_small(a: &ComplexMatrix, max_dim: usize) -> Result<Vec<EigenPair>> {
    if !a.is_square() {
        return usage(format!(
            "eigen_small needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        ));
    }
    let n = a.rows();
    if n > max_dim {
        return usage(format!("eigen_small: dimension {n} exceeds max_dim {max_dim}"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let (t, z) = schur(a)?;
    let norm = t.norm().max(f64::MIN_POSITIVE);
    let tiny = 1e-13 * norm;

    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let num: Complex64 = (i + 1..=k).map(|j| t[(i, j)] * y[j]).sum();
            let mut den = t[(i, i)] - lambda;
            if den.norm() < tiny {
                if num.norm() < tiny {
                    // Repeated eigenvalue with no coupling: keep the vectors independent.
                    y[i] = Complex64::new(0.0, 0.0);
                    continue;
                }
                den = Complex64::new(tiny, 0.0);
            }
            y[i] = -num / den;
        }
        let mut v = z.mul_vec(&y);
        let vn = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|c| *c /= vn);
        pairs.push(EigenPair {
            value: lambda,
            vector: v,
        });
    }
    Ok(pairs)
}

/// Eigenvector matrix (columns) and eigenvalues, in the order returned by
/// [`eigen_small`].
pub fn eigen_matrix(pairs: &[EigenPair]) -> (ComplexMatrix, Vec<Complex64>) {
    let n = pairs.len();
    let v = ComplexMatrix::from_fn(n, n, |i, j| pairs[j].vector[i]);
    (v, pairs.iter().map(|p| p.value).collect())
}

/// Complex Schur form `A = Z T Z*`; returns `(T, Z)`.
fn schur(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = a.rows();
    let mut h = a.clone();
    let mut z = ComplexMatrix::identity(n);
    hessenberg(&mut h, &mut z);

    let anorm = h.norm();
    if anorm == 0.0 {
        return Ok((h, z));
    }
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut sweeps = 0;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let mut s = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if s == 0.0 {
                s = anorm;
            }
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            sweeps = 0;
            continue;
        }
        sweeps += 1;
        if sweeps > MAX_SWEEPS_PER_EIGENVALUE {
            return Err(Error::NonConvergence("complex QR iteration"));
        }
        let shift = if sweeps % 10 == 0 {
            h[(hi, hi)] + Complex64::new(1.5 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_sweep(&mut h, &mut z, lo, hi, shift);
    }
    Ok((h, z))
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    let l1 = half_tr + root;
    let l2 = half_tr - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Unitary `G = [[c, s], [-conj(s), c]]` with real `c` such that
/// `G [x; y] = [r; 0]`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let nrm = ax.hypot(ay);
    let phase = x / ax;
    (ax / nrm, phase * y.conj() / nrm)
}

fn rotate_rows(h: &mut ComplexMatrix, k: usize, c: f64, s: Complex64, cols: std::ops::Range<usize>) {
    for j in cols {
        let h1 = h[(k, j)];
        let h2 = h[(k + 1, j)];
        h[(k, j)] = h1 * c + s * h2;
        h[(k + 1, j)] = -s.conj() * h1 + h2 * c;
    }
}

fn rotate_cols(h: &mut ComplexMatrix, k: usize, c: f64, s: Complex64, rows: std::ops::Range<usize>) {
    for i in rows {
        let h1 = h[(i, k)];
        let h2 = h[(i, k + 1)];
        h[(i, k)] = h1 * c + h2 * s.conj();
        h[(i, k + 1)] = -h1 * s + h2 * c;
    }
}

/// One implicit single-shift QR sweep on the active block `lo..=hi`.
fn qr_sweep(h: &mut ComplexMatrix, z: &mut ComplexMatrix, lo: usize, hi: usize, shift: Complex64) {
    let n = h.rows();
    let mut x = h[(lo, lo)] - shift;
    let mut y = h[(lo + 1, lo)];
    for k in lo..hi {
        let (c, s) = givens(x, y);
        rotate_rows(h, k, c, s, k.saturating_sub(1).max(lo)..n);
        if k > lo {
            h[(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
        }
        rotate_cols(h, k, c, s, 0..(k + 3).min(hi + 1));
        rotate_cols(z, k, c, s, 0..n);
        if k + 1 < hi {
            x = h[(k + 1, k)];
            y = h[(k + 2, k)];
        }
    }
}

fn hessenberg(h: &mut ComplexMatrix, z: &mut ComplexMatrix) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let m = n - k - 1;
        let x: Vec<Complex64> = (0..m).map(|i| h[(k + 1 + i, k)]).collect();
        let xnorm = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|c| *c /= vnorm);

        // H <- (I - 2vv*) H
        for j in 0..n {
            let s: Complex64 = (0..m).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..m {
                h[(k + 1 + i, j)] -= v[i] * s * 2.0;
            }
        }
        // H <- H (I - 2vv*), Z <- Z (I - 2vv*)
        for mat in [&mut *h, &mut *z] {
            for i in 0..n {
                let s: Complex64 = (0..m).map(|j| mat[(i, k + 1 + j)] * v[j]).sum();
                for j in 0..m {
                    mat[(i, k + 1 + j)] -= s * v[j].conj() * 2.0;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return usage("expm needs a square matrix");
    }
    let n = a.rows();
    let norm = a.norm_one();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(Complex64::new(0.5f64.powi(squarings), 0.0));
    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=30 {
        term = term.matmul(&scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
        result = &result + &term;
        if term.norm_one() <= f64::EPSILON * result.norm_one() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    Ok(result)
}
