//! Brute-force reference evaluators used to validate the Nyström pipeline.
//!
//! None of these share code with the LU path: minors are expanded by
//! cofactors, and the Fredholm series is summed over explicit multi-indices.

use num_complex::Complex64;

use crate::assembly::DetOrder;
use crate::error::{usage, Error, Result};
use crate::kernels::Kernel;
use crate::linalg::ComplexMatrix;
use crate::quadrature::uniform_grid;

/// Largest matrix dimension `kM` accepted by [`von_koch_det`].
pub const MAX_VON_KOCH_DIM: usize = 12;

/// Largest order accepted by [`fredholm_series`].
pub const MAX_SERIES_ORDER: usize = 3;

/// Multi-index tuples above this count are refused by [`fredholm_series`].
const MAX_SERIES_TUPLES: usize = 50_000_000;

const FULL_SERIES_REL_TOL: f64 = 1e-17;
const FULL_SERIES_MAX_TERMS: usize = 1000;

/// How many terms of a determinant series to sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOrder {
    /// Orders `0..=n`.
    Upto(usize),
    /// The whole series: exact for `p = 1` (it terminates at `n = kM`), summed to
    /// convergence for `p = 2`.
    Full,
}

/// Determinant of the submatrix of `a` on rows and columns `idx`, by cofactor
/// expansion over column bitmasks.
fn principal_minor(a: &ComplexMatrix, idx: &[usize]) -> Complex64 {
    let s = idx.len();
    let mut f = vec![Complex64::new(0.0, 0.0); 1 << s];
    f[0] = Complex64::new(1.0, 0.0);
    for mask in 1usize..(1 << s) {
        // Row `r` of the submatrix, expanded against the columns in `mask`.
        let r = idx[mask.count_ones() as usize - 1];
        let mut acc = Complex64::new(0.0, 0.0);
        let mut sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        for (c, &col) in idx.iter().enumerate() {
            if mask & (1 << c) != 0 {
                acc += sign * a[(r, col)] * f[mask ^ (1 << c)];
                sign = -sign;
            }
        }
        f[mask] = acc;
    }
    f[(1 << s) - 1]
}

/// `e_s = Σ_{|S| = s} det A[S, S]` for `s = 0..=n`.
fn principal_minor_sums(a: &ComplexMatrix) -> Vec<Complex64> {
    let n = a.rows();
    let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut idx = Vec::with_capacity(n);
    for set in 0usize..(1 << n) {
        idx.clear();
        idx.extend((0..n).filter(|&i| set & (1 << i) != 0));
        e[idx.len()] += principal_minor(a, &idx);
    }
    e
}

/// The von Koch series of `det(I + zK)` (`p = 1`) or `e^{-z Tr K} det(I + zK)` (`p = 2`)
/// for a matrix of `k x k` blocks.
///
/// The order-`n` term is `zⁿ/n! Σ det(K[i_α, i_β] (1 - (p-1) δ_αβ))` over all
/// `n`-tuples of indices. For `p = 1` only tuples of distinct indices
/// contribute, giving `zⁿ e_n` with `e_n` the sum of `n x n` principal minors.
/// For `p = 2` expanding the determinant along the zeroed diagonal gives
/// `zⁿ Σ_s e_s (-Tr K)^{n-s} / (n-s)!`.
pub fn von_koch_det(
    kmat: &ComplexMatrix,
    k: usize,
    z: Complex64,
    order: DetOrder,
    terms: SeriesOrder,
) -> Result<Complex64> {
    let n = kmat.rows();
    if !kmat.is_square() || k == 0 || !n.is_multiple_of(k) {
        return usage(format!(
            "expected a square matrix of {k}x{k} blocks, got {}x{}",
            n,
            kmat.cols()
        ));
    }
    if n > MAX_VON_KOCH_DIM {
        return usage(format!("von Koch series limited to kM <= {MAX_VON_KOCH_DIM}, got {n}"));
    }
    // e_s z^s
    let mut ez = principal_minor_sums(kmat);
    let mut zp = Complex64::new(1.0, 0.0);
    for v in ez.iter_mut() {
        *v *= zp;
        zp *= z;
    }
    match order {
        DetOrder::One => {
            let top = match terms {
                SeriesOrder::Full => n,
                SeriesOrder::Upto(m) if m <= n => m,
                SeriesOrder::Upto(m) => return usage(format!("n_max = {m} exceeds kM = {n}")),
            };
            Ok(ez[..=top].iter().sum())
        }
        DetOrder::Two => {
            let tr: Complex64 = (0..n).map(|i| kmat[(i, i)]).sum();
            let w = -z * tr;
            // q_j = w^j / j!
            let mut q = vec![Complex64::new(1.0, 0.0)];
            let mut total = Complex64::new(0.0, 0.0);
            let limit = match terms {
                SeriesOrder::Upto(m) => m,
                SeriesOrder::Full => FULL_SERIES_MAX_TERMS,
            };
            for m in 0..=limit {
                if m > 0 {
                    let next = q[m - 1] * w / m as f64;
                    q.push(next);
                }
                let term: Complex64 = (0..=m.min(n)).map(|s| ez[s] * q[m - s]).sum();
                total += term;
                if terms == SeriesOrder::Full && m > n && term.norm() <= FULL_SERIES_REL_TOL * total.norm() {
                    return Ok(total);
                }
            }
            match terms {
                SeriesOrder::Upto(_) => Ok(total),
                SeriesOrder::Full => Err(Error::NonConvergence("det2 von Koch series")),
            }
        }
    }
}

fn det_small(m: &[Complex64], n: usize) -> Complex64 {
    match n {
        0 => Complex64::new(1.0, 0.0),
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => unreachable!("det_small handles n <= 3"),
    }
}

/// Partial sum of the Fredholm series of `det₁(I + zK)` or `det₂(I + zK)` on `[a, b]`,
/// up to order `n_max <= 3`.
///
/// Each `n`-fold integral `∫ det[K(x_α, x_β)_{j_α j_β} (1 - (p-1) δ_αβ)] dx` is
/// evaluated with the tensor-product composite Simpson rule on `panels` panels
/// per axis, summing over every multi-index `(j, m)` explicitly.
pub fn fredholm_series<K: Kernel + ?Sized>(
    kernel: &K,
    a: f64,
    b: f64,
    z: Complex64,
    order: DetOrder,
    n_max: usize,
    panels: usize,
) -> Result<Complex64> {
    if n_max > MAX_SERIES_ORDER {
        return usage(format!(
            "fredholm_series supports n_max <= {MAX_SERIES_ORDER}, got {n_max}"
        ));
    }
    let grid = uniform_grid(a, b, panels)?;
    let k = kernel.block_dim();
    let nodes = grid.nodes();
    let dim = k * nodes.len();
    if dim.checked_pow(n_max as u32).is_none_or(|t| t > MAX_SERIES_TUPLES) {
        return usage(format!("{dim}^{n_max} multi-indices is too many for the series oracle"));
    }

    // Unweighted kernel values and per-index weights over the flattened (m, j) index.
    let mut g = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut blk = vec![Complex64::new(0.0, 0.0); k * k];
    for (ma, &x) in nodes.iter().enumerate() {
        for (mb, &y) in nodes.iter().enumerate() {
            kernel.eval_into(x, y, &mut blk);
            for i in 0..k {
                for j in 0..k {
                    g[(ma * k + i) * dim + mb * k + j] = blk[i * k + j];
                }
            }
        }
    }
    let w: Vec<f64> = (0..dim).map(|i| grid.weights()[i / k]).collect();
    let keep_diag = order == DetOrder::One;

    let mut total = Complex64::new(1.0, 0.0);
    let mut zn = Complex64::new(1.0, 0.0);
    let mut fact = 1.0;
    for n in 1..=n_max {
        zn *= z;
        fact *= n as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut tuple = vec![0usize; n];
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        loop {
            let weight: f64 = tuple.iter().map(|&i| w[i]).product();
            for (r, &ir) in tuple.iter().enumerate() {
                for (c, &ic) in tuple.iter().enumerate() {
                    m[r * n + c] = if r == c && !keep_diag {
                        Complex64::new(0.0, 0.0)
                    } else {
                        g[ir * dim + ic]
                    };
                }
            }
            sum += weight * det_small(&m, n);
            // Lexicographic successor.
            let mut pos = n;
            while pos > 0 {
                pos -= 1;
                tuple[pos] += 1;
                if tuple[pos] < dim {
                    break;
                }
                tuple[pos] = 0;
            }
            if tuple.iter().all(|&i| i == 0) {
                break;
            }
        }
        total += zn / fact * sum;
    }
    Ok(total)
}

/// Closed-form Evans function of the NLS `sech` soliton,
/// `E(λ) = 16 λ⁴ / ((1 + μ)⁴ (1 + ν)⁴)` with `μ = √(1 - 2iλ)`, `ν = √(1 + 2iλ)`.
pub fn evans(lambda: Complex64) -> Complex64 {
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let mu = (one - 2.0 * i * lambda).sqrt();
    let nu = (one + 2.0 * i * lambda).sqrt();
    16.0 * lambda.powi(4) / ((one + mu).powi(4) * (one + nu).powi(4))
}
