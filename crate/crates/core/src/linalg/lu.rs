//! LU factorization with partial pivoting and log-space determinants.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::ComplexMatrix;
use crate::error::{usage, Result};

/// Panel width of the blocked factorization.
const BLOCK: usize = 48;

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Whether `exp(log_modulus)` fits in an `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Normal,
    Overflow,
    Underflow,
    /// The determinant is exactly zero.
    Zero,
}

/// Determinant in polar log form: `exp(log_modulus) * exp(i * phase)`.
///
/// A zero determinant has `log_modulus = -inf` and `phase = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub log_modulus: f64,
    /// Argument in `(-π, π]`.
    pub phase: f64,
}

impl LogDet {
    pub const ONE: LogDet = LogDet {
        log_modulus: 0.0,
        phase: 0.0,
    };

    pub const ZERO: LogDet = LogDet {
        log_modulus: f64::NEG_INFINITY,
        phase: 0.0,
    };

    pub fn from_complex(z: Complex64) -> Self {
        if z == Complex64::new(0.0, 0.0) {
            Self::ZERO
        } else {
            Self {
                log_modulus: z.norm().ln(),
                phase: wrap_phase(z.arg()),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_modulus == f64::NEG_INFINITY
    }

    pub fn scale(&self) -> Scale {
        if self.is_zero() {
            Scale::Zero
        } else if self.log_modulus > f64::MAX.ln() {
            Scale::Overflow
        } else if self.log_modulus < f64::MIN_POSITIVE.ln() {
            Scale::Underflow
        } else {
            Scale::Normal
        }
    }

    /// The determinant as a complex number; saturates to infinity or zero
    /// outside the representable range (see [`LogDet::scale`]).
    pub fn value(&self) -> Complex64 {
        match self.scale() {
            Scale::Zero => Complex64::new(0.0, 0.0),
            _ => Complex64::from_polar(self.log_modulus.exp(), self.phase),
        }
    }

    pub fn modulus(&self) -> f64 {
        self.log_modulus.exp()
    }

    /// Returns `self * exp(c)`, computed in log space.
    pub fn times_exp(self, c: Complex64) -> Self {
        if self.is_zero() {
            return self;
        }
        Self {
            log_modulus: self.log_modulus + c.re,
            phase: wrap_phase(self.phase + c.im),
        }
    }

    pub fn times(self, other: LogDet) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self {
            log_modulus: self.log_modulus + other.log_modulus,
            phase: wrap_phase(self.phase + other.phase),
        }
    }
}

/// Determinant of a square matrix via partial-pivoted LU.
///
/// The pivots are never multiplied together: the log-moduli and the
/// arguments are accumulated separately, with `π` added per row swap.
pub fn lu_logdet(a: &ComplexMatrix) -> Result<LogDet> {
    if !a.is_square() {
        return usage(format!(
            "lu_logdet needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        ));
    }
    let n = a.rows();
    let mut data = a.as_slice().to_vec();
    Ok(logdet_in_place(&mut data, n))
}

/// Same as [`lu_logdet`] but factors `data` (row-major, `n x n`) in place.
pub fn logdet_in_place(data: &mut [Complex64], n: usize) -> LogDet {
    assert_eq!(data.len(), n * n);
    let mut log_modulus = 0.0;
    let mut phase = 0.0;

    let mut k0 = 0;
    while k0 < n {
        let end = (k0 + BLOCK).min(n);

        // Factor the panel columns k0..end over all remaining rows.
        for k in k0..end {
            let mut p = k;
            let mut best = 0.0;
            for i in k..n {
                let v = data[i * n + k].norm_sqr();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return LogDet::ZERO;
            }
            if p != k {
                let (top, bot) = data.split_at_mut(p * n);
                top[k * n..(k + 1) * n].swap_with_slice(&mut bot[..n]);
                phase += PI;
            }
            let pivot = data[k * n + k];
            log_modulus += pivot.norm().ln();
            phase = wrap_phase(phase + pivot.arg());

            let inv = pivot.inv();
            let (top, bot) = data.split_at_mut((k + 1) * n);
            let pivot_row = &top[k * n + k + 1..k * n + end];
            for row in bot.chunks_mut(n) {
                let l = row[k] * inv;
                row[k] = l;
                if l != Complex64::new(0.0, 0.0) {
                    for (x, &u) in row[k + 1..end].iter_mut().zip(pivot_row) {
                        *x -= l * u;
                    }
                }
            }
        }
        if end == n {
            break;
        }

        // U12 <- L11^{-1} A12 for the rows of the panel.
        for i in k0 + 1..end {
            let (top, bot) = data.split_at_mut(i * n);
            let row_i = &mut bot[..n];
            for k in k0..i {
                let l = row_i[k];
                if l == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row_k = &top[k * n + end..(k + 1) * n];
                for (x, &u) in row_i[end..].iter_mut().zip(row_k) {
                    *x -= l * u;
                }
            }
        }

        // A22 <- A22 - L21 U12, rows in parallel.
        let (top, bot) = data.split_at_mut(end * n);
        let u12: Vec<&[Complex64]> = (k0..end).map(|k| &top[k * n + end..(k + 1) * n]).collect();
        bot.par_chunks_mut(n).for_each(|row| {
            let (left, right) = row.split_at_mut(end);
            rank_update(right, &left[k0..end], &u12);
        });

        k0 = end;
    }

    LogDet {
        log_modulus,
        phase: wrap_phase(phase),
    }
}

/// `row -= Σ_p l[p] * u[p]`, four updates per sweep over `row`.
#[inline]
fn rank_update(row: &mut [Complex64], l: &[Complex64], u: &[&[Complex64]]) {
    let mut p = 0;
    while p + 4 <= l.len() {
        let (l0, l1, l2, l3) = (l[p], l[p + 1], l[p + 2], l[p + 3]);
        let (u0, u1, u2, u3) = (u[p], u[p + 1], u[p + 2], u[p + 3]);
        for j in 0..row.len() {
            row[j] -= l0 * u0[j] + l1 * u1[j] + l2 * u2[j] + l3 * u3[j];
        }
        p += 4;
    }
    while p < l.len() {
        let (lp, up) = (l[p], u[p]);
        for (x, &y) in row.iter_mut().zip(up.iter()) {
            *x -= lp * y;
        }
        p += 1;
    }
}

/// Dense LU factors of a small matrix, used for solves and inverses.
#[derive(Debug, Clone)]
pub struct SmallLu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl SmallLu {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return usage("LU of a non-square matrix");
        }
        let n = a.rows();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| lu[i * n + k].norm().total_cmp(&lu[j * n + k].norm()))
                .unwrap_or(k);
            if lu[p * n + k].norm() <= f64::EPSILON * scale * 1e-3 || scale == 0.0 {
                return usage("matrix is singular to working precision");
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let inv = lu[k * n + k].inv();
            for i in k + 1..n {
                let l = lu[i * n + k] * inv;
                lu[i * n + k] = l;
                for j in k + 1..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= l * u;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[i * n + k];
                let xk = x[k];
                x[i] -= l * xk;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[i * n + k];
                let xk = x[k];
                x[i] -= u * xk;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    pub fn inverse(&self) -> ComplexMatrix {
        let n = self.n;
        let mut inv = ComplexMatrix::zeros(n, n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        inv
    }
}

/// Inverse of a small, well-conditioned matrix.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(SmallLu::new(a)?.inverse())
}
