//! A-priori error bounds for truncated, discretised Fredholm determinants.
//!
//! The constants involved grow astronomically (the majorant `Φ` is entire but
//! its terms peak near `n ≈ e z²`), so every bound is carried as a natural
//! logarithm and only converted to an `f64` on request.

use std::f64::consts::{E, PI};
use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{usage, Result};
use crate::kernels::{Decay, Kernel};

/// Multiplier applied to finite-difference derivative norms to cover sampling error.
pub const KNORM_SAFETY: f64 = 1.25;

/// Values above this are reported in log form.
pub const LOG_FORM_THRESHOLD: f64 = 1e300;

const SERIES_REL_TOL: f64 = 1e-16;

/// A nonnegative real stored as its natural logarithm (`-inf` for zero).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Magnitude {
    ln: f64,
}

impl Magnitude {
    pub const ZERO: Magnitude = Magnitude { ln: f64::NEG_INFINITY };
    pub const ONE: Magnitude = Magnitude { ln: 0.0 };

    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan(), "log magnitude is NaN");
        Self { ln }
    }

    pub fn from_value(v: f64) -> Self {
        assert!(v >= 0.0, "magnitude must be nonnegative, got {v}");
        Self { ln: v.ln() }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    /// The plain value; `+inf` once it exceeds the `f64` range.
    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    /// Whether the value is too large to be reported as a plain number.
    pub fn is_log_form(self) -> bool {
        self.ln > LOG_FORM_THRESHOLD.ln()
    }
}

impl Mul for Magnitude {
    type Output = Magnitude;

    fn mul(self, other: Magnitude) -> Magnitude {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self { ln: self.ln + other.ln }
    }
}

impl Add for Magnitude {
    type Output = Magnitude;

    fn add(self, other: Magnitude) -> Magnitude {
        let (hi, lo) = if self.ln >= other.ln {
            (self, other)
        } else {
            (other, self)
        };
        if lo.is_zero() {
            return hi;
        }
        Self {
            ln: hi.ln + (lo.ln - hi.ln).exp().ln_1p(),
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_log_form() {
            write!(f, "exp({:.17e})", self.ln)
        } else {
            write!(f, "{:.16e}", self.value())
        }
    }
}

fn check_nonnegative(name: &str, z: f64) -> Result<()> {
    if z.is_finite() && z >= 0.0 {
        Ok(())
    } else {
        usage(format!("{name} needs a finite argument >= 0, got {z}"))
    }
}

/// `ln` of the `n`-th term `n^{(n+2)/2} zⁿ / n!` of the `Φ` series.
fn phi_log_term(n: u64, ln_z: f64) -> f64 {
    let nf = n as f64;
    0.5 * (nf + 2.0) * nf.ln() - libm::lgamma(nf + 1.0) + nf * ln_z
}

/// `Φ(z) = Σ_{n≥1} n^{(n+2)/2} zⁿ / n!`.
///
/// Terms are summed in log space past their peak until they drop below
/// `1e-16` of the partial sum. If the peak term exceeds `1e300` the closed-form
/// majorant `z Ψ(z √2 e)` is returned instead.
pub fn phi(z: f64) -> Result<Magnitude> {
    check_nonnegative("phi", z)?;
    if z == 0.0 {
        return Ok(Magnitude::ZERO);
    }
    let ln_z = z.ln();
    let cutoff = LOG_FORM_THRESHOLD.ln();
    let mut sum = Magnitude::ZERO;
    let mut prev = f64::NEG_INFINITY;
    for n in 1u64.. {
        let t = phi_log_term(n, ln_z);
        if t > cutoff {
            return phi_majorant(z);
        }
        sum = sum + Magnitude::from_ln(t);
        let decreasing = t < prev;
        if decreasing && t - sum.ln < SERIES_REL_TOL.ln() {
            break;
        }
        prev = t;
    }
    Ok(sum)
}

/// `z Ψ(z √2 e)`, an upper bound for `Φ(z)`.
pub fn phi_majorant(z: f64) -> Result<Magnitude> {
    check_nonnegative("phi_majorant", z)?;
    Ok(Magnitude::from_value(z) * psi(z * 2f64.sqrt() * E)?)
}

/// `Ψ(z) = 1 + (√π/2) z e^{z²/4} [1 + erf(z/2)]`.
pub fn psi(z: f64) -> Result<Magnitude> {
    check_nonnegative("psi", z)?;
    if z == 0.0 {
        return Ok(Magnitude::ONE);
    }
    let ln_rest = (0.5 * PI.sqrt() * z).ln() + 0.25 * z * z + (1.0 + libm::erf(0.5 * z)).ln();
    Ok(Magnitude::ONE + Magnitude::from_ln(ln_rest))
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        usage(format!("{name} must be positive and finite, got {v}"))
    }
}

/// Error from replacing `ℝ` by `[-L, L]`: `e^{-aL} Φ(2Ck|z|/a)`.
pub fn truncation_bound(c: f64, a: f64, k: usize, z: Complex64, l: f64) -> Result<Magnitude> {
    check_positive("C", c)?;
    check_positive("a", a)?;
    check_positive("L", l)?;
    let arg = 2.0 * c * k as f64 * z.norm() / a;
    Ok(Magnitude::from_ln(-a * l) * phi(arg)?)
}

/// `c_r = 2 (πe/4)^r / √(2πr)`.
pub fn c_r(r: u32) -> f64 {
    2.0 * (PI * E / 4.0).powi(r as i32) / (2.0 * PI * r as f64).sqrt()
}

/// Error of composite Simpson discretisation:
/// `(c_r / 2^r) Φ(2k(b-a)‖K‖_r |z|) Δx_max^r`.
pub fn quadrature_bound(
    r: u32,
    k: usize,
    interval_len: f64,
    knorm_r: f64,
    z: Complex64,
    dx_max: f64,
) -> Result<Magnitude> {
    if !(1..=4).contains(&r) {
        return usage(format!("r must be in 1..=4, got {r}"));
    }
    check_positive("interval length", interval_len)?;
    check_positive("dx_max", dx_max)?;
    check_nonnegative("knorm_r", knorm_r)?;
    let arg = 2.0 * k as f64 * interval_len * knorm_r * z.norm();
    let coef = Magnitude::from_value(c_r(r) / 2f64.powi(r as i32));
    let step = Magnitude::from_ln(r as f64 * dx_max.ln());
    Ok(coef * phi(arg)? * step)
}

fn binomial(n: u32, m: u32) -> f64 {
    (0..m).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Central difference stencil for the `i`-th derivative: offsets (in units of `h`) and coefficients.
fn stencil(i: u32) -> Vec<(f64, f64)> {
    (0..=i)
        .map(|m| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            (0.5 * i as f64 - m as f64, sign * binomial(i, m))
        })
        .collect()
}

/// Estimate of `‖K‖_r = max_{i+j≤r} sup |∂ₓⁱ ∂ᵧʲ K_pq|` on `[a, b]²`.
///
/// Central finite differences with step `h = 1e-4 (b - a)` on a
/// `samples x samples` lattice whose `y` coordinates are shifted by `h/3`, so
/// no stencil is centred on the diagonal. The maximum is multiplied by
/// [`KNORM_SAFETY`].
pub fn knorm_r_estimate<K: Kernel + ?Sized>(kernel: &K, a: f64, b: f64, r: u32, samples: usize) -> Result<f64> {
    if !(1..=4).contains(&r) {
        return usage(format!("r must be in 1..=4, got {r}"));
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return usage(format!("need a finite interval a < b, got [{a}, {b}]"));
    }
    if samples == 0 {
        return usage("samples must be positive");
    }
    let h = 1e-4 * (b - a);
    let k = kernel.block_dim();
    let mut blk = vec![Complex64::new(0.0, 0.0); k * k];
    let mut acc = vec![Complex64::new(0.0, 0.0); k * k];
    let mut best = 0.0f64;
    let step = (b - a) / samples as f64;
    for ix in 0..samples {
        let x = a + (ix as f64 + 0.5) * step;
        for iy in 0..samples {
            let y = a + (iy as f64 + 0.5) * step + h / 3.0;
            for i in 0..=r {
                for j in 0..=(r - i) {
                    acc.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
                    for (dx, cx) in stencil(i) {
                        for (dy, cy) in stencil(j) {
                            kernel.eval_into(x + dx * h, y + dy * h, &mut blk);
                            for (s, v) in acc.iter_mut().zip(&blk) {
                                *s += v * (cx * cy);
                            }
                        }
                    }
                    let scale = h.powi((i + j) as i32);
                    let m = acc.iter().fold(0.0f64, |m, v| m.max(v.norm() / scale));
                    best = best.max(m);
                }
            }
        }
    }
    Ok(KNORM_SAFETY * best)
}

/// Inputs to [`bound_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub decay: Decay,
    pub k: usize,
    pub z: Complex64,
    pub l: f64,
    pub dx_max: f64,
    pub r: u32,
    pub knorm_r: f64,
}

/// Truncation and quadrature bounds for the determinant on `[-L, L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub inputs: BoundInputs,
    pub truncation: Magnitude,
    pub quadrature: Magnitude,
    pub total: Magnitude,
}

pub fn bound_report(inputs: BoundInputs) -> Result<BoundReport> {
    let BoundInputs {
        decay,
        k,
        z,
        l,
        dx_max,
        r,
        knorm_r,
    } = inputs;
    let truncation = truncation_bound(decay.c, decay.a, k, z, l)?;
    let quadrature = quadrature_bound(r, k, 2.0 * l, knorm_r, z, dx_max)?;
    Ok(BoundReport {
        inputs,
        truncation,
        quadrature,
        total: truncation + quadrature,
    })
}
