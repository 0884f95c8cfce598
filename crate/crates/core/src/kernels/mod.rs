//! Matrix-valued kernels `K(x, y) ∈ C^{k×k}`.

mod birman_schwinger;
mod sech;

pub use birman_schwinger::{
    a_infinity, bs_kernel_eval, m_matrix, polar_factors, stable_projector, BirmanSchwingerKernel, BsSystem,
    PolarFactors, DEFAULT_GAP_TOL,
};
pub use sech::SechNlsKernel;

use num_complex::Complex64;

use crate::linalg::ComplexMatrix;

/// Entrywise exponential decay certificate `|K_ij(x, y)| <= c * exp(-a(|x| + |y|))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decay {
    pub c: f64,
    pub a: f64,
}

impl Decay {
    pub fn envelope(&self, x: f64, y: f64) -> f64 {
        self.c * (-self.a * (x.abs() + y.abs())).exp()
    }
}

/// A kernel evaluable at any pair of real points.
///
/// Implementations must be pure: assembly evaluates them concurrently.
pub trait Kernel: Sync {
    fn block_dim(&self) -> usize;

    /// Writes `K(x, y)` row-major into `out` (length `block_dim²`).
    fn eval_into(&self, x: f64, y: f64, out: &mut [Complex64]);

    fn eval(&self, x: f64, y: f64) -> ComplexMatrix {
        let k = self.block_dim();
        let mut out = vec![Complex64::new(0.0, 0.0); k * k];
        self.eval_into(x, y, &mut out);
        ComplexMatrix::from_fn(k, k, |i, j| out[i * k + j])
    }

    fn decay(&self) -> Option<Decay> {
        None
    }
}

impl<K: Kernel + ?Sized> Kernel for &K {
    fn block_dim(&self) -> usize {
        (**self).block_dim()
    }

    fn eval_into(&self, x: f64, y: f64, out: &mut [Complex64]) {
        (**self).eval_into(x, y, out)
    }

    fn decay(&self) -> Option<Decay> {
        (**self).decay()
    }
}

/// Kernel backed by a closure returning the `k x k` block.
pub struct FnKernel<F> {
    dim: usize,
    f: F,
    decay: Option<Decay>,
}

impl<F> FnKernel<F>
where
    F: Fn(f64, f64) -> ComplexMatrix + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f, decay: None }
    }

    pub fn with_decay(mut self, decay: Decay) -> Self {
        self.decay = Some(decay);
        self
    }
}

impl<F> Kernel for FnKernel<F>
where
    F: Fn(f64, f64) -> ComplexMatrix + Sync,
{
    fn block_dim(&self) -> usize {
        self.dim
    }

    fn eval_into(&self, x: f64, y: f64, out: &mut [Complex64]) {
        let m = (self.f)(x, y);
        debug_assert_eq!((m.rows(), m.cols()), (self.dim, self.dim));
        out.copy_from_slice(m.as_slice());
    }

    fn eval(&self, x: f64, y: f64) -> ComplexMatrix {
        (self.f)(x, y)
    }

    fn decay(&self) -> Option<Decay> {
        self.decay
    }
}

/// Scalar (`k = 1`) kernel from a closure.
pub struct ScalarKernel<F>(pub F);

impl<F> Kernel for ScalarKernel<F>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    fn block_dim(&self) -> usize {
        1
    }

    fn eval_into(&self, x: f64, y: f64, out: &mut [Complex64]) {
        out[0] = (self.0)(x, y);
    }
}

/// Embeds a kernel in larger blocks, padding with `extra` zero rows and columns.
pub struct ZeroPadded<K> {
    pub inner: K,
    pub extra: usize,
}

impl<K: Kernel> Kernel for ZeroPadded<K> {
    fn block_dim(&self) -> usize {
        self.inner.block_dim() + self.extra
    }

    fn eval_into(&self, x: f64, y: f64, out: &mut [Complex64]) {
        let k = self.inner.block_dim();
        let big = k + self.extra;
        let mut small = vec![Complex64::new(0.0, 0.0); k * k];
        self.inner.eval_into(x, y, &mut small);
        out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for i in 0..k {
            out[i * big..i * big + k].copy_from_slice(&small[i * k..(i + 1) * k]);
        }
    }

    fn decay(&self) -> Option<Decay> {
        self.inner.decay()
    }
}
