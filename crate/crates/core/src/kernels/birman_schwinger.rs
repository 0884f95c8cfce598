//! Semiseparable Birman–Schwinger kernels of second-order systems
//!
//! ```text
//! B u'' + (N0 - λ) u + |Ψ|² N1 u + 2 N1 Ψ Ψᵀ u = 0,
//! ```
//!
//! written as a first-order 4x4 system `U' = (A∞(λ) + R(x)) U` around a pulse `Ψ`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::Kernel;
use crate::error::{usage, Error, Result};
use crate::linalg::{eigen_matrix, eigen_small, expm, svd_2x2, ComplexMatrix, SmallLu, Svd2};

/// Eigenvalues with `|Re| <= DEFAULT_GAP_TOL` are treated as lying on the imaginary axis.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;

/// Eigenvector bases worse conditioned than this switch to the sign-function route.
const MAX_EIGENBASIS_COND: f64 = 1e8;

const SIGN_MAX_ITER: usize = 100;

type Pulse = Arc<dyn Fn(f64) -> [f64; 2] + Send + Sync>;

/// Coefficients, pulse and spectral parameter of the linearised system.
#[derive(Clone)]
pub struct BsSystem {
    b: ComplexMatrix,
    b_inv: ComplexMatrix,
    n0: ComplexMatrix,
    n1: ComplexMatrix,
    pulse: Pulse,
    lambda: Complex64,
}

impl fmt::Debug for BsSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BsSystem")
            .field("b", &self.b)
            .field("n0", &self.n0)
            .field("n1", &self.n1)
            .field("lambda", &self.lambda)
            .finish_non_exhaustive()
    }
}

fn real2(m: [[f64; 2]; 2]) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&m)
}

impl BsSystem {
    pub fn new(
        b: [[f64; 2]; 2],
        n0: [[f64; 2]; 2],
        n1: [[f64; 2]; 2],
        pulse: impl Fn(f64) -> [f64; 2] + Send + Sync + 'static,
        lambda: Complex64,
    ) -> Result<Self> {
        let all = b.iter().chain(&n0).chain(&n1).flatten();
        if all.into_iter().any(|v| !v.is_finite()) || !lambda.is_finite() {
            return usage("system coefficients and lambda must be finite");
        }
        let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
        let scale = b.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 || det.abs() <= 1e-14 * scale * scale {
            return usage(format!("B must be invertible, got {b:?}"));
        }
        let b_inv = real2([[b[1][1] / det, -b[0][1] / det], [-b[1][0] / det, b[0][0] / det]]);
        Ok(Self {
            b: real2(b),
            b_inv,
            n0: real2(n0),
            n1: real2(n1),
            pulse: Arc::new(pulse),
            lambda,
        })
    }

    /// `B = [[0,-D/2],[D/2,0]]`, `N0 = [[0,-α],[α,0]]`, `N1 = [[0,-γ],[γ,0]]`.
    pub fn nls(
        d: f64,
        gamma: f64,
        alpha: f64,
        pulse: impl Fn(f64) -> [f64; 2] + Send + Sync + 'static,
        lambda: Complex64,
    ) -> Result<Self> {
        Self::new(
            [[0.0, -d / 2.0], [d / 2.0, 0.0]],
            [[0.0, -alpha], [alpha, 0.0]],
            [[0.0, -gamma], [gamma, 0.0]],
            pulse,
            lambda,
        )
    }

    /// Focusing cubic NLS about `Ψ = (sech x, 0)`.
    pub fn sech_nls(lambda: Complex64) -> Result<Self> {
        Self::nls(1.0, 1.0, -0.5, |x| [1.0 / x.cosh(), 0.0], lambda)
    }

    pub fn with_lambda(&self, lambda: Complex64) -> Self {
        Self { lambda, ..self.clone() }
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn pulse(&self, x: f64) -> [f64; 2] {
        (self.pulse)(x)
    }
}

/// `A∞(λ) = [[0, I], [B⁻¹(λ - N0), 0]]`.
pub fn a_infinity(sys: &BsSystem) -> ComplexMatrix {
    let shifted = &ComplexMatrix::identity(2).scale(sys.lambda) - &sys.n0;
    let lower = sys.b_inv.matmul(&shifted);
    let mut a = ComplexMatrix::zeros(4, 4);
    a.set_block(0, 2, &ComplexMatrix::identity(2));
    a.set_block(2, 0, &lower);
    a
}

fn check_gap(values: &[Complex64], gap_tol: f64) -> Result<()> {
    match values.iter().find(|v| v.re.abs() <= gap_tol) {
        Some(v) => Err(Error::SpectralGap {
            re: v.re,
            im: v.im,
            gap_tol,
        }),
        None => Ok(()),
    }
}

fn condition(v: &ComplexMatrix) -> Option<(f64, ComplexMatrix)> {
    let inv = SmallLu::new(v).ok()?.inverse();
    let cond = v.norm_one() * inv.norm_one();
    cond.is_finite().then_some((cond, inv))
}

/// Spectral decomposition of a hyperbolic matrix into stable and unstable parts.
#[derive(Debug, Clone)]
enum Splitting {
    Eigen {
        v: ComplexMatrix,
        v_inv: ComplexMatrix,
        values: Vec<Complex64>,
    },
    /// Defective or nearly defective: projector from the matrix sign function.
    Sign { q: ComplexMatrix },
}

fn split(a: &ComplexMatrix, gap_tol: f64) -> Result<Splitting> {
    if !a.is_square() {
        return usage(format!("expected a square matrix, got {}x{}", a.rows(), a.cols()));
    }
    let pairs = eigen_small(a, a.rows().max(1))?;
    let (v, values) = eigen_matrix(&pairs);
    check_gap(&values, gap_tol)?;
    match condition(&v) {
        Some((cond, v_inv)) if cond <= MAX_EIGENBASIS_COND => Ok(Splitting::Eigen { v, v_inv, values }),
        _ => Ok(Splitting::Sign { q: sign_projector(a)? }),
    }
}

/// `(I - sign(A)) / 2` by the Newton iteration `X ← (X + X⁻¹) / 2`.
fn sign_projector(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    let mut x = a.clone();
    for _ in 0..SIGN_MAX_ITER {
        let inv = SmallLu::new(&x)
            .map_err(|_| Error::NonConvergence("matrix sign iteration hit a singular iterate"))?
            .inverse();
        let next = (&x + &inv).scale(Complex64::new(0.5, 0.0));
        let delta = next.max_abs_diff(&x);
        x = next;
        if delta <= 1e-14 * x.max_abs() {
            let id = ComplexMatrix::identity(n);
            return Ok((&id - &x).scale(Complex64::new(0.5, 0.0)));
        }
    }
    Err(Error::NonConvergence("matrix sign iteration"))
}

impl Splitting {
    fn projector(&self) -> ComplexMatrix {
        match self {
            Splitting::Eigen { v, v_inv, values } => {
                let n = values.len();
                ComplexMatrix::from_fn(n, n, |i, j| {
                    (0..n)
                        .filter(|&m| values[m].re < 0.0)
                        .map(|m| v[(i, m)] * v_inv[(m, j)])
                        .sum()
                })
            }
            Splitting::Sign { q } => q.clone(),
        }
    }
}

/// Projector onto the stable subspace of `a`, commuting with `a`.
pub fn stable_projector(a: &ComplexMatrix, gap_tol: f64) -> Result<ComplexMatrix> {
    Ok(split(a, gap_tol)?.projector())
}

/// `M(x) = |Ψ|² N1 + 2 N1 Ψ Ψᵀ`.
pub fn m_matrix(sys: &BsSystem, x: f64) -> ComplexMatrix {
    let p = sys.pulse(x);
    let r2 = p[0] * p[0] + p[1] * p[1];
    let outer = real2([[p[0] * p[0], p[0] * p[1]], [p[1] * p[0], p[1] * p[1]]]);
    let id = ComplexMatrix::identity(2);
    sys.n1
        .matmul(&(&id.scale(Complex64::new(r2, 0.0)) + &outer.scale(Complex64::new(2.0, 0.0))))
}

/// `M = left · abs_sqrt` with `abs_sqrt = |M|^{1/2}` and `left = M |M|^{-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarFactors {
    pub abs_sqrt: ComplexMatrix,
    pub left: ComplexMatrix,
}

pub fn polar_factors(m: &ComplexMatrix) -> Result<PolarFactors> {
    let svd = svd_2x2(m)?;
    let r = svd.sqrt_sigma();
    Ok(PolarFactors {
        abs_sqrt: Svd2::compose(&svd.v, r, &svd.v),
        left: Svd2::compose(&svd.u, r, &svd.v),
    })
}

#[derive(Debug, Clone)]
enum Propagator {
    /// Top-right 2x2 block of `V e_m V⁻¹` for each eigenvalue, split by stability.
    Modes {
        values: Vec<Complex64>,
        blocks: Vec<ComplexMatrix>,
    },
    /// `Q e^{AQ t} Q` and `(I-Q) e^{A(I-Q) t} (I-Q)` by scaling and squaring.
    Dense {
        a_stable: ComplexMatrix,
        a_unstable: ComplexMatrix,
        q: ComplexMatrix,
        q_bar: ComplexMatrix,
    },
}

/// The 4x4 kernel
///
/// ```text
/// K(x, y) = -R_r(x) Q e^{A∞(x-y)} Q R_l(y),            x >= y
///           R_r(x) (I-Q) e^{A∞(x-y)} (I-Q) R_l(y),     x <  y
/// ```
///
/// with `R_r = [[|M|^{1/2}, 0], [0, 0]]` and `R_l = [[0, 0], [-B⁻¹ M |M|^{-1/2}, 0]]`.
/// Only the top-left 2x2 block is ever nonzero.
#[derive(Debug, Clone)]
pub struct BirmanSchwingerKernel {
    sys: BsSystem,
    a: ComplexMatrix,
    q: ComplexMatrix,
    prop: Propagator,
}

impl BirmanSchwingerKernel {
    pub fn new(sys: BsSystem, gap_tol: f64) -> Result<Self> {
        let a = a_infinity(&sys);
        let splitting = split(&a, gap_tol)?;
        let q = splitting.projector();
        let prop = match splitting {
            Splitting::Eigen { v, v_inv, values } => {
                let blocks = (0..4)
                    .map(|m| ComplexMatrix::from_fn(2, 2, |i, j| v[(i, m)] * v_inv[(m, 2 + j)]))
                    .collect();
                Propagator::Modes { values, blocks }
            }
            Splitting::Sign { q } => {
                let q_bar = &ComplexMatrix::identity(4) - &q;
                Propagator::Dense {
                    a_stable: a.matmul(&q),
                    a_unstable: a.matmul(&q_bar),
                    q,
                    q_bar,
                }
            }
        };
        Ok(Self { sys, a, q, prop })
    }

    pub fn system(&self) -> &BsSystem {
        &self.sys
    }

    pub fn a_infinity(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn projector(&self) -> &ComplexMatrix {
        &self.q
    }

    /// Top-right 2x2 block of `±P e^{A t} P` for the branch selected by the sign of `t`.
    fn propagator_block(&self, t: f64) -> Result<ComplexMatrix> {
        let forward = t >= 0.0;
        match &self.prop {
            Propagator::Modes { values, blocks } => {
                let mut out = ComplexMatrix::zeros(2, 2);
                for (val, blk) in values.iter().zip(blocks) {
                    if (val.re < 0.0) == forward {
                        out = &out + &blk.scale((val * t).exp());
                    }
                }
                Ok(if forward {
                    out.scale(Complex64::new(-1.0, 0.0))
                } else {
                    out
                })
            }
            Propagator::Dense {
                a_stable,
                a_unstable,
                q,
                q_bar,
            } => {
                let t = Complex64::new(t, 0.0);
                let full = if forward {
                    q.matmul(&expm(&a_stable.scale(t))?)
                        .matmul(q)
                        .scale(Complex64::new(-1.0, 0.0))
                } else {
                    q_bar.matmul(&expm(&a_unstable.scale(t))?).matmul(q_bar)
                };
                Ok(full.block(0, 2, 2, 2))
            }
        }
    }

    /// The nonzero top-left 2x2 block of `K(x, y)`.
    pub fn eval_block(&self, x: f64, y: f64) -> Result<ComplexMatrix> {
        let right = polar_factors(&m_matrix(&self.sys, x))?.abs_sqrt;
        let left = polar_factors(&m_matrix(&self.sys, y))?.left;
        let rl = self.sys.b_inv.matmul(&left).scale(Complex64::new(-1.0, 0.0));
        Ok(right.matmul(&self.propagator_block(x - y)?).matmul(&rl))
    }
}

impl Kernel for BirmanSchwingerKernel {
    fn block_dim(&self) -> usize {
        4
    }

    fn eval_into(&self, x: f64, y: f64, out: &mut [Complex64]) {
        let blk = self
            .eval_block(x, y)
            .unwrap_or_else(|_| ComplexMatrix::from_fn(2, 2, |_, _| Complex64::new(f64::NAN, f64::NAN)));
        out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for i in 0..2 {
            out[4 * i] = blk[(i, 0)];
            out[4 * i + 1] = blk[(i, 1)];
        }
    }
}

/// One-off evaluation of the 4x4 kernel; prefer [`BirmanSchwingerKernel`] for many points.
pub fn bs_kernel_eval(sys: &BsSystem, x: f64, y: f64) -> Result<ComplexMatrix> {
    let kern = BirmanSchwingerKernel::new(sys.clone(), DEFAULT_GAP_TOL)?;
    let mut out = ComplexMatrix::zeros(4, 4);
    out.set_block(0, 0, &kern.eval_block(x, y)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::SechNlsKernel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rank(q: &ComplexMatrix) -> f64 {
        (0..q.rows()).map(|i| q[(i, i)].re).sum()
    }

    #[test]
    fn a_infinity_blocks_and_spectrum() {
        let sys = BsSystem::sech_nls(c(0.0, 0.0)).unwrap();
        let a = a_infinity(&sys);
        assert_eq!(a.block(0, 2, 2, 2), ComplexMatrix::identity(2));
        // B⁻¹(-N0) = [[0,2],[-2,0]] [[0,-1/2],[1/2,0]] = I.
        assert!(a.block(2, 0, 2, 2).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);

        for lambda in [c(0.0, 0.1), c(0.05, 0.2), c(-0.3, 0.1)] {
            let sys = sys.with_lambda(lambda);
            let sech = SechNlsKernel::new(lambda).unwrap();
            let mut got: Vec<Complex64> = eigen_small(&a_infinity(&sys), 4)
                .unwrap()
                .iter()
                .map(|p| p.value)
                .collect();
            for want in [sech.mu(), -sech.mu(), sech.nu(), -sech.nu()] {
                let (k, d) = got
                    .iter()
                    .enumerate()
                    .map(|(k, g)| (k, (g - want).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                assert!(d < 1e-12, "{want} missing from spectrum");
                got.remove(k);
            }
        }
    }

    #[test]
    fn singular_b_is_rejected() {
        let err = BsSystem::new(
            [[1.0, 2.0], [2.0, 4.0]],
            [[0.0; 2]; 2],
            [[0.0; 2]; 2],
            |_| [0.0, 0.0],
            c(0.0, 0.0),
        );
        assert!(matches!(err, Err(Error::Usage(_))));
    }

    #[test]
    fn projector_of_simple_matrices() {
        let a = ComplexMatrix::diag(&[c(-1.0, 0.0), c(2.0, 0.0)]);
        let q = stable_projector(&a, DEFAULT_GAP_TOL).unwrap();
        assert!(q.max_abs_diff(&ComplexMatrix::diag(&[c(1.0, 0.0), c(0.0, 0.0)])) < 1e-14);

        let a = ComplexMatrix::diag(&[c(0.0, 1.0), c(0.0, -1.0)]);
        assert!(matches!(
            stable_projector(&a, DEFAULT_GAP_TOL),
            Err(Error::SpectralGap { .. })
        ));
    }

    #[test]
    fn projector_invariants_for_sech_system() {
        for lambda in [c(0.0, 0.0), c(0.0, 0.1), c(0.2, -0.3), c(1.5, 0.4)] {
            let a = a_infinity(&BsSystem::sech_nls(lambda).unwrap());
            let q = stable_projector(&a, DEFAULT_GAP_TOL).unwrap();
            let tol = 1e-10 * a.norm();
            assert!(q.matmul(&q).max_abs_diff(&q) < tol);
            assert!(q.matmul(&a).max_abs_diff(&a.matmul(&q)) < tol);
            assert!((rank(&q) - 2.0).abs() < tol);
        }
    }

    #[test]
    fn defective_matrix_uses_sign_function() {
        let a = ComplexMatrix::from_real_rows(&[[-1.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 2.0]]);
        let s = split(&a, DEFAULT_GAP_TOL).unwrap();
        assert!(matches!(s, Splitting::Sign { .. }));
        let q = s.projector();
        let want = ComplexMatrix::diag(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(q.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn sign_route_agrees_with_eigen_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let lambda = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.4..0.4));
            let a = a_infinity(&BsSystem::sech_nls(lambda).unwrap());
            let q = stable_projector(&a, DEFAULT_GAP_TOL).unwrap();
            assert!(sign_projector(&a).unwrap().max_abs_diff(&q) < 1e-10);
        }
    }

    #[test]
    fn m_matrix_of_sech_pulse() {
        let sys = BsSystem::sech_nls(c(0.0, 0.0)).unwrap();
        let m0 = m_matrix(&sys, 0.0);
        assert!(m0.max_abs_diff(&ComplexMatrix::from_real_rows(&[[0.0, -1.0], [3.0, 0.0]])) < 1e-15);
        for x in [-5.0, -1.3, 0.2, 0.7, 2.0, 9.0] {
            let s2 = (1.0 / f64::cosh(x)).powi(2);
            let svd = svd_2x2(&m_matrix(&sys, x)).unwrap();
            assert!(svd.sigma[0] <= 3.0 * s2 * (1.0 + 1e-14));
        }
        let zero = BsSystem::nls(1.0, 1.0, -0.5, |_| [0.0, 0.0], c(0.0, 0.0)).unwrap();
        assert_eq!(m_matrix(&zero, 1.0), ComplexMatrix::zeros(2, 2));
    }

    #[test]
    fn polar_factors_examples() {
        let p = polar_factors(&ComplexMatrix::zeros(2, 2)).unwrap();
        assert_eq!(p.abs_sqrt, ComplexMatrix::zeros(2, 2));
        assert_eq!(p.left, ComplexMatrix::zeros(2, 2));

        let p = polar_factors(&ComplexMatrix::diag(&[c(4.0, 0.0), c(9.0, 0.0)])).unwrap();
        let want = ComplexMatrix::diag(&[c(2.0, 0.0), c(3.0, 0.0)]);
        assert!(p.abs_sqrt.max_abs_diff(&want) < 1e-14);
        assert!(p.left.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn polar_factors_reconstruct_and_square_to_gram_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let m = ComplexMatrix::from_fn(2, 2, |_, _| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
            let p = polar_factors(&m).unwrap();
            assert!(p.left.matmul(&p.abs_sqrt).max_abs_diff(&m) < 1e-12 * m.norm());

            // (|M|^{1/2})² against the eigendecomposition of M*M.
            let pairs = eigen_small(&m.adjoint().matmul(&m), 2).unwrap();
            let (v, vals) = eigen_matrix(&pairs);
            let roots: Vec<Complex64> = vals.iter().map(|l| c(l.re.max(0.0).sqrt(), 0.0)).collect();
            let gram_root = v.matmul(&ComplexMatrix::diag(&roots)).matmul(&v.adjoint());
            assert!(p.abs_sqrt.matmul(&p.abs_sqrt).max_abs_diff(&gram_root) < 1e-11);
        }
    }

    #[test]
    fn embedded_polar_factors_reconstruct_perturbation() {
        let sys = BsSystem::sech_nls(c(0.0, 0.1)).unwrap();
        for x in [-2.0, 0.0, 0.4, 3.0] {
            let m = m_matrix(&sys, x);
            let p = polar_factors(&m).unwrap();
            let mut rr = ComplexMatrix::zeros(4, 4);
            rr.set_block(0, 0, &p.abs_sqrt);
            let mut rl = ComplexMatrix::zeros(4, 4);
            rl.set_block(2, 0, &sys.b_inv.matmul(&p.left).scale(c(-1.0, 0.0)));
            // R = [[0, 0], [-B⁻¹ M, 0]].
            let mut r = ComplexMatrix::zeros(4, 4);
            r.set_block(2, 0, &sys.b_inv.matmul(&m).scale(c(-1.0, 0.0)));
            assert!(rl.matmul(&rr).max_abs_diff(&r) < 1e-12 * m.norm().max(1.0));
        }
    }

    #[test]
    fn kernel_is_confined_to_top_left_block() {
        let kern = BirmanSchwingerKernel::new(BsSystem::sech_nls(c(0.1, 0.2)).unwrap(), DEFAULT_GAP_TOL).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let (x, y) = (rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
            let k = kern.eval(x, y);
            for i in 0..4 {
                for j in 0..4 {
                    if i >= 2 || j >= 2 {
                        assert_eq!(k[(i, j)], c(0.0, 0.0));
                    }
                }
            }
            assert!(k.as_slice().iter().all(|z| z.is_finite()));
        }
    }

    #[test]
    fn diagonal_jump_is_minus_rr_rl() {
        let sys = BsSystem::sech_nls(c(0.0, 0.15)).unwrap();
        let kern = BirmanSchwingerKernel::new(sys.clone(), DEFAULT_GAP_TOL).unwrap();
        for x in [-1.0, 0.0, 0.8] {
            let eps = 1e-9;
            let mut jump = ComplexMatrix::zeros(4, 4);
            jump.set_block(
                0,
                0,
                &(&kern.eval_block(x, x).unwrap() - &kern.eval_block(x, x + eps).unwrap()),
            );
            let p = polar_factors(&m_matrix(&sys, x)).unwrap();
            let mut rr = ComplexMatrix::zeros(4, 4);
            rr.set_block(0, 0, &p.abs_sqrt);
            let mut rl = ComplexMatrix::zeros(4, 4);
            rl.set_block(2, 0, &sys.b_inv.matmul(&p.left).scale(c(-1.0, 0.0)));
            let want = rr.matmul(&rl).scale(c(-1.0, 0.0));
            assert!(jump.max_abs_diff(&want) < 1e-7, "x = {x}");
        }
    }

    #[test]
    fn one_off_evaluation_matches_kernel() {
        let sys = BsSystem::sech_nls(c(0.0, 0.1)).unwrap();
        let kern = BirmanSchwingerKernel::new(sys.clone(), DEFAULT_GAP_TOL).unwrap();
        assert!(
            bs_kernel_eval(&sys, 0.3, -0.2)
                .unwrap()
                .max_abs_diff(&kern.eval(0.3, -0.2))
                < 1e-15
        );
    }

    #[test]
    fn dense_propagator_matches_modes() {
        let sys = BsSystem::sech_nls(c(0.1, 0.25)).unwrap();
        let kern = BirmanSchwingerKernel::new(sys, DEFAULT_GAP_TOL).unwrap();
        let q = kern.q.clone();
        let q_bar = &ComplexMatrix::identity(4) - &q;
        let dense = BirmanSchwingerKernel {
            prop: Propagator::Dense {
                a_stable: kern.a.matmul(&q),
                a_unstable: kern.a.matmul(&q_bar),
                q,
                q_bar,
            },
            ..kern.clone()
        };
        for (x, y) in [(0.5, -0.5), (-1.0, 2.0), (3.0, 3.0), (-4.0, 4.0)] {
            let d = dense
                .eval_block(x, y)
                .unwrap()
                .max_abs_diff(&kern.eval_block(x, y).unwrap());
            assert!(d < 1e-11, "({x}, {y}): {d}");
        }
    }
}
