use num_complex::Complex64;

use super::{Decay, Kernel, DEFAULT_GAP_TOL};
use crate::error::{Error, Result};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Birman–Schwinger kernel of the NLS equation linearised about the
/// `sech` soliton (`D = γ = 1`, `α = -1/2`), reduced to 2x2 blocks:
///
/// ```text
/// K(x, y) = sech(x) sech(y) L(-|x - y|; μ, ν),   μ = √(1 - 2iλ),  ν = √(1 + 2iλ),
///
/// L(w) = [ -3/2 E₊(w)       -(√3/2) i E₋(w) ]     E± = e^{μw}/μ ± e^{νw}/ν
///        [ (√3/2) i E₋(w)   -1/2 E₊(w)      ]
/// ```
///
/// Its regular Fredholm determinant is the Evans function of the soliton.
#[derive(Debug, Clone, Copy)]
pub struct SechNlsKernel {
    lambda: Complex64,
    mu: Complex64,
    nu: Complex64,
}

impl SechNlsKernel {
    /// Rejects `λ` for which `Re μ` or `Re ν` is within [`DEFAULT_GAP_TOL`] of zero.
    pub fn new(lambda: Complex64) -> Result<Self> {
        Self::with_gap_tol(lambda, DEFAULT_GAP_TOL)
    }

    pub fn with_gap_tol(lambda: Complex64, gap_tol: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::Usage(format!("lambda must be finite, got {lambda}")));
        }
        let i = Complex64::i();
        let mu = (Complex64::new(1.0, 0.0) - 2.0 * i * lambda).sqrt();
        let nu = (Complex64::new(1.0, 0.0) + 2.0 * i * lambda).sqrt();
        for s in [mu, nu] {
            if s.re <= gap_tol {
                return Err(Error::SpectralGap {
                    re: s.re,
                    im: s.im,
                    gap_tol,
                });
            }
        }
        Ok(Self { lambda, mu, nu })
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn mu(&self) -> Complex64 {
        self.mu
    }

    pub fn nu(&self) -> Complex64 {
        self.nu
    }

    /// `L(w; μ, ν)` row-major.
    pub fn l_matrix(&self, w: f64) -> [Complex64; 4] {
        let em = (self.mu * w).exp() / self.mu;
        let en = (self.nu * w).exp() / self.nu;
        let plus = em + en;
        let minus = em - en;
        let off = Complex64::new(0.0, 0.5 * SQRT3) * minus;
        [-1.5 * plus, -off, off, -0.5 * plus]
    }
}

fn sech(t: f64) -> f64 {
    1.0 / t.cosh()
}

impl Kernel for SechNlsKernel {
    fn block_dim(&self) -> usize {
        2
    }

    fn eval_into(&self, x: f64, y: f64, out: &mut [Complex64]) {
        let s = sech(x) * sech(y);
        let l = self.l_matrix(-(x - y).abs());
        for (o, v) in out.iter_mut().zip(l) {
            *o = v * s;
        }
    }

    /// `|e^{sw}/s| <= 1/|s|` for `w <= 0` and `sech t <= 2 e^{-|t|}` give
    /// `C = 6 (1/|μ| + 1/|ν|)`, `a = 1`.
    fn decay(&self) -> Option<Decay> {
        Some(Decay {
            c: 6.0 * (1.0 / self.mu.norm() + 1.0 / self.nu.norm()),
            a: 1.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn value_at_origin() {
        let k = SechNlsKernel::new(c(0.0, 0.0)).unwrap();
        assert_eq!(k.mu(), c(1.0, 0.0));
        assert_eq!(k.nu(), c(1.0, 0.0));
        let m = k.eval(0.0, 0.0);
        assert!((m[(0, 0)] - c(-3.0, 0.0)).norm() < 1e-15);
        assert!(m[(0, 1)].norm() < 1e-15 && m[(1, 0)].norm() < 1e-15);
        assert!((m[(1, 1)] - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn symmetric_in_arguments_and_antisymmetric_off_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let lambda = c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.4..0.4));
            let k = SechNlsKernel::new(lambda).unwrap();
            let (x, y) = (rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
            let kxy = k.eval(x, y);
            let kyx = k.eval(y, x);
            assert_eq!(kxy, kyx);
            let l = k.l_matrix(-(x - y).abs());
            assert_eq!(l[2], -l[1]);
        }
    }

    #[test]
    fn decay_certificate_holds_on_random_sample() {
        let k = SechNlsKernel::new(c(0.0, 0.0)).unwrap();
        let d = k.decay().unwrap();
        assert_eq!((d.c, d.a), (12.0, 1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10_000 {
            let (x, y) = (rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
            let env = d.envelope(x, y);
            for z in k.eval(x, y).as_slice() {
                assert!(z.norm() <= env, "|K| = {} > {env} at ({x}, {y})", z.norm());
            }
        }
    }

    #[test]
    fn decay_certificate_off_axis() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for lambda in [c(0.0, 0.2), c(0.1, -0.3), c(1.0, 0.5)] {
            let k = SechNlsKernel::new(lambda).unwrap();
            let d = k.decay().unwrap();
            for _ in 0..2_000 {
                let (x, y) = (rng.gen_range(-15.0..15.0), rng.gen_range(-15.0..15.0));
                let env = d.envelope(x, y);
                assert!(k.eval(x, y).as_slice().iter().all(|z| z.norm() <= env));
            }
        }
    }

    #[test]
    fn inadmissible_lambda_is_a_gap_violation() {
        // 1 + 2iλ = -1 for λ = i: ν is purely imaginary.
        assert!(matches!(
            SechNlsKernel::new(c(0.0, 1.0)),
            Err(Error::SpectralGap { .. })
        ));
        assert!(matches!(
            SechNlsKernel::new(c(0.0, -0.5)),
            Err(Error::SpectralGap { .. })
        ));
        assert!(SechNlsKernel::new(c(0.0, 0.49)).is_ok());
        assert!(matches!(SechNlsKernel::new(c(f64::NAN, 0.0)), Err(Error::Usage(_))));
    }
}
