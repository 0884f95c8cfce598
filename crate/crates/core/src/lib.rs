//! Regular and 2-modified Fredholm determinants of matrix-valued integral
//! kernels, approximated by Nyström discretization with composite Simpson
//! quadrature, together with a-priori error bounds and independent oracles.
//!
//! The pipeline for an operator on the whole line is: truncate to `[-L, L]`,
//! build a [`quadrature::Grid`], assemble the weighted block matrix with
//! [`assembly::build_nystrom`], and evaluate `det(I + zK_Q)` (optionally times
//! `exp(-z Tr K_Q)`) in log form with [`assembly::det_q`].

pub mod assembly;
pub mod bounds;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod oracle;
pub mod quadrature;

pub use error::{Error, Result};
pub use num_complex::Complex64;
