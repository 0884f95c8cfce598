//! Dense complex linear algebra: log-space LU determinants, traces, and the
//! small eigen/singular value solvers used by the far-field projector and the
//! polar factors.

mod eigen;
mod lu;
mod matrix;
mod svd;

pub use eigen::{eigen_matrix, eigen_small, expm, trace, EigenPair, DEFAULT_MAX_DIM};
pub use lu::{inverse, logdet_in_place, lu_logdet, wrap_phase, LogDet, Scale, SmallLu};
pub use matrix::ComplexMatrix;
pub use svd::{svd_2x2, Svd2, SINGULAR_CUTOFF};
