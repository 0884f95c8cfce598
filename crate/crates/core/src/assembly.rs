//! Block Nyström discretisation and the determinants `d₁ = det(I + zK_Q)`,
//! `d₂ = d₁ · exp(-z Tr K_Q)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{usage, Error, Result};
use crate::kernels::Kernel;
use crate::linalg::{logdet_in_place, ComplexMatrix, LogDet};
use crate::quadrature::{graded_grid, uniform_grid, uniform_grid_with_spacing, Grid};

/// Largest Nyström matrix (in rows) built unless the caller raises the cap.
pub const DEFAULT_MAX_ROWS: usize = 32_768;

/// Classical (`p = 1`) or regularised (`p = 2`) determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetOrder {
    One,
    Two,
}

impl DetOrder {
    pub fn from_p(p: u32) -> Result<Self> {
        match p {
            1 => Ok(Self::One),
            2 => Ok(Self::Two),
            _ => usage(format!("p must be 1 or 2, got {p}")),
        }
    }

    pub fn p(self) -> u32 {
        match self {
            Self::One => 1,
            Self::Two => 2,
        }
    }
}

/// `K_Q` with block `(α, β) = w_β K(x_α, x_β)`.
#[derive(Debug, Clone)]
pub struct NystromMatrix {
    grid: Grid,
    k: usize,
    matrix: ComplexMatrix,
    trace: Complex64,
}

impl NystromMatrix {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn block_dim(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `Σ_α w_α Tr K(x_α, x_α)`.
    pub fn trace(&self) -> Complex64 {
        self.trace
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Like [`det_q`] but reuses the matrix storage for the factorisation.
    pub fn into_det(self, z: Complex64, order: DetOrder) -> DetResult {
        let n = self.matrix.rows();
        let trace = self.trace;
        let mut data = self.matrix.into_vec();
        data.iter_mut().for_each(|v| *v *= z);
        for i in 0..n {
            data[i * n + i] += 1.0;
        }
        finish(logdet_in_place(&mut data, n), z, order, trace)
    }
}

fn finish(det1: LogDet, z: Complex64, order: DetOrder, trace: Complex64) -> DetResult {
    match order {
        DetOrder::One => DetResult {
            det: det1,
            order,
            z,
            trace_used: Complex64::new(0.0, 0.0),
        },
        DetOrder::Two => DetResult {
            det: det1.times_exp(-z * trace),
            order,
            z,
            trace_used: trace,
        },
    }
}

/// A determinant together with the inputs that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetResult {
    pub det: LogDet,
    pub order: DetOrder,
    pub z: Complex64,
    /// `Tr K_Q` for `p = 2`, zero for `p = 1`.
    pub trace_used: Complex64,
}

impl DetResult {
    pub fn value(&self) -> Complex64 {
        self.det.value()
    }
}

pub fn build_nystrom<K: Kernel + ?Sized>(kernel: &K, grid: &Grid) -> Result<NystromMatrix> {
    build_nystrom_capped(kernel, grid, DEFAULT_MAX_ROWS)
}

/// Assembles `K_Q`, refusing matrices with more than `max_rows` rows.
///
/// Kernel evaluations are spread over the rayon pool one block row at a time.
pub fn build_nystrom_capped<K: Kernel + ?Sized>(kernel: &K, grid: &Grid, max_rows: usize) -> Result<NystromMatrix> {
    let k = kernel.block_dim();
    if k == 0 {
        return usage("kernel block dimension must be positive");
    }
    let nodes = grid.nodes();
    let weights = grid.weights();
    let rows = k
        .checked_mul(nodes.len())
        .filter(|&r| r <= max_rows)
        .ok_or(Error::ResourceCap {
            required: k.saturating_mul(nodes.len()),
            cap: max_rows,
        })?;

    let mut data = vec![Complex64::new(0.0, 0.0); rows * rows];
    data.par_chunks_mut(k * rows).enumerate().for_each(|(alpha, out)| {
        let x = nodes[alpha];
        let mut blk = vec![Complex64::new(0.0, 0.0); k * k];
        for (beta, (&y, &w)) in nodes.iter().zip(weights).enumerate() {
            kernel.eval_into(x, y, &mut blk);
            for i in 0..k {
                let row = &mut out[i * rows + beta * k..i * rows + beta * k + k];
                for (dst, src) in row.iter_mut().zip(&blk[i * k..i * k + k]) {
                    *dst = src * w;
                }
            }
        }
    });
    let trace = (0..rows).map(|i| data[i * rows + i]).sum();
    Ok(NystromMatrix {
        grid: grid.clone(),
        k,
        matrix: ComplexMatrix::new(rows, rows, data)?,
        trace,
    })
}

/// `det(I + z K_Q)`, times `exp(-z Tr K_Q)` for `p = 2`.
pub fn det_q(n: &NystromMatrix, z: Complex64, order: DetOrder) -> DetResult {
    n.clone().into_det(z, order)
}

/// How to discretise `[-L, L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    /// Composite Simpson with the given distance between consecutive nodes.
    Uniform { node_spacing: f64 },
    /// Composite Simpson with a fixed number of panels.
    Panels { count: usize },
    /// Symmetric graded panels, see [`graded_grid`].
    Graded { h_min: f64, growth: f64, ratio_max: f64 },
}

impl GridSpec {
    pub fn build(&self, l: f64) -> Result<Grid> {
        if !(l.is_finite() && l > 0.0) {
            return usage(format!("L must be positive and finite, got {l}"));
        }
        match *self {
            GridSpec::Uniform { node_spacing } => uniform_grid_with_spacing(-l, l, node_spacing),
            GridSpec::Panels { count } => uniform_grid(-l, l, count),
            GridSpec::Graded {
                h_min,
                growth,
                ratio_max,
            } => graded_grid(-l, l, h_min, growth, ratio_max),
        }
    }
}

/// Determinant of the kernel restricted to `[-L, L]` and discretised per `spec`.
pub fn fredholm_det_truncated<K: Kernel + ?Sized>(
    kernel: &K,
    l: f64,
    spec: GridSpec,
    z: Complex64,
    order: DetOrder,
) -> Result<DetResult> {
    let grid = spec.build(l)?;
    Ok(build_nystrom(kernel, &grid)?.into_det(z, order))
}
