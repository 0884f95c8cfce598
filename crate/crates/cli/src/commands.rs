//! The five subcommands. Each produces a [`Table`] and a flag telling whether
//! every requested lambda fell outside the admissible region.

use fredholm_core::assembly::{build_nystrom, DetOrder, DetResult, GridSpec};
use fredholm_core::bounds::{knorm_r_estimate, quadrature_bound, truncation_bound, Magnitude};
use fredholm_core::kernels::{Kernel, SechNlsKernel};
use fredholm_core::oracle::evans;
use fredholm_core::quadrature::{uniform_grid, Grid};
use fredholm_core::{Complex64, Error};

use crate::config::{Command, GridChoice, KernelChoice, RunConfig, SweepMode, DEFAULT_GROWTH, DEFAULT_RATIO};
use crate::error::{CliError, CliResult};
use crate::output::{num, Table};

/// Lattice size per axis for the derivative-norm estimate.
pub const KNORM_SAMPLES: usize = 40;

/// Smoothness order assumed by the quadrature bound (the kernels are Lipschitz across `x = y`).
pub const BOUND_ORDER: u32 = 1;

const OK: &str = "ok";
const GAP: &str = "gap_violation";

pub struct Outcome {
    pub table: Table,
    /// Every requested lambda was rejected by the kernel constructor.
    pub all_gap: bool,
}

fn make_kernel(choice: KernelChoice, lambda: Complex64) -> CliResult<Option<SechNlsKernel>> {
    match choice {
        KernelChoice::SechNls => match SechNlsKernel::new(lambda) {
            Ok(k) => Ok(Some(k)),
            Err(Error::SpectralGap { .. }) => Ok(None),
            Err(e) => Err(e.into()),
        },
    }
}

fn determinant<K: Kernel>(kernel: &K, grid: &Grid, z: Complex64, order: DetOrder) -> CliResult<DetResult> {
    Ok(build_nystrom(kernel, grid)?.into_det(z, order))
}

fn ln_str(m: Magnitude) -> String {
    num(m.ln())
}

pub fn run_command(cmd: Command, cfg: &RunConfig) -> CliResult<Outcome> {
    match cmd {
        Command::Det => cmd_det(cfg),
        Command::SweepL => cmd_sweep_l(cfg),
        Command::SweepDx => cmd_sweep_dx(cfg),
        Command::Bounds => cmd_bounds(cfg),
        Command::Evans => Ok(cmd_evans(cfg)),
    }
}

pub fn cmd_det(cfg: &RunConfig) -> CliResult<Outcome> {
    let mut table = Table::new(&[
        "lambda_re",
        "lambda_im",
        "det_re",
        "det_im",
        "det_abs",
        "log_abs",
        "evans_re",
        "evans_im",
        "status",
    ]);
    let grid = cfg.grid.spec().build(cfg.l)?;
    let mut gaps = 0;
    for &lambda in &cfg.lambdas {
        let mut row = vec![num(lambda.re), num(lambda.im)];
        match make_kernel(cfg.kernel, lambda)? {
            Some(kernel) => {
                let d = determinant(&kernel, &grid, cfg.z, cfg.order)?;
                let v = d.value();
                let e = evans(lambda);
                row.extend([
                    num(v.re),
                    num(v.im),
                    num(d.det.modulus()),
                    num(d.det.log_modulus),
                    num(e.re),
                    num(e.im),
                    OK.into(),
                ]);
            }
            None => {
                gaps += 1;
                row.extend(std::iter::repeat_n(String::new(), 6));
                row.push(GAP.into());
            }
        }
        table.push(row);
    }
    Ok(Outcome {
        table,
        all_gap: gaps == cfg.lambdas.len(),
    })
}

fn single_lambda(cfg: &RunConfig, what: &str) -> CliResult<Complex64> {
    match cfg.lambdas.as_slice() {
        [l] => Ok(*l),
        _ => Err(CliError::usage(format!(
            "{what} takes exactly one lambda, got {}",
            cfg.lambdas.len()
        ))),
    }
}

fn required_values<'a>(cfg: &'a RunConfig, what: &str, meaning: &str) -> CliResult<&'a [f64]> {
    cfg.values
        .as_deref()
        .ok_or_else(|| CliError::usage(format!("{what} needs --values (a list of {meaning})")))
}

pub fn cmd_sweep_l(cfg: &RunConfig) -> CliResult<Outcome> {
    let lambda = single_lambda(cfg, "sweep-l")?;
    let ls = required_values(cfg, "sweep-l", "half-widths L")?;
    let mut table = Table::new(&[
        "L",
        "node_count",
        "dx_max",
        "det_abs",
        "log_abs",
        "truncation_bound_log",
        "status",
    ]);
    let kernel = make_kernel(cfg.kernel, lambda)?;
    for &l in ls {
        let grid = cfg.grid.spec().build(l)?;
        let mut row = vec![num(l), grid.node_count().to_string(), num(grid.dx_max())];
        match &kernel {
            Some(k) => {
                let d = determinant(k, &grid, cfg.z, cfg.order)?;
                let decay = k.decay().expect("builtin kernels certify their decay");
                let bound = truncation_bound(decay.c, decay.a, k.block_dim(), cfg.z, l)?;
                row.extend([num(d.det.modulus()), num(d.det.log_modulus), ln_str(bound), OK.into()]);
            }
            None => {
                row.extend(std::iter::repeat_n(String::new(), 3));
                row.push(GAP.into());
            }
        }
        table.push(row);
    }
    Ok(Outcome {
        table,
        all_gap: kernel.is_none(),
    })
}

fn sweep_grids(cfg: &RunConfig) -> CliResult<Vec<(String, Grid)>> {
    let l = cfg.l;
    match cfg.mode {
        SweepMode::Uniform => match (&cfg.values, &cfg.nodes) {
            (Some(_), Some(_)) => Err(CliError::usage("sweep-dx takes --values or --nodes, not both")),
            (Some(dxs), None) => dxs
                .iter()
                .map(|&dx| Ok((num(dx), GridSpec::Uniform { node_spacing: dx }.build(l)?)))
                .collect(),
            (None, Some(nodes)) => nodes
                .iter()
                .map(|&n| Ok((n.to_string(), uniform_grid(-l, l, (n - 1) / 2)?)))
                .collect(),
            (None, None) => Err(CliError::usage(
                "sweep-dx needs --values (spacings) or --nodes (node counts)",
            )),
        },
        SweepMode::Graded => {
            if cfg.nodes.is_some() {
                return Err(CliError::usage("--nodes is only available with --mode uniform"));
            }
            let h_mins = required_values(cfg, "sweep-dx --mode graded", "central panel widths hmin")?;
            let (growth, ratio) = match cfg.grid {
                GridChoice::Graded { growth, ratio, .. } => (growth, ratio),
                GridChoice::Uniform { .. } => (DEFAULT_GROWTH, DEFAULT_RATIO),
            };
            h_mins
                .iter()
                .map(|&h_min| {
                    let spec = GridChoice::Graded { h_min, growth, ratio }.spec();
                    Ok((num(h_min), spec.build(l)?))
                })
                .collect()
        }
    }
}

pub fn cmd_sweep_dx(cfg: &RunConfig) -> CliResult<Outcome> {
    let lambda = single_lambda(cfg, "sweep-dx")?;
    let grids = sweep_grids(cfg)?;
    let mut table = Table::new(&[
        "input",
        "dx_max",
        "node_count",
        "det_abs",
        "log_abs",
        "quadrature_bound_log",
        "status",
    ]);
    let kernel = make_kernel(cfg.kernel, lambda)?;
    let knorm = match &kernel {
        Some(k) => Some(knorm_r_estimate(k, -cfg.l, cfg.l, BOUND_ORDER, KNORM_SAMPLES)?),
        None => None,
    };
    for (input, grid) in grids {
        let mut row = vec![input, num(grid.dx_max()), grid.node_count().to_string()];
        match (&kernel, knorm) {
            (Some(k), Some(knorm)) => {
                let d = determinant(k, &grid, cfg.z, cfg.order)?;
                let bound = quadrature_bound(BOUND_ORDER, k.block_dim(), 2.0 * cfg.l, knorm, cfg.z, grid.dx_max())?;
                row.extend([num(d.det.modulus()), num(d.det.log_modulus), ln_str(bound), OK.into()]);
            }
            _ => {
                row.extend(std::iter::repeat_n(String::new(), 3));
                row.push(GAP.into());
            }
        }
        table.push(row);
    }
    Ok(Outcome {
        table,
        all_gap: kernel.is_none(),
    })
}

pub fn cmd_bounds(cfg: &RunConfig) -> CliResult<Outcome> {
    let ls = cfg.values.clone().unwrap_or_else(|| vec![cfg.l]);
    let mut table = Table::new(&[
        "lambda_re",
        "lambda_im",
        "L",
        "dx_max",
        "truncation_bound_log",
        "quadrature_bound_log",
        "total_log",
        "C",
        "a",
        "k",
        "z_re",
        "z_im",
        "r",
        "knorm_r",
        "status",
    ]);
    let mut gaps = 0;
    for &lambda in &cfg.lambdas {
        let kernel = make_kernel(cfg.kernel, lambda)?;
        if kernel.is_none() {
            gaps += 1;
        }
        for &l in &ls {
            let grid = cfg.grid.spec().build(l)?;
            let mut row = vec![num(lambda.re), num(lambda.im), num(l), num(grid.dx_max())];
            match &kernel {
                Some(k) => {
                    let decay = k.decay().expect("builtin kernels certify their decay");
                    let knorm = knorm_r_estimate(k, -l, l, BOUND_ORDER, KNORM_SAMPLES)?;
                    let trunc = truncation_bound(decay.c, decay.a, k.block_dim(), cfg.z, l)?;
                    let quad = quadrature_bound(BOUND_ORDER, k.block_dim(), 2.0 * l, knorm, cfg.z, grid.dx_max())?;
                    row.extend([
                        ln_str(trunc),
                        ln_str(quad),
                        ln_str(trunc + quad),
                        num(decay.c),
                        num(decay.a),
                        k.block_dim().to_string(),
                        num(cfg.z.re),
                        num(cfg.z.im),
                        BOUND_ORDER.to_string(),
                        num(knorm),
                        OK.into(),
                    ]);
                }
                None => {
                    row.extend(std::iter::repeat_n(String::new(), 10));
                    row.push(GAP.into());
                }
            }
            table.push(row);
        }
    }
    Ok(Outcome {
        table,
        all_gap: gaps == cfg.lambdas.len(),
    })
}

pub fn cmd_evans(cfg: &RunConfig) -> Outcome {
    let mut table = Table::new(&["lambda_re", "lambda_im", "evans_re", "evans_im", "evans_abs", "status"]);
    for &lambda in &cfg.lambdas {
        let e = evans(lambda);
        table.push(vec![
            num(lambda.re),
            num(lambda.im),
            num(e.re),
            num(e.im),
            num(e.norm()),
            OK.into(),
        ]);
    }
    Outcome { table, all_gap: false }
}
