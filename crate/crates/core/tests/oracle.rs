use fredholm_core::assembly::{fredholm_det_truncated, DetOrder, GridSpec};
use fredholm_core::kernels::{bs_kernel_eval, BsSystem, Kernel, ScalarKernel, SechNlsKernel};
use fredholm_core::oracle::{evans, fredholm_series};
use fredholm_core::quadrature::uniform_grid;
use fredholm_core::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn first_order_series_is_one_plus_z_trace() {
    let kernel = SechNlsKernel::new(c(0.1, 0.2)).unwrap();
    let z = c(0.6, -0.3);
    let panels = 12;
    let s = fredholm_series(&kernel, -3.0, 3.0, z, DetOrder::One, 1, panels).unwrap();
    let grid = uniform_grid(-3.0, 3.0, panels).unwrap();
    let tr = grid.integrate_fn(|x| {
        let m = kernel.eval(x, x);
        m.as_slice()[0] + m.as_slice()[3]
    });
    assert!((s - (c(1.0, 0.0) + z * tr)).norm() < 1e-13);
    let s2 = fredholm_series(&kernel, -3.0, 3.0, z, DetOrder::Two, 1, panels).unwrap();
    assert!((s2 - c(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn series_of_a_rank_one_kernel_stops_after_first_order() {
    let kernel = ScalarKernel(|x: f64, y: f64| c((-x * x).exp(), 0.0) * c(1.0, y).norm_sqr().recip());
    let z = c(1.3, 0.4);
    let one = fredholm_series(&kernel, -1.0, 1.0, z, DetOrder::One, 1, 8).unwrap();
    let three = fredholm_series(&kernel, -1.0, 1.0, z, DetOrder::One, 3, 8).unwrap();
    assert!((one - three).norm() < 1e-13);
}

#[test]
fn series_approaches_the_nystrom_determinant() {
    let kernel = SechNlsKernel::new(c(0.2, 0.3)).unwrap();
    let z = c(0.02, 0.0);
    let det = fredholm_det_truncated(&kernel, 3.0, GridSpec::Panels { count: 8 }, z, DetOrder::One)
        .unwrap()
        .value();
    let s = fredholm_series(&kernel, -3.0, 3.0, z, DetOrder::One, 3, 8).unwrap();
    // Same nodes on both sides, so only the fourth-order remainder (|z Tr K|^4 / 4! ~ 3e-5) is left.
    assert!((det - s).norm() < 2e-4, "{det} vs {s}");
}

#[test]
fn series_refuses_large_orders() {
    let kernel = SechNlsKernel::new(c(0.1, 0.1)).unwrap();
    assert!(fredholm_series(&kernel, -1.0, 1.0, c(1.0, 0.0), DetOrder::One, 4, 2).is_err());
}

#[test]
fn evans_vanishes_to_fourth_order_at_the_origin() {
    assert_eq!(evans(c(0.0, 0.0)).norm(), 0.0);
    let small = evans(c(1e-4, 0.0)).norm();
    let smaller = evans(c(5e-5, 0.0)).norm();
    assert!((small / smaller - 16.0).abs() < 1e-2, "{}", small / smaller);
}

#[test]
fn generic_kernel_reproduces_sech_kernel() {
    let lambda = c(0.2, 0.15);
    let sys = BsSystem::sech_nls(lambda).unwrap();
    let sech = SechNlsKernel::new(lambda).unwrap();
    for &(x, y) in &[(0.0, 0.0), (0.4, -1.3), (-2.0, 0.7), (1.5, 1.5)] {
        let a = bs_kernel_eval(&sys, x, y).unwrap().block(0, 0, 2, 2);
        let b = sech.eval(x, y);
        assert!(a.max_abs_diff(&b) < 1e-10 * (1.0 + b.max_abs()), "({x}, {y})");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sech_kernel_respects_its_decay_certificate(
        lr in -1.0f64..1.0,
        li in -0.45f64..0.45,
        x in -12.0f64..12.0,
        y in -12.0f64..12.0,
    ) {
        let kernel = SechNlsKernel::new(c(lr, li)).unwrap();
        let decay = kernel.decay().unwrap();
        let m = kernel.eval(x, y);
        prop_assert!(m.max_abs() <= decay.envelope(x, y) * (1.0 + 1e-12));
    }

    #[test]
    fn evans_is_even_and_conjugate_symmetric(lr in -2.0f64..2.0, li in -2.0f64..2.0) {
        let l = c(lr, li);
        let e = evans(l);
        prop_assert!((evans(-l) - e).norm() <= 1e-12 * (1.0 + e.norm()));
        prop_assert!((evans(l.conj()) - e.conj()).norm() <= 1e-12 * (1.0 + e.norm()));
    }
}
