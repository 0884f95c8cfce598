use fredholm_core::quadrature::{graded_grid, uniform_grid, uniform_grid_with_spacing, Grid};
use fredholm_core::Complex64;
use proptest::prelude::*;

fn integrate_real(grid: &Grid, f: impl Fn(f64) -> f64) -> f64 {
    grid.integrate_fn(|x| Complex64::new(f(x), 0.0)).re
}

#[test]
fn simpson_is_exact_for_cubics() {
    let grid = graded_grid(-2.0, 3.0, 0.1, 0.7, 6.0).unwrap();
    let v = integrate_real(&grid, |x| 4.0 * x.powi(3) - x * x + 2.0);
    let exact = (3f64.powi(4) - 16.0) - (27.0 + 8.0) / 3.0 + 10.0;
    assert!((v - exact).abs() < 1e-12 * exact.abs());
}

#[test]
fn uniform_error_falls_sixteenfold_per_halving() {
    let exact = 2.0 * 1f64.sin();
    let err = |m| (integrate_real(&uniform_grid(-1.0, 1.0, m).unwrap(), f64::cos) - exact).abs();
    let ratio = err(8) / err(16);
    assert!((ratio - 16.0).abs() < 0.5, "{ratio}");
}

#[test]
fn node_spacing_maps_to_panel_count() {
    let g = uniform_grid_with_spacing(-7.32, 7.32, 0.03).unwrap();
    assert_eq!(g.panel_count(), 244);
    assert_eq!(g.node_count(), 489);
    assert!((g.max_node_spacing() - 0.03).abs() < 1e-3);
}

#[test]
fn bad_inputs_are_rejected() {
    assert!(uniform_grid(1.0, 1.0, 4).is_err());
    assert!(uniform_grid(0.0, 1.0, 0).is_err());
    assert!(uniform_grid_with_spacing(0.0, 1.0, -0.1).is_err());
    assert!(graded_grid(0.0, 1.0, 0.0, 1.0, 2.0).is_err());
    assert!(graded_grid(0.0, 1.0, 0.1, -1.0, 2.0).is_err());
    assert!(graded_grid(0.0, 1.0, 0.1, 1.0, 0.5).is_err());
    assert!(Grid::from_edges(&[0.0, 1.0, 1.0]).is_err());
    assert!(uniform_grid(-1.0, 1.0, 4)
        .unwrap()
        .integrate(&[Complex64::new(1.0, 0.0)])
        .is_err());
}

proptest! {
    #[test]
    fn graded_grid_is_symmetric_and_bounded(
        l in 0.5f64..12.0,
        h_min in 0.01f64..0.3,
        ratio in 1.0f64..10.0,
        growth in 0.0f64..2.0,
    ) {
        let g = graded_grid(-l, l, h_min, growth, ratio).unwrap();
        let nodes = g.nodes();
        prop_assert_eq!(nodes[0], -l);
        prop_assert_eq!(*nodes.last().unwrap(), l);
        for (x, y) in nodes.iter().zip(nodes.iter().rev()) {
            prop_assert!((x + y).abs() < 1e-9 * l);
        }
        prop_assert!(g.dx_max() <= h_min * ratio * (1.0 + 1e-9) || g.panel_count() <= 2);
        let total: f64 = g.weights().iter().sum();
        prop_assert!((total - 2.0 * l).abs() < 1e-12 * l);
        prop_assert!(g.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn weights_integrate_constants(a in -5.0f64..5.0, len in 0.1f64..10.0, m in 1usize..50) {
        let g = uniform_grid(a, a + len, m).unwrap();
        prop_assert!((integrate_real(&g, |_| 1.0) - len).abs() < 1e-12 * len);
        prop_assert_eq!(g.node_count(), 2 * m + 1);
    }
}
