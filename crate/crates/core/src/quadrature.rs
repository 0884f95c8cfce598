//! Composite Simpson grids on `[a, b]`, uniform and graded.
//!
//! Panel `j` has width `Δx_j` and contributes its two endpoints and its
//! midpoint, so a grid of `M` panels has `2M + 1` nodes. The weights are
//!
//! ```text
//! w_1 = Δx_1 / 6,  w_{2j} = 2Δx_j / 3,  w_{2j+1} = (Δx_j + Δx_{j+1}) / 6,  w_{2M+1} = Δx_M / 6.
//! ```

use num_complex::Complex64;

use crate::error::{usage, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    panels: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    /// Builds a grid from strictly increasing panel edges `a = e_0 < … < e_M = b`.
    pub fn from_edges(edges: &[f64]) -> Result<Self> {
        if edges.len() < 2 {
            return usage("a grid needs at least one panel");
        }
        if edges.iter().any(|e| !e.is_finite()) {
            return usage("grid edges must be finite");
        }
        if edges.windows(2).any(|w| w[1] <= w[0]) {
            return usage("grid edges must be strictly increasing");
        }
        let m = edges.len() - 1;
        let panels: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
        let mut nodes = Vec::with_capacity(2 * m + 1);
        let mut weights = vec![0.0; 2 * m + 1];
        for j in 0..m {
            nodes.push(edges[j]);
            nodes.push(0.5 * (edges[j] + edges[j + 1]));
            let h = panels[j];
            weights[2 * j] += h / 6.0;
            weights[2 * j + 1] += 2.0 * h / 3.0;
            weights[2 * j + 2] += h / 6.0;
        }
        nodes.push(edges[m]);
        Ok(Self {
            a: edges[0],
            b: edges[m],
            panels,
            nodes,
            weights,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Panel widths `Δx_j`.
    pub fn panels(&self) -> &[f64] {
        &self.panels
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    /// Largest panel width, the `Δx_max` of the quadrature error bound.
    pub fn dx_max(&self) -> f64 {
        self.panels.iter().copied().fold(0.0, f64::max)
    }

    pub fn dx_min(&self) -> f64 {
        self.panels.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest distance between neighbouring nodes (half the widest panel).
    pub fn max_node_spacing(&self) -> f64 {
        0.5 * self.dx_max()
    }

    /// `Σ w_k f(x_k)` for samples taken at the grid nodes.
    pub fn integrate(&self, samples: &[Complex64]) -> Result<Complex64> {
        if samples.len() != self.nodes.len() {
            return usage(format!(
                "integrate: {} samples for {} nodes",
                samples.len(),
                self.nodes.len()
            ));
        }
        Ok(self.weights.iter().zip(samples).map(|(&w, &f)| f * w).sum())
    }

    /// Samples `f` at every node and integrates.
    pub fn integrate_fn(&self, mut f: impl FnMut(f64) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }
}

/// `M` equal panels of width `(b - a) / M`.
pub fn uniform_grid(a: f64, b: f64, panels: usize) -> Result<Grid> {
    if !(a.is_finite() && b.is_finite()) || b <= a {
        return usage(format!("uniform_grid: need a < b, got [{a}, {b}]"));
    }
    if panels == 0 {
        return usage("uniform_grid: panel count must be at least 1");
    }
    let len = b - a;
    let edges: Vec<f64> = (0..=panels)
        .map(|j| {
            if j == panels {
                b
            } else {
                a + len * j as f64 / panels as f64
            }
        })
        .collect();
    Grid::from_edges(&edges)
}

/// Uniform grid whose node spacing is as close as possible to `node_spacing`
/// (panel width `2 * node_spacing`).
pub fn uniform_grid_with_spacing(a: f64, b: f64, node_spacing: f64) -> Result<Grid> {
    if !(node_spacing > 0.0 && node_spacing.is_finite()) {
        return usage(format!("node spacing must be positive, got {node_spacing}"));
    }
    let panels = ((b - a) / (2.0 * node_spacing)).round().max(1.0);
    if panels > u32::MAX as f64 {
        return usage("node spacing too small for the interval");
    }
    uniform_grid(a, b, panels as usize)
}

/// Symmetric graded grid, fine at the centre `c = (a + b) / 2` and coarse
/// towards the ends.
///
/// Panels are laid out from `c` outwards; a panel whose inner edge sits at
/// distance `d` from `c` has width `h_min * min(ratio_max, exp(growth * d))`.
/// The half-grid is then mirrored. At the end of each half, a leftover shorter
/// than half a panel is merged into the last panel, which is split in two
/// equal panels if the merge would exceed `h_min * ratio_max`.
pub fn graded_grid(a: f64, b: f64, h_min: f64, growth: f64, ratio_max: f64) -> Result<Grid> {
    if !(a.is_finite() && b.is_finite()) || b <= a {
        return usage(format!("graded_grid: need a < b, got [{a}, {b}]"));
    }
    if !(h_min > 0.0 && h_min.is_finite()) {
        return usage(format!("graded_grid: h_min must be positive, got {h_min}"));
    }
    if !(growth >= 0.0 && growth.is_finite()) {
        return usage(format!("graded_grid: growth must be nonnegative, got {growth}"));
    }
    if !(ratio_max >= 1.0 && ratio_max.is_finite()) {
        return usage(format!("graded_grid: ratio_max must be at least 1, got {ratio_max}"));
    }
    let half = 0.5 * (b - a);
    if half / h_min > 1e8 {
        return usage("graded_grid: h_min too small for the interval");
    }
    let cap = h_min * ratio_max;

    // Distances from the centre of the outward panel edges.
    let mut d = vec![0.0];
    loop {
        let last = *d.last().unwrap();
        let h = h_min * ratio_max.min((growth * last).exp());
        if last + h < half - 1e-9 * h {
            d.push(last + h);
            continue;
        }
        let rest = half - last;
        if rest < 0.5 * h && d.len() > 1 {
            let prev = d[d.len() - 2];
            let merged = half - prev;
            if merged > cap {
                let k = d.len() - 1;
                d[k] = prev + 0.5 * merged;
            } else {
                d.pop();
            }
        }
        d.push(half);
        break;
    }
    if d.len() < 2 {
        return usage("graded_grid: parameters produce no panels");
    }

    let c = a + half;
    let mut edges = Vec::with_capacity(2 * d.len() - 1);
    edges.extend(d.iter().rev().map(|&t| if t == half { a } else { c - t }));
    edges.extend(d.iter().skip(1).map(|&t| if t == half { b } else { c + t }));
    Grid::from_edges(&edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn assert_invariants(g: &Grid) {
        assert_eq!(g.node_count(), 2 * g.panel_count() + 1);
        let len = g.b() - g.a();
        let wsum: f64 = g.weights().iter().sum();
        assert!((wsum - len).abs() <= 1e-13 * len, "Σw = {wsum}, b-a = {len}");
        assert!(g.weights().iter().all(|&w| w > 0.0));
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        assert_eq!(g.nodes()[0], g.a());
        assert_eq!(*g.nodes().last().unwrap(), g.b());
        let psum: f64 = g.panels().iter().sum();
        assert!((psum - len).abs() <= 1e-12 * len);
    }

    #[test]
    fn single_panel_weights() {
        let g = uniform_grid(0.0, 1.0, 1).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.5, 1.0]);
        let w = g.weights();
        assert!((w[0] - 1.0 / 6.0).abs() < 1e-16);
        assert!((w[1] - 2.0 / 3.0).abs() < 1e-16);
        assert!((w[2] - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn two_panel_weights() {
        let g = uniform_grid(0.0, 2.0, 2).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.5, 1.0, 1.5, 2.0]);
        let expect = [1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 6.0];
        for (w, e) in g.weights().iter().zip(expect) {
            assert!((w - e).abs() < 1e-15);
        }
        assert_eq!(g.dx_max(), 1.0);
    }

    #[test]
    fn bad_arguments() {
        assert!(uniform_grid(1.0, 1.0, 3).is_err());
        assert!(uniform_grid(0.0, 1.0, 0).is_err());
        assert!(graded_grid(0.0, -1.0, 0.1, 0.0, 1.0).is_err());
        assert!(graded_grid(0.0, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(graded_grid(0.0, 1.0, 0.1, -1.0, 1.0).is_err());
        assert!(graded_grid(0.0, 1.0, 0.1, 0.0, 0.5).is_err());
        assert!(Grid::from_edges(&[0.0]).is_err());
        assert!(Grid::from_edges(&[0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn cubic_is_exact() {
        let g = uniform_grid(0.0, 1.0, 4).unwrap();
        let v = g.integrate_fn(|x| c(x * x * x));
        assert!((v.re - 0.25).abs() < 1e-14);
        let k = g.integrate(&vec![c(3.0); g.node_count()]).unwrap();
        assert!((k.re - 3.0).abs() < 1e-14);
        assert!(g.integrate(&[c(1.0)]).is_err());
    }

    #[test]
    fn cubics_exact_on_graded_grids() {
        let g = graded_grid(-3.0, 5.0, 0.07, 0.9, 6.0).unwrap();
        assert_invariants(&g);
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x - 0.25 * x * x * x;
        let anti = |x: f64| x - x * x + x.powi(3) / 6.0 - x.powi(4) / 16.0;
        let exact = anti(5.0) - anti(-3.0);
        let v = g.integrate_fn(|x| c(p(x))).re;
        assert!((v - exact).abs() <= 1e-13 * exact.abs());
    }

    #[test]
    fn sech_squared_converges_at_fourth_order() {
        let exact = 2.0 * 10f64.tanh();
        let mut errs = Vec::new();
        for m in [20, 40, 80, 160] {
            let g = uniform_grid(-10.0, 10.0, m).unwrap();
            let v = g.integrate_fn(|x| c(1.0 / x.cosh().powi(2))).re;
            errs.push((v - exact).abs());
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 3.9, "observed order {order}, errors {errs:?}");
        }
    }

    #[test]
    fn graded_with_unit_ratio_is_uniform() {
        let g = graded_grid(-1.0, 1.0, 0.1, 0.5, 1.0).unwrap();
        assert_invariants(&g);
        assert_eq!(g.panel_count(), 20);
        for &h in g.panels() {
            assert!((h - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn graded_ratio_eight() {
        let half: f64 = 7.32;
        let h_min = 0.05;
        // reach the cap three quarters of the way out
        let growth = 8f64.ln() / (0.75 * half);
        let g = graded_grid(-half, half, h_min, growth, 8.0).unwrap();
        assert_invariants(&g);
        let ratio = g.dx_max() / g.dx_min();
        assert!((ratio - 8.0).abs() < 1e-9, "ratio {ratio}");
        assert!(g.dx_max() <= h_min * 8.0 * (1.0 + 1e-12));
        // symmetric about 0
        let n = g.node_count();
        for i in 0..n {
            assert!((g.nodes()[i] + g.nodes()[n - 1 - i]).abs() < 1e-12);
        }
    }

    #[test]
    fn graded_coarser_than_interval() {
        let g = graded_grid(0.0, 1.0, 5.0, 0.0, 1.0).unwrap();
        assert_invariants(&g);
        assert_eq!(g.panel_count(), 2);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn graded_invariants(
                a in -20.0f64..0.0,
                len in 0.1f64..40.0,
                h_min in 0.01f64..1.0,
                growth in 0.0f64..2.0,
                ratio in 1.0f64..16.0,
            ) {
                let g = graded_grid(a, a + len, h_min, growth, ratio).unwrap();
                assert_invariants(&g);
                prop_assert!(g.dx_max() <= (h_min * ratio).max(len / 2.0) * (1.0 + 1e-12));
            }

            #[test]
            fn uniform_invariants(a in -5.0f64..5.0, len in 0.01f64..10.0, m in 1usize..400) {
                let g = uniform_grid(a, a + len, m).unwrap();
                assert_invariants(&g);
                prop_assert!((g.dx_max() - len / m as f64).abs() < 1e-12 * len);
            }
        }
    }
}
