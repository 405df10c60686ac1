//! Uniform grids on `[0, b]`, complex grid functions and cumulative
//! quadrature of order 4.
//!
//! Interaction points are required to be grid nodes; the grid records them
//! as break indices and all quadrature is performed segment by segment, so
//! kinks of the integrand at interaction points never degrade the order of
//! the rule.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, SolverError};

pub type C64 = Complex64;

/// Tolerance (relative to `b`) for deciding that a point sits on a node.
pub const NODE_SNAP_TOL: f64 = 1e-12;

/// Uniform grid over `[0, b]` with `m` intervals and optional interior
/// break nodes (the interaction points).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    b: f64,
    m: usize,
    step: f64,
    breaks: Vec<usize>,
}

impl Grid {
    pub fn uniform(b: f64, m: usize) -> Result<Arc<Self>> {
        Self::with_breaks(b, m, Vec::new())
    }

    /// `breaks` are interior node indices, strictly increasing.
    pub fn with_breaks(b: f64, m: usize, breaks: Vec<usize>) -> Result<Arc<Self>> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(SolverError::Invalid(format!(
                "interval length b must be positive and finite, got {b}"
            )));
        }
        if m + 1 < 5 {
            return Err(SolverError::GridTooCoarse { nodes: m + 1 });
        }
        for w in breaks.windows(2) {
            if w[0] >= w[1] {
                return Err(SolverError::Invalid(
                    "break nodes must be strictly increasing".into(),
                ));
            }
        }
        if let (Some(&first), Some(&last)) = (breaks.first(), breaks.last()) {
            if first == 0 || last >= m {
                return Err(SolverError::Invalid(
                    "break nodes must be interior".into(),
                ));
            }
        }
        Ok(Arc::new(Grid {
            b,
            m,
            step: b / m as f64,
            breaks,
        }))
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of intervals.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of nodes, `m + 1`.
    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == self.m {
            self.b
        } else {
            j as f64 * self.step
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |j| self.node(j))
    }

    pub fn breaks(&self) -> &[usize] {
        &self.breaks
    }

    /// Node index of `x` if `x` lies on a node within `NODE_SNAP_TOL * b`.
    pub fn node_index_of(&self, x: f64) -> Option<usize> {
        let j = (x / self.step).round();
        if j < 0.0 || j > self.m as f64 {
            return None;
        }
        let j = j as usize;
        ((x - self.node(j)).abs() <= NODE_SNAP_TOL * self.b).then_some(j)
    }

    /// Smooth segments `(start_node, end_node)` delimited by the breaks.
    pub fn segments(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.breaks.len() + 1);
        let mut start = 0usize;
        for &brk in &self.breaks {
            out.push((start, brk));
            start = brk;
        }
        out.push((start, self.m));
        out
    }
}

/// Complex-valued samples on every node of a [`Grid`].
#[derive(Debug, Clone)]
pub struct GridFn {
    pub grid: Arc<Grid>,
    pub values: Vec<C64>,
}

impl GridFn {
    pub fn from_values(grid: Arc<Grid>, values: Vec<C64>) -> Self {
        assert_eq!(values.len(), grid.len(), "value count must match grid");
        GridFn { grid, values }
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> C64) -> Self {
        let values = grid.nodes().map(f).collect();
        GridFn { grid, values }
    }

    pub fn from_real_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    pub fn constant(grid: Arc<Grid>, c: C64) -> Self {
        let values = vec![c; grid.len()];
        GridFn { grid, values }
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        Self::constant(grid, C64::new(0.0, 0.0))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        GridFn {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip(&self, other: &GridFn, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.len(), other.len());
        GridFn {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &GridFn) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFn) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &GridFn) -> Self {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|v| c * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn min_abs(&self) -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (j, v) in self.values.iter().enumerate() {
            let a = v.norm();
            if a < best.1 {
                best = (j, a);
            }
        }
        best
    }

    /// Cumulative integral `G(x_j) = ∫_0^{x_j} g`, `G(0) = 0`.
    ///
    /// Composite rule of order 4: each interval is integrated with the cubic
    /// through four neighbouring nodes (order-matched one-sided stencils at
    /// segment ends). Integration restarts at every grid break so kinks at
    /// interaction nodes stay on stencil boundaries.
    pub fn cumulative_integral(&self) -> Result<GridFn> {
        if self.len() < 5 {
            return Err(SolverError::GridTooCoarse { nodes: self.len() });
        }
        let h = self.grid.step();
        let mut out = vec![C64::new(0.0, 0.0); self.len()];
        for (s, e) in self.grid.segments() {
            let acc = out[s];
            cumulative_segment(h, &self.values[s..=e], &mut out[s..=e], acc);
        }
        Ok(GridFn {
            grid: self.grid.clone(),
            values: out,
        })
    }

    /// Definite integral over the full grid.
    pub fn integral(&self) -> Result<C64> {
        Ok(*self.cumulative_integral()?.values.last().unwrap())
    }
}

/// Order-4 cumulative rule on one smooth segment; `g` and `out` span the
/// same nodes, `out[0]` is left untouched and the running value starts at
/// `acc`.
fn cumulative_segment(h: f64, g: &[C64], out: &mut [C64], mut acc: C64) {
    let n_int = g.len() - 1;
    match n_int {
        0 => {}
        1 => {
            acc += (g[0] + g[1]) * (h / 2.0);
            out[1] = acc;
        }
        2 => {
            acc += (g[0] * 5.0 + g[1] * 8.0 - g[2]) * (h / 12.0);
            out[1] = acc;
            acc += (-g[0] + g[1] * 8.0 + g[2] * 5.0) * (h / 12.0);
            out[2] = acc;
        }
        _ => {
            for i in 0..n_int {
                let inc = if i == 0 {
                    g[0] * 9.0 + g[1] * 19.0 - g[2] * 5.0 + g[3]
                } else if i == n_int - 1 {
                    g[i - 2] - g[i - 1] * 5.0 + g[i] * 19.0 + g[i + 1] * 9.0
                } else {
                    -g[i - 1] + g[i] * 13.0 + g[i + 1] * 13.0 - g[i + 2]
                };
                acc += inc * (h / 24.0);
                out[i + 1] = acc;
            }
        }
    }
}

/// Which one-sided limit to take at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

/// A grid function with distinct one-sided values, used for derivatives of
/// solutions across interaction points. The two arrays differ only at break
/// nodes; `minus[0]` and `plus[m]` are the interior one-sided limits.
#[derive(Debug, Clone)]
pub struct OneSided {
    pub minus: GridFn,
    pub plus: GridFn,
}

impl OneSided {
    pub fn from_continuous(g: GridFn) -> Self {
        OneSided {
            minus: g.clone(),
            plus: g,
        }
    }

    pub fn at(&self, j: usize, side: Side) -> C64 {
        match side {
            Side::Minus => self.minus.values[j],
            Side::Plus => self.plus.values[j],
        }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        OneSided {
            minus: self.minus.map(&f),
            plus: self.plus.map(&f),
        }
    }

    pub fn zip(&self, other: &OneSided, f: impl Fn(C64, C64) -> C64) -> Self {
        OneSided {
            minus: self.minus.zip(&other.minus, &f),
            plus: self.plus.zip(&other.plus, &f),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &OneSided) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn mul(&self, g: &GridFn) -> Self {
        OneSided {
            minus: self.minus.mul(g),
            plus: self.plus.mul(g),
        }
    }

    /// Cumulative integral of a one-sided integrand: each smooth segment is
    /// integrated with its own one-sided limits at the segment ends, so
    /// integrands that jump at interaction nodes are handled at full order.
    pub fn cumulative_integral(&self) -> Result<GridFn> {
        let grid = self.minus.grid.clone();
        if grid.len() < 5 {
            return Err(SolverError::GridTooCoarse { nodes: grid.len() });
        }
        let h = grid.step();
        let mut out = vec![C64::new(0.0, 0.0); grid.len()];
        let mut local = Vec::new();
        for (s, e) in grid.segments() {
            local.clear();
            local.push(self.plus.values[s]);
            local.extend_from_slice(&self.minus.values[s + 1..=e]);
            let acc = out[s];
            cumulative_segment(h, &local, &mut out[s..=e], acc);
        }
        Ok(GridFn { grid, values: out })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(g: &GridFn) -> Vec<f64> {
        g.values.iter().map(|v| v.re).collect()
    }

    #[test]
    fn constant_integrand_is_exact() {
        let grid = Grid::uniform(1.0, 1000).unwrap();
        let one = GridFn::constant(grid, C64::new(1.0, 0.0));
        let g = one.cumulative_integral().unwrap();
        assert!((real(&g).last().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn linear_integrand_is_exact() {
        let grid = Grid::uniform(1.0, 64).unwrap();
        let f = GridFn::from_real_fn(grid, |x| x);
        let g = f.cumulative_integral().unwrap();
        assert!((real(&g).last().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cubic_integrand_is_exact() {
        let grid = Grid::uniform(2.0, 37).unwrap();
        let f = GridFn::from_real_fn(grid, |x| x * x * x - 2.0 * x * x + 0.5);
        let g = f.cumulative_integral().unwrap();
        // antiderivative x^4/4 - 2x^3/3 + x/2 at 2
        let exact = 4.0 - 16.0 / 3.0 + 1.0;
        assert!((real(&g).last().unwrap() - exact).abs() < 1e-12);
    }

    #[test]
    fn exponential_reaches_order_four() {
        let grid = Grid::uniform(1.0, 2000).unwrap();
        let f = GridFn::from_real_fn(grid, f64::exp);
        let g = f.cumulative_integral().unwrap();
        let exact = 1.0f64.exp() - 1.0;
        assert!((real(&g).last().unwrap() - exact).abs() < 1e-10);

        // order check: halving h shrinks the error by about 16
        let coarse = Grid::uniform(1.0, 100).unwrap();
        let fine = Grid::uniform(1.0, 200).unwrap();
        let e_coarse = (GridFn::from_real_fn(coarse, f64::exp)
            .cumulative_integral()
            .unwrap()
            .values
            .last()
            .unwrap()
            .re
            - exact)
            .abs();
        let e_fine = (GridFn::from_real_fn(fine, f64::exp)
            .cumulative_integral()
            .unwrap()
            .values
            .last()
            .unwrap()
            .re
            - exact)
            .abs();
        let ratio = e_coarse / e_fine;
        assert!(ratio > 8.0 && ratio < 32.0, "observed ratio {ratio}");
    }

    #[test]
    fn linearity_holds_to_rounding() {
        let grid = Grid::uniform(1.0, 500).unwrap();
        let g1 = GridFn::from_real_fn(grid.clone(), |x| (3.0 * x).sin());
        let g2 = GridFn::from_real_fn(grid, |x| 1.0 / (1.0 + x));
        let alpha = C64::new(-1.75, 0.4);
        let lhs = g1.scale(alpha).add(&g2).cumulative_integral().unwrap();
        let rhs = g1
            .cumulative_integral()
            .unwrap()
            .scale(alpha)
            .add(&g2.cumulative_integral().unwrap());
        let dev = lhs.sub(&rhs).max_abs();
        assert!(dev <= 1e-13, "linearity residual {dev}");
    }

    #[test]
    fn kinked_integrand_keeps_order_with_breaks() {
        // |x - 1/2| has a kink; with the break at the node the rule stays exact
        let grid = Grid::with_breaks(1.0, 10, vec![5]).unwrap();
        let f = GridFn::from_real_fn(grid, |x| (x - 0.5).abs());
        let g = f.cumulative_integral().unwrap();
        assert!((real(&g).last().unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn too_coarse_grid_is_rejected() {
        assert!(matches!(
            Grid::uniform(1.0, 3),
            Err(SolverError::GridTooCoarse { nodes: 4 })
        ));
    }

    #[test]
    fn node_lookup_snaps_within_tolerance() {
        let grid = Grid::uniform(1.0, 2000).unwrap();
        assert_eq!(grid.node_index_of(0.5), Some(1000));
        assert_eq!(grid.node_index_of(0.5 + 5e-13), Some(1000));
        assert_eq!(grid.node_index_of(0.50001), None);
    }
}
