//! The δ-interaction data: positions, strengths and the step function σ.

use std::sync::Arc;

use crate::error::{Result, SolverError};
use crate::grid::{Grid, Side, C64};

/// A single point interaction `α δ(x - x0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interaction {
    pub x: f64,
    pub alpha: C64,
}

/// The interaction set `I_N = {(x_k, α_k)}` on `(0, b)` together with the
/// interval length `b`. `N = 0` describes a regular equation.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionSet {
    points: Vec<Interaction>,
    b: f64,
}

impl InteractionSet {
    pub fn new(points: Vec<Interaction>, b: f64) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(SolverError::InvalidInteractions(format!(
                "interval length must be positive, got {b}"
            )));
        }
        let mut prev = 0.0;
        for (k, p) in points.iter().enumerate() {
            if !(p.x > prev) {
                return Err(SolverError::InvalidInteractions(format!(
                    "interaction points must satisfy 0 < x_1 < ... < x_N < b; x_{} = {}",
                    k + 1,
                    p.x
                )));
            }
            if !(p.x < b) {
                return Err(SolverError::InvalidInteractions(format!(
                    "interaction point x_{} = {} must lie strictly inside (0, {b})",
                    k + 1,
                    p.x
                )));
            }
            if p.alpha.norm() == 0.0 {
                return Err(SolverError::InvalidInteractions(format!(
                    "strength alpha_{} must be non-zero",
                    k + 1
                )));
            }
            prev = p.x;
        }
        Ok(InteractionSet { points, b })
    }

    /// Regular equation on `[0, b]` (no interactions).
    pub fn regular(b: f64) -> Result<Self> {
        Self::new(Vec::new(), b)
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn points(&self) -> &[Interaction] {
        &self.points
    }

    pub fn position(&self, k: usize) -> f64 {
        self.points[k].x
    }

    pub fn strength(&self, k: usize) -> C64 {
        self.points[k].alpha
    }

    pub fn all_strengths_positive_real(&self) -> bool {
        self.points.iter().all(|p| p.alpha.re > 0.0)
    }

    pub fn is_real(&self) -> bool {
        self.points.iter().all(|p| p.alpha.im == 0.0)
    }

    /// Reflected set `I_N* = {(b - x_{N-j}, α_{N-j})}` for the problem on the
    /// reversed interval. Applying it twice returns the original set.
    pub fn reflected(&self) -> InteractionSet {
        let points = self
            .points
            .iter()
            .rev()
            .map(|p| Interaction {
                x: self.b - p.x,
                alpha: p.alpha,
            })
            .collect();
        InteractionSet { points, b: self.b }
    }

    /// Build the uniform grid with every interaction point on a node.
    /// Points that are not representable are rejected, not snapped.
    pub fn grid(&self, m: usize) -> Result<Arc<Grid>> {
        let step = self.b / m as f64;
        let mut breaks = Vec::with_capacity(self.n());
        for p in &self.points {
            let j = (p.x / step).round() as usize;
            if j == 0 || j >= m || (p.x - j as f64 * step).abs() > crate::grid::NODE_SNAP_TOL * self.b
            {
                return Err(SolverError::PointOffGrid {
                    x: p.x,
                    b: self.b,
                    m,
                });
            }
            breaks.push(j);
        }
        for w in breaks.windows(2) {
            if w[0] == w[1] {
                return Err(SolverError::InvalidInteractions(
                    "two interaction points fall on the same grid node".into(),
                ));
            }
        }
        Grid::with_breaks(self.b, m, breaks)
    }

    /// The step function `σ(x) = Σ α_k H(x - x_k)` with one-sided semantics
    /// at the jumps: `σ(x_k-)` excludes `α_k`, `σ(x_k+)` includes it.
    pub fn sigma(&self, x: f64, side: Side) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for p in &self.points {
            let include = match side {
                Side::Minus => p.x < x,
                Side::Plus => p.x <= x,
            };
            if include {
                s += p.alpha;
            }
        }
        s
    }
}
