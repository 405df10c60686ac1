//! Regular potentials `q` and their primitive `w(y, x) = ½ ∫_y^x q`.

use std::sync::Arc;

use crate::error::{Result, SolverError};
use crate::grid::{Grid, GridFn, C64};

/// The regular part of the potential. `Samples` must match the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Zero,
    /// `q(x) = c_0 + c_1 x + ... + c_d x^d`
    Polynomial(Vec<f64>),
    Samples(Vec<C64>),
}

impl Potential {
    pub fn is_zero(&self) -> bool {
        match self {
            Potential::Zero => true,
            Potential::Polynomial(c) => c.iter().all(|&v| v == 0.0),
            Potential::Samples(v) => v.iter().all(|v| v.norm() == 0.0),
        }
    }

    /// Pointwise evaluation. Sampled potentials are interpolated with the
    /// local cubic through the four nearest nodes.
    pub fn eval(&self, x: f64, grid: &Grid) -> C64 {
        match self {
            Potential::Zero => C64::new(0.0, 0.0),
            Potential::Polynomial(coeffs) => {
                let mut acc = C64::new(0.0, 0.0);
                for &c in coeffs.iter().rev() {
                    acc = acc * x + c;
                }
                acc
            }
            Potential::Samples(values) => {
                let m = grid.m();
                let h = grid.step();
                let pos = (x / h).floor();
                let j = (pos.max(0.0) as usize).min(m.saturating_sub(1));
                let lo = j.saturating_sub(1).min(m - 3);
                let t = x / h - lo as f64;
                // Lagrange cubic on nodes lo .. lo+3
                let mut acc = C64::new(0.0, 0.0);
                for (i, &v) in values[lo..lo + 4].iter().enumerate() {
                    let mut w = 1.0;
                    for k in 0..4 {
                        if k != i {
                            w *= (t - k as f64) / (i as f64 - k as f64);
                        }
                    }
                    acc += v * w;
                }
                acc
            }
        }
    }

    pub fn sample(&self, grid: &Arc<Grid>) -> Result<GridFn> {
        match self {
            Potential::Samples(values) => {
                if values.len() != grid.len() {
                    return Err(SolverError::Invalid(format!(
                        "potential samples length {} must equal grid size {}",
                        values.len(),
                        grid.len()
                    )));
                }
                Ok(GridFn::from_values(grid.clone(), values.clone()))
            }
            _ => Ok(GridFn::from_fn(grid.clone(), |x| self.eval(x, grid))),
        }
    }

    /// The same potential shifted by `x0` and restricted to `[0, b - x0]`:
    /// `q(x + x0)`.
    pub fn shifted(&self, x0: f64, grid: &Grid) -> Potential {
        match self {
            Potential::Zero => Potential::Zero,
            Potential::Polynomial(coeffs) => {
                // expand q(x + x0) in powers of x via Horner with shift
                let mut out = vec![0.0; coeffs.len()];
                for &c in coeffs.iter().rev() {
                    let mut carry = c;
                    for slot in out.iter_mut() {
                        let next = *slot * x0 + carry;
                        carry = *slot;
                        *slot = next;
                    }
                }
                Potential::Polynomial(out)
            }
            Potential::Samples(_) => {
                let start = grid
                    .node_index_of(x0)
                    .expect("shift must land on a grid node");
                match self {
                    Potential::Samples(values) => Potential::Samples(values[start..].to_vec()),
                    _ => unreachable!(),
                }
            }
        }
    }
}

/// `w(y, x) = ½ ∫_y^x q(s) ds` stored through its cumulative half-integral.
#[derive(Debug, Clone)]
pub struct PotentialPrimitive {
    half_cumulative: GridFn,
}

impl PotentialPrimitive {
    pub fn new(q: &GridFn) -> Result<Self> {
        Ok(PotentialPrimitive {
            half_cumulative: q.cumulative_integral()?.scale(C64::new(0.5, 0.0)),
        })
    }

    /// `w(0, x_j)` at node `j`.
    pub fn from_zero(&self, j: usize) -> C64 {
        self.half_cumulative.values[j]
    }

    /// `w(y, x)` between nodes.
    pub fn between(&self, j_y: usize, j_x: usize) -> C64 {
        self.half_cumulative.values[j_x] - self.half_cumulative.values[j_y]
    }
}
