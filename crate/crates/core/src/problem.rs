//! Problem description and solver parameters shared across modules.

use std::sync::Arc;

use crate::error::Result;
use crate::grid::{Grid, GridFn, OneSided, Side, C64};
use crate::interactions::InteractionSet;
use crate::potential::Potential;

/// A δ-interaction Schrödinger problem sampled on its grid.
#[derive(Debug, Clone)]
pub struct Problem {
    pub iset: InteractionSet,
    pub potential: Potential,
    pub grid: Arc<Grid>,
    pub q: GridFn,
}

impl Problem {
    pub fn new(iset: InteractionSet, potential: Potential, grid_m: usize) -> Result<Self> {
        let grid = iset.grid(grid_m)?;
        let q = potential.sample(&grid)?;
        Ok(Problem {
            iset,
            potential,
            grid,
            q,
        })
    }

    pub fn b(&self) -> f64 {
        self.iset.b()
    }

    /// The reflected problem with `q*(x) = q(b - x)` and interactions `I_N*`.
    pub fn reflected(&self) -> Result<Self> {
        let iset = self.iset.reflected();
        let potential = match &self.potential {
            Potential::Samples(values) => {
                Potential::Samples(values.iter().rev().copied().collect())
            }
            Potential::Zero => Potential::Zero,
            Potential::Polynomial(coeffs) => {
                // q(b - x) expanded in powers of x
                let b = self.b();
                let mut out = vec![0.0; coeffs.len()];
                for &c in coeffs.iter().rev() {
                    let mut carry = c;
                    for slot in out.iter_mut() {
                        let next = *slot * b + carry;
                        carry = *slot;
                        *slot = next;
                    }
                }
                for (k, v) in out.iter_mut().enumerate() {
                    if k % 2 == 1 {
                        *v = -*v;
                    }
                }
                Potential::Polynomial(out)
            }
        };
        Problem::new(iset, potential, self.grid.m())
    }

    pub fn is_real(&self) -> bool {
        let q_real = match &self.potential {
            Potential::Zero => true,
            Potential::Polynomial(_) => true,
            Potential::Samples(v) => v.iter().all(|z| z.im == 0.0),
        };
        q_real && self.iset.is_real()
    }
}

/// Numerical parameters. Defaults follow the library-wide conventions:
/// grid of `M = 2000` intervals and `K_max = 100` formal powers.
#[derive(Debug, Clone)]
pub struct Numerics {
    /// Number of grid intervals `M`.
    pub grid_m: usize,
    /// Number of formal powers kept in SPPS tables.
    pub k_max: usize,
    /// Highest Fourier-Legendre coefficient order `N_max`.
    pub n_max: usize,
    /// NSBF truncation order `M` (number of series terms minus one).
    pub nsbf_terms: usize,
    /// SPPS series truncation (terms of the λ-power series).
    pub spps_terms: usize,
    /// Runge-Kutta substeps per grid interval for the oracle.
    pub oracle_substeps: usize,
    /// Seed for the deterministic non-vanishing-solution search.
    pub seed: u64,
    /// Target number of propagation chunks across `[0, b]`. Splitting keeps
    /// `|ρ| · chunk_length` small, which is what bounds the cancellation of
    /// the SPPS series at large `|ρ| b`.
    pub propagation_chunks: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            grid_m: 2000,
            k_max: 100,
            n_max: 100,
            nsbf_terms: 30,
            spps_terms: 50,
            oracle_substeps: 32,
            seed: 1,
            propagation_chunks: 8,
        }
    }
}

/// How a solution was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    SumOverJ,
    Propagation,
    Spps,
    Nsbf,
    Oracle,
}

/// A solution of the Cauchy problem on the full grid: continuous values and
/// one-sided first derivatives (they differ exactly at interaction nodes).
#[derive(Debug, Clone)]
pub struct Solution {
    pub rho: C64,
    pub values: GridFn,
    pub deriv: OneSided,
    pub provenance: Provenance,
}

impl Solution {
    pub fn value_at(&self, j: usize) -> C64 {
        self.values.values[j]
    }

    pub fn deriv_at(&self, j: usize, side: Side) -> C64 {
        self.deriv.at(j, side)
    }

    /// Largest violation of the jump conditions
    /// `u'(x_k+) - u'(x_k-) = α_k u(x_k)` over all interaction nodes.
    pub fn jump_residual(&self, iset: &InteractionSet) -> f64 {
        let grid = &self.values.grid;
        let mut worst = 0.0f64;
        for (k, &node) in grid.breaks().iter().enumerate() {
            let jump = self.deriv.at(node, Side::Plus) - self.deriv.at(node, Side::Minus);
            let expected = iset.strength(k) * self.value_at(node);
            worst = worst.max((jump - expected).norm());
        }
        worst
    }

    /// Linear combination `a * self + b * other` (same grid, same ρ).
    pub fn combine(&self, a: C64, other: &Solution, b: C64) -> Solution {
        Solution {
            rho: self.rho,
            values: self.values.scale(a).add(&other.values.scale(b)),
            deriv: self.deriv.scale(a).add(&other.deriv.scale(b)),
            provenance: self.provenance,
        }
    }
}

/// Wronskian `u v' - u' v` at node `j` with consistent one-sided limits.
pub fn wronskian_at(u: &Solution, v: &Solution, j: usize, side: Side) -> C64 {
    u.value_at(j) * v.deriv_at(j, side) - u.deriv_at(j, side) * v.value_at(j)
}
