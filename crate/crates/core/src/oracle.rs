//! Independent verification backends: a fixed-step piecewise Runge-Kutta
//! integrator that honors the derivative jump conditions, and brute-force
//! quadrature projections of exact kernels onto the Legendre basis.
//!
//! The integrator is deliberately fixed-step so interaction nodes are never
//! stepped over; it shares no code with the SPPS path it cross-checks.

use num_complex::Complex64;

use crate::grid::{GridFn, OneSided, C64};
use crate::kernels::PiecewisePoly;
use crate::problem::{Problem, Provenance, Solution};
use crate::special::gauss_legendre;

const ZERO: C64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Runge-Kutta substeps per grid interval, at least 4.
    pub substeps: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { substeps: 32 }
    }
}

/// Classical RK4 on `(y, y')` with `y'' = (q(x) - λ) y`, applying
/// `y' ← y' + α_k y` at every interaction node; dense output at grid nodes.
pub fn rk_shoot(
    problem: &Problem,
    cfg: OracleConfig,
    lambda: C64,
    u0: C64,
    u1: C64,
) -> Solution {
    assert!(cfg.substeps >= 4, "oracle needs at least 4 substeps");
    let grid = &problem.grid;
    let n = grid.len();
    let h_sub = grid.step() / cfg.substeps as f64;
    let rhs = |x: f64, y: C64, dy: C64| -> (C64, C64) {
        (dy, (problem.potential.eval(x, grid) - lambda) * y)
    };

    let mut values = vec![ZERO; n];
    let mut dminus = vec![ZERO; n];
    let mut dplus = vec![ZERO; n];
    let mut y = u0;
    let mut dy = u1;
    values[0] = y;
    dminus[0] = dy;
    dplus[0] = dy;
    let mut next_break = 0usize;
    for j in 0..grid.m() {
        let x_left = grid.node(j);
        for s in 0..cfg.substeps {
            let x = x_left + s as f64 * h_sub;
            let (k1y, k1d) = rhs(x, y, dy);
            let (k2y, k2d) = rhs(
                x + 0.5 * h_sub,
                y + k1y * (0.5 * h_sub),
                dy + k1d * (0.5 * h_sub),
            );
            let (k3y, k3d) = rhs(
                x + 0.5 * h_sub,
                y + k2y * (0.5 * h_sub),
                dy + k2d * (0.5 * h_sub),
            );
            let (k4y, k4d) = rhs(x + h_sub, y + k3y * h_sub, dy + k3d * h_sub);
            y += (k1y + (k2y + k3y) * 2.0 + k4y) * (h_sub / 6.0);
            dy += (k1d + (k2d + k3d) * 2.0 + k4d) * (h_sub / 6.0);
        }
        let node = j + 1;
        values[node] = y;
        dminus[node] = dy;
        if next_break < grid.breaks().len() && grid.breaks()[next_break] == node {
            dy += problem.iset.strength(next_break) * y;
            next_break += 1;
        }
        dplus[node] = dy;
    }
    Solution {
        rho: lambda.sqrt(),
        values: GridFn::from_values(grid.clone(), values),
        deriv: OneSided {
            minus: GridFn::from_values(grid.clone(), dminus),
            plus: GridFn::from_values(grid.clone(), dplus),
        },
        provenance: Provenance::Oracle,
    }
}

/// Fourier-Legendre coefficients `a_n(x) = (n + ½) ∫ K(x,t) P_n(t/x) dt`
/// for `n = 0..=n_max`, by piecewise Gauss quadrature of exact degree.
pub fn project_fl_bruteforce(kernel: &PiecewisePoly, x: f64, n_max: usize) -> Vec<C64> {
    let mut out = vec![ZERO; n_max + 1];
    if kernel.is_zero() {
        return out;
    }
    let order = (n_max + kernel.degree()) / 2 + 2;
    let (nodes, weights) = gauss_legendre(order.min(256).max(4));
    for (lo, hi, coeffs) in kernel.pieces() {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (&xi, &wi) in nodes.iter().zip(&weights) {
            let t = mid + half * xi;
            let mut kv = ZERO;
            for &c in coeffs.iter().rev() {
                kv = kv * (t - lo) + c;
            }
            let kv = kv * (wi * half);
            // all Legendre orders in one stable upward pass
            let z = (t / x).clamp(-1.0, 1.0);
            let mut p_prev = 1.0;
            let mut p_cur = z;
            out[0] += kv;
            if n_max >= 1 {
                out[1] += kv * p_cur;
            }
            for n in 2..=n_max {
                let nf = (n - 1) as f64;
                let p_next = ((2.0 * nf + 1.0) * z * p_cur - nf * p_prev) / (nf + 1.0);
                p_prev = p_cur;
                p_cur = p_next;
                out[n] += kv * p_cur;
            }
        }
    }
    for (n, v) in out.iter_mut().enumerate() {
        *v *= n as f64 + 0.5;
    }
    out
}
