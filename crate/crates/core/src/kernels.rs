//! Exact transmutation kernels for `q ≡ 0` as piecewise polynomials in `t`,
//! the convolution arithmetic behind them, the transmutation-operator action
//! and the Goursat-condition check.
//!
//! For `q ≡ 0` the kernel of `T u(x) = u(x) + ∫_{-x}^x K(x,t) u(t) dt` is a
//! finite sum of characteristic functions and their convolutions:
//!
//! ```text
//! K(x,t) = Σ_k (α_k/2) H(x-x_k) χ_[2x_k-x, x](t)
//!        + Σ_J (α_J/2^{|J|}) H(x-x_{j|J|}) ((Π*) χ_{x_{j_{l+1}}-x_{j_l}}) ∗ χ_{x-x_{j|J|}} (t - x_{j1})
//! ```
//!
//! Pieces are stored in the monomial basis centered at each piece's left
//! breakpoint, which keeps the convolution arithmetic well scaled up to the
//! degrees reachable here (degree ≤ |J| - 1 ≤ N - 1).

use num_complex::Complex64;

use crate::closedform::IndexSequences;
use crate::error::{Result, SolverError};
use crate::grid::{Side, C64};
use crate::interactions::InteractionSet;
use crate::special::gauss_legendre;

const ZERO: C64 = Complex64::new(0.0, 0.0);

fn poly_eval(coeffs: &[C64], u: f64) -> C64 {
    let mut acc = ZERO;
    for &c in coeffs.iter().rev() {
        acc = acc * u + c;
    }
    acc
}

/// Coefficients of `p(u + s)` given those of `p(u)`.
fn poly_shift(coeffs: &[C64], s: f64) -> Vec<C64> {
    let n = coeffs.len();
    let mut out = vec![ZERO; n];
    for (k, &ck) in coeffs.iter().enumerate() {
        // binomial row for (u + s)^k
        let mut binom = 1.0f64;
        let mut s_pow = 1.0f64;
        for j in (0..=k).rev() {
            out[j] += ck * binom * s_pow;
            if j > 0 {
                binom *= j as f64 / (k - j + 1) as f64;
                s_pow *= s;
            }
        }
    }
    out
}

/// A compactly supported piecewise polynomial in `t`. Piece `i` lives on
/// `[breaks[i], breaks[i+1]]` with coefficients in `t - breaks[i]`.
#[derive(Debug, Clone)]
pub struct PiecewisePoly {
    breaks: Vec<f64>,
    pieces: Vec<Vec<C64>>,
}

impl PiecewisePoly {
    pub fn zero() -> Self {
        PiecewisePoly {
            breaks: Vec::new(),
            pieces: Vec::new(),
        }
    }

    /// `value · χ_[a, b]`.
    pub fn characteristic(a: f64, b: f64, value: C64) -> Self {
        assert!(b > a, "characteristic function needs a < b");
        PiecewisePoly {
            breaks: vec![a, b],
            pieces: vec![vec![value]],
        }
    }

    /// Symmetric `value · χ_[-half, half]`.
    pub fn characteristic_symmetric(half: f64, value: C64) -> Self {
        Self::characteristic(-half, half, value)
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        if self.is_zero() {
            None
        } else {
            Some((self.breaks[0], *self.breaks.last().unwrap()))
        }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, &[C64])> {
        self.breaks
            .windows(2)
            .zip(&self.pieces)
            .map(|(w, p)| (w[0], w[1], p.as_slice()))
    }

    pub fn degree(&self) -> usize {
        self.pieces
            .iter()
            .map(|p| {
                p.iter()
                    .rposition(|c| c.norm() > 0.0)
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    fn span(&self) -> f64 {
        self.support().map(|(a, b)| b - a).unwrap_or(0.0)
    }

    pub fn eval(&self, t: f64) -> C64 {
        self.eval_side(t, Side::Plus)
    }

    /// One-sided evaluation; at an interior breakpoint the `Minus` side reads
    /// the piece ending there, the `Plus` side the piece starting there.
    pub fn eval_side(&self, t: f64, side: Side) -> C64 {
        if self.is_zero() {
            return ZERO;
        }
        let (lo, hi) = self.support().unwrap();
        let tol = 1e-12 * self.span().max(1.0);
        if t < lo - tol || t > hi + tol {
            return ZERO;
        }
        // index of the piece whose interval contains t
        let mut idx = match self.breaks.binary_search_by(|b| b.partial_cmp(&t).unwrap()) {
            Ok(exact) => exact,
            Err(ins) => ins.saturating_sub(1),
        };
        // snap to a breakpoint when within tolerance, then bias by side
        let near_break = (0..self.breaks.len())
            .find(|&i| (self.breaks[i] - t).abs() <= tol);
        if let Some(i) = near_break {
            idx = match side {
                Side::Plus => i.min(self.pieces.len() - 1),
                Side::Minus => i.saturating_sub(1),
            };
            if i == 0 {
                idx = 0;
            }
        }
        idx = idx.min(self.pieces.len() - 1);
        poly_eval(&self.pieces[idx], t - self.breaks[idx])
    }

    pub fn scale(&self, c: C64) -> Self {
        PiecewisePoly {
            breaks: self.breaks.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| p.iter().map(|&v| c * v).collect())
                .collect(),
        }
    }

    /// Shift the support: `p(t - dx)`.
    pub fn shifted(&self, dx: f64) -> Self {
        PiecewisePoly {
            breaks: self.breaks.iter().map(|b| b + dx).collect(),
            pieces: self.pieces.clone(),
        }
    }

    pub fn add(&self, other: &PiecewisePoly) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let tol = 1e-12 * (self.span() + other.span()).max(1.0);
        let mut breaks: Vec<f64> = self
            .breaks
            .iter()
            .chain(other.breaks.iter())
            .copied()
            .collect();
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() <= tol);
        let mut pieces = Vec::with_capacity(breaks.len() - 1);
        for w in breaks.windows(2) {
            let left = w[0];
            let mid = 0.5 * (w[0] + w[1]);
            let mut acc: Vec<C64> = Vec::new();
            for part in [self, other] {
                if let Some(p) = part.piece_at(mid) {
                    let shifted = poly_shift(&part.pieces[p], left - part.breaks[p]);
                    if acc.len() < shifted.len() {
                        acc.resize(shifted.len(), ZERO);
                    }
                    for (a, b) in acc.iter_mut().zip(shifted) {
                        *a += b;
                    }
                }
            }
            if acc.is_empty() {
                acc.push(ZERO);
            }
            pieces.push(acc);
        }
        PiecewisePoly { breaks, pieces }
    }

    fn piece_at(&self, t: f64) -> Option<usize> {
        let (lo, hi) = self.support()?;
        if t < lo || t > hi {
            return None;
        }
        let idx = self
            .breaks
            .partition_point(|&b| b <= t)
            .saturating_sub(1)
            .min(self.pieces.len() - 1);
        Some(idx)
    }

    /// Exact convolution. The result is supported on the Minkowski sum of
    /// the supports and its degree is `deg p + deg q + 1`. On each output
    /// interval the convolution is a polynomial of that degree; it is
    /// recovered by interpolation through exactly computed samples.
    pub fn convolve(&self, other: &PiecewisePoly) -> PiecewisePoly {
        if self.is_zero() || other.is_zero() {
            return PiecewisePoly::zero();
        }
        let deg = self.degree() + other.degree() + 1;
        let mut crit: Vec<f64> = Vec::new();
        for &a in &self.breaks {
            for &b in &other.breaks {
                crit.push(a + b);
            }
        }
        crit.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let tol = 1e-12 * (self.span() + other.span()).max(1.0);
        crit.dedup_by(|a, b| (*a - *b).abs() <= tol);

        let n_samples = deg + 1;
        let mut breaks = Vec::with_capacity(crit.len());
        let mut pieces = Vec::with_capacity(crit.len().saturating_sub(1));
        breaks.push(crit[0]);
        for w in crit.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let width = hi - lo;
            if width <= tol {
                continue;
            }
            // Chebyshev sample points in local coordinates
            let mut us = Vec::with_capacity(n_samples);
            let mut vals = Vec::with_capacity(n_samples);
            for i in 0..n_samples {
                let theta = std::f64::consts::PI * (2.0 * i as f64 + 1.0)
                    / (2.0 * n_samples as f64);
                let u = 0.5 * width * (1.0 - theta.cos());
                us.push(u);
                vals.push(self.conv_value_at(other, lo + u));
            }
            pieces.push(newton_interpolate(&us, &vals));
            breaks.push(hi);
        }
        if pieces.is_empty() {
            return PiecewisePoly::zero();
        }
        PiecewisePoly { breaks, pieces }
    }

    /// `(self ∗ other)(t)` by exact per-piece-pair Gauss quadrature.
    fn conv_value_at(&self, other: &PiecewisePoly, t: f64) -> C64 {
        let order = (self.degree() + other.degree()) / 2 + 1;
        let (nodes, weights) = gauss_legendre(order.max(1));
        let mut acc = ZERO;
        for (a0, a1, p) in self.pieces() {
            for (b0, b1, q) in other.pieces() {
                let lo = a0.max(t - b1);
                let hi = a1.min(t - b0);
                if hi <= lo {
                    continue;
                }
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                for (&xi, &wi) in nodes.iter().zip(&weights) {
                    let s = mid + half * xi;
                    acc += p
                        .iter()
                        .rev()
                        .fold(ZERO, |a, &c| a * (s - a0) + c)
                        * q.iter().rev().fold(ZERO, |a, &c| a * (t - s - b0) + c)
                        * (wi * half);
                }
            }
        }
        acc
    }

    /// `∫ K(t) f(t) dt` over the support by per-piece Gauss quadrature with
    /// `order` nodes per piece.
    pub fn integrate_against(&self, order: usize, f: impl Fn(f64) -> C64) -> C64 {
        let (nodes, weights) = gauss_legendre(order.max(2));
        let mut acc = ZERO;
        for (lo, hi, p) in self.pieces() {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (&xi, &wi) in nodes.iter().zip(&weights) {
                let t = mid + half * xi;
                acc += poly_eval(p, t - lo) * f(t) * (wi * half);
            }
        }
        acc
    }

    /// `∫ K(t) dt` exactly.
    pub fn integral(&self) -> C64 {
        let mut acc = ZERO;
        for (lo, hi, p) in self.pieces() {
            let w = hi - lo;
            let mut w_pow = w;
            for (k, &c) in p.iter().enumerate() {
                acc += c * w_pow / (k as f64 + 1.0);
                w_pow *= w;
            }
        }
        acc
    }

    /// `∫ |K(t)|² dt`, exact up to the quadrature degree.
    pub fn l2_norm_sq(&self) -> f64 {
        let order = self.degree() + 1;
        let (nodes, weights) = gauss_legendre(order.max(2));
        let mut acc = 0.0;
        for (lo, hi, p) in self.pieces() {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (&xi, &wi) in nodes.iter().zip(&weights) {
                let t = mid + half * xi;
                acc += poly_eval(p, t - lo).norm_sqr() * wi * half;
            }
        }
        acc
    }
}

/// Newton interpolation through `(us[i], vals[i])`, returned in the monomial
/// basis of the local variable.
fn newton_interpolate(us: &[f64], vals: &[C64]) -> Vec<C64> {
    let n = us.len();
    let mut dd: Vec<C64> = vals.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (us[i] - us[i - level]);
        }
    }
    let mut coeffs = vec![dd[n - 1]];
    for i in (0..n - 1).rev() {
        // coeffs := coeffs * (u - us[i]) + dd[i]
        coeffs.push(ZERO);
        for k in (1..coeffs.len()).rev() {
            let lower = coeffs[k - 1];
            coeffs[k] = coeffs[k] * 1.0 + lower;
        }
        coeffs[0] = ZERO;
        // subtract us[i] * previous coefficients
        for k in 0..coeffs.len() - 1 {
            let upper = coeffs[k + 1];
            coeffs[k] -= upper * us[i];
        }
        coeffs[0] += dd[i];
    }
    coeffs
}

/// Exact `q ≡ 0` transmutation kernel `K(x, ·)` for the interaction set.
pub fn exact_kernel_q0(iset: &InteractionSet, x: f64) -> Result<PiecewisePoly> {
    if !(x > 0.0) || x > iset.b() {
        return Err(SolverError::KernelDomain { x });
    }
    let n = iset.n();
    let seqs = IndexSequences::new(n)?;
    let _ = &seqs; // enumeration guard; the DFS below walks the same set
    let mut kernel = PiecewisePoly::zero();
    for k in 0..n {
        if x > iset.position(k) {
            kernel = kernel.add(&PiecewisePoly::characteristic(
                2.0 * iset.position(k) - x,
                x,
                iset.strength(k) * 0.5,
            ));
        }
    }
    // J-terms by a depth-first walk over increasing sequences, carrying the
    // convolution of the gap characteristic functions per prefix so every
    // extension costs a single convolution
    struct Frame {
        last: usize,
        weight: C64,
        gaps: Option<PiecewisePoly>,
    }
    for j1 in 0..n {
        let mut stack = vec![Frame {
            last: j1,
            weight: iset.strength(j1),
            gaps: None,
        }];
        while let Some(frame) = stack.pop() {
            for next in frame.last + 1..n {
                let half_gap = PiecewisePoly::characteristic_symmetric(
                    iset.position(next) - iset.position(frame.last),
                    C64::new(0.5, 0.0),
                );
                let gaps = match &frame.gaps {
                    None => half_gap,
                    Some(g) => g.convolve(&half_gap),
                };
                let weight = frame.weight * iset.strength(next);
                if x > iset.position(next) {
                    let tail = PiecewisePoly::characteristic_symmetric(
                        x - iset.position(next),
                        C64::new(0.5, 0.0),
                    );
                    let term = gaps
                        .convolve(&tail)
                        .shifted(iset.position(j1))
                        .scale(weight);
                    kernel = kernel.add(&term);
                }
                stack.push(Frame {
                    last: next,
                    weight,
                    gaps: Some(gaps),
                });
            }
        }
    }
    Ok(kernel)
}

/// Input kinds for the transmutation operator.
pub enum TransmutationInput<'a> {
    /// `t^k`
    Monomial(usize),
    /// global monomial coefficients `c_0 + c_1 t + ...`
    Polynomial(&'a [C64]),
    /// `e^{iρt}`
    Exponential(C64),
    /// arbitrary integrand, integrated with a fixed Gauss rule
    Function(&'a dyn Fn(f64) -> C64),
}

/// `T u(x) = u(x) + ∫_{-x}^x K(x, t) u(t) dt`, linear in `u`.
pub fn apply_transmutation(kernel: &PiecewisePoly, input: &TransmutationInput, x: f64) -> C64 {
    let direct = match input {
        TransmutationInput::Monomial(k) => C64::new(x.powi(*k as i32), 0.0),
        TransmutationInput::Polynomial(c) => {
            let mut acc = ZERO;
            for &ck in c.iter().rev() {
                acc = acc * x + ck;
            }
            acc
        }
        TransmutationInput::Exponential(rho) => (C64::new(0.0, 1.0) * rho * x).exp(),
        TransmutationInput::Function(f) => f(x),
    };
    if kernel.is_zero() {
        return direct;
    }
    let integral = match input {
        TransmutationInput::Monomial(k) => {
            let order = (kernel.degree() + k) / 2 + 1;
            kernel.integrate_against(order, |t| C64::new(t.powi(*k as i32), 0.0))
        }
        TransmutationInput::Polynomial(c) => {
            let order = (kernel.degree() + c.len()) / 2 + 1;
            kernel.integrate_against(order, |t| {
                let mut acc = ZERO;
                for &ck in c.iter().rev() {
                    acc = acc * t + ck;
                }
                acc
            })
        }
        TransmutationInput::Exponential(rho) => {
            let span = kernel.span();
            let order = 24 + (rho.norm() * span) as usize;
            kernel.integrate_against(order, |t| (C64::new(0.0, 1.0) * rho * t).exp())
        }
        TransmutationInput::Function(f) => kernel.integrate_against(48, |t| f(t)),
    };
    direct + integral
}

/// Deviations from the Goursat conditions `K(x, x-) = ½(h + ∫_0^x q + σ(x))`
/// and `K(x, -x+) = h/2` for a `q ≡ 0` kernel.
#[derive(Debug, Clone)]
pub struct GoursatReport {
    pub x: f64,
    pub diagonal_deviation: f64,
    pub antidiagonal_deviation: f64,
}

pub fn goursat_check(
    kernel: &PiecewisePoly,
    iset: &InteractionSet,
    h: C64,
    x: f64,
) -> GoursatReport {
    let diag = kernel.eval_side(x, Side::Minus);
    let anti = kernel.eval_side(-x, Side::Plus);
    let expected_diag = (h + iset.sigma(x, Side::Plus)) * 0.5;
    let expected_anti = h * 0.5;
    GoursatReport {
        x,
        diagonal_deviation: (diag - expected_diag).norm(),
        antidiagonal_deviation: (anti - expected_anti).norm(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interactions::Interaction;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn iset(points: &[(f64, f64)]) -> InteractionSet {
        InteractionSet::new(
            points
                .iter()
                .map(|&(x, a)| Interaction { x, alpha: c(a) })
                .collect(),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn convolution_of_boxes_is_the_trapezoid() {
        let (a, b) = (0.2, 0.5);
        let pa = PiecewisePoly::characteristic_symmetric(a, c(1.0));
        let pb = PiecewisePoly::characteristic_symmetric(b, c(1.0));
        let conv = pa.convolve(&pb);
        let (lo, hi) = conv.support().unwrap();
        assert!((lo + (a + b)).abs() < 1e-14);
        assert!((hi - (a + b)).abs() < 1e-14);
        // plateau value 2a on [-(b-a), b-a]
        for t in [-0.25, 0.0, 0.29] {
            assert!((conv.eval(t) - c(2.0 * a)).norm() < 1e-13, "plateau at {t}");
        }
        // ramps
        assert!((conv.eval(-0.6) - c(-0.6 + a + b)).norm() < 1e-13);
        assert!((conv.eval(0.55) - c(a + b - 0.55)).norm() < 1e-13);
        assert!(conv.eval(0.75).norm() == 0.0);
        // numerical cross-check of the convolution at scattered points
        for t in [-0.64, -0.3, 0.11, 0.42, 0.69] {
            let mut num = ZERO;
            let steps = 40000;
            let h = 2.0 * a / steps as f64;
            for i in 0..steps {
                let s = -a + (i as f64 + 0.5) * h;
                num += pb.eval(t - s) * h;
            }
            assert!((conv.eval(t) - num).norm() < 1e-6, "numerical check at {t}");
        }
    }

    #[test]
    fn convolving_with_zero_gives_zero() {
        let pa = PiecewisePoly::characteristic(0.0, 1.0, c(1.0));
        assert!(pa.convolve(&PiecewisePoly::zero()).is_zero());
    }

    #[test]
    fn kernel_single_interaction_is_a_box() {
        let set = iset(&[(0.3, 2.0)]);
        let x = 0.8;
        let kernel = exact_kernel_q0(&set, x).unwrap();
        let (lo, hi) = kernel.support().unwrap();
        assert!((lo - (2.0 * 0.3 - x)).abs() < 1e-14);
        assert!((hi - x).abs() < 1e-14);
        for t in [-0.15, 0.0, 0.5, 0.79] {
            assert!((kernel.eval(t) - c(1.0)).norm() < 1e-13);
        }
        assert!(kernel.eval(-0.5).norm() == 0.0);
        // below the interaction point the kernel vanishes
        let empty = exact_kernel_q0(&set, 0.25).unwrap();
        assert!(empty.is_zero());
        assert!(exact_kernel_q0(&set, 0.0).is_err());
    }

    #[test]
    fn kernel_two_interactions_matches_case_formula() {
        let (x1, x2, a1, a2) = (0.25, 0.75, 1.0, 2.0);
        let set = iset(&[(x1, a1), (x2, a2)]);
        let x = 1.0;
        let kernel = exact_kernel_q0(&set, x).unwrap();
        let case = |t: f64| -> f64 {
            // χ_{x2-x1} ∗ χ_{x-x2} (t - x1), paper's explicit case split
            let d = (2.0 * x2 - x - x1).abs();
            if t <= 2.0 * x1 - x || t >= x {
                0.0
            } else if t < x1 - d {
                t + x - 2.0 * x1
            } else if t <= x1 + d {
                x - x1 - d
            } else {
                x - t
            }
        };
        for i in 0..=1000 {
            let t = -1.0 + 2.0 * i as f64 / 1000.0;
            let mut expected = 0.0;
            if t > 2.0 * x1 - x && t < x {
                expected += a1 / 2.0;
            }
            if t > 2.0 * x2 - x && t < x {
                expected += a2 / 2.0;
            }
            expected += a1 * a2 / 4.0 * case(t);
            let got = kernel.eval_side(t, Side::Plus).re;
            // skip exact breakpoints where the χ terms are genuinely one-sided
            let near_break = kernel
                .breaks()
                .iter()
                .any(|&b| (b - t).abs() < 1e-9);
            if !near_break {
                assert!(
                    (got - expected).abs() <= 1e-12,
                    "kernel mismatch at t = {t}: {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn degree_and_support_bookkeeping_for_j_terms() {
        let set = iset(&[(0.2, 1.0), (0.45, -1.5), (0.7, 2.0)]);
        let x = 0.95;
        let kernel = exact_kernel_q0(&set, x).unwrap();
        // highest-order J = (1,2,3): degree |J| - 1 = 2
        assert!(kernel.degree() <= 2);
        let (lo, hi) = kernel.support().unwrap();
        assert!((lo - (2.0 * 0.2 - x)).abs() < 1e-12);
        assert!((hi - x).abs() < 1e-12);
    }

    #[test]
    fn transmutation_with_zero_kernel_is_identity() {
        let input = TransmutationInput::Monomial(3);
        let v = apply_transmutation(&PiecewisePoly::zero(), &input, 0.7);
        assert!((v - c(0.343)).norm() < 1e-15);
    }

    #[test]
    fn transmuted_exponential_reproduces_closed_form_e() {
        // T[e^{iρt}](x) = e(ρ,x) for q ≡ 0, N = 1
        let set = iset(&[(0.5, 2.0)]);
        let x = 0.9;
        let kernel = exact_kernel_q0(&set, x).unwrap();
        for &rho in &[c(1.0), c(6.0), C64::new(4.0, 0.8)] {
            let got = apply_transmutation(&kernel, &TransmutationInput::Exponential(rho), x);
            let i = C64::new(0.0, 1.0);
            let expected = (i * rho * x).exp()
                + 2.0 * (i * rho * 0.5).exp() * ((rho * (x - 0.5)).sin() / rho);
            assert!(
                (got - expected).norm() <= 1e-10,
                "rho {rho}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn goursat_conditions_for_exact_kernels() {
        let set = iset(&[(0.25, 1.0), (0.75, 2.0)]);
        for &x in &[0.1, 0.4, 0.9, 1.0] {
            let kernel = exact_kernel_q0(&set, x).unwrap();
            let report = goursat_check(&kernel, &set, ZERO, x);
            assert!(
                report.diagonal_deviation <= 1e-12,
                "diagonal at x={x}: {}",
                report.diagonal_deviation
            );
            assert!(
                report.antidiagonal_deviation <= 1e-12,
                "antidiagonal at x={x}: {}",
                report.antidiagonal_deviation
            );
        }
    }

    #[test]
    fn symmetric_split_is_even_and_odd() {
        let set = iset(&[(0.25, 1.0), (0.75, 2.0)]);
        let x = 0.85;
        let kernel = exact_kernel_q0(&set, x).unwrap();
        let g = |t: f64| kernel.eval(t) + kernel.eval(-t);
        let s = |t: f64| kernel.eval(t) - kernel.eval(-t);
        for t in [0.05, 0.21, 0.5, 0.8] {
            assert_eq!(g(t), g(-t), "G must be even at t = {t}");
            assert_eq!(s(t), -s(-t), "S must be odd at t = {t}");
        }
    }
}
