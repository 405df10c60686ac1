//! Spectral parameter power series: recursive integrals, formal powers,
//! series solutions and the non-vanishing particular solution.
//!
//! Everything here is built on a particular solution `f` of the λ = 0
//! equation that has no zeros on `[0, b]`. The solutions of the full
//! equation are power series in λ = ρ² whose coefficients are the formal
//! powers `φ_f^(k)` obtained by iterated integration against `f²` and
//! `1/f²`.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SolverError};
use crate::grid::{GridFn, OneSided, C64};
use crate::problem::{Problem, Provenance, Solution};

const ZERO: C64 = Complex64::new(0.0, 0.0);
const ONE: C64 = Complex64::new(1.0, 0.0);

/// Relative tolerance of the non-vanishing check: a candidate is accepted
/// when `min |f| >= NONVANISHING_TOL * max |f|` over the grid.
pub const NONVANISHING_TOL: f64 = 1e-8;

/// Combined budget of candidate pairs tried by the non-vanishing search.
pub const NONVANISHING_MAX_TRIES: usize = 64;

/// The recursive integrals `X^(k)` and `X̃^(k)` associated to `f`.
#[derive(Debug, Clone)]
pub struct RecursiveIntegrals {
    pub xtilde: Vec<GridFn>,
    pub xpow: Vec<GridFn>,
}

/// `X̃^(0) = X^(0) = 1`,
/// `X̃^(k) = k ∫_0^x X̃^(k-1) (f²)^((-1)^(k-1))`,
/// `X^(k) = k ∫_0^x X^(k-1) (f²)^((-1)^k)`.
pub fn recursive_integrals(f: &GridFn, k_max: usize) -> Result<RecursiveIntegrals> {
    let (node, min_abs) = f.min_abs();
    if min_abs < NONVANISHING_TOL * f.max_abs() {
        return Err(SolverError::VanishingSolution { node, min_abs });
    }
    let f2 = f.mul(f);
    let inv_f2 = f2.map(|v| v.inv());
    let mut xtilde = Vec::with_capacity(k_max + 1);
    let mut xpow = Vec::with_capacity(k_max + 1);
    xtilde.push(GridFn::constant(f.grid.clone(), ONE));
    xpow.push(GridFn::constant(f.grid.clone(), ONE));
    for k in 1..=k_max {
        let kf = C64::new(k as f64, 0.0);
        let (w_tilde, w_pow) = if k % 2 == 1 {
            (&f2, &inv_f2)
        } else {
            (&inv_f2, &f2)
        };
        let next_tilde = xtilde[k - 1].mul(w_tilde).cumulative_integral()?.scale(kf);
        let next_pow = xpow[k - 1].mul(w_pow).cumulative_integral()?.scale(kf);
        xtilde.push(next_tilde);
        xpow.push(next_pow);
    }
    Ok(RecursiveIntegrals { xtilde, xpow })
}

/// Formal powers `φ_f^(k)`, auxiliary powers `ψ_f^(k)` and the recursive
/// integrals they are built from.
#[derive(Debug, Clone)]
pub struct FormalPowerTable {
    pub f: GridFn,
    pub f_deriv: OneSided,
    /// `h = f'(0)`
    pub h: C64,
    pub phi: Vec<GridFn>,
    pub psi: Vec<GridFn>,
    pub xtilde: Vec<GridFn>,
    pub xpow: Vec<GridFn>,
    /// `M₁ = ‖f²‖_C · ‖1/f²‖_C`, the constant of the series majorant.
    pub m1: f64,
}

impl FormalPowerTable {
    pub fn k_max(&self) -> usize {
        self.phi.len() - 1
    }

    /// Largest number of series terms supported by this table.
    pub fn max_terms(&self) -> usize {
        self.k_max() / 2
    }
}

/// Build the formal power table from a non-vanishing solution.
pub fn formal_powers(nv: &NonVanishingSolution, k_max: usize) -> Result<FormalPowerTable> {
    let f = &nv.f;
    let ri = recursive_integrals(f, k_max)?;
    let inv_f = f.map(|v| v.inv());
    let mut phi = Vec::with_capacity(k_max + 1);
    let mut psi = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k % 2 == 0 {
            phi.push(ri.xtilde[k].mul(f));
            psi.push(ri.xpow[k].mul(&inv_f));
        } else {
            phi.push(ri.xpow[k].mul(f));
            psi.push(ri.xtilde[k].mul(&inv_f));
        }
    }
    let f2_sup = f.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    let inv_f2_sup = f
        .values
        .iter()
        .map(|v| 1.0 / v.norm_sqr())
        .fold(0.0, f64::max);
    Ok(FormalPowerTable {
        f: f.clone(),
        f_deriv: nv.deriv.clone(),
        h: nv.h,
        phi,
        psi,
        xtilde: ri.xtilde,
        xpow: ri.xpow,
        m1: f2_sup * inv_f2_sup,
    })
}

/// The two SPPS series solutions at a fixed ρ with their one-sided
/// derivatives and the recorded majorant tail.
#[derive(Debug, Clone)]
pub struct SppsSolutionPair {
    pub u0: Solution,
    pub u1: Solution,
    /// Bound for the truncation error of `u0` (the `u1` tail obeys the same
    /// majorant divided by `|ρ|`, up to the factor `b`).
    pub tail_bound: f64,
}

/// Truncated SPPS series
/// `u0 = Σ_k (-1)^k ρ^{2k} φ^(2k) / (2k)!`,
/// `u1 = Σ_k (-1)^k ρ^{2k} φ^(2k+1) / (2k+1)!`
/// with termwise derivatives via `Dφ^(k) = (f'/f) φ^(k) + k ψ^(k-1)`.
pub fn spps_solution(
    table: &FormalPowerTable,
    rho: C64,
    terms: usize,
) -> Result<SppsSolutionPair> {
    if terms == 0 {
        return Err(SolverError::Invalid("series needs at least one term".into()));
    }
    if terms > table.max_terms() {
        return Err(SolverError::TableTooShort {
            requested: terms,
            available: table.max_terms(),
        });
    }
    let grid = table.f.grid.clone();
    let n = grid.len();
    let rho2 = rho * rho;

    let mut u0 = vec![ZERO; n];
    let mut u1 = vec![ZERO; n];
    let mut du0 = vec![ZERO; n]; // Σ (-1)^k ρ^{2k} ψ^(2k-1)/(2k-1)!, k ≥ 1
    let mut du1 = vec![ZERO; n]; // Σ (-1)^k ρ^{2k} ψ^(2k)/(2k)!

    // factorials are never formed: the coefficients advance multiplicatively
    let mut c0 = ONE; // (-1)^k ρ^{2k} / (2k)!
    let mut c1 = ONE; // (-1)^k ρ^{2k} / (2k+1)!
    for k in 0..terms {
        let phi_even = &table.phi[2 * k].values;
        let phi_odd = &table.phi[2 * k + 1].values;
        let psi_even = &table.psi[2 * k].values;
        for j in 0..n {
            u0[j] += c0 * phi_even[j];
            u1[j] += c1 * phi_odd[j];
            du1[j] += c0 * psi_even[j];
        }
        if k + 1 < terms {
            let psi_next = &table.psi[2 * k + 1].values;
            let c_next = c0 * (-rho2) / ((2 * k + 1) as f64 * (2 * k + 2) as f64);
            // coefficient of ψ^(2k+1) in u0' is (-1)^{k+1} ρ^{2k+2}/(2k+1)!
            let d_coef = c_next * ((2 * k + 2) as f64);
            for j in 0..n {
                du0[j] += d_coef * psi_next[j];
            }
            c0 = c_next;
            c1 *= -rho2 / ((2 * k + 2) as f64 * (2 * k + 3) as f64);
        }
    }

    let u0_vals = GridFn::from_values(grid.clone(), u0);
    let u1_vals = GridFn::from_values(grid.clone(), u1);
    let du0_fn = GridFn::from_values(grid.clone(), du0);
    let du1_fn = GridFn::from_values(grid.clone(), du1);

    let deriv_from = |series: &GridFn, extra: &GridFn| -> OneSided {
        let minus = table
            .f_deriv
            .minus
            .zip(&table.f, |df, f| df / f)
            .mul(series)
            .add(extra);
        let plus = table
            .f_deriv
            .plus
            .zip(&table.f, |df, f| df / f)
            .mul(series)
            .add(extra);
        OneSided { minus, plus }
    };
    let du0_sided = deriv_from(&u0_vals, &du0_fn);
    let du1_sided = deriv_from(&u1_vals, &du1_fn);

    // majorant tail: ‖f‖ Σ_{k ≥ terms} (|ρ| M₁ b)^{2k} / (2k)!
    let gamma = rho.norm() * table.m1 * grid.b();
    let mut tail = 0.0f64;
    let mut term = 1.0f64;
    for k in 1..=(terms + 400) {
        term *= gamma * gamma / ((2 * k - 1) as f64 * (2 * k) as f64);
        if k >= terms {
            tail += term;
            if term < 1e-18 * tail.max(1e-300) {
                break;
            }
        }
        if !term.is_finite() {
            tail = f64::INFINITY;
            break;
        }
    }
    let tail_bound = table.f.max_abs() * tail;

    let make = |values: GridFn, deriv: OneSided| Solution {
        rho,
        values,
        deriv,
        provenance: Provenance::Spps,
    };
    Ok(SppsSolutionPair {
        u0: make(u0_vals, du0_sided),
        u1: make(u1_vals, du1_sided),
        tail_bound,
    })
}

/// Point evaluation of the SPPS pair at node `j`: returns
/// `(u0, u0', u1, u1')` with the requested one-sided derivatives. Same
/// series as [`spps_solution`], evaluated at a single node.
pub fn spps_point(
    table: &FormalPowerTable,
    rho: C64,
    j: usize,
    side: crate::grid::Side,
    terms: usize,
) -> Result<(C64, C64, C64, C64)> {
    if terms == 0 || terms > table.max_terms() {
        return Err(SolverError::TableTooShort {
            requested: terms,
            available: table.max_terms(),
        });
    }
    let rho2 = rho * rho;
    let mut u0 = ZERO;
    let mut u1 = ZERO;
    let mut du0 = ZERO;
    let mut du1 = ZERO;
    let mut c0 = ONE;
    let mut c1 = ONE;
    for k in 0..terms {
        u0 += c0 * table.phi[2 * k].values[j];
        u1 += c1 * table.phi[2 * k + 1].values[j];
        du1 += c0 * table.psi[2 * k].values[j];
        if k + 1 < terms {
            let c_next = c0 * (-rho2) / ((2 * k + 1) as f64 * (2 * k + 2) as f64);
            du0 += c_next * ((2 * k + 2) as f64) * table.psi[2 * k + 1].values[j];
            c0 = c_next;
            c1 *= -rho2 / ((2 * k + 2) as f64 * (2 * k + 3) as f64);
        }
    }
    let fr = table.f_deriv.at(j, side) / table.f.values[j];
    Ok((u0, fr * u0 + du0, u1, fr * u1 + du1))
}

/// Solve the Cauchy problem `u(0) = u0`, `u'(0) = u1` through an SPPS table.
pub fn solve_cauchy(
    table: &FormalPowerTable,
    rho: C64,
    u0: C64,
    u1: C64,
    terms: usize,
) -> Result<Solution> {
    let pair = spps_solution(table, rho, terms)?;
    // the pair has data (1, h) and (0, 1)
    let mut sol = pair.u0.combine(u0, &pair.u1, u1 - u0 * table.h);
    sol.provenance = Provenance::Spps;
    Ok(sol)
}

/// A non-vanishing solution of the λ = 0 equation, normalized to `f(0) = 1`.
#[derive(Debug, Clone)]
pub struct NonVanishingSolution {
    pub f: GridFn,
    pub deriv: OneSided,
    /// `h = f'(0)`
    pub h: C64,
    /// `(c₁, c₂)` of the accepted seed solution `y₀`.
    pub seed_pair: (C64, C64),
    /// `(C₁, C₂)` of the accepted combination `C₁ f₀ + C₂ f₁`.
    pub combination: (C64, C64),
}

/// Piecewise-linear solution of `-y'' + Σ α_k δ(x-x_k) y = 0` with
/// `y(0) = c₁`, `y'(0) = c₂` (the closed form for `q ≡ 0`).
fn q_zero_seed(problem: &Problem, c1: C64, c2: C64) -> (GridFn, OneSided) {
    let grid = &problem.grid;
    let n = grid.len();
    let mut values = vec![ZERO; n];
    let mut dminus = vec![ZERO; n];
    let mut dplus = vec![ZERO; n];
    let mut val = c1;
    let mut slope = c2;
    let mut seg_start_x = 0.0;
    values[0] = val;
    dminus[0] = slope;
    dplus[0] = slope;
    let mut breaks = grid.breaks().iter().copied().peekable();
    for j in 1..n {
        let x = grid.node(j);
        let v = val + slope * (x - seg_start_x);
        values[j] = v;
        dminus[j] = slope;
        if breaks.peek() == Some(&j) {
            breaks.next();
            let k = grid.breaks().iter().position(|&b| b == j).unwrap();
            slope += problem.iset.strength(k) * v;
            val = v;
            seg_start_x = x;
        }
        dplus[j] = slope;
    }
    let values = GridFn::from_values(grid.clone(), values);
    let deriv = OneSided {
        minus: GridFn::from_values(grid.clone(), dminus),
        plus: GridFn::from_values(grid.clone(), dplus),
    };
    (values, deriv)
}

/// Fundamental pair of the λ = 0 equation built from a non-vanishing seed
/// `y₀` by the auxiliary SPPS series in the potential `q`.
fn lambda_zero_pair(
    problem: &Problem,
    y0: &GridFn,
    dy0: &OneSided,
) -> Result<(GridFn, OneSided, GridFn, OneSided)> {
    let grid = &problem.grid;
    let y0_sq = y0.mul(y0);
    let q_y0_sq = problem.q.mul(&y0_sq);
    let inv_y0_sq = y0_sq.map(|v| v.inv());

    // s_even = Σ Ỹ^(2k), s_odd = Σ Y^(2k+1); their derivatives are the
    // respective integrands one level down
    let mut s_even = GridFn::constant(grid.clone(), ONE);
    let mut ds_even = GridFn::zeros(grid.clone());
    let mut s_odd = GridFn::zeros(grid.clone());
    let mut ds_odd = GridFn::zeros(grid.clone());

    let mut y_tilde = GridFn::constant(grid.clone(), ONE); // Ỹ^(2k)
    let mut y_pow = GridFn::constant(grid.clone(), ONE); // Y^(2k)
    for _ in 0..64 {
        // odd step: Ỹ against q y₀², Y against 1/y₀²
        let y_tilde_odd = y_tilde.mul(&q_y0_sq).cumulative_integral()?;
        let y_pow_odd = y_pow.mul(&inv_y0_sq).cumulative_integral()?;
        s_odd = s_odd.add(&y_pow_odd);
        ds_odd = ds_odd.add(&y_pow.mul(&inv_y0_sq));
        // even step: Ỹ against 1/y₀², Y against q y₀²
        y_tilde = y_tilde_odd.mul(&inv_y0_sq).cumulative_integral()?;
        y_pow = y_pow_odd.mul(&q_y0_sq).cumulative_integral()?;
        s_even = s_even.add(&y_tilde);
        ds_even = ds_even.add(&y_tilde_odd.mul(&inv_y0_sq));
        let scale = s_even.max_abs().max(s_odd.max_abs());
        if y_tilde.max_abs().max(y_pow.max_abs()) < 1e-17 * scale.max(1e-30) {
            break;
        }
    }

    let f0 = y0.mul(&s_even);
    let df0 = OneSided {
        minus: dy0.minus.mul(&s_even).add(&y0.mul(&ds_even)),
        plus: dy0.plus.mul(&s_even).add(&y0.mul(&ds_even)),
    };
    let f1 = y0.mul(&s_odd);
    let df1 = OneSided {
        minus: dy0.minus.mul(&s_odd).add(&y0.mul(&ds_odd)),
        plus: dy0.plus.mul(&s_odd).add(&y0.mul(&ds_odd)),
    };
    Ok((f0, df0, f1, df1))
}

fn nearly_vanishing(g: &GridFn) -> Option<(usize, f64)> {
    let (node, min_abs) = g.min_abs();
    if min_abs < NONVANISHING_TOL * g.max_abs() {
        Some((node, min_abs))
    } else {
        None
    }
}

/// Construct a non-vanishing solution of the λ = 0 equation.
///
/// The seed `y₀` uses `(c₁, c₂) = (1, 0)` when every `α_k` has positive real
/// part, then `(1, 0.3 i)`, then seeded random pairs; the final combination
/// `C₁ f₀ + C₂ f₁` is searched the same way. The RNG is deterministic in
/// `seed`, so runs are reproducible.
pub fn nonvanishing_solution(problem: &Problem, seed: u64) -> Result<NonVanishingSolution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_min = f64::INFINITY;
    let mut tries = 0usize;

    let i03 = C64::new(0.0, 0.3);
    let seed_candidates_head: Vec<(C64, C64)> = if problem.iset.all_strengths_positive_real() {
        vec![(ONE, ZERO), (ONE, i03)]
    } else {
        vec![(ONE, i03), (ONE, ZERO)]
    };

    let mut outer = 0usize;
    while tries < NONVANISHING_MAX_TRIES {
        let (c1, c2) = if outer < seed_candidates_head.len() {
            seed_candidates_head[outer]
        } else {
            (random_unit(&mut rng), random_unit(&mut rng))
        };
        outer += 1;
        tries += 1;
        let (y0, dy0) = q_zero_seed(problem, c1, c2);
        if c1.norm() < 1e-12 {
            continue;
        }
        if let Some((_, min_abs)) = nearly_vanishing(&y0) {
            best_min = best_min.min(min_abs / y0.max_abs().max(1e-300));
            continue;
        }
        let (f0, df0, f1, df1) = lambda_zero_pair(problem, &y0, &dy0)?;

        let mut inner = 0usize;
        while inner < 8 && tries < NONVANISHING_MAX_TRIES {
            let (cap1, cap2) = match inner {
                0 => (ONE, ZERO),
                1 => (ONE, i03),
                _ => (random_unit(&mut rng), random_unit(&mut rng)),
            };
            inner += 1;
            tries += 1;
            if (cap1 * c1).norm() < 1e-12 {
                continue;
            }
            let f = f0.scale(cap1).add(&f1.scale(cap2));
            if let Some((_, min_abs)) = nearly_vanishing(&f) {
                best_min = best_min.min(min_abs / f.max_abs().max(1e-300));
                continue;
            }
            let norm = f.values[0];
            let inv = norm.inv();
            let f = f.scale(inv);
            let deriv = OneSided {
                minus: df0.minus.scale(cap1).add(&df1.minus.scale(cap2)).scale(inv),
                plus: df0.plus.scale(cap1).add(&df1.plus.scale(cap2)).scale(inv),
            };
            let h = deriv.plus.values[0];
            return Ok(NonVanishingSolution {
                f,
                deriv,
                h,
                seed_pair: (c1, c2),
                combination: (cap1, cap2),
            });
        }
    }
    Err(SolverError::NonVanishingSearchFailed {
        tries,
        best_min,
    })
}

fn random_unit(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.gen_range(-1.0..1.0);
    let im: f64 = rng.gen_range(-1.0..1.0);
    C64::new(re, im)
}

/// The Polya right inverse: `u = -f ∫_0^x f^{-2} ∫_0^t f g`, the unique
/// solution of `L u = g` with `u(0) = u'(0) = 0`.
pub fn polya_right_inverse(table: &FormalPowerTable, g: &GridFn) -> Result<GridFn> {
    let inner = table.f.mul(g).cumulative_integral()?;
    let outer = inner
        .zip(&table.f, |v, f| v / (f * f))
        .cumulative_integral()?;
    Ok(outer.mul(&table.f).scale(-ONE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Side;
    use crate::interactions::{Interaction, InteractionSet};
    use crate::potential::Potential;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn regular_problem(potential: Potential, m: usize) -> Problem {
        Problem::new(InteractionSet::regular(1.0).unwrap(), potential, m).unwrap()
    }

    fn delta_problem() -> Problem {
        let iset = InteractionSet::new(vec![Interaction { x: 0.5, alpha: c(2.0) }], 1.0).unwrap();
        Problem::new(iset, Potential::Zero, 2000).unwrap()
    }

    #[test]
    fn recursive_integrals_for_unit_f_are_powers() {
        let problem = regular_problem(Potential::Zero, 2000);
        let f = GridFn::constant(problem.grid.clone(), ONE);
        let ri = recursive_integrals(&f, 10).unwrap();
        for k in 0..=10usize {
            for (j, x) in problem.grid.nodes().enumerate() {
                let exact = x.powi(k as i32);
                assert!(
                    (ri.xtilde[k].values[j] - c(exact)).norm() <= 1e-10,
                    "xtilde^{k} at x={x}"
                );
                assert!((ri.xpow[k].values[j] - c(exact)).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn first_integral_for_one_plus_x() {
        // f = 1 + x: X^(1)(x) = ∫ (1+t)^-2 dt = x/(1+x)
        let problem = regular_problem(Potential::Zero, 2000);
        let f = GridFn::from_real_fn(problem.grid.clone(), |x| 1.0 + x);
        let ri = recursive_integrals(&f, 1).unwrap();
        for (j, x) in problem.grid.nodes().enumerate() {
            let exact = x / (1.0 + x);
            assert!((ri.xpow[1].values[j] - c(exact)).norm() <= 1e-9);
        }
    }

    #[test]
    fn recursive_integrals_respect_paper_bound() {
        // |X^(k)| <= M1^k b^k with M1 = ‖f²‖ ‖1/f²‖
        let problem = delta_problem();
        let nv = nonvanishing_solution(&problem, 7).unwrap();
        let table = formal_powers(&nv, 12).unwrap();
        for k in 0..=12usize {
            let bound = table.m1.powi(k as i32) * problem.b().powi(k as i32);
            assert!(table.xpow[k].max_abs() <= bound * (1.0 + 1e-9));
            assert!(table.xtilde[k].max_abs() <= bound * (1.0 + 1e-9));
        }
    }

    #[test]
    fn vanishing_f_is_rejected() {
        let problem = regular_problem(Potential::Zero, 100);
        let f = GridFn::from_real_fn(problem.grid.clone(), |x| x - 0.5);
        assert!(matches!(
            recursive_integrals(&f, 3),
            Err(SolverError::VanishingSolution { .. })
        ));
    }

    #[test]
    fn formal_powers_reduce_to_monomials_for_trivial_problem() {
        let problem = regular_problem(Potential::Zero, 2000);
        let nv = nonvanishing_solution(&problem, 1).unwrap();
        assert!((nv.f.values[500] - ONE).norm() < 1e-14);
        assert!(nv.h.norm() < 1e-14);
        let table = formal_powers(&nv, 8).unwrap();
        for k in 0..=8usize {
            for (j, x) in problem.grid.nodes().enumerate() {
                assert!((table.phi[k].values[j] - c(x.powi(k as i32))).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn formal_power_derivative_identity_on_smooth_pieces() {
        // Dφ^(k) = (f'/f) φ^(k) + k ψ^(k-1), checked against a finite
        // difference away from the interaction point
        let problem = delta_problem();
        let nv = nonvanishing_solution(&problem, 3).unwrap();
        let table = formal_powers(&nv, 6).unwrap();
        let h = problem.grid.step();
        for k in 1..=6usize {
            for &j in &[400usize, 1400] {
                let num = (table.phi[k].values[j + 1] - table.phi[k].values[j - 1]) / (2.0 * h);
                let analytic = table.f_deriv.plus.values[j] / table.f.values[j]
                    * table.phi[k].values[j]
                    + table.psi[k - 1].values[j] * (k as f64);
                assert!(
                    (num - analytic).norm() <= 1e-5 * analytic.norm().max(1.0),
                    "k={k}, node {j}"
                );
            }
        }
    }

    #[test]
    fn formal_powers_have_monomial_asymptotics_near_zero() {
        let problem = delta_problem();
        let nv = nonvanishing_solution(&problem, 3).unwrap();
        let table = formal_powers(&nv, 4).unwrap();
        for j in 1..=5usize {
            let x = problem.grid.node(j);
            let ratio = table.phi[2].values[j] / c(x * x);
            assert!(
                (ratio - ONE).norm() <= 1e-6,
                "phi^(2)/x^2 at node {j}: {ratio}"
            );
        }
    }

    #[test]
    fn spps_series_reproduces_cosine_and_sine() {
        let problem = regular_problem(Potential::Zero, 2000);
        let nv = nonvanishing_solution(&problem, 1).unwrap();
        let table = formal_powers(&nv, 80).unwrap();
        let pair = spps_solution(&table, c(1.0), 40).unwrap();
        for (j, x) in problem.grid.nodes().enumerate() {
            assert!((pair.u0.values.values[j] - c(x.cos())).norm() <= 1e-10);
            assert!((pair.u1.values.values[j] - c(x.sin())).norm() <= 1e-10);
            assert!((pair.u0.deriv.minus.values[j] - c(-x.sin())).norm() <= 1e-9);
            assert!((pair.u1.deriv.minus.values[j] - c(x.cos())).norm() <= 1e-9);
        }
    }

    #[test]
    fn spps_at_rho_zero_collapses_to_f_and_abel_integral() {
        let problem = delta_problem();
        let nv = nonvanishing_solution(&problem, 5).unwrap();
        let table = formal_powers(&nv, 10).unwrap();
        let pair = spps_solution(&table, ZERO, 5).unwrap();
        let dev0 = pair.u0.values.sub(&table.f).max_abs();
        assert!(dev0 == 0.0, "u0 at rho=0 must be f exactly, dev {dev0}");
        let abel = table.phi[1].clone();
        let dev1 = pair.u1.values.sub(&abel).max_abs();
        assert!(dev1 == 0.0, "u1 at rho=0 must be φ^(1), dev {dev1}");
    }

    #[test]
    fn spps_initial_conditions_and_wronskian() {
        let problem = delta_problem();
        let nv = nonvanishing_solution(&problem, 5).unwrap();
        let table = formal_powers(&nv, 60).unwrap();
        for &rho in &[c(1.0), c(3.0), C64::new(2.0, 0.5)] {
            let pair = spps_solution(&table, rho, 30).unwrap();
            assert!((pair.u0.values.values[0] - ONE).norm() < 1e-13);
            assert!((pair.u0.deriv.plus.values[0] - table.h).norm() < 1e-13);
            assert!(pair.u1.values.values[0].norm() < 1e-13);
            assert!((pair.u1.deriv.plus.values[0] - ONE).norm() < 1e-13);
            for j in [0, 500, 1000, 1500, 2000] {
                let w = crate::problem::wronskian_at(&pair.u0, &pair.u1, j, Side::Minus);
                assert!((w - ONE).norm() <= 1e-8, "W at node {j}: {w}");
            }
        }
    }

    #[test]
    fn spps_jump_condition_at_interaction() {
        let problem = delta_problem();
        let nv = nonvanishing_solution(&problem, 5).unwrap();
        let table = formal_powers(&nv, 60).unwrap();
        let pair = spps_solution(&table, c(3.0), 30).unwrap();
        assert!(pair.u0.jump_residual(&problem.iset) <= 1e-8);
        assert!(pair.u1.jump_residual(&problem.iset) <= 1e-8);
    }

    #[test]
    fn series_term_count_is_guarded() {
        let problem = regular_problem(Potential::Zero, 100);
        let nv = nonvanishing_solution(&problem, 1).unwrap();
        let table = formal_powers(&nv, 10).unwrap();
        assert!(matches!(
            spps_solution(&table, c(1.0), 6),
            Err(SolverError::TableTooShort { requested: 6, available: 5 })
        ));
    }

    #[test]
    fn truncation_change_stays_below_majorant() {
        let problem = delta_problem();
        let nv = nonvanishing_solution(&problem, 5).unwrap();
        let table = formal_powers(&nv, 90).unwrap();
        let rho = c(4.0);
        let t = 20usize;
        let a = spps_solution(&table, rho, t).unwrap();
        let b = spps_solution(&table, rho, t + 10).unwrap();
        let change = a.u0.values.sub(&b.u0.values).max_abs();
        assert!(
            change <= a.tail_bound,
            "change {change} exceeds majorant {}",
            a.tail_bound
        );
    }

    #[test]
    fn nonvanishing_solution_for_single_delta_matches_closed_form() {
        let problem = delta_problem();
        let nv = nonvanishing_solution(&problem, 11).unwrap();
        assert_eq!(nv.seed_pair, (ONE, ZERO));
        assert_eq!(nv.combination, (ONE, ZERO));
        for (j, x) in problem.grid.nodes().enumerate() {
            let expected = if x <= 0.5 { 1.0 } else { 1.0 + 2.0 * (x - 0.5) };
            assert!((nv.f.values[j] - c(expected)).norm() <= 1e-12);
        }
        assert!((nv.deriv.plus.values[1000] - c(2.0)).norm() <= 1e-12);
        assert!(nv.deriv.minus.values[1000].norm() <= 1e-12);
    }

    #[test]
    fn real_equation_gets_nonvanishing_complex_combination() {
        // q(x) = x with a positive strength: the real seed stays valid and
        // |f| must stay away from zero on the grid
        let iset = InteractionSet::new(vec![Interaction { x: 0.5, alpha: c(1.5) }], 1.0).unwrap();
        let problem = Problem::new(iset, Potential::Polynomial(vec![0.0, 1.0]), 2000).unwrap();
        let nv = nonvanishing_solution(&problem, 17).unwrap();
        let (_, min_abs) = nv.f.min_abs();
        assert!(min_abs > 0.0 && min_abs >= NONVANISHING_TOL * nv.f.max_abs());
        assert!((nv.f.values[0] - ONE).norm() < 1e-14);
    }

    #[test]
    fn polya_inverse_double_integrates() {
        let problem = regular_problem(Potential::Zero, 1000);
        let nv = nonvanishing_solution(&problem, 1).unwrap();
        let table = formal_powers(&nv, 4).unwrap();
        let g_zero = GridFn::zeros(problem.grid.clone());
        assert_eq!(polya_right_inverse(&table, &g_zero).unwrap().max_abs(), 0.0);
        let g_one = GridFn::constant(problem.grid.clone(), ONE);
        let u = polya_right_inverse(&table, &g_one).unwrap();
        for (j, x) in problem.grid.nodes().enumerate() {
            assert!((u.values[j] - c(-x * x / 2.0)).norm() <= 1e-12);
        }
    }

    #[test]
    fn polya_inverse_recovers_formal_powers() {
        // φ^(4) = 12 · (-R) φ^(2)
        let problem = delta_problem();
        let nv = nonvanishing_solution(&problem, 5).unwrap();
        let table = formal_powers(&nv, 6).unwrap();
        let r = polya_right_inverse(&table, &table.phi[2]).unwrap();
        let dev = r.scale(c(-12.0)).sub(&table.phi[4]).max_abs();
        assert!(dev <= 1e-8, "identity residual {dev}");
    }

    #[test]
    fn conjugation_symmetry_for_real_data() {
        // real q, real positive α: the deterministic search keeps every
        // intermediate real, so conjugating ρ conjugates the outputs exactly
        let iset = InteractionSet::new(vec![Interaction { x: 0.25, alpha: c(1.0) }], 1.0).unwrap();
        let problem = Problem::new(iset, Potential::Polynomial(vec![0.0, 1.0]), 500).unwrap();
        let nv = nonvanishing_solution(&problem, 23).unwrap();
        let table = formal_powers(&nv, 40).unwrap();
        let rho = C64::new(2.0, 0.7);
        let a = solve_cauchy(&table, rho, c(1.0), c(0.0), 20).unwrap();
        let b = solve_cauchy(&table, rho.conj(), c(1.0), c(0.0), 20).unwrap();
        for j in 0..problem.grid.len() {
            assert_eq!(
                a.values.values[j].conj(),
                b.values.values[j],
                "conjugation symmetry must be bit-exact at node {j}"
            );
        }
    }
}
