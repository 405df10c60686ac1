//! The identity-check suite behind the `verify` command: every structural
//! identity the solver is supposed to satisfy, evaluated on one problem
//! with pass/fail status and the worst observed deviation.

use num_complex::Complex64;

use crate::closedform::{Propagator, SumOverJ};
use crate::error::Result;
use crate::grid::{Side, C64};
use crate::kernels;
use crate::nsbf::{self, SigmaVariant};
use crate::problem::{wronskian_at, Numerics, Problem};
use crate::spps;

const ONE: C64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::NotApplicable => "n/a",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: CheckStatus,
    pub deviation: f64,
    pub tolerance: f64,
}

impl CheckResult {
    fn graded(name: &'static str, deviation: f64, tolerance: f64) -> Self {
        let status = if deviation <= tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        CheckResult {
            name,
            status,
            deviation,
            tolerance,
        }
    }

    fn not_applicable(name: &'static str) -> Self {
        CheckResult {
            name,
            status: CheckStatus::NotApplicable,
            deviation: 0.0,
            tolerance: 0.0,
        }
    }
}

pub fn all_pass(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.status != CheckStatus::Fail)
}

/// Run the full identity suite: Wronskian, jump conditions, closed-form
/// equivalence, Goursat conditions (`q ≡ 0` only), the first-coefficient
/// relations, the σ-recursion pinning and the NSBF truncation bound.
pub fn run_identity_suite(problem: &Problem, numerics: &Numerics) -> Result<Vec<CheckResult>> {
    let mut results = Vec::new();
    let prop = Propagator::new(problem, numerics)?;
    let assembler = SumOverJ::new(problem, numerics)?;
    let nv = spps::nonvanishing_solution(problem, numerics.seed)?;
    let table = spps::formal_powers(&nv, numerics.k_max)?;
    let h = table.h;
    let rho_set = [
        C64::new(1.0, 0.0),
        C64::new(3.7, 0.0),
        C64::new(5.0, 0.3),
    ];

    // Wronskian W[c, s] = 1 and the jump conditions
    let mut w_dev = 0.0f64;
    let mut jump_dev = 0.0f64;
    let mut sum_vs_prop = 0.0f64;
    for &rho in &rho_set {
        let c_sol = prop.c(rho, h)?;
        let s_sol = prop.s(rho)?;
        for j in (0..problem.grid.len()).step_by(50) {
            w_dev = w_dev.max((wronskian_at(&c_sol, &s_sol, j, Side::Minus) - ONE).norm());
        }
        jump_dev = jump_dev.max(c_sol.jump_residual(&problem.iset));
        jump_dev = jump_dev.max(s_sol.jump_residual(&problem.iset));

        let direct = prop.solve(rho, ONE, C64::new(0.4, 0.1))?;
        let assembled = assembler.solve(rho, ONE, C64::new(0.4, 0.1))?;
        sum_vs_prop = sum_vs_prop.max(direct.values.sub(&assembled.values).max_abs());
    }
    results.push(CheckResult::graded("wronskian", w_dev, 1e-8));
    if problem.iset.n() == 0 {
        results.push(CheckResult::not_applicable("jump-conditions"));
    } else {
        results.push(CheckResult::graded("jump-conditions", jump_dev, 1e-8));
    }
    results.push(CheckResult::graded(
        "sum-over-j-vs-propagation",
        sum_vs_prop,
        1e-9,
    ));

    // Goursat conditions of the exact q ≡ 0 kernel
    if problem.potential.is_zero() && problem.iset.n() > 0 {
        let mut dev = 0.0f64;
        for frac in [0.2, 0.45, 0.7, 0.95, 1.0] {
            let x = frac * problem.b();
            let kernel = kernels::exact_kernel_q0(&problem.iset, x)?;
            let report = kernels::goursat_check(
                &kernel,
                &problem.iset,
                Complex64::new(0.0, 0.0),
                x,
            );
            dev = dev.max(report.diagonal_deviation);
            dev = dev.max(report.antidiagonal_deviation);
        }
        results.push(CheckResult::graded("goursat-q0", dev, 1e-12));
    } else {
        results.push(CheckResult::not_applicable("goursat-q0"));
    }

    // first-coefficient relations and the recursion pinning
    let coeffs = nsbf::fl_coefficients(&table, numerics.n_max)?;
    let e0 = prop.e(Complex64::new(0.0, 0.0), h)?;
    let s0 = prop.s(Complex64::new(0.0, 0.0))?;
    let mut coeff_dev = 0.0f64;
    for (j, x) in problem.grid.nodes().enumerate() {
        coeff_dev =
            coeff_dev.max((coeffs.a[0].values[j] - (e0.value_at(j) - ONE) * 0.5).norm());
        coeff_dev = coeff_dev.max((coeffs.g_at(0, j) - (e0.value_at(j) - ONE)).norm());
        if j > 0 {
            let s_rel = (s0.value_at(j) / x - ONE) * 3.0;
            coeff_dev = coeff_dev.max((coeffs.s_at(0, j) - s_rel).norm());
        }
    }
    results.push(CheckResult::graded(
        "first-coefficient-relations",
        coeff_dev,
        1e-8,
    ));

    let n_chk = nsbf::PINNING_ORDER.min(numerics.n_max).min(table.k_max());
    let direct = nsbf::fl_coeffs_direct(&table, n_chk)?;
    let seq = nsbf::sigma_recursive(&table, n_chk, SigmaVariant::Rederived)?;
    let (sigma_dev, at_n) = nsbf::sigma_deviation(&seq, &direct);
    let sigma_tol =
        nsbf::PINNING_TOL + nsbf::direct_formula_noise(at_n, problem.grid.step());
    results.push(CheckResult::graded(
        "sigma-direct-vs-recursive",
        sigma_dev,
        sigma_tol,
    ));

    // NSBF truncation bound at the right endpoint
    let m_nsbf = numerics.nsbf_terms.min(coeffs.max_nsbf_terms());
    let j_end = problem.grid.m();
    let mut bound_excess = 0.0f64;
    for rho_re in [1.0f64, 4.0, 8.0] {
        let rho = C64::new(rho_re, 0.0);
        let (c_m, _) = nsbf::nsbf_eval_at(&coeffs, rho, j_end, m_nsbf);
        let c_ref = prop.c(rho, h)?.value_at(j_end);
        let observed = (c_m - c_ref).norm();
        let bound = nsbf::nsbf_error_bound(&coeffs, j_end, m_nsbf, 0.0);
        bound_excess = bound_excess.max(observed - bound - 1e-8);
    }
    results.push(CheckResult::graded("nsbf-bound", bound_excess.max(0.0), 0.0));

    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interactions::{Interaction, InteractionSet};
    use crate::potential::Potential;

    fn c(re: f64) -> C64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn default_two_delta_instance_passes_every_check() {
        let iset = InteractionSet::new(
            vec![
                Interaction { x: 0.25, alpha: c(1.0) },
                Interaction { x: 0.75, alpha: c(2.0) },
            ],
            1.0,
        )
        .unwrap();
        let problem = Problem::new(iset, Potential::Zero, 2000).unwrap();
        let results = run_identity_suite(&problem, &Numerics::default()).unwrap();
        assert!(results.len() >= 6);
        for r in &results {
            assert!(
                r.status != CheckStatus::Fail,
                "{} failed: deviation {} > {}",
                r.name,
                r.deviation,
                r.tolerance
            );
        }
        assert!(all_pass(&results));
    }

    #[test]
    fn regular_problem_marks_delta_checks_not_applicable() {
        let problem =
            Problem::new(InteractionSet::regular(1.0).unwrap(), Potential::Zero, 2000).unwrap();
        let results = run_identity_suite(&problem, &Numerics::default()).unwrap();
        let by_name = |name: &str| results.iter().find(|r| r.name == name).unwrap();
        assert_eq!(by_name("jump-conditions").status, CheckStatus::NotApplicable);
        assert_eq!(by_name("goursat-q0").status, CheckStatus::NotApplicable);
        assert!(all_pass(&results));
    }

    #[test]
    fn suite_is_deterministic() {
        let iset = InteractionSet::new(vec![Interaction { x: 0.5, alpha: c(2.0) }], 1.0).unwrap();
        let problem = Problem::new(iset, Potential::Polynomial(vec![0.0, 1.0]), 1000).unwrap();
        let a = run_identity_suite(&problem, &Numerics::default()).unwrap();
        let b = run_identity_suite(&problem, &Numerics::default()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.name, y.name);
            assert_eq!(x.deviation.to_bits(), y.deviation.to_bits());
        }
    }
}
