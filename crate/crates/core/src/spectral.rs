//! Direct Sturm-Liouville spectral problems for the δ-interaction operator:
//! characteristic-function assembly and real-eigenvalue search.
//!
//! The characteristic function is built from the `c` and `s` solutions
//! delivered by any [`SolutionBackend`]: the combination
//! `y = β₀ s - β₁ c⁰` satisfies the left condition `β₀ y(0) + β₁ y'(0) = 0`
//! for every `(β₀, β₁)`, and `Δ(λ) = γ₀ y(b) + γ₁ y'(b-)`. For
//! Dirichlet-Dirichlet data this reduces to `Δ(ρ²) = s(ρ, b)`.

use num_complex::Complex64;

use crate::backend::SolutionBackend;
use crate::error::{Result, SolverError};
use crate::grid::{Side, C64};
use crate::problem::Solution;

const ZERO: C64 = Complex64::new(0.0, 0.0);
const ONE: C64 = Complex64::new(1.0, 0.0);

/// Separated boundary conditions `β₀ y(0) + β₁ y'(0) = 0` and
/// `γ₀ y(b) + γ₁ y'(b) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConditions {
    pub left: (C64, C64),
    pub right: (C64, C64),
}

impl BoundaryConditions {
    pub fn new(left: (C64, C64), right: (C64, C64)) -> Result<Self> {
        for (name, pair) in [("left", left), ("right", right)] {
            if pair.0.norm() == 0.0 && pair.1.norm() == 0.0 {
                return Err(SolverError::Invalid(format!(
                    "{name} boundary pair must not be (0, 0)"
                )));
            }
        }
        Ok(BoundaryConditions { left, right })
    }

    pub fn dirichlet() -> Self {
        BoundaryConditions {
            left: (ONE, ZERO),
            right: (ONE, ZERO),
        }
    }
}

/// Square root adapted to the real-spectrum convention:
/// `ρ = √λ ≥ 0` for `λ ≥ 0` and `ρ = i√|λ|` for `λ < 0`.
pub fn rho_from_lambda(lambda: C64) -> C64 {
    if lambda.im == 0.0 {
        if lambda.re >= 0.0 {
            C64::new(lambda.re.sqrt(), 0.0)
        } else {
            C64::new(0.0, (-lambda.re).sqrt())
        }
    } else {
        lambda.sqrt()
    }
}

/// `Δ(λ) = γ₀ y(b) + γ₁ y'(b-)` with `y = β₀ s - β₁ c⁰`.
pub fn characteristic_function(
    backend: &dyn SolutionBackend,
    bc: &BoundaryConditions,
    lambda: C64,
) -> Result<C64> {
    let rho = rho_from_lambda(lambda);
    // y(0) = -β₁, y'(0) = β₀
    let (yb, dyb) = backend.boundary_pair(rho, -bc.left.1, bc.left.0)?;
    Ok(bc.right.0 * yb + bc.right.1 * dyb)
}

/// One computed eigenvalue with its residual `|Δ(λ)|`.
#[derive(Debug, Clone, Copy)]
pub struct EigenPair {
    pub index: usize,
    pub lambda: f64,
    pub rho: C64,
    pub residual: f64,
}

/// Search result. `warnings` report suspected missed roots or poorly
/// refined ones.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<EigenPair>,
    pub warnings: Vec<String>,
}

/// Search options; `scan_step_rho` defaults to an eighth of the asymptotic
/// gap `π/b` in the ρ variable.
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub scan_step_rho: Option<f64>,
    pub residual_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            scan_step_rho: None,
            residual_tol: 1e-10,
        }
    }
}

/// Real-eigenvalue search on `lambda_range` for real problems: sign-change
/// scan (in `ρ = √λ` for `λ ≥ 0`, in `κ = √-λ` for `λ < 0`), followed by
/// bisection. Even-multiplicity roots without a sign change are outside the
/// scope of this scan.
pub fn find_eigenvalues(
    backend: &dyn SolutionBackend,
    bc: &BoundaryConditions,
    lambda_range: (f64, f64),
    opts: SearchOptions,
) -> Result<Spectrum> {
    let (lambda_min, lambda_max) = lambda_range;
    if !(lambda_min < lambda_max) {
        return Err(SolverError::Invalid(format!(
            "empty lambda range [{lambda_min}, {lambda_max}]"
        )));
    }
    let b = backend.interval_length();
    let step = opts
        .scan_step_rho
        .unwrap_or(std::f64::consts::PI / b / 8.0);
    let delta_re = |lambda: f64| -> Result<(f64, f64)> {
        let v = characteristic_function(backend, bc, C64::new(lambda, 0.0))?;
        Ok((v.re, v.norm()))
    };

    let mut samples: Vec<(f64, f64)> = Vec::new(); // (lambda, Re Δ)
    let mut scan_scale = 0.0f64;
    // negative part, scanned in κ = √(-λ) from the most negative end up
    if lambda_min < 0.0 {
        let mut kappa = (-lambda_min).sqrt();
        while kappa > 0.0 {
            let lambda = -kappa * kappa;
            if lambda <= lambda_max {
                let (re, abs) = delta_re(lambda)?;
                samples.push((lambda, re));
                scan_scale = scan_scale.max(abs);
            }
            kappa -= step;
        }
    }
    // non-negative part, scanned in ρ
    if lambda_max >= 0.0 {
        let rho_min = lambda_min.max(0.0).sqrt();
        let rho_max = lambda_max.sqrt();
        let mut rho = rho_min;
        loop {
            let lambda = rho * rho;
            let (re, abs) = delta_re(lambda)?;
            samples.push((lambda, re));
            scan_scale = scan_scale.max(abs);
            if rho >= rho_max {
                break;
            }
            rho = (rho + step).min(rho_max);
        }
    }

    let mut roots: Vec<(f64, f64)> = Vec::new();
    for w in samples.windows(2) {
        let (la, fa) = w[0];
        let (lb, fb) = w[1];
        if fa == 0.0 {
            roots.push((la, 0.0));
            continue;
        }
        if fa * fb < 0.0 {
            roots.push(bisect(&delta_re, la, fa, lb, fb)?);
        }
    }
    if let Some(&(l_last, f_last)) = samples.last() {
        if f_last == 0.0 {
            roots.push((l_last, 0.0));
        }
    }
    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    roots.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-9 * (1.0 + b.0.abs()));

    let mut warnings = Vec::new();
    let residual_limit = opts.residual_tol * scan_scale.max(1.0);
    let spectrum: Vec<EigenPair> = roots
        .iter()
        .enumerate()
        .map(|(i, &(lambda, residual))| EigenPair {
            index: i + 1,
            lambda,
            rho: rho_from_lambda(C64::new(lambda, 0.0)),
            residual,
        })
        .collect();
    for pair in &spectrum {
        if pair.residual > residual_limit {
            warnings.push(format!(
                "eigenvalue {} refined only to |Δ| = {:.3e} (limit {:.3e})",
                pair.index, pair.residual, residual_limit
            ));
        }
    }
    // crude count check against the free asymptotics λ_n ~ (nπ/b)²
    if lambda_max > 0.0 {
        let expected = (b * lambda_max.sqrt() / std::f64::consts::PI).floor() as isize;
        let found_positive = spectrum.iter().filter(|p| p.lambda > 0.0).count() as isize;
        let slack = backend.interaction_count() as isize + 2;
        if (expected - found_positive).abs() > slack {
            warnings.push(format!(
                "found {found_positive} positive eigenvalues but the asymptotic count suggests \
                 about {expected}; the scan grid may be too coarse"
            ));
        }
    }
    Ok(Spectrum {
        eigenvalues: spectrum,
        warnings,
    })
}

fn bisect(
    f: &impl Fn(f64) -> Result<(f64, f64)>,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    _fb: f64,
) -> Result<(f64, f64)> {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        let (fm, _) = f(mid)?;
        if fm == 0.0 {
            return Ok((mid, 0.0));
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    let root = 0.5 * (a + b);
    let (_, abs) = f(root)?;
    Ok((root, abs))
}

/// Residuals of the right boundary condition and of the jump conditions for
/// the propagated eigenfunction candidate at λ.
pub fn eigenfunction_residual(
    backend: &dyn SolutionBackend,
    bc: &BoundaryConditions,
    lambda: f64,
) -> Result<(f64, f64)> {
    let rho = rho_from_lambda(C64::new(lambda, 0.0));
    let sol: Solution = backend.solve_cauchy(rho, -bc.left.1, bc.left.0)?;
    let m = sol.values.grid.m();
    let scale = sol.values.max_abs().max(1e-300);
    let right =
        (bc.right.0 * sol.value_at(m) + bc.right.1 * sol.deriv_at(m, Side::Minus)).norm() / scale;
    let jumps = backend.jump_residual(&sol) / scale;
    Ok((right, jumps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{BackendRegistry, PropagationBackend};
    use crate::interactions::{Interaction, InteractionSet};
    use crate::potential::Potential;
    use crate::problem::{Numerics, Problem};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn trivial_dirichlet_spectrum_is_n_squared() {
        let iset = InteractionSet::regular(std::f64::consts::PI).unwrap();
        let problem = Problem::new(iset, Potential::Zero, 3000).unwrap();
        let numerics = Numerics {
            propagation_chunks: 16,
            ..Numerics::default()
        };
        let backend = PropagationBackend::new(&problem, &numerics).unwrap();
        let bc = BoundaryConditions::dirichlet();
        let spectrum =
            find_eigenvalues(&backend, &bc, (0.1, 110.0), SearchOptions::default()).unwrap();
        assert!(spectrum.eigenvalues.len() >= 10);
        for (n, pair) in spectrum.eigenvalues.iter().take(10).enumerate() {
            let exact = ((n + 1) * (n + 1)) as f64;
            assert!(
                (pair.lambda - exact).abs() <= 1e-9 * exact,
                "λ_{} = {} vs {exact}",
                n + 1,
                pair.lambda
            );
        }
        assert!(spectrum.warnings.is_empty(), "{:?}", spectrum.warnings);
    }

    #[test]
    fn characteristic_function_matches_analytic_form() {
        // Δ(ρ²) = sin ρ/ρ + 2 sin²(ρ/2)/ρ² for the single interaction (0.5, 2)
        let iset = InteractionSet::new(vec![Interaction { x: 0.5, alpha: c(2.0) }], 1.0).unwrap();
        let problem = Problem::new(iset, Potential::Zero, 2000).unwrap();
        let numerics = Numerics::default();
        let backend = PropagationBackend::new(&problem, &numerics).unwrap();
        let bc = BoundaryConditions::dirichlet();
        for rho in [1.0f64, 3.3, 7.9] {
            let delta = characteristic_function(&backend, &bc, c(rho * rho)).unwrap();
            let expected = rho.sin() / rho + 2.0 * (rho / 2.0).sin().powi(2) / (rho * rho);
            assert!(
                (delta - c(expected)).norm() <= 1e-10,
                "Δ at ρ = {rho}: {delta} vs {expected}"
            );
        }
    }

    #[test]
    fn attractive_interaction_lowers_the_ground_state() {
        let numerics = Numerics::default();
        let bc = BoundaryConditions::dirichlet();
        let base = {
            let problem =
                Problem::new(InteractionSet::regular(1.0).unwrap(), Potential::Zero, 2000)
                    .unwrap();
            let backend = PropagationBackend::new(&problem, &numerics).unwrap();
            find_eigenvalues(&backend, &bc, (0.5, 50.0), SearchOptions::default())
                .unwrap()
                .eigenvalues[0]
                .lambda
        };
        let attracted = {
            let iset =
                InteractionSet::new(vec![Interaction { x: 0.5, alpha: c(-2.0) }], 1.0).unwrap();
            let problem = Problem::new(iset, Potential::Zero, 2000).unwrap();
            let backend = PropagationBackend::new(&problem, &numerics).unwrap();
            find_eigenvalues(&backend, &bc, (-10.0, 50.0), SearchOptions::default())
                .unwrap()
                .eigenvalues[0]
                .lambda
        };
        assert!((base - std::f64::consts::PI.powi(2)).abs() < 1e-8);
        assert!(
            attracted < base,
            "attractive α must lower λ₁: {attracted} vs {base}"
        );
    }

    #[test]
    fn eigenfunction_satisfies_right_condition_and_jumps() {
        let iset = InteractionSet::new(vec![Interaction { x: 0.5, alpha: c(2.0) }], 1.0).unwrap();
        let problem = Problem::new(iset, Potential::Zero, 2000).unwrap();
        let numerics = Numerics::default();
        let backend = PropagationBackend::new(&problem, &numerics).unwrap();
        let bc = BoundaryConditions::dirichlet();
        let spectrum =
            find_eigenvalues(&backend, &bc, (0.5, 250.0), SearchOptions::default()).unwrap();
        assert!(spectrum.eigenvalues.len() >= 4);
        for pair in spectrum.eigenvalues.iter().take(4) {
            let (right, jumps) = eigenfunction_residual(&backend, &bc, pair.lambda).unwrap();
            assert!(right <= 1e-7, "right BC residual {right}");
            assert!(jumps <= 1e-8, "jump residual {jumps}");
        }
    }

    #[test]
    fn empty_range_is_rejected() {
        let problem =
            Problem::new(InteractionSet::regular(1.0).unwrap(), Potential::Zero, 100).unwrap();
        let backend = PropagationBackend::new(&problem, &Numerics::default()).unwrap();
        let bc = BoundaryConditions::dirichlet();
        assert!(find_eigenvalues(&backend, &bc, (5.0, 5.0), SearchOptions::default()).is_err());
    }

    #[test]
    fn backends_agree_on_the_characteristic_function() {
        let iset = InteractionSet::new(
            vec![
                Interaction { x: 0.25, alpha: c(1.0) },
                Interaction { x: 0.75, alpha: c(2.0) },
            ],
            1.0,
        )
        .unwrap();
        let problem = Problem::new(iset, Potential::Zero, 2000).unwrap();
        let numerics = Numerics::default();
        let registry = BackendRegistry::standard();
        let bc = BoundaryConditions::dirichlet();
        let backends: Vec<_> = registry
            .names()
            .iter()
            .map(|name| registry.create(name, &problem, &numerics).unwrap())
            .collect();
        for lambda in [2.0f64, 17.0, 55.5] {
            let values: Vec<C64> = backends
                .iter()
                .map(|b| characteristic_function(b.as_ref(), &bc, c(lambda)).unwrap())
                .collect();
            for v in &values[1..] {
                assert!(
                    (v - values[0]).norm() <= 1e-8,
                    "backend disagreement at λ = {lambda}: {values:?}"
                );
            }
        }
    }
}
