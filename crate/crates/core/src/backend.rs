//! Interchangeable solution backends behind a common trait, registered by
//! name and selected at runtime (`--backend` on the command line).
//!
//! * `propagation` — segment-wise SPPS with interface matching, the default;
//! * `nsbf` — values from the Neumann-series representation built on the
//!   Fourier-Legendre coefficients, derivatives from the SPPS termwise
//!   identity;
//! * `oracle` — the independent fixed-step Runge-Kutta integrator.

use crate::closedform::Propagator;
use crate::error::{Result, SolverError};
use crate::grid::{Side, C64};
use crate::interactions::InteractionSet;
use crate::nsbf::{self, FlCoefficients};
use crate::oracle::{self, OracleConfig};
use crate::problem::{Numerics, Problem, Provenance, Solution};
use crate::spps::{self, FormalPowerTable};

/// A solver for the Cauchy problem of the δ-interaction equation at fixed ρ.
pub trait SolutionBackend: Send + Sync {
    fn name(&self) -> &'static str;

    fn interactions(&self) -> &InteractionSet;

    /// Full-grid solution with data `u(0) = u0`, `u'(0) = u1`.
    fn solve_cauchy(&self, rho: C64, u0: C64, u1: C64) -> Result<Solution>;

    /// `(u(b), u'(b-))`; backends override this when they can avoid the
    /// full-grid solve.
    fn boundary_pair(&self, rho: C64, u0: C64, u1: C64) -> Result<(C64, C64)> {
        let sol = self.solve_cauchy(rho, u0, u1)?;
        let m = sol.values.grid.m();
        Ok((sol.value_at(m), sol.deriv_at(m, Side::Minus)))
    }

    fn interval_length(&self) -> f64 {
        self.interactions().b()
    }

    fn interaction_count(&self) -> usize {
        self.interactions().n()
    }

    fn jump_residual(&self, sol: &Solution) -> f64 {
        sol.jump_residual(self.interactions())
    }
}

/// Segment-wise SPPS propagation (the default backend).
pub struct PropagationBackend {
    iset: InteractionSet,
    prop: Propagator,
}

impl PropagationBackend {
    pub fn new(problem: &Problem, numerics: &Numerics) -> Result<Self> {
        Ok(PropagationBackend {
            iset: problem.iset.clone(),
            prop: Propagator::new(problem, numerics)?,
        })
    }

    pub fn propagator(&self) -> &Propagator {
        &self.prop
    }
}

impl SolutionBackend for PropagationBackend {
    fn name(&self) -> &'static str {
        "propagation"
    }

    fn interactions(&self) -> &InteractionSet {
        &self.iset
    }

    fn solve_cauchy(&self, rho: C64, u0: C64, u1: C64) -> Result<Solution> {
        self.prop.solve(rho, u0, u1)
    }

    fn boundary_pair(&self, rho: C64, u0: C64, u1: C64) -> Result<(C64, C64)> {
        self.prop.boundary_pair(rho, u0, u1)
    }
}

/// NSBF evaluation of the solution values; derivatives come from the SPPS
/// termwise identity on the same canonical table.
pub struct NsbfBackend {
    iset: InteractionSet,
    table: FormalPowerTable,
    coeffs: FlCoefficients,
    terms: usize,
    nsbf_terms: usize,
}

impl NsbfBackend {
    pub fn new(problem: &Problem, numerics: &Numerics) -> Result<Self> {
        let nv = spps::nonvanishing_solution(problem, numerics.seed)?;
        let table = spps::formal_powers(&nv, numerics.k_max)?;
        let coeffs = nsbf::fl_coefficients(&table, numerics.n_max)?;
        let nsbf_terms = numerics.nsbf_terms.min(coeffs.max_nsbf_terms());
        Ok(NsbfBackend {
            iset: problem.iset.clone(),
            table,
            coeffs,
            terms: numerics.spps_terms,
            nsbf_terms,
        })
    }

    pub fn coefficients(&self) -> &FlCoefficients {
        &self.coeffs
    }

    pub fn table(&self) -> &FormalPowerTable {
        &self.table
    }

    /// Combination weights turning the canonical pair `(c^h, s)` into the
    /// solution with data `(u0, u1)`.
    fn weights(&self, u0: C64, u1: C64) -> (C64, C64) {
        (u0, u1 - u0 * self.table.h)
    }
}

impl SolutionBackend for NsbfBackend {
    fn name(&self) -> &'static str {
        "nsbf"
    }

    fn interactions(&self) -> &InteractionSet {
        &self.iset
    }

    fn solve_cauchy(&self, rho: C64, u0: C64, u1: C64) -> Result<Solution> {
        let (wc, ws) = self.weights(u0, u1);
        let (c_vals, s_vals) = nsbf::nsbf_eval(&self.coeffs, rho, self.nsbf_terms);
        let values = c_vals.scale(wc).add(&s_vals.scale(ws));
        let terms = self.terms.min(self.table.max_terms());
        let pair = spps::spps_solution(&self.table, rho, terms)?;
        let deriv = pair.u0.deriv.scale(wc).add(&pair.u1.deriv.scale(ws));
        Ok(Solution {
            rho,
            values,
            deriv,
            provenance: Provenance::Nsbf,
        })
    }

    fn boundary_pair(&self, rho: C64, u0: C64, u1: C64) -> Result<(C64, C64)> {
        let (wc, ws) = self.weights(u0, u1);
        let m = self.coeffs.a[0].grid.m();
        let (c_b, s_b) = nsbf::nsbf_eval_at(&self.coeffs, rho, m, self.nsbf_terms);
        let terms = self.terms.min(self.table.max_terms());
        let (_, dc, _, ds) = spps::spps_point(&self.table, rho, m, Side::Minus, terms)?;
        Ok((wc * c_b + ws * s_b, wc * dc + ws * ds))
    }
}

/// The independent Runge-Kutta integrator as a backend.
pub struct OracleBackend {
    problem: Problem,
    cfg: OracleConfig,
}

impl OracleBackend {
    pub fn new(problem: &Problem, numerics: &Numerics) -> Result<Self> {
        Ok(OracleBackend {
            problem: problem.clone(),
            cfg: OracleConfig {
                substeps: numerics.oracle_substeps,
            },
        })
    }
}

impl SolutionBackend for OracleBackend {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn interactions(&self) -> &InteractionSet {
        &self.problem.iset
    }

    fn solve_cauchy(&self, rho: C64, u0: C64, u1: C64) -> Result<Solution> {
        Ok(oracle::rk_shoot(&self.problem, self.cfg, rho * rho, u0, u1))
    }
}

pub type BackendFactory = fn(&Problem, &Numerics) -> Result<Box<dyn SolutionBackend>>;

/// Name-indexed registry of backend constructors.
pub struct BackendRegistry {
    entries: Vec<(&'static str, BackendFactory)>,
}

impl BackendRegistry {
    pub fn empty() -> Self {
        BackendRegistry {
            entries: Vec::new(),
        }
    }

    /// The three standard backends.
    pub fn standard() -> Self {
        let mut registry = Self::empty();
        registry.register("propagation", |p, n| {
            Ok(Box::new(PropagationBackend::new(p, n)?))
        });
        registry.register("nsbf", |p, n| Ok(Box::new(NsbfBackend::new(p, n)?)));
        registry.register("oracle", |p, n| Ok(Box::new(OracleBackend::new(p, n)?)));
        registry
    }

    pub fn register(&mut self, name: &'static str, factory: BackendFactory) {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, factory));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn create(
        &self,
        name: &str,
        problem: &Problem,
        numerics: &Numerics,
    ) -> Result<Box<dyn SolutionBackend>> {
        for (n, factory) in &self.entries {
            if *n == name {
                return factory(problem, numerics);
            }
        }
        Err(SolverError::Invalid(format!(
            "unknown backend `{name}`; available: {}",
            self.names().join(", ")
        )))
    }
}

impl Default for BackendRegistry {
    fn default() -> Self {
        Self::standard()
    }
}
