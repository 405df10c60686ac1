//! Error type shared by all solver modules.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum SolverError {
    #[error("grid too coarse: need at least 5 nodes, got {nodes}")]
    GridTooCoarse { nodes: usize },

    #[error("interaction point x = {x} does not coincide with a grid node (b = {b}, M = {m})")]
    PointOffGrid { x: f64, b: f64, m: usize },

    #[error("invalid interaction set: {0}")]
    InvalidInteractions(String),

    #[error("non-vanishing solution required: |f| = {min_abs:.3e} at node {node}")]
    VanishingSolution { node: usize, min_abs: f64 },

    #[error(
        "no non-vanishing combination found after {tries} tries (best min |f| = {best_min:.3e})"
    )]
    NonVanishingSearchFailed { tries: usize, best_min: f64 },

    #[error("formal power table too short: requested {requested} terms, table supports {available}")]
    TableTooShort { requested: usize, available: usize },

    #[error("sequence enumeration too large; use propagation (N = {n} > {max})")]
    EnumerationTooLarge { n: usize, max: usize },

    #[error("kernel requested at x = {x} outside (0, b]")]
    KernelDomain { x: f64 },

    #[error("Legendre coefficient order {n} exceeds the overflow guard ({max})")]
    LegendreOrderTooLarge { n: usize, max: usize },

    #[error(
        "recursion variant mismatch: `{variant}` deviates from the direct formula by {deviation:.3e} at n = {n}"
    )]
    RecursionVariantMismatch {
        variant: &'static str,
        deviation: f64,
        n: usize,
    },

    #[error(
        "collocation normal system ill-conditioned (cond ≈ {cond:.3e}); use more or better-spread rho samples"
    )]
    IllConditionedFit { cond: f64 },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, SolverError>;
