//! Solver library for the one-dimensional Schrödinger equation with finitely
//! many δ-interactions,
//!
//! ```text
//! -y'' + (q(x) + Σ_k α_k δ(x - x_k)) y = λ y,   0 < x < b,
//! ```
//!
//! where solutions are continuous and their derivatives jump by
//! `y'(x_k+) - y'(x_k-) = α_k y(x_k)` at the interaction points.
//!
//! The crate provides:
//!
//! * a closed-form assembly of solutions from regular sub-solutions and an
//!   equivalent interface-matching propagation ([`closedform`]),
//! * the spectral parameter power series (SPPS) machinery: recursive
//!   integrals, formal powers and non-vanishing particular solutions
//!   ([`spps`]),
//! * exact piecewise-polynomial transmutation kernels for `q ≡ 0` and the
//!   transmutation-operator action ([`kernels`]),
//! * Fourier-Legendre coefficients of the transmutation kernel and Neumann
//!   series of Bessel functions (NSBF) representations of solutions and
//!   their derivatives ([`nsbf`]),
//! * a direct Sturm-Liouville eigenvalue solver ([`spectral`]),
//! * independent verification backends: a piecewise Runge-Kutta integrator
//!   honoring the jump conditions and brute-force quadrature projections
//!   ([`oracle`]),
//! * interchangeable solution backends behind a common trait, selectable by
//!   name ([`backend`]), and an identity-check suite ([`verify`]).

pub mod backend;
pub mod closedform;
pub mod error;
pub mod grid;
pub mod interactions;
pub mod kernels;
pub mod nsbf;
pub mod oracle;
pub mod potential;
pub mod problem;
pub mod spectral;
pub mod special;
pub mod spps;
pub mod verify;

pub use backend::{BackendRegistry, SolutionBackend};
pub use error::{Result, SolverError};
pub use grid::{Grid, GridFn, OneSided, Side, C64};
pub use interactions::InteractionSet;
pub use potential::Potential;
pub use problem::{Numerics, Problem, Solution};
