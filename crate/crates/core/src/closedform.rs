//! Assembly of δ-interaction solutions from regular sub-solutions.
//!
//! Two equivalent constructions are provided. [`SumOverJ`] evaluates the
//! explicit closed form
//!
//! ```text
//! u = ũ + Σ_k α_k ũ(x_k) H(x-x_k) ŝ_k(ρ, x-x_k)
//!       + Σ_{J} α_J H(x-x_{j|J|}) ũ(x_{j1}) (Π ŝ_{j_l}(ρ, x_{j_{l+1}}-x_{j_l})) ŝ_{j|J|}(ρ, x-x_{j|J|})
//! ```
//!
//! over all strictly increasing index sequences `J` of length ≥ 2, while
//! [`Propagator`] solves the regular equation segment by segment and applies
//! the interface conditions `u(x_k+) = u(x_k-)`,
//! `u'(x_k+) = u'(x_k-) + α_k u(x_k)`. Agreement of the two is one of the
//! strongest structural checks available for this solver.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, SolverError};
use crate::grid::{Grid, GridFn, OneSided, C64};
use crate::interactions::InteractionSet;
use crate::potential::Potential;
use crate::problem::{Numerics, Problem, Provenance, Solution};
use crate::spps::{self, FormalPowerTable};

const ZERO: C64 = Complex64::new(0.0, 0.0);
const ONE: C64 = Complex64::new(1.0, 0.0);

/// Largest `N` for which the `2^N` sequence enumeration is attempted.
pub const MAX_ENUMERATED_N: usize = 20;

/// All strictly increasing sequences `J = (j_1, .., j_l)` from `{0..n-1}`
/// with `2 ≤ l ≤ n`, in lexicographic order.
#[derive(Debug, Clone)]
pub struct IndexSequences {
    n: usize,
    seqs: Vec<Vec<usize>>,
}

impl IndexSequences {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_ENUMERATED_N {
            return Err(SolverError::EnumerationTooLarge {
                n,
                max: MAX_ENUMERATED_N,
            });
        }
        let mut seqs = Vec::new();
        let mut prefix = Vec::new();
        for start in 0..n {
            prefix.push(start);
            collect(n, &mut prefix, &mut seqs);
            prefix.pop();
        }
        Ok(IndexSequences { n, seqs })
    }

    /// `2^n - n - 1`
    pub fn count(&self) -> usize {
        self.seqs.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.seqs.iter().map(|s| s.as_slice())
    }

    /// Walk every sequence, carrying the running product over prefixes so
    /// that each extension costs one multiplication. For the sequence
    /// `(j_1, .., j_l)` the emitted weight is
    /// `α_{j_1} .. α_{j_l} · head(j_1) · Π_{l' < l} link(j_{l'}, j_{l'+1})`,
    /// delivered to `emit(j_l, weight)`. Sequences of length 1 are emitted
    /// too (they form the first sum of the closed form).
    pub fn accumulate(
        &self,
        alpha: &[C64],
        head: impl Fn(usize) -> C64,
        link: impl Fn(usize, usize) -> C64,
        mut emit: impl FnMut(usize, C64),
    ) {
        fn dfs(
            n: usize,
            last: usize,
            weight: C64,
            alpha: &[C64],
            link: &impl Fn(usize, usize) -> C64,
            emit: &mut impl FnMut(usize, C64),
        ) {
            for next in last + 1..n {
                let w = weight * link(last, next) * alpha[next];
                emit(next, w);
                dfs(n, next, w, alpha, link, emit);
            }
        }
        for start in 0..self.n {
            let w = alpha[start] * head(start);
            emit(start, w);
            dfs(self.n, start, w, alpha, &link, &mut emit);
        }
    }
}

fn collect(n: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let last = *prefix.last().unwrap();
    for next in last + 1..n {
        prefix.push(next);
        if prefix.len() >= 2 {
            out.push(prefix.clone());
        }
        collect(n, prefix, out);
        prefix.pop();
    }
}

/// `ŝ_k(ρ, ·)` and its derivative sampled on the sub-grid `[0, b - x_k]`.
#[derive(Debug, Clone)]
pub struct ShiftedSine {
    /// Node index of `x_k` in the parent grid.
    pub start: usize,
    pub values: Vec<C64>,
    pub derivs: Vec<C64>,
}

impl ShiftedSine {
    /// `ŝ_k(ρ, x_j - x_k)` for a parent-grid node `j ≥ start`.
    pub fn at_parent_node(&self, j: usize) -> C64 {
        self.values[j - self.start]
    }

    pub fn deriv_at_parent_node(&self, j: usize) -> C64 {
        self.derivs[j - self.start]
    }
}

/// Chunked propagators for the shifted regular Cauchy problems that
/// generate the `ŝ_k` family; built once per problem, reused for every ρ.
#[derive(Debug)]
pub struct ShiftedSineFamily {
    entries: Vec<(usize, Propagator)>,
}

impl ShiftedSineFamily {
    pub fn new(problem: &Problem, numerics: &Numerics) -> Result<Self> {
        let mut entries = Vec::with_capacity(problem.iset.n());
        for &start in problem.grid.breaks() {
            let sub = regular_subproblem(problem, start, problem.grid.m())?;
            entries.push((start, Propagator::new(&sub, numerics)?));
        }
        Ok(ShiftedSineFamily { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Solve every shifted Cauchy problem `ŝ_k(ρ, 0) = 0`, `ŝ_k'(ρ, 0) = 1`.
    pub fn solutions(&self, rho: C64) -> Result<Vec<ShiftedSine>> {
        self.entries
            .iter()
            .map(|(start, prop)| {
                let sol = prop.solve(rho, ZERO, ONE)?;
                Ok(ShiftedSine {
                    start: *start,
                    values: sol.values.values,
                    derivs: sol.deriv.minus.values,
                })
            })
            .collect()
    }
}

/// The regular equation on `[x_start, x_end]` in the local variable, with
/// the potential shifted accordingly.
fn regular_subproblem(problem: &Problem, start: usize, end: usize) -> Result<Problem> {
    let m_sub = end - start;
    let b_sub = problem.grid.node(end) - problem.grid.node(start);
    let iset = InteractionSet::regular(b_sub)?;
    let potential = match &problem.potential {
        Potential::Samples(_) => Potential::Samples(problem.q.values[start..=end].to_vec()),
        other => other.shifted(problem.grid.node(start), &problem.grid),
    };
    Problem::new(iset, potential, m_sub)
}

/// The closed-form construction: the three-part sum over `J ∈ J_N`.
#[derive(Debug)]
pub struct SumOverJ {
    grid: Arc<Grid>,
    iset: InteractionSet,
    tilde: Propagator,
    family: ShiftedSineFamily,
    seqs: IndexSequences,
}

impl SumOverJ {
    pub fn new(problem: &Problem, numerics: &Numerics) -> Result<Self> {
        let seqs = IndexSequences::new(problem.iset.n())?;
        // the regular comparison solution ũ lives on a break-free copy of
        // the grid; node positions coincide
        let tilde_problem = Problem::new(
            InteractionSet::regular(problem.b())?,
            problem.potential.clone(),
            problem.grid.m(),
        )?;
        let tilde = Propagator::new(&tilde_problem, numerics)?;
        let family = ShiftedSineFamily::new(problem, numerics)?;
        Ok(SumOverJ {
            grid: problem.grid.clone(),
            iset: problem.iset.clone(),
            tilde,
            family,
            seqs,
        })
    }

    /// Assemble the solution with Cauchy data `(u0, u1)` at ρ.
    pub fn solve(&self, rho: C64, u0: C64, u1: C64) -> Result<Solution> {
        let tilde_sol = self.tilde.solve(rho, u0, u1)?;
        let sines = self.family.solutions(rho)?;
        let breaks = self.grid.breaks();
        let n = self.iset.n();

        // coefficient of ŝ_k(ρ, x - x_k) H(x - x_k): every sequence ending
        // at k contributes α_J ũ(x_{j1}) Π ŝ over consecutive points
        let alpha: Vec<C64> = (0..n).map(|k| self.iset.strength(k)).collect();
        let mut coef = vec![ZERO; n];
        self.seqs.accumulate(
            &alpha,
            |j1| tilde_sol.value_at(breaks[j1]),
            |ja, jb| sines[ja].at_parent_node(breaks[jb]),
            |last, w| coef[last] += w,
        );

        let len = self.grid.len();
        let mut values = tilde_sol.values.values.clone();
        let mut dminus = tilde_sol.deriv.minus.values.clone();
        let mut dplus = tilde_sol.deriv.plus.values.clone();
        for k in 0..n {
            let start = breaks[k];
            for j in start..len {
                let v = coef[k] * sines[k].at_parent_node(j);
                let dv = coef[k] * sines[k].deriv_at_parent_node(j);
                values[j] += v;
                if j > start {
                    dminus[j] += dv;
                }
                dplus[j] += dv;
            }
        }
        Ok(Solution {
            rho,
            values: GridFn::from_values(self.grid.clone(), values),
            deriv: OneSided {
                minus: GridFn::from_values(self.grid.clone(), dminus),
                plus: GridFn::from_values(self.grid.clone(), dplus),
            },
            provenance: Provenance::SumOverJ,
        })
    }
}

/// One propagation chunk: the SPPS table of the regular equation on the
/// node range `[start, end]`, with the interaction strength applied at the
/// chunk end when the end is a true interaction node.
#[derive(Debug)]
struct Chunk {
    start: usize,
    end: usize,
    table: FormalPowerTable,
    jump: Option<C64>,
}

/// Interface-matching propagation: the regular equation is solved on each
/// `[x_k, x_{k+1}]` and the derivative jump is applied at every interface.
///
/// Long interaction-free stretches are additionally split into artificial
/// chunks (with no jump at their ends). The SPPS series on a chunk of
/// length `L` suffers `e^{|ρ|L}`-sized intermediate terms, so keeping
/// `|ρ| L` small is what preserves double-precision accuracy at large
/// `|ρ| b`.
#[derive(Debug)]
pub struct Propagator {
    grid: Arc<Grid>,
    chunks: Vec<Chunk>,
    terms: usize,
}

impl Propagator {
    pub fn new(problem: &Problem, numerics: &Numerics) -> Result<Self> {
        let grid = &problem.grid;
        let target_nodes = (grid.m() / numerics.propagation_chunks.max(1)).max(8);
        let mut chunks = Vec::new();
        for (seg_idx, (s, e)) in grid.segments().iter().copied().enumerate() {
            let jump_at_end = if seg_idx < grid.breaks().len() {
                Some(problem.iset.strength(seg_idx))
            } else {
                None
            };
            let nodes = e - s;
            let pieces = (nodes / target_nodes).max(1);
            let mut bounds = Vec::with_capacity(pieces + 1);
            for i in 0..=pieces {
                bounds.push(s + nodes * i / pieces);
            }
            for w in 0..pieces {
                let (cs, ce) = (bounds[w], bounds[w + 1]);
                let sub = regular_subproblem(problem, cs, ce)?;
                let nv = spps::nonvanishing_solution(&sub, numerics.seed)?;
                let table = spps::formal_powers(&nv, numerics.k_max)?;
                chunks.push(Chunk {
                    start: cs,
                    end: ce,
                    table,
                    jump: if w + 1 == pieces { jump_at_end } else { None },
                });
            }
        }
        Ok(Propagator {
            grid: problem.grid.clone(),
            chunks,
            terms: numerics.spps_terms,
        })
    }

    /// Solve the Cauchy problem with data `(u0, u1)` at `x = 0`.
    pub fn solve(&self, rho: C64, u0: C64, u1: C64) -> Result<Solution> {
        let len = self.grid.len();
        let mut values = vec![ZERO; len];
        let mut dminus = vec![ZERO; len];
        let mut dplus = vec![ZERO; len];
        let mut val = u0;
        let mut der = u1;
        for chunk in &self.chunks {
            let (s, e) = (chunk.start, chunk.end);
            let terms = self.terms.min(chunk.table.max_terms());
            let local = spps::solve_cauchy(&chunk.table, rho, val, der, terms)?;
            for j in s..=e {
                values[j] = local.value_at(j - s);
                if j > s {
                    dminus[j] = local.deriv_at(j - s, crate::grid::Side::Minus);
                }
                if j < e {
                    dplus[j] = local.deriv_at(j - s, crate::grid::Side::Plus);
                }
            }
            if s == 0 {
                dminus[0] = u1;
                dplus[0] = u1;
            }
            val = local.value_at(e - s);
            der = local.deriv_at(e - s, crate::grid::Side::Minus);
            if let Some(alpha) = chunk.jump {
                der += alpha * val;
            }
            dplus[e] = der;
        }
        Ok(Solution {
            rho,
            values: GridFn::from_values(self.grid.clone(), values),
            deriv: OneSided {
                minus: GridFn::from_values(self.grid.clone(), dminus),
                plus: GridFn::from_values(self.grid.clone(), dplus),
            },
            provenance: Provenance::Propagation,
        })
    }

    /// Fast evaluation of `(u(b), u'(b-))` for the Cauchy data, carrying
    /// only the interface values through the chunks.
    pub fn boundary_pair(&self, rho: C64, u0: C64, u1: C64) -> Result<(C64, C64)> {
        let mut val = u0;
        let mut der = u1;
        for (idx, chunk) in self.chunks.iter().enumerate() {
            let terms = self.terms.min(chunk.table.max_terms());
            let (p0, dp0, p1, dp1) = spps::spps_point(
                &chunk.table,
                rho,
                chunk.end - chunk.start,
                crate::grid::Side::Minus,
                terms,
            )?;
            // local pair has data (1, h) and (0, 1)
            let a = val;
            let b = der - val * chunk.table.h;
            val = a * p0 + b * p1;
            der = a * dp0 + b * dp1;
            if let Some(alpha) = chunk.jump {
                der += alpha * val;
            }
            let _ = idx;
        }
        Ok((val, der))
    }

    /// `e^h(ρ, x)`: data `(1, iρ + h)`.
    pub fn e(&self, rho: C64, h: C64) -> Result<Solution> {
        self.solve(rho, ONE, C64::new(0.0, 1.0) * rho + h)
    }

    /// `c^h(ρ, x) = (e^h(ρ, x) + e^h(-ρ, x)) / 2`: data `(1, h)`.
    pub fn c(&self, rho: C64, h: C64) -> Result<Solution> {
        let plus = self.e(rho, h)?;
        let minus = self.e(-rho, h)?;
        let half = C64::new(0.5, 0.0);
        let mut sol = plus.combine(half, &minus, half);
        sol.rho = rho;
        Ok(sol)
    }

    /// `s(ρ, x) = (e(ρ, x) - e(-ρ, x)) / (2iρ)`: data `(0, 1)`. The ρ = 0
    /// branch propagates the data directly; the singularity is removable.
    pub fn s(&self, rho: C64) -> Result<Solution> {
        if rho.norm() == 0.0 {
            return self.solve(rho, ZERO, ONE);
        }
        let plus = self.e(rho, ZERO)?;
        let minus = self.e(-rho, ZERO)?;
        let w = (C64::new(0.0, 2.0) * rho).inv();
        let mut sol = plus.combine(w, &minus, -w);
        sol.rho = rho;
        Ok(sol)
    }
}
