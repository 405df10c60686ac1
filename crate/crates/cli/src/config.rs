//! Strict configuration schema: unknown keys are rejected, every applied
//! default is echoed into the output header.

use serde::Deserialize;

use deltasolve_core::grid::C64;
use deltasolve_core::interactions::{Interaction, InteractionSet};
use deltasolve_core::potential::Potential;
use deltasolve_core::problem::{Numerics, Problem};

use crate::CliError;

pub const MAX_POLYNOMIAL_DEGREE: usize = 20;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub task: TaskConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub b: f64,
    #[serde(default)]
    pub interactions: Vec<InteractionConfig>,
    pub potential: PotentialConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionConfig {
    pub x: f64,
    pub alpha_re: f64,
    #[serde(default)]
    pub alpha_im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum PotentialConfig {
    Zero,
    Polynomial { coeffs: Vec<f64> },
    Samples { path: String },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub grid_m: usize,
    pub k_max: usize,
    pub n_max: usize,
    pub nsbf_terms: usize,
    pub spps_terms: usize,
    pub oracle_substeps: usize,
    pub seed: u64,
    pub propagation_chunks: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        let n = Numerics::default();
        NumericsConfig {
            grid_m: n.grid_m,
            k_max: n.k_max,
            n_max: n.n_max,
            nsbf_terms: n.nsbf_terms,
            spps_terms: n.spps_terms,
            oracle_substeps: n.oracle_substeps,
            seed: n.seed,
            propagation_chunks: n.propagation_chunks,
        }
    }
}

impl NumericsConfig {
    pub fn to_numerics(&self, seed_override: Option<u64>) -> Numerics {
        Numerics {
            grid_m: self.grid_m,
            k_max: self.k_max,
            n_max: self.n_max,
            nsbf_terms: self.nsbf_terms,
            spps_terms: self.spps_terms,
            oracle_substeps: self.oracle_substeps,
            seed: seed_override.unwrap_or(self.seed),
            propagation_chunks: self.propagation_chunks,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    pub solve: Option<SolveTask>,
    pub spectrum: Option<SpectrumTask>,
    pub kernel: Option<KernelTask>,
    pub coeffs: Option<CoeffsTask>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveTask {
    /// explicit ρ values as `[re, im]` pairs
    #[serde(default)]
    pub rho: Vec<[f64; 2]>,
    /// or a uniform real range
    pub rho_range: Option<RhoRange>,
    pub kinds: Vec<String>,
    /// emit every n-th grid node (default 1)
    #[serde(default = "default_stride")]
    pub x_stride: usize,
    /// `h` of the c- and e-type solutions, default 0
    #[serde(default)]
    pub h: [f64; 2],
    /// `H` of the ψ solution, default 0
    #[serde(default)]
    pub big_h: [f64; 2],
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumTask {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `[β₀, β₁, γ₀, γ₁]`, default Dirichlet-Dirichlet `[1, 0, 1, 0]`
    #[serde(default = "default_boundary")]
    pub boundary: [f64; 4],
    pub scan_step_rho: Option<f64>,
}

fn default_boundary() -> [f64; 4] {
    [1.0, 0.0, 1.0, 0.0]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelTask {
    pub x_values: Vec<f64>,
    /// number of uniform t-samples per x (default 400)
    #[serde(default = "default_t_count")]
    pub t_count: usize,
}

fn default_t_count() -> usize {
    400
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffsTask {
    pub n_up_to: usize,
    #[serde(default = "default_stride")]
    pub x_stride: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config(format!("config parse error: {e}")))
    }

    /// Build the validated problem; all interaction-set and grid invariants
    /// are enforced here, so a bad configuration never reaches a solver.
    pub fn build_problem(&self, base_dir: &std::path::Path) -> Result<Problem, CliError> {
        let interactions: Vec<Interaction> = self
            .problem
            .interactions
            .iter()
            .map(|i| Interaction {
                x: i.x,
                alpha: C64::new(i.alpha_re, i.alpha_im),
            })
            .collect();
        let iset = InteractionSet::new(interactions, self.problem.b)
            .map_err(|e| CliError::config(e.to_string()))?;
        let potential = match &self.problem.potential {
            PotentialConfig::Zero => Potential::Zero,
            PotentialConfig::Polynomial { coeffs } => {
                if coeffs.len() > MAX_POLYNOMIAL_DEGREE + 1 {
                    return Err(CliError::config(format!(
                        "polynomial degree {} exceeds the limit {}",
                        coeffs.len().saturating_sub(1),
                        MAX_POLYNOMIAL_DEGREE
                    )));
                }
                Potential::Polynomial(coeffs.clone())
            }
            PotentialConfig::Samples { path } => {
                let full = base_dir.join(path);
                let text = std::fs::read_to_string(&full).map_err(|e| {
                    CliError::config(format!("cannot read samples file {full:?}: {e}"))
                })?;
                let mut values = Vec::new();
                for (line_no, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let mut parts = line.split(',').map(str::trim);
                    let re: f64 = parts
                        .next()
                        .unwrap_or("")
                        .parse()
                        .map_err(|_| CliError::config(format!(
                            "samples file line {}: bad real part",
                            line_no + 1
                        )))?;
                    let im: f64 = match parts.next() {
                        Some(s) if !s.is_empty() => s.parse().map_err(|_| {
                            CliError::config(format!(
                                "samples file line {}: bad imaginary part",
                                line_no + 1
                            ))
                        })?,
                        _ => 0.0,
                    };
                    values.push(C64::new(re, im));
                }
                if values.len() != self.numerics.grid_m + 1 {
                    return Err(CliError::config(format!(
                        "samples file length {} must equal grid size {}",
                        values.len(),
                        self.numerics.grid_m + 1
                    )));
                }
                Potential::Samples(values)
            }
        };
        Problem::new(iset, potential, self.numerics.grid_m)
            .map_err(|e| CliError::config(e.to_string()))
    }
}

impl SolveTask {
    pub fn rho_values(&self) -> Result<Vec<C64>, CliError> {
        let mut out: Vec<C64> = self.rho.iter().map(|p| C64::new(p[0], p[1])).collect();
        if let Some(range) = &self.rho_range {
            if range.count < 2 {
                return Err(CliError::config("rho_range.count must be at least 2".into()));
            }
            let step = (range.stop - range.start) / (range.count - 1) as f64;
            for i in 0..range.count {
                out.push(C64::new(range.start + i as f64 * step, 0.0));
            }
        }
        if out.is_empty() {
            return Err(CliError::config(
                "solve task needs `rho` values or a `rho_range`".into(),
            ));
        }
        Ok(out)
    }
}
