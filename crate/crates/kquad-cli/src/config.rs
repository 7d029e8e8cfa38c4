//! Experiment configuration: a TOML document whose keys mirror the
//! `ExperimentConfig` fields one-to-one, with every scalar overridable from
//! the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use kquad::{DensitySpec, DomainSpec, KernelSpec, SelectionRule, Termination};

use crate::Failure;

/// How the candidate set is produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CandidateGen {
    /// Tensor grid with `points_per_axis` per dimension, endpoints included.
    Grid { points_per_axis: usize },
    /// Seeded uniform samples on the domain.
    UniformRandom { count: usize },
    /// Points ingested from a `x1,...,xd[,weight]` CSV.
    FromFile { path: PathBuf },
}

/// Optional baseline computed next to the greedy run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Comparison {
    #[default]
    None,
    /// Weight-optimal rules on uniform grids of the given total sizes.
    UniformGrid { sizes: Vec<usize> },
    /// A single comparison point set from file.
    FromFile { path: PathBuf },
}

/// Declarative description of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub domain: DomainSpec,
    pub density: DensitySpec,
    pub kernel: KernelSpec,
    #[serde(rename = "mc_M")]
    pub mc_m: usize,
    pub candidate_gen: CandidateGen,
    pub rule: SelectionRule,
    pub term: Termination,
    pub seed: u64,
    #[serde(default)]
    pub comparison: Comparison,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::io(format!("reading {}: {e}", path.display())))?;
        let cfg: ExperimentConfig = toml::from_str(&text)
            .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        self.domain.validate().map_err(Failure::from_config_err)?;
        self.density.validate().map_err(Failure::from_config_err)?;
        self.kernel.validate().map_err(Failure::from_config_err)?;
        self.term.validate().map_err(Failure::from_config_err)?;
        if self.mc_m == 0 {
            return Err(Failure::config("mc_M must be positive"));
        }
        if self.kernel.dim != self.domain.dim() {
            return Err(Failure::config(format!(
                "kernel dimension {} does not match domain dimension {}",
                self.kernel.dim,
                self.domain.dim()
            )));
        }
        if let Some(dd) = self.density.dim() {
            if dd != self.domain.dim() {
                return Err(Failure::config(format!(
                    "density dimension {dd} does not match domain dimension {}",
                    self.domain.dim()
                )));
            }
        }
        match &self.candidate_gen {
            CandidateGen::Grid { points_per_axis } => {
                if *points_per_axis == 0 {
                    return Err(Failure::config("grid points_per_axis must be positive"));
                }
                if matches!(self.domain, DomainSpec::UnitSphere2) {
                    return Err(Failure::config(
                        "uniform grids are not defined on the sphere; use UniformRandom or FromFile",
                    ));
                }
            }
            CandidateGen::UniformRandom { count } => {
                if *count == 0 {
                    return Err(Failure::config("candidate count must be positive"));
                }
            }
            CandidateGen::FromFile { path } => {
                if !path.is_file() {
                    return Err(Failure::config(format!(
                        "candidate file {} does not exist",
                        path.display()
                    )));
                }
            }
        }
        match &self.comparison {
            Comparison::None => {}
            Comparison::UniformGrid { sizes } => {
                if matches!(self.domain, DomainSpec::UnitSphere2) {
                    return Err(Failure::config(
                        "uniform comparison grids are not defined on the sphere; use FromFile",
                    ));
                }
                for &s in sizes {
                    if per_axis_count(s, self.domain.dim()).is_none() {
                        return Err(Failure::config(format!(
                            "comparison size {s} is not a perfect {}th power",
                            self.domain.dim()
                        )));
                    }
                }
            }
            Comparison::FromFile { path } => {
                if !path.is_file() {
                    return Err(Failure::config(format!(
                        "comparison file {} does not exist",
                        path.display()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Invert `size = k^dim`, if `size` is an exact power.
pub fn per_axis_count(size: usize, dim: usize) -> Option<usize> {
    let k = (size as f64).powf(1.0 / dim as f64).round() as usize;
    for cand in k.saturating_sub(1)..=k + 1 {
        if cand >= 1 && cand.pow(dim as u32) == size {
            return Some(cand);
        }
    }
    None
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub mc_m: Option<usize>,
    pub max_n: Option<usize>,
    pub residual_tol: Option<f64>,
    pub wce_tol: Option<f64>,
    pub rule: Option<SelectionRule>,
    pub gamma: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(m) = self.mc_m {
            cfg.mc_m = m;
        }
        if let Some(n) = self.max_n {
            cfg.term.max_n = n;
        }
        if let Some(t) = self.residual_tol {
            cfg.term.residual_tol = t;
        }
        if let Some(t) = self.wce_tol {
            cfg.term.wce_tol = t;
        }
        if let Some(r) = self.rule {
            cfg.rule = r;
        }
        if let Some(g) = self.gamma {
            cfg.kernel.gamma = g;
        }
    }
}

pub fn parse_rule(s: &str) -> Result<SelectionRule, String> {
    match s.to_ascii_lowercase().as_str() {
        "foverp" | "f/p" | "f_over_p" => Ok(SelectionRule::FOverP),
        "f" => Ok(SelectionRule::F),
        "foversqrtk" | "f/sqrtk" | "f_over_sqrt_k" => Ok(SelectionRule::FOverSqrtK),
        "p" => Ok(SelectionRule::P),
        other => Err(format!(
            "unknown selection rule '{other}' (expected FOverP, F, FOverSqrtK, or P)"
        )),
    }
}
