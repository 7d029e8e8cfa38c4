//! One experiment run: build the Monte Carlo surrogate functional, run the
//! greedy selection, optionally compute a uniform-baseline error curve, and
//! write the artifacts (trace CSV, rule CSV, functional CSV, summary JSON,
//! comparison CSV) atomically into an output directory.

use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use kquad::io::{self, format_float};
use kquad::oracle::rate_fit;
use kquad::{
    canonical_continuity, greedy_bound_constant, monte_carlo_functional, run_greedy,
    uniform_points, worst_case_error_parts, DiscreteFunctional, DomainSpec, KernelSpec,
    PointSet, QuadratureRule, Status,
};

use crate::config::{per_axis_count, CandidateGen, Comparison, ExperimentConfig};
use crate::Failure;

/// Candidate streams must not reuse the Monte Carlo node stream; one config
/// seed drives both through distinct derived seeds.
const CANDIDATE_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

/// Uniform-baseline entry: a grid (or file) rule of `n` points and its
/// recomputed worst-case error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonEntry {
    pub n: usize,
    pub wce: f64,
}

/// Everything `summary.json` records about a run.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub n: usize,
    pub wce: f64,
    pub status: Status,
    pub seed: u64,
    pub kernel: KernelSpec,
    pub rule: kquad::SelectionRule,
    /// The constant c_G of the n^(-1/2) convergence bound.
    pub bound_constant: f64,
    pub continuity_constant: f64,
    pub target_norm: f64,
    pub mc_m: usize,
    pub candidate_count: usize,
    /// log-log slope over the whole positive-error trace.
    pub slope_full: Option<f64>,
    /// log-log slope over the second half of the trace.
    pub slope_tail: Option<f64>,
    pub comparison: Vec<ComparisonEntry>,
    pub comparison_slope: Option<f64>,
    pub config: ExperimentConfig,
}

/// Build the candidate set described by the config.
pub fn generate_candidates(cfg: &ExperimentConfig) -> Result<PointSet, Failure> {
    match &cfg.candidate_gen {
        CandidateGen::Grid { points_per_axis } => match &cfg.domain {
            DomainSpec::Box { lo, hi } => Ok(tensor_grid(lo, hi, *points_per_axis)?),
            DomainSpec::UnitSphere2 => Err(Failure::config(
                "uniform grids are not defined on the sphere",
            )),
        },
        CandidateGen::UniformRandom { count } => Ok(uniform_points(
            &cfg.domain,
            *count,
            cfg.seed ^ CANDIDATE_STREAM,
        )?),
        CandidateGen::FromFile { path } => {
            let file = io::read_node_csv(path)?;
            if file.points.dim() != cfg.domain.dim() {
                return Err(Failure::config(format!(
                    "candidate file has dimension {}, domain has {}",
                    file.points.dim(),
                    cfg.domain.dim()
                )));
            }
            Ok(file.points)
        }
    }
}

/// Tensor grid including endpoints, first axis slowest.
pub fn tensor_grid(lo: &[f64], hi: &[f64], points_per_axis: usize) -> Result<PointSet, Failure> {
    if points_per_axis == 0 {
        return Err(Failure::config("points_per_axis must be positive"));
    }
    let dim = lo.len();
    let axis_value = |d: usize, k: usize| {
        if points_per_axis == 1 {
            lo[d]
        } else {
            lo[d] + (hi[d] - lo[d]) * k as f64 / (points_per_axis - 1) as f64
        }
    };
    let total = points_per_axis.pow(dim as u32);
    let mut coords = Vec::with_capacity(total * dim);
    let mut index = vec![0usize; dim];
    for _ in 0..total {
        for d in 0..dim {
            coords.push(axis_value(d, index[d]));
        }
        for d in (0..dim).rev() {
            index[d] += 1;
            if index[d] < points_per_axis {
                break;
            }
            index[d] = 0;
        }
    }
    Ok(PointSet::new(coords, dim)?)
}

/// Weight-optimal rule on a fixed point set via a dense solve; returns the
/// weights and the recomputed worst-case error.
pub fn optimal_rule_on(
    kernel: &KernelSpec,
    points: &PointSet,
    functional: &DiscreteFunctional,
) -> Result<(Vec<f64>, f64), Failure> {
    let gram = kernel.gram_matrix(points, points)?;
    let target = functional.representer_values(kernel, points)?;
    let rhs = DVector::from_column_slice(&target);
    let chol = gram
        .cholesky()
        .ok_or_else(|| Failure::numerical("comparison gram matrix is not positive definite"))?;
    let weights: Vec<f64> = chol.solve(&rhs).iter().cloned().collect();
    // The reported error is the honest error of these computed weights,
    // whatever the conditioning of the solve.
    let wce = worst_case_error_parts(kernel, points, &weights, functional)?;
    Ok((weights, wce))
}

fn comparison_curve(
    cfg: &ExperimentConfig,
    kernel: &KernelSpec,
    functional: &DiscreteFunctional,
) -> Result<Vec<ComparisonEntry>, Failure> {
    match &cfg.comparison {
        Comparison::None => Ok(Vec::new()),
        Comparison::UniformGrid { sizes } => {
            let (lo, hi) = match &cfg.domain {
                DomainSpec::Box { lo, hi } => (lo.clone(), hi.clone()),
                DomainSpec::UnitSphere2 => {
                    return Err(Failure::config(
                        "uniform comparison grids are not defined on the sphere",
                    ))
                }
            };
            let mut out = Vec::with_capacity(sizes.len());
            for &size in sizes {
                let k = per_axis_count(size, lo.len())
                    .ok_or_else(|| Failure::config(format!("size {size} is not a grid size")))?;
                let grid = tensor_grid(&lo, &hi, k)?;
                let (_, wce) = optimal_rule_on(kernel, &grid, functional)?;
                out.push(ComparisonEntry { n: grid.len(), wce });
            }
            Ok(out)
        }
        Comparison::FromFile { path } => {
            let file = io::read_node_csv(path)?;
            let (_, wce) = optimal_rule_on(kernel, &file.points, functional)?;
            Ok(vec![ComparisonEntry {
                n: file.points.len(),
                wce,
            }])
        }
    }
}

fn fit_trace_slope(rule: &QuadratureRule, from_n: usize) -> Option<f64> {
    let pts: Vec<(usize, f64)> = rule
        .trace()
        .iter()
        .filter(|t| t.n >= from_n && t.wce > 0.0)
        .map(|t| (t.n, t.wce))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let ns: Vec<usize> = pts.iter().map(|p| p.0).collect();
    let es: Vec<f64> = pts.iter().map(|p| p.1).collect();
    rate_fit(&ns, &es).ok()
}

/// Run the experiment and write all artifacts under `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunSummary, Failure> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| Failure::io(e.to_string()))?;

    let kernel = cfg.kernel;
    let functional = monte_carlo_functional(&cfg.density, &cfg.domain, cfg.mc_m, cfg.seed)?;
    let candidates = generate_candidates(cfg)?;
    let rule_out = run_greedy(&kernel, &candidates, &functional, cfg.rule, &cfg.term)?;

    let (q, c_l) = canonical_continuity(&functional);
    let bound_constant = greedy_bound_constant(&functional, &kernel, &cfg.domain, q, c_l)?;
    let comparison = comparison_curve(cfg, &kernel, &functional)?;

    let comparison_slope = if comparison.len() >= 3 {
        let ns: Vec<usize> = comparison.iter().map(|c| c.n).collect();
        let es: Vec<f64> = comparison.iter().map(|c| c.wce).collect();
        rate_fit(&ns, &es).ok()
    } else {
        None
    };
    let n_final = rule_out.n();
    let summary = RunSummary {
        n: n_final,
        wce: rule_out.wce(),
        status: rule_out.status(),
        seed: cfg.seed,
        kernel,
        rule: cfg.rule,
        bound_constant,
        continuity_constant: c_l,
        target_norm: functional.hnorm_squared(&kernel)?.sqrt(),
        mc_m: cfg.mc_m,
        candidate_count: candidates.len(),
        slope_full: fit_trace_slope(&rule_out, 1),
        slope_tail: fit_trace_slope(&rule_out, n_final / 2),
        comparison,
        comparison_slope,
        config: cfg.clone(),
    };

    io::write_trace_csv(&out_dir.join("trace.csv"), &rule_out)?;
    io::write_rule_csv(&out_dir.join("rule.csv"), &rule_out)?;
    io::write_functional_csv(&out_dir.join("functional.csv"), &functional)?;
    if !summary.comparison.is_empty() {
        let mut text = String::from("n,wce\n");
        for c in &summary.comparison {
            text.push_str(&format!("{},{}\n", c.n, format_float(c.wce)));
        }
        io::write_atomic(&out_dir.join("comparison.csv"), &text)?;
    }
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Failure::io(format!("serializing summary: {e}")))?;
    io::write_atomic(&out_dir.join("summary.json"), &(json + "\n"))?;

    Ok(summary)
}
