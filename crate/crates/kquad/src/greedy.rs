//! Greedy node selection and weight-optimal quadrature rules.
//!
//! `run_greedy` interpolates the Riesz representer of a discrete functional
//! over a candidate set, picking one point per step according to a selection
//! rule. Whatever the rule, the returned weights solve the Gram system on
//! the selected points, so they are always the worst-case-error-optimal
//! weights for that node set; the rule only decides which nodes are taken.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::functionals::{DiscreteFunctional, DomainSpec};
use crate::kernels::{KernelSpec, PointSet};
use crate::newton::GreedyState;

/// Per-step candidate scoring rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionRule {
    /// |residual| / P: the locally H-optimal choice.
    FOverP,
    /// |residual|.
    F,
    /// |residual| / sqrt(K(x, x)).
    FOverSqrtK,
    /// P itself; residual-free, yields quasi-uniform points.
    P,
}

impl SelectionRule {
    pub fn name(&self) -> &'static str {
        match self {
            SelectionRule::FOverP => "f/P",
            SelectionRule::F => "f",
            SelectionRule::FOverSqrtK => "f/sqrtK",
            SelectionRule::P => "P",
        }
    }
}

/// Stopping criteria; `max_n` is always active.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Termination {
    /// Stop after this many points.
    pub max_n: usize,
    /// Stop when max |residual| over the candidates drops to this level.
    pub residual_tol: f64,
    /// Stop when sqrt(wce^2) drops to this level.
    pub wce_tol: f64,
}

impl Termination {
    pub fn max_n(max_n: usize) -> Self {
        Self {
            max_n,
            residual_tol: 0.0,
            wce_tol: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_n == 0 {
            return Err(Error::InvalidInput("max_n must be >= 1".into()));
        }
        if !(self.residual_tol >= 0.0) || !(self.wce_tol >= 0.0) {
            return Err(Error::InvalidInput(
                "termination tolerances must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Why a greedy run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    MaxN,
    ResidualTol,
    WceTol,
    PowerExhausted,
}

/// One greedy step: the worst-case error after `n` points, the candidate
/// picked, and its selection score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub n: usize,
    pub wce: f64,
    pub selected_index: usize,
    pub score: f64,
}

/// A quadrature rule with optimal weights and its per-step error trace.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: PointSet,
    weights: Vec<f64>,
    trace: Vec<TraceEntry>,
    status: Status,
}

impl QuadratureRule {
    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn nodes(&self) -> &PointSet {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    pub fn status(&self) -> Status {
        self.status
    }

    /// Certified worst-case error at the final step.
    pub fn wce(&self) -> f64 {
        self.trace.last().map(|t| t.wce).unwrap_or(f64::NAN)
    }

    /// Q(f) = sum_i w*_i f(x_i) for caller-supplied nodal values of f.
    pub fn apply(&self, f_values: &[f64]) -> Result<f64> {
        if f_values.len() != self.weights.len() {
            return Err(Error::LengthMismatch {
                expected: self.weights.len(),
                got: f_values.len(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(f_values)
            .map(|(w, f)| w * f)
            .sum())
    }

    /// Candidate indices in selection order.
    pub fn selected_indices(&self) -> Vec<usize> {
        self.trace.iter().map(|t| t.selected_index).collect()
    }
}

fn score_candidate(
    rule: SelectionRule,
    residual: f64,
    power_sq: f64,
    diag_sqrt: f64,
) -> f64 {
    match rule {
        SelectionRule::FOverP => residual.abs() / power_sq.sqrt(),
        SelectionRule::F => residual.abs(),
        SelectionRule::FOverSqrtK => residual.abs() / diag_sqrt,
        SelectionRule::P => power_sq.sqrt(),
    }
}

/// Run greedy selection for the functional's Riesz representer over the
/// candidate set and return the weight-optimal rule with its error trace.
///
/// Numerical power-function breakdown surfaces as `Status::PowerExhausted`,
/// not as an error.
pub fn run_greedy(
    kernel: &KernelSpec,
    candidates: &PointSet,
    functional: &DiscreteFunctional,
    rule: SelectionRule,
    term: &Termination,
) -> Result<QuadratureRule> {
    term.validate()?;
    if candidates.is_empty() {
        return Err(Error::InvalidInput("candidate set is empty".into()));
    }
    let target_values = functional.representer_values(kernel, candidates)?;
    let target_hnorm_sq = functional.hnorm_squared(kernel)?;
    let mut state = GreedyState::init(*kernel, candidates.clone(), target_values, target_hnorm_sq)?;

    let diag_sqrt = kernel.diag_value().sqrt();
    let mut trace = Vec::new();
    let status = loop {
        if state.wce_squared().sqrt() <= term.wce_tol {
            break Status::WceTol;
        }
        let max_residual = exec::max_scored(state.num_candidates(), |j| {
            Some(state.residual()[j].abs())
        })
        .map(|(_, s)| s)
        .unwrap_or(0.0);
        if max_residual <= term.residual_tol {
            break Status::ResidualTol;
        }
        if state.n() >= term.max_n {
            break Status::MaxN;
        }

        let tol = state.breakdown_tol();
        let picked = {
            let residual = state.residual();
            let power_sq = state.power_sq();
            exec::max_scored(state.num_candidates(), |j| {
                if state.is_selected(j) || !(power_sq[j] > tol) {
                    None
                } else {
                    Some(score_candidate(rule, residual[j], power_sq[j], diag_sqrt))
                }
            })
        };
        let (idx, score) = match picked {
            None => break Status::PowerExhausted,
            Some(p) => p,
        };
        if score <= 0.0 {
            // All eligible scores vanish while wce > 0: possible through
            // discretization only; treated as residual convergence.
            break Status::ResidualTol;
        }
        state.add_point(idx)?;
        trace.push(TraceEntry {
            n: state.n(),
            wce: state.wce_squared().sqrt(),
            selected_index: idx,
            score,
        });
    };

    let weights = if state.n() > 0 {
        state.newton_to_standard()?
    } else {
        Vec::new()
    };
    let nodes = candidates.subset(state.selected())?;
    Ok(QuadratureRule {
        nodes,
        weights,
        trace,
        status,
    })
}

/// Recompute the worst-case error of a rule from scratch:
/// e^2 = |v_L|^2 - 2 w^T v_L(X) + w^T A w.
pub fn worst_case_error(
    rule: &QuadratureRule,
    functional: &DiscreteFunctional,
    kernel: &KernelSpec,
) -> Result<f64> {
    worst_case_error_parts(kernel, rule.nodes(), rule.weights(), functional)
}

/// [`worst_case_error`] for a rule given as bare nodes and weights.
pub fn worst_case_error_parts(
    kernel: &KernelSpec,
    nodes: &PointSet,
    weights: &[f64],
    functional: &DiscreteFunctional,
) -> Result<f64> {
    if weights.len() != nodes.len() {
        return Err(Error::LengthMismatch {
            expected: nodes.len(),
            got: weights.len(),
        });
    }
    let hnorm_sq = functional.hnorm_squared(kernel)?;
    if nodes.is_empty() {
        return Ok(hnorm_sq.sqrt());
    }
    let b = functional.representer_values(kernel, nodes)?;
    let a = kernel.gram_matrix(nodes, nodes)?;
    let mut cross = 0.0;
    let mut quad = 0.0;
    for (i, wi) in weights.iter().enumerate() {
        cross += wi * b[i];
        let mut row = 0.0;
        for (j, wj) in weights.iter().enumerate() {
            row += a[(i, j)] * wj;
        }
        quad += wi * row;
    }
    Ok((hnorm_sq - 2.0 * cross + quad).max(0.0).sqrt())
}

/// The constant c_G = max{ |v_L|_H, c_L |Omega|^(1/q) max sqrt(K(x, x)) }
/// governing the n^(-1/2) greedy convergence bound.
///
/// Pass `q = f64::INFINITY` for functionals that are only
/// L_infinity-continuous; the measure factor is then 1.
pub fn greedy_bound_constant(
    functional: &DiscreteFunctional,
    kernel: &KernelSpec,
    domain: &DomainSpec,
    q: f64,
    c_l: f64,
) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidInput(format!("q must be in [1, inf], got {q}")));
    }
    if !(c_l >= 0.0) {
        return Err(Error::InvalidInput(format!("c_L must be >= 0, got {c_l}")));
    }
    domain.validate()?;
    let hnorm = functional.hnorm_squared(kernel)?.sqrt();
    // The kernels here are radial, so max over Omega of sqrt(K(x, x)) is the
    // constant diagonal value.
    let measure_factor = domain.measure().powf(1.0 / q);
    Ok(hnorm.max(c_l * measure_factor * kernel.diag_value().sqrt()))
}

/// The canonical (q, c_L) pair of a discrete functional: q = infinity and
/// c_L = |rho|_1.
pub fn canonical_continuity(functional: &DiscreteFunctional) -> (f64, f64) {
    (f64::INFINITY, functional.continuity_constant())
}

/// Compress an M-node discrete measure to an n-node rule with certified
/// worst-case error, selecting from the measure's own nodes.
pub fn compress(
    functional: &DiscreteFunctional,
    kernel: &KernelSpec,
    n: usize,
    rule: SelectionRule,
) -> Result<QuadratureRule> {
    if n == 0 || n > functional.len() {
        return Err(Error::InvalidInput(format!(
            "compression size must be in 1..={}, got {n}",
            functional.len()
        )));
    }
    run_greedy(
        kernel,
        functional.nodes(),
        functional,
        rule,
        &Termination::max_n(n),
    )
}
