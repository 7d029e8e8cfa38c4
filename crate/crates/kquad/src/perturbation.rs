//! Error decomposition for quadrature rules built from a perturbed Riesz
//! representer.
//!
//! With delta = L - L~ and X a fixed node set, the squared error of using
//! the wrong representer splits orthogonally:
//!
//!   |v_L - Pi_X v_L~|^2 = |v_L - Pi_X v_L|^2 + |Pi_X delta|^2
//!
//! and |Pi_X delta| <= |delta|_H. All four quantities are computed here
//! independently so the identity is testable rather than built in.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::functionals::DiscreteFunctional;
use crate::kernels::{KernelSpec, PointSet, DISTINCT_SQ_TOL};

/// The terms of the perturbed-projection error split.
#[derive(Debug, Clone, Copy)]
pub struct PerturbationDecomposition {
    /// |v_L - Pi_X v_L|^2: the unperturbed worst-case error squared.
    pub e_sq: f64,
    /// |Pi_X delta|^2.
    pub proj_delta_sq: f64,
    /// |delta|_H^2, the perturbation size epsilon^2.
    pub eps_sq: f64,
    /// |v_L - Pi_X v_L~|^2: the error actually incurred.
    pub total_sq: f64,
}

/// The signed difference a - b as a discrete functional, merging nodes that
/// coincide up to the distinctness tolerance.
pub fn functional_difference(
    a: &DiscreteFunctional,
    b: &DiscreteFunctional,
) -> Result<DiscreteFunctional> {
    if a.nodes().dim() != b.nodes().dim() {
        return Err(Error::DimensionMismatch {
            expected: a.nodes().dim(),
            got: b.nodes().dim(),
        });
    }
    let mut rows: Vec<Vec<f64>> = a.nodes().iter_points().map(|p| p.to_vec()).collect();
    let mut weights: Vec<f64> = a.weights().to_vec();
    for (p, &w) in b.nodes().iter_points().zip(b.weights()) {
        let hit = rows.iter().position(|q| {
            q.iter()
                .zip(p)
                .map(|(x, y)| {
                    let d = x - y;
                    d * d
                })
                .sum::<f64>()
                <= DISTINCT_SQ_TOL
        });
        match hit {
            Some(i) => weights[i] -= w,
            None => {
                rows.push(p.to_vec());
                weights.push(-w);
            }
        }
    }
    DiscreteFunctional::new(PointSet::from_rows(&rows)?, weights)
}

/// Decompose the error of interpolating the perturbed representer v_L~ on X
/// while targeting the exact functional L.
pub fn perturbation_decomposition(
    kernel: &KernelSpec,
    x: &PointSet,
    exact: &DiscreteFunctional,
    tilde: &DiscreteFunctional,
) -> Result<PerturbationDecomposition> {
    if x.is_empty() {
        return Err(Error::InvalidInput("node set is empty".into()));
    }
    kernel.check_dim(x)?;
    let delta = functional_difference(exact, tilde)?;

    let gram = kernel.gram_matrix(x, x)?;
    let max_diag = (0..x.len()).map(|i| gram[(i, i)]).fold(0.0, f64::max);
    let chol = gram.cholesky().ok_or(Error::SingularGram)?;
    // Cholesky solves are backward stable, so a tiny pivot (numerically
    // merged nodes) must be rejected explicitly.
    let min_pivot = (0..x.len())
        .map(|i| chol.l_dirty()[(i, i)])
        .fold(f64::INFINITY, f64::min);
    if min_pivot * min_pivot <= 1e-13 * max_diag {
        return Err(Error::SingularGram);
    }

    let v_exact = DVector::from_vec(exact.representer_values(kernel, x)?);
    let v_tilde = DVector::from_vec(tilde.representer_values(kernel, x)?);
    let v_delta = DVector::from_vec(delta.representer_values(kernel, x)?);

    let norm_exact_sq = exact.hnorm_squared(kernel)?;
    let eps_sq = delta.hnorm_squared(kernel)?;

    // |Pi_X v|^2 = b^T A^{-1} b for b = v(X).
    let alpha_exact = chol.solve(&v_exact);
    let e_sq = (norm_exact_sq - alpha_exact.dot(&v_exact)).max(0.0);

    let alpha_delta = chol.solve(&v_delta);
    let proj_delta_sq = alpha_delta.dot(&v_delta).max(0.0);

    // |v_L - Pi_X v_L~|^2 = |v_L|^2 - 2 w~^T v_L(X) + w~^T A w~,
    // computed from its own formula, not from the split.
    let w_tilde = chol.solve(&v_tilde);
    let total_sq =
        (norm_exact_sq - 2.0 * w_tilde.dot(&v_exact) + w_tilde.dot(&v_tilde)).max(0.0);

    Ok(PerturbationDecomposition {
        e_sq,
        proj_delta_sq,
        eps_sq,
        total_sq,
    })
}
