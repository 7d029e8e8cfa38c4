//! Incremental Newton-basis factorization over a fixed candidate set.
//!
//! The state tracks, for a target function v (in practice a Riesz
//! representer evaluated on the candidates), the orthonormal Newton basis of
//! the span of kernel translates at the selected points, the power function,
//! the interpolation residual, and the projection coefficients. Each
//! `add_point` extends the basis by one Gram-Schmidt step:
//!
//!   v_n = (K(., x_n) - sum_k v_k(x_n) v_k) / P_{n-1}(x_n)
//!   P_n(x)^2 = P_{n-1}(x)^2 - v_n(x)^2
//!   c_n = <v, v_n> = residual(x_n) / P_{n-1}(x_n)

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exec::{self, Kahan};
use crate::kernels::{KernelSpec, PointSet};

/// Relative factor for the power-function breakdown threshold tau_P.
pub const BREAKDOWN_REL_TOL: f64 = 1e-13;

/// Default cap on candidate-count x basis-size entries of the Newton buffer.
pub const DEFAULT_MAX_NEWTON_ENTRIES: usize = 10_000_000;

/// Drift report produced by [`GreedyState::validate_basis`].
#[derive(Debug, Clone, Copy)]
pub struct BasisDrift {
    /// max |B^T A B - I| over all entries.
    pub ortho_dev: f64,
    /// max |B - L^{-T}| against a dense Cholesky of the selected Gram matrix.
    pub coeff_dev: f64,
}

/// Incremental greedy interpolation state over a candidate set.
#[derive(Debug, Clone)]
pub struct GreedyState {
    kernel: KernelSpec,
    candidates: PointSet,
    selected: Vec<usize>,
    selected_mask: Vec<bool>,
    /// Column k holds v_k at every candidate.
    newton_values: Vec<Vec<f64>>,
    /// Column k holds the coefficients of v_k over the translates at the
    /// first k+1 selected points (triangular change of basis).
    newton_coeffs: Vec<Vec<f64>>,
    power_sq: Vec<f64>,
    residual: Vec<f64>,
    coeffs: Vec<f64>,
    energy: Kahan,
    target_hnorm_sq: f64,
    breakdown_tol: f64,
    max_entries: usize,
}

impl GreedyState {
    /// Start from the empty basis: P_0^2 = K(x, x), residual = target values.
    pub fn init(
        kernel: KernelSpec,
        candidates: PointSet,
        target_values: Vec<f64>,
        target_hnorm_sq: f64,
    ) -> Result<Self> {
        kernel.check_dim(&candidates)?;
        if candidates.is_empty() {
            return Err(Error::InvalidInput("candidate set is empty".into()));
        }
        if target_values.len() != candidates.len() {
            return Err(Error::LengthMismatch {
                expected: candidates.len(),
                got: target_values.len(),
            });
        }
        if !(target_hnorm_sq >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "target norm squared must be >= 0, got {target_hnorm_sq}"
            )));
        }
        let power_sq = kernel.diag(&candidates);
        let max_diag = power_sq.iter().cloned().fold(0.0, f64::max);
        let n = candidates.len();
        Ok(Self {
            kernel,
            candidates,
            selected: Vec::new(),
            selected_mask: vec![false; n],
            newton_values: Vec::new(),
            newton_coeffs: Vec::new(),
            power_sq,
            residual: target_values,
            coeffs: Vec::new(),
            energy: Kahan::new(),
            target_hnorm_sq,
            breakdown_tol: BREAKDOWN_REL_TOL * max_diag,
            max_entries: DEFAULT_MAX_NEWTON_ENTRIES,
        })
    }

    pub fn with_max_entries(mut self, max_entries: usize) -> Self {
        self.max_entries = max_entries;
        self
    }

    pub fn n(&self) -> usize {
        self.selected.len()
    }

    pub fn num_candidates(&self) -> usize {
        self.power_sq.len()
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn candidates(&self) -> &PointSet {
        &self.candidates
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn is_selected(&self, idx: usize) -> bool {
        self.selected_mask[idx]
    }

    /// P_n(x)^2 at every candidate.
    pub fn power_sq(&self) -> &[f64] {
        &self.power_sq
    }

    /// (v - Pi v)(x) at every candidate.
    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    /// Projection coefficients c_k = <v, v_k> in the Newton basis.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn target_hnorm_sq(&self) -> f64 {
        self.target_hnorm_sq
    }

    /// Eligibility threshold tau_P below which a candidate would break the
    /// Gram-Schmidt normalization.
    pub fn breakdown_tol(&self) -> f64 {
        self.breakdown_tol
    }

    /// Extend the basis by the candidate at `idx`.
    pub fn add_point(&mut self, idx: usize) -> Result<()> {
        let n_cand = self.num_candidates();
        if idx >= n_cand {
            return Err(Error::InvalidInput(format!(
                "candidate index {idx} out of range for {n_cand} candidates"
            )));
        }
        if self.selected_mask[idx] {
            return Err(Error::AlreadySelected { index: idx });
        }
        let p_sq = self.power_sq[idx];
        if !(p_sq > self.breakdown_tol) {
            return Err(Error::PowerBreakdown {
                index: idx,
                power_sq: p_sq,
            });
        }
        if (self.selected.len() + 1).saturating_mul(n_cand) > self.max_entries {
            return Err(Error::InvalidInput(format!(
                "newton buffer cap of {} entries exceeded",
                self.max_entries
            )));
        }

        let p = p_sq.sqrt();
        let kernel = &self.kernel;
        let candidates = &self.candidates;
        let x_new = candidates.point(idx).to_vec();
        let values_at_idx: Vec<f64> = self.newton_values.iter().map(|col| col[idx]).collect();

        let prev = &self.newton_values;
        let new_col: Vec<f64> = exec::map_range(n_cand, |j| {
            let mut v = kernel.eval_slices(candidates.point(j), &x_new);
            for (vk, col) in values_at_idx.iter().zip(prev.iter()) {
                v -= vk * col[j];
            }
            v / p
        });

        let c_n = self.residual[idx] / p;
        exec::update_indexed(&mut self.residual, |j, r| *r -= c_n * new_col[j]);
        exec::update_indexed(&mut self.power_sq, |j, q| {
            *q -= new_col[j] * new_col[j];
            if *q < 0.0 {
                // Analytically nonnegative; round-off only.
                *q = 0.0;
            }
        });
        self.power_sq[idx] = 0.0;

        // Change-of-basis column: (e_new - sum_k v_k(x_new) b_k) / p.
        let m = self.selected.len();
        let mut b_new = vec![0.0; m + 1];
        for (vk, bk) in values_at_idx.iter().zip(self.newton_coeffs.iter()) {
            for (dst, &b) in b_new.iter_mut().zip(bk.iter()) {
                *dst -= vk * b;
            }
        }
        for b in &mut b_new[..m] {
            *b /= p;
        }
        b_new[m] = 1.0 / p;

        self.newton_values.push(new_col);
        self.newton_coeffs.push(b_new);
        self.coeffs.push(c_n);
        self.energy.add(c_n * c_n);
        self.selected.push(idx);
        self.selected_mask[idx] = true;
        Ok(())
    }

    /// |v - Pi_{X_n} v|^2 = |v|^2 - sum_k c_k^2, clamped at zero.
    pub fn wce_squared(&self) -> f64 {
        (self.target_hnorm_sq - self.energy.total()).max(0.0)
    }

    /// Interpolant values sum_k c_k v_k(x) at every candidate.
    pub fn interpolant_at_candidates(&self) -> Vec<f64> {
        let cols = &self.newton_values;
        let coeffs = &self.coeffs;
        exec::map_range(self.num_candidates(), |j| {
            let mut acc = 0.0;
            for (c, col) in coeffs.iter().zip(cols.iter()) {
                acc += c * col[j];
            }
            acc
        })
    }

    /// Weights w* of the interpolant over the kernel translates at the
    /// selected points: Pi v = sum_i w*_i K(., x_i), i.e. w* = B c.
    pub fn newton_to_standard(&self) -> Result<Vec<f64>> {
        let n = self.n();
        if n == 0 {
            return Err(Error::InvalidInput(
                "no points selected; no weights to extract".into(),
            ));
        }
        let mut w = vec![0.0; n];
        for (c, bk) in self.coeffs.iter().zip(self.newton_coeffs.iter()) {
            for (dst, &b) in w.iter_mut().zip(bk.iter()) {
                *dst += c * b;
            }
        }
        Ok(w)
    }

    /// Power function values at off-candidate query points, evaluated from
    /// the change-of-basis coefficients.
    pub fn power_at(&self, query: &PointSet) -> Result<Vec<f64>> {
        self.kernel.check_dim(query)?;
        let kernel = &self.kernel;
        let candidates = &self.candidates;
        let selected = &self.selected;
        let coeffs = &self.newton_coeffs;
        let diag = kernel.diag_value();
        Ok(exec::map_range(query.len(), |j| {
            let y = query.point(j);
            let kvec: Vec<f64> = selected
                .iter()
                .map(|&i| kernel.eval_slices(y, candidates.point(i)))
                .collect();
            let mut sum_sq = 0.0;
            for bk in coeffs {
                let vk: f64 = bk.iter().zip(&kvec).map(|(b, k)| b * k).sum();
                sum_sq += vk * vk;
            }
            (diag - sum_sq).max(0.0).sqrt()
        }))
    }

    /// Recompute the basis through a dense Cholesky of the selected Gram
    /// matrix and report the drift of the single-pass Gram-Schmidt.
    pub fn validate_basis(&self) -> Result<BasisDrift> {
        let n = self.n();
        if n == 0 {
            return Ok(BasisDrift {
                ortho_dev: 0.0,
                coeff_dev: 0.0,
            });
        }
        let sel = self.candidates.subset(&self.selected)?;
        let a = self.kernel.gram_matrix(&sel, &sel)?;
        let b = self.coeffs_matrix();
        let g = b.transpose() * &a * &b;
        let mut ortho_dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                ortho_dev = ortho_dev.max((g[(i, j)] - target).abs());
            }
        }
        let chol = a.cholesky().ok_or(Error::SingularGram)?;
        let lt = chol.l().transpose();
        let b_ref = lt
            .solve_upper_triangular(&DMatrix::identity(n, n))
            .ok_or(Error::SingularGram)?;
        let mut coeff_dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                coeff_dev = coeff_dev.max((b[(i, j)] - b_ref[(i, j)]).abs());
            }
        }
        Ok(BasisDrift {
            ortho_dev,
            coeff_dev,
        })
    }

    /// The change-of-basis matrix as a dense n x n (zeros below the
    /// triangle).
    pub fn coeffs_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut b = DMatrix::zeros(n, n);
        for (k, col) in self.newton_coeffs.iter().enumerate() {
            for (j, &v) in col.iter().enumerate() {
                b[(j, k)] = v;
            }
        }
        b
    }
}
