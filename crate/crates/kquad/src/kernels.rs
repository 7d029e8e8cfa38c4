//! Strictly positive definite radial kernels and point sets.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;

/// Two points are treated as identical when their squared distance is at or
/// below this tolerance; strict positive definiteness needs distinct points.
pub const DISTINCT_SQ_TOL: f64 = 1e-24;

/// Points flagged as on the unit sphere must have norm within this of 1.
pub const SPHERE_NORM_TOL: f64 = 1e-12;

/// Supported kernel families. Both are radial and strictly positive
/// definite on distinct points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelFamily {
    /// phi(r) = exp(-gamma r) (3 + 3 gamma r + (gamma r)^2)
    MaternQuadratic,
    /// phi(r) = exp(-(gamma r)^2)
    Gaussian,
}

/// A radial kernel with shape parameter and smoothness metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    /// Shape parameter gamma > 0.
    pub gamma: f64,
    /// Ambient dimension d >= 1.
    pub dim: usize,
    /// Fourier-decay exponent tau. Metadata only; never used in numerics.
    #[serde(default)]
    pub tau: Option<f64>,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, gamma: f64, dim: usize) -> Result<Self> {
        let spec = Self {
            family,
            gamma,
            dim,
            tau: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_tau(mut self, tau: f64) -> Result<Self> {
        self.tau = Some(tau);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "kernel shape parameter must be positive and finite, got {}",
                self.gamma
            )));
        }
        if self.dim == 0 {
            return Err(Error::InvalidInput("kernel dimension must be >= 1".into()));
        }
        if let Some(tau) = self.tau {
            if !(tau > 0.0) || !tau.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "tau must be positive and finite, got {tau}"
                )));
            }
            if self.family == KernelFamily::MaternQuadratic {
                let expected = (self.dim as f64 + 5.0) / 2.0;
                if (tau - expected).abs() > 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "MaternQuadratic in dimension {} has tau = {}, got {}",
                        self.dim, expected, tau
                    )));
                }
            }
        }
        Ok(())
    }

    /// The radial profile phi(r), so that K(x, y) = phi(|x - y|).
    pub fn phi(&self, r: f64) -> f64 {
        let gr = self.gamma * r;
        match self.family {
            KernelFamily::MaternQuadratic => (-gr).exp() * (3.0 + 3.0 * gr + gr * gr),
            KernelFamily::Gaussian => (-(gr * gr)).exp(),
        }
    }

    /// K(x, x), identical for every x since the kernel is radial.
    pub fn diag_value(&self) -> f64 {
        self.phi(0.0)
    }

    pub(crate) fn eval_slices(&self, x: &[f64], y: &[f64]) -> f64 {
        // Difference vector first, then a plain sum of squares: symmetric
        // bit-for-bit (negation is exact) and invariant under common
        // translations of both arguments.
        let mut sq = 0.0;
        for (a, b) in x.iter().zip(y.iter()) {
            let d = a - b;
            sq += d * d;
        }
        self.phi(sq.sqrt())
    }

    /// Evaluate K(x, y) = phi(|x - y|).
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: y.len(),
            });
        }
        Ok(self.eval_slices(x, y))
    }

    /// Kernel matrix with entry (i, j) = K(X_i, Y_j). Row-parallel; the
    /// result does not depend on the number of threads.
    pub fn gram_matrix(&self, x: &PointSet, y: &PointSet) -> Result<DMatrix<f64>> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let (nx, ny) = (x.len(), y.len());
        let rows = exec::map_range(nx, |i| {
            let xi = x.point(i);
            let mut row = Vec::with_capacity(ny);
            for j in 0..ny {
                row.push(self.eval_slices(xi, y.point(j)));
            }
            row
        });
        Ok(DMatrix::from_row_iterator(
            nx,
            ny,
            rows.into_iter().flatten(),
        ))
    }

    /// The kernel diagonal on X, entry i = K(X_i, X_i).
    pub fn diag(&self, x: &PointSet) -> Vec<f64> {
        vec![self.diag_value(); x.len()]
    }

    pub(crate) fn check_dim(&self, x: &PointSet) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        Ok(())
    }
}

/// A finite set of pairwise distinct points in R^d, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    coords: Vec<f64>,
    dim: usize,
    on_sphere: bool,
}

impl PointSet {
    /// Build a point set from flat row-major coordinates.
    pub fn new(coords: Vec<f64>, dim: usize) -> Result<Self> {
        Self::build(coords, dim, false)
    }

    /// Build a point set constrained to the unit sphere in R^3.
    pub fn new_on_sphere(coords: Vec<f64>) -> Result<Self> {
        Self::build(coords, 3, true)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            coords.extend_from_slice(r);
        }
        Self::new(coords, dim)
    }

    fn build(coords: Vec<f64>, dim: usize, on_sphere: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("point dimension must be >= 1".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::InvalidInput(format!(
                "flat coordinate buffer of length {} is not a multiple of dim {}",
                coords.len(),
                dim
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("coordinates must be finite".into()));
        }
        let set = Self {
            coords,
            dim,
            on_sphere,
        };
        set.check_distinct()?;
        if on_sphere {
            set.check_sphere()?;
        }
        Ok(set)
    }

    fn check_distinct(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            let pi = self.point(i);
            for j in (i + 1)..n {
                let mut sq = 0.0;
                for (a, b) in pi.iter().zip(self.point(j)) {
                    let d = a - b;
                    sq += d * d;
                }
                if sq <= DISTINCT_SQ_TOL {
                    return Err(Error::DuplicatePoints { i, j });
                }
            }
        }
        Ok(())
    }

    fn check_sphere(&self) -> Result<()> {
        for i in 0..self.len() {
            let norm = self.point(i).iter().map(|c| c * c).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > SPHERE_NORM_TOL {
                return Err(Error::InvalidInput(format!(
                    "point {i} has norm {norm}, not on the unit sphere"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn on_sphere(&self) -> bool {
        self.on_sphere
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// The subset at `indices`, in order. Indices must be distinct rows, so
    /// the distinctness invariant carries over without re-checking.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.len() {
                return Err(Error::InvalidInput(format!(
                    "index {i} out of range for {} points",
                    self.len()
                )));
            }
            coords.extend_from_slice(self.point(i));
        }
        Ok(Self {
            coords,
            dim: self.dim,
            on_sphere: self.on_sphere,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn matern(gamma: f64, dim: usize) -> KernelSpec {
        KernelSpec::new(KernelFamily::MaternQuadratic, gamma, dim).unwrap()
    }

    #[test]
    fn matern_at_zero_distance_is_three() {
        let k = matern(1.0, 2);
        let x = [0.3, 0.7];
        assert_eq!(k.eval(&x, &x).unwrap(), 3.0);
        assert_eq!(k.diag_value(), 3.0);
    }

    #[test]
    fn matern_at_unit_distance() {
        // phi(1) = e^-1 (3 + 3 + 1) = 7/e
        let k = matern(1.0, 2);
        let v = k.eval(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_relative_eq!(v, 7.0 * (-1.0f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn gaussian_diag_is_one() {
        let k = KernelSpec::new(KernelFamily::Gaussian, 2.5, 3).unwrap();
        let x = [1.0, -2.0, 0.5];
        assert_eq!(k.eval(&x, &x).unwrap(), 1.0);
    }

    #[test]
    fn eval_is_bitwise_symmetric_and_translation_invariant() {
        let k = matern(1.7, 3);
        let x = [0.12, -0.93, 0.4];
        let y = [1.02, 0.33, -0.81];
        assert_eq!(k.eval(&x, &y).unwrap(), k.eval(&y, &x).unwrap());

        let t = [10.5, -3.25, 0.125];
        let xs: Vec<f64> = x.iter().zip(&t).map(|(a, b)| a + b).collect();
        let ys: Vec<f64> = y.iter().zip(&t).map(|(a, b)| a + b).collect();
        // Exact binary translation keeps the difference vector bit-identical.
        assert_eq!(k.eval(&x, &y).unwrap(), k.eval(&xs, &ys).unwrap());
    }

    #[test]
    fn eval_rejects_dimension_mismatch() {
        let k = matern(1.0, 2);
        assert!(matches!(
            k.eval(&[0.0, 0.0, 0.0], &[0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gram_single_point() {
        let k = matern(1.0, 2);
        let x = PointSet::new(vec![0.2, 0.4], 2).unwrap();
        let a = k.gram_matrix(&x, &x).unwrap();
        assert_eq!(a.nrows(), 1);
        assert_eq!(a[(0, 0)], 3.0);
    }

    #[test]
    fn gram_is_transpose_of_swapped_arguments() {
        let k = matern(1.3, 2);
        let x = PointSet::from_rows(&[vec![0.0, 0.0], vec![0.5, 0.2], vec![0.9, 0.9]]).unwrap();
        let y = PointSet::from_rows(&[vec![0.1, 0.8], vec![0.7, 0.3]]).unwrap();
        let axy = k.gram_matrix(&x, &y).unwrap();
        let ayx = k.gram_matrix(&y, &x).unwrap();
        assert_eq!(axy, ayx.transpose());
    }

    #[test]
    fn gram_is_positive_definite_on_distinct_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for &dim in &[1usize, 2, 3] {
            let k = matern(1.0, dim);
            let n = 20;
            let coords: Vec<f64> = (0..n * dim).map(|_| rng.random::<f64>()).collect();
            let x = PointSet::new(coords, dim).unwrap();
            let a = k.gram_matrix(&x, &x).unwrap();
            // Cholesky without pivot failure certifies positive definiteness.
            assert!(a.clone().cholesky().is_some());
            let min_eig = a
                .symmetric_eigenvalues()
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            assert!(min_eig > 0.0, "smallest eigenvalue {min_eig} not positive");
        }
    }

    #[test]
    fn diag_matches_gram_diagonal() {
        let k = KernelSpec::new(KernelFamily::Gaussian, 0.7, 2).unwrap();
        let x = PointSet::from_rows(&[vec![0.0, 0.1], vec![0.4, 0.4], vec![0.9, 0.2]]).unwrap();
        let d = k.diag(&x);
        let a = k.gram_matrix(&x, &x).unwrap();
        for i in 0..x.len() {
            assert_eq!(d[i], a[(i, i)]);
            assert_eq!(d[i], 1.0);
        }
    }

    #[test]
    fn duplicate_points_fail_fast() {
        let err = PointSet::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5 + 1e-13]]);
        assert!(matches!(err, Err(Error::DuplicatePoints { i: 0, j: 1 })));
        // Just above the tolerance is fine.
        assert!(PointSet::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5 + 1e-11]]).is_ok());
    }

    #[test]
    fn sphere_points_must_be_unit_norm() {
        assert!(PointSet::new_on_sphere(vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).is_ok());
        assert!(PointSet::new_on_sphere(vec![1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn kernel_spec_validation() {
        assert!(KernelSpec::new(KernelFamily::Gaussian, 0.0, 2).is_err());
        assert!(KernelSpec::new(KernelFamily::Gaussian, 1.0, 0).is_err());
        // MaternQuadratic tau must be (d + 5) / 2.
        let k = matern(1.0, 2);
        assert!(k.with_tau(3.5).is_ok());
        assert!(k.with_tau(4.0).is_err());
        // Gaussian tau is free-form metadata.
        let g = KernelSpec::new(KernelFamily::Gaussian, 1.0, 2).unwrap();
        assert!(g.with_tau(9.0).is_ok());
    }

    #[test]
    fn subset_preserves_order() {
        let x = PointSet::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let s = x.subset(&[2, 0]).unwrap();
        assert_eq!(s.point(0), &[2.0]);
        assert_eq!(s.point(1), &[0.0]);
        assert!(x.subset(&[5]).is_err());
    }
}
