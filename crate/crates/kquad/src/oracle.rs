//! Brute-force reference implementations, independent of the incremental
//! Newton path. Used by tests, validation mode, and the uniform-comparison
//! runs of the experiment harness.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::functionals::DiscreteFunctional;
use crate::kernels::{KernelSpec, PointSet};

/// Dense interpolation data: Gram matrix on the centers, cross matrix to the
/// query points, and the solved coefficients.
#[derive(Debug, Clone)]
pub struct DenseProjection {
    pub gram: DMatrix<f64>,
    pub cross: DMatrix<f64>,
    pub alpha: DVector<f64>,
}

impl DenseProjection {
    /// Solve A alpha = values by dense Cholesky and keep the pieces.
    pub fn new(
        kernel: &KernelSpec,
        x: &PointSet,
        values: &[f64],
        query: &PointSet,
    ) -> Result<Self> {
        if values.len() != x.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                got: values.len(),
            });
        }
        let gram = kernel.gram_matrix(x, x)?;
        let cross = kernel.gram_matrix(query, x)?;
        let chol = gram.clone().cholesky().ok_or(Error::SingularGram)?;
        let rhs = DVector::from_column_slice(values);
        let alpha = chol.solve(&rhs);
        let res = (&gram * &alpha - &rhs).norm();
        if res > 1e-10 * rhs.norm().max(1e-300) {
            return Err(Error::SingularGram);
        }
        Ok(Self { gram, cross, alpha })
    }

    pub fn at_query(&self) -> Vec<f64> {
        (&self.cross * &self.alpha).iter().cloned().collect()
    }
}

/// Interpolant of `values` on the centers `x`, evaluated at `query`, via a
/// dense symmetric solve.
pub fn direct_interpolant(
    kernel: &KernelSpec,
    x: &PointSet,
    values: &[f64],
    query: &PointSet,
) -> Result<Vec<f64>> {
    Ok(DenseProjection::new(kernel, x, values, query)?.at_query())
}

/// One step of exhaustive lookahead: for every eligible candidate x, compute
/// |v_L - Pi_{X u {x}} v_L|^2 by a dense solve and return the lowest index
/// attaining the minimum.
pub fn exhaustive_fp_step(
    kernel: &KernelSpec,
    selected: &[usize],
    candidates: &PointSet,
    functional: &DiscreteFunctional,
) -> Result<usize> {
    let target = functional.representer_values(kernel, candidates)?;
    let hnorm_sq = functional.hnorm_squared(kernel)?;
    let mut best: Option<(usize, f64)> = None;
    for idx in 0..candidates.len() {
        if selected.contains(&idx) {
            continue;
        }
        let mut trial: Vec<usize> = selected.to_vec();
        trial.push(idx);
        let x = candidates.subset(&trial)?;
        let values: Vec<f64> = trial.iter().map(|&i| target[i]).collect();
        let gram = kernel.gram_matrix(&x, &x)?;
        let chol = match gram.cholesky() {
            Some(c) => c,
            // Numerically merged with the current set; skip like the greedy
            // eligibility rule does.
            None => continue,
        };
        let rhs = DVector::from_column_slice(&values);
        let alpha = chol.solve(&rhs);
        let wce_sq = (hnorm_sq - alpha.dot(&rhs)).max(0.0);
        match best {
            Some((_, b)) if wce_sq >= b => {}
            _ => best = Some((idx, wce_sq)),
        }
    }
    best.map(|(i, _)| i)
        .ok_or_else(|| Error::InvalidInput("no eligible candidate".into()))
}

/// Fill distance of X measured on a probe grid, and separation radius of X.
#[derive(Debug, Clone, Copy)]
pub struct FillSeparation {
    /// h = max over probe points of the distance to the nearest X point.
    pub h: f64,
    /// Half the minimal pairwise distance in X; +inf when |X| < 2.
    pub q_sep: f64,
}

pub fn fill_and_separation(x: &PointSet, probe: &PointSet) -> FillSeparation {
    let mut h: f64 = 0.0;
    for p in probe.iter_points() {
        let mut nearest = f64::INFINITY;
        for q in x.iter_points() {
            let d = sq_dist(p, q);
            if d < nearest {
                nearest = d;
            }
        }
        h = h.max(nearest.sqrt());
    }
    let mut min_pair = f64::INFINITY;
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            min_pair = min_pair.min(sq_dist(x.point(i), x.point(j)));
        }
    }
    let q_sep = if x.len() < 2 {
        f64::INFINITY
    } else {
        0.5 * min_pair.sqrt()
    };
    FillSeparation { h, q_sep }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Least-squares slope of log(error) against log(n).
pub fn rate_fit(ns: &[usize], errors: &[f64]) -> Result<f64> {
    if ns.len() != errors.len() {
        return Err(Error::LengthMismatch {
            expected: ns.len(),
            got: errors.len(),
        });
    }
    if ns.len() < 3 {
        return Err(Error::InvalidInput(
            "rate fit needs at least 3 samples".into(),
        ));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "sample sizes must be strictly increasing".into(),
        ));
    }
    if errors.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidInput(
            "rate fit requires strictly positive errors".into(),
        ));
    }
    let k = ns.len() as f64;
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|&e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    Ok(num / den)
}

/// Seeded uniform points with a minimum pairwise separation (rejection
/// sampling). Keeps dense oracle solves trustworthy at the stated
/// tolerances.
pub fn separated_uniform(seed: u64, count: usize, dim: usize, min_sep: f64) -> PointSet {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let min_sq = min_sep * min_sep;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(count);
    while rows.len() < count {
        let p: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        if rows.iter().all(|q| sq_dist(&p, q) >= min_sq) {
            rows.push(p);
        }
    }
    PointSet::from_rows(&rows).expect("separated points are distinct")
}
