//! Linear functionals represented as discrete measures, and Monte Carlo
//! surrogates of integration functionals with a density.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Kahan};
use crate::kernels::{KernelSpec, PointSet};

/// Default cap on the node count for the O(M^2) native-norm computation.
pub const DEFAULT_HNORM_CAP: usize = 20_000;

/// Samples landing within this distance of a singular-density center are
/// rejected and redrawn.
pub const SINGULAR_REJECT_DIST: f64 = 1e-12;

/// Integration density nu evaluated in Cartesian coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DensitySpec {
    /// Indicator of the box [lo, hi].
    IndicatorBox { lo: Vec<f64>, hi: Vec<f64> },
    /// nu(x) = |x - center|^(-alpha); undefined exactly at the center.
    RadialSingular { center: Vec<f64>, alpha: f64 },
    /// nu(x) = exp((x - center)^T diag(sigma_diag) (x - center)) on S^2.
    SphereGaussian {
        center: [f64; 3],
        sigma_diag: [f64; 3],
    },
    Constant { value: f64 },
}

impl DensitySpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            DensitySpec::IndicatorBox { lo, hi } => {
                if lo.len() != hi.len() || lo.is_empty() {
                    return Err(Error::InvalidInput(
                        "indicator box bounds must be nonempty and equal length".into(),
                    ));
                }
                if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
                    return Err(Error::InvalidInput(
                        "indicator box requires lo < hi componentwise".into(),
                    ));
                }
            }
            DensitySpec::RadialSingular { center, alpha } => {
                if center.is_empty() {
                    return Err(Error::InvalidInput("singular density needs a center".into()));
                }
                if !(*alpha >= 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "singularity exponent must be >= 0, got {alpha}"
                    )));
                }
            }
            DensitySpec::SphereGaussian { .. } | DensitySpec::Constant { .. } => {}
        }
        Ok(())
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            DensitySpec::IndicatorBox { lo, .. } => Some(lo.len()),
            DensitySpec::RadialSingular { center, .. } => Some(center.len()),
            DensitySpec::SphereGaussian { .. } => Some(3),
            DensitySpec::Constant { .. } => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            DensitySpec::IndicatorBox { lo, hi } => {
                let inside = x
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .all(|(c, (a, b))| *c >= *a && *c <= *b);
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
            DensitySpec::RadialSingular { center, alpha } => {
                let r = dist(x, center);
                r.powf(-alpha)
            }
            DensitySpec::SphereGaussian { center, sigma_diag } => {
                let mut q = 0.0;
                for i in 0..3 {
                    let d = x[i] - center[i];
                    q += sigma_diag[i] * d * d;
                }
                q.exp()
            }
            DensitySpec::Constant { value } => *value,
        }
    }
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Integration domain; the measure is the analytic volume/area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DomainSpec {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    UnitSphere2,
}

impl DomainSpec {
    pub fn unit_box(dim: usize) -> Self {
        DomainSpec::Box {
            lo: vec![0.0; dim],
            hi: vec![1.0; dim],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let DomainSpec::Box { lo, hi } = self {
            if lo.len() != hi.len() || lo.is_empty() {
                return Err(Error::InvalidInput(
                    "box bounds must be nonempty and equal length".into(),
                ));
            }
            if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
                return Err(Error::InvalidInput(
                    "box domain requires lo < hi componentwise".into(),
                ));
            }
        }
        Ok(())
    }

    /// Ambient dimension of the points (3 for the embedded sphere).
    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Box { lo, .. } => lo.len(),
            DomainSpec::UnitSphere2 => 3,
        }
    }

    /// |Omega|: box volume, or the sphere surface area 4 pi.
    pub fn measure(&self) -> f64 {
        match self {
            DomainSpec::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
            DomainSpec::UnitSphere2 => 4.0 * std::f64::consts::PI,
        }
    }
}

/// L(f) = sum_i rho_i f(z_i): a linear functional given by nodes and weights,
/// with Riesz representer v_L = sum_i rho_i K(., z_i).
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFunctional {
    nodes: PointSet,
    weights: Vec<f64>,
}

impl DiscreteFunctional {
    pub fn new(nodes: PointSet, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidInput(
                "a discrete functional needs at least one node".into(),
            ));
        }
        if weights.len() != nodes.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidInput("weights must be finite".into()));
        }
        Ok(Self { nodes, weights })
    }

    /// The point-evaluation functional delta_z.
    pub fn dirac(z: Vec<f64>) -> Result<Self> {
        let dim = z.len();
        Self::new(PointSet::new(z, dim)?, vec![1.0])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &PointSet {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// L(f) for caller-supplied values of f at the nodes.
    pub fn apply(&self, f_values: &[f64]) -> Result<f64> {
        if f_values.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
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

    /// Values of the Riesz representer v_L at the points of X:
    /// component j = sum_i rho_i K(X_j, z_i). Parallel over X with a fixed
    /// per-component summation order.
    pub fn representer_values(&self, kernel: &KernelSpec, x: &PointSet) -> Result<Vec<f64>> {
        kernel.check_dim(x)?;
        kernel.check_dim(&self.nodes)?;
        let nodes = &self.nodes;
        let weights = &self.weights;
        Ok(exec::map_range(x.len(), |j| {
            let xj = x.point(j);
            let mut acc = 0.0;
            for (i, w) in weights.iter().enumerate() {
                acc += w * kernel.eval_slices(xj, nodes.point(i));
            }
            acc
        }))
    }

    /// |v_L|_H^2 = rho^T A rho with A the Gram matrix on the nodes.
    ///
    /// O(M^2); row partial sums run in parallel and are combined in index
    /// order with compensated accumulation, so the result is deterministic.
    pub fn hnorm_squared(&self, kernel: &KernelSpec) -> Result<f64> {
        self.hnorm_squared_capped(kernel, DEFAULT_HNORM_CAP)
    }

    /// As [`hnorm_squared`](Self::hnorm_squared) with an explicit node cap.
    pub fn hnorm_squared_capped(&self, kernel: &KernelSpec, cap: usize) -> Result<f64> {
        kernel.check_dim(&self.nodes)?;
        let m = self.len();
        if m > cap {
            return Err(Error::InvalidInput(format!(
                "hnorm_squared is O(M^2) and capped at {cap} nodes, got {m}; raise the cap explicitly"
            )));
        }
        let nodes = &self.nodes;
        let weights = &self.weights;
        let total = exec::sum_ordered(m, |i| {
            let zi = nodes.point(i);
            let mut row = Kahan::new();
            for (j, w) in weights.iter().enumerate() {
                row.add(w * kernel.eval_slices(zi, nodes.point(j)));
            }
            weights[i] * row.total()
        });
        Ok(total)
    }

    /// c_L = |rho|_1, the continuity constant pairing with q = infinity.
    pub fn continuity_constant(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    /// Scale all weights by s.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            nodes: self.nodes.clone(),
            weights: self.weights.iter().map(|w| w * s).collect(),
        }
    }
}

/// Draw one uniform point on the domain.
fn sample_point(domain: &DomainSpec, rng: &mut ChaCha12Rng) -> Vec<f64> {
    match domain {
        DomainSpec::Box { lo, hi } => lo
            .iter()
            .zip(hi)
            .map(|(a, b)| a + rng.random::<f64>() * (b - a))
            .collect(),
        DomainSpec::UnitSphere2 => loop {
            let v: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm > 1e-8 {
                return v.iter().map(|c| c / norm).collect();
            }
        },
    }
}

/// Seeded uniform points on a domain (the candidate-set sampler).
pub fn uniform_points(domain: &DomainSpec, count: usize, seed: u64) -> Result<PointSet> {
    domain.validate()?;
    if count == 0 {
        return Err(Error::InvalidInput("point count must be positive".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let dim = domain.dim();
    let mut coords = Vec::with_capacity(count * dim);
    for _ in 0..count {
        coords.extend_from_slice(&sample_point(domain, &mut rng));
    }
    match domain {
        DomainSpec::UnitSphere2 => PointSet::new_on_sphere(coords),
        DomainSpec::Box { .. } => PointSet::new(coords, dim),
    }
}

/// Monte Carlo surrogate of L(f) = int f nu: M uniform samples z_i on the
/// domain with importance weights nu(z_i) |Omega| / M.
///
/// The generator is ChaCha12 seeded with `seed_from_u64(seed)`; this choice
/// is fixed so that outputs are reproducible bit-for-bit across runs and
/// platforms.
pub fn monte_carlo_functional(
    density: &DensitySpec,
    domain: &DomainSpec,
    m: usize,
    seed: u64,
) -> Result<DiscreteFunctional> {
    density.validate()?;
    domain.validate()?;
    if m == 0 {
        return Err(Error::InvalidInput(
            "monte carlo sample count must be positive".into(),
        ));
    }
    if let Some(dd) = density.dim() {
        if dd != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: dd,
            });
        }
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let dim = domain.dim();
    let scale = domain.measure() / m as f64;
    let mut coords = Vec::with_capacity(m * dim);
    let mut weights = Vec::with_capacity(m);
    for _ in 0..m {
        let z = loop {
            let z = sample_point(domain, &mut rng);
            // The singular density is a.e. finite; reject the null set where
            // it is not.
            if let DensitySpec::RadialSingular { center, .. } = density {
                if dist(&z, center) <= SINGULAR_REJECT_DIST {
                    continue;
                }
            }
            break z;
        };
        weights.push(density.eval(&z) * scale);
        coords.extend_from_slice(&z);
    }
    let nodes = match domain {
        DomainSpec::UnitSphere2 => PointSet::new_on_sphere(coords)?,
        DomainSpec::Box { .. } => PointSet::new(coords, dim)?,
    };
    DiscreteFunctional::new(nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelFamily;
    use approx::assert_relative_eq;

    fn matern(gamma: f64, dim: usize) -> KernelSpec {
        KernelSpec::new(KernelFamily::MaternQuadratic, gamma, dim).unwrap()
    }

    #[test]
    fn constant_density_gives_uniform_weights() {
        let density = DensitySpec::Constant { value: 1.0 };
        let domain = DomainSpec::unit_box(2);
        let f = monte_carlo_functional(&density, &domain, 250, 3).unwrap();
        for &w in f.weights() {
            assert_eq!(w, 1.0 / 250.0);
        }
        assert_relative_eq!(f.weights().iter().sum::<f64>(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(f.continuity_constant(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn indicator_weights_are_zero_or_scale() {
        let density = DensitySpec::IndicatorBox {
            lo: vec![0.3, 0.6],
            hi: vec![0.5, 0.8],
        };
        let domain = DomainSpec::unit_box(2);
        let f = monte_carlo_functional(&density, &domain, 400, 11).unwrap();
        let scale = 1.0 / 400.0;
        let mut inside = 0;
        for &w in f.weights() {
            assert!(w == 0.0 || w == scale);
            if w == scale {
                inside += 1;
            }
        }
        assert!(inside > 0, "no samples landed in the support");
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let density = DensitySpec::Constant { value: 2.0 };
        let domain = DomainSpec::Box {
            lo: vec![-1.0, 0.0],
            hi: vec![1.0, 3.0],
        };
        let a = monte_carlo_functional(&density, &domain, 100, 42).unwrap();
        let b = monte_carlo_functional(&density, &domain, 100, 42).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo_functional(&density, &domain, 100, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_samples_is_invalid() {
        let density = DensitySpec::Constant { value: 1.0 };
        assert!(monte_carlo_functional(&density, &DomainSpec::unit_box(1), 0, 0).is_err());
    }

    #[test]
    fn apply_examples() {
        let density = DensitySpec::Constant { value: 1.0 };
        let f = monte_carlo_functional(&density, &DomainSpec::unit_box(2), 64, 5).unwrap();
        let ones = vec![1.0; 64];
        assert_relative_eq!(f.apply(&ones).unwrap(), 1.0, max_relative = 1e-12);

        let mut ek = vec![0.0; 64];
        ek[17] = 1.0;
        assert_eq!(f.apply(&ek).unwrap(), f.weights()[17]);

        assert!(f.apply(&[1.0]).is_err());
    }

    #[test]
    fn apply_matches_compensated_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let coords: Vec<f64> = (0..50 * 2).map(|_| rng.random::<f64>()).collect();
        let weights: Vec<f64> = (0..50).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let f =
            DiscreteFunctional::new(PointSet::new(coords, 2).unwrap(), weights.clone()).unwrap();
        let values: Vec<f64> = (0..50).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();

        let mut acc = Kahan::new();
        for (w, v) in weights.iter().zip(&values) {
            acc.add(w * v);
        }
        assert_relative_eq!(
            f.apply(&values).unwrap(),
            acc.total(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn representer_of_dirac_is_kernel_translate() {
        let k = matern(1.0, 2);
        let l = DiscreteFunctional::dirac(vec![0.25, 0.75]).unwrap();
        let x = PointSet::from_rows(&[vec![0.1, 0.2], vec![0.25, 0.75], vec![0.9, 0.1]]).unwrap();
        let v = l.representer_values(&k, &x).unwrap();
        for (j, val) in v.iter().enumerate() {
            assert_eq!(*val, k.eval(x.point(j), &[0.25, 0.75]).unwrap());
        }
    }

    #[test]
    fn representer_zero_weights_is_zero() {
        let k = matern(1.0, 1);
        let l = DiscreteFunctional::new(
            PointSet::from_rows(&[vec![0.0], vec![0.5]]).unwrap(),
            vec![0.0, 0.0],
        )
        .unwrap();
        let x = PointSet::from_rows(&[vec![0.2], vec![0.8]]).unwrap();
        assert_eq!(l.representer_values(&k, &x).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn representer_matches_double_loop_oracle() {
        use rand::{Rng, SeedableRng};
        let k = matern(1.0, 2);
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let nodes: Vec<Vec<f64>> = (0..3)
            .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        let weights: Vec<f64> = (0..3).map(|_| rng.random::<f64>() - 0.5).collect();
        let l = DiscreteFunctional::new(PointSet::from_rows(&nodes).unwrap(), weights.clone())
            .unwrap();
        let x = PointSet::from_rows(&[vec![0.3, 0.3], vec![0.6, 0.1]]).unwrap();

        let got = l.representer_values(&k, &x).unwrap();
        for j in 0..x.len() {
            let mut expect = 0.0;
            for i in 0..3 {
                expect += weights[i] * k.eval(x.point(j), &nodes[i]).unwrap();
            }
            assert_relative_eq!(got[j], expect, max_relative = 1e-15);
        }
    }

    #[test]
    fn representer_is_linear_in_weights() {
        use rand::{Rng, SeedableRng};
        let k = matern(1.0, 2);
        let mut rng = ChaCha12Rng::seed_from_u64(33);
        let nodes: Vec<Vec<f64>> = (0..12)
            .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        let w1: Vec<f64> = (0..12).map(|_| rng.random::<f64>() - 0.5).collect();
        let w2: Vec<f64> = (0..12).map(|_| rng.random::<f64>() - 0.5).collect();
        let (a, b) = (1.7, -0.4);
        let combo: Vec<f64> = w1.iter().zip(&w2).map(|(x, y)| a * x + b * y).collect();
        let ps = PointSet::from_rows(&nodes).unwrap();
        let x = PointSet::from_rows(&[vec![0.5, 0.5], vec![0.2, 0.9], vec![0.8, 0.3]]).unwrap();

        let l1 = DiscreteFunctional::new(ps.clone(), w1).unwrap();
        let l2 = DiscreteFunctional::new(ps.clone(), w2).unwrap();
        let lc = DiscreteFunctional::new(ps, combo).unwrap();
        let v1 = l1.representer_values(&k, &x).unwrap();
        let v2 = l2.representer_values(&k, &x).unwrap();
        let vc = lc.representer_values(&k, &x).unwrap();
        for j in 0..x.len() {
            assert_relative_eq!(vc[j], a * v1[j] + b * v2[j], max_relative = 1e-13);
        }
    }

    #[test]
    fn hnorm_single_node() {
        let k = matern(1.0, 2);
        let l = DiscreteFunctional::dirac(vec![0.4, 0.4]).unwrap();
        assert_eq!(l.hnorm_squared(&k).unwrap(), 3.0);
    }

    #[test]
    fn hnorm_zero_weights_is_zero() {
        let k = matern(1.0, 1);
        let l = DiscreteFunctional::new(
            PointSet::from_rows(&[vec![0.1], vec![0.9]]).unwrap(),
            vec![0.0, 0.0],
        )
        .unwrap();
        assert_eq!(l.hnorm_squared(&k).unwrap(), 0.0);
    }

    #[test]
    fn hnorm_matches_naive_double_loop() {
        use rand::{Rng, SeedableRng};
        let k = matern(1.0, 2);
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let coords: Vec<f64> = (0..40 * 2).map(|_| rng.random::<f64>()).collect();
        let weights: Vec<f64> = (0..40).map(|_| rng.random::<f64>() - 0.5).collect();
        let ps = PointSet::new(coords, 2).unwrap();
        let l = DiscreteFunctional::new(ps.clone(), weights.clone()).unwrap();

        let mut naive = 0.0;
        for i in 0..40 {
            for j in 0..40 {
                naive += weights[i] * weights[j] * k.eval(ps.point(i), ps.point(j)).unwrap();
            }
        }
        assert_relative_eq!(l.hnorm_squared(&k).unwrap(), naive, max_relative = 1e-12);
        assert!(l.hnorm_squared(&k).unwrap() >= 0.0);
    }

    #[test]
    fn hnorm_is_permutation_invariant() {
        let k = matern(1.0, 1);
        let rows = [vec![0.1], vec![0.4], vec![0.7], vec![0.95]];
        let w = [0.3, -0.2, 0.5, 0.1];
        let l = DiscreteFunctional::new(PointSet::from_rows(&rows).unwrap(), w.to_vec()).unwrap();
        let perm = [2usize, 0, 3, 1];
        let prows: Vec<Vec<f64>> = perm.iter().map(|&i| rows[i].clone()).collect();
        let pw: Vec<f64> = perm.iter().map(|&i| w[i]).collect();
        let lp = DiscreteFunctional::new(PointSet::from_rows(&prows).unwrap(), pw).unwrap();
        assert_relative_eq!(
            l.hnorm_squared(&k).unwrap(),
            lp.hnorm_squared(&k).unwrap(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn hnorm_cap_guards_runtime() {
        let k = matern(1.0, 1);
        let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        let l = DiscreteFunctional::new(PointSet::from_rows(&rows).unwrap(), vec![1.0; 5]).unwrap();
        assert!(l.hnorm_squared_capped(&k, 4).is_err());
        assert!(l.hnorm_squared_capped(&k, 5).is_ok());
    }

    #[test]
    fn continuity_constant_of_signed_weights() {
        let l = DiscreteFunctional::new(
            PointSet::from_rows(&[vec![0.0], vec![1.0]]).unwrap(),
            vec![1.0, -2.0],
        )
        .unwrap();
        assert_eq!(l.continuity_constant(), 3.0);
    }

    #[test]
    fn sphere_sampler_is_uniform_enough() {
        let density = DensitySpec::Constant { value: 1.0 };
        let f = monte_carlo_functional(&density, &DomainSpec::UnitSphere2, 10_000, 17).unwrap();
        assert!(f.nodes().on_sphere());
        let mut mean = [0.0; 3];
        for p in f.nodes().iter_points() {
            let norm: f64 = p.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() <= 1e-12);
            for (m, c) in mean.iter_mut().zip(p) {
                *m += c / 10_000.0;
            }
        }
        let mean_norm = mean.iter().map(|c| c * c).sum::<f64>().sqrt();
        assert!(mean_norm < 0.05, "sample mean norm {mean_norm} too large");
    }

    #[test]
    fn singular_samples_avoid_the_center() {
        let density = DensitySpec::RadialSingular {
            center: vec![0.5, 0.5],
            alpha: 2.0,
        };
        let f = monte_carlo_functional(&density, &DomainSpec::unit_box(2), 2_000, 8).unwrap();
        for p in f.nodes().iter_points() {
            assert!(dist(p, &[0.5, 0.5]) > SINGULAR_REJECT_DIST);
        }
        assert!(f.weights().iter().all(|w| w.is_finite()));
    }

    #[test]
    fn density_validation() {
        assert!(DensitySpec::IndicatorBox {
            lo: vec![0.5],
            hi: vec![0.3]
        }
        .validate()
        .is_err());
        assert!(DensitySpec::RadialSingular {
            center: vec![0.0],
            alpha: -1.0
        }
        .validate()
        .is_err());
        let sphere_density = DensitySpec::SphereGaussian {
            center: [0.0, -1.0, 0.0],
            sigma_diag: [-5.0, -5.0, -3.0],
        };
        assert!(sphere_density.validate().is_ok());
        // Largest at the center, decaying away from it.
        assert_eq!(sphere_density.eval(&[0.0, -1.0, 0.0]), 1.0);
        assert!(sphere_density.eval(&[1.0, 0.0, 0.0]) < 1.0);
    }

    #[test]
    fn domain_measures_are_analytic() {
        let b = DomainSpec::Box {
            lo: vec![0.0, -1.0],
            hi: vec![2.0, 1.0],
        };
        assert_relative_eq!(b.measure(), 4.0, max_relative = 1e-15);
        assert_relative_eq!(
            DomainSpec::UnitSphere2.measure(),
            4.0 * std::f64::consts::PI,
            max_relative = 1e-15
        );
    }
}
