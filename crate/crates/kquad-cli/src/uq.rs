//! Quadrature compression of uncertainty-quantification datasets.
//!
//! A dataset is a cloud of parameter triples theta_i with per-sample output
//! vectors y_i = s(theta_i). The full-sample Monte Carlo mean is treated as
//! the reference functional (uniform weights 1/N); compressing it yields an
//! n-point rule whose weights estimate the mean and standard deviation of
//! every output cell from n solver runs instead of N.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use kquad::io::{format_float, write_atomic};
use kquad::{
    compress, DiscreteFunctional, KernelSpec, PointSet, QuadratureRule, SelectionRule,
};

use crate::Failure;

/// Parameter samples and row-aligned solver outputs.
#[derive(Debug, Clone)]
pub struct UqDataset {
    params: PointSet,
    /// Row-major N x S output matrix.
    outputs: Vec<f64>,
    cells: usize,
}

impl UqDataset {
    pub fn new(params: PointSet, outputs: Vec<f64>, cells: usize) -> Result<Self, Failure> {
        if cells == 0 {
            return Err(Failure::config("output cell count must be positive"));
        }
        if outputs.len() != params.len() * cells {
            return Err(Failure::config(format!(
                "outputs have {} entries, expected {} x {}",
                outputs.len(),
                params.len(),
                cells
            )));
        }
        if outputs.iter().any(|v| !v.is_finite()) {
            return Err(Failure::config("outputs must be finite"));
        }
        Ok(Self {
            params,
            outputs,
            cells,
        })
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn params(&self) -> &PointSet {
        &self.params
    }

    pub fn output_row(&self, i: usize) -> &[f64] {
        &self.outputs[i * self.cells..(i + 1) * self.cells]
    }

    /// Full-sample Monte Carlo mean per cell.
    pub fn reference_mean(&self) -> Vec<f64> {
        let n = self.len() as f64;
        let mut mu = vec![0.0; self.cells];
        for i in 0..self.len() {
            for (m, y) in mu.iter_mut().zip(self.output_row(i)) {
                *m += y / n;
            }
        }
        mu
    }

    /// Full-sample standard deviation per cell (mean of squares minus
    /// squared mean, clamped at zero).
    pub fn reference_std(&self) -> Vec<f64> {
        let n = self.len() as f64;
        let mu = self.reference_mean();
        let mut second = vec![0.0; self.cells];
        for i in 0..self.len() {
            for (m, y) in second.iter_mut().zip(self.output_row(i)) {
                *m += y * y / n;
            }
        }
        second
            .iter()
            .zip(&mu)
            .map(|(s, m)| (s - m * m).max(0.0).sqrt())
            .collect()
    }
}

/// Compression quality against the full-sample reference.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UqErrors {
    pub n: usize,
    /// |mu - mu~|_2 / S.
    pub e_mu: f64,
    /// |sigma - sigma~|_2 / S.
    pub e_sigma: f64,
    /// Cells where the variance estimate went negative and was clamped.
    pub clamped_cells: usize,
}

/// Result of compressing the dataset mean to an n-point rule.
#[derive(Debug)]
pub struct UqCompression {
    pub errors: UqErrors,
    pub rule: QuadratureRule,
}

/// Compress the dataset's empirical-mean functional to `n` nodes and report
/// the mean/std reconstruction errors.
pub fn uq_compress(
    dataset: &UqDataset,
    kernel: &KernelSpec,
    n: usize,
    rule: SelectionRule,
) -> Result<UqCompression, Failure> {
    let count = dataset.len();
    if n == 0 || n > count {
        return Err(Failure::config(format!(
            "compression size must be in 1..={count}, got {n}"
        )));
    }
    let weights = vec![1.0 / count as f64; count];
    let functional = DiscreteFunctional::new(dataset.params().clone(), weights)
        .map_err(Failure::from)?;
    let rule_out = compress(&functional, kernel, n, rule)?;

    let picked = rule_out.selected_indices();
    let w = rule_out.weights();
    let s = dataset.cells();
    let mut mu = vec![0.0; s];
    let mut second = vec![0.0; s];
    for (k, &idx) in picked.iter().enumerate() {
        let row = dataset.output_row(idx);
        for j in 0..s {
            mu[j] += w[k] * row[j];
            second[j] += w[k] * row[j] * row[j];
        }
    }
    let mut clamped = 0usize;
    let sigma: Vec<f64> = second
        .iter()
        .zip(&mu)
        .map(|(sec, m)| {
            let var = sec - m * m;
            if var < 0.0 {
                clamped += 1;
            }
            var.max(0.0).sqrt()
        })
        .collect();

    let ref_mu = dataset.reference_mean();
    let ref_sigma = dataset.reference_std();
    let l2 = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let errors = UqErrors {
        n: rule_out.n(),
        e_mu: l2(&mu, &ref_mu) / s as f64,
        e_sigma: l2(&sigma, &ref_sigma) / s as f64,
        clamped_cells: clamped,
    };
    Ok(UqCompression {
        errors,
        rule: rule_out,
    })
}

/// Synthetic benchmark dataset: seeded uniform parameter triples in [0,1]^3
/// mapped through a smooth trigonometric field with cell-dependent
/// frequencies.
pub fn synthesize(n: usize, cells: usize, seed: u64) -> Result<UqDataset, Failure> {
    if n == 0 || cells == 0 {
        return Err(Failure::config("dataset dimensions must be positive"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut freqs = Vec::with_capacity(cells);
    for _ in 0..cells {
        let w: [f64; 3] = [
            0.5 + rng.random::<f64>(),
            0.5 + rng.random::<f64>(),
            0.5 + rng.random::<f64>(),
        ];
        let phase = rng.random::<f64>() * std::f64::consts::TAU;
        let amp = 0.5 + rng.random::<f64>();
        freqs.push((w, phase, amp));
    }
    let mut coords = Vec::with_capacity(n * 3);
    let mut outputs = Vec::with_capacity(n * cells);
    for _ in 0..n {
        let theta = [
            rng.random::<f64>(),
            rng.random::<f64>(),
            rng.random::<f64>(),
        ];
        coords.extend_from_slice(&theta);
        for (w, phase, amp) in &freqs {
            let dot: f64 = w.iter().zip(&theta).map(|(a, b)| a * b).sum();
            outputs.push(amp * (std::f64::consts::TAU * dot + phase).sin());
        }
    }
    let params = PointSet::new(coords, 3).map_err(Failure::from)?;
    UqDataset::new(params, outputs, cells)
}

/// Write `params.csv` (t1,t2,t3) and `outputs.csv` (c1..cS), row-aligned.
pub fn write_dataset(dataset: &UqDataset, params_path: &Path, outputs_path: &Path) -> Result<(), Failure> {
    let mut p = String::from("t1,t2,t3\n");
    for row in dataset.params().iter_points() {
        let cols: Vec<String> = row.iter().map(|c| format_float(*c)).collect();
        p.push_str(&cols.join(","));
        p.push('\n');
    }
    write_atomic(params_path, &p).map_err(Failure::from)?;

    let header: Vec<String> = (1..=dataset.cells()).map(|i| format!("c{i}")).collect();
    let mut o = header.join(",");
    o.push('\n');
    for i in 0..dataset.len() {
        let cols: Vec<String> = dataset.output_row(i).iter().map(|c| format_float(*c)).collect();
        o.push_str(&cols.join(","));
        o.push('\n');
    }
    write_atomic(outputs_path, &o).map_err(Failure::from)?;
    Ok(())
}

fn read_matrix(path: &Path, expected_header: Option<&str>) -> Result<(Vec<f64>, usize), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("reading {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Failure::io(format!("{}: empty file", path.display())))?;
    let cols = header.trim().split(',').count();
    if let Some(expected) = expected_header {
        if header.trim() != expected {
            return Err(Failure::io(format!(
                "{}:1: expected header '{expected}', found '{header}'",
                path.display()
            )));
        }
    }
    let mut data = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols {
            return Err(Failure::io(format!(
                "{}:{}: expected {cols} fields, found {}",
                path.display(),
                lineno + 1,
                fields.len()
            )));
        }
        for f in fields {
            let v: f64 = f.trim().parse().map_err(|_| {
                Failure::io(format!(
                    "{}:{}: bad value '{f}'",
                    path.display(),
                    lineno + 1
                ))
            })?;
            data.push(v);
        }
    }
    Ok((data, cols))
}

/// Load a dataset from the two row-aligned CSVs.
pub fn load_dataset(params_path: &Path, outputs_path: &Path) -> Result<UqDataset, Failure> {
    let (pdata, pcols) = read_matrix(params_path, Some("t1,t2,t3"))?;
    let (odata, ocols) = read_matrix(outputs_path, None)?;
    let params = PointSet::new(pdata, pcols).map_err(Failure::from)?;
    let rows = params.len();
    if odata.len() != rows * ocols {
        return Err(Failure::config(format!(
            "outputs file has {} rows, params file has {rows}",
            odata.len() / ocols.max(1)
        )));
    }
    UqDataset::new(params, odata, ocols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use kquad::KernelFamily;

    fn kernel(gamma: f64) -> KernelSpec {
        KernelSpec::new(KernelFamily::MaternQuadratic, gamma, 3).unwrap()
    }

    #[test]
    fn synthesized_shapes_and_determinism() {
        let a = synthesize(50, 7, 3).unwrap();
        assert_eq!(a.len(), 50);
        assert_eq!(a.cells(), 7);
        let b = synthesize(50, 7, 3).unwrap();
        assert_eq!(a.outputs, b.outputs);
    }

    #[test]
    fn full_compression_reproduces_the_mean() {
        let ds = synthesize(120, 10, 5).unwrap();
        let out = uq_compress(&ds, &kernel(8.0), 120, SelectionRule::FOverP).unwrap();
        assert!(out.errors.e_mu <= 1e-10, "e_mu = {}", out.errors.e_mu);
    }

    #[test]
    fn constant_single_cell_algebra() {
        // Outputs identically c: mu~ = c sum(w), and the variance estimate
        // clamps exactly when sum(w) c^2 - mu~^2 < 0.
        let ds = UqDataset::new(
            kquad::oracle::separated_uniform(9, 30, 3, 0.05),
            vec![2.0; 30],
            1,
        )
        .unwrap();
        let out = uq_compress(&ds, &kernel(5.0), 8, SelectionRule::FOverP).unwrap();
        let w_sum: f64 = out.rule.weights().iter().sum();
        let mu = 2.0 * w_sum;
        let expected_var = 4.0 * w_sum - mu * mu;
        let expected_clamped = usize::from(expected_var < 0.0);
        assert_eq!(out.errors.clamped_cells, expected_clamped);
        let expected_e_mu = (mu - 2.0f64).abs();
        assert!((out.errors.e_mu - expected_e_mu).abs() <= 1e-12);
    }

    #[test]
    fn errors_shrink_with_budget() {
        let ds = synthesize(400, 12, 6).unwrap();
        let k = kernel(3.0);
        let e_small = uq_compress(&ds, &k, 20, SelectionRule::FOverP)
            .unwrap()
            .errors;
        let e_large = uq_compress(&ds, &k, 120, SelectionRule::FOverP)
            .unwrap()
            .errors;
        assert!(e_large.e_mu <= e_small.e_mu);
    }

    #[test]
    fn dataset_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let ds = synthesize(25, 4, 8).unwrap();
        let pp = dir.path().join("params.csv");
        let op = dir.path().join("outputs.csv");
        write_dataset(&ds, &pp, &op).unwrap();
        let back = load_dataset(&pp, &op).unwrap();
        assert_eq!(ds.outputs, back.outputs);
        assert_eq!(ds.params(), back.params());

        std::fs::write(&pp, "t1,t2\n0.1,0.2\n").unwrap();
        assert!(load_dataset(&pp, &op).is_err());
    }

    #[test]
    fn size_validation() {
        let ds = synthesize(10, 2, 1).unwrap();
        assert!(uq_compress(&ds, &kernel(1.0), 0, SelectionRule::FOverP).is_err());
        assert!(uq_compress(&ds, &kernel(1.0), 11, SelectionRule::FOverP).is_err());
    }
}
