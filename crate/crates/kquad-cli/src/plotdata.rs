//! Plot-ready data emission: aligns the greedy trace with the uniform
//! comparison curve, the theoretical n^(-1/2) bound, and power-law reference
//! slopes into one CSV any plotting tool can consume.

use std::collections::BTreeMap;
use std::path::Path;

use kquad::io::{format_float, write_atomic};
use kquad::DensitySpec;

use crate::experiment::RunSummary;
use crate::Failure;

#[derive(Debug, Clone, Copy)]
struct TraceRow {
    n: usize,
    wce: f64,
}

fn read_trace(path: &Path) -> Result<Vec<TraceRow>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("reading {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 2 {
            return Err(Failure::io(format!(
                "{}:{}: expected at least 2 fields",
                path.display(),
                lineno + 1
            )));
        }
        let n = fields[0].trim().parse().map_err(|_| {
            Failure::io(format!("{}:{}: bad n", path.display(), lineno + 1))
        })?;
        let wce = fields[1].trim().parse().map_err(|_| {
            Failure::io(format!("{}:{}: bad wce", path.display(), lineno + 1))
        })?;
        rows.push(TraceRow { n, wce });
    }
    if rows.is_empty() {
        return Err(Failure::io(format!("{}: no trace rows", path.display())));
    }
    Ok(rows)
}

fn read_comparison(path: &Path) -> Result<BTreeMap<usize, f64>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("reading {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(Failure::io(format!(
                "{}:{}: expected 2 fields",
                path.display(),
                lineno + 1
            )));
        }
        let n: usize = fields[0].trim().parse().map_err(|_| {
            Failure::io(format!("{}:{}: bad n", path.display(), lineno + 1))
        })?;
        let wce: f64 = fields[1].trim().parse().map_err(|_| {
            Failure::io(format!("{}:{}: bad wce", path.display(), lineno + 1))
        })?;
        map.insert(n, wce);
    }
    Ok(map)
}

/// Read a run directory (trace.csv, summary.json, optional comparison.csv)
/// and write the aligned plot CSV. Returns the output path.
pub fn emit_plot_data(run_dir: &Path, out: Option<&Path>) -> Result<std::path::PathBuf, Failure> {
    let trace_path = run_dir.join("trace.csv");
    let summary_path = run_dir.join("summary.json");
    if !trace_path.is_file() || !summary_path.is_file() {
        return Err(Failure::io(format!(
            "{} does not contain trace.csv and summary.json",
            run_dir.display()
        )));
    }
    let trace = read_trace(&trace_path)?;
    let summary_text = std::fs::read_to_string(&summary_path)
        .map_err(|e| Failure::io(format!("reading {}: {e}", summary_path.display())))?;
    let summary: RunSummary = serde_json::from_str(&summary_text)
        .map_err(|e| Failure::io(format!("{}: {e}", summary_path.display())))?;

    let comparison_path = run_dir.join("comparison.csv");
    let comparison = if comparison_path.is_file() {
        Some(read_comparison(&comparison_path)?)
    } else {
        None
    };

    // Reference slopes are anchored at the first positive greedy error. The
    // manifold dimension is 2 both for boxes in R^2 and for the embedded
    // sphere.
    let d = match summary.config.domain {
        kquad::DomainSpec::UnitSphere2 => 2.0,
        _ => summary.kernel.dim as f64,
    };
    let tau = summary.kernel.tau;
    let alpha = match &summary.config.density {
        DensitySpec::RadialSingular { alpha, .. } => Some(*alpha),
        _ => None,
    };
    let anchor = trace.iter().find(|t| t.wce > 0.0).copied();

    let mut header: Vec<&str> = vec!["n", "greedy_wce"];
    if comparison.is_some() {
        header.push("uniform_wce");
    }
    header.push("bound");
    if tau.is_some() {
        header.push("ref_rate_smooth");
        if alpha.is_some() {
            header.push("ref_rate_singular");
        }
    }

    let mut text = header.join(",");
    text.push('\n');
    for row in &trace {
        let mut cols: Vec<String> = vec![row.n.to_string(), format_float(row.wce)];
        if let Some(comp) = &comparison {
            cols.push(
                comp.get(&row.n)
                    .map(|w| format_float(*w))
                    .unwrap_or_default(),
            );
        }
        cols.push(format_float(
            summary.bound_constant / (row.n as f64).sqrt(),
        ));
        if let Some(tau) = tau {
            let reference = |exponent: f64| -> String {
                match anchor {
                    Some(a) => {
                        format_float(a.wce * (row.n as f64 / a.n as f64).powf(exponent))
                    }
                    None => String::new(),
                }
            };
            cols.push(reference(-tau / d));
            if let Some(alpha) = alpha {
                cols.push(reference(-tau / d + (alpha / 2.0 - 0.5).max(0.0)));
            }
        }
        text.push_str(&cols.join(","));
        text.push('\n');
    }

    let out_path = out
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| run_dir.join("plot.csv"));
    write_atomic(&out_path, &text)?;
    Ok(out_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{CandidateGen, Comparison, ExperimentConfig};
    use crate::experiment::run_experiment;
    use kquad::{DomainSpec, KernelFamily, KernelSpec, SelectionRule, Termination};

    fn run_dir(comparison: Comparison) -> tempfile::TempDir {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            domain: DomainSpec::unit_box(2),
            density: DensitySpec::RadialSingular {
                center: vec![0.5, 0.5],
                alpha: 1.5,
            },
            kernel: KernelSpec::new(KernelFamily::MaternQuadratic, 1.0, 2)
                .unwrap()
                .with_tau(3.5)
                .unwrap(),
            mc_m: 200,
            candidate_gen: CandidateGen::Grid { points_per_axis: 12 },
            rule: SelectionRule::FOverP,
            term: Termination {
                max_n: 20,
                residual_tol: 0.0,
                wce_tol: 0.0,
            },
            seed: 3,
            comparison,
        };
        run_experiment(&cfg, dir.path()).unwrap();
        dir
    }

    #[test]
    fn columns_match_the_trace_row_for_row() {
        let dir = run_dir(Comparison::UniformGrid {
            sizes: vec![4, 16],
        });
        let out = emit_plot_data(dir.path(), None).unwrap();
        let plot = std::fs::read_to_string(out).unwrap();
        let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
        assert!(plot.starts_with(
            "n,greedy_wce,uniform_wce,bound,ref_rate_smooth,ref_rate_singular\n"
        ));
        let plot_rows: Vec<&str> = plot.lines().skip(1).collect();
        let trace_rows: Vec<&str> = trace.lines().skip(1).collect();
        assert_eq!(plot_rows.len(), trace_rows.len());
        for (p, t) in plot_rows.iter().zip(&trace_rows) {
            let pf: Vec<&str> = p.split(',').collect();
            let tf: Vec<&str> = t.split(',').collect();
            assert_eq!(pf[0], tf[0]);
            assert_eq!(pf[1], tf[1]);
        }
        // The uniform column is filled exactly at comparison sizes.
        let filled = plot_rows
            .iter()
            .filter(|r| !r.split(',').nth(2).unwrap().is_empty())
            .count();
        assert_eq!(filled, 2);
    }

    #[test]
    fn no_comparison_omits_the_uniform_column() {
        let dir = run_dir(Comparison::None);
        let out = emit_plot_data(dir.path(), None).unwrap();
        let plot = std::fs::read_to_string(out).unwrap();
        assert!(plot.starts_with("n,greedy_wce,bound,ref_rate_smooth,ref_rate_singular\n"));
    }

    #[test]
    fn reference_column_is_a_power_law() {
        let dir = run_dir(Comparison::None);
        let out = emit_plot_data(dir.path(), None).unwrap();
        let plot = std::fs::read_to_string(out).unwrap();
        let rows: Vec<Vec<String>> = plot
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(String::from).collect())
            .collect();
        // ref(4 n) / ref(n) = 4^(-tau/d) for the smooth reference column.
        let col = 3;
        let at = |n: usize| -> f64 {
            rows.iter()
                .find(|r| r[0] == n.to_string())
                .map(|r| r[col].parse().unwrap())
                .unwrap()
        };
        let ratio = at(4) / at(1);
        let expected = 4.0f64.powf(-3.5 / 2.0);
        assert!((ratio - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn missing_inputs_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_plot_data(dir.path(), None).is_err());
    }
}
