//! CSV and JSON file formats.
//!
//! Node files use the header `x1,...,xd,weight`, one node per row, with
//! every float printed in full-precision scientific notation (17 significant
//! digits) so that files round-trip bit-exactly. Traces use
//! `n,wce,selected_index,score`. Writes go through a temp-file-then-rename
//! so readers never observe partial output.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::functionals::DiscreteFunctional;
use crate::greedy::QuadratureRule;
use crate::kernels::PointSet;

/// Full-precision scientific formatting; 17 significant digits round-trip
/// every f64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write to `<path>.tmp` in the same directory, then rename into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".to_string(),
    });
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn node_header(dim: usize) -> String {
    let mut cols: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    cols.push("weight".into());
    cols.join(",")
}

fn render_nodes(nodes: &PointSet, weights: &[f64]) -> String {
    let mut out = String::new();
    out.push_str(&node_header(nodes.dim()));
    out.push('\n');
    for (p, w) in nodes.iter_points().zip(weights) {
        for c in p {
            out.push_str(&format_float(*c));
            out.push(',');
        }
        out.push_str(&format_float(*w));
        out.push('\n');
    }
    out
}

/// Export a discrete functional as `x1,...,xd,weight`.
pub fn write_functional_csv(path: &Path, functional: &DiscreteFunctional) -> Result<()> {
    write_atomic(path, &render_nodes(functional.nodes(), functional.weights()))
}

/// Export a quadrature rule's nodes and optimal weights.
pub fn write_rule_csv(path: &Path, rule: &QuadratureRule) -> Result<()> {
    write_atomic(path, &render_nodes(rule.nodes(), rule.weights()))
}

/// Export a greedy trace as `n,wce,selected_index,score`.
pub fn write_trace_csv(path: &Path, rule: &QuadratureRule) -> Result<()> {
    let mut out = String::from("n,wce,selected_index,score\n");
    for t in rule.trace() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            t.n,
            format_float(t.wce),
            t.selected_index,
            format_float(t.score)
        ));
    }
    write_atomic(path, &out)
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Parsed node file: points plus the weight column (zeros when absent).
pub struct NodeFile {
    pub points: PointSet,
    pub weights: Option<Vec<f64>>,
}

/// Read a `x1,...,xd[,weight]` CSV. The weight column is optional so the
/// same format serves both functional import and plain point-set ingest.
pub fn read_node_csv(path: &Path) -> Result<NodeFile> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let cols: Vec<&str> = header.trim().split(',').collect();
    let has_weight = cols.last().map(|c| c.trim() == "weight").unwrap_or(false);
    let dim = if has_weight {
        cols.len() - 1
    } else {
        cols.len()
    };
    if dim == 0 {
        return Err(parse_err(path, 1, "no coordinate columns in header"));
    }
    for (i, c) in cols.iter().take(dim).enumerate() {
        let expected = format!("x{}", i + 1);
        if c.trim() != expected {
            return Err(parse_err(
                path,
                1,
                format!("expected column '{expected}', found '{c}'"),
            ));
        }
    }

    let mut coords = Vec::new();
    let mut weights = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(parse_err(
                path,
                lineno + 1,
                format!("expected {} fields, found {}", cols.len(), fields.len()),
            ));
        }
        for f in fields.iter().take(dim) {
            let v: f64 = f.trim().parse().map_err(|_| {
                parse_err(path, lineno + 1, format!("bad coordinate '{f}'"))
            })?;
            coords.push(v);
        }
        if has_weight {
            let w: f64 = fields[dim].trim().parse().map_err(|_| {
                parse_err(path, lineno + 1, format!("bad weight '{}'", fields[dim]))
            })?;
            weights.push(w);
        }
    }
    if coords.is_empty() {
        return Err(parse_err(path, 2, "no data rows"));
    }
    Ok(NodeFile {
        points: PointSet::new(coords, dim)?,
        weights: if has_weight { Some(weights) } else { None },
    })
}

/// Import a discrete functional from `x1,...,xd,weight`.
pub fn read_functional_csv(path: &Path) -> Result<DiscreteFunctional> {
    let file = read_node_csv(path)?;
    let weights = file
        .weights
        .ok_or_else(|| parse_err(path, 1, "missing weight column"))?;
    DiscreteFunctional::new(file.points, weights)
}
