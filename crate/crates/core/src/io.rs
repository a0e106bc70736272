//! Plain-text interchange formats: CSV field/kernel/measure dumps and the
//! coordinate matrix format for custom pencils. Values are written with
//! Rust's shortest-roundtrip float formatting, so dumps are byte-stable
//! across runs.
//!
//! Field CSV: `# n=<dim> N=<points>` then `i,value` (1-D) or `i1,i2,value`
//! (2-D) rows. Kernel CSV: `# x=<src> alpha=<a> t=<t> K=<modes>` then
//! `y,value`. Measure CSV: `# alpha=<a> t=<t> residual=<r>` then `s,w`.
//! Matrix: `rows cols nnz` header then 0-indexed `row col value` triplets;
//! the mass matrix is a one-column diagonal file.

use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grid::{ScalarField, TorusGrid};
use crate::heat::HeatKernelField;
use crate::subordination::SubordinationMeasure;

pub fn write_field_csv(path: &Path, field: &ScalarField) -> Result<()> {
    let grid = field.grid();
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "# n={} N={}", grid.dimension(), grid.points_per_axis())?;
    match grid.dimension() {
        1 => {
            writeln!(w, "i,value")?;
            for (i, v) in field.values().iter().enumerate() {
                writeln!(w, "{i},{v}")?;
            }
        }
        _ => {
            writeln!(w, "i1,i2,value")?;
            let n = grid.points_per_axis();
            for (i, v) in field.values().iter().enumerate() {
                writeln!(w, "{},{},{v}", i / n, i % n)?;
            }
        }
    }
    Ok(())
}

pub fn read_field_csv(path: &Path) -> Result<ScalarField> {
    let file = std::fs::File::open(path)?;
    let mut lines = std::io::BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty field file".into()))??;
    let (mut dim, mut n) = (0usize, 0usize);
    for token in header.trim_start_matches('#').split_whitespace() {
        if let Some(v) = token.strip_prefix("n=") {
            dim = v
                .parse()
                .map_err(|_| Error::Parse(format!("bad dimension '{v}'")))?;
        }
        if let Some(v) = token.strip_prefix("N=") {
            n = v
                .parse()
                .map_err(|_| Error::Parse(format!("bad point count '{v}'")))?;
        }
    }
    let grid = TorusGrid::new(dim, n)?;
    let mut values = vec![0.0; grid.node_count()];
    let mut seen = vec![false; grid.node_count()];
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('i') {
            continue;
        }
        let parts: Vec<&str> = t.split(',').collect();
        let (idx, value) = match (grid.dimension(), parts.as_slice()) {
            (1, [i, v]) => (
                i.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad index '{i}'")))?,
                v,
            ),
            (2, [i1, i2, v]) => {
                let a: usize = i1
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad index '{i1}'")))?;
                let b: usize = i2
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad index '{i2}'")))?;
                (a * n + b, v)
            }
            _ => return Err(Error::Parse(format!("bad field row '{t}'"))),
        };
        if idx >= values.len() {
            return Err(Error::Parse(format!("node index {idx} out of range")));
        }
        values[idx] = value
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad value '{value}'")))?;
        seen[idx] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Parse(format!("node {missing} missing from field file")));
    }
    ScalarField::from_values(grid, values)
}

pub fn write_kernel_csv(path: &Path, kernel: &HeatKernelField, modes: usize) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        w,
        "# x={} alpha={} t={} K={}",
        kernel.source, kernel.alpha, kernel.time, modes
    )?;
    writeln!(w, "y,value")?;
    for (y, v) in kernel.values.iter().enumerate() {
        writeln!(w, "{y},{v}")?;
    }
    Ok(())
}

pub fn write_measure_csv(path: &Path, measure: &SubordinationMeasure) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        w,
        "# alpha={} t={} residual={}",
        measure.alpha, measure.time, measure.achieved_residual
    )?;
    writeln!(w, "s,w")?;
    for (s, wt) in measure.nodes.iter().zip(&measure.weights) {
        writeln!(w, "{s},{wt}")?;
    }
    Ok(())
}

/// Reads the coordinate text format: header "rows cols nnz", then 0-indexed
/// (row, col, value) triplets, whitespace separated.
pub fn read_coordinate_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let content = std::fs::read_to_string(path)?;
    let mut tokens = content.split_whitespace();
    let mut next_usize = |what: &str| -> Result<usize> {
        tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad {what}")))
    };
    let rows = next_usize("row count")?;
    let cols = next_usize("col count")?;
    let nnz = next_usize("nnz")?;
    let rest: Vec<&str> = content.split_whitespace().skip(3).collect();
    if rest.len() != 3 * nnz {
        return Err(Error::Parse(format!(
            "expected {} triplet tokens, found {}",
            3 * nnz,
            rest.len()
        )));
    }
    let mut m = DMatrix::zeros(rows, cols);
    for triplet in rest.chunks_exact(3) {
        let r: usize = triplet[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad row '{}'", triplet[0])))?;
        let c: usize = triplet[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad col '{}'", triplet[1])))?;
        let v: f64 = triplet[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad value '{}'", triplet[2])))?;
        if r >= rows || c >= cols {
            return Err(Error::Parse(format!("entry ({r}, {c}) out of bounds")));
        }
        m[(r, c)] += v;
    }
    Ok(m)
}

/// Reads a one-column diagonal (mass matrix) file.
pub fn read_diagonal(path: &Path) -> Result<Vec<f64>> {
    let content = std::fs::read_to_string(path)?;
    content
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad diagonal entry '{t}'")))
        })
        .collect()
}

pub fn write_boundary_csv(path: &Path, values: &[f64]) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "index,value")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(w, "{i},{v}")?;
    }
    Ok(())
}

pub fn read_boundary_csv(path: &Path) -> Result<Vec<f64>> {
    let file = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for line in std::io::BufReader::new(file).lines() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with("index") {
            continue;
        }
        let (_, v) = t
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("bad boundary row '{t}'")))?;
        out.push(
            v.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad value '{v}'")))?,
        );
    }
    Ok(out)
}

/// Trajectory norms: one row per snapshot, `t` then one column per
/// requested exponent.
pub fn write_trajectory_csv(
    path: &Path,
    times: &[f64],
    columns: &[(String, Vec<f64>)],
) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    let names: Vec<&str> = columns.iter().map(|(n, _)| n.as_str()).collect();
    writeln!(w, "t,{}", names.join(","))?;
    for (i, t) in times.iter().enumerate() {
        let row: Vec<String> = columns.iter().map(|(_, c)| c[i].to_string()).collect();
        writeln!(w, "{t},{}", row.join(","))?;
    }
    Ok(())
}
