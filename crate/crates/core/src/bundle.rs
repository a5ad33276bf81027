//! On-disk artifacts.
//!
//! * Path bundle (JSON):
//!   `{"format": 1, "group": {"tag": ..., "dim": k}, "grid": N, "weights": [...], "paths": [[point, ...], ...]}`
//!   with points as angle arrays (torus), row-major 3×3 matrices (SO(3)) or
//!   `(ξ, η, t)` arrays (Heisenberg).
//! * Coupling (CSV): header `i,j,mass`, one row per cell with positive mass.
//! * Potentials (JSON): `{"phi": [...], "psi": [...], "p": p}`.
//!
//! Floating-point numbers are written with 17 significant digits, which
//! round-trips every `f64` exactly.

use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_group::Group;
use crate::ot_solver::{Coupling, DualPotentials};
use crate::path_space::{DiscretePath, EmpiricalMeasure};

pub const FORMAT_VERSION: u32 = 1;

/// Compact JSON with every float as `{:.16e}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes `value` with [`FullPrecision`].
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(out).map_err(|e| Error::Format(e.to_string()))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleFile {
    format: u32,
    group: Group,
    grid: usize,
    weights: Vec<f64>,
    paths: Vec<Vec<Vec<f64>>>,
}

pub fn measure_to_json(measure: &EmpiricalMeasure) -> Result<String> {
    let file = BundleFile {
        format: FORMAT_VERSION,
        group: measure.group(),
        grid: measure.grid(),
        weights: measure.weights().to_vec(),
        paths: measure
            .support()
            .iter()
            .map(|p| p.points().iter().map(|g| g.to_coords()).collect())
            .collect(),
    };
    to_json_string(&file)
}

pub fn measure_from_json(text: &str) -> Result<EmpiricalMeasure> {
    let file: BundleFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if file.format != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported bundle format {}",
            file.format
        )));
    }
    let mut support = Vec::with_capacity(file.paths.len());
    for (i, raw) in file.paths.iter().enumerate() {
        if raw.len() != file.grid + 1 {
            return Err(Error::Format(format!(
                "path {i} has {} points, grid {} needs {}",
                raw.len(),
                file.grid,
                file.grid + 1
            )));
        }
        let points = raw
            .iter()
            .map(|c| file.group.element_from_coords(c))
            .collect::<Result<Vec<_>>>()?;
        support.push(DiscretePath::new(points)?);
    }
    EmpiricalMeasure::new(support, file.weights)
}

pub fn coupling_to_csv(coupling: &Coupling) -> String {
    let mut out = String::from("i,j,mass\n");
    for (i, j, mass) in coupling.support() {
        writeln!(out, "{i},{j},{mass:.16e}").expect("writing to a String");
    }
    out
}

/// Parses a coupling CSV into a dense `rows × cols` plan.
pub fn plan_from_csv(text: &str, rows: usize, cols: usize) -> Result<Vec<f64>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("i,j,mass") {
        return Err(Error::Format(
            "coupling CSV must start with the header i,j,mass".into(),
        ));
    }
    let mut plan = vec![0.0; rows * cols];
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || Error::Format(format!("malformed coupling row {}: {line:?}", n + 2));
        if fields.len() != 3 {
            return Err(bad());
        }
        let i: usize = fields[0].parse().map_err(|_| bad())?;
        let j: usize = fields[1].parse().map_err(|_| bad())?;
        let mass: f64 = fields[2].parse().map_err(|_| bad())?;
        if i >= rows || j >= cols {
            return Err(bad());
        }
        plan[i * cols + j] = mass;
    }
    Ok(plan)
}

pub fn potentials_to_json(potentials: &DualPotentials) -> Result<String> {
    to_json_string(potentials)
}

pub fn potentials_from_json(text: &str) -> Result<DualPotentials> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}
