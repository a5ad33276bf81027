//! Browser bindings for the pathflow demo page.
//!
//! Every export returns a JSON string so the page can stay plain JavaScript.
//! The native functions behind the exports are plain Rust and are tested
//! without a browser.

use pathflow::lie_group::{heisenberg_geodesic, HeisenbergGeodesicParams};
use pathflow::ot_solver::{cost_matrix, solve_exact};
use pathflow::path_space::{BrownianSampler, LoopMethod};
use pathflow::transport_geometry::interpolate_path;
use pathflow::{DiscretePath, EmpiricalMeasure, Group, Result};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Serialize)]
pub struct SampleView {
    pub group: String,
    pub grid: usize,
    /// Coordinates of every node of every path.
    pub paths: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize)]
pub struct Pair {
    pub i: usize,
    pub j: usize,
    pub mass: f64,
}

#[derive(Debug, Serialize)]
pub struct Frame {
    pub lambda: f64,
    pub paths: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize)]
pub struct TransportView {
    pub wasserstein: f64,
    pub source: Vec<Vec<Vec<f64>>>,
    pub target: Vec<Vec<Vec<f64>>>,
    pub pairs: Vec<Pair>,
    pub frames: Vec<Frame>,
}

#[derive(Debug, Serialize)]
pub struct CurveView {
    pub s: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub t: Vec<f64>,
}

fn coords(path: &DiscretePath) -> Vec<Vec<f64>> {
    path.points().iter().map(|g| g.to_coords()).collect()
}

fn draw(
    group: Group,
    grid: usize,
    atoms: usize,
    seed: u64,
    loops: bool,
) -> Result<EmpiricalMeasure> {
    let mut sampler = BrownianSampler::new(group, grid, seed)?;
    let support = (0..atoms)
        .map(|_| {
            if loops {
                sampler
                    .next_loop(LoopMethod::GeodesicCorrection)
                    .map(|l| l.into_path())
            } else {
                Ok(sampler.next_path())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    EmpiricalMeasure::uniform(support)
}

/// Brownian paths (or loops) on the named group.
pub fn sample_view(
    tag: &str,
    dim: usize,
    grid: usize,
    atoms: usize,
    seed: u64,
    loops: bool,
) -> Result<SampleView> {
    let group = Group::from_tag(tag, Some(dim))?;
    let measure = draw(group, grid, atoms, seed, loops)?;
    Ok(SampleView {
        group: group.to_string(),
        grid,
        paths: measure.support().iter().map(coords).collect(),
    })
}

/// Exact `W₂` between two Brownian samples on the 2-torus, with the matched
/// paths moved along their geodesics at `frames + 1` evenly spaced times.
pub fn transport_view(
    grid: usize,
    atoms: usize,
    seed: u64,
    frames: usize,
) -> Result<TransportView> {
    let group = Group::Torus(2);
    let src = draw(group, grid, atoms, seed, false)?;
    let tgt = draw(group, grid, atoms, seed.wrapping_add(1), false)?;
    let cost = cost_matrix(&src, &tgt, 2.0)?;
    let (plan, value) = solve_exact(&cost, src.weights(), tgt.weights())?;
    let pairs: Vec<Pair> = plan
        .support()
        .map(|(i, j, mass)| Pair { i, j, mass })
        .collect();
    let steps = frames.max(1);
    let frames = (0..=steps)
        .map(|k| {
            let lambda = k as f64 / steps as f64;
            let paths = pairs
                .iter()
                .map(|p| interpolate_path(src.path(p.i), tgt.path(p.j), lambda).map(|g| coords(&g)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Frame { lambda, paths })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransportView {
        wasserstein: value.sqrt(),
        source: src.support().iter().map(coords).collect(),
        target: tgt.support().iter().map(coords).collect(),
        pairs,
        frames,
    })
}

/// The sub-Riemannian geodesic of `H¹` leaving the identity in direction
/// `angle` with vertical parameter `v` and radius `r`, sampled on `[0, length]`.
pub fn curve_view(angle: f64, v: f64, r: f64, length: f64, samples: usize) -> Result<CurveView> {
    let params = HeisenbergGeodesicParams::new(vec![angle.cos()], vec![angle.sin()], v, r)?;
    let samples = samples.max(2);
    let mut view = CurveView {
        s: vec![],
        xi: vec![],
        eta: vec![],
        t: vec![],
    };
    for k in 0..samples {
        let s = length * k as f64 / (samples - 1) as f64;
        let c = heisenberg_geodesic(&params, s).to_coords();
        view.s.push(s);
        view.xi.push(c[0]);
        view.eta.push(c[1]);
        view.t.push(c[2]);
    }
    Ok(view)
}

fn export<T: Serialize>(result: Result<T>) -> std::result::Result<String, JsError> {
    let value = result.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn sample(
    tag: &str,
    dim: usize,
    grid: usize,
    atoms: usize,
    seed: u64,
    loops: bool,
) -> std::result::Result<String, JsError> {
    export(sample_view(tag, dim, grid, atoms, seed, loops))
}

#[wasm_bindgen]
pub fn transport(
    grid: usize,
    atoms: usize,
    seed: u64,
    frames: usize,
) -> std::result::Result<String, JsError> {
    export(transport_view(grid, atoms, seed, frames))
}

#[wasm_bindgen]
pub fn heisenberg_curve(
    angle: f64,
    v: f64,
    r: f64,
    length: f64,
    samples: usize,
) -> std::result::Result<String, JsError> {
    export(curve_view(angle, v, r, length, samples))
}
