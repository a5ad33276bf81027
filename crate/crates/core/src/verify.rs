//! Invariant suites behind `pathflow verify`.
//!
//! Every suite draws its instances from a ChaCha20 stream seeded by the
//! caller and reports each invariant with the measured quantity, its
//! tolerance and the slack `tolerance - measured`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_group::{
    heisenberg_body_velocity, heisenberg_geodesic, heisenberg_horizontal_speed, integrate_geodesic,
    AlgebraElement, Group, GroupElement, HeisenbergGeodesicParams,
};
use crate::ot_solver::{
    assignment_margin, cost_matrix, dual_from_primal, lipschitz_check, solve_exact, CostMatrix,
    DualPotentials,
};
use crate::path_space::{
    d_cm, d_l2, d_uniform, sample_brownian_measure, sample_loop_measure, BrownianSampler,
    CameronMartinVector, DiscretePath, EmpiricalMeasure, LoopMethod,
};
use crate::transport_geometry::{
    directional_derivative, displacement_field, displacement_interpolation, interpolate_path,
    potential_gradient, predicted_directional_derivative, reconstruct_geodesic_from_v,
    reconstruct_map, CTransformPotential, DisplacementField, FiniteDifference,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Duality,
    MeasureGeodesic,
    PathScaling,
    GradientIdentity,
    ExplicitMap,
    LemmaReconstruction,
    GeodesicOde,
    DistanceChain,
    Lipschitz,
    Heisenberg,
    Reversibility,
    ExactOracle,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Duality,
        Suite::MeasureGeodesic,
        Suite::PathScaling,
        Suite::GradientIdentity,
        Suite::ExplicitMap,
        Suite::LemmaReconstruction,
        Suite::GeodesicOde,
        Suite::DistanceChain,
        Suite::Lipschitz,
        Suite::Heisenberg,
        Suite::Reversibility,
        Suite::ExactOracle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Duality => "duality",
            Suite::MeasureGeodesic => "measure-geodesic",
            Suite::PathScaling => "path-scaling",
            Suite::GradientIdentity => "gradient-identity",
            Suite::ExplicitMap => "explicit-map",
            Suite::LemmaReconstruction => "lemma-reconstruction",
            Suite::GeodesicOde => "geodesic-ode",
            Suite::DistanceChain => "distance-chain",
            Suite::Lipschitz => "lipschitz",
            Suite::Heisenberg => "heisenberg",
            Suite::Reversibility => "reversibility",
            Suite::ExactOracle => "exact-oracle",
        }
    }

    pub fn run(&self, seed: u64) -> Result<SuiteReport> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let checks = match self {
            Suite::Duality => duality(&mut rng)?,
            Suite::MeasureGeodesic => measure_geodesic(&mut rng)?,
            Suite::PathScaling => path_scaling(&mut rng)?,
            Suite::GradientIdentity => gradient_identity(&mut rng)?,
            Suite::ExplicitMap => explicit_map(&mut rng)?,
            Suite::LemmaReconstruction => lemma_reconstruction(&mut rng)?,
            Suite::GeodesicOde => geodesic_ode(&mut rng)?,
            Suite::DistanceChain => distance_chain(&mut rng)?,
            Suite::Lipschitz => lipschitz(&mut rng)?,
            Suite::Heisenberg => heisenberg(&mut rng)?,
            Suite::Reversibility => reversibility(&mut rng)?,
            Suite::ExactOracle => exact_oracle(&mut rng)?,
        };
        let passed = checks.iter().all(|c| c.passed);
        Ok(SuiteReport {
            suite: self.name().to_string(),
            seed,
            checks,
            passed,
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

/// `"all"` or a single suite name.
pub fn resolve(name: &str) -> Result<Vec<Suite>> {
    if name == "all" {
        Ok(Suite::ALL.to_vec())
    } else {
        Ok(vec![name.parse()?])
    }
}

pub fn run(name: &str, seed: u64) -> Result<Vec<SuiteReport>> {
    resolve(name)?.iter().map(|s| s.run(seed)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub slack: f64,
    pub instances: usize,
    pub passed: bool,
}

impl Check {
    /// Passes when `measured <= tolerance`; NaN never passes.
    pub fn at_most(name: &str, measured: f64, tolerance: f64, instances: usize) -> Self {
        Self::build(name, measured, tolerance, instances, measured <= tolerance)
    }

    /// Passes when `measured < tolerance`.
    pub fn below(name: &str, measured: f64, tolerance: f64, instances: usize) -> Self {
        Self::build(name, measured, tolerance, instances, measured < tolerance)
    }

    fn build(name: &str, measured: f64, tolerance: f64, instances: usize, passed: bool) -> Self {
        let passed = passed && instances > 0;
        Self {
            name: name.to_string(),
            measured,
            tolerance,
            slack: tolerance - measured,
            instances,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn gaussian(rng: &mut ChaCha20Rng, dim: usize) -> AlgebraElement {
    AlgebraElement::new((0..dim).map(|_| rng.sample(StandardNormal)).collect())
}

fn reweighted(measure: &EmpiricalMeasure, rng: &mut ChaCha20Rng) -> Result<EmpiricalMeasure> {
    let raw: Vec<f64> = (0..measure.len())
        .map(|_| 0.5 + rng.random::<f64>())
        .collect();
    let total: f64 = raw.iter().sum();
    EmpiricalMeasure::new(
        measure.support().to_vec(),
        raw.iter().map(|w| w / total).collect(),
    )
}

struct OtInstance {
    src: EmpiricalMeasure,
    p: f64,
    cost: CostMatrix,
    value: f64,
    duals: DualPotentials,
    dual_value: f64,
}

/// 50 instances on `T^2` and SO(3) with `N = 16`, `n = m ∈ {4, 8, 16}` and
/// `p ∈ {1.5, 2, 3}`; every fourth instance has non-uniform weights.
fn ot_instances(rng: &mut ChaCha20Rng) -> Result<Vec<OtInstance>> {
    let groups = [Group::Torus(2), Group::So3];
    let sizes = [4, 8, 16];
    let exponents = [1.5, 2.0, 3.0];
    let mut out = Vec::with_capacity(50);
    for i in 0..50 {
        let group = groups[i % 2];
        let n = sizes[(i / 2) % 3];
        let p = exponents[(i / 6) % 3];
        let mut src = sample_brownian_measure(group, 16, n, rng.random())?;
        let mut tgt = sample_brownian_measure(group, 16, n, rng.random())?;
        if i % 4 == 3 {
            src = reweighted(&src, rng)?;
            tgt = reweighted(&tgt, rng)?;
        }
        let cost = cost_matrix(&src, &tgt, p)?;
        let (plan, value) = solve_exact(&cost, src.weights(), tgt.weights())?;
        let duals = dual_from_primal(&cost, &plan)?;
        let dual_value = duals.value(src.weights(), tgt.weights());
        out.push(OtInstance {
            src,
            p,
            cost,
            value,
            duals,
            dual_value,
        });
    }
    Ok(out)
}

fn duality(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let instances = ot_instances(rng)?;
    let mut gap: f64 = 0.0;
    let mut infeasible: f64 = 0.0;
    for inst in &instances {
        gap =
            gap.max((inst.value - inst.dual_value).abs() / inst.value.abs().max(f64::MIN_POSITIVE));
        infeasible = infeasible.max(inst.duals.max_violation(&inst.cost) / (1.0 + inst.cost.max()));
    }
    Ok(vec![
        Check::at_most("relative primal-dual gap", gap, 1e-8, instances.len()),
        Check::at_most(
            "dual feasibility violation (relative to 1 + max c)",
            infeasible,
            1e-12,
            instances.len(),
        ),
    ])
}

fn lipschitz(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let instances = ot_instances(rng)?;
    let (mut quadratic, mut general) = ((f64::NEG_INFINITY, 0), (f64::NEG_INFINITY, 0));
    for inst in &instances {
        let diameter = inst
            .src
            .group()
            .diameter()
            .expect("suite groups have a distance");
        let report = lipschitz_check(&inst.duals.phi, &inst.src, inst.p, diameter)?;
        let slot = if inst.p == 2.0 {
            &mut quadratic
        } else {
            &mut general
        };
        slot.0 = slot.0.max(report.max_excess);
        slot.1 += 1;
    }
    Ok(vec![
        Check::at_most(
            "max |φ_i - φ_k| - 2D d_L2 (p = 2)",
            quadratic.0,
            1e-9,
            quadratic.1,
        ),
        Check::at_most(
            "max |φ_i - φ_k| - pD^(p-1) d_L2 (p = 1.5, 3)",
            general.0,
            1e-9,
            general.1,
        ),
    ])
}

fn measure_geodesic(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let groups = [Group::Torus(2), Group::So3];
    let mut worst: f64 = 0.0;
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < 20 && attempts < 200 {
        let group = groups[attempts % 2];
        attempts += 1;
        let src = sample_brownian_measure(group, 16, 6, rng.random())?;
        let tgt = sample_brownian_measure(group, 16, 6, rng.random())?;
        let result = displacement_interpolation(&src, &tgt, &[0.25, 0.5, 0.75])?;
        if result.has_cut_pair(&src, &tgt)? {
            continue;
        }
        accepted += 1;
        for (i, &l) in result.lambdas.iter().enumerate() {
            let forward = (result.distances[i] - l * result.total).abs();
            let backward = (result.remaining[i] - (1.0 - l) * result.total).abs();
            worst = worst.max(forward.max(backward) / result.total);
        }
    }
    Ok(vec![Check::at_most(
        "max |W2(ν0, νλ) - λ W2(ν0, ν1)| / W2(ν0, ν1), both directions",
        worst,
        1e-8,
        accepted,
    )])
}

fn path_scaling(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let groups = [Group::Torus(2), Group::So3];
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let mut sampler = BrownianSampler::new(groups[i % 2], 16, rng.random())?;
        let (a, b) = (sampler.next_path(), sampler.next_path());
        let lambda: f64 = rng.random();
        let d = d_l2(&a, &b)?;
        let u = interpolate_path(&a, &b, lambda)?;
        worst = worst.max((d_l2(&a, &u)? - lambda * d).abs());
        worst = worst.max((d_l2(&u, &b)? - (1.0 - lambda) * d).abs());
    }
    Ok(vec![Check::at_most(
        "max |d_L2(γ1, uλ) - λ d_L2(γ1, γ2)|",
        worst,
        1e-10,
        500,
    )])
}

/// A path `a` and `a · δ` with a small piecewise-geodesic gap `δ`.
fn close_pair(group: Group, grid: usize, seed: u64) -> Result<(DiscretePath, DiscretePath)> {
    let mut sampler = BrownianSampler::new(group, grid, seed)?;
    let a = sampler.next_path();
    let gap = sampler.next_piecewise_geodesic(3, 0.6)?;
    let b = a.pointwise_mul(&gap)?;
    Ok((a, b))
}

fn field_direction(field: &DisplacementField) -> Result<CameronMartinVector> {
    CameronMartinVector::new(field.vectors().to_vec(), false)
}

/// `h_V` and `h_V` plus a random hat combination.
fn test_directions(
    field: &DisplacementField,
    rng: &mut ChaCha20Rng,
) -> Result<Vec<CameronMartinVector>> {
    let hv = field_direction(field)?;
    let dim = hv.dim();
    let mut mixed = hv.clone();
    for h in CameronMartinVector::hat_basis(Group::Torus(dim), hv.grid(), false) {
        mixed = mixed.add_scaled(0.3 * rng.sample::<f64, _>(StandardNormal), &h)?;
    }
    Ok(vec![hv, mixed])
}

struct GradientErrors {
    coarse: f64,
    fine: f64,
}

fn forward_errors(
    potential: &CTransformPotential,
    a: &DiscretePath,
    b: &DiscretePath,
    h: &CameronMartinVector,
    p: f64,
) -> Result<GradientErrors> {
    let expect = predicted_directional_derivative(a, b, h, p)?;
    let rel = |step: f64| -> Result<f64> {
        let got = directional_derivative(potential, a, h, step, FiniteDifference::Forward)?;
        Ok((got - expect).abs() / expect.abs())
    };
    Ok(GradientErrors {
        coarse: rel(1e-4)?,
        fine: rel(1e-5)?,
    })
}

fn gradient_identity(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let mut errors = Vec::new();
    for group in [Group::Torus(2), Group::So3] {
        for p in [1.5, 2.0, 3.0] {
            for _ in 0..3 {
                let (a, b) = close_pair(group, 12, rng.random())?;
                let potential =
                    CTransformPotential::new(EmpiricalMeasure::dirac(b.clone()), vec![0.3], p)?;
                for h in test_directions(&displacement_field(&a, &b)?, rng)? {
                    errors.push(forward_errors(&potential, &a, &b, &h, p)?);
                }
            }
            let src = sample_brownian_measure(group, 12, 5, rng.random())?;
            let tgt = sample_brownian_measure(group, 12, 5, rng.random())?;
            let cost = cost_matrix(&src, &tgt, p)?;
            let (plan, _) = solve_exact(&cost, src.weights(), tgt.weights())?;
            let duals = dual_from_primal(&cost, &plan)?;
            let sigma = plan
                .as_assignment()
                .expect("uniform square instances give permutations");
            let potential = CTransformPotential::new(tgt.clone(), duals.psi.clone(), p)?;
            for (i, &j) in sigma.iter().enumerate() {
                let field = displacement_field(src.path(i), tgt.path(j))?;
                let strict = potential.c_subdifferential(src.path(i), 1e-6)?.len() == 1;
                if field.has_cut_pair() || !strict {
                    continue;
                }
                for h in test_directions(&field, rng)? {
                    errors.push(forward_errors(&potential, src.path(i), tgt.path(j), &h, p)?);
                }
            }
        }
    }
    let coarse = errors.iter().map(|e| e.coarse).fold(0.0, f64::max);
    let improvement = errors.iter().map(|e| e.fine / e.coarse).fold(0.0, f64::max);
    let order = errors
        .iter()
        .map(|e| ((e.coarse / e.fine).log10() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(vec![
        Check::at_most(
            "max relative error at step 1e-4",
            coarse,
            1e-2,
            errors.len(),
        ),
        Check::below(
            "max error ratio step 1e-5 / step 1e-4",
            improvement,
            1.0,
            errors.len(),
        ),
        Check::at_most("max |observed order - 1|", order, 0.5, errors.len()),
    ])
}

const MAP_STEPS: [f64; 4] = [1e-3, 5e-4, 2.5e-4, 1.25e-4];

/// Interior-node error of the reconstructed map at each step of
/// [`MAP_STEPS`], with forward differences.
fn map_errors(
    potential: &CTransformPotential,
    a: &DiscretePath,
    target: &DiscretePath,
) -> Result<Vec<f64>> {
    let basis = CameronMartinVector::hat_basis(a.group(), a.grid(), false);
    MAP_STEPS
        .iter()
        .map(|&step| {
            let grad = potential_gradient(potential, a, &basis, step, FiniteDifference::Forward)?;
            let mapped = reconstruct_map(&grad, a)?;
            Ok((1..a.grid())
                .map(|k| mapped.point(k).max_coord_diff(target.point(k)))
                .fold(0.0, f64::max))
        })
        .collect()
}

fn explicit_map(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let group = Group::Torus(2);
    let mut runs = Vec::new();
    for _ in 0..4 {
        let (a, b) = close_pair(group, 32, rng.random())?;
        let potential =
            CTransformPotential::new(EmpiricalMeasure::dirac(b.clone()), vec![0.3], 2.0)?;
        runs.push(map_errors(&potential, &a, &b)?);
    }
    for _ in 0..2 {
        let src = sample_brownian_measure(group, 32, 4, rng.random())?;
        let tgt = sample_brownian_measure(group, 32, 4, rng.random())?;
        let cost = cost_matrix(&src, &tgt, 2.0)?;
        let (plan, _) = solve_exact(&cost, src.weights(), tgt.weights())?;
        let duals = dual_from_primal(&cost, &plan)?;
        let sigma = plan
            .as_assignment()
            .expect("uniform square instances give permutations");
        let potential = CTransformPotential::new(tgt.clone(), duals.psi.clone(), 2.0)?;
        for (i, &j) in sigma.iter().enumerate() {
            let field = displacement_field(src.path(i), tgt.path(j))?;
            // Forward steps up to 1e-3 must not cross the cut locus.
            if field.cut_margins().iter().any(|&m| m < 1e-2) {
                continue;
            }
            runs.push(map_errors(&potential, src.path(i), tgt.path(j))?);
        }
    }
    let worst = runs.iter().flatten().copied().fold(0.0, f64::max);
    let ratio = runs
        .iter()
        .flat_map(|r| r.windows(2).map(|w| w[1] / w[0]))
        .fold(0.0, f64::max);
    Ok(vec![
        Check::at_most(
            "max interior-node map error, steps 1e-3 to 1.25e-4",
            worst,
            1e-3,
            runs.len(),
        ),
        Check::below(
            "max error ratio between successive halved steps",
            ratio,
            1.0,
            runs.len(),
        ),
    ])
}

fn lemma_reconstruction(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let groups = [Group::Torus(1), Group::Torus(3), Group::So3];
    let mut closing: f64 = 0.0;
    for i in 0..200 {
        let group = groups[i % 3];
        let mut v = gaussian(rng, group.dim());
        if group == Group::So3 && v.norm() > 3.0 {
            v = v.scale(3.0 / v.norm());
        }
        let curve = reconstruct_geodesic_from_v(group, &v, 50)?;
        closing = closing.max(
            curve[0]
                .mul(&group.exp(&v))?
                .max_coord_diff(&group.identity()),
        );
    }
    let mut composed: f64 = 0.0;
    for i in 0..200 {
        let group = [Group::Torus(2), Group::So3][i % 2];
        let mut sampler = BrownianSampler::new(group, 8, rng.random())?;
        let (a, b) = (sampler.next_path(), sampler.next_path());
        let field = displacement_field(&a, &b)?;
        let k = rng.random_range(1..=8);
        let curve = reconstruct_geodesic_from_v(group, field.vector(k), 50)?;
        composed = composed.max(curve[0].max_coord_diff(&b.point(k).between(a.point(k))?));
    }
    Ok(vec![
        Check::at_most("max |v(0) exp(V) - e|", closing, 1e-8, 200),
        Check::at_most(
            "max |v(0) - γ2(t)⁻¹γ1(t)| from the displacement field",
            composed,
            1e-8,
            200,
        ),
    ])
}

fn geodesic_ode(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let e = Group::So3.identity();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let g = gaussian(rng, 3);
        let x0 = g.scale(2.0 * rng.random::<f64>() / g.norm());
        let curve = integrate_geodesic(&e, &x0, 1000)?;
        worst = worst.max(curve[1000].max_coord_diff(&Group::So3.exp(&x0)));
    }
    Ok(vec![Check::at_most(
        "SO(3) RK4 endpoint vs exp(X0), 1000 steps",
        worst,
        1e-6,
        100,
    )])
}

fn distance_chain(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for group in [Group::Torus(2), Group::So3] {
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..500 {
            let mut sampler = BrownianSampler::new(group, 16, rng.random())?;
            let pieces = rng.random_range(1..=4);
            let a = sampler.next_piecewise_geodesic(pieces, 0.8)?;
            let b = sampler.next_piecewise_geodesic(pieces, 0.8)?;
            let (l2, sup, cm) = (d_l2(&a, &b)?, d_uniform(&a, &b)?, d_cm(&a, &b)?);
            worst = worst.max((l2 - sup).max(sup - cm));
        }
        checks.push(Check::at_most(
            &format!("max violation of d_L2 <= d_inf <= d_CM on {group}"),
            worst,
            1e-9,
            500,
        ));
    }
    Ok(checks)
}

fn heisenberg(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let (mut endpoint, mut speed, mut vertical): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut curves = 0;
    for t in [0.1, 1.0, 4.0] {
        for _ in 0..20 {
            let n = rng.random_range(1..=3);
            let dir = gaussian(rng, 2 * n);
            let unit = dir.scale(1.0 / dir.norm()).into_coords();
            let params =
                HeisenbergGeodesicParams::to_vertical(unit[..n].to_vec(), unit[n..].to_vec(), t)?;
            let target = GroupElement::heisenberg(vec![0.0; n], vec![0.0; n], t)?;
            endpoint =
                endpoint.max(heisenberg_geodesic(&params, params.r()).max_coord_diff(&target));
            for _ in 0..100 {
                let s = params.r() * rng.random::<f64>();
                speed = speed.max((heisenberg_horizontal_speed(&params, s) - 1.0).abs());
                vertical = vertical.max(heisenberg_body_velocity(&params, s).coords()[2 * n].abs());
            }
            curves += 1;
        }
    }
    Ok(vec![
        Check::at_most("max |γ(r) - (0, 0, t)|", endpoint, 1e-10, curves),
        Check::at_most("max ||horizontal speed| - 1|", speed, 1e-10, curves),
        Check::at_most("max |vertical body velocity|", vertical, 1e-10, curves),
    ])
}

fn reversibility(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let group = Group::Torus(2);
    let mut mismatches = 0usize;
    let mut accepted = 0;
    let mut attempts = 0;
    let mut min_margin = f64::INFINITY;
    while accepted < 20 && attempts < 100 {
        attempts += 1;
        let nu = sample_loop_measure(group, 16, 16, rng.random(), LoopMethod::GeodesicCorrection)?;
        let mu0 = sample_loop_measure(group, 16, 16, rng.random(), LoopMethod::TorusBridge)?;
        let forward = cost_matrix(&nu, &mu0, 2.0)?;
        let backward = cost_matrix(&mu0, &nu, 2.0)?;
        let margin = assignment_margin(&forward).min(assignment_margin(&backward));
        if margin < 1e-9 {
            continue;
        }
        min_margin = min_margin.min(margin);
        accepted += 1;
        let sigma = solve_exact(&forward, nu.weights(), mu0.weights())?
            .0
            .as_assignment()
            .expect("permutation");
        let tau = solve_exact(&backward, mu0.weights(), nu.weights())?
            .0
            .as_assignment()
            .expect("permutation");
        mismatches += (0..16).filter(|&i| tau[sigma[i]] != i).count();
    }
    Ok(vec![
        Check::at_most(
            "atoms where S∘T differs from the identity",
            mismatches as f64,
            0.0,
            accepted,
        ),
        Check::at_most(
            "negated smallest strict-optimality margin",
            -min_margin,
            -1e-9,
            accepted,
        ),
    ])
}

/// Uniform 3×3 and 4×4 instances: random Brownian supports plus tied
/// supports where several permutations are optimal.
pub fn oracle_corpus(seed: u64) -> Result<Vec<CostMatrix>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for n in [3, 4] {
        for group in [Group::Torus(1), Group::Torus(2), Group::So3] {
            for p in [1.5, 2.0, 3.0] {
                for _ in 0..4 {
                    let src = sample_brownian_measure(group, 8, n, rng.random())?;
                    let tgt = sample_brownian_measure(group, 8, n, rng.random())?;
                    out.push(cost_matrix(&src, &tgt, p)?);
                }
                let src = sample_brownian_measure(group, 8, n, rng.random())?;
                out.push(cost_matrix(&src, &src, p)?);
                let mut repeated = src.support().to_vec();
                repeated[1] = repeated[0].clone();
                let tied = EmpiricalMeasure::uniform(repeated)?;
                out.push(cost_matrix(&tied, &src, p)?);
            }
        }
    }
    Ok(out)
}

/// Minimum of `Σ_i (1/n) c_{iσ(i)}` over all permutations, summed in row
/// order like the solver's objective.
pub fn brute_force_assignment(cost: &CostMatrix) -> f64 {
    fn walk(
        cost: &CostMatrix,
        row: usize,
        used: &mut Vec<bool>,
        picked: &mut Vec<usize>,
        best: &mut f64,
    ) {
        let n = cost.rows();
        if row == n {
            let w = 1.0 / n as f64;
            let value: f64 = picked
                .iter()
                .enumerate()
                .map(|(i, &j)| w * cost.get(i, j))
                .sum();
            *best = best.min(value);
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                picked.push(j);
                walk(cost, row + 1, used, picked, best);
                picked.pop();
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    walk(
        cost,
        0,
        &mut vec![false; cost.rows()],
        &mut Vec::new(),
        &mut best,
    );
    best
}

fn exact_oracle(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let corpus = oracle_corpus(rng.random())?;
    let mut worst: f64 = 0.0;
    for cost in &corpus {
        let w = vec![1.0 / cost.rows() as f64; cost.rows()];
        let (_, value) = solve_exact(cost, &w, &w)?;
        worst = worst.max((value - brute_force_assignment(cost)).abs());
    }
    Ok(vec![Check::at_most(
        "max |solver - brute force| (exact)",
        worst,
        0.0,
        corpus.len(),
    )])
}
