use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::lie_group::{AlgebraElement, Group, GroupElement};

fn torus_path(angles: &[f64]) -> DiscretePath {
    DiscretePath::new(
        angles
            .iter()
            .map(|a| GroupElement::torus(vec![*a]).unwrap())
            .collect(),
    )
    .unwrap()
}

/// `γ₂ = γ₁ · c` pointwise, with `c` a fixed torus element.
fn offset(path: &DiscretePath, c: f64) -> DiscretePath {
    let shift = GroupElement::torus(vec![c]).unwrap();
    let mut points: Vec<_> = path
        .points()
        .iter()
        .map(|p| p.mul(&shift).unwrap())
        .collect();
    points[0] = path.point(0).clone();
    // Keep γ(0) = e; the offset applies on (0, 1].
    DiscretePath::new(points).unwrap()
}

#[test]
fn path_invariants() {
    let bad = DiscretePath::new(vec![
        GroupElement::torus(vec![0.1]).unwrap(),
        Group::Torus(1).identity(),
    ]);
    assert!(matches!(bad, Err(Error::InvalidPath(_))));
    let mixed = DiscretePath::new(vec![Group::Torus(1).identity(), Group::So3.identity()]);
    assert!(matches!(mixed, Err(Error::GroupMismatch { .. })));
    assert!(DiscretePath::new(vec![Group::So3.identity()]).is_err());
    let open = torus_path(&[0.0, 0.5, 0.2]);
    assert!(DiscreteLoop::from_path(open).is_err());
    assert!(DiscreteLoop::new(vec![Group::So3.identity(); 4]).is_ok());
}

#[test]
fn uniform_distance_examples() {
    let g = sample_brownian_path(Group::Torus(1), 16, 3).unwrap();
    assert_eq!(d_uniform(&g, &g).unwrap(), 0.0);
    let h = offset(&g, 0.7);
    // The offset is absent at t = 0 only; the max is still c.
    assert!((d_uniform(&g, &h).unwrap() - 0.7).abs() < 1e-12);
    let other = sample_brownian_path(Group::Torus(1), 16, 4).unwrap();
    assert!(d_uniform(&g, &other).unwrap() >= d_l2(&g, &other).unwrap());
}

#[test]
fn l2_distance_examples() {
    let g = sample_brownian_path(Group::So3, 8, 1).unwrap();
    assert_eq!(d_l2(&g, &g).unwrap(), 0.0);

    // Constant offset on every node, including t = 0 via a rotated frame:
    // compare e·c and e·c' paths that both start at e but differ by c after.
    let base = torus_path(&[0.0, 0.0, 0.0, 0.0]);
    let shifted = torus_path(&[0.0, 0.4, 0.4, 0.4]);
    // weights (1/6, 1/3, 1/3, 1/6) → 0.4² (1/3 + 1/3 + 1/6)
    let expect = (0.16f64 * 5.0 / 6.0).sqrt();
    assert!((d_l2(&base, &shifted).unwrap() - expect).abs() < 1e-15);

    let a = torus_path(&[0.0, 0.0, 0.0]);
    let b = torus_path(&[0.0, 1.0, 2.0]);
    assert!((d_l2(&a, &b).unwrap() - 1.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn l2_constant_offset_uses_unit_mass() {
    // Distances c at every node: the trapezoid weights sum to one.
    let n = 10;
    let w = trapezoid_weights(n);
    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    let c: f64 = 0.9;
    let value = w.iter().map(|w| w * c * c).sum::<f64>().sqrt();
    assert!((value - c).abs() < 1e-15);
}

#[test]
fn cameron_martin_examples() {
    let g = sample_brownian_path(Group::Torus(2), 12, 9).unwrap();
    assert_eq!(d_cm(&g, &g).unwrap(), 0.0);

    let n = 20;
    let c = 1.3;
    let e = DiscretePath::identity(Group::Torus(1), n);
    let linear = DiscretePath::one_parameter(Group::Torus(1), n, &AlgebraElement::new(vec![c]));
    assert!((d_cm(&e, &linear).unwrap() - c).abs() < 1e-12);
}

#[test]
fn grid_mismatch_is_an_error() {
    let a = DiscretePath::identity(Group::Torus(1), 4);
    let b = DiscretePath::identity(Group::Torus(1), 5);
    assert_eq!(d_l2(&a, &b).unwrap_err(), Error::GridMismatch(4, 5));
    assert_eq!(d_uniform(&a, &b).unwrap_err(), Error::GridMismatch(4, 5));
    assert_eq!(d_cm(&a, &b).unwrap_err(), Error::GridMismatch(4, 5));
}

#[test]
fn heisenberg_paths_have_no_l2_distance() {
    let a = sample_brownian_path(Group::Heisenberg(1), 4, 0).unwrap();
    assert!(matches!(d_l2(&a, &a), Err(Error::Unsupported { .. })));
    assert_eq!(d_cm(&a, &a).unwrap(), 0.0);
}

#[test]
fn brownian_is_deterministic() {
    for group in [Group::Torus(3), Group::So3, Group::Heisenberg(2)] {
        let a = sample_brownian_path(group, 1, 42).unwrap();
        let b = sample_brownian_path(group, 1, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.grid(), 1);
        assert!(a.point(0).is_identity());
        assert_ne!(a, sample_brownian_path(group, 1, 43).unwrap());
    }
}

#[test]
fn zero_increments_give_the_constant_path() {
    for group in [Group::Torus(2), Group::So3, Group::Heisenberg(1)] {
        let path = path_from_increments(group, &vec![AlgebraElement::zeros(group.dim()); 7]);
        assert_eq!(path, DiscretePath::identity(group, 7));
    }
}

/// Sample variance about the known mean zero.
fn second_moment(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64
}

#[test]
fn brownian_endpoint_variance_is_one() {
    let n = 16;
    let ends: Vec<f64> = (0..10_000)
        .map(|seed| {
            let path = sample_brownian_path(Group::Torus(1), n, seed).unwrap();
            // Unwrap by summing the small increments.
            path.points()
                .windows(2)
                .map(|w| w[0].between(&w[1]).unwrap().log().coords()[0])
                .sum()
        })
        .collect();
    let var = second_moment(&ends);
    assert!((var - 1.0).abs() <= 0.05, "variance {var}");
}

#[test]
fn loop_endpoints() {
    for seed in 0..20 {
        for group in [Group::Torus(1), Group::Torus(3)] {
            let l = sample_loop(group, 9, seed, LoopMethod::TorusBridge).unwrap();
            assert!(l.point(9).is_identity());
        }
        for group in [Group::Torus(2), Group::So3, Group::Heisenberg(1)] {
            let l = sample_loop(group, 9, seed, LoopMethod::GeodesicCorrection).unwrap();
            assert!(l.point(9).max_coord_diff(&group.identity()) <= 1e-12);
        }
    }
}

#[test]
fn loop_method_names() {
    assert_eq!(
        "torus-bridge".parse::<LoopMethod>().unwrap(),
        LoopMethod::TorusBridge
    );
    assert_eq!(
        "geodesic-correction".parse::<LoopMethod>().unwrap(),
        LoopMethod::GeodesicCorrection
    );
    assert_eq!(
        "pinned".parse::<LoopMethod>().unwrap_err(),
        Error::UnknownMethod("pinned".into())
    );
    assert_eq!(LoopMethod::TorusBridge.to_string(), "torus-bridge");
    assert!(matches!(
        sample_loop(Group::So3, 4, 0, LoopMethod::TorusBridge),
        Err(Error::Unsupported { .. })
    ));
    assert!(sample_loop(Group::Torus(1), 1, 0, LoopMethod::TorusBridge).is_err());
}

#[test]
fn bridge_midpoint_variance() {
    // Brownian bridge at t = 1/2 has variance t (1 - t) = 1/4.
    let mids: Vec<f64> = (0..10_000)
        .map(|seed| {
            let l = sample_loop(Group::Torus(1), 2, seed, LoopMethod::TorusBridge).unwrap();
            l.point(1).log().coords()[0]
        })
        .collect();
    let var = second_moment(&mids);
    assert!((var - 0.25).abs() <= 0.05 * 0.25, "variance {var}");
}

#[test]
fn geodesic_correction_of_identity() {
    for group in [Group::Torus(2), Group::So3, Group::Heisenberg(1)] {
        let l = geodesic_correction(&DiscretePath::identity(group, 5)).unwrap();
        assert_eq!(l.as_path(), &DiscretePath::identity(group, 5));
    }
}

#[test]
fn measure_validation() {
    let a = DiscretePath::identity(Group::Torus(1), 4);
    assert!(EmpiricalMeasure::new(vec![a.clone()], vec![0.5]).is_err());
    assert!(EmpiricalMeasure::new(vec![a.clone(), a.clone()], vec![1.5, -0.5]).is_err());
    assert!(EmpiricalMeasure::new(vec![], vec![]).is_err());
    let b = DiscretePath::identity(Group::Torus(1), 5);
    assert_eq!(
        EmpiricalMeasure::uniform(vec![a.clone(), b]).unwrap_err(),
        Error::GridMismatch(4, 5)
    );
    let m = EmpiricalMeasure::uniform(vec![a.clone(), a.clone(), a]).unwrap();
    assert!(m.is_uniform());
    assert!(m.is_loop_measure());
    assert_eq!(m.len(), 3);
}

#[test]
fn hat_basis_shape_and_inner_product() {
    let basis = CameronMartinVector::hat_basis(Group::So3, 5, true);
    assert_eq!(basis.len(), 4 * 3);
    // Node-major ordering.
    assert_eq!(basis[4].value(2), &AlgebraElement::basis(3, 1));
    // <hat_k, hat_k>_H = N (1 + 1) and neighbours overlap with -N.
    assert_eq!(basis[0].inner(&basis[0]).unwrap(), 10.0);
    assert_eq!(basis[0].inner(&basis[3]).unwrap(), -5.0);
    assert_eq!(basis[0].inner(&basis[1]).unwrap(), 0.0);
    assert!(CameronMartinVector::new(vec![AlgebraElement::basis(1, 0); 3], false).is_err());
    assert!(CameronMartinVector::new(
        vec![
            AlgebraElement::zeros(1),
            AlgebraElement::zeros(1),
            AlgebraElement::basis(1, 0)
        ],
        true
    )
    .is_err());
}

#[test]
fn green_kernel_values() {
    assert_eq!(green_kernel(0.25, 0.5), 0.125);
    assert_eq!(green_kernel(0.5, 0.25), 0.125);
    assert_eq!(green_kernel(0.3, 0.0), 0.0);
    assert_eq!(green_kernel(0.3, 1.0), 0.0);
}

struct HalfSquaredDistance;

impl CylindricalFunction for HalfSquaredDistance {
    fn value(&self, points: &[GroupElement]) -> f64 {
        0.5 * points[0].log().norm_squared()
    }

    fn slot_gradient(&self, points: &[GroupElement], _slot: usize) -> Option<AlgebraElement> {
        Some(points[0].log())
    }
}

fn loop_through(angle: f64, n: usize) -> DiscreteLoop {
    // Tent loop reaching `angle` at t = 1/2.
    let pts = (0..=n)
        .map(|k| {
            let t = k as f64 / n as f64;
            GroupElement::torus(vec![angle * 2.0 * t.min(1.0 - t)]).unwrap()
        })
        .collect();
    DiscreteLoop::new(pts).unwrap()
}

#[test]
fn cylindrical_chain_rule() {
    let n = 8;
    let ell = loop_through(0.3, n);
    let analytic = cylindrical_gradient(&HalfSquaredDistance, &[0.5], &ell).unwrap();
    let fd_fn = FnCylindrical(|p: &[GroupElement]| 0.5 * p[0].log().norm_squared());
    let numeric = cylindrical_gradient(&fd_fn, &[0.5], &ell).unwrap();
    assert!(analytic.is_loop());
    for k in 0..=n {
        let expect = 0.3 * green_kernel(0.5, k as f64 / n as f64);
        assert!((analytic.value(k).coords()[0] - expect).abs() < 1e-15);
        assert!((numeric.value(k).coords()[0] - expect).abs() < 1e-9);
    }
    assert!(analytic.value(0).is_zero() && analytic.value(n).is_zero());
}

#[test]
fn cylindrical_constant_function() {
    let ell = sample_loop(Group::So3, 6, 2, LoopMethod::GeodesicCorrection).unwrap();
    let f = FnCylindrical(|_: &[GroupElement]| 4.0);
    let grad = cylindrical_gradient(&f, &[1.0 / 3.0, 0.5], &ell).unwrap();
    assert!(grad.values().iter().all(|v| v.is_zero()));
}

#[test]
fn cylindrical_rejects_off_grid_times() {
    let ell = loop_through(0.2, 8);
    let err = cylindrical_gradient(&HalfSquaredDistance, &[0.3], &ell).unwrap_err();
    assert!(matches!(err, Error::InvalidArgument(_)));
    assert!(cylindrical_gradient(&HalfSquaredDistance, &[0.5, 0.25], &ell).is_err());
    assert!(cylindrical_gradient(&HalfSquaredDistance, &[1.5], &ell).is_err());
}

#[test]
fn green_kernel_represents_point_evaluation() {
    // <G(θ, ·) X, h>_H = <X, h(θ)> for loop directions h.
    let n = 10;
    let ell = sample_loop(Group::Torus(2), n, 5, LoopMethod::TorusBridge).unwrap();
    let f = FnCylindrical(|p: &[GroupElement]| {
        p[0].log().coords()[0].sin() + 2.0 * p[1].log().coords()[1]
    });
    let thetas = [0.3, 0.7];
    let grad = cylindrical_gradient(&f, &thetas, &ell).unwrap();
    let h = CameronMartinVector::hat(2, n, 3, 0, true)
        .add_scaled(-0.5, &CameronMartinVector::hat(2, n, 7, 1, true))
        .unwrap();
    let lhs = grad.inner(&h).unwrap();
    // Directional derivative of F along h by central differences.
    let eps = 1e-6;
    let at = |s: f64| {
        let moved = ell.perturb(&h, s).unwrap();
        f.value(&[moved.point(3).clone(), moved.point(7).clone()])
    };
    let rhs = (at(eps) - at(-eps)) / (2.0 * eps);
    assert!((lhs - rhs).abs() < 1e-6, "{lhs} vs {rhs}");
}

fn arb_group() -> impl Strategy<Value = Group> {
    prop_oneof![(1usize..4).prop_map(Group::Torus), Just(Group::So3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_chain(group in arb_group(), n in 1usize..200, pieces in 1usize..6, step in 0.0f64..3.0, seed in any::<u64>()) {
        let mut sampler = BrownianSampler::new(group, n, seed).unwrap();
        let a = sampler.next_piecewise_geodesic(pieces, step).unwrap();
        let b = sampler.next_piecewise_geodesic(pieces, step).unwrap();
        let l2 = d_l2(&a, &b).unwrap();
        let uni = d_uniform(&a, &b).unwrap();
        let cm = d_cm(&a, &b).unwrap();
        prop_assert!(l2 <= uni + 1e-9);
        prop_assert!(uni <= cm + 1e-9);
        prop_assert!(l2 <= group.diameter().unwrap() + 1e-9);
    }

    #[test]
    fn distances_are_metrics(group in arb_group(), n in 1usize..40, seed in any::<u64>()) {
        let mut sampler = BrownianSampler::new(group, n, seed).unwrap();
        let (a, b, c) = (sampler.next_path(), sampler.next_path(), sampler.next_path());
        for d in [d_uniform, d_l2, d_cm] {
            prop_assert_eq!(d(&a, &a).unwrap(), 0.0);
            prop_assert_eq!(d(&a, &b).unwrap(), d(&b, &a).unwrap());
            prop_assert!(d(&a, &c).unwrap() <= d(&a, &b).unwrap() + d(&b, &c).unwrap() + 1e-9);
        }
    }

    #[test]
    fn cameron_martin_is_left_invariant(group in arb_group(), n in 1usize..40, seed in any::<u64>()) {
        let mut sampler = BrownianSampler::new(group, n, seed).unwrap();
        let a = sampler.next_piecewise_geodesic(3, 1.0).unwrap();
        let b = sampler.next_piecewise_geodesic(3, 1.0).unwrap();
        let ell = sampler.next_path();
        let la = ell.pointwise_mul(&a).unwrap();
        let lb = ell.pointwise_mul(&b).unwrap();
        prop_assert!((d_cm(&a, &b).unwrap() - d_cm(&la, &lb).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn cylindrical_gradient_vanishes_at_ends(n in 2usize..30, seed in any::<u64>(), k in 0usize..30) {
        let ell = sample_loop(Group::So3, n, seed, LoopMethod::GeodesicCorrection).unwrap();
        let theta = (k % (n + 1)) as f64 / n as f64;
        let f = FnCylindrical(|p: &[GroupElement]| p[0].log().coords().iter().map(|x| x.cos()).sum());
        let grad = cylindrical_gradient(&f, &[theta], &ell).unwrap();
        prop_assert!(grad.value(0).is_zero());
        prop_assert!(grad.value(n).is_zero());
    }

    #[test]
    fn torus_bridge_is_a_loop(d in 1usize..4, n in 2usize..50, seed in any::<u64>()) {
        let l = sample_loop(Group::Torus(d), n, seed, LoopMethod::TorusBridge).unwrap();
        prop_assert!(l.point(n).is_identity());
        prop_assert!(l.point(0).is_identity());
        let wrapped = l.points().iter().all(|p| p.to_coords().iter().all(|a| (-PI..PI).contains(a)));
        prop_assert!(wrapped);
    }
}
