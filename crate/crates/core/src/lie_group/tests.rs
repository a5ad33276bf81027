use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{Matrix3, Vector3};
use proptest::prelude::*;

use super::*;

fn torus1(a: f64) -> GroupElement {
    GroupElement::torus(vec![a]).unwrap()
}

fn rot_z(theta: f64) -> GroupElement {
    Group::So3.exp(&AlgebraElement::new(vec![0.0, 0.0, theta]))
}

#[test]
fn torus_mul_wraps_to_antipode() {
    let g = torus1(FRAC_PI_2).mul(&torus1(FRAC_PI_2)).unwrap();
    // π is represented by -π in [-π, π).
    assert_eq!(g, GroupElement::Torus(vec![-PI]));
    assert_eq!(g.log().coords(), &[PI]);
}

#[test]
fn mismatched_tags_are_rejected() {
    let err = torus1(0.1).mul(&Group::So3.identity()).unwrap_err();
    assert!(matches!(err, Error::GroupMismatch { .. }));
    let err = Group::Torus(2)
        .identity()
        .distance(&Group::Torus(3).identity())
        .unwrap_err();
    assert!(matches!(err, Error::GroupMismatch { .. }));
}

#[test]
fn inverses() {
    let g = GroupElement::torus(vec![0.4, -2.0]).unwrap();
    assert_eq!(g.inv(), GroupElement::torus(vec![-0.4, 2.0]).unwrap());
    assert!(
        g.mul(&g.inv())
            .unwrap()
            .max_coord_diff(&Group::Torus(2).identity())
            <= 1e-12
    );

    let r = Group::So3.exp(&AlgebraElement::new(vec![0.3, -1.1, 0.7]));
    if let GroupElement::So3(m) = &r {
        assert_eq!(r.inv(), GroupElement::So3(m.transpose()));
    }
    assert!(
        r.mul(&r.inv())
            .unwrap()
            .max_coord_diff(&Group::So3.identity())
            <= 1e-12
    );

    let h = GroupElement::heisenberg(vec![1.0, -0.5], vec![0.25, 2.0], 3.0).unwrap();
    assert!(
        h.mul(&h.inv())
            .unwrap()
            .max_coord_diff(&Group::Heisenberg(2).identity())
            <= 1e-12
    );
    assert_eq!(
        Group::Torus(3).identity(),
        GroupElement::Torus(vec![0.0; 3])
    );
}

#[test]
fn heisenberg_group_law_sign() {
    // [1, 0] · [i, 0]: t = 2 Im(1 · conj(i)) = 2 Im(-i) = -2.
    let a = GroupElement::heisenberg(vec![1.0], vec![0.0], 0.0).unwrap();
    let b = GroupElement::heisenberg(vec![0.0], vec![1.0], 0.0).unwrap();
    let ab = a.mul(&b).unwrap();
    assert_eq!(
        ab,
        GroupElement::heisenberg(vec![1.0], vec![1.0], -2.0).unwrap()
    );
    let ba = b.mul(&a).unwrap();
    assert_eq!(
        ba,
        GroupElement::heisenberg(vec![1.0], vec![1.0], 2.0).unwrap()
    );
}

#[test]
fn heisenberg_has_no_distance() {
    let h = Group::Heisenberg(1).identity();
    assert!(matches!(h.distance(&h), Err(Error::Unsupported { .. })));
}

#[test]
fn exp_examples() {
    assert_eq!(
        Group::Torus(1).exp(&AlgebraElement::new(vec![FRAC_PI_2])),
        torus1(FRAC_PI_2)
    );
    for group in [Group::Torus(2), Group::So3, Group::Heisenberg(2)] {
        assert_eq!(
            group.exp(&AlgebraElement::zeros(group.dim())),
            group.identity()
        );
    }
}

#[test]
fn log_examples() {
    assert_eq!(torus1(PI).log().coords(), &[PI]);
    let w = rot_z(0.3).log();
    assert!(w.max_abs_diff(&AlgebraElement::new(vec![0.0, 0.0, 0.3])) < 1e-14);
    for group in [Group::Torus(2), Group::So3] {
        assert!(group.identity().log().is_zero());
    }
}

#[test]
fn distance_examples() {
    let zero = torus1(0.0);
    assert!((zero.distance(&torus1(FRAC_PI_2)).unwrap() - FRAC_PI_2).abs() < 1e-15);
    assert!((zero.distance(&torus1(PI)).unwrap() - PI).abs() < 1e-15);
    for theta in [0.1, 1.0, 2.5, 3.1] {
        let axis = Vector3::new(1.0, -2.0, 0.5).normalize() * theta;
        let r = Group::So3.exp(&AlgebraElement::new(axis.as_slice().to_vec()));
        let d = Group::So3.identity().distance(&r).unwrap();
        assert!((d - theta).abs() < 1e-12, "{d} vs {theta}");
    }
}

#[test]
fn adjoint_examples() {
    let x = AlgebraElement::new(vec![0.3, -0.7]);
    let g = GroupElement::torus(vec![1.0, 2.0]).unwrap();
    assert_eq!(g.adjoint(&x), x);

    let metric = Group::So3.metric();
    let e = |i| AlgebraElement::basis(3, i);
    assert_eq!(metric.ad(&e(0), &e(1)), e(2));
    let y = AlgebraElement::new(vec![0.2, 0.5, -1.0]);
    assert!(metric.ad(&y, &y).is_zero());

    // Ad_R X as matrix conjugation R X̂ Rᵀ.
    let r = Group::So3.exp(&AlgebraElement::new(vec![0.4, 0.1, -0.9]));
    let GroupElement::So3(m) = &r else {
        unreachable!()
    };
    let conj = m * so3::hat(&Vector3::from_column_slice(y.coords())) * m.transpose();
    let expected = AlgebraElement::new(so3::vee(&conj).as_slice().to_vec());
    assert!(r.adjoint(&y).max_abs_diff(&expected) < 1e-14);
}

#[test]
fn adjoint_is_derivative_of_conjugation() {
    let h = 1e-6;
    let cases = [
        (
            Group::So3.exp(&AlgebraElement::new(vec![0.4, 0.1, -0.9])),
            AlgebraElement::new(vec![0.2, 0.5, -1.0]),
        ),
        (
            GroupElement::heisenberg(vec![0.3, -1.0], vec![0.7, 0.2], 0.5).unwrap(),
            AlgebraElement::new(vec![0.1, 0.4, -0.3, 0.2, 0.9]),
        ),
    ];
    for (g, x) in cases {
        let group = g.group();
        let conj = |t: f64| {
            g.mul(&group.exp(&x.scale(t)))
                .unwrap()
                .mul(&g.inv())
                .unwrap()
                .log()
        };
        let fd = (conj(h) - conj(-h)).scale(0.5 / h);
        assert!(fd.max_abs_diff(&g.adjoint(&x)) < 1e-8, "{group}");
    }
}

#[test]
fn bracket_matches_matrix_commutator() {
    let x = Vector3::new(0.3, -1.2, 0.5);
    let y = Vector3::new(-0.4, 0.9, 2.0);
    let (xh, yh) = (so3::hat(&x), so3::hat(&y));
    let comm = so3::vee(&(xh * yh - yh * xh));
    let metric = Group::So3.metric();
    let ad = metric.ad(
        &AlgebraElement::new(x.as_slice().to_vec()),
        &AlgebraElement::new(y.as_slice().to_vec()),
    );
    assert!(ad.max_abs_diff(&AlgebraElement::new(comm.as_slice().to_vec())) < 1e-15);
}

#[test]
fn heisenberg_bracket_matches_group_commutator() {
    // For small X, Y: exp(sX) exp(sY) exp(-sX) exp(-sY) = exp(s²[X, Y]) exactly
    // for a two-step nilpotent group.
    let group = Group::Heisenberg(2);
    let x = AlgebraElement::new(vec![0.3, -1.0, 0.7, 0.2, 0.1]);
    let y = AlgebraElement::new(vec![-0.5, 0.4, 0.2, 1.1, -0.3]);
    let s: f64 = 0.01;
    let g = group.exp(&x.scale(s));
    let h = group.exp(&y.scale(s));
    let comm = g
        .mul(&h)
        .unwrap()
        .mul(&g.inv())
        .unwrap()
        .mul(&h.inv())
        .unwrap();
    let expected = group.bracket(&x, &y).scale(s * s);
    assert!(comm.log().max_abs_diff(&expected) < 1e-15);
}

#[test]
fn metric_flags() {
    assert!(Group::Torus(3).metric().is_ad_invariant());
    assert!(Group::So3.metric().is_ad_invariant());
    assert!(!Group::Heisenberg(1).metric().is_ad_invariant());
}

#[test]
fn structure_constants_are_antisymmetric() {
    for group in [Group::Torus(2), Group::So3, Group::Heisenberg(2)] {
        let m = group.metric();
        let d = m.dim();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    assert_eq!(
                        m.structure_constant(i, j, k),
                        -m.structure_constant(j, i, k)
                    );
                    if m.is_ad_invariant() {
                        assert_eq!(
                            m.structure_constant(i, j, k),
                            -m.structure_constant(i, k, j)
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn levi_civita_examples() {
    let so3 = Group::So3.metric();
    let e = |i| AlgebraElement::basis(3, i);
    assert_eq!(so3.levi_civita(&e(0), &e(1)), e(2).scale(0.5));
    let a = AlgebraElement::new(vec![0.3, -0.2, 1.5]);
    assert!(so3.levi_civita(&a, &a).norm() < 1e-15);
    let b = AlgebraElement::new(vec![-1.0, 0.4, 0.25]);
    assert!(
        so3.levi_civita(&a, &b)
            .max_abs_diff(&so3.ad(&a, &b).scale(0.5))
            < 1e-15
    );

    let torus = Group::Torus(3).metric();
    assert!(torus.levi_civita(&a, &b).is_zero());
}

#[test]
fn christoffel_matches_connection_on_basis() {
    for group in [
        Group::Torus(2),
        Group::So3,
        Group::Heisenberg(1),
        Group::Heisenberg(2),
    ] {
        let m = group.metric();
        let d = m.dim();
        for i in 0..d {
            for j in 0..d {
                let nabla =
                    m.levi_civita(&AlgebraElement::basis(d, i), &AlgebraElement::basis(d, j));
                for k in 0..d {
                    assert_eq!(
                        m.christoffel(i, j, k),
                        nabla.coords()[k],
                        "{group} ({i},{j},{k})"
                    );
                }
            }
        }
    }
}

#[test]
fn levi_civita_is_metric_and_torsion_free() {
    // For left-invariant fields: <∇_A B, C> + <B, ∇_A C> = 0 and
    // ∇_A B - ∇_B A = [A, B].
    let m = Group::Heisenberg(2).metric();
    let a = AlgebraElement::new(vec![0.3, -1.0, 0.7, 0.2, 0.1]);
    let b = AlgebraElement::new(vec![-0.5, 0.4, 0.2, 1.1, -0.3]);
    let c = AlgebraElement::new(vec![0.9, 0.1, -0.6, 0.3, 0.8]);
    let compat = m.levi_civita(&a, &b).dot(&c) + b.dot(&m.levi_civita(&a, &c));
    assert!(compat.abs() < 1e-14);
    let torsion = m.levi_civita(&a, &b) - m.levi_civita(&b, &a) - m.ad(&a, &b);
    assert!(torsion.norm() < 1e-14);
}

#[test]
fn geodesic_ode_examples() {
    let start = Group::So3.exp(&AlgebraElement::new(vec![0.2, 0.3, -0.1]));
    let path = integrate_geodesic(&start, &AlgebraElement::zeros(3), 10).unwrap();
    assert!(path.iter().all(|p| *p == start));

    let x0 = AlgebraElement::basis(3, 0).scale(0.5);
    let path = integrate_geodesic(&start, &x0, 1000).unwrap();
    let expected = start.retract(&x0);
    assert!(path[1000].max_coord_diff(&expected) < 1e-6);

    let t0 = GroupElement::torus(vec![0.1, -0.2]).unwrap();
    let v = AlgebraElement::new(vec![0.8, -0.4]);
    let path = integrate_geodesic(&t0, &v, 4).unwrap();
    for (k, p) in path.iter().enumerate() {
        let t = k as f64 / 4.0;
        let expected = GroupElement::torus(vec![0.1 + 0.8 * t, -0.2 - 0.4 * t]).unwrap();
        assert!(p.max_coord_diff(&expected) < 1e-15);
    }
    assert!(integrate_geodesic(&t0, &v, 0).is_err());
}

#[test]
fn heisenberg_riemannian_geodesic_conserves_energy() {
    let start = Group::Heisenberg(1).identity();
    let x0 = AlgebraElement::new(vec![0.7, -0.4, 0.9]);
    let coarse = integrate_geodesic(&start, &x0, 50).unwrap();
    let fine = integrate_geodesic(&start, &x0, 400).unwrap();
    // Fourth order: 8x finer steps shrink the error by roughly 4000.
    assert!(coarse[50].max_coord_diff(&fine[400]) < 1e-6);
    // Speed is constant along a Riemannian geodesic.
    let n = fine.len() - 1;
    let speed = |k: usize| fine[k].between(&fine[k + 1]).unwrap().log().norm() * n as f64;
    let (s0, s1) = (speed(0), speed(n - 1));
    assert!((s0 - s1).abs() < 1e-6, "{s0} {s1}");
}

#[test]
fn geodesic_point_examples() {
    let g = torus1(0.0);
    let h = torus1(FRAC_PI_2);
    assert_eq!(g.geodesic_point(&h, 0.0).unwrap(), g);
    assert!(g.geodesic_point(&h, 1.0).unwrap().max_coord_diff(&h) < 1e-15);
    assert!(
        g.geodesic_point(&h, 0.5)
            .unwrap()
            .max_coord_diff(&torus1(FRAC_PI_4))
            < 1e-15
    );

    let id = Group::So3.identity();
    let r1 = rot_z(1.0);
    let mid = id.geodesic_point(&r1, 0.5).unwrap();
    assert!(mid.max_coord_diff(&rot_z(0.5)) < 1e-14);
    assert!((id.distance(&mid).unwrap() - 0.5).abs() < 1e-14);
    assert!((mid.distance(&r1).unwrap() - 0.5).abs() < 1e-14);
}

#[test]
fn heisenberg_curve_examples() {
    let p = HeisenbergGeodesicParams::new(vec![0.6], vec![0.8], 0.0, 3.0).unwrap();
    assert_eq!(
        heisenberg_geodesic(&p, 1.0),
        GroupElement::heisenberg(vec![0.6], vec![0.8], 0.0).unwrap()
    );

    for t in [0.1, 1.0, 4.0, -2.0] {
        let p = HeisenbergGeodesicParams::to_vertical(vec![0.6, 0.0], vec![0.0, -0.8], t).unwrap();
        assert_eq!(
            heisenberg_geodesic(&p, 0.0),
            Group::Heisenberg(2).identity()
        );
        let end = heisenberg_geodesic(&p, p.r());
        let target = GroupElement::heisenberg(vec![0.0; 2], vec![0.0; 2], t).unwrap();
        assert!(end.max_coord_diff(&target) < 1e-10, "t={t}: {end:?}");
        assert!((p.r() - (PI * t.abs()).sqrt()).abs() < 1e-15);
    }
}

#[test]
fn heisenberg_curves_are_horizontal_with_unit_speed() {
    let p = HeisenbergGeodesicParams::new(vec![0.5, -0.5], vec![0.5, 0.5], 2.0 * PI, 1.7).unwrap();
    for k in 0..=20 {
        let s = p.r() * k as f64 / 20.0;
        assert!((heisenberg_horizontal_speed(&p, s) - 1.0).abs() < 1e-12);
        let body = heisenberg_body_velocity(&p, s);
        assert!(
            body.coords()[4].abs() < 1e-12,
            "vertical body velocity {}",
            body.coords()[4]
        );
    }
}

#[test]
fn rejects_invalid_elements() {
    assert!(GroupElement::torus(vec![]).is_err());
    assert!(GroupElement::torus(vec![f64::NAN]).is_err());
    assert!(GroupElement::so3(Matrix3::zeros()).is_err());
    assert!(GroupElement::heisenberg(vec![1.0], vec![], 0.0).is_err());
    assert!(Group::So3.element_from_coords(&[1.0; 4]).is_err());
}

fn algebra_strategy(dim: usize, radius: f64) -> impl Strategy<Value = AlgebraElement> {
    prop::collection::vec(-radius..radius, dim).prop_map(AlgebraElement::new)
}

fn element_strategy() -> impl Strategy<Value = GroupElement> {
    prop_oneof![
        prop::collection::vec(-10.0..10.0_f64, 1..4).prop_map(|a| GroupElement::torus(a).unwrap()),
        algebra_strategy(3, 4.0).prop_map(|x| Group::So3.exp(&x)),
    ]
}

fn same_group_triple() -> impl Strategy<Value = (GroupElement, GroupElement, GroupElement)> {
    prop_oneof![
        (1usize..4).prop_flat_map(|d| {
            let angles = prop::collection::vec(-PI..PI, d);
            (angles.clone(), angles.clone(), angles).prop_map(|(a, b, c)| {
                (
                    GroupElement::torus(a).unwrap(),
                    GroupElement::torus(b).unwrap(),
                    GroupElement::torus(c).unwrap(),
                )
            })
        }),
        (
            algebra_strategy(3, 3.1),
            algebra_strategy(3, 3.1),
            algebra_strategy(3, 3.1)
        )
            .prop_map(|(a, b, c)| (
                Group::So3.exp(&a),
                Group::So3.exp(&b),
                Group::So3.exp(&c)
            )),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn exp_log_roundtrip_inside_injectivity_radius(
        x in prop_oneof![
            prop::collection::vec(-3.1..3.1_f64, 1..4).prop_map(|c| (Group::Torus(c.len()), AlgebraElement::new(c))),
            algebra_strategy(3, 1.8).prop_filter("|X| < π", |x| x.norm() < 3.1).prop_map(|x| (Group::So3, x)),
        ]
    ) {
        let (group, x) = x;
        let back = group.exp(&x).log();
        prop_assert!(back.max_abs_diff(&x) < 1e-9, "{:?} -> {:?}", x, back);
    }

    #[test]
    fn log_is_minimizing(g in element_strategy()) {
        let group = g.group();
        let x = g.log();
        prop_assert!(group.exp(&x).max_coord_diff(&g) < 1e-10);
        let d = group.identity().distance(&g).unwrap();
        prop_assert!((x.norm() - d).abs() < 1e-10);
        prop_assert!(d <= group.diameter().unwrap() + 1e-12);
    }

    #[test]
    fn distance_is_a_metric((a, b, c) in same_group_triple()) {
        let ab = a.distance(&b).unwrap();
        let ba = b.distance(&a).unwrap();
        let bc = b.distance(&c).unwrap();
        let ac = a.distance(&c).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ac <= ab + bc + 1e-9);
        prop_assert!(a.distance(&a).unwrap() <= 1e-10);
    }

    #[test]
    fn distance_is_left_invariant((a, b, l) in same_group_triple()) {
        let d = a.distance(&b).unwrap();
        let dl = l.mul(&a).unwrap().distance(&l.mul(&b).unwrap()).unwrap();
        prop_assert!((d - dl).abs() < 1e-10);
    }

    #[test]
    fn ad_invariant_inner_product(
        g in algebra_strategy(3, 3.0),
        x in algebra_strategy(3, 2.0),
        y in algebra_strategy(3, 2.0),
    ) {
        let r = Group::So3.exp(&g);
        let lhs = r.adjoint(&x).dot(&r.adjoint(&y));
        prop_assert!((lhs - x.dot(&y)).abs() < 1e-10);
    }

    #[test]
    fn geodesic_point_splits_distance((a, b, _) in same_group_triple(), lambda in 0.0..1.0_f64) {
        let d = a.distance(&b).unwrap();
        let p = a.geodesic_point(&b, lambda).unwrap();
        prop_assert!((a.distance(&p).unwrap() - lambda * d).abs() < 1e-9);
    }
}
