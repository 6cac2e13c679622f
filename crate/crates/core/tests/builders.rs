use std::f64::consts::PI;

use hypball::*;
use proptest::prelude::*;

fn interior_curvatures(mesh: &TriMesh) -> Vec<(usize, f64)> {
    let defects = mesh.angle_defects();
    let areas = mesh.dual_areas();
    defects
        .iter()
        .enumerate()
        .filter_map(|(v, d)| d.map(|d| (v, d / areas[v])))
        .collect()
}

#[test]
fn hyperbolic_disk_has_curvature_minus_one() {
    let mesh = build(&BuildSpec::HyperbolicDisk { radius: 2.0, h: 0.05 }).unwrap();
    let k = interior_curvatures(&mesh);
    assert!(!k.is_empty());
    for &(v, c) in &k {
        assert!((-1.15..=-0.85).contains(&c), "vertex {v}: curvature {c}");
    }
    let total: f64 = mesh.angle_defects().iter().flatten().sum();
    let expected = -2.0 * PI * (2.0f64.cosh() - 1.0);
    assert!((total / expected - 1.0).abs() < 0.05, "total defect {total} vs {expected}");
    assert!(mesh.max_edge_length() <= 0.05 + 1e-12);
    assert_eq!(mesh.euler_characteristic(), 1);
}

#[test]
fn hyperbolic_builders_have_curvature_minus_one() {
    for spec in [
        BuildSpec::Funnel {
            boundary_length: 1.0,
            t_max: 2.0,
            h: 0.05,
        },
        BuildSpec::Cusp {
            boundary_length: 1.0,
            t_max: 2.0,
            h: 0.05,
        },
        BuildSpec::Ypiece {
            lengths: [1.0, 2.0, 3.0],
            h: 0.05,
        },
    ] {
        let mesh = build(&spec).unwrap();
        let k = interior_curvatures(&mesh);
        let (lo, hi) = k
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, c)| (lo.min(c), hi.max(c)));
        assert!(lo >= -1.15 && hi <= -0.85, "{spec:?}: curvature in [{lo}, {hi}]");
    }
}

#[test]
fn flat_cylinder_is_flat() {
    let mesh = build(&BuildSpec::FlatCylinder {
        circumference: 2.0,
        height: 3.0,
        h: 0.1,
    })
    .unwrap();
    for d in mesh.angle_defects().into_iter().flatten() {
        assert!(d.abs() < 1e-9, "defect {d}");
    }
    assert_eq!(mesh.euler_characteristic(), 0);
    assert_eq!(mesh.boundary_loops().len(), 2);
    assert!((mesh.total_area() - 6.0).abs() < 0.05);
}

#[test]
fn funnel_and_cusp_are_annuli() {
    for spec in [
        BuildSpec::Funnel {
            boundary_length: 1.0,
            t_max: 2.0,
            h: 0.15,
        },
        BuildSpec::Cusp {
            boundary_length: 1.0,
            t_max: 2.0,
            h: 0.15,
        },
    ] {
        let mesh = build(&spec).unwrap();
        assert_eq!(mesh.euler_characteristic(), 0, "{spec:?}");
        assert_eq!(mesh.boundary_loops().len(), 2, "{spec:?}");
        assert!(mesh.max_edge_length() <= 0.15 + 1e-12);
    }
}

#[test]
fn ypiece_area_and_cuffs() {
    let mesh = build(&BuildSpec::Ypiece {
        lengths: [2.0, 3.0, 4.0],
        h: 0.2,
    })
    .unwrap();
    assert_eq!(mesh.euler_characteristic(), -1);
    let loops = mesh.boundary_loops();
    assert_eq!(loops.len(), 3);
    // flat triangles with geodesic side lengths; area 2π up to the flattening error
    let area = mesh.total_area();
    assert!((area / (2.0 * PI) - 1.0).abs() < 0.01, "area {area}");
    let mut lengths: Vec<f64> = loops
        .iter()
        .map(|lp| (0..lp.len()).map(|i| mesh.edge_length(lp[i], lp[(i + 1) % lp.len()]).unwrap()).sum())
        .collect();
    lengths.sort_by(f64::total_cmp);
    for (got, want) in lengths.iter().zip([2.0, 3.0, 4.0]) {
        assert!(*got <= want + 1e-9 && *got > 0.99 * want, "cuff {got} vs {want}");
    }
}

#[test]
fn skewed_ypiece_builds() {
    // long thin hexagon whose corners lie far from the walk origin
    let mesh = build(&BuildSpec::Ypiece {
        lengths: [2.2275114442768915, 0.20685456987536655, 5.5964194343489275],
        h: 0.0725887736885773,
    })
    .unwrap();
    assert_eq!(mesh.euler_characteristic(), -1);
    assert_eq!(mesh.boundary_loops().len(), 3);
}

#[test]
fn pants_tree_topology() {
    let depth = 3;
    let mesh = build(&BuildSpec::PantsTree { depth, l: 1.0, h: 0.3 }).unwrap();
    let pieces = (1usize << (depth + 1)) - 1;
    assert_eq!(pieces, 15);
    let loops = mesh.boundary_loops().len() as i64;
    assert_eq!(loops, pieces as i64 + 2);
    // genus zero: chi = 2 - b
    assert_eq!(mesh.euler_characteristic(), 2 - loops);
    assert_eq!(mesh.first_betti(), 1 << (depth + 1));
    for child in 1..pieces {
        assert!(mesh.label(&format!("glue{child}")).is_some());
    }
}

fn loop_length(mesh: &TriMesh, lp: &[usize]) -> f64 {
    (0..lp.len())
        .map(|i| mesh.edge_length(lp[i], lp[(i + 1) % lp.len()]).unwrap())
        .sum()
}

#[test]
fn surrounding_curve_of_one_hole() {
    let mesh = build(&BuildSpec::DiskMinusDisks {
        radius: 2.5,
        holes: vec![Hole {
            r: 0.5,
            theta: 0.0,
            radius: 0.8,
        }],
        remove: true,
        h: 0.05,
    })
    .unwrap();
    let curve = mark_surrounding_curve(&mesh, "hole0", None).unwrap();
    let boundary = loop_length(&mesh, mesh.label("hole0").unwrap());
    assert!(curve.separated);
    assert!((loop_length(&mesh, &curve.vertices) - curve.length).abs() < 1e-9);
    assert!(
        curve.length >= boundary && curve.length <= 1.2 * boundary,
        "length {} vs hole boundary {boundary}",
        curve.length
    );
}

#[test]
fn surrounding_curves_of_two_holes() {
    let mesh = build(&BuildSpec::DiskMinusDisks {
        radius: 2.0,
        holes: vec![
            Hole {
                r: 1.0,
                theta: 0.0,
                radius: 0.3,
            },
            Hole {
                r: 1.0,
                theta: PI,
                radius: 0.3,
            },
        ],
        remove: true,
        h: 0.1,
    })
    .unwrap();
    let other = |label: &str| if label == "hole0" { "hole1" } else { "hole0" };
    for label in ["hole0", "hole1"] {
        let curve = mark_surrounding_curve(&mesh, label, None).unwrap();
        assert!(curve.separated, "{label}");
        let far = mesh.label(other(label)).unwrap();
        assert!(far.iter().all(|v| !curve.vertices.contains(v)));
    }
    assert!(mark_surrounding_curve(&mesh, "hole7", None).is_err());
}

#[test]
fn puncture_gives_its_one_ring() {
    let mesh = build(&BuildSpec::DiskMinusDisks {
        radius: 2.0,
        holes: vec![Hole {
            r: 1.2,
            theta: PI / 2.0,
            radius: 0.0,
        }],
        remove: false,
        h: 0.1,
    })
    .unwrap();
    let puncture = mesh.label("hole0").unwrap();
    assert_eq!(puncture.len(), 1);
    let curve = mark_surrounding_curve(&mesh, "hole0", None).unwrap();
    assert_eq!(curve.vertices, mesh.link(puncture[0]).unwrap().ring);
    assert!(curve.separated);
}

#[test]
fn invalid_specs_are_rejected() {
    let bad = [
        BuildSpec::HyperbolicDisk { radius: 1.0, h: 0.0 },
        BuildSpec::HyperbolicDisk { radius: -1.0, h: 0.1 },
        BuildSpec::FlatCylinder {
            circumference: 1.0,
            height: f64::NAN,
            h: 0.1,
        },
        BuildSpec::Ypiece {
            lengths: [1.0, 0.0, 1.0],
            h: 0.1,
        },
        BuildSpec::DiskMinusDisks {
            radius: 1.0,
            holes: vec![Hole {
                r: 0.9,
                theta: 0.0,
                radius: 0.2,
            }],
            remove: true,
            h: 0.1,
        },
        BuildSpec::DiskMinusDisks {
            radius: 2.0,
            holes: vec![
                Hole {
                    r: 0.5,
                    theta: 0.0,
                    radius: 0.3,
                },
                Hole {
                    r: 0.5,
                    theta: 0.1,
                    radius: 0.3,
                },
            ],
            remove: true,
            h: 0.1,
        },
    ];
    for spec in bad {
        assert!(build(&spec).is_err(), "{spec:?} should fail");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn edges_respect_resolution(radius in 0.5f64..2.0, h in 0.08f64..0.3) {
        let mesh = build(&BuildSpec::HyperbolicDisk { radius, h }).unwrap();
        prop_assert!(mesh.max_edge_length() <= h * (1.0 + 1e-12));
        prop_assert_eq!(mesh.euler_characteristic(), 1);
        prop_assert_eq!(mesh.boundary_loops().len(), 1);
    }

    #[test]
    fn ypiece_is_a_pair_of_pants(a in 0.5f64..4.0, b in 0.5f64..4.0, c in 0.5f64..4.0) {
        let mesh = build(&BuildSpec::Ypiece { lengths: [a, b, c], h: 0.3 }).unwrap();
        prop_assert_eq!(mesh.euler_characteristic(), -1);
        prop_assert_eq!(mesh.boundary_loops().len(), 3);
        prop_assert!(mesh.max_edge_length() <= 0.3 * (1.0 + 1e-12));
        for d in mesh.angle_defects().into_iter().flatten() {
            prop_assert!(d < 0.0, "positive defect {}", d);
        }
    }
}
