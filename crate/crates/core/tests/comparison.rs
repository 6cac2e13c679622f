use std::f64::consts::PI;

use hypball::{
    classify_surface, collar_width, comparison_area, comparison_boundary_length, disk_distance,
    eps0, eps0_target, f_c, round_annulus_modulus, topology_bound, ComparisonParams, Complex64,
    SurfaceClassSpec,
};
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn closed_form_values() {
    assert!(close(comparison_boundary_length(1.0, 1.0).unwrap(), 7.38401, 1e-5));
    assert!(close(comparison_area(1.0, 1.0).unwrap(), 3.4123, 1e-4));
    assert_eq!(comparison_boundary_length(1.0, 0.0).unwrap(), 0.0);
    assert_eq!(comparison_area(1.0, 0.0).unwrap(), 0.0);
    // curvature −4 halves the scale
    let l2 = comparison_boundary_length(2.0, 0.5).unwrap();
    assert!(close(l2, PI * 1f64.sinh(), 1e-12));
}

#[test]
fn topology_bound_examples() {
    let p = ComparisonParams::new(1.0, 1.0, 1.0).unwrap();
    assert!(topology_bound(&p, comparison_boundary_length(1.0, 2.0).unwrap()).unwrap().abs() < 1e-14);
    assert!(close(topology_bound(&p, 0.0).unwrap(), 3.0862, 1e-4));
    let b: Vec<f64> = [0.0, 1.0, 5.0, 20.0].iter().map(|&l| topology_bound(&p, l).unwrap()).collect();
    assert!(b.windows(2).all(|w| w[1] < w[0]));
    assert!(ComparisonParams::new(1.0, 0.0, 1.0).is_err());
}

#[test]
fn collar_examples() {
    assert!(close(collar_width(2.0).unwrap(), 0.77193, 1e-5));
    assert!(collar_width(0.1).unwrap() > collar_width(1.0).unwrap());
    assert!(collar_width(80.0).unwrap() < 1e-12);
    assert!(collar_width(0.0).is_err());
}

#[test]
fn disk_distance_examples() {
    let z = Complex64::new(0.0, 0.0);
    assert_eq!(disk_distance(z, z).unwrap(), 0.0);
    let d = disk_distance(z, Complex64::new(0.5, 0.0)).unwrap();
    assert!(close(d, 3f64.ln(), 1e-14));
    assert!(close(d, disk_distance(z, Complex64::new(0.0, 0.5)).unwrap(), 1e-15));
    assert!(disk_distance(z, Complex64::new(1.0, 0.0)).is_err());
}

#[test]
fn annulus_modulus_examples() {
    assert!(close(round_annulus_modulus((2.0 * PI).exp()).unwrap(), 1.0, 1e-14));
    assert!(round_annulus_modulus(1.0 + 1e-12).unwrap() < 1e-12);
    assert_eq!(round_annulus_modulus(f64::INFINITY).unwrap(), f64::INFINITY);
}

#[test]
fn eps0_examples() {
    assert!(close(f_c(1.0, 1.0), 2.2007, 1e-4));
    for c in [0.1, 1.0, 4.0] {
        assert_eq!(f_c(c, 0.0), 0.0);
    }
    let e = eps0(1.0, 1.0, 1.0).unwrap();
    assert!(close(f_c(1.0, e), eps0_target(1.0, 1.0, 1.0).unwrap(), 1e-10));
    assert!(eps0(-1.0, 1.0, 1.0).is_err());
}

fn class(genus: u32, lengths: &[f64], a: u32, l: f64) -> SurfaceClassSpec {
    SurfaceClassSpec {
        genus,
        n_outer: lengths.len() as u32,
        outer_loop_lengths: lengths.to_vec(),
        boundary_length: 0.0,
        a,
        l,
    }
}

#[test]
fn classification_examples() {
    let c = classify_surface(&class(0, &[0.5, 100.0], 0, 1.0)).unwrap();
    assert!(!c.in_f);
    let c = classify_surface(&class(0, &[0.5, 0.5, 100.0], 1, 1.0)).unwrap();
    assert!(c.in_f && !c.in_s);
    assert_eq!(c.chi, -1);
    let c = classify_surface(&class(1, &[0.5], 5, 1.0)).unwrap();
    assert!(!c.in_f && !c.in_s);
    // punctures count as loops of length zero
    let c = classify_surface(&class(0, &[0.0, 0.0, 0.0], 1, 1.0)).unwrap();
    assert!(c.in_f && c.in_s);
}

proptest! {
    #[test]
    fn area_derivative_is_length(k in 0.2f64..3.0, r in 0.05f64..3.0) {
        let h = 1e-5;
        let fd = (comparison_area(k, r + h).unwrap() - comparison_area(k, r - h).unwrap()) / (2.0 * h);
        let l = comparison_boundary_length(k, r).unwrap();
        prop_assert!((fd - l).abs() <= 1e-6 * l.max(1.0));
    }

    #[test]
    fn bound_vanishes_at_model_length(k in 0.2f64..3.0, c in 0.1f64..3.0, r0 in 0.1f64..3.0) {
        let p = ComparisonParams::new(k, c, r0).unwrap();
        let ell = comparison_boundary_length(k, p.outer_radius()).unwrap();
        let b = topology_bound(&p, ell).unwrap();
        let scale = (k * r0 + c).sinh() / c.sinh();
        prop_assert!(b.abs() <= 1e-12 * scale);
    }

    #[test]
    fn collar_identity(l in 0.01f64..20.0, dl in 0.01f64..5.0) {
        let w = collar_width(l).unwrap();
        prop_assert!((w.cosh() * (l / 2.0).tanh() - 1.0).abs() <= 1e-12);
        prop_assert!(collar_width(l + dl).unwrap() < w);
    }

    #[test]
    fn disk_distance_is_a_metric(
        a in (0.0f64..0.99, 0.0f64..6.3),
        b in (0.0f64..0.99, 0.0f64..6.3),
        c in (0.0f64..0.99, 0.0f64..6.3),
    ) {
        let [x, y, z] = [a, b, c].map(|(r, t)| Complex64::from_polar(r, t));
        let (dxy, dyz, dxz) = (
            disk_distance(x, y).unwrap(),
            disk_distance(y, z).unwrap(),
            disk_distance(x, z).unwrap(),
        );
        prop_assert!(dxz <= dxy + dyz + 1e-9 * (1.0 + dxz));
        prop_assert!((dxy - disk_distance(y, x).unwrap()).abs() <= 1e-12 * (1.0 + dxy));
        let origin = Complex64::new(0.0, 0.0);
        prop_assert!((disk_distance(origin, x).unwrap() - 2.0 * a.0.atanh()).abs() <= 1e-12 * (1.0 + dxy));
    }

    #[test]
    fn s_class_is_inside_f_class(
        genus in 0u32..2,
        lengths in proptest::collection::vec(0.0f64..3.0, 0..6),
        boundary in 0.0f64..3.0,
        a in 0u32..6,
        l in 0.1f64..2.0,
    ) {
        let spec = SurfaceClassSpec {
            genus,
            n_outer: lengths.len() as u32,
            outer_loop_lengths: lengths,
            boundary_length: boundary,
            a,
            l,
        };
        let c = classify_surface(&spec).unwrap();
        prop_assert!(!c.in_s || c.in_f);
        prop_assert_eq!(c.chi, spec.euler_characteristic());
    }

    #[test]
    fn eps0_inverts_target(c in 0.1f64..5.0, l in 0.1f64..5.0, c1 in 0.1f64..5.0) {
        let e = eps0(c, l, c1).unwrap();
        prop_assert!(e > 0.0);
        prop_assert!((f_c(c, e) - eps0_target(c, l, c1).unwrap()).abs() <= 1e-10);
    }
}
