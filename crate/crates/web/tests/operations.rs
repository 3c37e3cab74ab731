use nullflow_web::{constant_case_tag, constant_points, stationary_points, tau_samples};

fn in_torus(p: &[f64]) -> bool {
    let ring = p[0].hypot(p[1]) - 2.0;
    ring * ring + p[2] * p[2] < 1.0
}

#[test]
fn tau_samples_are_pairs() {
    let v = tau_samples(0.4, 0.0, 3.0, 31).unwrap();
    assert_eq!(v.len(), 62);
    assert_eq!((v[0], v[60]), (0.0, 3.0));
    assert!(v.chunks(2).all(|c| c[1].is_finite()));
    assert!(tau_samples(0.4, 1.0, 1.0, 10).is_err());
    assert!(tau_samples(1.4, 0.0, 1.0, 10).is_err());
    assert!(tau_samples(0.4, 0.0, 1.0, 1).is_err());
}

#[test]
fn constant_curve_stays_in_the_torus_and_closes() {
    // kappa_{7,3} = -29/20 closes after its frame period
    let wp = (-29.0f64 / 20.0 + 1.0).abs().sqrt();
    let rho = std::f64::consts::PI / (3.0 * wp);
    let v = constant_points(-1.45, 18.0 * rho, 401).unwrap();
    assert_eq!(v.len(), 3 * 401);
    assert!(v.chunks(3).all(in_torus));
    let last = &v[v.len() - 3..];
    assert!(v[..3].iter().zip(last).all(|(a, b)| (a - b).abs() < 1e-9));
    assert_eq!(constant_case_tag(-1.45), "case 1 (E,E)");
    assert_eq!(constant_case_tag(1.0), "case 4 (H,P)");
    assert!(constant_points(0.0, -1.0, 10).is_err());
}

#[test]
fn stationary_curve_header_and_points() {
    let v = stationary_points(0.9, 2, 5, 1.0, 101).unwrap();
    assert!((v[0] - 0.93003).abs() < 1e-4 && (v[1] - 2.22598).abs() < 1e-4);
    assert!(v[2] > 0.0);
    assert_eq!(v.len(), 3 + 3 * 101);
    assert!(v[3..].chunks(3).all(in_torus));
    assert!(stationary_points(0.9, 3, 2, 1.0, 10).is_err());
}
