use std::f64::consts::PI;

use nullflow::kdvsol::StationaryBending;
use nullflow::lame::{floquet_search, FloquetRatio, LameConfig, LameMethod};
use nullflow::nullcurve::{
    bending_oracle, cartan_frame, central_difference, classify_orbit, constant_bending_frames, curve_and_cousins, future_directed,
    integrate_spinor_frames, lien_evolve, stationary_curve, torical_embed, ConstantCase, LienConfig, OrbitConfig, OrbitType,
    SpinorFramePath,
};
use nullflow::ode::OdeConfig;
use nullflow::{EllipticParameter, Mat2, Spacetime22, Unimodular2};
use proptest::prelude::*;

const DS: f64 = 0.01;

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn unimodular() -> impl Strategy<Value = Unimodular2> {
    (-1.5f64..1.5, -1.5f64..1.5, -1.5f64..1.5, 0.3f64..2.0).prop_map(|(x, y, z, w)| {
        // [[w, x], [y, (1 + x y)/w]] has det 1; an extra shear mixes in z
        let m = Mat2::new(w, x, y, (1.0 + x * y) / w) * Mat2::new(1.0, 0.0, z, 1.0);
        Unimodular2::new(m).unwrap()
    })
}

fn wave_path(a: f64, b: f64, rho: f64, span: f64) -> SpinorFramePath {
    let n = (span / DS).round() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 * DS).collect();
    let kappa = move |s: f64| a + b * (2.0 * PI * s / rho).cos();
    integrate_spinor_frames(&kappa, &grid, 0.0, Unimodular2::IDENTITY, Unimodular2::IDENTITY, &OdeConfig::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, failure_persistence: None, ..ProptestConfig::default() })]

    // Finite differences lose |gamma|^2 digits, so the bending stays mostly
    // below 1 here, where the frames remain of moderate size.
    #[test]
    fn curve_invariants_for_arbitrary_bending(a in -3.0f64..0.0, b in 0.0f64..1.0, rho in 1.0f64..3.0) {
        let path = wave_path(a, b, rho, 3.0);
        for (p, m) in path.f_plus.iter().zip(&path.f_minus) {
            prop_assert!((p.matrix().det() - 1.0).abs() <= 1e-9);
            prop_assert!((m.matrix().det() - 1.0).abs() <= 1e-9);
        }
        let gamma = path.gamma();
        for g in &gamma {
            prop_assert!((g.quad() + 1.0).abs() <= 1e-8);
        }
        prop_assert!(cartan_frame(&path).max_gram_defect() <= 1e-6);
        let d1 = central_difference(&gamma, DS, 1).unwrap();
        let d2 = central_difference(&gamma, DS, 2).unwrap();
        for (x, y) in d1.iter().zip(&d2) {
            prop_assert!(x.quad().abs() <= 1e-6);
            prop_assert!((y.quad() - 4.0).abs() <= 1e-4);
        }
        let oracle = bending_oracle(&gamma, DS).unwrap();
        for (i, k) in oracle.iter().enumerate() {
            prop_assert!((k - path.kappa[i + 3]).abs() <= 1e-3);
        }
    }

    #[test]
    fn cousins_rebuild_the_curve(a in -2.5f64..2.5, b in 0.0f64..1.0, rho in 1.0f64..3.0) {
        let path = wave_path(a, b, rho, 3.0);
        let cc = curve_and_cousins(&path);
        let det = |u: [f64; 2], v: [f64; 2]| u[0] * v[1] - u[1] * v[0];
        for i in 0..path.len() {
            prop_assert!((det(cc.eta_plus[i], cc.eta_plus_prime[i]) - 1.0).abs() <= 1e-6);
            prop_assert!((det(cc.eta_minus[i], cc.eta_minus_prime[i]) - 1.0).abs() <= 1e-6);
        }
        for (x, y) in cc.rebuild().iter().zip(path.gamma()) {
            prop_assert!((x.0 - y.0).max_norm() <= 1e-8);
        }
    }

    #[test]
    fn tangent_orientation_is_constant(a in -2.5f64..2.5, b in 0.0f64..1.0, rho in 1.0f64..3.0) {
        let path = wave_path(a, b, rho, 3.0);
        let frame = cartan_frame(&path);
        for (g, t) in frame.gamma.iter().zip(&frame.tangent) {
            prop_assert!(future_directed(*g, *t).unwrap());
        }
    }

    #[test]
    fn classification_survives_conjugation(a in -2.5f64..2.5, b in 0.0f64..1.0, x in unimodular(), y in unimodular()) {
        let rho = 2.0;
        let path = wave_path(a, b, rho, rho);
        let cfg = OrbitConfig::default();
        let base = classify_orbit(&path, rho, &cfg).unwrap();
        let moved = classify_orbit(&path.transformed(x, y), rho, &cfg).unwrap();
        prop_assert_eq!(base.tag(), moved.tag());
        prop_assert_eq!(base.spin, moved.spin);
        for (u, v) in [(base.plus, moved.plus), (base.minus, moved.minus)] {
            prop_assert!((u.invariant - v.invariant).abs() <= 1e-8 * (1.0 + u.invariant.abs()));
            prop_assert_eq!(u.q, v.q);
        }
    }

    #[test]
    fn torical_image_lies_in_the_solid_torus(p in unimodular()) {
        let [x, y, z] = torical_embed(p);
        let ring = x.hypot(y) - 2.0;
        prop_assert!(ring * ring + z * z < 1.0);
    }
}

#[test]
fn constant_cases_have_their_orbit_types() {
    let cfg = OrbitConfig::default();
    let expected = [
        (-2.0, ConstantCase::EllipticElliptic, OrbitType::Elliptic, OrbitType::Elliptic),
        (-1.0, ConstantCase::ParabolicElliptic, OrbitType::Parabolic, OrbitType::Elliptic),
        (0.3, ConstantCase::HyperbolicElliptic, OrbitType::Hyperbolic, OrbitType::Elliptic),
        (1.0, ConstantCase::HyperbolicParabolic, OrbitType::Hyperbolic, OrbitType::Parabolic),
        (2.0, ConstantCase::HyperbolicHyperbolic, OrbitType::Hyperbolic, OrbitType::Hyperbolic),
    ];
    for (n, (k, case, tp, tm)) in expected.into_iter().enumerate() {
        assert_eq!(ConstantCase::of(k), case);
        assert_eq!(case.number() as usize, n + 1);
        let rho = 0.7;
        let grid = linspace(0.0, rho, 71);
        let path =
            integrate_spinor_frames(&|_| k, &grid, 0.0, Unimodular2::IDENTITY, Unimodular2::IDENTITY, &OdeConfig::default()).unwrap();
        for (i, &s) in grid.iter().enumerate() {
            let (p, m) = constant_bending_frames(k, s);
            assert!((p.matrix() - path.f_plus[i].matrix()).max_norm() <= 1e-9, "kappa {k} s {s}");
            assert!((m.matrix() - path.f_minus[i].matrix()).max_norm() <= 1e-9, "kappa {k} s {s}");
        }
        let c = classify_orbit(&path, rho, &cfg).unwrap();
        assert_eq!((c.plus.kind, c.minus.kind), (tp, tm), "kappa {k}");
    }
}

fn stationary_pair() -> StationaryBending {
    let mu = EllipticParameter::new(0.9).unwrap();
    let rs = floquet_search(mu, FloquetRatio::new(2, 5).unwrap(), 2, &LameConfig::default()).unwrap();
    StationaryBending::new(mu, rs[0].h, rs[1].h).unwrap()
}

#[test]
fn stationary_curve_methods_agree() {
    let b = stationary_pair();
    let grid = linspace(0.0, 2.0 * b.period(), 201);
    let cfg = OdeConfig::default();
    let heun = stationary_curve(&b, &grid, LameMethod::Heun, &cfg).unwrap();
    let ode = stationary_curve(&b, &grid, LameMethod::Ode, &cfg).unwrap();
    for (x, y) in heun.gamma().iter().zip(ode.gamma()) {
        assert!((x.0 - y.0).max_norm() <= 1e-6);
    }
    let gamma: Vec<Spacetime22> = heun.gamma();
    assert!(gamma.iter().all(|g| (g.quad() + 1.0).abs() <= 1e-8));
    assert!(cartan_frame(&heun).max_gram_defect() <= 1e-6);
}

#[test]
fn lien_flow_preserves_stationary_monodromy() {
    let b = stationary_pair();
    let rho = b.period();
    let grid = linspace(0.0, rho, 121);
    let times = linspace(0.0, 0.5, 11);
    let paths = lien_evolve(&b, &grid, &times, (Unimodular2::IDENTITY, Unimodular2::IDENTITY), &LienConfig::default()).unwrap();
    let (p0, m0) = paths[0].monodromy(rho).unwrap();
    for path in &paths[1..] {
        let (p, m) = path.monodromy(rho).unwrap();
        assert!((p.matrix() - p0.matrix()).max_norm() <= 1e-4, "t {}", path.t);
        assert!((m.matrix() - m0.matrix()).max_norm() <= 1e-4, "t {}", path.t);
    }
}
