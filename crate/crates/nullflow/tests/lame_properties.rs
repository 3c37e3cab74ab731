use std::f64::consts::PI;

use nullflow::lame::{
    floquet_search, fundamental_ode, monodromy_order, tau, FloquetRatio, FloquetRecord, HeunFundamental, LameConfig, MonodromyOrder,
};
use nullflow::nullcurve::rationalize;
use nullflow::ode::OdeConfig;
use nullflow::specfun::ellip_k;
use nullflow::{EllipticParameter, Mat2};
use proptest::prelude::*;

fn mu(x: f64) -> EllipticParameter {
    EllipticParameter::new(x).unwrap()
}

fn records(m: f64, num: u32, den: u32, count: usize) -> Vec<FloquetRecord> {
    floquet_search(mu(m), FloquetRatio::new(num, den).unwrap(), count, &LameConfig::default()).unwrap()
}

fn check_records(rs: &[FloquetRecord]) {
    for r in rs {
        let m = r.monodromy.matrix();
        assert!((m.det() - 1.0).abs() <= 1e-10, "det {} at h {}", m.det(), r.h);
        assert!((r.half_trace() - r.q.target()).abs() <= 1e-8, "tau off at h {}", r.h);
    }
    assert!(rs.windows(2).all(|w| w[1].h > w[0].h && w[1].index == w[0].index + 1));
}

#[test]
fn floquet_records_are_unimodular_and_on_target() {
    for (m, num, den) in [(0.4, 2, 5), (0.4, 3, 5), (0.9, 2, 5), (0.6, 0, 1), (0.6, 1, 1), (0.25, 1, 3)] {
        check_records(&records(m, num, den, 4));
    }
}

// The order-one Lame operator has a single open gap above the ground band,
// so every periodic and antiperiodic eigenvalue past 1 + mu is a
// coexistence point: M = +-Id and the even and odd eigenvalues coincide.
#[test]
fn band_edge_spectra_interlace() {
    let m = 0.6;
    let periodic = records(m, 0, 1, 5);
    let anti = records(m, 1, 1, 5);
    for (rs, sign) in [(&periodic, 1.0), (&anti, -1.0)] {
        for r in rs.iter() {
            assert!(r.h > 1.0 + m);
            let d = r.monodromy.matrix() - Mat2::IDENTITY.scale(sign);
            assert!(d.max_norm() <= 1e-8, "h {} not a coexistence point", r.h);
        }
    }
    for i in 0..5 {
        assert!(periodic[i].h < anti[i].h, "pair {i}");
        if i + 1 < 5 {
            assert!(anti[i].h < periodic[i + 1].h, "pair {i}");
        }
    }
    let edge = tau(mu(m), 1.0 + m).unwrap();
    assert!((edge + 1.0).abs() <= 1e-8);
}

#[test]
fn detected_order_matches_eigenvalue_phase() {
    for (m, num, den) in [(0.4, 3, 5), (0.9, 2, 5), (0.5, 1, 4), (0.6, 0, 1), (0.6, 1, 1)] {
        for r in records(m, num, den, 3) {
            let theta = r.half_trace().clamp(-1.0, 1.0).acos();
            let phase = rationalize(theta / (2.0 * PI), 10_000, 1e-8).expect("rational phase");
            assert_eq!(r.order, MonodromyOrder::Finite(*phase.denom() as u32), "h {}", r.h);
        }
    }
    let hyperbolic = Mat2::new(2.0, 1.0, 1.0, 1.0);
    assert_eq!(monodromy_order(hyperbolic, 10_000, 1e-6), MonodromyOrder::Unbounded);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn heun_and_ode_fundamentals_agree(m in 0.15f64..0.9, h in 0.3f64..20.0) {
        let mu = mu(m);
        let k = ellip_k(mu);
        let grid: Vec<f64> = (0..=60).map(|i| -k + 4.0 * k * i as f64 / 60.0).collect();
        let heun = HeunFundamental::new(mu, h).unwrap();
        // integrate from 0 outward in both directions
        let cfg = OdeConfig::default();
        let right: Vec<f64> = grid.iter().copied().filter(|&s| s > 0.0).collect();
        let left: Vec<f64> = grid.iter().copied().filter(|&s| s < 0.0).map(|s| -s).rev().collect();
        let flipped = fundamental_ode(mu, h, &left, &cfg).unwrap();
        let forward = fundamental_ode(mu, h, &right, &cfg).unwrap();
        for (s, p) in forward.s.iter().zip(&forward.points) {
            let q = heun.eval(*s).unwrap();
            prop_assert!((q.delta() - p.delta()).max_norm() <= 1e-5, "s {}", s);
            prop_assert!((q.wronskian() - 1.0).abs() <= 1e-8);
        }
        // cl is even and sl odd, so delta(-s) = diag(1, -1) delta(s) diag(1, -1)
        for (s, p) in flipped.s.iter().zip(&flipped.points) {
            let q = heun.eval(-*s).unwrap();
            let mirrored = Mat2::new(p.cl, -p.dcl, -p.sl, p.dsl);
            prop_assert!((q.delta() - mirrored).max_norm() <= 1e-5, "s {}", -s);
        }
    }
}
