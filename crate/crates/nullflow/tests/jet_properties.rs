use nullflow::jetalg::{
    hamiltonian_density, in_lie_algebra, kdv_rhs, lax_defect_2x2, lenard_p, lien_matrix_polys, rat, script_d, JetPoly, Monomial,
};
use proptest::prelude::*;

fn poly(max_order: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = JetPoly> {
    let term = (prop::collection::vec(0..=max_exp, max_order + 1), -6i64..=6, 1i64..=4);
    prop::collection::vec(term, 1..=max_terms)
        .prop_map(|terms| JetPoly::from_terms(terms.into_iter().map(|(e, n, d)| (Monomial::from_exponents(e), rat(n, d)))))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn euler_kills_total_derivatives(p in poly(5, 2, 4)) {
        prop_assert!(p.total_derivative().euler().is_zero());
    }

    #[test]
    fn primitive_inverts_total_derivative(p in poly(4, 2, 4)) {
        let dp = p.total_derivative();
        let back = dp.primitive().unwrap();
        prop_assert_eq!(back.total_derivative(), dp);
    }

    #[test]
    fn euler_image_gives_divergences(p in poly(2, 2, 3)) {
        let e = p.euler();
        let u = JetPoly::var(0);
        let u1 = JetPoly::var(1);
        prop_assert!(u1.mul(&e).euler().is_zero());
        prop_assert!(u.mul(&e.total_derivative()).euler().is_zero());
    }

    #[test]
    fn lax_defect_vanishes_on_kdv_for_any_lambda(n in -20i64..=20, d in 1i64..=7) {
        let ut = kdv_rhs(1).unwrap().neg();
        prop_assert!(lax_defect_2x2(&rat(n, d), &ut).is_zero());
    }
}

#[test]
fn lenard_recursion_is_exact_up_to_six() {
    for n in 2..=6 {
        let lhs = lenard_p(n).unwrap().total_derivative();
        let rhs = script_d(&lenard_p(n - 1).unwrap());
        assert_eq!(lhs, rhs, "n = {n}");
    }
}

#[test]
fn densities_have_lenard_gradients() {
    for n in 1..=6 {
        assert_eq!(hamiltonian_density(n).unwrap().euler(), lenard_p(n).unwrap(), "n = {n}");
    }
}

#[test]
fn lenard_orders_grow_by_two() {
    for n in 1..=6 {
        assert_eq!(lenard_p(n).unwrap().order(), Some(2 * (n - 1)), "n = {n}");
    }
}

#[test]
fn kdv_flows_are_conservation_laws() {
    for n in 1..=4 {
        assert!(kdv_rhs(n).unwrap().euler().is_zero(), "n = {n}");
    }
}

#[test]
fn lien_matrices_take_values_in_the_lie_algebra() {
    for n in 0..=3 {
        let (k, p) = lien_matrix_polys(n).unwrap();
        assert!(in_lie_algebra(&k) && in_lie_algebra(&p), "n = {n}");
    }
}

#[test]
fn evaluation_of_p2() {
    let p2 = lenard_p(2).unwrap();
    assert_eq!(p2.evaluate(&[1.0, 0.0, 2.0]).unwrap(), -1.0);
    assert!(p2.evaluate(&[1.0]).is_err());
    assert_eq!(lenard_p(0).unwrap(), JetPoly::one());
}
