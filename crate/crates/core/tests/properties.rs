use std::sync::Arc;

use finqg::linalg::{CVec, C64};
use finqg::models::{builtin, BUILTINS};
use finqg::{AlgebraElement, Functional, QuantumGroup};
use proptest::prelude::*;

fn model(index: usize) -> Arc<QuantumGroup> {
    builtin(BUILTINS[index % BUILTINS.len()]).unwrap()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn coords() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 8)
}

fn element(qg: &QuantumGroup, raw: &[(f64, f64)]) -> AlgebraElement {
    AlgebraElement::new(CVec::from_iterator(
        qg.dim(),
        raw.iter().take(qg.dim()).map(|&(r, i)| C64::new(r, i)),
    ))
}

fn mul(qg: &QuantumGroup, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
    qg.algebra().multiply(a, b).unwrap()
}

/// Normalised vector state `a ↦ h(v* a v)/h(v* v)`.
fn vector_state(qg: &QuantumGroup, v: &AlgebraElement) -> Functional {
    let norm = qg.haar_norm(v);
    qg.vector_state(v, v).scale(C64::new(1.0 / (norm * norm), 0.0))
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn multiplication_is_associative(m in 0usize..10, a in coords(), b in coords(), c in coords()) {
        let qg = model(m);
        let (a, b, c) = (element(&qg, &a), element(&qg, &b), element(&qg, &c));
        let left = mul(&qg, &mul(&qg, &a, &b), &c);
        let right = mul(&qg, &a, &mul(&qg, &b, &c));
        prop_assert!(left.distance(&right) < 1e-12);
    }

    #[test]
    fn star_is_antimultiplicative(m in 0usize..10, a in coords(), b in coords()) {
        let qg = model(m);
        let alg = qg.algebra();
        let (a, b) = (element(&qg, &a), element(&qg, &b));
        let lhs = alg.adjoint(&mul(&qg, &a, &b));
        let rhs = mul(&qg, &alg.adjoint(&b), &alg.adjoint(&a));
        prop_assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn haar_state_is_a_trace(m in 0usize..10, a in coords(), b in coords()) {
        let qg = model(m);
        let (a, b) = (element(&qg, &a), element(&qg, &b));
        prop_assert!((qg.haar(&mul(&qg, &a, &b)) - qg.haar(&mul(&qg, &b, &a))).norm() < 1e-12);
    }

    #[test]
    fn coproduct_is_multiplicative(m in 0usize..10, a in coords(), b in coords()) {
        let qg = model(m);
        let alg = qg.algebra();
        let (a, b) = (element(&qg, &a), element(&qg, &b));
        let lhs = qg.coproduct_apply(&mul(&qg, &a, &b));
        let rhs = alg.tensor_multiply(&qg.coproduct_apply(&a), &qg.coproduct_apply(&b));
        prop_assert!(lhs.distance(&rhs) < 1e-11);
    }

    #[test]
    fn regular_representation_is_a_star_homomorphism(m in 0usize..10, a in coords(), b in coords()) {
        let qg = model(m);
        let alg = qg.algebra();
        let gns = qg.gns();
        let (a, b) = (element(&qg, &a), element(&qg, &b));
        let rep = |x: &AlgebraElement| gns.whitening() * alg.regular_representation(x) * gns.whitening_inverse();
        let hom = (rep(&mul(&qg, &a, &b)) - rep(&a) * rep(&b)).camax();
        let star = (rep(&alg.adjoint(&a)) - rep(&a).adjoint()).camax();
        prop_assert!(hom < 1e-11, "homomorphism residual {hom:e}");
        prop_assert!(star < 1e-11, "adjoint residual {star:e}");
    }

    #[test]
    fn square_root_squares_back(m in 0usize..10, a in coords()) {
        let qg = model(m);
        let alg = qg.algebra();
        let a = element(&qg, &a);
        let x = mul(&qg, &alg.adjoint(&a), &a);
        let r = qg.sqrt_positive(&x).unwrap();
        prop_assert!(qg.is_positive(&r));
        prop_assert!(mul(&qg, &r, &r).distance(&x) < 1e-9);
    }

    #[test]
    fn vector_states_are_states(m in 0usize..10, v in coords()) {
        let qg = model(m);
        let v = element(&qg, &v);
        prop_assume!(qg.haar_norm(&v) > 1e-3);
        prop_assert!(qg.is_state(&vector_state(&qg, &v)));
    }
}

proptest! {
    #![proptest_config(config(50))]

    #[test]
    fn convolution_is_associative(m in 0usize..10, u in coords(), v in coords(), w in coords()) {
        let qg = model(m);
        let [a, b, c] = [u, v, w].map(|x| Functional::new(element(&qg, &x).coords));
        let left = qg.convolve(&qg.convolve(&a, &b).unwrap(), &c).unwrap();
        let right = qg.convolve(&a, &qg.convolve(&b, &c).unwrap()).unwrap();
        prop_assert!(left.distance(&right) < 1e-11);
    }

    #[test]
    fn convolution_of_states_is_a_state(m in 0usize..10, u in coords(), v in coords()) {
        let qg = model(m);
        let (u, v) = (element(&qg, &u), element(&qg, &v));
        prop_assume!(qg.haar_norm(&u) > 1e-3 && qg.haar_norm(&v) > 1e-3);
        let conv = qg.convolve(&vector_state(&qg, &u), &vector_state(&qg, &v)).unwrap();
        prop_assert!(qg.is_state(&conv));
    }

    #[test]
    fn counit_and_haar_absorb(m in 0usize..10, v in coords()) {
        let qg = model(m);
        let v = element(&qg, &v);
        prop_assume!(qg.haar_norm(&v) > 1e-3);
        let psi = vector_state(&qg, &v);
        let eps = qg.counit_functional();
        let h = qg.haar_functional();
        prop_assert!(qg.convolve(&eps, &psi).unwrap().distance(&psi) < 1e-12);
        prop_assert!(qg.convolve(&psi, &h).unwrap().distance(&h) < 1e-12);
        prop_assert!(qg.convolve(&h, &psi).unwrap().distance(&h) < 1e-12);
    }
}
