use biaslab::groupring::{FiniteGroupModel, GroupRingElement};
use biaslab::intlin::{smith_normal_form, IntMatrix};
use biaslab::unitary::{
    elementary_p_lower, elementary_p_upper, elementary_q, elementary_swap, inverse, is_unitary, reduce, symmetrise,
    whitehead_decompose, UnitaryWord,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize, lo: i64, hi: i64) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(lo..=hi, rows * cols)
        .prop_map(move |v| IntMatrix::from_fn(rows, cols, |i, j| BigInt::from(v[i * cols + j])))
}

fn element(order: usize) -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0..order, -4i64..=4), 0..6)
}

fn is_pm_one(x: &BigInt) -> bool {
    x.is_one() || (-x).is_one()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_is_certified(a in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c, -6, 6))) {
        let snf = smith_normal_form(&a);
        prop_assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.s.clone());
        prop_assert!(is_pm_one(&snf.u.det()) && is_pm_one(&snf.v.det()));
        let d = snf.diagonal();
        for w in d.windows(2) {
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
        }
    }

    #[test]
    fn det_is_multiplicative(a in matrix(3, 3, -5, 5), b in matrix(3, 3, -5, 5)) {
        prop_assert_eq!(a.mul(&b).det(), a.det() * b.det());
    }

    #[test]
    fn group_ring_is_associative_and_distributive(x in element(24), y in element(24), z in element(24)) {
        let g = FiniteGroupModel::q8_times(&[3]).unwrap();
        let (x, y, z) = (
            GroupRingElement::from_terms(&g, x),
            GroupRingElement::from_terms(&g, y),
            GroupRingElement::from_terms(&g, z),
        );
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        prop_assert_eq!(x.mul(&y).augment(), x.augment() * y.augment());
        prop_assert_eq!(x.mul(&y).involute(), y.involute().mul(&x.involute()));
    }

    #[test]
    fn symmetrise_inverts_theta_minus_eps_transpose(theta in matrix(3, 3, -6, 6), eps in prop::sample::select(vec![1i64, -1]), m in prop::sample::select(vec![0u64, 5, 8, 9])) {
        let x = reduce(&theta.sub(&theta.transpose().scale(&BigInt::from(eps))), m);
        let t = symmetrise(&x, eps, m).expect("x is of the form theta - eps theta^T");
        prop_assert_eq!(reduce(&t.sub(&t.transpose().scale(&BigInt::from(eps))), m), x);
    }

    #[test]
    fn words_of_elementary_factors_are_unitary(
        q in matrix(3, 3, -2, 2),
        a in matrix(3, 3, -3, 3),
        b in matrix(3, 3, -3, 3),
        swap in 0usize..3,
        eps in prop::sample::select(vec![1i64, -1]),
        m in prop::sample::select(vec![0u64, 5, 9]),
    ) {
        let mut w = UnitaryWord::new(3, m, eps);
        w.push(elementary_p_upper(&a)).push(elementary_swap(swap)).push(elementary_p_lower(&b));
        if let Ok(qf) = elementary_q(&q, m) {
            w.push(qf);
        }
        prop_assert!(w.factors_certified().unwrap());
        let prod = w.product().unwrap();
        prop_assert!(is_unitary(&prod, eps, m).unitary);
    }

    #[test]
    fn whitehead_holds_mod_m(a in matrix(2, 2, -4, 4), m in prop::sample::select(vec![5u64, 7, 9, 12])) {
        prop_assume!(inverse(&a, m).is_ok());
        prop_assert!(whitehead_decompose(&a, m).unwrap().holds);
    }
}
