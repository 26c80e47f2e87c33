use biaslab::foxbias::abelian_family;
use biaslab::forms::{evaluation_forms, fixed_and_tate, metabolic_fixed_forms, random_form_vanishing_on_fixed, GLattice};
use biaslab::grouphom::{homology_abelian, FiniteAbelianGroup};
use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn pi2(orders: &[u64]) -> GLattice {
    let c = abelian_family(orders, 1).unwrap().complex().unwrap();
    GLattice::top_cycles(&c).unwrap().0
}

#[test]
fn tate_of_pi2_matches_group_homology() {
    for orders in [vec![3u64, 3], vec![3, 3, 3]] {
        let l = pi2(&orders);
        let ft = fixed_and_tate(&l).unwrap();
        let g = FiniteAbelianGroup::new(&orders).unwrap();
        let expected: Vec<BigInt> = homology_abelian(&g, 2).into_iter().map(BigInt::from).collect();
        assert_eq!(ft.tate_factors, expected, "{orders:?}");
    }
}

#[test]
fn metabolic_forms_with_vanishing_fixed_part() {
    let mut rng = StdRng::seed_from_u64(7);
    for orders in [vec![3u64, 3], vec![3, 3, 3]] {
        let l = pi2(&orders);
        let ef = evaluation_forms(&l, 1).unwrap();
        let order = BigInt::from(l.group().order());
        for (b, n) in ef.beta.iter().zip(&ef.n) {
            assert_eq!(b * n, order);
        }
        for _ in 0..3 {
            let phi = random_form_vanishing_on_fixed(&l, 1, &mut rng, 3);
            assert!(l.is_invariant_form(&phi));
            let (fixed, tate) = metabolic_fixed_forms(&l, &phi, 1, &ef).unwrap();
            assert_eq!(fixed, ef.e_fixed);
            assert_eq!(tate, ef.e_tate);
        }
    }
}
