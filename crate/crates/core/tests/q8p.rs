use biaslab::foxbias::q8p::{compare_with_displayed, display_kernel_basis, explicit_f, explicit_g, theta};
use biaslab::foxbias::{aut_twist, induced_in_bases, q8p_family_in, q8p_group, verify_chain_map};
use biaslab::groupring::GroupRingElement;
use biaslab::intlin::IntMatrix;
use num_bigint::BigInt;

const P: u64 = 17;

#[test]
fn presentations_are_epimorphisms() {
    let g = q8p_group(P).unwrap();
    assert_eq!(g.order(), 39304);
    for r in [1, 2, 3, 16] {
        let pres = q8p_family_in(&g, r).unwrap();
        assert_eq!(g.closure(pres.images()).len(), 39304);
        assert_eq!(pres.complex().unwrap().euler_characteristic(), 4);
    }
}

#[test]
fn fox_matrix_against_display() {
    let g = q8p_group(P).unwrap();
    for r in [1, 3] {
        let pres = q8p_family_in(&g, r).unwrap();
        let diffs = compare_with_displayed(&pres, r);
        assert_eq!(diffs.len(), 1, "{diffs:?}");
        let d = &diffs[0];
        assert_eq!((d.row, d.col), (1, 2));
        assert_eq!(d.fox, GroupRingElement::parse(&g, "y*b").unwrap().sigma(34).neg());
        assert_eq!(d.fox.augment(), d.displayed.augment());
    }
}

#[test]
fn explicit_maps() {
    let g = q8p_group(P).unwrap();
    let c1 = q8p_family_in(&g, 1).unwrap().complex().unwrap();
    let k = display_kernel_basis();
    for r in [3i64, 5] {
        let cr = q8p_family_in(&g, r).unwrap().complex().unwrap();
        let f = verify_chain_map(explicit_f(&g, r), &cr, &c1).unwrap();
        let fi = induced_in_bases(&f, &k, &k).unwrap();
        assert_eq!(fi.matrix, IntMatrix::from_i64(&[&[1, 0, 0], &[0, r, 0], &[0, 0, 1]]));

        let twisted = aut_twist(&c1, &theta(&g, r).unwrap()).unwrap();
        let gm = verify_chain_map(explicit_g(&g, r), &twisted, &c1).unwrap();
        let gi = induced_in_bases(&gm, &k, &k).unwrap();
        assert_eq!(gi.matrix, IntMatrix::from_i64(&[&[1, 0, 0], &[0, r, 0], &[0, 0, r]]));
        assert_eq!(gi.det, BigInt::from(r * r));
    }
}
