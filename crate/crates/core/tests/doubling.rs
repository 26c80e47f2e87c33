use biaslab::doubling::{double, double_map, homology_pattern, quadratic_bias_class, tate_diagonal_check, QuadraticContext, TateData};
use biaslab::foxbias::{abelian_family, lift_chain_map, AlgebraicComplex, Presentation};
use biaslab::groupring::FiniteGroupModel;
use biaslab::units::{residue, UnitSubgroup};
use num_bigint::BigInt;

fn family(orders: &[u64], r: i64) -> AlgebraicComplex {
    abelian_family(orders, r).unwrap().complex().unwrap()
}

#[test]
fn homology_patterns() {
    let z3 = FiniteGroupModel::abelian(&[3]).unwrap();
    let cyclic = Presentation::parse("<a | a^3>", z3).unwrap().complex().unwrap();
    for c in [cyclic, family(&[3, 3], 1)] {
        let pat = homology_pattern(&double(&c, None).unwrap()).unwrap();
        assert!(pat.matches, "{:?}", pat.groups);
    }
}

#[test]
fn nu_carries_the_bias() {
    let orders = [5u64, 5];
    let c1 = family(&orders, 1);
    let t1 = TateData::of(&c1).unwrap();
    let d1 = double(&c1, None).unwrap();
    for r in 1..5i64 {
        let cr = family(&orders, r);
        let tr = TateData::of(&cr).unwrap();
        let f = lift_chain_map(&cr, &c1).unwrap();
        let g = lift_chain_map(&c1, &cr).unwrap();
        let h = double_map(&f, &g, &double(&cr, None).unwrap(), &d1).unwrap();
        let v = tate_diagonal_check(&h, &tr, &t1).unwrap();
        assert_eq!(v.target_moduli, vec![BigInt::from(5)]);
        let nu = residue(&v.nu[(0, 0)], 5);
        let det = residue(&lift_f_det(&f), 5);
        assert_eq!(nu, det, "r = {r}");
        assert!(nu == r as u64 || nu == 5 - r as u64, "r = {r}, nu = {nu}");
    }
}

fn lift_f_det(f: &biaslab::foxbias::ChainMap) -> BigInt {
    biaslab::foxbias::induced_on_top_homology(f).unwrap().det
}

#[test]
fn nu_is_functorial() {
    let orders = [3u64, 3];
    let cs: Vec<_> = [1i64, 2, 1].iter().map(|&r| family(&orders, r)).collect();
    let ts: Vec<_> = cs.iter().map(|c| TateData::of(c).unwrap()).collect();
    let ds: Vec<_> = cs.iter().map(|c| double(c, None).unwrap()).collect();
    let f01 = lift_chain_map(&cs[0], &cs[1]).unwrap();
    let f12 = lift_chain_map(&cs[1], &cs[2]).unwrap();
    let g10 = lift_chain_map(&cs[1], &cs[0]).unwrap();
    let g21 = lift_chain_map(&cs[2], &cs[1]).unwrap();
    let h01 = double_map(&f01, &g10, &ds[0], &ds[1]).unwrap();
    let h12 = double_map(&f12, &g21, &ds[1], &ds[2]).unwrap();
    let h02 = double_map(&f01.then(&f12).unwrap(), &g21.then(&g10).unwrap(), &ds[0], &ds[2]).unwrap();
    let v01 = tate_diagonal_check(&h01, &ts[0], &ts[1]).unwrap();
    let v12 = tate_diagonal_check(&h12, &ts[1], &ts[2]).unwrap();
    let v02 = tate_diagonal_check(&h02, &ts[0], &ts[2]).unwrap();
    let three = BigInt::from(3);
    assert_eq!(v01.nu.mul(&v12.nu).reduce_mod(&three), v02.nu.reduce_mod(&three));
}

#[test]
fn quadratic_class_parity() {
    let c = family(&[3, 3, 3], 1);
    let id = lift_chain_map(&c, &c).unwrap();
    let ctx = QuadraticContext { m: 3, d: 3, n: 2, d_subgroup: UnitSubgroup::trivial(3).unwrap() };
    assert!(quadratic_bias_class(&id, &ctx).unwrap().class.is_identity());
    let ctx2 = QuadraticContext { m: 3, d: 2, n: 2, d_subgroup: UnitSubgroup::trivial(3).unwrap() };
    let c2 = family(&[3, 3], 1);
    assert!(quadratic_bias_class(&lift_chain_map(&c2, &c2).unwrap(), &ctx2).is_err());
}
