use biaslab::doubling::{double, homology_pattern};
use biaslab::foxbias::q8p::explicit_f;
use biaslab::foxbias::{abelian_family, lift_chain_map, polarised_bias, q8p_family_in, q8p_group, verify_chain_map};
use biaslab::intlin::{smith_normal_form, IntMatrix};
use biaslab::numfn::{find_d, parity_table_check};
use biaslab::unitary::lift_square;
use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_bigint::BigInt;

fn numfn(c: &mut Criterion) {
    c.bench_function("parity_table_48", |b| b.iter(|| parity_table_check(black_box(48), 48).unwrap()));
    c.bench_function("find_d_even_to_64", |b| b.iter(|| (2..=64u64).step_by(2).map(|n| find_d(n).unwrap()).sum::<u64>()));
}

fn intlin(c: &mut Criterion) {
    let a = IntMatrix::from_fn(12, 12, |i, j| BigInt::from(((i * 7 + j * 13) % 11) as i64 - 5));
    c.bench_function("snf_12x12", |b| b.iter(|| smith_normal_form(black_box(&a))));
}

fn bias(c: &mut Criterion) {
    let c1 = abelian_family(&[5, 5], 1).unwrap().complex().unwrap();
    let c2 = abelian_family(&[5, 5], 2).unwrap().complex().unwrap();
    c.bench_function("abelian_bias_5x5", |b| b.iter(|| polarised_bias(&lift_chain_map(&c2, &c1).unwrap(), 5).unwrap()));

    let g = q8p_group(17).unwrap();
    let q1 = q8p_family_in(&g, 1).unwrap().complex().unwrap();
    let q3 = q8p_family_in(&g, 3).unwrap().complex().unwrap();
    c.bench_function("q8p17_bias", |b| b.iter(|| polarised_bias(&verify_chain_map(explicit_f(&g, 3), &q3, &q1).unwrap(), 17).unwrap()));
}

fn unitary(c: &mut Criterion) {
    c.bench_function("lift_square_m17", |b| b.iter(|| lift_square(black_box(3), 17, 3, 1).unwrap()));
}

fn doubling(c: &mut Criterion) {
    let c1 = abelian_family(&[3, 3], 1).unwrap().complex().unwrap();
    let mut group = c.benchmark_group("doubling");
    group.sample_size(10);
    group.bench_function("homology_pattern_3x3", |b| b.iter(|| homology_pattern(&double(&c1, None).unwrap()).unwrap()));
    group.finish();
}

criterion_group!(benches, numfn, intlin, bias, unitary, doubling);
criterion_main!(benches);
