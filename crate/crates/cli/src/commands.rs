use biaslab::doubling::{double, double_map, homology_pattern, tate_diagonal_check, TateData};
use biaslab::forms::{metabolic_fixed_forms, random_form_vanishing_on_fixed};
use biaslab::foxbias::q8p::{aut_q8_external_fact, explicit_f, explicit_g, theta};
use biaslab::foxbias::{
    abelian_family, compute_d_subgroup, lift_chain_map, polarised_bias, q8p_family_in, q8p_group, verify_chain_map,
    AutomorphismInput, Presentation,
};
use biaslab::groupring::FiniteGroupModel;
use biaslab::grouphom::homology_graded_of_factors;
use biaslab::numfn::{find_d, parity_table_check};
use biaslab::obstruction::{abelian_row, b_group, b_q_group, d_abelian, gamma_prime, invariants_abelian};
use biaslab::units::{
    class_of, cyclic_factors, exponent, factorize, pow_mod, quotient_order, unit_group_order, SubgroupDescriptor,
    UnitSubgroup,
};
use biaslab::unitary::lift_square;
use biaslab::Error;
use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::groups::{abelian, parse_group, GroupSpec};

/// Exit status plus message for a failed command.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, message: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TooLarge(_) => 3,
            Error::InvalidInput(_)
            | Error::Parse(_)
            | Error::NotAUnit(..)
            | Error::HypothesisViolation(_)
            | Error::InvalidPresentation(_)
            | Error::NotFound(_) => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

pub struct Outcome {
    pub result: Value,
    pub summary: String,
    /// All internal verifications passed.
    pub ok: bool,
}

type CmdResult = Result<Outcome, Failure>;

fn group(text: &str) -> Result<GroupSpec, Failure> {
    parse_group(text).map_err(Failure::usage)
}

fn is_prime(p: u64) -> bool {
    let f = factorize(p);
    f.len() == 1 && f[0].1 == 1
}

fn primitive_root(p: u64) -> u64 {
    let order = p - 1;
    let primes: Vec<u64> = factorize(order).into_iter().map(|(q, _)| q).collect();
    (2..p).find(|&g| primes.iter().all(|&q| pow_mod(g, order / q, p) != 1)).unwrap_or(1)
}

fn check_q8p(p: u64) -> Result<(), Failure> {
    if !is_prime(p) || p % 8 != 1 {
        return Err(Failure::usage(format!("q8 x p^3 needs a prime p = 1 mod 8, got {p}")));
    }
    Ok(())
}

/// `D(Q8 × (Z/p)^3)` from `θ: c ↦ c^g` for a primitive root `g`, plus the
/// `Aut(Q8)` fact.
fn q8p_d_subgroup(g: &std::sync::Arc<FiniteGroupModel>, p: u64) -> Result<(biaslab::foxbias::DSubgroupReport, u64), Failure> {
    let c1 = q8p_family_in(g, 1)?.complex()?;
    let root = primitive_root(p);
    let autos = vec![AutomorphismInput {
        label: format!("c -> c^{root}"),
        theta: theta(g, root as i64)?,
        chain_map: Some(explicit_g(g, root as i64)),
    }];
    Ok((compute_d_subgroup(&c1, autos, aut_q8_external_fact(p), p)?, root))
}

pub fn obstruction(group_text: &str, n: u64) -> CmdResult {
    match group(group_text)? {
        GroupSpec::Abelian(orders) => {
            let g = abelian(&orders).map_err(Failure::usage)?;
            let row = abelian_row(&g, n)?;
            let summary = format!(
                "G = {}, n = {}: m = {}, r = {}, chi_min = {}, |B| = {}, |B_Q| = {}",
                row.group,
                n,
                row.m,
                row.r,
                row.chi_min,
                row.b_order,
                row.b_q_order.map_or("n/a".to_string(), |x| x.to_string())
            );
            Ok(Outcome { result: serde_json::to_value(&row).unwrap(), summary, ok: true })
        }
        GroupSpec::Q8P(p) => {
            check_q8p(p)?;
            if n != 2 {
                return Err(Failure::usage("q8 x p^3 is only supported for n = 2"));
            }
            let g = q8p_group(p)?;
            let (report, _) = q8p_d_subgroup(&g, p)?;
            let b = b_group(p, &report.subgroup)?;
            let bq = b_q_group(p, 3, n, &report.subgroup)?;
            let result = json!({
                "group": format!("Q8 x (Z/{p})^3"),
                "n": n,
                "m": p,
                "r": 3,
                "chi_min": 4,
                "homology": [p, p, p],
                "d_subgroup": report,
                "b_order": b.order,
                "b_q_order": bq.order,
            });
            let summary = format!("G = Q8 x (Z/{p})^3, n = 2: m = {p}, r = 3, |B| = {}, |B_Q| = {}", b.order, bq.order);
            Ok(Outcome { result, summary, ok: true })
        }
    }
}

pub fn parity(n_min: u64, n_max: u64, d_min: u64, d_max: u64, csv: bool) -> CmdResult {
    if n_max > 256 || d_max > 256 {
        return Err(Failure::usage("ranges are limited to 256"));
    }
    let (n_lo, d_lo) = (n_min.max(2), d_min.max(2));
    let report = if n_lo > n_max || d_lo > d_max { Default::default() } else { parity_table_check(d_max, n_max)? };
    let rows: Vec<_> = report.rows.iter().filter(|r| r.n >= n_lo && r.d >= d_lo).cloned().collect();
    let in_range = |&(d, n): &(u64, u64)| n >= n_lo && d >= d_lo && n <= n_max && d <= d_max;
    let e_mm: Vec<_> = report.e_mismatches.iter().copied().filter(in_range).collect();
    let s_mm: Vec<_> = report.s_mismatches.iter().copied().filter(in_range).collect();
    let evens: Vec<u64> = (n_lo..=n_max).filter(|n| n % 2 == 0).collect();
    let witnesses = evens
        .par_iter()
        .map(|&n| find_d(n).map(|d| (n, d)))
        .collect::<Result<Vec<_>, _>>()?;
    let filtered = biaslab::numfn::ParityReport { rows, ..Default::default() };
    let table = filtered.to_csv();
    let mut summary = if csv { table.clone() } else { format!("{} cells, {} e mismatches, {} s mismatches\n", filtered.rows.len(), e_mm.len(), s_mm.len()) };
    summary.push_str("witnesses:");
    for (n, d) in &witnesses {
        summary.push_str(&format!(" {n}->{d}"));
    }
    let result = json!({
        "cells": filtered.rows.len(),
        "csv": table,
        "e_mismatches": e_mm,
        "s_mismatches": s_mm,
        "witnesses": witnesses,
    });
    Ok(Outcome { result, summary, ok: true })
}

fn check_unit(r: i64, m: u64) -> Result<(), Failure> {
    if num_integer::gcd(r.rem_euclid(m as i64) as u64, m) != 1 {
        return Err(Failure::usage(format!("r = {r} is not a unit mod {m}")));
    }
    Ok(())
}

pub fn bias(kind: &str, arg: &str, r: i64) -> CmdResult {
    match kind {
        "abelian" => {
            let orders = match group(arg)? {
                GroupSpec::Abelian(o) => o,
                _ => return Err(Failure::usage("abelian preset needs cyclic orders")),
            };
            if orders.len() < 2 {
                return Err(Failure::usage("abelian preset needs at least two cyclic factors"));
            }
            let g = abelian(&orders).map_err(Failure::usage)?;
            let inv = invariants_abelian(&g, 2)?;
            let m = inv.modulus;
            check_unit(r, m)?;
            let c1 = abelian_family(&orders, 1)?.complex()?;
            let cr = abelian_family(&orders, r)?.complex()?;
            let f = lift_chain_map(&cr, &c1)?;
            let b = polarised_bias(&f, m)?;
            let dsub = d_abelian(&g, 2)?;
            let b_class = b.class.push_to(&dsub.with_minus_one()?)?;
            let bq = if inv.rank >= 3 && inv.homology.windows(2).all(|w| w[0] == w[1]) {
                let den = UnitSubgroup::new(m, SubgroupDescriptor::MinusPowers(2))?.join(&dsub)?;
                Some(class_of(m, &BigInt::from(b.class.rep()), &den)?)
            } else {
                None
            };
            let summary = format!(
                "X^{r} vs X^1 over {g}: det = {}, polarised bias {}, B-class trivial: {}, B_Q-class trivial: {}",
                b.induced.det,
                b.class,
                b_class.is_identity(),
                bq.as_ref().map_or("n/a".into(), |c| c.is_identity().to_string())
            );
            let result = json!({
                "preset": "abelian",
                "group": g.to_string(),
                "r": r,
                "m": m,
                "chain_map_verified": true,
                "induced": b.induced,
                "polarised_bias": b.class,
                "b_class": b_class,
                "b_q_class": bq,
            });
            Ok(Outcome { result, summary, ok: true })
        }
        "q8p" => {
            let p: u64 = arg.parse().map_err(|_| Failure::usage("q8p preset needs a prime"))?;
            check_q8p(p)?;
            check_unit(r, p)?;
            let g = q8p_group(p)?;
            let c1 = q8p_family_in(&g, 1)?.complex()?;
            let cr = q8p_family_in(&g, r)?.complex()?;
            let f = verify_chain_map(explicit_f(&g, r), &cr, &c1)?;
            let b = polarised_bias(&f, p)?;
            let (report, _) = q8p_d_subgroup(&g, p)?;
            let b_class = b.class.push_to(&report.subgroup)?;
            let den = UnitSubgroup::new(p, SubgroupDescriptor::MinusPowers(2))?.join(&report.subgroup)?;
            let bq = class_of(p, &BigInt::from(b.class.rep()), &den)?;
            let summary = format!(
                "X_{r} vs X_1 over Q8 x (Z/{p})^3: det = {}, polarised bias {}, B-class trivial: {}, B_Q-class trivial: {}",
                b.induced.det,
                b.class,
                b_class.is_identity(),
                bq.is_identity()
            );
            let result = json!({
                "preset": "q8p",
                "p": p,
                "r": r,
                "chain_map_verified": true,
                "induced": b.induced,
                "polarised_bias": b.class,
                "d_subgroup": report,
                "b_class": b_class,
                "b_q_class": bq,
            });
            Ok(Outcome { result, summary, ok: true })
        }
        other => Err(Failure::usage(format!("unknown preset '{other}'"))),
    }
}

pub fn lift(a: u64, m: u64, d: usize, eps: i64) -> CmdResult {
    if m < 2 || num_integer::gcd(a, m) != 1 {
        return Err(Failure::usage(format!("{a} is not a unit mod {m}")));
    }
    if eps != 1 && eps != -1 {
        return Err(Failure::usage("eps must be 1 or -1"));
    }
    let l = lift_square(a, m, d, eps)?;
    let ok = l.matches && l.factors_certified && l.product_unitary;
    let summary = format!(
        "a = {a}, m = {m}, d = {d}, eps = {eps}: {} factors, certified: {}, product unitary: {}, reduction matches: {}",
        l.word.factors.len(),
        l.factors_certified,
        l.product_unitary,
        l.matches
    );
    Ok(Outcome { result: serde_json::to_value(&l).unwrap(), summary, ok })
}

pub fn double_cmd(kind: &str, arg: &str, r: i64, verify: bool, seed: u64) -> CmdResult {
    if kind != "abelian" {
        return Err(Failure { code: 3, message: "doubles are only computed for abelian presets".into() });
    }
    let orders = match group(arg)? {
        GroupSpec::Abelian(o) if o.len() >= 2 => o,
        _ => return Err(Failure::usage("abelian preset needs at least two cyclic orders")),
    };
    let g = abelian(&orders).map_err(Failure::usage)?;
    let m = invariants_abelian(&g, 2)?.modulus;
    check_unit(r, m)?;
    let c1 = abelian_family(&orders, 1)?.complex()?;
    let cr = abelian_family(&orders, r)?.complex()?;
    let (t1, tr) = (TateData::of(&c1)?, TateData::of(&cr)?);
    let (d1, dr) = (double(&c1, None)?, double(&cr, None)?);
    let f = lift_chain_map(&cr, &c1)?;
    let gmap = lift_chain_map(&c1, &cr)?;
    let h = double_map(&f, &gmap, &dr, &d1)?;
    let tate = tate_diagonal_check(&h, &tr, &t1)?;
    let mut ok = tate.diagonal && tate.isometry && tate.well_defined;
    let mut result = json!({
        "group": g.to_string(),
        "r": r,
        "ranks": dr.complex.ranks(),
        "tate_moduli": tate.target_moduli.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "nu": tate.nu,
        "mu": tate.mu,
        "diagonal": tate.diagonal,
        "isometry": tate.isometry,
    });
    let mut summary = format!("M(f,g) for X^{r} -> X^1 over {g}: diagonal isometry of Tate forms, nu = {:?}", tate.nu.to_i64());
    if verify {
        let pattern = match homology_pattern(&dr) {
            Ok(p) => {
                ok &= p.matches;
                json!(p)
            }
            Err(Error::TooLarge(msg)) => json!({ "skipped": msg }),
            Err(e) => return Err(e.into()),
        };
        let eps = cr.epsilon();
        let mut rng = StdRng::seed_from_u64(seed);
        let phi = random_form_vanishing_on_fixed(&tr.lattice, eps, &mut rng, 3);
        let with_phi = double(&cr, Some(&phi))?;
        let (fixed, tate_form) = metabolic_fixed_forms(&tr.lattice, &phi, eps, &tr.forms)?;
        let forms_ok = fixed == tr.forms.e_fixed && tate_form == tr.forms.e_tate;
        ok &= forms_ok && with_phi.complex == dr.complex;
        summary.push_str(&format!("; homology pattern {}; Met fixed/Tate forms match evaluation forms: {forms_ok}", pattern));
        result["homology_pattern"] = pattern;
        result["beta"] = json!(tr.forms.beta.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        result["forms_match"] = json!(forms_ok);
        result["e_fixed"] = json!(tr.forms.e_fixed);
        result["e_tate"] = json!(tr.forms.e_tate);
    }
    Ok(Outcome { result, summary, ok })
}

pub fn homology(group_text: Option<&str>, n: usize, presentation: Option<&str>) -> CmdResult {
    if let Some(text) = presentation {
        let orders = match group_text.map(group).transpose()? {
            Some(GroupSpec::Abelian(o)) => o,
            Some(GroupSpec::Q8P(_)) => return Err(Failure::usage("presentations are mapped into abelian targets only")),
            None => return Err(Failure::usage("--presentation needs --group for the target")),
        };
        let g = FiniteGroupModel::abelian(&orders)?;
        let pres = Presentation::parse(text, g)?;
        let c = pres.complex()?;
        let groups = c.augmented_homology();
        let summary = format!("H_*(Z (x) C) of {pres}: {groups:?}");
        return Ok(Outcome { result: json!({ "presentation": pres.to_string(), "homology": groups }), summary, ok: true });
    }
    let orders = match group_text.map(group).transpose()? {
        Some(GroupSpec::Abelian(o)) => o,
        Some(GroupSpec::Q8P(_)) => return Err(Failure::usage("group homology is computed for abelian groups only")),
        None => return Err(Failure::usage("--group is required")),
    };
    let graded = homology_graded_of_factors(&orders, n);
    let summary = graded
        .degrees
        .iter()
        .enumerate()
        .map(|(i, h)| format!("H_{i} = Z^{} + {:?}", h.free_rank, h.torsion))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Outcome { result: json!({ "group": orders, "homology": graded.degrees }), summary, ok: true })
}

pub fn units(m: u64, class: Option<i64>) -> CmdResult {
    if m < 1 {
        return Err(Failure::usage("m must be positive"));
    }
    let pm_sq = UnitSubgroup::new(m, SubgroupDescriptor::MinusPowers(2))?;
    let pm = UnitSubgroup::new(m, SubgroupDescriptor::MinusOne)?;
    let mut result = json!({
        "m": m,
        "order": unit_group_order(m),
        "cyclic_factors": cyclic_factors(m),
        "exponent": exponent(m),
        "quotient_pm1": quotient_order(&pm),
        "quotient_pm_squares": quotient_order(&pm_sq),
    });
    if let Some(r) = class {
        let x = BigInt::from(r);
        result["class_pm1"] = json!(class_of(m, &x, &pm)?);
        result["class_pm_squares"] = json!(class_of(m, &x, &pm_sq)?);
    }
    let summary = format!(
        "(Z/{m})^x has order {}, factors {:?}; |(Z/{m})^x/pm1| = {}, |(Z/{m})^x/(pm squares)| = {}",
        unit_group_order(m),
        cyclic_factors(m),
        quotient_order(&pm),
        quotient_order(&pm_sq)
    );
    Ok(Outcome { result, summary, ok: true })
}

pub fn table_examples(max_m: u64) -> CmdResult {
    let g65 = abelian(&[65, 65, 65]).map_err(Failure::usage)?;
    let row65 = abelian_row(&g65, 2)?;
    let bq65 = row65.b_q_order.unwrap_or(0);
    let sweep: Vec<(u64, u64, u64)> = (2..=max_m)
        .into_par_iter()
        .filter(|&m| factorize(m).iter().all(|&(_, e)| e == 1))
        .map(|m| {
            let t = factorize(m).len() as u64;
            let h = UnitSubgroup::new(m, SubgroupDescriptor::MinusPowers(2)).expect("valid modulus");
            (m, t, quotient_order(&h))
        })
        .collect();
    let failures: Vec<_> = sweep.iter().filter(|&&(_, t, q)| q < 1 << (t - 1)).cloned().collect();
    let odd_failures = failures.iter().filter(|f| f.0 % 2 == 1).count();
    let gp = gamma_prime(5, 3, 2)?;
    let gp2: Vec<u64> = (2..=8).flat_map(|d| (2..=8).map(move |n| (d, n))).map(|(d, n)| gamma_prime(2, d, n)).collect::<Result<_, _>>()?;
    let ok = bq65 == 4 && failures.is_empty() && gp == 2 && gp2.iter().all(|&x| x == 1);
    let summary = format!(
        "|B_Q((Z/65)^3, 2)| = {bq65}; {} square-free m <= {max_m} checked, {} below 2^(t-1) ({odd_failures} of them odd); gamma'(5,3,2) = {gp}; gamma'(2,d,n) = 1 for 2 <= d,n <= 8: {}",
        sweep.len(),
        failures.len(),
        gp2.iter().all(|&x| x == 1)
    );
    let result = json!({
        "b_q_65_cubed": bq65,
        "square_free_checked": sweep.len(),
        "square_free_failures": failures,
        "odd_square_free_failures": odd_failures,
        "gamma_prime_5_3_2": gp,
        "gamma_prime_2_all_one": gp2.iter().all(|&x| x == 1),
    });
    Ok(Outcome { result, summary, ok })
}
