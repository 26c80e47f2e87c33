//! Modulus, χ_min, and the obstruction groups B(G,n) and B_Q(G,n).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grouphom::{homology_abelian, FiniteAbelianGroup};
use crate::numfn::{e_exact, s_exact};
use crate::units::{coset_representatives, quotient_order, SubgroupDescriptor, UnitSubgroup};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionInvariants {
    pub modulus: u64,
    pub rank: u64,
    pub chi_min: i64,
    pub homology: Vec<u64>,
}

/// Invariants from `H_n(G)` given by its invariant factors.
pub fn invariants_from_homology(homology: Vec<u64>, n: u64) -> ObstructionInvariants {
    let rank = homology.len() as u64;
    let modulus = homology.first().copied().unwrap_or(1);
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    ObstructionInvariants { modulus, rank, chi_min: sign + rank as i64, homology }
}

pub fn invariants_abelian(g: &FiniteAbelianGroup, n: u64) -> Result<ObstructionInvariants> {
    if n < 2 {
        return Err(Error::InvalidInput("n must be at least 2".into()));
    }
    Ok(invariants_from_homology(homology_abelian(g, n as usize), n))
}

/// `((Z/m)^×)^{e(d,n)}` with `d = d(G)` and `m = m_{(G,n)}`.
pub fn d_abelian(g: &FiniteAbelianGroup, n: u64) -> Result<UnitSubgroup> {
    let inv = invariants_abelian(g, n)?;
    if g.rank() == 0 {
        return UnitSubgroup::trivial(inv.modulus);
    }
    UnitSubgroup::powers(inv.modulus, &e_exact(g.rank() as u64, n))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionGroup {
    pub modulus: u64,
    #[serde(serialize_with = "ser_display")]
    pub denominator: UnitSubgroup,
    pub order: u64,
    pub coset_representatives: Vec<u64>,
}

fn ser_display<S: serde::Serializer>(h: &UnitSubgroup, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&h.to_string())
}

impl ObstructionGroup {
    fn quotient(denominator: UnitSubgroup) -> Self {
        ObstructionGroup {
            modulus: denominator.modulus(),
            order: quotient_order(&denominator),
            coset_representatives: coset_representatives(&denominator),
            denominator,
        }
    }
}

/// `(Z/m)^× / (±1·D)`.
pub fn b_group(m: u64, d: &UnitSubgroup) -> Result<ObstructionGroup> {
    if d.modulus() != m {
        return Err(Error::GroupMismatch);
    }
    Ok(ObstructionGroup::quotient(d.with_minus_one()?))
}

/// `(Z/m)^× / (±1·squares·D)` for even `n`; trivial for odd `n`. The closed
/// form is only available when `H_n(G) ≅ (Z/m)^d` with `d ≥ 3`.
pub fn b_q_group(m: u64, d: u64, n: u64, dsub: &UnitSubgroup) -> Result<ObstructionGroup> {
    if dsub.modulus() != m {
        return Err(Error::GroupMismatch);
    }
    if n % 2 == 1 {
        return Ok(ObstructionGroup::quotient(UnitSubgroup::new(m, SubgroupDescriptor::Powers(1))?));
    }
    if d < 3 {
        return Err(Error::HypothesisViolation(format!("closed form for B_Q needs d >= 3, got d = {d}")));
    }
    let squares = UnitSubgroup::new(m, SubgroupDescriptor::MinusPowers(2))?;
    Ok(ObstructionGroup::quotient(squares.join(dsub)?))
}

/// `|B(G,n)|` for abelian `G`.
pub fn gamma(g: &FiniteAbelianGroup, n: u64) -> Result<u64> {
    let inv = invariants_abelian(g, n)?;
    Ok(b_group(inv.modulus, &d_abelian(g, n)?)?.order)
}

/// `gcd(e, (p−1)/2) / gcd(e, s, (p−1)/2)`, and 1 for `p = 2`.
pub fn gamma_prime(p: u64, d: u64, n: u64) -> Result<u64> {
    if p == 2 {
        return Ok(1);
    }
    if d < 2 || n < 2 {
        return Err(Error::InvalidInput("gamma_prime needs d, n >= 2".into()));
    }
    let half = BigInt::from((p - 1) / 2);
    let e = e_exact(d, n);
    let s = s_exact(d, n).abs();
    let top = e.gcd(&half);
    let bottom = top.gcd(&s);
    Ok((top / bottom).to_u64().unwrap())
}

/// Condition under which `H_n(G) ≅ (Z/m)^r`: all invariant factors equal.
pub fn homology_is_homogeneous(inv: &ObstructionInvariants) -> bool {
    inv.homology.windows(2).all(|w| w[0] == w[1])
}

/// One row of the obstruction table for an abelian group.
#[derive(Clone, Debug, Serialize)]
pub struct ObstructionRow {
    pub group: String,
    pub n: u64,
    pub m: u64,
    pub r: u64,
    pub chi_min: i64,
    pub e: Option<String>,
    pub s: Option<String>,
    pub b_order: u64,
    pub b_q_order: Option<u64>,
    pub gamma: u64,
    pub gamma_prime: Option<u64>,
    pub note: Option<String>,
}

pub fn abelian_row(g: &FiniteAbelianGroup, n: u64) -> Result<ObstructionRow> {
    let inv = invariants_abelian(g, n)?;
    let d = g.rank() as u64;
    let dsub = d_abelian(g, n)?;
    let b = b_group(inv.modulus, &dsub)?;
    let (b_q_order, note) = if n % 2 == 1 {
        (Some(1), None)
    } else if !homology_is_homogeneous(&inv) || inv.rank < 3 {
        (None, Some(format!("closed form for B_Q needs H_n(G) = (Z/m)^r with r >= 3; here H_n has factors {:?}", inv.homology)))
    } else {
        (Some(b_q_group(inv.modulus, inv.rank, n, &dsub)?.order), None)
    };
    let gamma_prime = match g.p_group_prime() {
        Some(p) if d >= 2 => Some(gamma_prime(p, d, n)?),
        _ => None,
    };
    Ok(ObstructionRow {
        group: g.to_string(),
        n,
        m: inv.modulus,
        r: inv.rank,
        chi_min: inv.chi_min,
        e: (d >= 1).then(|| e_exact(d, n).to_string()),
        s: (d >= 2).then(|| s_exact(d, n).to_string()),
        b_order: b.order,
        b_q_order,
        gamma: b.order,
        gamma_prime,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants() {
        let g = FiniteAbelianGroup::power(5, 3).unwrap();
        let inv = invariants_abelian(&g, 2).unwrap();
        assert_eq!((inv.modulus, inv.rank, inv.chi_min), (5, 3, 4));
        let g = FiniteAbelianGroup::power(2, 2).unwrap();
        let inv = invariants_abelian(&g, 2).unwrap();
        assert_eq!((inv.modulus, inv.rank, inv.chi_min), (2, 1, 2));
        let inv = invariants_abelian(&FiniteAbelianGroup::trivial(), 2).unwrap();
        assert_eq!((inv.modulus, inv.rank, inv.chi_min), (1, 0, 1));
    }

    #[test]
    fn groups() {
        let g = FiniteAbelianGroup::power(5, 3).unwrap();
        let dsub = d_abelian(&g, 2).unwrap();
        assert_eq!(dsub.elements(), &[1, 4]);
        assert_eq!(b_group(5, &dsub).unwrap().order, 2);
        let sq17 = UnitSubgroup::new(17, SubgroupDescriptor::Powers(2)).unwrap();
        assert_eq!(b_group(17, &sq17).unwrap().order, 2);
        assert_eq!(b_q_group(17, 3, 2, &sq17).unwrap().order, 2);
        assert_eq!(b_q_group(17, 3, 3, &sq17).unwrap().order, 1);
        assert!(b_q_group(17, 2, 2, &sq17).is_err());
        let sq65 = UnitSubgroup::new(65, SubgroupDescriptor::Powers(2)).unwrap();
        assert_eq!(b_q_group(65, 3, 2, &sq65).unwrap().order, 4);
        assert_eq!(b_group(1, &UnitSubgroup::trivial(1).unwrap()).unwrap().order, 1);
    }

    #[test]
    fn gammas() {
        assert_eq!(gamma(&FiniteAbelianGroup::power(5, 3).unwrap(), 2).unwrap(), 2);
        assert_eq!(gamma(&FiniteAbelianGroup::power(7, 2).unwrap(), 2).unwrap(), 1);
        assert_eq!(gamma(&FiniteAbelianGroup::power(11, 1).unwrap(), 2).unwrap(), 1);
        assert_eq!(gamma_prime(5, 3, 2).unwrap(), 2);
        assert_eq!(gamma_prime(2, 4, 4).unwrap(), 1);
        assert_eq!(gamma_prime(3, 3, 2).unwrap(), 1);
    }
}
