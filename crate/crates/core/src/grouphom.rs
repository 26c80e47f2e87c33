//! Integral homology of finite abelian groups by iterated Künneth.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numfn::binom;
use crate::units::factorize;

/// Rewrites a multiset of cyclic orders (with multiplicities) as invariant
/// factors `m₁ | m₂ | …`, dropping trivial summands.
pub fn invariant_factors(cyclic: &BTreeMap<u64, u64>) -> Vec<u64> {
    // prime -> exponents, one per cyclic summand
    let mut primary: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for (&order, &mult) in cyclic {
        if order <= 1 {
            continue;
        }
        for (p, a) in factorize(order) {
            primary.entry(p).or_default().extend(std::iter::repeat_n(a, mult as usize));
        }
    }
    let len = primary.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for (p, mut exps) in primary {
        exps.sort_unstable_by(|a, b| b.cmp(a));
        // largest power goes to the last invariant factor
        for (i, a) in exps.into_iter().enumerate() {
            out[len - 1 - i] *= p.pow(a);
        }
    }
    out
}

/// A finite abelian group in invariant-factor form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
}

impl FiniteAbelianGroup {
    /// Normalises any list of cyclic orders; orders of 1 are dropped.
    pub fn new(orders: &[u64]) -> Result<Self> {
        if orders.contains(&0) {
            return Err(Error::InvalidInput("cyclic factors must be finite".into()));
        }
        let mut counts = BTreeMap::new();
        for &o in orders {
            *counts.entry(o).or_insert(0) += 1;
        }
        Ok(FiniteAbelianGroup { factors: invariant_factors(&counts) })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { factors: Vec::new() }
    }

    /// `(Z/m)^d`.
    pub fn power(m: u64, d: usize) -> Result<Self> {
        Self::new(&vec![m; d])
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Minimal number of generators.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    /// Whether the order is a power of a single prime, returning it.
    pub fn p_group_prime(&self) -> Option<u64> {
        let primes: Vec<u64> = factorize(self.order()).into_iter().map(|(p, _)| p).collect();
        (primes.len() == 1).then(|| primes[0])
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.factors.iter().map(|m| format!("Z/{m}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// One homology group: free rank plus invariant factors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AbelianGroupData {
    pub free_rank: u64,
    pub torsion: Vec<u64>,
}

impl AbelianGroupData {
    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

/// Homology in degrees `0..=top`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedAbelian {
    pub degrees: Vec<AbelianGroupData>,
}

/// Working form: free rank and a multiset of cyclic orders.
#[derive(Clone, Debug, Default)]
struct Raw {
    free: u64,
    cyclic: BTreeMap<u64, u64>,
}

impl Raw {
    fn add_cyclic(&mut self, order: u64, mult: u64) {
        if order > 1 && mult > 0 {
            *self.cyclic.entry(order).or_insert(0) += mult;
        }
    }

    fn finish(&self) -> AbelianGroupData {
        AbelianGroupData { free_rank: self.free, torsion: invariant_factors(&self.cyclic) }
    }
}

fn cyclic_homology(m: u64, top: usize) -> Vec<Raw> {
    (0..=top)
        .map(|i| {
            let mut r = Raw::default();
            if i == 0 {
                r.free = 1;
            } else if i % 2 == 1 {
                r.add_cyclic(m, 1);
            }
            r
        })
        .collect()
}

fn kunneth(a: &[Raw], b: &[Raw], top: usize) -> Vec<Raw> {
    let mut out = vec![Raw::default(); top + 1];
    for i in 0..=top {
        for j in 0..=top - i {
            let (x, y) = (&a[i], &b[j]);
            out[i + j].free += x.free * y.free;
            for (&o, &mu) in &y.cyclic {
                out[i + j].add_cyclic(o, mu * x.free);
            }
            for (&o, &mu) in &x.cyclic {
                out[i + j].add_cyclic(o, mu * y.free);
            }
            for (&o1, &m1) in &x.cyclic {
                for (&o2, &m2) in &y.cyclic {
                    let g = o1.gcd(&o2);
                    out[i + j].add_cyclic(g, m1 * m2);
                    if i + j < top {
                        out[i + j + 1].add_cyclic(g, m1 * m2);
                    }
                }
            }
        }
    }
    out
}

/// `H_n(Z/m; Z)`.
pub fn homology_cyclic(m: u64, n: usize) -> AbelianGroupData {
    cyclic_homology(m, n)[n].finish()
}

/// Homology of `G` in degrees `0..=top` from the cyclic factors in the given
/// order.
pub fn homology_graded_of_factors(factors: &[u64], top: usize) -> GradedAbelian {
    let mut acc = cyclic_homology(1, top);
    for &m in factors {
        acc = kunneth(&acc, &cyclic_homology(m, top), top);
    }
    GradedAbelian { degrees: acc.iter().map(Raw::finish).collect() }
}

/// Invariant factors of `H_n(G; Z)` for `n ≥ 1`.
pub fn homology_abelian(g: &FiniteAbelianGroup, n: usize) -> Vec<u64> {
    assert!(n >= 1);
    homology_graded_of_factors(g.factors(), n).degrees[n].torsion.clone()
}

/// `ν(n,k) = Σ_{j=0}^{n} (−1)^{n+j} C(k+j−1, j)`.
pub fn nu(n: u64, k: u64) -> BigInt {
    assert!(k >= 1);
    let mut acc = BigInt::zero();
    for j in 0..=n {
        let t = binom(k + j - 1, j);
        if (n + j).is_multiple_of(2) {
            acc += t;
        } else {
            acc -= t;
        }
    }
    acc
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormComparison {
    pub m: u64,
    pub d: u64,
    pub t: u64,
    pub n: u64,
    pub kunneth: Vec<u64>,
    /// `Σ_{k=2}^{d} (ν(n,k) − (−1)^n)`.
    pub closed_form_r: BigInt,
    /// The shape `(Z/m)^r`, with an extra `Z/t` for odd `n`.
    pub closed_form: Vec<u64>,
    pub matches: bool,
}

/// Compares Künneth for `(Z/m)^d × Z/t` against the closed form
/// `(Z/m)^r` (even n) or `(Z/m)^r × Z/t` (odd n).
pub fn compare_closed_form(m: u64, d: u64, t: u64, n: u64) -> Result<ClosedFormComparison> {
    if m < 2 || t == 0 || !m.is_multiple_of(t) {
        return Err(Error::InvalidInput("need m >= 2 and t | m".into()));
    }
    let mut orders = vec![m; d as usize];
    orders.push(t);
    let g = FiniteAbelianGroup::new(&orders)?;
    let kunneth = homology_abelian(&g, n as usize);
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    let r: BigInt = (2..=d).map(|k| nu(n, k) - sign).sum();
    let mut cyc = BTreeMap::new();
    if let Some(r_small) = num_traits::ToPrimitive::to_u64(&r) {
        if r_small > 0 {
            cyc.insert(m, r_small);
        }
    }
    let mut closed: Vec<u64> = Vec::new();
    if n % 2 == 1 {
        *cyc.entry(t).or_insert(0) += 1;
    }
    if r >= BigInt::zero() {
        closed = invariant_factors(&cyc);
    }
    let matches = closed == kunneth;
    Ok(ClosedFormComparison { m, d, t, n, kunneth, closed_form_r: r, closed_form: closed, matches })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic() {
        assert_eq!(homology_cyclic(7, 1).torsion, vec![7]);
        assert!(homology_cyclic(7, 2).is_zero());
        assert!(homology_cyclic(1, 3).is_zero());
        assert_eq!(homology_cyclic(7, 0).free_rank, 1);
    }

    #[test]
    fn products() {
        let g = FiniteAbelianGroup::power(3, 3).unwrap();
        assert_eq!(homology_abelian(&g, 2), vec![3, 3, 3]);
        let g = FiniteAbelianGroup::power(2, 2).unwrap();
        assert_eq!(homology_abelian(&g, 3), vec![2, 2, 2]);
        let g = FiniteAbelianGroup::new(&[2, 3]).unwrap();
        assert_eq!(g.factors(), &[6]);
    }

    #[test]
    fn nu_values() {
        assert_eq!(nu(2, 1), BigInt::from(1));
        assert_eq!(nu(2, 2), BigInt::from(2));
        assert_eq!(nu(0, 5), BigInt::from(1));
    }

    #[test]
    fn closed_form_reports() {
        let c = compare_closed_form(5, 3, 1, 2).unwrap();
        assert_eq!(c.kunneth, vec![5, 5, 5]);
        assert_eq!(c.closed_form_r, BigInt::from(4));
        assert!(!c.matches);
        let c = compare_closed_form(9, 3, 3, 2).unwrap();
        assert_eq!(c.kunneth, vec![3, 3, 3, 9, 9, 9]);
        assert!(!c.matches);
    }
}
