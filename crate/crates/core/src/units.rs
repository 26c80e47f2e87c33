//! The unit group (Z/m)^×, its subgroups and quotients.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest unit group we are willing to enumerate.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(m as i128) as u64)
}

/// Residue of a big integer in `[0, m)`.
pub fn residue(r: &BigInt, m: u64) -> u64 {
    r.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

/// Prime factorisation by trial division, primes ascending.
pub fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut a = 0;
            while m.is_multiple_of(p) {
                m /= p;
                a += 1;
            }
            out.push((p, a));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

pub fn unit_group_order(m: u64) -> u64 {
    assert!(m >= 1);
    factorize(m).iter().map(|&(p, a)| (p - 1) * p.pow(a - 1)).product()
}

/// Orders of the cyclic factors of (Z/m)^× from the CRT decomposition, with
/// (Z/2^k)^× split as Z/2 × Z/2^{k−2} for k ≥ 3. Factors of order one are
/// omitted.
pub fn cyclic_factors(m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for (p, a) in factorize(m) {
        if p == 2 {
            match a {
                1 => {}
                2 => out.push(2),
                _ => {
                    out.push(2);
                    out.push(1 << (a - 2));
                }
            }
        } else {
            out.push((p - 1) * p.pow(a - 1));
        }
    }
    out
}

/// Exponent of (Z/m)^× (the Carmichael function).
pub fn exponent(m: u64) -> u64 {
    cyclic_factors(m).into_iter().fold(1, |acc, c| acc.lcm(&c))
}

/// Whether −1 is a k-th power modulo m, decided prime power by prime power.
fn minus_one_is_power(m: u64, k: u64) -> bool {
    factorize(m).iter().all(|&(p, a)| {
        if p == 2 {
            a == 1 || k % 2 == 1
        } else {
            let c = (p - 1) * p.pow(a - 1);
            (c / 2) % c.gcd(&k) == 0
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SubgroupDescriptor {
    Trivial,
    MinusOne,
    /// `{x^k}`; `k = 0` gives the trivial subgroup.
    Powers(u64),
    /// `{±x^k}`.
    MinusPowers(u64),
    Generated(Vec<u64>),
    Product(Vec<SubgroupDescriptor>),
}

impl fmt::Display for SubgroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupDescriptor::Trivial => write!(f, "trivial"),
            SubgroupDescriptor::MinusOne => write!(f, "pm1"),
            SubgroupDescriptor::Powers(k) => write!(f, "pow({k})"),
            SubgroupDescriptor::MinusPowers(k) => write!(f, "pmpow({k})"),
            SubgroupDescriptor::Generated(g) => {
                let parts: Vec<String> = g.iter().map(u64::to_string).collect();
                write!(f, "gen({})", parts.join(","))
            }
            SubgroupDescriptor::Product(parts) => {
                let parts: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "prod({})", parts.join(","))
            }
        }
    }
}

/// A subgroup of (Z/m)^× together with its enumerated elements.
#[derive(Clone, Debug)]
pub struct UnitSubgroup {
    m: u64,
    descriptor: SubgroupDescriptor,
    elements: Arc<Vec<u64>>,
}

impl PartialEq for UnitSubgroup {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.elements == other.elements
    }
}

impl Eq for UnitSubgroup {}

fn units_of(m: u64) -> impl Iterator<Item = u64> {
    (0..m).filter(move |&x| x.gcd(&m) == 1)
}

fn closure(m: u64, gens: &[u64]) -> Vec<u64> {
    let mut seen = vec![false; m as usize];
    let one = 1 % m;
    seen[one as usize] = true;
    let mut stack = vec![one];
    let mut out = vec![one];
    while let Some(x) = stack.pop() {
        for &g in gens {
            let y = mul_mod(x, g, m);
            if !seen[y as usize] {
                seen[y as usize] = true;
                out.push(y);
                stack.push(y);
            }
        }
    }
    out.sort_unstable();
    out
}

fn enumerate(m: u64, d: &SubgroupDescriptor) -> Result<Vec<u64>> {
    let one = 1 % m;
    let minus = (m - 1) % m;
    Ok(match d {
        SubgroupDescriptor::Trivial => vec![one],
        SubgroupDescriptor::MinusOne => closure(m, &[minus]),
        SubgroupDescriptor::Powers(k) => {
            let mut v: Vec<u64> = units_of(m).map(|x| pow_mod(x, *k, m)).collect();
            v.sort_unstable();
            v.dedup();
            v
        }
        SubgroupDescriptor::MinusPowers(k) => {
            let gens: Vec<u64> = enumerate(m, &SubgroupDescriptor::Powers(*k))?;
            let mut gens = gens;
            gens.push(minus);
            closure(m, &gens)
        }
        SubgroupDescriptor::Generated(g) => {
            for &x in g {
                if x.gcd(&m) != 1 {
                    return Err(Error::NotAUnit(x.to_string(), m.to_string()));
                }
            }
            let g: Vec<u64> = g.iter().map(|x| x % m).collect();
            closure(m, &g)
        }
        SubgroupDescriptor::Product(parts) => {
            let mut gens = Vec::new();
            for p in parts {
                gens.extend(enumerate(m, p)?);
            }
            gens.sort_unstable();
            gens.dedup();
            closure(m, &gens)
        }
    })
}

impl UnitSubgroup {
    pub fn new(m: u64, descriptor: SubgroupDescriptor) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("modulus must be positive".into()));
        }
        if unit_group_order(m) > ENUMERATION_LIMIT {
            return Err(Error::TooLarge(format!("(Z/{m})^x has more than {ENUMERATION_LIMIT} elements")));
        }
        let elements = Arc::new(enumerate(m, &descriptor)?);
        Ok(UnitSubgroup { m, descriptor, elements })
    }

    pub fn trivial(m: u64) -> Result<Self> {
        Self::new(m, SubgroupDescriptor::Trivial)
    }

    /// `x ↦ x^e` image for a possibly huge exponent `e`, stored with the
    /// exponent replaced by `gcd(e, exponent of (Z/m)^×)`.
    pub fn powers(m: u64, e: &BigInt) -> Result<Self> {
        Self::new(m, SubgroupDescriptor::Powers(reduce_exponent(m, e)))
    }

    pub fn minus_powers(m: u64, e: &BigInt) -> Result<Self> {
        Self::new(m, SubgroupDescriptor::MinusPowers(reduce_exponent(m, e)))
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn descriptor(&self) -> &SubgroupDescriptor {
        &self.descriptor
    }

    /// Sorted element list.
    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&(x % self.m)).is_ok()
    }

    /// The subgroup generated by `self` and `other`.
    pub fn join(&self, other: &UnitSubgroup) -> Result<Self> {
        assert_eq!(self.m, other.m);
        Self::new(self.m, SubgroupDescriptor::Product(vec![self.descriptor.clone(), other.descriptor.clone()]))
    }

    /// `self` together with −1.
    pub fn with_minus_one(&self) -> Result<Self> {
        self.join(&Self::new(self.m, SubgroupDescriptor::MinusOne)?)
    }
}

impl fmt::Display for UnitSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.descriptor.fmt(f)
    }
}

fn reduce_exponent(m: u64, e: &BigInt) -> u64 {
    let lambda = exponent(m);
    let g = e.gcd(&BigInt::from(lambda));
    if g.is_zero() { lambda } else { g.to_u64().unwrap() }
}

pub fn subgroup_elements(h: &UnitSubgroup) -> &[u64] {
    h.elements()
}

/// Index of `H` in (Z/m)^×.
pub fn quotient_order(h: &UnitSubgroup) -> u64 {
    unit_group_order(h.m) / h.order()
}

/// Smallest nonnegative representative of every coset of `H`, sorted.
pub fn coset_representatives(h: &UnitSubgroup) -> Vec<u64> {
    let m = h.m;
    let mut covered = vec![false; m as usize];
    let mut reps = Vec::new();
    for x in units_of(m) {
        if covered[x as usize] {
            continue;
        }
        reps.push(x);
        for &y in h.elements() {
            covered[mul_mod(x, y, m) as usize] = true;
        }
    }
    reps
}

/// Index of the subgroup described by `d` computed from the cyclic
/// decomposition, without enumerating. `None` for descriptors that need
/// enumeration.
pub fn structured_quotient_order(m: u64, d: &SubgroupDescriptor) -> Option<u64> {
    let factors = cyclic_factors(m);
    let total: u64 = factors.iter().product();
    let powers_index = |k: u64| -> u64 {
        if k == 0 { total } else { factors.iter().map(|c| c.gcd(&k)).product() }
    };
    let minus_trivial = m <= 2;
    match d {
        SubgroupDescriptor::Trivial => Some(total),
        SubgroupDescriptor::MinusOne => Some(if minus_trivial { 1 } else { total / 2 }),
        SubgroupDescriptor::Powers(k) => Some(powers_index(*k)),
        SubgroupDescriptor::MinusPowers(k) => {
            let idx = powers_index(*k);
            let contains = minus_trivial || (*k != 0 && minus_one_is_power(m, *k));
            Some(if contains { idx } else { idx / 2 })
        }
        _ => None,
    }
}

/// A coset `r·H` in (Z/m)^×/H, stored by its smallest nonnegative member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitClass {
    m: u64,
    rep: u64,
    subgroup: UnitSubgroup,
}

impl UnitClass {
    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn rep(&self) -> u64 {
        self.rep
    }

    pub fn subgroup(&self) -> &UnitSubgroup {
        &self.subgroup
    }

    pub fn is_identity(&self) -> bool {
        self.subgroup.contains(self.rep)
    }

    pub fn mul(&self, other: &UnitClass) -> Result<UnitClass> {
        if self.m != other.m || self.subgroup != other.subgroup {
            return Err(Error::GroupMismatch);
        }
        class_of(self.m, &BigInt::from(mul_mod(self.rep, other.rep, self.m)), &self.subgroup)
    }

    /// Image in the quotient by a larger subgroup.
    pub fn push_to(&self, larger: &UnitSubgroup) -> Result<UnitClass> {
        if larger.m != self.m || !self.subgroup.elements().iter().all(|&x| larger.contains(x)) {
            return Err(Error::GroupMismatch);
        }
        class_of(self.m, &BigInt::from(self.rep), larger)
    }
}

impl fmt::Display for UnitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] mod {} / {}", self.rep, self.m, self.subgroup)
    }
}

impl Serialize for UnitClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("UnitClass", 3)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("rep", &self.rep)?;
        st.serialize_field("subgroup", &self.subgroup.to_string())?;
        st.end()
    }
}

pub fn class_of(m: u64, r: &BigInt, h: &UnitSubgroup) -> Result<UnitClass> {
    if h.m != m {
        return Err(Error::GroupMismatch);
    }
    let x = residue(r, m);
    if x.gcd(&m) != 1 {
        return Err(Error::NotAUnit(r.to_string(), m.to_string()));
    }
    let rep = h.elements().iter().map(|&y| mul_mod(x, y, m)).min().unwrap();
    Ok(UnitClass { m, rep, subgroup: h.clone() })
}
