//! Integral group rings of groups `Q8 × A` or `A` with `A` a product of
//! cyclic groups, with sparse elements and matrices.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intlin::IntMatrix;

/// Cayley table of Q8 on `x^a y^b ↦ a + 4b`.
fn q8_mul(i: usize, j: usize) -> usize {
    let (a, b) = (i % 4, i / 4);
    let (c, d) = (j % 4, j / 4);
    let mut e = if b == 0 { a + c } else { a + 4 - c };
    if b == 1 && d == 1 {
        e += 2;
    }
    (e % 4) + 4 * ((b + d) % 2)
}

/// A finite group `Q8 × Z/m₁ × … × Z/m_k` (the Q8 factor optional).
///
/// Elements are numbered lexicographically: the Q8 coordinate is most
/// significant, then the cyclic exponents in order, each in `[0, m_i)`.
/// Q8 elements are listed as `1, x, x², x³, y, xy, x²y, x³y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteGroupModel {
    q8: bool,
    cyclic: Vec<u64>,
    names: Vec<String>,
    abelian_order: usize,
}

impl FiniteGroupModel {
    /// `cyclic` are the orders of the named cyclic generators, which need
    /// not be in invariant-factor form.
    pub fn new(q8: bool, cyclic: Vec<u64>, names: Vec<String>) -> Result<Arc<Self>> {
        if cyclic.len() != names.len() {
            return Err(Error::InvalidInput("one name per cyclic factor".into()));
        }
        if cyclic.contains(&0) {
            return Err(Error::InvalidInput("cyclic orders must be positive".into()));
        }
        let mut seen: Vec<&str> = if q8 { vec!["x", "y"] } else { vec![] };
        for n in &names {
            if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') || !n.starts_with(|c: char| c.is_ascii_alphabetic()) {
                return Err(Error::InvalidInput(format!("bad generator name {n:?}")));
            }
            if seen.contains(&n.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate generator name {n:?}")));
            }
            seen.push(n);
        }
        let abelian_order = cyclic.iter().try_fold(1usize, |acc, &m| acc.checked_mul(m as usize));
        let abelian_order = abelian_order.ok_or_else(|| Error::TooLarge("group order overflows".into()))?;
        Ok(Arc::new(FiniteGroupModel { q8, cyclic, names, abelian_order }))
    }

    /// Abelian group with generators named `a, b, c, …`.
    pub fn abelian(cyclic: &[u64]) -> Result<Arc<Self>> {
        let names = (0..cyclic.len()).map(default_name).collect();
        Self::new(false, cyclic.to_vec(), names)
    }

    /// `Q8 × Z/m₁ × …` with cyclic generators named `a, b, c, …`.
    pub fn q8_times(cyclic: &[u64]) -> Result<Arc<Self>> {
        let names = (0..cyclic.len()).map(default_name).collect();
        Self::new(true, cyclic.to_vec(), names)
    }

    pub fn has_q8(&self) -> bool {
        self.q8
    }

    pub fn cyclic_orders(&self) -> &[u64] {
        &self.cyclic
    }

    pub fn order(&self) -> usize {
        self.abelian_order * if self.q8 { 8 } else { 1 }
    }

    /// Generator names in order: `x, y` (if Q8 is present), then the cyclic ones.
    pub fn generator_names(&self) -> Vec<String> {
        let mut out: Vec<String> = if self.q8 { vec!["x".into(), "y".into()] } else { vec![] };
        out.extend(self.names.iter().cloned());
        out
    }

    pub fn generators(&self) -> Vec<usize> {
        let mut out = Vec::new();
        if self.q8 {
            out.push(self.q8_element(1));
            out.push(self.q8_element(4));
        }
        for i in 0..self.cyclic.len() {
            let mut e = vec![0; self.cyclic.len()];
            e[i] = 1;
            out.push(self.compose(0, &e));
        }
        out
    }

    pub fn generator_by_name(&self, name: &str) -> Option<usize> {
        let names = self.generator_names();
        names.iter().position(|n| n == name).map(|i| self.generators()[i])
    }

    pub fn identity(&self) -> usize {
        0
    }

    fn q8_element(&self, q: usize) -> usize {
        q * self.abelian_order
    }

    /// Splits an element into its Q8 index and cyclic exponents.
    pub fn decompose(&self, g: usize) -> (usize, Vec<u64>) {
        let q = g / self.abelian_order;
        let mut a = g % self.abelian_order;
        let mut exps = vec![0; self.cyclic.len()];
        for (i, &m) in self.cyclic.iter().enumerate().rev() {
            exps[i] = (a % m as usize) as u64;
            a /= m as usize;
        }
        (q, exps)
    }

    /// Element with Q8 index `q` and cyclic exponents `exps` (reduced).
    pub fn compose(&self, q: usize, exps: &[u64]) -> usize {
        let mut a = 0usize;
        for (&e, &m) in exps.iter().zip(&self.cyclic) {
            a = a * m as usize + (e % m) as usize;
        }
        q * self.abelian_order + a
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        let (qa, aa) = (g / self.abelian_order, g % self.abelian_order);
        let (qb, ab) = (h / self.abelian_order, h % self.abelian_order);
        let q = if self.q8 { q8_mul(qa, qb) } else { 0 };
        // mixed-radix addition, least significant factor last
        let (mut x, mut y) = (aa, ab);
        let mut out = 0usize;
        let mut place = 1usize;
        for &m in self.cyclic.iter().rev() {
            let m = m as usize;
            let d = (x % m + y % m) % m;
            out += d * place;
            place *= m;
            x /= m;
            y /= m;
        }
        q * self.abelian_order + out
    }

    pub fn inv(&self, g: usize) -> usize {
        let (q, exps) = self.decompose(g);
        let qi = if self.q8 { (0..8).find(|&j| q8_mul(q, j) == 0).unwrap() } else { 0 };
        let inv: Vec<u64> = exps.iter().zip(&self.cyclic).map(|(&e, &m)| (m - e) % m).collect();
        self.compose(qi, &inv)
    }

    pub fn pow(&self, g: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(g) } else { g };
        let mut acc = 0;
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    pub fn element_order(&self, g: usize) -> u64 {
        let mut acc = g;
        let mut k = 1;
        while acc != 0 {
            acc = self.mul(acc, g);
            k += 1;
        }
        k
    }

    /// Subgroup generated by `gens`, as a sorted list.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        let mut out = vec![0usize];
        while let Some(g) = queue.pop_front() {
            for &s in gens {
                let h = self.mul(g, s);
                if !seen[h] {
                    seen[h] = true;
                    out.push(h);
                    queue.push_back(h);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Monomial text such as `x^2*y*a^4*c`, or `1`.
    pub fn format_element(&self, g: usize) -> String {
        let (q, exps) = self.decompose(g);
        let mut parts = Vec::new();
        let mut push = |name: &str, e: u64| match e {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{e}")),
        };
        if self.q8 {
            push("x", (q % 4) as u64);
            push("y", (q / 4) as u64);
        }
        for (name, &e) in self.names.iter().zip(&exps) {
            push(name, e);
        }
        if parts.is_empty() { "1".into() } else { parts.join("*") }
    }
}

fn default_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("g{i}")
    }
}

/// An automorphism given as a permutation of the element numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAutomorphism {
    group: Arc<FiniteGroupModel>,
    images: Vec<usize>,
}

impl GroupAutomorphism {
    pub fn identity(group: &Arc<FiniteGroupModel>) -> Self {
        GroupAutomorphism { group: group.clone(), images: (0..group.order()).collect() }
    }

    /// The automorphism sending the model's generators to `gen_images`;
    /// fails unless this extends to a bijective homomorphism.
    pub fn from_generator_images(group: &Arc<FiniteGroupModel>, gen_images: &[usize]) -> Result<Self> {
        let gens = group.generators();
        if gens.len() != gen_images.len() {
            return Err(Error::NotAnAutomorphism("one image per generator".into()));
        }
        let n = group.order();
        let mut images = vec![usize::MAX; n];
        images[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(g) = queue.pop_front() {
            for (&s, &t) in gens.iter().zip(gen_images) {
                let h = group.mul(g, s);
                let img = group.mul(images[g], t);
                if images[h] == usize::MAX {
                    images[h] = img;
                    queue.push_back(h);
                } else if images[h] != img {
                    return Err(Error::NotAnAutomorphism("generator images violate a relation".into()));
                }
            }
        }
        let mut hit = vec![false; n];
        for &i in &images {
            if i == usize::MAX || hit[i] {
                return Err(Error::NotAnAutomorphism("map is not bijective".into()));
            }
            hit[i] = true;
        }
        Ok(GroupAutomorphism { group: group.clone(), images })
    }

    pub fn apply(&self, g: usize) -> usize {
        self.images[g]
    }

    pub fn group(&self) -> &Arc<FiniteGroupModel> {
        &self.group
    }

    pub fn compose(&self, other: &GroupAutomorphism) -> GroupAutomorphism {
        GroupAutomorphism { group: self.group.clone(), images: other.images.iter().map(|&g| self.images[g]).collect() }
    }

    pub fn inverse(&self) -> GroupAutomorphism {
        let mut images = vec![0; self.images.len()];
        for (g, &h) in self.images.iter().enumerate() {
            images[h] = g;
        }
        GroupAutomorphism { group: self.group.clone(), images }
    }
}

/// Element of ZG as sorted `(element, coefficient)` pairs with no zero
/// coefficients. Coefficients are `i64`; overflow panics rather than wraps.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupRingElement {
    group: Arc<FiniteGroupModel>,
    terms: Vec<(u32, i64)>,
}

fn checked(a: i64, b: i64, op: fn(i64, i64) -> Option<i64>) -> i64 {
    op(a, b).expect("group ring coefficient overflow")
}

fn normalise(mut terms: Vec<(u32, i64)>) -> Vec<(u32, i64)> {
    terms.sort_unstable_by_key(|t| t.0);
    let mut out: Vec<(u32, i64)> = Vec::with_capacity(terms.len());
    for (g, c) in terms {
        match out.last_mut() {
            Some(last) if last.0 == g => last.1 = checked(last.1, c, i64::checked_add),
            _ => out.push((g, c)),
        }
    }
    out.retain(|t| t.1 != 0);
    out
}

impl GroupRingElement {
    pub fn zero(group: &Arc<FiniteGroupModel>) -> Self {
        GroupRingElement { group: group.clone(), terms: Vec::new() }
    }

    pub fn one(group: &Arc<FiniteGroupModel>) -> Self {
        Self::monomial(group, 0, 1)
    }

    pub fn monomial(group: &Arc<FiniteGroupModel>, g: usize, c: i64) -> Self {
        let terms = if c == 0 { vec![] } else { vec![(g as u32, c)] };
        GroupRingElement { group: group.clone(), terms }
    }

    pub fn from_terms(group: &Arc<FiniteGroupModel>, terms: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let terms = normalise(terms.into_iter().map(|(g, c)| (g as u32, c)).collect());
        GroupRingElement { group: group.clone(), terms }
    }

    /// `Σ_{g ∈ G} g`.
    pub fn norm(group: &Arc<FiniteGroupModel>) -> Self {
        GroupRingElement { group: group.clone(), terms: (0..group.order() as u32).map(|g| (g, 1)).collect() }
    }

    pub fn group(&self) -> &Arc<FiniteGroupModel> {
        &self.group
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.terms.iter().map(|&(g, c)| (g as usize, c))
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms == [(0, 1)]
    }

    pub fn coeff(&self, g: usize) -> i64 {
        match self.terms.binary_search_by_key(&(g as u32), |t| t.0) {
            Ok(i) => self.terms[i].1,
            Err(_) => 0,
        }
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.group, &other.group) || self.group == other.group {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Ok(GroupRingElement { group: self.group.clone(), terms: normalise(terms) })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(g, a) in &self.terms {
            for &(h, b) in &other.terms {
                terms.push((self.group.mul(g as usize, h as usize) as u32, checked(a, b, i64::checked_mul)));
            }
        }
        Ok(GroupRingElement { group: self.group.clone(), terms: normalise(terms) })
    }

    /// Panics on a group mismatch; see [`try_add`](Self::try_add).
    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("group mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Panics on a group mismatch; see [`try_mul`](Self::try_mul).
    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("group mismatch")
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Self {
        let terms = if k == 0 { vec![] } else { self.terms.iter().map(|&(g, c)| (g, checked(c, k, i64::checked_mul))).collect() };
        GroupRingElement { group: self.group.clone(), terms }
    }

    /// Left multiplication by a group element.
    pub fn left_translate(&self, g: usize) -> Self {
        let terms = self.terms.iter().map(|&(h, c)| (self.group.mul(g, h as usize) as u32, c)).collect();
        GroupRingElement { group: self.group.clone(), terms: normalise(terms) }
    }

    /// `g ↦ g⁻¹` extended linearly.
    pub fn involute(&self) -> Self {
        let terms = self.terms.iter().map(|&(g, c)| (self.group.inv(g as usize) as u32, c)).collect();
        GroupRingElement { group: self.group.clone(), terms: normalise(terms) }
    }

    /// Sum of coefficients.
    pub fn augment(&self) -> i64 {
        self.terms.iter().fold(0, |acc, t| checked(acc, t.1, i64::checked_add))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.group);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// `1 + u + … + u^{m−1}`.
    pub fn sigma(&self, m: u32) -> Self {
        let mut acc = Self::zero(&self.group);
        let mut p = Self::one(&self.group);
        for _ in 0..m {
            acc = acc.add(&p);
            p = p.mul(self);
        }
        acc
    }

    pub fn apply_automorphism(&self, theta: &GroupAutomorphism) -> Result<Self> {
        if theta.group.as_ref() != self.group.as_ref() {
            return Err(Error::GroupMismatch);
        }
        let terms = self.terms.iter().map(|&(g, c)| (theta.apply(g as usize) as u32, c)).collect();
        Ok(GroupRingElement { group: self.group.clone(), terms: normalise(terms) })
    }

    /// Parses text such as `3*x^2*a^4*c - 1` or `1 - b^-1`.
    pub fn parse(group: &Arc<FiniteGroupModel>, text: &str) -> Result<Self> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty element".into()));
        }
        let mut acc = Self::zero(group);
        let bytes = cleaned.as_bytes();
        let mut start = 0;
        let mut sign = 1i64;
        if bytes[0] == b'+' || bytes[0] == b'-' {
            sign = if bytes[0] == b'-' { -1 } else { 1 };
            start = 1;
        }
        let mut i = start;
        loop {
            // a term ends at the next +/- that does not follow '^'
            let mut j = i;
            while j < bytes.len() && !((bytes[j] == b'+' || bytes[j] == b'-') && j > i && bytes[j - 1] != b'^') {
                j += 1;
            }
            let term = parse_term(group, &cleaned[i..j])?;
            acc = acc.add(&term.scale(sign));
            if j >= bytes.len() {
                break;
            }
            sign = if bytes[j] == b'-' { -1 } else { 1 };
            i = j + 1;
            if i >= bytes.len() {
                return Err(Error::Parse("dangling sign".into()));
            }
        }
        Ok(acc)
    }
}

fn parse_term(group: &Arc<FiniteGroupModel>, term: &str) -> Result<GroupRingElement> {
    if term.is_empty() {
        return Err(Error::Parse("empty term".into()));
    }
    let mut coeff = 1i64;
    let mut g = group.identity();
    for factor in term.split('*') {
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in {term:?}")));
        }
        if factor.chars().all(|c| c.is_ascii_digit()) {
            let v: i64 = factor.parse().map_err(|_| Error::Parse(format!("bad coefficient {factor:?}")))?;
            coeff = checked(coeff, v, i64::checked_mul);
            continue;
        }
        let (name, exp) = match factor.split_once('^') {
            Some((n, e)) => (n, e.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?),
            None => (factor, 1),
        };
        let s = group.generator_by_name(name).ok_or_else(|| Error::Parse(format!("unknown generator {name:?}")))?;
        g = group.mul(g, group.pow(s, exp));
    }
    Ok(GroupRingElement::monomial(group, g, coeff))
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, &(g, c)) in self.terms.iter().enumerate() {
            let mono = self.group.format_element(g as usize);
            let mag = c.unsigned_abs();
            let body = match (mono.as_str(), mag) {
                ("1", _) => mag.to_string(),
                (_, 1) => mono,
                _ => format!("{mag}*{mono}"),
            };
            match (i, c < 0) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for GroupRingElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Matrix over ZG acting on row vectors from the right.
#[derive(Clone, PartialEq, Eq)]
pub struct ZGMatrix {
    group: Arc<FiniteGroupModel>,
    rows: usize,
    cols: usize,
    data: Vec<GroupRingElement>,
}

impl ZGMatrix {
    pub fn zeros(group: &Arc<FiniteGroupModel>, rows: usize, cols: usize) -> Self {
        ZGMatrix { group: group.clone(), rows, cols, data: vec![GroupRingElement::zero(group); rows * cols] }
    }

    pub fn identity(group: &Arc<FiniteGroupModel>, n: usize) -> Self {
        let mut m = Self::zeros(group, n, n);
        for i in 0..n {
            m.set(i, i, GroupRingElement::one(group));
        }
        m
    }

    pub fn from_rows(group: &Arc<FiniteGroupModel>, rows: Vec<Vec<GroupRingElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged matrix".into()));
        }
        let data: Vec<GroupRingElement> = rows.into_iter().flatten().collect();
        if data.iter().any(|e| e.group.as_ref() != group.as_ref()) {
            return Err(Error::GroupMismatch);
        }
        Ok(ZGMatrix { group: group.clone(), rows: r, cols: c, data })
    }

    /// Parses rows of element text.
    pub fn parse(group: &Arc<FiniteGroupModel>, rows: &[&[&str]]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|row| row.iter().map(|t| GroupRingElement::parse(group, t)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(group, parsed)
    }

    pub fn diagonal(group: &Arc<FiniteGroupModel>, entries: &[GroupRingElement]) -> Self {
        let mut m = Self::zeros(group, entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn group(&self) -> &Arc<FiniteGroupModel> {
        &self.group
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &GroupRingElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: GroupRingElement) {
        self.data[i * self.cols + j] = e;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(GroupRingElement::is_zero)
    }

    pub fn try_mul(&self, other: &ZGMatrix) -> Result<ZGMatrix> {
        if self.group.as_ref() != other.group.as_ref() {
            return Err(Error::GroupMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(&self.group, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut terms = Vec::new();
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    for &(g, x) in &a.terms {
                        for &(h, y) in &b.terms {
                            terms.push((self.group.mul(g as usize, h as usize) as u32, checked(x, y, i64::checked_mul)));
                        }
                    }
                }
                out.set(i, j, GroupRingElement { group: self.group.clone(), terms: normalise(terms) });
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &ZGMatrix) -> ZGMatrix {
        self.try_mul(other).expect("incompatible matrices")
    }

    pub fn add(&self, other: &ZGMatrix) -> ZGMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect();
        ZGMatrix { group: self.group.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &ZGMatrix) -> ZGMatrix {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ZGMatrix {
        self.map(|e| e.neg())
    }

    pub fn map(&self, f: impl Fn(&GroupRingElement) -> GroupRingElement) -> ZGMatrix {
        ZGMatrix { group: self.group.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Matrix of the dual map: transpose with the involution applied.
    pub fn dual(&self) -> ZGMatrix {
        let mut out = Self::zeros(&self.group, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).involute());
            }
        }
        out
    }

    pub fn hstack(&self, other: &ZGMatrix) -> ZGMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(&self.group, self.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(0, self.cols, other);
        out
    }

    pub fn vstack(&self, other: &ZGMatrix) -> ZGMatrix {
        assert_eq!(self.cols, other.cols);
        let mut out = Self::zeros(&self.group, self.rows + other.rows, self.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, 0, other);
        out
    }

    pub fn block_diag(&self, other: &ZGMatrix) -> ZGMatrix {
        let mut out = Self::zeros(&self.group, self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &ZGMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn apply_automorphism(&self, theta: &GroupAutomorphism) -> Result<ZGMatrix> {
        let data = self.data.iter().map(|e| e.apply_automorphism(theta)).collect::<Result<Vec<_>>>()?;
        Ok(ZGMatrix { group: self.group.clone(), rows: self.rows, cols: self.cols, data })
    }

    /// Entrywise augmentation.
    pub fn augment(&self) -> IntMatrix {
        IntMatrix::from_fn(self.rows, self.cols, |i, j| BigInt::from(self.get(i, j).augment()))
    }

    /// The Z-linear map on `Z^{rows·|G|} → Z^{cols·|G|}` in the standard
    /// basis `e_i ⊗ g`. Block `(i,j)` has `(g, k)` entry the coefficient of
    /// `k` in `g·M_ij`.
    pub fn z_expand(&self) -> IntMatrix {
        let n = self.group.order();
        let mut out = IntMatrix::zeros(self.rows * n, self.cols * n);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                for g in 0..n {
                    for &(h, c) in &e.terms {
                        let k = self.group.mul(g, h as usize);
                        out[(i * n + g, j * n + k)] += c;
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for ZGMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ZGMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for ZGMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect()).collect();
        rows.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(g: &Arc<FiniteGroupModel>, s: &str) -> GroupRingElement {
        GroupRingElement::parse(g, s).unwrap()
    }

    #[test]
    fn q8_relations() {
        let g = FiniteGroupModel::q8_times(&[]).unwrap();
        let x = g.generator_by_name("x").unwrap();
        let y = g.generator_by_name("y").unwrap();
        assert_eq!(g.pow(x, 2), g.pow(y, 2));
        assert_eq!(g.mul(g.mul(y, x), g.inv(y)), g.inv(x));
        assert_eq!(g.closure(&[x, y]).len(), 8);
        assert_eq!(g.element_order(x), 4);
    }

    #[test]
    fn ring_examples() {
        let g = FiniteGroupModel::abelian(&[4]).unwrap();
        let x = el(&g, "a");
        let one = GroupRingElement::one(&g);
        assert!(x.sub(&one).mul(&x.sigma(4)).is_zero());
        let n = GroupRingElement::norm(&g);
        assert_eq!(n.left_translate(1), n);
        assert_eq!(n.augment(), 4);
        let g8 = FiniteGroupModel::abelian(&[8]).unwrap();
        assert_eq!(el(&g8, "1 + a").mul(&el(&g8, "1 - a")), el(&g8, "1 - a^2"));
        assert_eq!(el(&g8, "2 + 3*a").involute(), el(&g8, "2 + 3*a^7"));
    }

    #[test]
    fn text_round_trip() {
        let g = FiniteGroupModel::q8_times(&[17, 17, 17]).unwrap();
        let e = el(&g, "3*x^2*a^4*c - 1");
        assert_eq!(e.to_string(), "-1 + 3*x^2*a^4*c");
        assert_eq!(el(&g, &e.to_string()), e);
        assert_eq!(el(&g, "y^-1"), el(&g, "x^2*y"));
        assert_eq!(el(&g, "a^-1"), el(&g, "a^16"));
    }

    #[test]
    fn expansion() {
        let g = FiniteGroupModel::abelian(&[2]).unwrap();
        let m = ZGMatrix::parse(&g, &[&["a - 1"]]).unwrap();
        assert_eq!(m.z_expand(), IntMatrix::from_i64(&[&[-1, 1], &[1, -1]]));
        assert!(ZGMatrix::identity(&g, 3).z_expand().is_identity());
    }

    #[test]
    fn automorphisms() {
        let g = FiniteGroupModel::abelian(&[5]).unwrap();
        let a = g.generator_by_name("a").unwrap();
        let t = GroupAutomorphism::from_generator_images(&g, &[g.pow(a, 2)]).unwrap();
        assert_eq!(t.apply(g.pow(a, 3)), g.pow(a, 6));
        assert!(GroupAutomorphism::from_generator_images(&g, &[0]).is_err());
        let q = FiniteGroupModel::q8_times(&[]).unwrap();
        let x = q.generator_by_name("x").unwrap();
        assert!(GroupAutomorphism::from_generator_images(&q, &[x, x]).is_err());
    }
}
