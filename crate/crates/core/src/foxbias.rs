//! Presentations, Fox calculus, algebraic complexes over ZG, chain maps
//! between them, and the polarised bias.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groupring::{FiniteGroupModel, GroupAutomorphism, GroupRingElement, ZGMatrix};
use crate::intlin::{chain_homology, left_kernel_basis, HomologyGroup, IntMatrix, LeftSolver};
use crate::units::{class_of, UnitClass, UnitSubgroup, SubgroupDescriptor};

/// Letters `(generator index, exponent)`.
pub type Word = Vec<(usize, i64)>;

/// Largest `|G|·rank` the chain-map solver will z-expand.
pub const LIFT_LIMIT: usize = 4000;

/// A finite presentation together with a map of its generators into a
/// finite group model.
#[derive(Clone, Debug)]
pub struct Presentation {
    names: Vec<String>,
    relators: Vec<Word>,
    target: Arc<FiniteGroupModel>,
    images: Vec<usize>,
}

impl Presentation {
    /// Checks that every relator dies in the target and that the images
    /// generate it.
    pub fn new(names: Vec<String>, relators: Vec<Word>, target: Arc<FiniteGroupModel>, images: Vec<usize>) -> Result<Self> {
        if names.len() != images.len() {
            return Err(Error::InvalidPresentation("one image per generator".into()));
        }
        if images.iter().any(|&g| g >= target.order()) {
            return Err(Error::InvalidPresentation("generator image outside the group".into()));
        }
        for w in &relators {
            if w.iter().any(|&(g, _)| g >= names.len()) {
                return Err(Error::InvalidPresentation("relator uses an unknown generator".into()));
            }
        }
        let p = Presentation { names, relators, target, images };
        for (i, w) in p.relators.iter().enumerate() {
            if p.evaluate(w) != p.target.identity() {
                return Err(Error::InvalidPresentation(format!("relator {} ({}) is not trivial in the target", i + 1, p.format_word(w))));
            }
        }
        if p.target.closure(&p.images).len() != p.target.order() {
            return Err(Error::InvalidPresentation("generator images do not generate the target".into()));
        }
        Ok(p)
    }

    /// Parses `<x,y | x^5, [x^2,y], x*y*x^-1*y^-1>`. Generators are mapped
    /// to target generators of the same name, or positionally when the
    /// names do not all occur in the target.
    pub fn parse(text: &str, target: Arc<FiniteGroupModel>) -> Result<Self> {
        let (names, relators) = parse_presentation_text(text)?;
        let by_name: Option<Vec<usize>> = names.iter().map(|n| target.generator_by_name(n)).collect();
        let images = match by_name {
            Some(v) => v,
            None => {
                let gens = target.generators();
                if gens.len() != names.len() {
                    return Err(Error::InvalidPresentation(format!(
                        "{} generators but the target has {}; give matching names",
                        names.len(),
                        gens.len()
                    )));
                }
                gens
            }
        };
        Self::new(names, relators, target, images)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn target(&self) -> &Arc<FiniteGroupModel> {
        &self.target
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn evaluate(&self, w: &Word) -> usize {
        w.iter().fold(self.target.identity(), |acc, &(g, e)| self.target.mul(acc, self.target.pow(self.images[g], e)))
    }

    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = w
            .iter()
            .map(|&(g, e)| if e == 1 { self.names[g].clone() } else { format!("{}^{}", self.names[g], e) })
            .collect();
        parts.join("*")
    }

    /// `∂r/∂x_j` evaluated in ZG.
    pub fn fox_derivative(&self, relator: &Word, j: usize) -> GroupRingElement {
        let g = &self.target;
        let mut prefix = g.identity();
        let mut terms = Vec::new();
        for &(x, e) in relator {
            let xe = self.images[x];
            if x == j {
                if e > 0 {
                    let mut p = prefix;
                    for _ in 0..e {
                        terms.push((p, 1));
                        p = g.mul(p, xe);
                    }
                } else {
                    let xi = g.inv(xe);
                    let mut p = prefix;
                    for _ in 0..-e {
                        p = g.mul(p, xi);
                        terms.push((p, -1));
                    }
                }
            }
            prefix = g.mul(prefix, g.pow(xe, e));
        }
        GroupRingElement::from_terms(g, terms)
    }

    /// Relators as rows, generators as columns.
    pub fn fox_matrix(&self) -> ZGMatrix {
        let rows = self
            .relators
            .iter()
            .map(|r| (0..self.names.len()).map(|j| self.fox_derivative(r, j)).collect())
            .collect();
        ZGMatrix::from_rows(&self.target, rows).expect("fox matrix shape")
    }

    /// The column `(image(x_i) − 1)`.
    pub fn d1(&self) -> ZGMatrix {
        let one = GroupRingElement::one(&self.target);
        let rows = self.images.iter().map(|&g| vec![GroupRingElement::monomial(&self.target, g, 1).sub(&one)]).collect();
        ZGMatrix::from_rows(&self.target, rows).expect("d1 shape")
    }

    pub fn complex(&self) -> Result<AlgebraicComplex> {
        AlgebraicComplex::new(&self.target, vec![self.d1(), self.fox_matrix()])
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|w| self.format_word(w)).collect();
        write!(f, "<{} | {}>", self.names.join(","), rels.join(", "))
    }
}

pub fn fox_derivative(p: &Presentation, relator: &Word, j: usize) -> GroupRingElement {
    p.fox_derivative(relator, j)
}

pub fn complex_of_presentation(p: &Presentation) -> Result<AlgebraicComplex> {
    p.complex()
}

fn parse_presentation_text(text: &str) -> Result<(Vec<String>, Vec<Word>)> {
    let t = text.trim();
    let inner = t
        .strip_prefix('<')
        .and_then(|s| s.strip_suffix('>'))
        .ok_or_else(|| Error::Parse("presentation must look like <gens | relators>".into()))?;
    let (gens, rels) = inner.split_once('|').ok_or_else(|| Error::Parse("missing '|'".into()))?;
    let names: Vec<String> = gens.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    for n in &names {
        if !n.starts_with(|c: char| c.is_ascii_alphabetic()) || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::Parse(format!("bad generator name {n:?}")));
        }
    }
    let mut relators = Vec::new();
    for piece in split_top_level(rels) {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let mut parser = WordParser { s: piece.as_bytes(), pos: 0, names: &names };
        let w = parser.word()?;
        if parser.pos != parser.s.len() {
            return Err(Error::Parse(format!("trailing input in relator {piece:?}")));
        }
        relators.push(w);
    }
    Ok((names, relators))
}

/// Splits on commas outside brackets.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

struct WordParser<'a> {
    s: &'a [u8],
    pos: usize,
    names: &'a [String],
}

fn invert(w: &Word) -> Word {
    w.iter().rev().map(|&(g, e)| (g, -e)).collect()
}

/// Appends letters, merging powers of the same generator.
fn append(out: &mut Word, w: &[(usize, i64)]) {
    for &(g, e) in w {
        match out.last_mut() {
            Some(last) if last.0 == g => {
                last.1 += e;
                if last.1 == 0 {
                    out.pop();
                }
            }
            _ if e != 0 => out.push((g, e)),
            _ => {}
        }
    }
}

fn power(w: &Word, k: i64) -> Word {
    let base = if k < 0 { invert(w) } else { w.clone() };
    let mut out = Vec::new();
    for _ in 0..k.unsigned_abs() {
        append(&mut out, &base);
    }
    out
}

impl WordParser<'_> {
    fn skip(&mut self) {
        while self.pos < self.s.len() && (self.s[self.pos] == b' ' || self.s[self.pos] == b'*') {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn word(&mut self) -> Result<Word> {
        let mut out = Vec::new();
        loop {
            self.skip();
            match self.peek() {
                None | Some(b',') | Some(b']') | Some(b')') => break,
                _ => {
                    let f = self.factor()?;
                    append(&mut out, &f);
                }
            }
        }
        Ok(out)
    }

    fn factor(&mut self) -> Result<Word> {
        let base = match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let u = self.word()?;
                if self.peek() != Some(b',') {
                    return Err(Error::Parse("expected ',' in commutator".into()));
                }
                self.pos += 1;
                let v = self.word()?;
                if self.peek() != Some(b']') {
                    return Err(Error::Parse("expected ']'".into()));
                }
                self.pos += 1;
                let mut w = u.clone();
                append(&mut w, &v);
                append(&mut w, &invert(&u));
                append(&mut w, &invert(&v));
                w
            }
            Some(b'(') => {
                self.pos += 1;
                let u = self.word()?;
                if self.peek() != Some(b')') {
                    return Err(Error::Parse("expected ')'".into()));
                }
                self.pos += 1;
                u
            }
            Some(b'1') if !self.s.get(self.pos + 1).is_some_and(|c| c.is_ascii_alphanumeric()) => {
                self.pos += 1;
                Vec::new()
            }
            _ => {
                let rest = &self.s[self.pos..];
                let best = self
                    .names
                    .iter()
                    .enumerate()
                    .filter(|(_, n)| rest.starts_with(n.as_bytes()))
                    .max_by_key(|(_, n)| n.len())
                    .ok_or_else(|| Error::Parse(format!("unknown generator at {:?}", String::from_utf8_lossy(rest))))?;
                self.pos += best.1.len();
                vec![(best.0, 1)]
            }
        };
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let start = self.pos;
            if self.peek() == Some(b'-') {
                self.pos += 1;
            }
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let k: i64 = std::str::from_utf8(&self.s[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| Error::Parse("bad exponent".into()))?;
            return Ok(power(&base, k));
        }
        Ok(base)
    }
}

/// `⟨x1,…,xd | x_i^{m_i}, [x1^r, x2], [x_i, x_j] (other i<j)⟩` over
/// `Z/m1 × … × Z/md`.
pub fn abelian_family(orders: &[u64], r: i64) -> Result<Presentation> {
    let d = orders.len();
    if d < 2 {
        return Err(Error::InvalidInput("the abelian family needs at least two factors".into()));
    }
    let names: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    let target = FiniteGroupModel::new(false, orders.to_vec(), names.clone())?;
    let mut relators: Vec<Word> = orders.iter().enumerate().map(|(i, &m)| vec![(i, m as i64)]).collect();
    for i in 0..d {
        for j in i + 1..d {
            let ri = if (i, j) == (0, 1) { r } else { 1 };
            relators.push(vec![(i, ri), (j, 1), (i, -ri), (j, -1)]);
        }
    }
    let images = target.generators();
    Presentation::new(names, relators, target, images)
}

/// `Q8 × (Z/p)³` with cyclic generators `a, b, c`.
pub fn q8p_group(p: u64) -> Result<Arc<FiniteGroupModel>> {
    FiniteGroupModel::new(true, vec![p; 3], vec!["a".into(), "b".into(), "c".into()])
}

/// `⟨A,B,C | A^{2p}B^{−2p}, BAB⁻¹A^{2p−1}, C^p, [A,B^{p−1}], [A,C^r], [B,C]⟩`
/// with `A = xa`, `B = yb`, `C = c`.
pub fn q8p_family(p: u64, r: i64) -> Result<Presentation> {
    q8p_family_in(&q8p_group(p)?, r)
}

pub fn q8p_family_in(g: &Arc<FiniteGroupModel>, r: i64) -> Result<Presentation> {
    if !g.has_q8() || g.cyclic_orders().len() != 3 {
        return Err(Error::InvalidInput("expected Q8 x (Z/p)^3".into()));
    }
    let p = g.cyclic_orders()[0] as i64;
    let (a, b, c) = (0, 1, 2);
    let relators = vec![
        vec![(a, 2 * p), (b, -2 * p)],
        vec![(b, 1), (a, 1), (b, -1), (a, 2 * p - 1)],
        vec![(c, p)],
        vec![(a, 1), (b, p - 1), (a, -1), (b, 1 - p)],
        vec![(a, 1), (c, r), (a, -1), (c, -r)],
        vec![(b, 1), (c, 1), (b, -1), (c, -1)],
    ];
    let el = |s: &str| GroupRingElement::parse(g, s).map(|e| e.terms().next().unwrap().0);
    let images = vec![el("x*a")?, el("y*b")?, el("c")?];
    Presentation::new(vec!["A".into(), "B".into(), "C".into()], relators, g.clone(), images)
}

/// A finite chain complex of free ZG-modules `C_n → … → C_0`, with
/// `∂_i` stored as a `rank(C_i) × rank(C_{i−1})` matrix acting on rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlgebraicComplex {
    #[serde(skip)]
    group: Arc<FiniteGroupModel>,
    ranks: Vec<usize>,
    boundaries: Vec<ZGMatrix>,
}

impl AlgebraicComplex {
    /// `boundaries[i−1] = ∂_i`. Checks shapes, `∂_{i+1}∂_i = 0` and
    /// `ε(∂_1) = 0`.
    pub fn new(group: &Arc<FiniteGroupModel>, boundaries: Vec<ZGMatrix>) -> Result<Self> {
        if boundaries.is_empty() {
            return Err(Error::InvalidInput("a complex needs at least one boundary".into()));
        }
        let mut ranks = vec![boundaries[0].cols()];
        for (i, d) in boundaries.iter().enumerate() {
            if d.group().as_ref() != group.as_ref() {
                return Err(Error::GroupMismatch);
            }
            if d.cols() != ranks[i] {
                return Err(Error::InvalidInput(format!("boundary {} has {} columns, expected {}", i + 1, d.cols(), ranks[i])));
            }
            ranks.push(d.rows());
        }
        for i in 1..boundaries.len() {
            let comp = boundaries[i].mul(&boundaries[i - 1]);
            if !comp.is_zero() {
                return Err(Error::InvalidInput(format!("boundary {} composed with boundary {} is nonzero", i + 1, i)));
            }
        }
        if !boundaries[0].augment().is_zero() {
            return Err(Error::InvalidInput("augmentation of the first boundary is nonzero".into()));
        }
        Ok(AlgebraicComplex { group: group.clone(), ranks, boundaries })
    }

    pub fn group(&self) -> &Arc<FiniteGroupModel> {
        &self.group
    }

    /// Top degree `n`.
    pub fn length(&self) -> usize {
        self.boundaries.len()
    }

    pub fn epsilon(&self) -> i64 {
        if self.length().is_multiple_of(2) { 1 } else { -1 }
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `∂_i` for `1 ≤ i ≤ n`.
    pub fn boundary(&self, i: usize) -> &ZGMatrix {
        &self.boundaries[i - 1]
    }

    pub fn boundaries(&self) -> &[ZGMatrix] {
        &self.boundaries
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks.iter().enumerate().map(|(i, &r)| if i % 2 == 0 { r as i64 } else { -(r as i64) }).sum()
    }

    /// Homology of `Z ⊗_{ZG} C`.
    pub fn augmented_homology(&self) -> Vec<HomologyGroup> {
        let bs: Vec<IntMatrix> = self.boundaries.iter().map(ZGMatrix::augment).collect();
        chain_homology(&self.ranks, &bs)
    }

    /// Homology of `C` as a complex of abelian groups.
    pub fn underlying_homology(&self) -> Result<Vec<HomologyGroup>> {
        let n = self.group.order();
        let big = self.ranks.iter().max().copied().unwrap_or(0) * n;
        if big > LIFT_LIMIT {
            return Err(Error::TooLarge(format!("|G|*rank = {big} exceeds {LIFT_LIMIT}")));
        }
        let bs: Vec<IntMatrix> = self.boundaries.iter().map(ZGMatrix::z_expand).collect();
        let ranks: Vec<usize> = self.ranks.iter().map(|r| r * n).collect();
        Ok(chain_homology(&ranks, &bs))
    }

    /// Saturated basis (rows) of `ker ε(∂_n) ≅ H_n(Z ⊗ C)`.
    pub fn top_kernel_basis(&self) -> IntMatrix {
        left_kernel_basis(&self.boundary(self.length()).augment())
    }
}

/// Applies `θ` to every coefficient's group element. The result is the
/// complex `C_{θ⁻¹}` written in the standard bases.
pub fn aut_twist(c: &AlgebraicComplex, theta: &GroupAutomorphism) -> Result<AlgebraicComplex> {
    let bs = c.boundaries.iter().map(|d| d.apply_automorphism(theta)).collect::<Result<Vec<_>>>()?;
    AlgebraicComplex::new(&c.group, bs)
}

/// A verified chain map `f_i : C_i → C′_i`, `i = 0..n`.
#[derive(Clone, Debug, Serialize)]
pub struct ChainMap {
    pub source: AlgebraicComplex,
    pub target: AlgebraicComplex,
    pub maps: Vec<ZGMatrix>,
}

impl ChainMap {
    pub fn identity(c: &AlgebraicComplex) -> ChainMap {
        let maps = c.ranks.iter().map(|&r| ZGMatrix::identity(&c.group, r)).collect();
        ChainMap { source: c.clone(), target: c.clone(), maps }
    }

    pub fn degree(&self, i: usize) -> &ZGMatrix {
        &self.maps[i]
    }

    /// `g ∘ f`, i.e. `f` followed by `g`.
    pub fn then(&self, g: &ChainMap) -> Result<ChainMap> {
        if self.target != g.source {
            return Err(Error::ChainMapFailure("composable maps need matching complexes".into()));
        }
        let maps = self.maps.iter().zip(&g.maps).map(|(a, b)| a.mul(b)).collect();
        Ok(ChainMap { source: self.source.clone(), target: g.target.clone(), maps })
    }
}

/// Checks `∂_i f_{i−1} = f_i ∂′_i` for all `i` and that `f_0` induces the
/// identity on `H_0 = Z`.
pub fn verify_chain_map(maps: Vec<ZGMatrix>, c: &AlgebraicComplex, c2: &AlgebraicComplex) -> Result<ChainMap> {
    if c.group.as_ref() != c2.group.as_ref() {
        return Err(Error::GroupMismatch);
    }
    if c.length() != c2.length() || maps.len() != c.length() + 1 {
        return Err(Error::ChainMapFailure("complexes and map have different lengths".into()));
    }
    for (i, f) in maps.iter().enumerate() {
        if (f.rows(), f.cols()) != (c.ranks[i], c2.ranks[i]) {
            return Err(Error::ChainMapFailure(format!(
                "f_{i} is {}x{}, expected {}x{}",
                f.rows(),
                f.cols(),
                c.ranks[i],
                c2.ranks[i]
            )));
        }
    }
    for i in 1..=c.length() {
        let lhs = c.boundary(i).mul(&maps[i - 1]);
        let rhs = maps[i].mul(c2.boundary(i));
        let diff = lhs.sub(&rhs);
        if let Some((r, k)) = first_nonzero(&diff) {
            return Err(Error::ChainMapFailure(format!(
                "degree {i}, entry ({},{}): d*f - f*d' = {}",
                r + 1,
                k + 1,
                diff.get(r, k)
            )));
        }
    }
    if c.ranks[0] == 1 && c2.ranks[0] == 1 && maps[0].get(0, 0).augment() != 1 {
        return Err(Error::ChainMapFailure(format!("f_0 has augmentation {}, not 1", maps[0].get(0, 0).augment())));
    }
    Ok(ChainMap { source: c.clone(), target: c2.clone(), maps })
}

fn first_nonzero(m: &ZGMatrix) -> Option<(usize, usize)> {
    (0..m.rows()).flat_map(|i| (0..m.cols()).map(move |j| (i, j))).find(|&(i, j)| !m.get(i, j).is_zero())
}

fn row_to_vector(m: &ZGMatrix, i: usize) -> Vec<BigInt> {
    let n = m.group().order();
    let mut v = vec![BigInt::zero(); m.cols() * n];
    for j in 0..m.cols() {
        for (g, c) in m.get(i, j).terms() {
            v[j * n + g] = BigInt::from(c);
        }
    }
    v
}

fn vector_to_row(group: &Arc<FiniteGroupModel>, v: &[BigInt]) -> Result<Vec<GroupRingElement>> {
    let n = group.order();
    v.chunks(n)
        .map(|chunk| {
            let terms = chunk
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(g, c)| {
                    i64::try_from(c).map(|c| (g, c)).map_err(|_| Error::TooLarge("lifted coefficient exceeds i64".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(GroupRingElement::from_terms(group, terms))
        })
        .collect()
}

/// Solves `F·d′ = target` for `F` row by row over ZG.
fn solve_rows(target: &ZGMatrix, d: &ZGMatrix, degree: usize) -> Result<ZGMatrix> {
    let g = d.group().clone();
    let n = g.order();
    if d.rows() * n > LIFT_LIMIT || d.cols() * n > LIFT_LIMIT {
        return Err(Error::TooLarge(format!(
            "lifting in degree {degree} needs a {}x{} integer system (limit {LIFT_LIMIT})",
            d.rows() * n,
            d.cols() * n
        )));
    }
    let solver = LeftSolver::new(&d.z_expand());
    let mut rows = Vec::with_capacity(target.rows());
    for i in 0..target.rows() {
        let b = row_to_vector(target, i);
        let x = solver
            .solve(&b)
            .ok_or_else(|| Error::NoLift(format!("row {} in degree {degree} is not in the image", i + 1)))?;
        rows.push(vector_to_row(&g, &x)?);
    }
    ZGMatrix::from_rows(&g, rows)
}

/// A chain map `C → C′` with `f_0 = id`, solved degree by degree.
/// When `∂_1 = ∂′_1` the degree-one map is the identity.
pub fn lift_chain_map(c: &AlgebraicComplex, c2: &AlgebraicComplex) -> Result<ChainMap> {
    if c.group.as_ref() != c2.group.as_ref() {
        return Err(Error::GroupMismatch);
    }
    if c.length() != c2.length() || c.ranks[0] != 1 || c2.ranks[0] != 1 {
        return Err(Error::NoLift("complexes must have equal length and C_0 = ZG".into()));
    }
    if c == c2 {
        return Ok(ChainMap::identity(c));
    }
    let mut maps = vec![ZGMatrix::identity(&c.group, 1)];
    for i in 1..=c.length() {
        let want = c.boundary(i).mul(&maps[i - 1]);
        let f = if i == 1 && c.boundary(1) == c2.boundary(1) {
            ZGMatrix::identity(&c.group, c.ranks[1])
        } else {
            solve_rows(&want, c2.boundary(i), i)?
        };
        maps.push(f);
    }
    verify_chain_map(maps, c, c2)
}

/// The map induced on `H_n(Z ⊗ −)` in given kernel bases.
#[derive(Clone, Debug, Serialize)]
pub struct InducedMap {
    pub source_basis: IntMatrix,
    pub target_basis: IntMatrix,
    /// `M` with `K·ε(f_n) = M·K′`.
    pub matrix: IntMatrix,
    #[serde(serialize_with = "ser_big")]
    pub det: BigInt,
}

fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Expresses `K·ε(f_n)` in the basis `K′`. Fails with `BasisError` if a row
/// of `K` is not a cycle or an image is not in the span of `K′`.
pub fn induced_in_bases(f: &ChainMap, k: &IntMatrix, k2: &IntMatrix) -> Result<InducedMap> {
    let n = f.source.length();
    let d = f.source.boundary(n).augment();
    let d2 = f.target.boundary(n).augment();
    if !k.mul(&d).is_zero() {
        return Err(Error::BasisError("source basis is not in the kernel".into()));
    }
    if !k2.mul(&d2).is_zero() {
        return Err(Error::BasisError("target basis is not in the kernel".into()));
    }
    let image = k.mul(&f.maps[n].augment());
    let solver = LeftSolver::new(k2);
    let rows = (0..image.rows())
        .map(|i| solver.solve(image.row(i)).ok_or_else(|| Error::BasisError(format!("image of basis vector {} leaves the target span", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    let matrix = IntMatrix::from_rows(rows, k2.rows());
    let det = if matrix.is_square() { matrix.det() } else { return Err(Error::BasisError("kernels have different ranks".into())) };
    Ok(InducedMap { source_basis: k.clone(), target_basis: k2.clone(), matrix, det })
}

pub fn induced_on_top_homology(f: &ChainMap) -> Result<InducedMap> {
    induced_in_bases(f, &f.source.top_kernel_basis(), &f.target.top_kernel_basis())
}

#[derive(Clone, Debug, Serialize)]
pub struct BiasResult {
    pub induced: InducedMap,
    pub class: UnitClass,
}

/// `[det H_n(id ⊗ f)]` in `(Z/m)^×/{±1}`.
pub fn polarised_bias(f: &ChainMap, m: u64) -> Result<BiasResult> {
    let chi = f.source.euler_characteristic();
    if chi != f.target.euler_characteristic() {
        return Err(Error::HypothesisViolation("complexes have different Euler characteristics".into()));
    }
    let induced = induced_on_top_homology(f)?;
    let class = class_of(m, &induced.det, &UnitSubgroup::new(m, SubgroupDescriptor::MinusOne)?)?;
    Ok(BiasResult { induced, class })
}

/// One automorphism's contribution to `D`.
#[derive(Clone, Debug, Serialize)]
pub struct AutContribution {
    pub label: String,
    pub class: UnitClass,
}

#[derive(Clone, Debug, Serialize)]
pub struct DSubgroupReport {
    pub contributions: Vec<AutContribution>,
    /// Residues adjoined from facts established outside the computation.
    pub external: Vec<(u64, String)>,
    /// The preimage of `D` in `(Z/m)^×`, containing −1.
    #[serde(serialize_with = "ser_display")]
    pub subgroup: UnitSubgroup,
}

fn ser_display<S: serde::Serializer>(h: &UnitSubgroup, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&h.to_string())
}

/// An automorphism `θ` with an optional chain map `C_θ-twisted → C`
/// (as produced by [`aut_twist`]); missing maps are lifted.
pub struct AutomorphismInput {
    pub label: String,
    pub theta: GroupAutomorphism,
    pub chain_map: Option<Vec<ZGMatrix>>,
}

/// Subgroup of `(Z/m)^×/{±1}` generated by `φ(θ) = β(C_{θ⁻¹}, C)` for the
/// supplied automorphisms, together with externally justified residues.
pub fn compute_d_subgroup(
    c: &AlgebraicComplex,
    autos: Vec<AutomorphismInput>,
    external: Vec<(u64, String)>,
    m: u64,
) -> Result<DSubgroupReport> {
    let mut contributions = Vec::new();
    let mut gens = Vec::new();
    for a in autos {
        let twisted = aut_twist(c, &a.theta)?;
        let f = match a.chain_map {
            Some(maps) => verify_chain_map(maps, &twisted, c)?,
            None => lift_chain_map(&twisted, c)?,
        };
        let b = polarised_bias(&f, m)?;
        gens.push(b.class.rep());
        contributions.push(AutContribution { label: a.label, class: b.class });
    }
    gens.extend(external.iter().map(|e| e.0));
    let subgroup = UnitSubgroup::new(m, SubgroupDescriptor::Generated(gens))?.with_minus_one()?;
    Ok(DSubgroupReport { contributions, external, subgroup })
}

/// Checks of the `Q8 × (Z/p)³` family.
pub mod q8p {
    use super::*;

    fn el(g: &Arc<FiniteGroupModel>, s: &str) -> GroupRingElement {
        GroupRingElement::parse(g, s).expect("well-formed element")
    }

    fn sigma(g: &Arc<FiniteGroupModel>, base: &str, k: i64) -> GroupRingElement {
        el(g, base).sigma(k as u32)
    }

    /// The boundary `d_2` in the reference display of `𝒫_r`.
    pub fn displayed_d2(g: &Arc<FiniteGroupModel>, r: i64) -> ZGMatrix {
        let p = g.cyclic_orders()[0] as i64;
        let zero = GroupRingElement::zero(g);
        let one = GroupRingElement::one(g);
        let xa1 = el(g, "x*a - 1");
        let rows = vec![
            vec![sigma(g, "x*a", 2 * p), sigma(g, "x*a", 2 * p).neg(), zero.clone()],
            vec![el(g, "y*b").add(&el(g, "x^-1*a").mul(&sigma(g, "x*a", 2 * p - 1))), el(g, "1 - x^-1*a"), zero.clone()],
            vec![zero.clone(), zero.clone(), sigma(g, "c", p)],
            vec![el(g, "1 - b^-1"), xa1.mul(&sigma(g, "y*b", p - 1)), zero.clone()],
            vec![one.sub(&el(g, "c").pow(r.rem_euclid(p) as u32)), zero.clone(), xa1.mul(&sigma(g, "c", r))],
            vec![zero, el(g, "1 - c"), el(g, "y*b - 1")],
        ];
        ZGMatrix::from_rows(g, rows).unwrap()
    }

    /// Entries where the Fox matrix differs from the displayed one.
    #[derive(Clone, Debug, Serialize)]
    pub struct EntryDifference {
        pub row: usize,
        pub col: usize,
        pub fox: GroupRingElement,
        pub displayed: GroupRingElement,
    }

    pub fn compare_with_displayed(pres: &Presentation, r: i64) -> Vec<EntryDifference> {
        let fox = pres.fox_matrix();
        let displayed = displayed_d2(pres.target(), r);
        let mut out = Vec::new();
        for i in 0..fox.rows() {
            for j in 0..fox.cols() {
                if fox.get(i, j) != displayed.get(i, j) {
                    out.push(EntryDifference { row: i + 1, col: j + 1, fox: fox.get(i, j).clone(), displayed: displayed.get(i, j).clone() });
                }
            }
        }
        out
    }

    /// `f = (diag(1,1,1,1,Σ_r(c),1), id, id)` from `X_r` to `X_1`.
    pub fn explicit_f(g: &Arc<FiniteGroupModel>, r: i64) -> Vec<ZGMatrix> {
        let one = GroupRingElement::one(g);
        let mut d = vec![one; 6];
        d[4] = sigma(g, "c", r);
        vec![ZGMatrix::identity(g, 1), ZGMatrix::identity(g, 3), ZGMatrix::diagonal(g, &d)]
    }

    /// `θ : x↦x, y↦y, a↦a, b↦b, c↦c^r`.
    pub fn theta(g: &Arc<FiniteGroupModel>, r: i64) -> Result<GroupAutomorphism> {
        let gens = g.generators();
        let mut images = gens.clone();
        images[4] = g.pow(gens[4], r);
        GroupAutomorphism::from_generator_images(g, &images)
    }

    /// `g = (diag(1,1,Σ_r(c),1,Σ_r(c),Σ_r(c)), diag(1,1,Σ_r(c)), id)` from
    /// the `θ`-twisted `X_1` to `X_1`.
    pub fn explicit_g(g: &Arc<FiniteGroupModel>, r: i64) -> Vec<ZGMatrix> {
        let one = GroupRingElement::one(g);
        let s = sigma(g, "c", r);
        let d2 = vec![one.clone(), one.clone(), s.clone(), one.clone(), s.clone(), s.clone()];
        let d1 = vec![one.clone(), one, s];
        vec![ZGMatrix::identity(g, 1), ZGMatrix::diagonal(g, &d1), ZGMatrix::diagonal(g, &d2)]
    }

    /// Rows `e_4, e_5, e_6`, the basis of `ker ε(d_2)` used in the display.
    pub fn display_kernel_basis() -> IntMatrix {
        IntMatrix::from_i64(&[&[0, 0, 0, 1, 0, 0], &[0, 0, 0, 0, 1, 0], &[0, 0, 0, 0, 0, 1]])
    }

    /// The contribution of `Aut(Q8)`: its image in `(Z/p)^×/{±1}` has order
    /// at most 2 because `Aut(Q8) ≅ S4` has abelianisation `Z/2`, so for
    /// `p ≡ 1 mod 8` it lies in the squares. Not recomputed here.
    pub fn aut_q8_external_fact(p: u64) -> Vec<(u64, String)> {
        vec![(1 % p, "Aut(Q8) = S4 has abelianisation Z/2, so its image lies in the squares when p = 1 mod 8".into())]
    }
}
