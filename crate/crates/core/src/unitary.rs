//! Quadratic unitary groups `U^ε_{2d}` over Z and Z/m with trivial
//! involution: membership, elementary generators and the factorisations
//! used to lift squares of diagonal matrices.
//!
//! Matrices are in block coordinates `(e_1..e_d, f_1..f_d)` for the form
//! `(0, I; εI, 0)`. The `i`-th hyperbolic plane is `(e_i, f_i)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::intlin::{unimodular_inverse, IntMatrix};
use crate::units::inv_mod;

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Reduces into `[0, m)`; `m = 0` leaves the matrix alone.
pub fn reduce(a: &IntMatrix, m: u64) -> IntMatrix {
    if m == 0 { a.clone() } else { a.reduce_mod(&BigInt::from(m)) }
}

/// Representative of `x mod m` in `(−m/2, m/2]`.
pub fn minimal_lift(x: &BigInt, m: u64) -> BigInt {
    let mb = BigInt::from(m);
    let r = x.mod_floor(&mb);
    if &r * 2 > mb { r - mb } else { r }
}

pub fn minimal_lift_matrix(a: &IntMatrix, m: u64) -> IntMatrix {
    if m == 0 {
        return a.clone();
    }
    IntMatrix::from_fn(a.rows(), a.cols(), |i, j| minimal_lift(&a[(i, j)], m))
}

fn adjugate(a: &IntMatrix) -> IntMatrix {
    let n = a.rows();
    if n == 1 {
        return IntMatrix::identity(1);
    }
    IntMatrix::from_fn(n, n, |i, j| {
        // cofactor of (j, i)
        let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
        let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
        let minor = IntMatrix::from_fn(n - 1, n - 1, |r, c| a[(rows[r], cols[c])].clone());
        let d = minor.det();
        if (i + j) % 2 == 0 { d } else { -d }
    })
}

/// Inverse over Z (`m = 0`) or Z/m.
pub fn inverse(a: &IntMatrix, m: u64) -> Result<IntMatrix> {
    if !a.is_square() {
        return Err(Error::NotInvertible);
    }
    if m == 0 {
        return unimodular_inverse(a).ok_or(Error::NotInvertible);
    }
    let det = crate::units::residue(&a.det(), m);
    let dinv = inv_mod(det, m).ok_or(Error::NotInvertible)?;
    Ok(reduce(&adjugate(a).scale(&BigInt::from(dinv)), m))
}

fn block(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix, d: &IntMatrix) -> IntMatrix {
    a.hstack(b).vstack(&c.hstack(d))
}

/// Quarters of a `2d × 2d` matrix.
pub fn quarters(s: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix, IntMatrix) {
    let d = s.rows() / 2;
    (s.submatrix(0..d, 0..d), s.submatrix(0..d, d..2 * d), s.submatrix(d..2 * d, 0..d), s.submatrix(d..2 * d, d..2 * d))
}

/// Result of testing the two defining conditions of `U^ε_{2d}`.
#[derive(Clone, Debug, Serialize)]
pub struct UnitaryMembership {
    pub epsilon: i64,
    pub modulus: u64,
    /// `αδᵀ + εβγᵀ = I`.
    pub condition_i: bool,
    /// `θ` with `αβᵀ = θ − εθᵀ`, if one exists.
    pub theta_ab: Option<IntMatrix>,
    /// `θ` with `γδᵀ = θ − εθᵀ`, if one exists.
    pub theta_cd: Option<IntMatrix>,
    /// The weaker hermitian condition: `Xᵀ = −εX` for both products.
    pub hermitian_ii: bool,
    pub unitary: bool,
}

/// Solves `X = θ − εθᵀ` entrywise, or names the first obstructing entry.
pub fn symmetrise(x: &IntMatrix, eps: i64, m: u64) -> std::result::Result<IntMatrix, (usize, usize)> {
    let d = x.rows();
    let x = reduce(x, m);
    let e = big(eps);
    let mut theta = IntMatrix::zeros(d, d);
    for i in 0..d {
        for j in i + 1..d {
            if reduce(&IntMatrix::from_fn(1, 1, |_, _| &x[(j, i)] + &e * &x[(i, j)]), m)[(0, 0)] != BigInt::zero() {
                return Err((i, j));
            }
            theta[(i, j)] = x[(i, j)].clone();
        }
        let xi = &x[(i, i)];
        if eps == 1 {
            if !xi.is_zero() {
                return Err((i, i));
            }
        } else {
            // 2t ≡ x
            let t = if m == 0 {
                if xi.is_even() { Some(xi / 2) } else { None }
            } else if m % 2 == 1 {
                let h = BigInt::from(inv_mod(2, m).unwrap());
                Some((xi * h).mod_floor(&BigInt::from(m)))
            } else if xi.is_even() {
                Some(xi / 2)
            } else {
                None
            };
            theta[(i, i)] = t.ok_or((i, i))?;
        }
    }
    Ok(theta)
}

pub fn is_unitary(s: &IntMatrix, eps: i64, m: u64) -> UnitaryMembership {
    let fail = UnitaryMembership {
        epsilon: eps,
        modulus: m,
        condition_i: false,
        theta_ab: None,
        theta_cd: None,
        hermitian_ii: false,
        unitary: false,
    };
    if !s.is_square() || s.rows() % 2 == 1 {
        return fail;
    }
    let d = s.rows() / 2;
    let (a, b, c, dd) = quarters(s);
    let e = big(eps);
    let cond_i = reduce(&a.mul(&dd.transpose()).add(&b.mul(&c.transpose()).scale(&e)), m) == reduce(&IntMatrix::identity(d), m);
    let x = a.mul(&b.transpose());
    let y = c.mul(&dd.transpose());
    let herm = |z: &IntMatrix| reduce(&z.transpose().add(&z.scale(&e)), m).is_zero();
    let theta_ab = symmetrise(&x, eps, m).ok();
    let theta_cd = symmetrise(&y, eps, m).ok();
    let unitary = cond_i && theta_ab.is_some() && theta_cd.is_some();
    UnitaryMembership { condition_i: cond_i, hermitian_ii: herm(&x) && herm(&y), unitary, theta_ab, theta_cd, ..fail }
}

/// One generator of the elementary unitary group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementaryFactor {
    /// `(Q, 0; 0, (Qᵀ)⁻¹)`.
    Q(IntMatrix),
    /// `(I, P; 0, I)` with `P = A − εAᵀ`; stores the witness `A`.
    UpperP(IntMatrix),
    /// `(I, 0; P, I)` with `P = A − εAᵀ`; stores the witness `A`.
    LowerP(IntMatrix),
    /// Sends `e_i ↦ f_i`, `f_i ↦ ε·e_i` and fixes the other planes.
    Swap(usize),
}

impl ElementaryFactor {
    pub fn kind(&self) -> &'static str {
        match self {
            ElementaryFactor::Q(_) => "Q",
            ElementaryFactor::UpperP(_) => "upper-P",
            ElementaryFactor::LowerP(_) => "lower-P",
            ElementaryFactor::Swap(_) => "swap",
        }
    }

    pub fn matrix(&self, d: usize, eps: i64, m: u64) -> Result<IntMatrix> {
        let id = IntMatrix::identity(d);
        let z = IntMatrix::zeros(d, d);
        let payload = |a: &IntMatrix| a.sub(&a.transpose().scale(&big(eps)));
        let out = match self {
            ElementaryFactor::Q(q) => block(q, &z, &z, &inverse(&q.transpose(), m)?),
            ElementaryFactor::UpperP(a) => block(&id, &payload(a), &z, &id),
            ElementaryFactor::LowerP(a) => block(&id, &z, &payload(a), &id),
            &ElementaryFactor::Swap(i) => {
                if i >= d {
                    return Err(Error::InvalidInput(format!("swap index {i} out of range")));
                }
                let mut s = IntMatrix::identity(2 * d);
                s[(i, i)] = BigInt::zero();
                s[(d + i, d + i)] = BigInt::zero();
                s[(i, d + i)] = BigInt::one();
                s[(d + i, i)] = big(eps);
                s
            }
        };
        Ok(reduce(&out, m))
    }
}

/// A product of elementary unitary factors, multiplied left to right.
#[derive(Clone, Debug)]
pub struct UnitaryWord {
    pub d: usize,
    pub modulus: u64,
    pub epsilon: i64,
    pub factors: Vec<ElementaryFactor>,
}

impl Serialize for ElementaryFactor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ElementaryFactor", 3)?;
        st.serialize_field("kind", self.kind())?;
        match self {
            ElementaryFactor::Q(q) => {
                st.serialize_field("payload", q)?;
                st.serialize_field("witness", &Option::<IntMatrix>::None)?;
            }
            ElementaryFactor::UpperP(a) | ElementaryFactor::LowerP(a) => {
                st.serialize_field("payload", &Option::<IntMatrix>::None)?;
                st.serialize_field("witness", a)?;
            }
            ElementaryFactor::Swap(i) => {
                st.serialize_field("payload", i)?;
                st.serialize_field("witness", &Option::<IntMatrix>::None)?;
            }
        }
        st.end()
    }
}

impl Serialize for UnitaryWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.factors.serialize(s)
    }
}

impl UnitaryWord {
    pub fn new(d: usize, modulus: u64, epsilon: i64) -> Self {
        UnitaryWord { d, modulus, epsilon, factors: Vec::new() }
    }

    pub fn push(&mut self, f: ElementaryFactor) -> &mut Self {
        self.factors.push(f);
        self
    }

    pub fn extend(&mut self, other: &UnitaryWord) -> &mut Self {
        self.factors.extend(other.factors.iter().cloned());
        self
    }

    pub fn factor_matrices(&self) -> Result<Vec<IntMatrix>> {
        self.factors.iter().map(|f| f.matrix(self.d, self.epsilon, self.modulus)).collect()
    }

    pub fn product(&self) -> Result<IntMatrix> {
        let mut acc = IntMatrix::identity(2 * self.d);
        for f in self.factor_matrices()? {
            acc = reduce(&acc.mul(&f), self.modulus);
        }
        Ok(acc)
    }

    /// Whether every factor passes [`is_unitary`] over the word's ring.
    pub fn factors_certified(&self) -> Result<bool> {
        Ok(self.factor_matrices()?.iter().all(|f| is_unitary(f, self.epsilon, self.modulus).unitary))
    }

    /// The same word read over Z/m.
    pub fn reduce_to(&self, m: u64) -> UnitaryWord {
        let red = |a: &IntMatrix| reduce(a, m);
        let factors = self
            .factors
            .iter()
            .map(|f| match f {
                ElementaryFactor::Q(q) => ElementaryFactor::Q(red(q)),
                ElementaryFactor::UpperP(a) => ElementaryFactor::UpperP(red(a)),
                ElementaryFactor::LowerP(a) => ElementaryFactor::LowerP(red(a)),
                ElementaryFactor::Swap(i) => ElementaryFactor::Swap(*i),
            })
            .collect();
        UnitaryWord { d: self.d, modulus: m, epsilon: self.epsilon, factors }
    }
}

pub fn elementary_q(q: &IntMatrix, m: u64) -> Result<ElementaryFactor> {
    inverse(q, m)?;
    Ok(ElementaryFactor::Q(q.clone()))
}

pub fn elementary_p_upper(a: &IntMatrix) -> ElementaryFactor {
    ElementaryFactor::UpperP(a.clone())
}

pub fn elementary_p_lower(a: &IntMatrix) -> ElementaryFactor {
    ElementaryFactor::LowerP(a.clone())
}

pub fn elementary_swap(i: usize) -> ElementaryFactor {
    ElementaryFactor::Swap(i)
}

/// `A ⊕ B` as a block-diagonal matrix.
pub fn direct_sum(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    a.block_diag(b)
}

/// `A⁻¹B⁻¹AB ⊕ I = ((BA)⁻¹ ⊕ BA)(A ⊕ A⁻¹)(B ⊕ B⁻¹)`.
#[derive(Clone, Debug, Serialize)]
pub struct CommutatorDecomposition {
    pub lhs: IntMatrix,
    pub factors: [IntMatrix; 3],
    pub holds: bool,
}

pub fn commutator_decompose(a: &IntMatrix, b: &IntMatrix, m: u64) -> Result<CommutatorDecomposition> {
    let (ai, bi) = (inverse(a, m)?, inverse(b, m)?);
    let ba = reduce(&b.mul(a), m);
    let bai = inverse(&ba, m)?;
    let r = a.rows();
    let lhs = reduce(&direct_sum(&ai.mul(&bi).mul(a).mul(b), &IntMatrix::identity(r)), m);
    let factors = [direct_sum(&bai, &ba), direct_sum(a, &ai), direct_sum(b, &bi)];
    let prod = reduce(&factors[0].mul(&factors[1]).mul(&factors[2]), m);
    Ok(CommutatorDecomposition { holds: prod == lhs, lhs, factors })
}

/// `A ⊕ A⁻¹ = (I,A;0,I)(I,0;I−A⁻¹,I)(I,−I;0,I)(I,0;I−A,I)`.
#[derive(Clone, Debug, Serialize)]
pub struct WhiteheadDecomposition {
    pub lhs: IntMatrix,
    pub factors: [IntMatrix; 4],
    pub holds: bool,
}

pub fn whitehead_decompose(a: &IntMatrix, m: u64) -> Result<WhiteheadDecomposition> {
    let ai = inverse(a, m)?;
    let r = a.rows();
    let id = IntMatrix::identity(r);
    let z = IntMatrix::zeros(r, r);
    let factors = [
        block(&id, a, &z, &id),
        block(&id, &z, &id.sub(&ai), &id),
        block(&id, &id.neg(), &z, &id),
        block(&id, &z, &id.sub(a), &id),
    ];
    let lhs = reduce(&direct_sum(a, &ai), m);
    let prod = reduce(&factors.iter().skip(1).fold(factors[0].clone(), |acc, f| acc.mul(f)), m);
    Ok(WhiteheadDecomposition { holds: prod == lhs, lhs, factors })
}

/// `Q ⊕ Q⁻¹ ⊕ I = (Q ⊕ I ⊕ (Qᵀ)⁻¹)·(I ⊕ Q⁻¹ ⊕ Qᵀ)`, the second factor being
/// the inverse of `I ⊕ Q ⊕ (Qᵀ)⁻¹`.
#[derive(Clone, Debug, Serialize)]
pub struct ThreeStep {
    pub lhs: IntMatrix,
    pub first: IntMatrix,
    pub second: IntMatrix,
    pub holds: bool,
}

pub fn three_step(q: &IntMatrix, m: u64) -> Result<ThreeStep> {
    let qi = inverse(q, m)?;
    let qti = inverse(&q.transpose(), m)?;
    let id = IntMatrix::identity(q.rows());
    let lhs = reduce(&direct_sum(&direct_sum(q, &qi), &id), m);
    let first = direct_sum(&direct_sum(q, &id), &qti);
    let undo = direct_sum(&direct_sum(&id, q), &qti);
    let second = direct_sum(&direct_sum(&id, &qi), &q.transpose());
    let inverse_ok = reduce(&undo.mul(&second), m) == reduce(&IntMatrix::identity(3 * q.rows()), m);
    let holds = inverse_ok && reduce(&first.mul(&second), m) == lhs;
    Ok(ThreeStep { lhs, first, second, holds })
}

/// Reorders block coordinates `(e_1..e_d, f_1..f_d)` to `(e_1, f_1, e_2, f_2, …)`.
pub fn to_interleaved(s: &IntMatrix) -> IntMatrix {
    let d = s.rows() / 2;
    let perm: Vec<usize> = (0..d).flat_map(|i| [i, d + i]).collect();
    IntMatrix::from_fn(s.rows(), s.cols(), |i, j| s[(perm[i], perm[j])].clone())
}

/// Certificate that `diag(a², a⁻²)` on the first hyperbolic plane lifts to
/// an elementary unitary matrix over Z.
#[derive(Clone, Debug, Serialize)]
pub struct LiftSquare {
    pub a: u64,
    pub m: u64,
    pub d: usize,
    pub epsilon: i64,
    pub word: UnitaryWord,
    /// `diag(a², 1, …, 1, a⁻², 1, …, 1)` in block coordinates.
    pub target: IntMatrix,
    /// The word's product over Z.
    pub product: IntMatrix,
    pub reduced: IntMatrix,
    pub factors_certified: bool,
    pub product_unitary: bool,
    pub matches: bool,
}

/// Integer lift of `diag(a⁻¹, a)` on `(e_1, e_2)` as four Q-type
/// unipotents `(1,a⁻¹;0,1)(1,0;1−a,1)(1,−1;0,1)(1,0;1−a⁻¹,1)`.
fn whitehead_lift(a: u64, ainv: u64, m: u64, d: usize) -> Vec<ElementaryFactor> {
    let l = |x: i64| minimal_lift(&big(x), m);
    let unip = |upper: bool, x: BigInt| {
        let mut q = IntMatrix::identity(d);
        if upper {
            q[(0, 1)] = x;
        } else {
            q[(1, 0)] = x;
        }
        ElementaryFactor::Q(q)
    };
    vec![
        unip(true, l(ainv as i64)),
        unip(false, l(1 - a as i64)),
        unip(true, big(-1)),
        unip(false, l(1 - ainv as i64)),
    ]
}

/// Builds the word `F_C·F_A·F_B` with `A = diag(a⁻¹, a)`, `B = (0,1;ε,0)`
/// and `C = BA = diag(a, a⁻¹)·B`, where on planes one and two
/// `F_A = A ⊕ A⁻¹`, `F_B = B ⊕ B⁻¹` and `F_C = C⁻¹ ⊕ C = (B⁻¹ ⊕ I)(A ⊕ A⁻¹)(I ⊕ B)`.
pub fn lift_square(a: u64, m: u64, d: usize, eps: i64) -> Result<LiftSquare> {
    if d < 3 {
        return Err(Error::HypothesisViolation("lifting squares needs d >= 3".into()));
    }
    if m < 2 {
        return Err(Error::InvalidInput("modulus must be at least 2".into()));
    }
    let ainv = inv_mod(a % m, m).ok_or_else(|| Error::NotAUnit(a.to_string(), m.to_string()))?;
    let a = a % m;
    let fa = whitehead_lift(a, ainv, m, d);
    let scalar = |i: usize| {
        let mut q = IntMatrix::identity(d);
        q[(i, i)] = big(eps);
        ElementaryFactor::Q(q)
    };
    let mut word = UnitaryWord::new(d, 0, eps);
    // F_C
    word.push(ElementaryFactor::Swap(0)).push(scalar(0));
    for f in &fa {
        word.push(f.clone());
    }
    word.push(ElementaryFactor::Swap(1));
    // F_A
    for f in &fa {
        word.push(f.clone());
    }
    // F_B
    word.push(ElementaryFactor::Swap(0)).push(ElementaryFactor::Swap(1)).push(scalar(1));

    let product = word.product()?;
    let reduced = reduce(&product, m);
    let a2 = a * a % m;
    let a2inv = ainv * ainv % m;
    let mut target = IntMatrix::identity(2 * d);
    target[(0, 0)] = BigInt::from(a2);
    target[(d, d)] = BigInt::from(a2inv);
    let target = reduce(&target, m);
    let factors_certified = word.factors_certified()?;
    let product_unitary = is_unitary(&product, eps, 0).unitary;
    let matches = reduced == target;
    Ok(LiftSquare { a, m, d, epsilon: eps, word, target, product, reduced, factors_certified, product_unitary, matches })
}

/// An integer upper P-type factor reducing to `(I, P; 0, I)` mod `m`.
pub fn lift_triangular(p: &IntMatrix, m: u64, eps: i64) -> Result<ElementaryFactor> {
    let f = symmetrise(p, eps, m).map_err(|(i, j)| Error::NoSymmetrisation(i, j))?;
    let lifted = minimal_lift_matrix(&f, m);
    let factor = ElementaryFactor::UpperP(lifted.clone());
    let payload = lifted.sub(&lifted.transpose().scale(&big(eps)));
    if reduce(&payload, m) != reduce(p, m) {
        return Err(Error::NoSymmetrisation(0, 0));
    }
    Ok(factor)
}

/// Whether `a` and `b` agree modulo `m`, entrywise.
pub fn congruent(a: &IntMatrix, b: &IntMatrix, m: u64) -> bool {
    reduce(a, m) == reduce(b, m)
}

/// The determinant of a square matrix over Z/m as a residue.
pub fn det_mod(a: &IntMatrix, m: u64) -> BigInt {
    let d = a.det();
    if m == 0 { d } else { d.mod_floor(&BigInt::from(m)) }
}

pub fn is_unit_det(a: &IntMatrix, m: u64) -> bool {
    let d = a.det();
    if m == 0 { d.abs().is_one() } else { crate::units::residue(&d, m).gcd(&m) == 1 }
}
