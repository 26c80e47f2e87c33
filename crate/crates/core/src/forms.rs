//! ε-symmetric forms over Z and Z/k, ZG-lattices with their fixed points
//! and Tate groups, and evaluation forms in adapted bases.
//!
//! Vectors are rows. A form `b(x, y) = x·Gram·yᵀ`; a matrix `σ` acts by
//! `x ↦ x·σ`, so it is an isometry when `σ·Gram·σᵀ = Gram`.

use std::collections::VecDeque;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::foxbias::AlgebraicComplex;
use crate::groupring::FiniteGroupModel;
use crate::intlin::{kernel_basis, left_kernel_basis, smith_normal_form, unimodular_inverse, IntMatrix, LeftSolver};

/// Largest `|G|·rank` accepted by the lattice routines.
pub const LATTICE_LIMIT: usize = 100_000;

/// An ε-symmetric bilinear form over Z (`k = 0`) or Z/k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsForm {
    k: u64,
    eps: i64,
    gram: IntMatrix,
}

impl Serialize for EpsForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("EpsForm", 3)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("eps", &self.eps)?;
        st.serialize_field("gram", &self.gram)?;
        st.end()
    }
}

fn reduce(m: &IntMatrix, k: u64) -> IntMatrix {
    if k == 0 { m.clone() } else { m.reduce_mod(&BigInt::from(k)) }
}

impl EpsForm {
    /// Entries are reduced into `[0, k)` when `k > 0`.
    pub fn new(k: u64, eps: i64, gram: IntMatrix) -> Result<Self> {
        if eps != 1 && eps != -1 {
            return Err(Error::InvalidInput("epsilon must be +1 or -1".into()));
        }
        if !gram.is_square() {
            return Err(Error::InvalidInput("Gram matrix must be square".into()));
        }
        let gram = reduce(&gram, k);
        if reduce(&gram.transpose().sub(&gram.scale(&BigInt::from(eps))), k) != IntMatrix::zeros(gram.rows(), gram.cols()) {
            return Err(Error::FormMismatch("Gram matrix is not epsilon-symmetric".into()));
        }
        Ok(EpsForm { k, eps, gram })
    }

    pub fn modulus(&self) -> u64 {
        self.k
    }

    pub fn epsilon(&self) -> i64 {
        self.eps
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    /// The same Gram matrix read modulo `k`.
    pub fn reduce_to(&self, k: u64) -> Result<EpsForm> {
        EpsForm::new(k, self.eps, self.gram.clone())
    }

    /// `σ·Gram·σᵀ`.
    pub fn pullback(&self, sigma: &IntMatrix) -> IntMatrix {
        reduce(&sigma.mul(&self.gram).mul(&sigma.transpose()), self.k)
    }

    pub fn is_isometry(&self, sigma: &IntMatrix) -> bool {
        sigma.is_square() && sigma.rows() == self.rank() && self.pullback(sigma) == self.gram
    }
}

/// `(0, I; εI, 0)` of rank `2d`.
pub fn hyperbolic(d: usize, eps: i64) -> EpsForm {
    metabolic(&EpsForm::new(0, eps, IntMatrix::zeros(d, d)).expect("zero form"))
}

/// `(0, I; εI, H)`.
pub fn metabolic(h: &EpsForm) -> EpsForm {
    let d = h.rank();
    let mut g = IntMatrix::zeros(2 * d, 2 * d);
    g.set_block(0, d, &IntMatrix::identity(d));
    g.set_block(d, 0, &IntMatrix::identity(d).scale(&BigInt::from(h.eps)));
    g.set_block(d, d, &h.gram);
    EpsForm::new(h.k, h.eps, g).expect("metabolic forms are epsilon-symmetric")
}

/// Shape of a matrix relative to a form in block basis `(e_1..e_d, f_1..f_d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IsometryKind {
    pub isometry: bool,
    /// `(Q, 0; 0, (Qᵀ)⁻¹)`.
    pub diagonal: bool,
    /// `(I, P; 0, I)` with `Pᵀ = −εP`.
    pub triangular: bool,
}

impl IsometryKind {
    pub fn label(&self) -> &'static str {
        match (self.isometry, self.diagonal, self.triangular) {
            (false, _, _) => "not-isometry",
            (true, true, _) => "diagonal",
            (true, false, true) => "triangular",
            _ => "general",
        }
    }
}

pub fn isometry_kind(m: &IntMatrix, f: &EpsForm) -> IsometryKind {
    let n = f.rank();
    if !m.is_square() || m.rows() != n || n % 2 == 1 {
        return IsometryKind { isometry: false, diagonal: false, triangular: false };
    }
    let isometry = f.is_isometry(m);
    let d = n / 2;
    let k = f.k;
    let m = reduce(m, k);
    let zero = IntMatrix::zeros(d, d);
    let blk = |r: usize, c: usize| m.submatrix(r..r + d, c..c + d);
    let (a, b, c, dd) = (blk(0, 0), blk(0, d), blk(d, 0), blk(d, d));
    let diagonal = isometry && b == zero && c == zero && reduce(&a.mul(&dd.transpose()), k) == reduce(&IntMatrix::identity(d), k);
    let id = reduce(&IntMatrix::identity(d), k);
    let triangular = isometry
        && a == id
        && dd == id
        && c == zero
        && reduce(&b.transpose().add(&b.scale(&BigInt::from(f.eps))), k) == zero;
    IsometryKind { isometry, diagonal, triangular }
}

/// A ZG-lattice `Z^r` with `g·x = x·A_g` and `A_{gh} = A_h·A_g`.
#[derive(Clone, Debug)]
pub struct GLattice {
    group: Arc<FiniteGroupModel>,
    rank: usize,
    /// One matrix per group element, in element order.
    action: Vec<IntMatrix>,
}

impl GLattice {
    /// Builds the action from generator matrices, checking every relation
    /// of the group model.
    pub fn from_generators(group: &Arc<FiniteGroupModel>, rank: usize, gens: &[IntMatrix]) -> Result<Self> {
        let gen_elems = group.generators();
        if gens.len() != gen_elems.len() {
            return Err(Error::InvalidInput("one action matrix per generator".into()));
        }
        if gens.iter().any(|a| a.rows() != rank || a.cols() != rank) {
            return Err(Error::InvalidInput("action matrices have the wrong size".into()));
        }
        if group.order().saturating_mul(rank) > LATTICE_LIMIT {
            return Err(Error::TooLarge(format!("|G|*rank exceeds {LATTICE_LIMIT}")));
        }
        let mut action: Vec<Option<IntMatrix>> = vec![None; group.order()];
        action[0] = Some(IntMatrix::identity(rank));
        let mut queue = VecDeque::from([0usize]);
        while let Some(g) = queue.pop_front() {
            let ag = action[g].clone().unwrap();
            for (&s, a_s) in gen_elems.iter().zip(gens) {
                // (s·g)·x = x·A_g·A_s
                let h = group.mul(s, g);
                let m = ag.mul(a_s);
                match &action[h] {
                    None => {
                        action[h] = Some(m);
                        queue.push_back(h);
                    }
                    Some(existing) if *existing != m => {
                        return Err(Error::InvalidInput("action matrices violate a group relation".into()));
                    }
                    _ => {}
                }
            }
        }
        let action = action.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| Error::InvalidInput("group not generated".into()))?;
        Ok(GLattice { group: group.clone(), rank, action })
    }

    /// `Z^r` with trivial action.
    pub fn trivial(group: &Arc<FiniteGroupModel>, rank: usize) -> Result<Self> {
        let gens = vec![IntMatrix::identity(rank); group.generators().len()];
        Self::from_generators(group, rank, &gens)
    }

    /// `ZG` with basis `G`, `g·h = gh`.
    pub fn regular(group: &Arc<FiniteGroupModel>) -> Result<Self> {
        Self::free(group, 1)
    }

    /// `ZG^k` with basis `e_i ⊗ h` ordered by `i` then `h`.
    pub fn free(group: &Arc<FiniteGroupModel>, k: usize) -> Result<Self> {
        let n = group.order();
        let gens: Vec<IntMatrix> = group.generators().iter().map(|&s| permutation_action(group, s, k)).collect();
        Self::from_generators(group, k * n, &gens)
    }

    /// The sublattice with row basis `basis` of `ambient`, which must be
    /// G-stable.
    pub fn sublattice(ambient: &GLattice, basis: &IntMatrix) -> Result<Self> {
        let solver = LeftSolver::new(basis);
        let gens: Vec<IntMatrix> = ambient
            .group
            .generators()
            .iter()
            .map(|&s| {
                let moved = basis.mul(&ambient.action[s]);
                let rows = (0..moved.rows())
                    .map(|i| solver.solve(moved.row(i)).ok_or_else(|| Error::BasisError("sublattice is not G-stable".into())))
                    .collect::<Result<Vec<_>>>()?;
                Ok(IntMatrix::from_rows(rows, basis.rows()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_generators(&ambient.group, basis.rows(), &gens)
    }

    /// `π_n = ker ∂_n ⊆ C_n` for an algebraic complex, with the saturated
    /// basis used.
    pub fn top_cycles(c: &AlgebraicComplex) -> Result<(Self, IntMatrix)> {
        let n = c.length();
        let d = c.boundary(n);
        let size = d.rows() * c.group().order();
        if size.saturating_mul(c.group().order()) > LATTICE_LIMIT * 8 {
            return Err(Error::TooLarge(format!("z-expansion of size {size} is too large")));
        }
        let basis = left_kernel_basis(&d.z_expand());
        let ambient = Self::free(c.group(), d.rows())?;
        Ok((Self::sublattice(&ambient, &basis)?, basis))
    }

    pub fn group(&self) -> &Arc<FiniteGroupModel> {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn action(&self, g: usize) -> &IntMatrix {
        &self.action[g]
    }

    /// `L* = Hom(L, Z)` with `(g·φ)(x) = φ(g⁻¹x)`; a functional `f` pairs
    /// with `x` as `x·fᵀ`.
    pub fn dual(&self) -> GLattice {
        let action = (0..self.group.order()).map(|g| self.action[self.group.inv(g)].transpose()).collect();
        GLattice { group: self.group.clone(), rank: self.rank, action }
    }

    /// `Σ_g A_g`.
    pub fn norm_matrix(&self) -> IntMatrix {
        self.action.iter().fold(IntMatrix::zeros(self.rank, self.rank), |acc, a| acc.add(a))
    }

    /// Row basis of `L^G`.
    pub fn fixed_basis(&self) -> IntMatrix {
        let id = IntMatrix::identity(self.rank);
        let mut stacked = IntMatrix::zeros(self.rank, 0);
        for &s in &self.group.generators() {
            stacked = stacked.hstack(&self.action[s].sub(&id));
        }
        left_kernel_basis(&stacked)
    }

    /// Whether `A_g·Φ·A_gᵀ = Φ` for all `g`.
    pub fn is_invariant_form(&self, phi: &IntMatrix) -> bool {
        self.group.generators().iter().all(|&s| self.action[s].mul(phi).mul(&self.action[s].transpose()) == *phi)
    }
}

fn permutation_action(group: &Arc<FiniteGroupModel>, s: usize, k: usize) -> IntMatrix {
    let n = group.order();
    let mut m = IntMatrix::zeros(k * n, k * n);
    for i in 0..k {
        for h in 0..n {
            m[(i * n + h, i * n + group.mul(s, h))] = BigInt::one();
        }
    }
    m
}

/// `L^G` in an adapted basis `f_i` with `N·L = ⊕ n_i f_i`, so that
/// `L̂ = ⊕ Z/n_i`.
#[derive(Clone, Debug, Serialize)]
pub struct FixedAndTate {
    /// Rows `f_i` in ambient coordinates.
    pub fixed_basis: IntMatrix,
    /// `n_i`, in divisibility order, including ones.
    #[serde(serialize_with = "ser_bigs")]
    pub n: Vec<BigInt>,
    /// Invariant factors of `L̂` (the `n_i` greater than one).
    #[serde(serialize_with = "ser_bigs")]
    pub tate_factors: Vec<BigInt>,
    /// `ψ: L^G ↠ L̂` in adapted bases: row `i` reduces mod `n_i`.
    pub psi: IntMatrix,
}

fn ser_bigs<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strs: Vec<String> = v.iter().map(BigInt::to_string).collect();
    strs.serialize(s)
}

pub fn fixed_and_tate(l: &GLattice) -> Result<FixedAndTate> {
    if l.group.order().saturating_mul(l.rank) > LATTICE_LIMIT {
        return Err(Error::TooLarge(format!("|G|*rank exceeds {LATTICE_LIMIT}")));
    }
    let k = l.fixed_basis();
    let d = k.rows();
    let norm = l.norm_matrix();
    // rows of N in the coordinates of k
    let solver = LeftSolver::new(&k);
    let y_rows = (0..norm.rows())
        .map(|i| solver.solve(norm.row(i)).ok_or_else(|| Error::BasisError("norm image is not fixed".into())))
        .collect::<Result<Vec<_>>>()?;
    let y = IntMatrix::from_rows(y_rows, d);
    let snf = smith_normal_form(&y);
    let n: Vec<BigInt> = snf.diagonal().into_iter().map(|x| x.abs()).collect();
    if n.len() < d || n.iter().any(Zero::is_zero) {
        return Err(Error::BasisError("N·L has smaller rank than L^G".into()));
    }
    // x = c·k = (c·V)·(V⁻¹·k)
    let vinv = unimodular_inverse(&snf.v).expect("SNF transforms are unimodular");
    let fixed_basis = vinv.mul(&k);
    let tate_factors = n.iter().filter(|x| !x.is_one()).cloned().collect();
    Ok(FixedAndTate { fixed_basis, n, tate_factors, psi: IntMatrix::identity(d) })
}

/// `e^G` and `ê` in adapted bases.
#[derive(Clone, Debug, Serialize)]
pub struct EvaluationForms {
    pub e_fixed: EpsForm,
    /// Over Z/|G|, restricted to coordinates with `n_i > 1`.
    pub e_tate: EpsForm,
    /// `n_i` of the retained Tate coordinates.
    #[serde(serialize_with = "ser_bigs")]
    pub tate_moduli: Vec<BigInt>,
    #[serde(serialize_with = "ser_bigs")]
    pub beta: Vec<BigInt>,
    #[serde(serialize_with = "ser_bigs")]
    pub n: Vec<BigInt>,
    pub fixed_basis: IntMatrix,
    /// Rows: a basis of `(L*)^G` whose restrictions are `β_i f_i^*`.
    pub dual_fixed_basis: IntMatrix,
    /// Invariant factors of `coker((L*)^G → (L^G)*)`.
    #[serde(serialize_with = "ser_bigs")]
    pub restriction_cokernel: Vec<BigInt>,
}

/// Evaluation pairing `b((φ1,m1),(φ2,m2)) = φ1(m2) + ε·φ2(m1)` restricted to
/// fixed points, in bases where the restriction is `diag(β)`.
pub fn evaluation_forms(l: &GLattice, eps: i64) -> Result<EvaluationForms> {
    let ft = fixed_and_tate(l)?;
    let order = BigInt::from(l.group.order());
    let d = ft.fixed_basis.rows();
    let kstar = l.dual().fixed_basis();
    if kstar.rows() != d {
        return Err(Error::BasisError("(L*)^G and L^G have different ranks".into()));
    }
    // R[i][j] = φ_i(f_j)
    let r = kstar.mul(&ft.fixed_basis.transpose());
    let beta: Vec<BigInt> = ft.n.iter().map(|ni| &order / ni).collect();
    if ft.n.iter().any(|ni| !order.is_multiple_of(ni)) {
        return Err(Error::BasisError("a Tate factor does not divide |G|".into()));
    }
    // R = W·diag(β) with W unimodular
    let w = IntMatrix::from_fn(d, d, |i, j| {
        let (q, rem) = r[(i, j)].div_rem(&beta[j]);
        if rem.is_zero() { q } else { BigInt::from(i64::MAX) }
    });
    let winv = unimodular_inverse(&w).ok_or_else(|| Error::BasisError("restriction image is not diag(beta) in adapted bases".into()))?;
    let dual_fixed_basis = winv.mul(&kstar);
    let restriction_cokernel: Vec<BigInt> =
        crate::intlin::smith_diagonal(&r).into_iter().map(|x| x.abs()).filter(|x| !x.is_one()).collect();

    let db = IntMatrix::diagonal(&beta);
    let mut g = IntMatrix::zeros(2 * d, 2 * d);
    g.set_block(0, d, &db);
    g.set_block(d, 0, &db.scale(&BigInt::from(eps)));
    let e_fixed = EpsForm::new(0, eps, g.clone())?;
    let keep: Vec<usize> = (0..d).filter(|&i| !ft.n[i].is_one()).collect();
    let idx: Vec<usize> = keep.iter().copied().chain(keep.iter().map(|i| i + d)).collect();
    let sub = IntMatrix::from_fn(idx.len(), idx.len(), |i, j| g[(idx[i], idx[j])].clone());
    let e_tate = EpsForm::new(l.group.order() as u64, eps, sub)?;
    Ok(EvaluationForms {
        e_fixed,
        e_tate,
        tate_moduli: keep.iter().map(|&i| ft.n[i].clone()).collect(),
        beta,
        n: ft.n,
        fixed_basis: ft.fixed_basis,
        dual_fixed_basis,
        restriction_cokernel,
    })
}

/// Fixed and Tate forms of `Met_ε(L, Φ)` in the adapted bases of `ef`.
pub fn metabolic_fixed_forms(l: &GLattice, phi: &IntMatrix, eps: i64, ef: &EvaluationForms) -> Result<(EpsForm, EpsForm)> {
    let h = metabolic(&EpsForm::new(0, eps, phi.clone())?);
    let b = ef.dual_fixed_basis.block_diag(&ef.fixed_basis);
    let fixed = EpsForm::new(0, eps, b.mul(h.gram()).mul(&b.transpose()))?;
    let d = ef.fixed_basis.rows();
    let keep: Vec<usize> = (0..d).filter(|&i| !ef.n[i].is_one()).collect();
    let idx: Vec<usize> = keep.iter().copied().chain(keep.iter().map(|i| i + d)).collect();
    let sub = IntMatrix::from_fn(idx.len(), idx.len(), |i, j| fixed.gram()[(idx[i], idx[j])].clone());
    let tate = EpsForm::new(l.group.order() as u64, eps, sub)?;
    Ok((fixed, tate))
}

/// A random G-invariant ε-symmetric `Φ` on `L` with `Φ^G = 0`:
/// `Σ_g A_g (αβᵀ + εβαᵀ) A_gᵀ` with `α` vanishing on `L^G`.
pub fn random_form_vanishing_on_fixed<R: Rng>(l: &GLattice, eps: i64, rng: &mut R, bound: i64) -> IntMatrix {
    let fixed = l.fixed_basis();
    let ann = kernel_basis(&fixed);
    let r = l.rank;
    let mut alpha = vec![BigInt::zero(); r];
    for j in 0..ann.cols() {
        let c = BigInt::from(rng.gen_range(-bound..=bound));
        for i in 0..r {
            alpha[i] += &c * &ann[(i, j)];
        }
    }
    let beta: Vec<BigInt> = (0..r).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect();
    let e = BigInt::from(eps);
    let m = IntMatrix::from_fn(r, r, |i, j| &alpha[i] * &beta[j] + &e * &beta[i] * &alpha[j]);
    l.action.iter().fold(IntMatrix::zeros(r, r), |acc, a| acc.add(&a.mul(&m).mul(&a.transpose())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn basic_forms() {
        assert_eq!(hyperbolic(1, 1).gram(), &IntMatrix::from_i64(&[&[0, 1], &[1, 0]]));
        assert_eq!(hyperbolic(1, -1).gram(), &IntMatrix::from_i64(&[&[0, 1], &[-1, 0]]));
        assert_eq!(hyperbolic(0, 1).rank(), 0);
        let h = EpsForm::new(0, 1, IntMatrix::from_i64(&[&[2]])).unwrap();
        assert_eq!(metabolic(&h).gram(), &IntMatrix::from_i64(&[&[0, 1], &[1, 2]]));
        assert!(EpsForm::new(0, -1, IntMatrix::from_i64(&[&[0, 1], &[1, 0]])).is_err());
    }

    #[test]
    fn isometry_shapes() {
        let f = hyperbolic(2, 1).reduce_to(5).unwrap();
        let id = IntMatrix::identity(4);
        let k = isometry_kind(&id, &f);
        assert!(k.diagonal && k.triangular);
        let t = IntMatrix::from_i64(&[&[1, 0, 0, 2], &[0, 1, -2, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        assert_eq!(isometry_kind(&t, &f).label(), "triangular");
        let h = hyperbolic(1, 1).reduce_to(7).unwrap();
        let dm = IntMatrix::from_i64(&[&[3, 0], &[0, 5]]);
        assert_eq!(isometry_kind(&dm, &h).label(), "diagonal");
        assert_eq!(isometry_kind(&IntMatrix::from_i64(&[&[2, 0], &[0, 2]]), &h).label(), "not-isometry");
    }

    #[test]
    fn tate_of_small_lattices() {
        let g = FiniteGroupModel::abelian(&[3]).unwrap();
        let reg = GLattice::regular(&g).unwrap();
        let ft = fixed_and_tate(&reg).unwrap();
        assert!(ft.tate_factors.is_empty());
        let ef = evaluation_forms(&reg, 1).unwrap();
        assert_eq!(ef.beta, vec![b(3)]);
        assert_eq!(ef.e_fixed.gram(), &IntMatrix::from_i64(&[&[0, 3], &[3, 0]]));
        assert_eq!(ef.e_tate.rank(), 0);

        let triv = GLattice::trivial(&g, 1).unwrap();
        let ef = evaluation_forms(&triv, 1).unwrap();
        assert_eq!(ef.n, vec![b(3)]);
        assert_eq!(ef.e_fixed.gram(), &IntMatrix::from_i64(&[&[0, 1], &[1, 0]]));
        assert_eq!(ef.e_tate.modulus(), 3);
    }

    #[test]
    fn relations_are_checked() {
        let g = FiniteGroupModel::abelian(&[2]).unwrap();
        assert!(GLattice::from_generators(&g, 1, &[IntMatrix::from_i64(&[&[2]])]).is_err());
        assert!(GLattice::from_generators(&g, 1, &[IntMatrix::from_i64(&[&[-1]])]).is_ok());
    }
}
