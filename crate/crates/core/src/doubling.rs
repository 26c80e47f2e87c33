//! Algebraic `2n`-doubles `M(C, φ)`, doubled chain maps `M(f, g)`, the
//! induced maps on Tate groups, and the quadratic bias `q∘β`.
//!
//! `C_n^*` is written as `ZG^r` via `ψ ↦ (x ↦ Σ x_i ψ̄_i)`; a matrix `M`
//! then dualises to `M.dual()`. In z-coordinates the Z-valued functional
//! of `ψ` is the dot product with `vec(ψ)`, and `z(M.dual()) = z(M)ᵀ`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{evaluation_forms, metabolic, EpsForm, EvaluationForms, GLattice};
use crate::foxbias::{polarised_bias, verify_chain_map, AlgebraicComplex, BiasResult, ChainMap};
use crate::groupring::{FiniteGroupModel, ZGMatrix};
use crate::intlin::{HomologyGroup, IntMatrix, LeftSolver};
use crate::units::{class_of, SubgroupDescriptor, UnitClass, UnitSubgroup};

/// `M(C, φ)`: the complex of length `2n` and the form `Met_ε(L, φ)`.
#[derive(Clone, Debug)]
pub struct DoubleComplex {
    pub source: AlgebraicComplex,
    pub complex: AlgebraicComplex,
    pub epsilon: i64,
    /// Gram matrix of `φ` on `L = ker ∂_n` in the lattice basis of
    /// [`GLattice::top_cycles`]; `None` means `φ = 0`.
    pub phi: Option<IntMatrix>,
}

impl DoubleComplex {
    pub fn n(&self) -> usize {
        self.source.length()
    }

    /// `Met_ε(L, φ)` on `L* ⊕ L`, given the rank of `L`.
    pub fn intersection_form(&self, rank: usize) -> Result<EpsForm> {
        let phi = self.phi.clone().unwrap_or_else(|| IntMatrix::zeros(rank, rank));
        Ok(metabolic(&EpsForm::new(0, self.epsilon, phi)?))
    }
}

fn group_of(c: &AlgebraicComplex) -> &Arc<FiniteGroupModel> {
    c.group()
}

/// The double. A nonzero `φ` must be a G-invariant ε-symmetric form on
/// `L` vanishing on `L^G`.
pub fn double(c: &AlgebraicComplex, phi: Option<&IntMatrix>) -> Result<DoubleComplex> {
    let n = c.length();
    let g = group_of(c);
    let eps = c.epsilon();
    if let Some(phi) = phi {
        let (l, _) = GLattice::top_cycles(c)?;
        if phi.rows() != l.rank() || phi.cols() != l.rank() {
            return Err(Error::FormMismatch(format!("form has size {}, L has rank {}", phi.rows(), l.rank())));
        }
        if phi.transpose().scale(&BigInt::from(eps)) != *phi {
            return Err(Error::FormMismatch("form is not ε-symmetric".into()));
        }
        if !l.is_invariant_form(phi) {
            return Err(Error::FormMismatch("form is not G-invariant".into()));
        }
        let k = l.fixed_basis();
        if !k.mul(phi).mul(&k.transpose()).is_zero() {
            return Err(Error::FormMismatch("form does not vanish on L^G".into()));
        }
    }
    let mut bs: Vec<ZGMatrix> = Vec::with_capacity(2 * n);
    for i in 1..n {
        bs.push(c.boundary(i).clone());
    }
    let dn = c.boundary(n);
    let rn = dn.rows();
    bs.push(ZGMatrix::zeros(g, rn, dn.cols()).vstack(dn));
    bs.push(dn.dual().hstack(&ZGMatrix::zeros(g, dn.cols(), rn)));
    for k in 2..=n {
        bs.push(c.boundary(n - k + 1).dual());
    }
    let complex = AlgebraicComplex::new(g, bs)?;
    Ok(DoubleComplex { source: c.clone(), complex, epsilon: eps, phi: phi.cloned() })
}

/// `M(f, g)` for `f: C → C′` and `g: C′ → C`.
#[derive(Clone, Debug)]
pub struct DoubledMap {
    pub f: ChainMap,
    pub g: ChainMap,
    pub map: ChainMap,
}

pub fn double_map(f: &ChainMap, g: &ChainMap, d: &DoubleComplex, d2: &DoubleComplex) -> Result<DoubledMap> {
    if f.source != d.source || f.target != d2.source || g.source != f.target || g.target != f.source {
        return Err(Error::ChainMapFailure("maps do not run between the doubled complexes".into()));
    }
    let n = d.n();
    let mut maps: Vec<ZGMatrix> = (0..n).map(|i| f.maps[i].clone()).collect();
    maps.push(g.maps[n].dual().block_diag(&f.maps[n]));
    for k in 1..=n {
        maps.push(g.maps[n - k].dual());
    }
    let map = verify_chain_map(maps, &d.complex, &d2.complex)?;
    Ok(DoubledMap { f: f.clone(), g: g.clone(), map })
}

/// Homology of a double against `Z, 0, …, 0, L* ⊕ L, 0, …, 0, Z`.
#[derive(Clone, Debug, Serialize)]
pub struct HomologyPattern {
    pub groups: Vec<HomologyGroup>,
    pub rank_l: usize,
    pub matches: bool,
}

pub fn homology_pattern(d: &DoubleComplex) -> Result<HomologyPattern> {
    let groups = d.complex.underlying_homology()?;
    let n = d.n();
    let rank_l = d.source.underlying_homology()?[n].free_rank;
    let z = |h: &HomologyGroup| h.free_rank == 1 && h.torsion.is_empty();
    let zero = |h: &HomologyGroup| h.free_rank == 0 && h.torsion.is_empty();
    let matches = groups.iter().enumerate().all(|(i, h)| {
        if i == 0 || i == 2 * n {
            z(h)
        } else if i == n {
            h.free_rank == 2 * rank_l && h.torsion.is_empty()
        } else {
            zero(h)
        }
    });
    Ok(HomologyPattern { groups, rank_l, matches })
}

/// `L = ker ∂_n` with its evaluation forms, for one side of a doubled map.
#[derive(Clone, Debug)]
pub struct TateData {
    pub lattice: GLattice,
    /// Rows: basis of `L` in z-coordinates of `C_n`.
    pub basis: IntMatrix,
    pub forms: EvaluationForms,
}

impl TateData {
    pub fn of(c: &AlgebraicComplex) -> Result<Self> {
        let (lattice, basis) = GLattice::top_cycles(c)?;
        let forms = evaluation_forms(&lattice, c.epsilon())?;
        Ok(TateData { lattice, basis, forms })
    }

    fn tate_coords(&self) -> Vec<usize> {
        (0..self.forms.n.len()).filter(|&i| !self.forms.n[i].is_one()).collect()
    }
}

/// `H_n(h)` on `(L₁*)^G ⊕ L₁^G → (L₂*)^G ⊕ L₂^G` in adapted bases, and its
/// reduction to Tate groups.
#[derive(Clone, Debug, Serialize)]
pub struct TateDiagonal {
    /// Integral matrix in adapted bases, dual block first.
    pub fixed_matrix: IntMatrix,
    /// Restriction to Tate coordinates, column `j` reduced mod its modulus.
    pub tate_matrix: IntMatrix,
    pub mu: IntMatrix,
    pub nu: IntMatrix,
    #[serde(serialize_with = "ser_bigs")]
    pub source_moduli: Vec<BigInt>,
    #[serde(serialize_with = "ser_bigs")]
    pub target_moduli: Vec<BigInt>,
    pub well_defined: bool,
    pub diagonal: bool,
    pub isometry: bool,
}

fn ser_bigs<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(BigInt::to_string).collect::<Vec<_>>().serialize(s)
}

fn solve_all(solver: &LeftSolver, rows: &IntMatrix, cols: usize, what: &str) -> Result<IntMatrix> {
    let out = (0..rows.rows())
        .map(|i| solver.solve(rows.row(i)).ok_or_else(|| Error::BasisError(format!("{what}: row {} leaves the span", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntMatrix::from_rows(out, cols))
}

/// Computes `H_n(h)^` from the four blocks of `h_n`, checks that it is
/// well defined on Tate groups, block diagonal and an isometry of `ê`.
/// Fails with `NotDiagonal` otherwise.
pub fn tate_diagonal_check(h: &DoubledMap, t1: &TateData, t2: &TateData) -> Result<TateDiagonal> {
    let n = h.f.source.length();
    let hn = h.map.degree(n);
    let (r1, r2) = (h.f.source.ranks()[n], h.f.target.ranks()[n]);
    let blk = |r0: usize, c0: usize, rows: usize, cols: usize| {
        let mut m = ZGMatrix::zeros(hn.group(), rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, hn.get(r0 + i, c0 + j).clone());
            }
        }
        m.z_expand()
    };
    let (p, x) = (blk(0, 0, r1, r2), blk(0, r2, r1, r2));
    let (y, q) = (blk(r1, 0, r1, r2), blk(r1, r2, r1, r2));

    let (f1, f2) = (&t1.forms, &t2.forms);
    let (d1, d2) = (f1.fixed_basis.rows(), f2.fixed_basis.rows());
    // adapted bases in z-coordinates
    let elems1 = f1.fixed_basis.mul(&t1.basis);
    let lift_solver = LeftSolver::new(&t1.basis.transpose());
    let funcs1 = solve_all(&lift_solver, &f1.dual_fixed_basis, t1.basis.cols(), "functional lift")?;

    let b2_solver = LeftSolver::new(&t2.basis);
    let fixed2 = LeftSolver::new(&f2.fixed_basis);
    let dual2 = LeftSolver::new(&f2.dual_fixed_basis);
    let b2t = t2.basis.transpose();
    let to_dual = |v: &IntMatrix| solve_all(&dual2, &v.mul(&b2t), d2, "dual image");
    let to_fixed = |v: &IntMatrix| {
        let coords = solve_all(&b2_solver, v, t2.basis.rows(), "image in L")?;
        solve_all(&fixed2, &coords, d2, "fixed image")
    };
    let mu = to_dual(&funcs1.mul(&p))?;
    let upper = to_fixed(&funcs1.mul(&x))?;
    let lower = to_dual(&elems1.mul(&y))?;
    let nu = to_fixed(&elems1.mul(&q))?;
    let fixed_matrix = mu.hstack(&upper).vstack(&lower.hstack(&nu));

    let order = BigInt::from(hn.group().order());
    let n1 = &f1.n;
    let n2 = &f2.n;
    let src: Vec<usize> = (0..d1).chain((0..d1).map(|i| i + d1)).collect();
    let tgt_mod = |j: usize| &n2[j % d2];
    // rows in N·L must land in N·L
    let well_defined = (0..2 * d1).all(|i| {
        (0..2 * d2).all(|j| {
            let ni = &n1[src[i] % d1];
            (&fixed_matrix[(i, j)] * ni).is_multiple_of(tgt_mod(j))
        })
    });
    let k1 = t1.tate_coords();
    let k2 = t2.tate_coords();
    let rows: Vec<usize> = k1.iter().copied().chain(k1.iter().map(|i| i + d1)).collect();
    let cols: Vec<usize> = k2.iter().copied().chain(k2.iter().map(|j| j + d2)).collect();
    let tate_matrix = IntMatrix::from_fn(rows.len(), cols.len(), |i, j| fixed_matrix[(rows[i], cols[j])].mod_floor(tgt_mod(cols[j])));
    let (a, b) = (k1.len(), k2.len());
    let diagonal = a == b
        && (0..a).all(|i| (0..b).all(|j| tate_matrix[(i, b + j)].is_zero() && tate_matrix[(a + i, j)].is_zero()));
    let isometry = a == b && {
        let lhs = tate_matrix.mul(f1.e_tate.gram()).mul(&tate_matrix.transpose()).reduce_mod(&order);
        lhs == f2.e_tate.gram().reduce_mod(&order)
    };
    let result = TateDiagonal {
        mu: tate_matrix.submatrix(0..a, 0..b.min(tate_matrix.cols())),
        nu: tate_matrix.submatrix(a..2 * a, b..2 * b),
        fixed_matrix,
        tate_matrix,
        source_moduli: k1.iter().map(|&i| n1[i].clone()).collect(),
        target_moduli: k2.iter().map(|&j| n2[j].clone()).collect(),
        well_defined,
        diagonal,
        isometry,
    };
    if !(result.well_defined && result.diagonal && result.isometry) {
        return Err(Error::NotDiagonal(format!(
            "well_defined={} diagonal={} isometry={}",
            result.well_defined, result.diagonal, result.isometry
        )));
    }
    Ok(result)
}

/// Data for pushing a bias into `B_Q(G, n)`.
#[derive(Clone, Debug)]
pub struct QuadraticContext {
    pub m: u64,
    /// Rank `d` of `H_n(G) ≅ (Z/m)^d`.
    pub d: u64,
    pub n: u64,
    /// Preimage of `D(G, n)` in `(Z/m)^×`.
    pub d_subgroup: UnitSubgroup,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadraticBias {
    pub bias: BiasResult,
    pub class: UnitClass,
}

/// `β_Q = q(β)`: the polarised bias of `f` in `(Z/m)^×/(±·squares·D)` for
/// even `n`, and in the trivial group for odd `n`.
pub fn quadratic_bias_class(f: &ChainMap, ctx: &QuadraticContext) -> Result<QuadraticBias> {
    if f.source.length() as u64 != ctx.n {
        return Err(Error::InvalidInput("complex length differs from n".into()));
    }
    let bias = polarised_bias(f, ctx.m)?;
    let denominator = if ctx.n % 2 == 1 {
        UnitSubgroup::new(ctx.m, SubgroupDescriptor::Powers(1))?
    } else {
        if ctx.d < 3 {
            return Err(Error::HypothesisViolation(format!("B_Q closed form needs d >= 3, got d = {}", ctx.d)));
        }
        UnitSubgroup::new(ctx.m, SubgroupDescriptor::MinusPowers(2))?.join(&ctx.d_subgroup)?
    };
    let class = class_of(ctx.m, &bias.induced.det, &denominator)?;
    Ok(QuadraticBias { bias, class })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foxbias::{abelian_family, lift_chain_map, Presentation};
    use crate::groupring::FiniteGroupModel;

    #[test]
    fn dual_expands_to_transpose() {
        let g = FiniteGroupModel::abelian(&[3, 2]).unwrap();
        let m = ZGMatrix::parse(&g, &[&["a - 2*b", "a^2*b"], &["1", "0"], &["3*a", "b - a"]]).unwrap();
        assert_eq!(m.dual().z_expand(), m.z_expand().transpose());
    }

    #[test]
    fn cyclic_double() {
        let g = FiniteGroupModel::abelian(&[4]).unwrap();
        let c = Presentation::parse("<a | a^4>", g).unwrap().complex().unwrap();
        let d = double(&c, None).unwrap();
        assert_eq!(d.complex.ranks(), &[1, 1, 2, 1, 1]);
        let pat = homology_pattern(&d).unwrap();
        assert!(pat.matches, "{:?}", pat.groups);
        assert_eq!(pat.rank_l, 3);
    }

    #[test]
    fn identity_doubles_to_identity() {
        let c = abelian_family(&[3, 3], 1).unwrap().complex().unwrap();
        let d = double(&c, None).unwrap();
        let id = ChainMap::identity(&c);
        let h = double_map(&id, &id, &d, &d).unwrap();
        assert!(h.map.maps.iter().all(|m| *m == ZGMatrix::identity(m.group(), m.rows())));
        let t = TateData::of(&c).unwrap();
        let v = tate_diagonal_check(&h, &t, &t).unwrap();
        assert!(v.nu.is_identity() && v.mu.is_identity());
    }

    #[test]
    fn abelian_pair() {
        let c1 = abelian_family(&[3, 3], 1).unwrap().complex().unwrap();
        let c2 = abelian_family(&[3, 3], 2).unwrap().complex().unwrap();
        let f = lift_chain_map(&c2, &c1).unwrap();
        let g = lift_chain_map(&c1, &c2).unwrap();
        let (d1, d2) = (double(&c2, None).unwrap(), double(&c1, None).unwrap());
        let h = double_map(&f, &g, &d1, &d2).unwrap();
        let v = tate_diagonal_check(&h, &TateData::of(&c2).unwrap(), &TateData::of(&c1).unwrap()).unwrap();
        assert_eq!(v.nu.rows(), 1);
        let r = v.nu[(0, 0)].clone();
        assert!(r == BigInt::from(2) || r == BigInt::from(1), "{r}");
    }
}
