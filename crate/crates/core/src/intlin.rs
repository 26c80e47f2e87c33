//! Exact integer linear algebra: Smith and Hermite normal forms, kernels,
//! cokernels and integral solving of `x·A = b`.
//!
//! All matrices act on row vectors from the right.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Dense integer matrix with arbitrary-precision entries, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data }
    }

    /// Builds a matrix from row slices of machine integers.
    ///
    /// Panics if the rows are ragged.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        assert!(rows.iter().all(|row| row.len() == cols), "ragged rows");
        let r = rows.len();
        IntMatrix { rows: r, cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn row_vector(v: &[BigInt]) -> Self {
        IntMatrix { rows: 1, cols: v.len(), data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| {
                let e = &self[(i, j)];
                if i == j { e.is_one() } else { e.is_zero() }
            }))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let orow = other.row(k);
                let base = i * other.cols;
                for (j, b) in orow.iter().enumerate() {
                    if !b.is_zero() {
                        out.data[base + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> IntMatrix {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, s: &BigInt) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (k, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, b) in out.iter_mut().zip(self.row(k)) {
                if !b.is_zero() {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Entries reduced into `[0, m)`. A modulus of zero leaves the matrix unchanged.
    pub fn reduce_mod(&self, m: &BigInt) -> IntMatrix {
        if m.is_zero() {
            return self.clone();
        }
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.mod_floor(m)).collect() }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> IntMatrix {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows.start + i, cols.start + j)].clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        Self::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)].clone())
    }

    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols { self[(i, j)].clone() } else { other[(i, j - self.cols)].clone() }
        })
    }

    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn block_diag(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    /// Writes `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &IntMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn rank(&self) -> usize {
        smith_diagonal(self).iter().filter(|d| !d.is_zero()).count()
    }

    /// Small-entry view; `None` if some entry does not fit an `i64`.
    pub fn to_i64(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|e| e.to_i64()).collect()).collect()
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|i| self.row(i).iter().map(|e| e.to_string()).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(D::Error::custom("ragged matrix"));
        }
        let mut parsed = Vec::with_capacity(rows.len());
        for row in rows {
            let mut out = Vec::with_capacity(cols);
            for e in row {
                out.push(e.parse::<BigInt>().map_err(D::Error::custom)?);
            }
            parsed.push(out);
        }
        Ok(IntMatrix::from_rows(parsed, cols))
    }
}

// ---------------------------------------------------------------------------
// Elimination kernel.
//
// The same reduction runs over checked i128 first and restarts over BigInt if
// an intermediate entry overflows.

mod kernel {
    use num_bigint::BigInt;
    use num_traits::{One, Signed, ToPrimitive, Zero};

    use super::IntMatrix;

    #[derive(Debug)]
    pub(super) struct Overflow;

    pub(super) trait Ring: Clone + PartialEq {
        fn zero() -> Self;
        fn one() -> Self;
        fn is_zero(&self) -> bool;
        fn abs_lt(&self, other: &Self) -> bool;
        fn quot(&self, d: &Self) -> Self;
        fn divides(&self, x: &Self) -> bool;
        fn is_negative(&self) -> bool;
        fn negate(&mut self);
        /// `self -= q * x`
        fn sub_mul(&mut self, q: &Self, x: &Self) -> std::result::Result<(), Overflow>;
        fn add(&mut self, x: &Self) -> std::result::Result<(), Overflow>;
        fn to_big(&self) -> BigInt;
    }

    impl Ring for i128 {
        fn zero() -> Self {
            0
        }
        fn one() -> Self {
            1
        }
        fn is_zero(&self) -> bool {
            *self == 0
        }
        fn abs_lt(&self, other: &Self) -> bool {
            self.unsigned_abs() < other.unsigned_abs()
        }
        fn quot(&self, d: &Self) -> Self {
            self / d
        }
        fn divides(&self, x: &Self) -> bool {
            x % self == 0
        }
        fn is_negative(&self) -> bool {
            *self < 0
        }
        fn negate(&mut self) {
            *self = -*self;
        }
        fn sub_mul(&mut self, q: &Self, x: &Self) -> std::result::Result<(), Overflow> {
            let p = q.checked_mul(*x).ok_or(Overflow)?;
            let v = self.checked_sub(p).ok_or(Overflow)?;
            // keep headroom so that negation and pivot swaps never overflow
            if v.unsigned_abs() > (i128::MAX as u128) / 4 {
                return Err(Overflow);
            }
            *self = v;
            Ok(())
        }
        fn add(&mut self, x: &Self) -> std::result::Result<(), Overflow> {
            *self = self.checked_add(*x).ok_or(Overflow)?;
            Ok(())
        }
        fn to_big(&self) -> BigInt {
            BigInt::from(*self)
        }
    }

    impl Ring for BigInt {
        fn zero() -> Self {
            Zero::zero()
        }
        fn one() -> Self {
            One::one()
        }
        fn is_zero(&self) -> bool {
            Zero::is_zero(self)
        }
        fn abs_lt(&self, other: &Self) -> bool {
            self.magnitude() < other.magnitude()
        }
        fn quot(&self, d: &Self) -> Self {
            self / d
        }
        fn divides(&self, x: &Self) -> bool {
            Zero::is_zero(&(x % self))
        }
        fn is_negative(&self) -> bool {
            Signed::is_negative(self)
        }
        fn negate(&mut self) {
            *self = -std::mem::take(self);
        }
        fn sub_mul(&mut self, q: &Self, x: &Self) -> std::result::Result<(), Overflow> {
            *self -= q * x;
            Ok(())
        }
        fn add(&mut self, x: &Self) -> std::result::Result<(), Overflow> {
            *self += x;
            Ok(())
        }
        fn to_big(&self) -> BigInt {
            self.clone()
        }
    }

    type Rows<T> = Vec<Vec<T>>;

    pub(super) fn identity_rows<T: Ring>(n: usize) -> Rows<T> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect()
    }

    /// `rows[dst] -= q * rows[src]`, restricted to columns `from..`.
    pub(super) fn row_sub<T: Ring>(rows: &mut Rows<T>, dst: usize, src: usize, q: &T, from: usize) -> std::result::Result<(), Overflow> {
        let (d, s) = if dst < src {
            let (a, b) = rows.split_at_mut(src);
            (&mut a[dst], &b[0])
        } else {
            let (a, b) = rows.split_at_mut(dst);
            (&mut b[0], &a[src])
        };
        for (x, y) in d[from..].iter_mut().zip(&s[from..]) {
            if !y.is_zero() {
                x.sub_mul(q, y)?;
            }
        }
        Ok(())
    }

    fn row_add<T: Ring>(rows: &mut Rows<T>, dst: usize, src: usize) -> std::result::Result<(), Overflow> {
        let s = rows[src].clone();
        for (x, y) in rows[dst].iter_mut().zip(&s) {
            x.add(y)?;
        }
        Ok(())
    }

    fn col_sub<T: Ring>(a: &mut Rows<T>, dst: usize, src: usize, q: &T, from: usize) -> std::result::Result<(), Overflow> {
        for row in a[from..].iter_mut() {
            if !row[src].is_zero() {
                let s = row[src].clone();
                row[dst].sub_mul(q, &s)?;
            }
        }
        Ok(())
    }

    fn col_swap<T>(a: &mut Rows<T>, i: usize, j: usize) {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    }

    struct Reduction<T> {
        diag: Vec<T>,
        u: Option<Rows<T>>,
        /// Transposed column transform: row `j` of `vt` is column `j` of `V`.
        vt: Option<Rows<T>>,
    }

    fn smith_core<T: Ring>(mut a: Rows<T>, rows: usize, cols: usize, transforms: bool) -> std::result::Result<Reduction<T>, Overflow> {
        let mut u = transforms.then(|| identity_rows::<T>(rows));
        let mut vt = transforms.then(|| identity_rows::<T>(cols));
        let mut t = 0;
        while t < rows.min(cols) {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let e = &a[i][j];
                    if !e.is_zero() && best.is_none_or(|(bi, bj)| e.abs_lt(&a[bi][bj])) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            if let Some(u) = u.as_mut() {
                u.swap(t, pi);
            }
            col_swap(&mut a, t, pj);
            if let Some(vt) = vt.as_mut() {
                vt.swap(t, pj);
            }
            loop {
                let mut clean = true;
                for i in t + 1..rows {
                    if a[i][t].is_zero() {
                        continue;
                    }
                    let q = a[i][t].quot(&a[t][t]);
                    if !q.is_zero() {
                        row_sub(&mut a, i, t, &q, t)?;
                        if let Some(u) = u.as_mut() {
                            row_sub(u, i, t, &q, 0)?;
                        }
                    }
                    if !a[i][t].is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..cols {
                    if a[t][j].is_zero() {
                        continue;
                    }
                    let q = a[t][j].quot(&a[t][t]);
                    if !q.is_zero() {
                        col_sub(&mut a, j, t, &q, t)?;
                        if let Some(vt) = vt.as_mut() {
                            row_sub(vt, j, t, &q, 0)?;
                        }
                    }
                    if !a[t][j].is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    // move the smallest leftover in row/column t into the pivot slot
                    let mut best: Option<(usize, usize)> = None;
                    for i in t + 1..rows {
                        if !a[i][t].is_zero() && best.is_none_or(|(bi, bj)| a[i][t].abs_lt(&a[bi][bj])) {
                            best = Some((i, t));
                        }
                    }
                    for j in t + 1..cols {
                        if !a[t][j].is_zero() && best.is_none_or(|(bi, bj)| a[t][j].abs_lt(&a[bi][bj])) {
                            best = Some((t, j));
                        }
                    }
                    let (bi, bj) = best.expect("unclean pivot has a leftover");
                    if bi != t {
                        a.swap(t, bi);
                        if let Some(u) = u.as_mut() {
                            u.swap(t, bi);
                        }
                    } else {
                        col_swap(&mut a, t, bj);
                        if let Some(vt) = vt.as_mut() {
                            vt.swap(t, bj);
                        }
                    }
                    continue;
                }
                // divisibility of the trailing block by the pivot
                let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[t][t].divides(&a[i][j])));
                match bad {
                    Some(i) => {
                        row_add(&mut a, t, i)?;
                        if let Some(u) = u.as_mut() {
                            row_add(u, t, i)?;
                        }
                    }
                    None => break,
                }
            }
            if a[t][t].is_negative() {
                for x in a[t].iter_mut() {
                    x.negate();
                }
                if let Some(u) = u.as_mut() {
                    for x in u[t].iter_mut() {
                        x.negate();
                    }
                }
            }
            t += 1;
        }
        let diag = (0..rows.min(cols)).map(|i| a[i][i].clone()).collect();
        Ok(Reduction { diag, u, vt })
    }

    fn small_rows(a: &IntMatrix) -> Option<Rows<i128>> {
        let limit = BigInt::from(1u64 << 62);
        (0..a.rows)
            .map(|i| {
                a.row(i)
                    .iter()
                    .map(|e| if e.magnitude() < limit.magnitude() { e.to_i128() } else { None })
                    .collect()
            })
            .collect()
    }

    fn big_rows<T: Ring>(rows: &Rows<T>, ncols: usize) -> IntMatrix {
        IntMatrix::from_rows(rows.iter().map(|r| r.iter().map(Ring::to_big).collect()).collect(), ncols)
    }

    pub(super) struct BigReduction {
        pub(super) diag: Vec<BigInt>,
        pub(super) u: Option<IntMatrix>,
        pub(super) v: Option<IntMatrix>,
    }

    pub(super) fn reduce(a: &IntMatrix, transforms: bool) -> BigReduction {
        let (r, c) = (a.rows, a.cols);
        if let Some(small) = small_rows(a) {
            if let Ok(red) = smith_core::<i128>(small, r, c, transforms) {
                return BigReduction {
                    diag: red.diag.iter().map(Ring::to_big).collect(),
                    u: red.u.map(|u| big_rows(&u, r)),
                    v: red.vt.map(|vt| big_rows(&vt, c).transpose()),
                };
            }
        }
        let red = smith_core::<BigInt>(a.to_rows(), r, c, transforms).expect("bigint reduction cannot overflow");
        BigReduction {
            diag: red.diag,
            u: red.u.map(|u| IntMatrix::from_rows(u, r)),
            v: red.vt.map(|vt| IntMatrix::from_rows(vt, c).transpose()),
        }
    }
}

use kernel::{identity_rows, reduce, row_sub};

/// Unimodular `U`, `V` and diagonal `S` with `U·A·V = S`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// Diagonal entries `d_1 | d_2 | ...`, including trailing zeros.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let red = reduce(a, true);
    let mut s = IntMatrix::zeros(a.rows, a.cols);
    for (i, d) in red.diag.iter().enumerate() {
        s[(i, i)] = d.clone();
    }
    SnfResult { u: red.u.unwrap(), s, v: red.v.unwrap() }
}

/// Diagonal of the Smith form without transforms.
pub fn smith_diagonal(a: &IntMatrix) -> Vec<BigInt> {
    reduce(a, false).diag
}

/// Saturated basis of `{v : A·v = 0}`, one basis vector per column.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    snf.v.submatrix(0..a.cols, r..a.cols)
}

/// Saturated basis of `{x : x·A = 0}`, one basis vector per row.
pub fn left_kernel_basis(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    snf.u.submatrix(r..a.rows, 0..a.rows)
}

/// Cokernel of `A` viewed as a map `Z^cols -> Z^rows` (column convention).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cokernel {
    /// Invariant factors greater than one, in divisibility order.
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

pub fn cokernel_invariants(a: &IntMatrix) -> Cokernel {
    let diag = smith_diagonal(a);
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    let torsion = diag.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect();
    Cokernel { torsion, free_rank: a.rows - rank }
}

/// Reusable solver for `x·A = b` with a fixed `A`.
#[derive(Clone, Debug)]
pub struct LeftSolver {
    snf: SnfResult,
    diag: Vec<BigInt>,
    rank: usize,
}

impl LeftSolver {
    pub fn new(a: &IntMatrix) -> Self {
        let snf = smith_normal_form(a);
        let diag = snf.diagonal();
        let rank = diag.iter().filter(|d| !d.is_zero()).count();
        LeftSolver { snf, diag, rank }
    }

    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        let (rows, cols) = (self.snf.u.rows, self.snf.v.rows);
        assert_eq!(b.len(), cols, "right-hand side has the wrong length");
        // x·U⁻¹·S = b·V; put y = x·U⁻¹
        let c = self.snf.v.vec_mul(b);
        let mut y = vec![BigInt::zero(); rows];
        for (j, cj) in c.iter().enumerate() {
            if j < self.rank {
                let (q, r) = cj.div_rem(&self.diag[j]);
                if !r.is_zero() {
                    return None;
                }
                y[j] = q;
            } else if !cj.is_zero() {
                return None;
            }
        }
        Some(self.snf.u.vec_mul(&y))
    }
}

pub fn solve_left(a: &IntMatrix, b: &[BigInt]) -> Result<Vec<BigInt>> {
    LeftSolver::new(a).solve(b).ok_or(Error::NoSolution)
}

/// Inverse of a square matrix with determinant ±1.
pub fn unimodular_inverse(a: &IntMatrix) -> Option<IntMatrix> {
    if !a.is_square() {
        return None;
    }
    let snf = smith_normal_form(a);
    if !snf.diagonal().iter().all(|d| d.abs().is_one()) {
        return None;
    }
    // U·A·V = S with S = S⁻¹, so A⁻¹ = V·S·U
    Some(snf.v.mul(&snf.s).mul(&snf.u))
}

/// One homology group of a chain complex of free abelian groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

/// Homology of `Z^{r_n} → … → Z^{r_0}` where `boundaries[i-1]` is the
/// `r_i × r_{i-1}` matrix of `∂_i` acting on row vectors.
pub fn chain_homology(ranks: &[usize], boundaries: &[IntMatrix]) -> Vec<HomologyGroup> {
    assert_eq!(boundaries.len() + 1, ranks.len().max(1));
    for (i, d) in boundaries.iter().enumerate() {
        assert_eq!((d.rows, d.cols), (ranks[i + 1], ranks[i]), "boundary {} has the wrong shape", i + 1);
    }
    let diags: Vec<Vec<BigInt>> = boundaries.iter().map(smith_diagonal).collect();
    let rank_of = |i: usize| -> usize {
        // rank of ∂_i, zero outside the complex
        if i == 0 || i > boundaries.len() {
            0
        } else {
            diags[i - 1].iter().filter(|d| !d.is_zero()).count()
        }
    };
    (0..ranks.len())
        .map(|i| {
            let torsion = if i < boundaries.len() {
                diags[i].iter().filter(|d| !d.is_zero() && !d.is_one()).map(|d| d.abs()).collect()
            } else {
                Vec::new()
            };
            HomologyGroup { free_rank: ranks[i] - rank_of(i) - rank_of(i + 1), torsion }
        })
        .collect()
}

/// Row-style Hermite normal form `H = W·A` with `W` unimodular: nonzero rows
/// on top, positive pivots moving strictly right, entries above a pivot
/// reduced into `[0, pivot)`.
pub fn hermite_normal_form(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (rows, cols) = (a.rows, a.cols);
    let mut h = a.to_rows();
    let mut w = identity_rows::<BigInt>(rows);
    let mut pr = 0;
    for c in 0..cols {
        if pr == rows {
            break;
        }
        loop {
            let best = (pr..rows)
                .filter(|&i| !h[i][c].is_zero())
                .min_by(|&i, &j| h[i][c].magnitude().cmp(h[j][c].magnitude()));
            let Some(p) = best else { break };
            h.swap(pr, p);
            w.swap(pr, p);
            let mut done = true;
            for i in pr + 1..rows {
                if !h[i][c].is_zero() {
                    let q = h[i][c].div_floor(&h[pr][c]);
                    row_sub(&mut h, i, pr, &q, 0).unwrap();
                    row_sub(&mut w, i, pr, &q, 0).unwrap();
                    if !h[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[pr][c].is_zero() {
            continue;
        }
        if Signed::is_negative(&h[pr][c]) {
            for x in h[pr].iter_mut().chain(w[pr].iter_mut()) {
                *x = -std::mem::take(x);
            }
        }
        for i in 0..pr {
            let q = h[i][c].div_floor(&h[pr][c]);
            if !q.is_zero() {
                row_sub(&mut h, i, pr, &q, 0).unwrap();
                row_sub(&mut w, i, pr, &q, 0).unwrap();
            }
        }
        pr += 1;
    }
    (IntMatrix::from_rows(h, cols), IntMatrix::from_rows(w, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn check_snf(a: &IntMatrix) -> SnfResult {
        let snf = smith_normal_form(a);
        assert_eq!(snf.u.mul(a).mul(&snf.v), snf.s);
        assert_eq!(snf.u.det().abs(), b(1));
        assert_eq!(snf.v.det().abs(), b(1));
        let d = snf.diagonal();
        for w in d.windows(2) {
            if !w[1].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        snf
    }

    #[test]
    fn snf_small_examples() {
        let s = check_snf(&IntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.diagonal(), vec![b(1), b(6)]);
        let s = check_snf(&IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12]]));
        assert_eq!(s.diagonal(), vec![b(2), b(6)]);
        assert!(check_snf(&IntMatrix::identity(4)).s.is_identity());
    }

    #[test]
    fn bigint_fallback_matches() {
        let big = BigInt::from(1u128 << 100);
        let a = IntMatrix::from_fn(3, 3, |i, j| &big * b(((i * 7 + j * j) % 5) as i64 + 1) + b((i * j) as i64));
        let snf = check_snf(&a);
        assert_eq!(snf.rank(), 3);
    }

    #[test]
    fn kernels() {
        let k = kernel_basis(&IntMatrix::zeros(3, 3));
        assert_eq!(k.rows(), 3);
        assert_eq!(k.cols(), 3);
        assert_eq!(k.det().abs(), b(1));
        let k = kernel_basis(&IntMatrix::from_i64(&[&[2, 3]]));
        let v = k.col(0);
        assert!(v == vec![b(3), b(-2)] || v == vec![b(-3), b(2)]);
        let lk = left_kernel_basis(&IntMatrix::from_i64(&[&[1, 2], &[2, 4], &[0, 1]]));
        assert_eq!(lk.rows(), 1);
        assert!(lk.mul(&IntMatrix::from_i64(&[&[1, 2], &[2, 4], &[0, 1]])).is_zero());
    }

    #[test]
    fn cokernels() {
        let c = cokernel_invariants(&IntMatrix::diagonal(&[b(3), b(3), b(9)]));
        assert_eq!(c, Cokernel { torsion: vec![b(3), b(3), b(9)], free_rank: 0 });
        let c = cokernel_invariants(&IntMatrix::zeros(2, 0));
        assert_eq!(c, Cokernel { torsion: vec![], free_rank: 2 });
        let c = cokernel_invariants(&IntMatrix::from_i64(&[&[2, 0], &[0, 4], &[0, 0]]));
        assert_eq!(c, Cokernel { torsion: vec![b(2), b(4)], free_rank: 1 });
    }

    #[test]
    fn solving() {
        let x = solve_left(&IntMatrix::identity(3), &[b(4), b(-1), b(7)]).unwrap();
        assert_eq!(x, vec![b(4), b(-1), b(7)]);
        assert!(solve_left(&IntMatrix::from_i64(&[&[2]]), &[b(1)]).is_err());
        let x = solve_left(&IntMatrix::from_i64(&[&[1, 2], &[0, 3]]), &[b(1), b(5)]).unwrap();
        assert_eq!(x, vec![b(1), b(1)]);
    }

    #[test]
    fn hermite() {
        let a = IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let (h, w) = hermite_normal_form(&a);
        assert_eq!(w.mul(&a), h);
        assert_eq!(w.det().abs(), b(1));
        for i in 0..h.rows() {
            for j in 0..i.min(h.cols()) {
                assert!(h[(i, j)].is_zero());
            }
        }
    }

    #[test]
    fn determinant() {
        assert_eq!(IntMatrix::from_i64(&[&[1, 2], &[3, 4]]).det(), b(-2));
        assert_eq!(IntMatrix::from_i64(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 5]]).det(), b(-5));
    }

    #[test]
    fn json_round_trip() {
        let a = IntMatrix::from_i64(&[&[1, -2], &[3, 4]]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"[["1","-2"],["3","4"]]"#);
        let back: IntMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }
}
