//! The functions e(d,n) and s(d,n), binomial parity, the mod-4 parity
//! tables, and the search for d with e(d,n) even and s(d,n) odd.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Exact binomial coefficient, zero when `k > n`.
pub fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `C(a,b) mod 2` by Lucas: odd iff the bits of `b` are a subset of those of `a`.
pub fn binom_parity(a: u64, b: u64) -> u8 {
    (b & !a == 0) as u8
}

pub fn e_exact(d: u64, n: u64) -> BigInt {
    assert!(d >= 1 && n >= 2, "e(d,n) needs d >= 1, n >= 2");
    if d == 1 {
        return if n.is_multiple_of(2) { BigInt::one() } else { BigInt::from(n.div_ceil(2)) };
    }
    let mut acc = BigInt::zero();
    if n.is_multiple_of(2) {
        for i in 0..n / 2 {
            acc += BigInt::from((n - 2 * i) / 2) * binom(d + 2 * i - 1, d - 2);
        }
    } else {
        for i in 0..=(n - 1) / 2 {
            acc += BigInt::from((n + 1 - 2 * i) / 2) * binom(d + 2 * i - 2, d - 2);
        }
    }
    acc
}

pub fn s_exact(d: u64, n: u64) -> BigInt {
    assert!(d >= 2 && n >= 2, "s(d,n) needs d, n >= 2");
    let mut acc = BigInt::zero();
    for i in 0..n {
        let term = binom(d + i, d - 1);
        if (n + i + 1).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn parity(x: &BigInt) -> u8 {
    if x.is_even() { 0 } else { 1 }
}

/// Which row of the parity tables a cell falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ParityFormula {
    Zero,
    One,
    /// `C(t+k, j)` with the row's `t`, `k` and `j` recorded.
    Binom { top: u64, bottom: u64 },
    /// `1 + C(top, bottom)`.
    OnePlusBinom { top: u64, bottom: u64 },
}

impl ParityFormula {
    pub fn value(&self) -> u8 {
        match *self {
            ParityFormula::Zero => 0,
            ParityFormula::One => 1,
            ParityFormula::Binom { top, bottom } => binom_parity(top, bottom),
            ParityFormula::OnePlusBinom { top, bottom } => 1 ^ binom_parity(top, bottom),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ParityCase {
    pub n_residue: u64,
    pub d_residue: u64,
    pub formula: ParityFormula,
}

/// Tabulated parity of e(d,n) for d, n ≥ 2, with `n = 4k + i`, `d = 4t + j`.
pub fn e_parity_case(d: u64, n: u64) -> ParityCase {
    let (k, nr) = (n / 4, n % 4);
    let (t, dr) = (d / 4, d % 4);
    let low = ParityFormula::Binom { top: t + k, bottom: t };
    let high = ParityFormula::Binom { top: t + k + 1, bottom: t + 1 };
    let formula = match (nr, dr) {
        (0, 2) => ParityFormula::Binom { top: t + k, bottom: t + 1 },
        (0, _) => ParityFormula::Zero,
        (1, 0 | 1) => low,
        (1, _) => high,
        (2, 0) => low,
        (2, 2) => high,
        (2, _) => ParityFormula::Zero,
        (_, 0 | 1) => ParityFormula::Zero,
        (_, _) => high,
    };
    ParityCase { n_residue: nr, d_residue: dr, formula }
}

/// Tabulated parity of s(d,n) for d, n ≥ 2, with `n = 4k + i`, `d = 4t + j`.
pub fn s_parity_case(d: u64, n: u64) -> ParityCase {
    let (k, nr) = (n / 4, n % 4);
    let (t, dr) = (d / 4, d % 4);
    let obp = ParityFormula::OnePlusBinom { top: t + k, bottom: t };
    let formula = match (nr, dr) {
        (0, _) => obp,
        (1 | 3, 0 | 2) => obp,
        (2, 0 | 1) => obp,
        _ => ParityFormula::One,
    };
    ParityCase { n_residue: nr, d_residue: dr, formula }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParityRow {
    pub d: u64,
    pub n: u64,
    pub e_parity_exact: u8,
    pub e_parity_table: u8,
    pub s_parity_exact: u8,
    pub s_parity_table: u8,
}

impl ParityRow {
    pub fn matches(&self) -> bool {
        self.e_parity_exact == self.e_parity_table && self.s_parity_exact == self.s_parity_table
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ParityReport {
    pub rows: Vec<ParityRow>,
    /// Cells where exact e parity disagrees with its table row.
    pub e_mismatches: Vec<(u64, u64)>,
    /// Cells where exact s parity disagrees with its table row.
    pub s_mismatches: Vec<(u64, u64)>,
    /// Cells violating `s(d,n) ≡ 1 + C(d+n, d)`.
    pub s_closed_form_mismatches: Vec<(u64, u64)>,
}

impl ParityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,n,e_parity_exact,e_parity_table,s_parity_exact,s_parity_table,match\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.d,
                r.n,
                r.e_parity_exact,
                r.e_parity_table,
                r.s_parity_exact,
                r.s_parity_table,
                r.matches()
            ));
        }
        out
    }
}

/// Compares exact parities against both tables over `2 ≤ d ≤ d_max`,
/// `2 ≤ n ≤ n_max`.
pub fn parity_table_check(d_max: u64, n_max: u64) -> Result<ParityReport> {
    if d_max > 256 || n_max > 256 {
        return Err(Error::TooLarge("parity tables are limited to 256".into()));
    }
    let mut report = ParityReport::default();
    for d in 2..=d_max {
        for n in 2..=n_max {
            let row = ParityRow {
                d,
                n,
                e_parity_exact: parity(&e_exact(d, n)),
                e_parity_table: e_parity_case(d, n).formula.value(),
                s_parity_exact: parity(&s_exact(d, n)),
                s_parity_table: s_parity_case(d, n).formula.value(),
            };
            if row.e_parity_exact != row.e_parity_table {
                report.e_mismatches.push((d, n));
            }
            if row.s_parity_exact != row.s_parity_table {
                report.s_mismatches.push((d, n));
            }
            if row.s_parity_exact != 1 ^ binom_parity(d + n, d) {
                report.s_closed_form_mismatches.push((d, n));
            }
            report.rows.push(row);
        }
    }
    Ok(report)
}

/// Whether `e(d,n)` is even and `s(d,n)` is odd.
pub fn is_witness(d: u64, n: u64) -> bool {
    d >= 2 && e_exact(d, n).is_even() && s_exact(d, n).abs().is_odd()
}

/// Some `d ≥ 3` with `e(d,n)` even and `s(d,n)` odd.
///
/// For `n = 4k` with `k = 2^a·r`, `r` odd, the candidate is `2^{a+2}`; for
/// `n = 4k+2` it is 3. Odd `n` use `2^{a+2}+1` (`n = 4k+1`) and 5
/// (`n = 4k+3`). A linear scan backs up every candidate.
pub fn find_d(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidInput("find_d needs n >= 2".into()));
    }
    let k = n / 4;
    let two_adic = |k: u64| if k == 0 { 0 } else { k.trailing_zeros() };
    let candidate = match n % 4 {
        0 => 1u64 << (two_adic(k) + 2),
        2 => 3,
        1 => (1u64 << (two_adic(k) + 2)) + 1,
        _ => 5,
    };
    if candidate >= 3 && is_witness(candidate, n) {
        return Ok(candidate);
    }
    (3..=4096).find(|&d| is_witness(d, n)).ok_or_else(|| Error::NotFound(format!("no d <= 4096 for n = {n}")))
}

/// `Σ_{i=0}^{big_n} C(i+k, k)` against `C(big_n+k+1, k+1)`.
pub fn hockey_stick_holds(big_n: u64, k: u64) -> bool {
    let lhs: BigInt = (0..=big_n).map(|i| binom(i + k, k)).sum();
    lhs == binom(big_n + k + 1, k + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values() {
        assert_eq!(e_exact(3, 2), BigInt::from(2));
        assert_eq!(e_exact(1, 3), BigInt::from(2));
        assert_eq!(e_exact(4, 4), BigInt::from(16));
        assert_eq!(s_exact(3, 2), BigInt::from(3));
        assert_eq!(s_exact(2, 2), BigInt::from(1));
        // −C(4,3) + C(5,3) − C(6,3) + C(7,3)
        assert_eq!(s_exact(4, 4), BigInt::from(21));
    }

    #[test]
    fn lucas() {
        assert_eq!(binom_parity(4, 1), 0);
        assert_eq!(binom_parity(9, 0), 1);
        assert_eq!(binom_parity(5, 3), 0);
        assert_eq!(binom_parity(2, 5), 0);
    }

    #[test]
    fn witnesses() {
        assert_eq!(find_d(2).unwrap(), 3);
        assert_eq!(find_d(4).unwrap(), 4);
        assert_eq!(find_d(6).unwrap(), 3);
        assert_eq!(find_d(8).unwrap(), 8);
        assert_eq!(find_d(10).unwrap(), 3);
        assert_eq!(find_d(3).unwrap(), 5);
    }

    #[test]
    fn table_cells() {
        assert_eq!(e_parity_case(3, 2).formula, ParityFormula::Zero);
        assert_eq!(s_parity_case(2, 2).formula.value(), 1);
    }
}
