//! Ground-truth brute force: c-DDT rows, spectra, c-differential
//! uniformity, the `a = 0` row, the quadruple count `N_4`, and the moment
//! identities. Everything is exhaustive and exact; this module is the
//! layer every closed form is judged against.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::field::{Element, FieldSpec, PowTable};
use crate::spectrum::Spectrum;

/// One row of the c-DDT: solution counts of `(x+a)^d - c x^d = b` keyed by
/// the canonical index of `b`. Zero counts are omitted; the stored counts
/// always sum to `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdtRow {
    pub a_index: u64,
    pub c_index: u64,
    pub d: u64,
    pub counts: BTreeMap<u64, u64>,
}

impl DdtRow {
    pub fn max_count(&self) -> u64 {
        self.counts.values().copied().max().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Outcome of the moment identities for one `(field, c, d)` triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentReport {
    pub sum0: u128,
    pub sum1: u128,
    pub sum2: u128,
    pub n4: BigInt,
    pub gcd_d: u64,
    pub consistent: bool,
}

/// Exhaustive count of solutions of `(x+a)^d - c x^d = b` for every `b`.
/// The exponent is used literally (no reduction mod `q - 1`).
pub fn ddt_row(f: &FieldSpec, d: u64, c: &Element, a: &Element) -> DdtRow {
    let pows = PowTable::build(f, d);
    ddt_row_with_table(f, &pows, d, c, a)
}

/// As [`ddt_row`], reusing a prebuilt `x^d` table.
pub fn ddt_row_with_table(
    f: &FieldSpec,
    pows: &PowTable,
    d: u64,
    c: &Element,
    a: &Element,
) -> DdtRow {
    let mut counts = BTreeMap::new();
    for (idx, x) in f.enumerate().into_iter().enumerate() {
        let shifted = f.add(&x, a);
        let lhs = f.sub(
            pows.of_index(f.index(&shifted)),
            &f.mul(c, pows.of_index(idx as u64)),
        );
        *counts.entry(f.index(&lhs)).or_insert(0) += 1;
    }
    DdtRow {
        a_index: f.index(a),
        c_index: f.index(c),
        d,
        counts,
    }
}

/// The `a = 0` row `(1 - c) x^d = b`, defined for `c != 1`.
pub fn a0_row(f: &FieldSpec, d: u64, c: &Element) -> Result<DdtRow> {
    if *c == f.one() {
        return Err(Error::COneOutOfScope);
    }
    let one_minus_c = f.sub(&f.one(), c);
    let mut counts = BTreeMap::new();
    for x in f.enumerate() {
        let lhs = f.mul(&one_minus_c, &f.pow(&x, d));
        *counts.entry(f.index(&lhs)).or_insert(0) += 1;
    }
    Ok(DdtRow {
        a_index: 0,
        c_index: f.index(c),
        d,
        counts,
    })
}

/// Brute-force spectrum: histogram of the `a = 1` row over all `b`,
/// including `omega_0`.
pub fn spectrum_brute(f: &FieldSpec, d: u64, c: &Element) -> Spectrum {
    let row = ddt_row(f, d, c, &f.one());
    spectrum_of_row(f, &row)
}

pub fn spectrum_of_row(f: &FieldSpec, row: &DdtRow) -> Spectrum {
    let mut entries: BTreeMap<u64, u64> = BTreeMap::new();
    for &count in row.counts.values() {
        *entries.entry(count).or_insert(0) += 1;
    }
    let hit: u64 = entries.values().sum();
    if hit < f.q() {
        entries.insert(0, f.q() - hit);
    }
    Spectrum::new(f.q(), entries)
}

/// Maximum c-DDT entry over all rows; the `a = 0` row participates
/// except at `c = 1`, where it is excluded by definition.
pub fn c_uniformity(f: &FieldSpec, d: u64, c: &Element) -> u64 {
    let pows = PowTable::build(f, d);
    let mut max = 0;
    for a in f.enumerate() {
        if f.is_zero(&a) && *c == f.one() {
            continue;
        }
        let row = ddt_row_with_table(f, &pows, d, c, &a);
        max = max.max(row.max_count());
    }
    max
}

/// Number of quadruples `(x1, x2, x3, x4)` with `x1 - x2 + x3 - x4 = 0`
/// and `x1^d - c x2^d + c x3^d - x4^d = 0`, counted in `O(q^2)` through
/// the convolution identity `N_4 = sum_a sum_v R_a(v) S_a(v)` with
/// `R_a(v) = #{y : (y+a)^d - y^d = v}` and `S_a(v) = #{y : c((y+a)^d - y^d) = v}`.
pub fn n4(f: &FieldSpec, d: u64, c: &Element) -> BigInt {
    let q = f.q() as usize;
    let pows = PowTable::build(f, d);
    let els = f.enumerate();
    let mut r_table = vec![0u64; q];
    let mut s_table = vec![0u64; q];
    let mut total: u128 = 0;
    for a in &els {
        r_table.fill(0);
        s_table.fill(0);
        for (y_idx, y) in els.iter().enumerate() {
            let shifted = f.add(y, a);
            let diff = f.sub(
                pows.of_index(f.index(&shifted)),
                pows.of_index(y_idx as u64),
            );
            r_table[f.index(&diff) as usize] += 1;
            s_table[f.index(&f.mul(c, &diff)) as usize] += 1;
        }
        for (r, s) in r_table.iter().zip(&s_table) {
            total += (*r as u128) * (*s as u128);
        }
    }
    BigInt::from(total)
}

/// Direct `O(q^3)` enumerator over `(x1, x2, x3)`, for cross-checks at
/// small `q`.
pub fn n4_direct(f: &FieldSpec, d: u64, c: &Element) -> BigInt {
    let pows = PowTable::build(f, d);
    let els = f.enumerate();
    let mut total: u128 = 0;
    for x1 in &els {
        for x2 in &els {
            for x3 in &els {
                let x4 = f.add(&f.sub(x1, x2), x3);
                let lhs = f.sub(
                    &f.add(
                        pows.of_index(f.index(x1)),
                        &f.mul(c, pows.of_index(f.index(x3))),
                    ),
                    &f.add(
                        &f.mul(c, pows.of_index(f.index(x2))),
                        pows.of_index(f.index(&x4)),
                    ),
                );
                if f.is_zero(&lhs) {
                    total += 1;
                }
            }
        }
    }
    BigInt::from(total)
}

/// Closed form for `N_4` at `c = -1`, `d = (q+1)/2`:
/// `(q^3 + 9q^2 - 5q + 3)/8` when `eta(-1) = 1`, and
/// `(q^3 + 13q^2 - 9q + 3)/8` when `eta(-1) = -1`.
pub fn n4_closed_cminus1(f: &FieldSpec) -> BigInt {
    let q = BigInt::from(f.q());
    let q2 = &q * &q;
    let q3 = &q2 * &q;
    let num = if f.q() % 4 == 1 {
        q3 + 9 * &q2 - 5 * &q + 3
    } else {
        q3 + 13 * &q2 - 9 * &q + 3
    };
    num / 8
}

/// Checks `sum omega = sum i omega = q` and
/// `sum i^2 omega = (N_4 - 1)/(q - 1) - gcd(d, q - 1)`, all exactly.
pub fn moment_check(s: &Spectrum, n4: &BigInt, d: u64, f: &FieldSpec) -> MomentReport {
    let (sum0, sum1, sum2) = s.moments();
    let q = f.q();
    let gcd_d = d.gcd(&(q - 1));
    let (quot, rem) = (n4 - 1i32).div_rem(&BigInt::from(q - 1));
    let expected_sum2 = quot - gcd_d;
    let consistent = rem == BigInt::ZERO
        && sum0 == q as u128
        && sum1 == q as u128
        && BigInt::from(sum2) == expected_sum2;
    MomentReport {
        sum0,
        sum1,
        sum2,
        n4: n4.clone(),
        gcd_d,
        consistent,
    }
}
