//! Quadratic-character sums and cyclotomic set counts: Jacobsthal sums,
//! the pair counts `S_{i,j}` and `T_{i,j}`, the four-fold counts
//! `S^c_{i,j,u,v}`, and the sums `A`, `B`, `C`.
//!
//! Everything here is computed by exact exhaustive enumeration; the closed
//! forms are predictors that tests check against enumeration, never the
//! other way around.

use crate::error::{Error, Result};
use crate::field::{Element, EtaTable, FieldSpec};

/// Counts of elements by a pair of character signs `(i, j)` in `{-1, +1}^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCounts {
    counts: [u64; 4],
}

#[inline]
fn sign_slot(s: i64) -> usize {
    debug_assert!(s == 1 || s == -1);
    if s == 1 {
        0
    } else {
        1
    }
}

impl PairCounts {
    fn zero() -> Self {
        PairCounts { counts: [0; 4] }
    }

    fn bump(&mut self, i: i64, j: i64) {
        self.counts[2 * sign_slot(i) + sign_slot(j)] += 1;
    }

    fn set(&mut self, i: i64, j: i64, v: u64) {
        self.counts[2 * sign_slot(i) + sign_slot(j)] = v;
    }

    pub fn get(&self, i: i64, j: i64) -> u64 {
        self.counts[2 * sign_slot(i) + sign_slot(j)]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `((i, j), count)` over the four sign pairs, `+1` before `-1`.
    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), u64)> + '_ {
        const SIGNS: [i64; 2] = [1, -1];
        SIGNS
            .into_iter()
            .flat_map(move |i| SIGNS.into_iter().map(move |j| ((i, j), self.get(i, j))))
    }
}

/// Counts of elements by the sign pattern
/// `(eta(b-1), eta(b+1), eta(b-c), eta(b+c))` over `b` outside `{1,-1,c,-c}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadCounts {
    counts: [u64; 16],
    pub c_index: u64,
}

impl QuadCounts {
    fn zero(c_index: u64) -> Self {
        QuadCounts {
            counts: [0; 16],
            c_index,
        }
    }

    fn slot(i: i64, j: i64, u: i64, v: i64) -> usize {
        8 * sign_slot(i) + 4 * sign_slot(j) + 2 * sign_slot(u) + sign_slot(v)
    }

    pub fn get(&self, i: i64, j: i64, u: i64, v: i64) -> u64 {
        self.counts[Self::slot(i, j, u, v)]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// All sixteen `((i, j, u, v), count)` entries in lexicographic order
    /// with `+1` before `-1`.
    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64, i64, i64), u64)> + '_ {
        const SIGNS: [i64; 2] = [1, -1];
        SIGNS.into_iter().flat_map(move |i| {
            SIGNS.into_iter().flat_map(move |j| {
                SIGNS.into_iter().flat_map(move |u| {
                    SIGNS
                        .into_iter()
                        .map(move |v| ((i, j, u, v), self.get(i, j, u, v)))
                })
            })
        })
    }
}

/// The exact sums `A = sum eta((b^2-1)(b-c))`, `B = sum eta((b-1)(b^2-c^2))`
/// and `C = sum eta((b^2-1)(b^2-c^2))` over the whole field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbcSums {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    /// Canonical index of the multiplier these sums were taken at.
    pub c_index: u64,
}

fn require_nondegenerate(f: &FieldSpec, c: &Element) -> Result<()> {
    let one = f.one();
    if f.is_zero(c) || *c == one || *c == f.neg(&one) {
        return Err(Error::DegenerateMultiplier(f.index(c).to_string()));
    }
    Ok(())
}

/// Jacobsthal sum of `a2 x^2 + a1 x + a0` by its closed form:
/// `-eta(a2)` when the discriminant is nonzero, `(q-1) eta(a2)` otherwise.
pub fn jacobsthal_quadratic(
    f: &FieldSpec,
    a2: &Element,
    a1: &Element,
    a0: &Element,
) -> Result<i64> {
    if f.is_zero(a2) {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let four = f.from_base(4);
    let disc = f.sub(&f.mul(a1, a1), &f.mul(&four, &f.mul(a0, a2)));
    let lead = f.eta(a2);
    if f.is_zero(&disc) {
        Ok((f.q() as i64 - 1) * lead)
    } else {
        Ok(-lead)
    }
}

/// Brute-force evaluator of the same sum, for cross-checks.
pub fn jacobsthal_quadratic_brute(
    f: &FieldSpec,
    a2: &Element,
    a1: &Element,
    a0: &Element,
) -> Result<i64> {
    if f.is_zero(a2) {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let mut total = 0i64;
    for x in f.enumerate() {
        let v = f.add(&f.mul(a2, &f.mul(&x, &x)), &f.add(&f.mul(a1, &x), a0));
        total += f.eta(&v);
    }
    Ok(total)
}

/// Exhaustive counts of `{x != 0, -1 : eta(x+1) = i, eta(x) = j}`.
pub fn pair_counts_s(f: &FieldSpec) -> PairCounts {
    let eta = EtaTable::build(f);
    let one = f.one();
    let mut out = PairCounts::zero();
    for x in f.enumerate() {
        let ex = eta.sign(f, &x);
        let exp1 = eta.sign(f, &f.add(&x, &one));
        if ex == 0 || exp1 == 0 {
            continue;
        }
        out.bump(exp1, ex);
    }
    out
}

/// Which of the two printed assignments of `(q+1)/4` vs `(q-3)/4` to
/// `S_{1,-1}` and `S_{-1,1}` is meant, for fields with `eta(-1) = -1`.
/// The two sources disagree; enumeration supports [`SConvention::Proof`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SConvention {
    /// `|S_{1,-1}| = (q+1)/4`, the three others `(q-3)/4`.
    Opening,
    /// `|S_{1,-1}| = (q-3)/4`, `|S_{-1,1}| = (q+1)/4`.
    Proof,
}

/// Closed-form predictor for the `S_{i,j}` counts. For `eta(-1) = 1` the
/// two conventions coincide.
pub fn pair_counts_s_closed(f: &FieldSpec, convention: SConvention) -> PairCounts {
    let q = f.q();
    let em1 = f.eta(&f.neg(&f.one()));
    let mut out = PairCounts::zero();
    if em1 == 1 {
        out.set(1, 1, (q - 5) / 4);
        out.set(-1, 1, (q - 1) / 4);
        out.set(1, -1, (q - 1) / 4);
        out.set(-1, -1, (q - 1) / 4);
    } else {
        out.set(1, 1, (q - 3) / 4);
        out.set(-1, -1, (q - 3) / 4);
        match convention {
            SConvention::Opening => {
                out.set(1, -1, (q + 1) / 4);
                out.set(-1, 1, (q - 3) / 4);
            }
            SConvention::Proof => {
                out.set(1, -1, (q - 3) / 4);
                out.set(-1, 1, (q + 1) / 4);
            }
        }
    }
    out
}

/// Exhaustive counts of `{b != 1, -1 : eta(b-1) = i, eta(b+1) = j}`.
pub fn pair_counts_t(f: &FieldSpec) -> PairCounts {
    let eta = EtaTable::build(f);
    let one = f.one();
    let mut out = PairCounts::zero();
    for b in f.enumerate() {
        let em = eta.sign(f, &f.sub(&b, &one));
        let ep = eta.sign(f, &f.add(&b, &one));
        if em == 0 || ep == 0 {
            continue;
        }
        out.bump(em, ep);
    }
    out
}

/// Closed-form predictor `|T_{i,j}| = (q - ij - 2 - j eta(2) - i eta(-2)) / 4`.
pub fn pair_counts_t_closed(f: &FieldSpec) -> PairCounts {
    let q = f.q() as i64;
    let two = f.from_base(2);
    let e2 = f.eta(&two);
    let em2 = f.eta(&f.neg(&two));
    let mut out = PairCounts::zero();
    for i in [1i64, -1] {
        for j in [1i64, -1] {
            let v = q - i * j - 2 - j * e2 - i * em2;
            debug_assert!(v >= 0 && v % 4 == 0);
            out.set(i, j, (v / 4) as u64);
        }
    }
    out
}

/// Exhaustive counts of the sign patterns
/// `(eta(b-1), eta(b+1), eta(b-c), eta(b+c))` over `b` outside `{1,-1,c,-c}`.
pub fn quad_counts(f: &FieldSpec, c: &Element) -> Result<QuadCounts> {
    require_nondegenerate(f, c)?;
    let eta = EtaTable::build(f);
    let one = f.one();
    let mut out = QuadCounts::zero(f.index(c));
    for b in f.enumerate() {
        let s1 = eta.sign(f, &f.sub(&b, &one));
        let s2 = eta.sign(f, &f.add(&b, &one));
        let s3 = eta.sign(f, &f.sub(&b, c));
        let s4 = eta.sign(f, &f.add(&b, c));
        if s1 == 0 || s2 == 0 || s3 == 0 || s4 == 0 {
            continue;
        }
        out.bump_pattern(s1, s2, s3, s4);
    }
    Ok(out)
}

impl QuadCounts {
    fn bump_pattern(&mut self, i: i64, j: i64, u: i64, v: i64) {
        self.counts[Self::slot(i, j, u, v)] += 1;
    }
}

/// Exact enumeration of the sums `A`, `B`, `C`.
pub fn abc_sums(f: &FieldSpec, c: &Element) -> Result<AbcSums> {
    require_nondegenerate(f, c)?;
    let eta = EtaTable::build(f);
    abc_sums_with_table(f, c, &eta)
}

/// As [`abc_sums`] but reusing a prebuilt character table.
pub fn abc_sums_with_table(f: &FieldSpec, c: &Element, eta: &EtaTable) -> Result<AbcSums> {
    require_nondegenerate(f, c)?;
    let one = f.one();
    let c2 = f.mul(c, c);
    let (mut a, mut b2, mut c_sum) = (0i64, 0i64, 0i64);
    for b in f.enumerate() {
        let bsq = f.mul(&b, &b);
        let bsq_m1 = f.sub(&bsq, &one);
        let bsq_mc2 = f.sub(&bsq, &c2);
        a += eta.sign(f, &f.mul(&bsq_m1, &f.sub(&b, c)));
        b2 += eta.sign(f, &f.mul(&f.sub(&b, &one), &bsq_mc2));
        c_sum += eta.sign(f, &f.mul(&bsq_m1, &bsq_mc2));
    }
    Ok(AbcSums {
        a,
        b: b2,
        c: c_sum,
        c_index: f.index(c),
    })
}

/// The sixteen closed forms for `|S^c_{i,j,u,v}|`, valid under `eta(-1) = 1`.
///
/// Fourteen of the sixteen are evaluated exactly as printed. The two
/// patterns `(-1,1,1,-1)` and `(-1,1,-1,1)` are printed with a factor
/// `(1 - eta(1-c))(1 + eta(1-c))` that annihilates itself; they are
/// recovered through the `b -> -b` symmetry
/// `|S^c_{-1,1,u,v}| = |S^c_{1,-1,-u,-v}|` instead.
pub fn quad_counts_closed(f: &FieldSpec, c: &Element, sums: &AbcSums) -> Result<QuadCounts> {
    require_nondegenerate(f, c)?;
    let one = f.one();
    if f.eta(&f.neg(&one)) != 1 {
        return Err(Error::UnsupportedCase(
            "the sixteen closed forms require eta(-1) = 1".into(),
        ));
    }
    let q = f.q() as i64;
    let (a, b, cc) = (sums.a, sums.b, sums.c);
    let two = f.from_base(2);
    let e2 = f.eta(&two);
    let e2c = f.eta(&f.mul(&two, c));
    let e1mc = f.eta(&f.sub(&one, c));
    let e1pc = f.eta(&f.add(&one, c));
    let ecm1 = f.eta(&f.sub(c, &one));
    let ecp1 = f.eta(&f.add(c, &one));
    let c2 = f.mul(c, c);
    let e1mc2 = f.eta(&f.sub(&one, &c2));

    let mut raw = [0i64; 16];
    let idx = |i: i64, j: i64, u: i64, v: i64| QuadCounts::slot(i, j, u, v);

    raw[idx(1, 1, 1, 1)] =
        q - 6 + 2 * a + 2 * b + cc - 2 * (2 + e2 + e2c) * (1 + e1mc) * (1 + e1pc);
    raw[idx(1, 1, 1, -1)] =
        q - 2 * b - cc - 2 * (1 + e2) * (1 - e1mc2) - 2 * (1 + e1mc) * (1 + e1pc);
    raw[idx(1, 1, -1, 1)] = raw[idx(1, 1, 1, -1)];
    raw[idx(1, 1, -1, -1)] = q + 2 - 2 * a + 2 * b + cc
        - 2 * (1 + e2) * (1 - e1mc) * (1 - e1pc)
        - 2 * (1 + e1mc) * (1 + e1pc) * (1 - e2c);
    raw[idx(1, -1, 1, 1)] =
        q - 2 * a - cc - 2 * (1 + e1mc) * (1 + e1pc) - 2 * (1 + e2c) * (1 - e1mc2);
    raw[idx(1, -1, 1, -1)] = q + 2 + cc
        - (2 - e2 - e2c) * (1 + e1mc) * (1 - e1pc)
        - (2 + e2 + e2c) * (1 - e1mc) * (1 + e1pc);
    raw[idx(1, -1, -1, 1)] = q + 2 + cc
        - (2 - e2 - e2c) * (1 - e1mc) * (1 + e1pc)
        - (2 + e2 + e2c) * (1 + e1mc) * (1 - e1pc);
    raw[idx(1, -1, -1, -1)] =
        q + 2 * a - cc - 2 * (1 - e1mc) * (1 - e1pc) - 2 * (1 - e2c) * (1 - e1mc2);
    raw[idx(-1, 1, 1, 1)] =
        q - 2 * a - cc - 2 * (1 + e1mc) * (1 + e1pc) - 2 * (1 + e2c) * (1 - e1mc2);
    raw[idx(-1, 1, 1, -1)] = raw[idx(1, -1, -1, 1)];
    raw[idx(-1, 1, -1, 1)] = raw[idx(1, -1, 1, -1)];
    raw[idx(-1, 1, -1, -1)] =
        q + 2 * a - cc - 2 * (1 - e1mc) * (1 - e1pc) - 2 * (1 - e2c) * (1 - e1mc2);
    raw[idx(-1, -1, 1, 1)] = q + 2 + 2 * a - 2 * b + cc
        - 2 * (1 - e2) * (1 + e1mc) * (1 + e1pc)
        - 2 * (1 - ecm1) * (1 - ecp1) * (1 + e2c);
    raw[idx(-1, -1, 1, -1)] =
        q + 2 * b - cc - 2 * (1 - e2) * (1 - e1mc2) - 2 * (1 - e1mc) * (1 - e1pc);
    raw[idx(-1, -1, -1, 1)] = raw[idx(-1, -1, 1, -1)];
    raw[idx(-1, -1, -1, -1)] =
        q - 6 - 2 * a - 2 * b + cc - 2 * (2 - e2 - e2c) * (1 - e1mc) * (1 - e1pc);

    let mut out = QuadCounts::zero(f.index(c));
    for (slot, &v) in raw.iter().enumerate() {
        if v % 16 != 0 || v < 0 {
            return Err(Error::Inconsistency(format!(
                "closed form for pattern slot {slot} evaluated to {v}/16"
            )));
        }
        out.counts[slot] = (v / 16) as u64;
    }
    Ok(out)
}

/// Evaluates `sum_a eta(a(a-1)(a-c^2))` and checks the reduction
/// `C = (that sum) - 1` against the directly enumerated `C`.
pub fn quartic_reduction_check(f: &FieldSpec, c: &Element) -> Result<i64> {
    require_nondegenerate(f, c)?;
    let eta = EtaTable::build(f);
    let one = f.one();
    let c2 = f.mul(c, c);
    let mut cubic = 0i64;
    for a in f.enumerate() {
        let v = f.mul(&f.mul(&a, &f.sub(&a, &one)), &f.sub(&a, &c2));
        cubic += eta.sign(f, &v);
    }
    let sums = abc_sums_with_table(f, c, &eta)?;
    if sums.c != cubic - 1 {
        return Err(Error::Inconsistency(format!(
            "C = {} but the cubic sum is {}",
            sums.c, cubic
        )));
    }
    Ok(cubic)
}
