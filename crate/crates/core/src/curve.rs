//! Point counts and Frobenius traces for `E: y^2 = x(x-1)(x-c^2)`, the
//! special curve `y^2 = x^3 - x`, two-squares decompositions, and integer
//! trace lifting to extension fields.
//!
//! Sign convention: `t = q + 1 - #E` is the standard trace and
//! `s = -t = sum_x eta(x(x-1)(x-c^2))` is the character-sum trace. Both are
//! carried explicitly; no ambiguous `a` is exposed. The bridge to the
//! quartic sum is `C = s - 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Element, EtaTable, FieldSpec};

/// Point count and trace data of `y^2 = x(x-1)(x-c^2)` over one field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CurveTrace {
    pub q: u64,
    /// Canonical index of the parameter `c^2`.
    pub c2_index: u64,
    /// `#E` including the point at infinity.
    pub count: u64,
    /// Standard trace `q + 1 - count`.
    pub t: i64,
    /// Character-sum trace `-t`.
    pub s: i64,
    /// Size of the subfield the trace was counted over (`q` when direct).
    pub base_field: u64,
    /// Whether the trace was lifted from a proper subfield.
    pub lifted: bool,
}

/// A decomposition `p = a^2 + b^2` with `b` even and `a + b = 1 mod 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwoSquares {
    pub a: i64,
    pub b: i64,
    pub p: u64,
}

fn require_nonsingular(f: &FieldSpec, c: &Element) -> Result<Element> {
    let c2 = f.mul(c, c);
    if f.is_zero(&c2) || c2 == f.one() {
        return Err(Error::SingularCurve);
    }
    Ok(c2)
}

/// Counts `#E(F_q)` for `y^2 = x(x-1)(x-c^2)` by the character-sum scan
/// `#E = 1 + sum_x (1 + eta(x(x-1)(x-c^2)))`.
pub fn count_points(f: &FieldSpec, c: &Element) -> Result<CurveTrace> {
    let c2 = require_nonsingular(f, c)?;
    let eta = EtaTable::build(f);
    Ok(count_points_lambda(f, &c2, &eta))
}

/// Same scan with an explicit curve parameter `lambda = c^2` and a prebuilt
/// character table.
pub(crate) fn count_points_lambda(f: &FieldSpec, lambda: &Element, eta: &EtaTable) -> CurveTrace {
    let one = f.one();
    let mut s = 0i64;
    for x in f.enumerate() {
        let v = f.mul(&f.mul(&x, &f.sub(&x, &one)), &f.sub(&x, lambda));
        s += eta.sign(f, &v);
    }
    let q = f.q();
    let count = (q as i64 + 1 + s) as u64;
    CurveTrace {
        q,
        c2_index: f.index(lambda),
        count,
        t: -s,
        s,
        base_field: q,
        lifted: false,
    }
}

/// Lifts a base-field trace to the degree-`m` extension: returns
/// `alpha^m + beta^m` for the roots of `T^2 - t T + q`, via the integer
/// recurrence `t_k = t * t_{k-1} - q * t_{k-2}` with `t_0 = 2`, `t_1 = t`.
pub fn trace_lift(t_base: i64, q_base: u64, m: u32) -> Result<i64> {
    if (t_base as i128) * (t_base as i128) > 4 * q_base as i128 {
        return Err(Error::HasseViolation {
            t: t_base,
            q: q_base,
        });
    }
    let mut prev: i128 = 2;
    let mut cur: i128 = t_base as i128;
    if m == 0 {
        return Ok(2);
    }
    for _ in 1..m {
        let next = (t_base as i128) * cur - (q_base as i128) * prev;
        prev = cur;
        cur = next;
    }
    Ok(i64::try_from(cur).expect("trace bounded by 2 sqrt(q^m)"))
}

/// Counts the curve over the subfield `F_p(c^2)` and lifts the trace back
/// up. Must agree with [`count_points`]; disagreement is an internal error.
pub fn trace_via_subfield(f: &FieldSpec, c: &Element) -> Result<CurveTrace> {
    let c2 = require_nonsingular(f, c)?;
    let r = f.subfield_degree(&c2);
    let direct = count_points(f, c)?;
    if r == f.n() {
        return Ok(direct);
    }

    // Minimal polynomial of c^2 over F_p: prod_{k<r} (x - c^(2 p^k)).
    // Its coefficients are constants, read off into F_p.
    let mut minpoly = vec![f.zero(); 1];
    minpoly[0] = f.one();
    let mut conj = c2.clone();
    for _ in 0..r {
        let mut next = vec![f.zero(); minpoly.len() + 1];
        for (i, coef) in minpoly.iter().enumerate() {
            next[i + 1] = f.add(&next[i + 1], coef);
            next[i] = f.sub(&next[i], &f.mul(coef, &conj));
        }
        minpoly = next;
        conj = f.pow(&conj, f.p());
    }
    let base = FieldSpec::with_limit(f.p(), r, f.q())?;
    let coeffs: Vec<u64> = minpoly
        .iter()
        .map(|e| {
            debug_assert!(e.coeffs()[1..].iter().all(|&c| c == 0));
            e.coeffs()[0]
        })
        .collect();

    // Any root of the minimal polynomial in the canonical F_{p^r} gives a
    // Galois-conjugate curve with the same point count.
    let eta_base = EtaTable::build(&base);
    let mut lambda = None;
    'outer: for x in base.enumerate() {
        let mut acc = base.zero();
        for &co in coeffs.iter().rev() {
            acc = base.add(&base.mul(&acc, &x), &base.from_base(co));
        }
        if base.is_zero(&acc) {
            lambda = Some(x);
            break 'outer;
        }
    }
    let lambda = lambda.ok_or_else(|| {
        Error::Inconsistency("minimal polynomial has no root in its own splitting field".into())
    })?;
    let base_trace = count_points_lambda(&base, &lambda, &eta_base);
    let t = trace_lift(base_trace.t, base.q(), f.n() / r)?;
    let lifted = CurveTrace {
        q: f.q(),
        c2_index: f.index(&c2),
        count: (f.q() as i64 + 1 - t) as u64,
        t,
        s: -t,
        base_field: base.q(),
        lifted: true,
    };
    if lifted.count != direct.count {
        return Err(Error::Inconsistency(format!(
            "subfield lift gives #E = {}, direct count gives {}",
            lifted.count, direct.count
        )));
    }
    Ok(lifted)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2u64;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 1;
    }
    true
}

/// Writes a prime `p = 1 mod 4` as `a^2 + b^2` with `b > 0` even and the
/// sign of `a` fixed by `a + b = 1 mod 4`.
pub fn cornacchia(p: u64) -> Result<TwoSquares> {
    if p % 4 != 1 || !is_prime(p) {
        return Err(Error::NotOneModFour(p));
    }
    let mut a = 1i64;
    while (a * a) as u64 <= p {
        let rem = p - (a * a) as u64;
        let b = (rem as f64).sqrt().round() as i64;
        if b > 0 && b % 2 == 0 && (b * b) as u64 == rem {
            let signed_a = if (a + b).rem_euclid(4) == 1 { a } else { -a };
            debug_assert_eq!((signed_a + b).rem_euclid(4), 1);
            return Ok(TwoSquares { a: signed_a, b, p });
        }
        a += 2;
    }
    Err(Error::Inconsistency(format!(
        "no two-squares decomposition found for {p}"
    )))
}

/// Standard trace of `y^2 = x^3 - x` over `F_p`: zero for `p = 3 mod 4`,
/// `2a` from the normalized two-squares decomposition otherwise.
pub fn trace_x3_minus_x(p: u64) -> Result<i64> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    if p % 4 == 3 {
        Ok(0)
    } else {
        Ok(2 * cornacchia(p)?.a)
    }
}
