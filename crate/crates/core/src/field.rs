//! Exact arithmetic, enumeration, and the quadratic character for `F_{p^n}`,
//! `p` an odd prime.
//!
//! Elements are polynomials over `F_p` reduced modulo a canonical monic
//! irreducible of degree `n`, stored constant term first. The canonical
//! integer encoding `k = sum coeffs[i] * p^i` is a bijection onto `0..q`
//! and is the wire representation everywhere (CLI flags, JSON).

use serde::Serialize;

use crate::error::{Error, Result};

/// Default ceiling on `q = p^n` for full-field enumeration.
pub const DEFAULT_Q_LIMIT: u64 = 50_000;

/// A concrete finite field `F_{p^n}` with its canonical modulus.
///
/// Two calls to [`FieldSpec::new`] with equal `(p, n)` produce identical
/// fields: the modulus is the monic irreducible of degree `n` whose
/// non-leading coefficient sequence has the least canonical encoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldSpec {
    p: u64,
    n: u32,
    /// Monic modulus, constant term first, length `n + 1`.
    modulus: Vec<u64>,
    q: u64,
}

/// A field element as a coefficient vector mod `p`, constant term first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element {
    coeffs: Vec<u64>,
}

impl Element {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
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

impl FieldSpec {
    /// Builds `F_{p^n}` with the canonical modulus, under the default
    /// enumeration limit.
    pub fn new(p: u64, n: u32) -> Result<Self> {
        Self::with_limit(p, n, DEFAULT_Q_LIMIT)
    }

    /// Builds `F_{p^n}` with an explicit enumeration limit on `q`.
    pub fn with_limit(p: u64, n: u32, limit: u64) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if n < 1 {
            return Err(Error::DegreeTooSmall(n));
        }
        let mut q: u128 = 1;
        for _ in 0..n {
            q = q.checked_mul(p as u128).ok_or(Error::FieldTooLarge {
                q: u128::MAX,
                limit,
            })?;
        }
        if q > limit as u128 {
            return Err(Error::FieldTooLarge { q, limit });
        }
        let q = q as u64;
        let modulus = canonical_modulus(p, n, q);
        Ok(FieldSpec { p, n, modulus, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> Element {
        Element {
            coeffs: vec![0; self.n as usize],
        }
    }

    pub fn one(&self) -> Element {
        self.from_base(1)
    }

    /// Embeds a residue of `F_p` as a constant.
    pub fn from_base(&self, r: u64) -> Element {
        let mut coeffs = vec![0; self.n as usize];
        coeffs[0] = r % self.p;
        Element { coeffs }
    }

    /// Decodes the canonical integer encoding (little-endian base-`p` digits).
    pub fn from_index(&self, index: u64) -> Result<Element> {
        if index >= self.q {
            return Err(Error::IndexOutOfRange { index, q: self.q });
        }
        let mut coeffs = vec![0; self.n as usize];
        let mut k = index;
        for c in coeffs.iter_mut() {
            *c = k % self.p;
            k /= self.p;
        }
        Ok(Element { coeffs })
    }

    /// Builds an element from explicit coefficients (constant term first).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Element> {
        if coeffs.len() != self.n as usize {
            return Err(Error::BadCoefficientLength {
                got: coeffs.len(),
                expected: self.n as usize,
            });
        }
        Ok(Element {
            coeffs: coeffs.iter().map(|&c| c % self.p).collect(),
        })
    }

    /// Canonical integer encoding of `a`.
    pub fn index(&self, a: &Element) -> u64 {
        let mut k = 0u64;
        for &c in a.coeffs.iter().rev() {
            k = k * self.p + c;
        }
        k
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| {
                let s = x + y;
                if s >= self.p {
                    s - self.p
                } else {
                    s
                }
            })
            .collect();
        Element { coeffs }
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| if x >= y { x - y } else { x + self.p - y })
            .collect();
        Element { coeffs }
    }

    pub fn neg(&self, a: &Element) -> Element {
        let coeffs = a
            .coeffs
            .iter()
            .map(|&x| if x == 0 { 0 } else { self.p - x })
            .collect();
        Element { coeffs }
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let n = self.n as usize;
        let p = self.p;
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        // reduce by the monic modulus
        for i in (n..2 * n - 1).rev() {
            let c = prod[i];
            if c != 0 {
                prod[i] = 0;
                for j in 0..n {
                    let m = self.modulus[j];
                    if m != 0 {
                        let t = (c * m) % p;
                        let cur = prod[i - n + j];
                        prod[i - n + j] = if cur >= t { cur - t } else { cur + p - t };
                    }
                }
            }
        }
        prod.truncate(n);
        Element { coeffs: prod }
    }

    /// `a^e` by square-and-multiply; `pow(a, 0) = 1` for every `a`.
    pub fn pow(&self, a: &Element, e: u64) -> Element {
        let mut result = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        result
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self, a: &Element) -> Result<Element> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn is_zero(&self, a: &Element) -> bool {
        a.coeffs.iter().all(|&c| c == 0)
    }

    /// All `q` elements in ascending canonical index order.
    pub fn enumerate(&self) -> Vec<Element> {
        (0..self.q)
            .map(|k| self.from_index(k).expect("index < q"))
            .collect()
    }

    /// Quadratic character: 0 on zero, 1 on nonzero squares, -1 otherwise.
    /// Computed as `a^((q-1)/2)` mapped to signs.
    pub fn eta(&self, a: &Element) -> i64 {
        if self.is_zero(a) {
            return 0;
        }
        let v = self.pow(a, (self.q - 1) / 2);
        if v == self.one() {
            1
        } else {
            -1
        }
    }

    /// Least `r >= 1` with `a^(p^r) = a`; always a divisor of `n`.
    pub fn subfield_degree(&self, a: &Element) -> u32 {
        let mut x = self.pow(a, self.p);
        let mut r = 1;
        while &x != a {
            x = self.pow(&x, self.p);
            r += 1;
        }
        debug_assert_eq!(self.n % r, 0);
        r
    }
}

/// Per-field lookup table of the quadratic character, indexed by canonical
/// element index. Amortizes `eta` over full-field sweeps.
pub struct EtaTable {
    signs: Vec<i64>,
}

impl EtaTable {
    pub fn build(f: &FieldSpec) -> Self {
        let one = f.one();
        let mut signs = vec![-1i64; f.q() as usize];
        signs[0] = 0;
        // mark squares by enumeration of x^2; (q-1)/2 nonzero squares
        for k in 1..f.q() {
            let x = f.from_index(k).expect("index < q");
            let sq = f.mul(&x, &x);
            signs[f.index(&sq) as usize] = 1;
        }
        debug_assert_eq!(signs[f.index(&one) as usize], 1);
        EtaTable { signs }
    }

    #[inline]
    pub fn sign_of_index(&self, index: u64) -> i64 {
        self.signs[index as usize]
    }

    #[inline]
    pub fn sign(&self, f: &FieldSpec, a: &Element) -> i64 {
        self.signs[f.index(a) as usize]
    }
}

/// Table of `x^d` for every `x`, indexed by canonical index of `x`.
pub struct PowTable {
    values: Vec<Element>,
}

impl PowTable {
    pub fn build(f: &FieldSpec, d: u64) -> Self {
        let values = f.enumerate().iter().map(|x| f.pow(x, d)).collect();
        PowTable { values }
    }

    #[inline]
    pub fn of_index(&self, index: u64) -> &Element {
        &self.values[index as usize]
    }
}

/// Least-encoded monic irreducible of degree `n` over `F_p`. For `n = 1`
/// the convention is the polynomial `x`.
fn canonical_modulus(p: u64, n: u32, _q: u64) -> Vec<u64> {
    if n == 1 {
        return vec![0, 1];
    }
    let n = n as usize;
    let mut lower = 0u64;
    loop {
        let mut poly = vec![0u64; n + 1];
        let mut k = lower;
        for c in poly.iter_mut().take(n) {
            *c = k % p;
            k /= p;
        }
        poly[n] = 1;
        if is_irreducible(&poly, p) {
            return poly;
        }
        lower += 1;
    }
}

/// Irreducibility by trial division: a monic polynomial of degree `n` is
/// irreducible iff no monic polynomial of degree `1..=n/2` divides it.
fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let n = poly.len() - 1;
    for d in 1..=n / 2 {
        let count = p.pow(d as u32);
        for enc in 0..count {
            let mut div = vec![0u64; d + 1];
            let mut k = enc;
            for c in div.iter_mut().take(d) {
                *c = k % p;
                k /= p;
            }
            div[d] = 1;
            if poly_rem_is_zero(poly, &div, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(a: &[u64], b: &[u64], p: u64) -> bool {
    let mut rem: Vec<u64> = a.to_vec();
    let db = b.len() - 1;
    while rem.len() > db {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            let off = rem.len() - 1 - db;
            for (i, &c) in b.iter().enumerate() {
                let t = (lead * c) % p;
                let cur = rem[off + i];
                rem[off + i] = if cur >= t { cur - t } else { cur + p - t };
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_field_prime_convention() {
        let f = FieldSpec::new(5, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.q(), 5);
    }

    #[test]
    fn make_field_canonical_modulus_f9() {
        // x^2 + 1 is the least-encoded monic irreducible of degree 2 over F_3
        let f = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        assert_eq!(f.q(), 9);
    }

    #[test]
    fn make_field_rejects_bad_input() {
        assert_eq!(FieldSpec::new(2, 1).unwrap_err(), Error::NotOddPrime(2));
        assert_eq!(FieldSpec::new(9, 1).unwrap_err(), Error::NotOddPrime(9));
        assert_eq!(FieldSpec::new(5, 0).unwrap_err(), Error::DegreeTooSmall(0));
        assert!(matches!(
            FieldSpec::new(7, 7).unwrap_err(),
            Error::FieldTooLarge { .. }
        ));
        // limit override admits what the default rejects
        assert!(FieldSpec::with_limit(7, 7, 1_000_000).is_ok());
    }

    #[test]
    fn inverse_in_f5() {
        let f = FieldSpec::new(5, 1).unwrap();
        let two = f.from_index(2).unwrap();
        assert_eq!(f.index(&f.inv(&two).unwrap()), 3);
        assert_eq!(f.inv(&f.zero()).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn f9_square_of_one_plus_i() {
        // (1+i)^2 = 2i in F_3[i]/(i^2+1)
        let f = FieldSpec::new(3, 2).unwrap();
        let a = f.from_coeffs(&[1, 1]).unwrap();
        let sq = f.mul(&a, &a);
        assert_eq!(sq.coeffs(), &[0, 2]);
    }

    #[test]
    fn lagrange_on_small_fields() {
        for (p, n) in [(5, 1), (3, 2), (7, 1), (5, 2)] {
            let f = FieldSpec::new(p, n).unwrap();
            for a in f.enumerate().iter().skip(1) {
                assert_eq!(f.pow(a, f.q() - 1), f.one());
            }
        }
    }

    #[test]
    fn enumerate_order_and_size() {
        let f = FieldSpec::new(3, 1).unwrap();
        let els: Vec<u64> = f.enumerate().iter().map(|e| f.index(e)).collect();
        assert_eq!(els, vec![0, 1, 2]);

        let f9 = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f9.enumerate().len(), 9);
        for k in 0..9 {
            let e = f9.from_index(k).unwrap();
            assert_eq!(e.coeffs(), &[k % 3, k / 3]);
            assert_eq!(f9.index(&e), k);
        }
    }

    #[test]
    fn eta_examples() {
        let f5 = FieldSpec::new(5, 1).unwrap();
        assert_eq!(f5.eta(&f5.from_index(4).unwrap()), 1);
        assert_eq!(f5.eta(&f5.from_index(2).unwrap()), -1);

        let f7 = FieldSpec::new(7, 1).unwrap();
        assert_eq!(f7.eta(&f7.neg(&f7.one())), -1);

        // i is a square in F_9
        let f9 = FieldSpec::new(3, 2).unwrap();
        let i = f9.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f9.mul(&i, &i), f9.neg(&f9.one()));
        assert_eq!(f9.eta(&i), 1);
    }

    #[test]
    fn eta_table_agrees_with_exponentiation() {
        for (p, n) in [(7, 1), (3, 2), (5, 2), (3, 3)] {
            let f = FieldSpec::new(p, n).unwrap();
            let table = EtaTable::build(&f);
            for a in f.enumerate() {
                assert_eq!(table.sign(&f, &a), f.eta(&a));
            }
        }
    }

    #[test]
    fn eta_global_properties() {
        for (p, n) in [(5, 1), (7, 1), (11, 1), (3, 2), (3, 3), (5, 2)] {
            let f = FieldSpec::new(p, n).unwrap();
            let els = f.enumerate();
            let total: i64 = els.iter().map(|a| f.eta(a)).sum();
            assert_eq!(total, 0, "sum of eta over F_{}", f.q());
            let squares = els.iter().filter(|a| f.eta(a) == 1).count() as u64;
            assert_eq!(squares, (f.q() - 1) / 2);
            let em1 = f.eta(&f.neg(&f.one()));
            assert_eq!(em1 == 1, f.q() % 4 == 1);
        }
    }

    #[test]
    fn eta_is_multiplicative() {
        let f = FieldSpec::new(3, 2).unwrap();
        let els = f.enumerate();
        for a in &els {
            for b in &els {
                assert_eq!(f.eta(&f.mul(a, b)), f.eta(a) * f.eta(b));
            }
        }
    }

    #[test]
    fn subfield_degree_examples() {
        let f9 = FieldSpec::new(3, 2).unwrap();
        let i = f9.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f9.subfield_degree(&i), 2);
        for r in 0..3 {
            assert_eq!(f9.subfield_degree(&f9.from_base(r)), 1);
        }
        let f27 = FieldSpec::new(3, 3).unwrap();
        for a in f27.enumerate() {
            assert_eq!(27 % 3u64.pow(f27.subfield_degree(&a)), 0);
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        // distributivity + commutativity on every pair, associativity spot on
        // the largest field, inverses everywhere
        for (p, n) in [(3, 2), (5, 2), (11, 2), (3, 3)] {
            let f = FieldSpec::new(p, n).unwrap();
            let els = f.enumerate();
            for a in &els {
                if !f.is_zero(a) {
                    let ai = f.inv(a).unwrap();
                    assert_eq!(f.mul(a, &ai), f.one());
                }
                assert_eq!(f.add(a, &f.neg(a)), f.zero());
                for b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                }
            }
            let sample: Vec<_> = els.iter().step_by(7).collect();
            for a in &sample {
                for b in &sample {
                    for c in &sample {
                        assert_eq!(f.mul(&f.mul(a, b), c), f.mul(a, &f.mul(b, c)));
                        assert_eq!(f.mul(a, &f.add(b, c)), f.add(&f.mul(a, b), &f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn serialization_shape() {
        let f = FieldSpec::new(3, 2).unwrap();
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v["p"], 3);
        assert_eq!(v["n"], 2);
        assert_eq!(v["q"], 9);
        assert_eq!(v["modulus"], serde_json::json!([1, 0, 1]));
    }
}
