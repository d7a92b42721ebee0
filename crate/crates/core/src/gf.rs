//! Arithmetic in the prime field F_p and its extension F_q, q = p^k.
//!
//! Elements of F_q are residue vectors in the polynomial basis
//! `1, x, ..., x^{k-1}` of `F_p[x]/(f)` for a monic irreducible `f` of
//! degree `k`. A [`FieldCtx`] is immutable once built and can be shared
//! freely between threads.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported field size.
pub const Q_CEILING: u64 = 1 << 40;

/// Above this size the irreducibility test switches from exhaustive
/// divisor search to the Frobenius gcd test.
const EXHAUSTIVE_IRREDUCIBILITY_LIMIT: u64 = 1 << 20;

/// An element of F_q as `k` coefficients in `[0, p)`, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&encode_coeffs(&self.coeffs))
    }
}

/// Comma-separated coefficient list, constant term first.
pub fn encode_coeffs(coeffs: &[u64]) -> String {
    coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

/// Parses a comma-separated list of (possibly negative) integers.
pub fn parse_coeffs(text: &str) -> Result<Vec<i64>> {
    text.split(',')
        .map(|t| i64::from_str(t.trim()).map_err(|e| Error::Parse(format!("coefficient {t:?}: {e}"))))
        .collect()
}

/// A realization of GF(p^k).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCtx {
    p: u64,
    k: usize,
    q: u64,
    modulus: Vec<u64>,
    qm1_factors: Vec<(u64, u32)>,
}

impl FieldCtx {
    /// Builds the field `F_p[x]/(f)` where `modulus` lists the `k + 1`
    /// coefficients of `f`, constant term first. Negative coefficients are
    /// reduced into `[0, p)`.
    pub fn new(p: u64, k: usize, modulus: &[i64]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k < 2 {
            return Err(Error::DegreeTooSmall(k));
        }
        let q = checked_pow(p, k).filter(|&q| q <= Q_CEILING);
        let q = q.ok_or(Error::Overflow { p, k })?;
        let modulus: Vec<u64> = modulus.iter().map(|&c| reduce_signed(c, p)).collect();
        if modulus.len() != k + 1 || modulus[k] != 1 {
            return Err(Error::NotMonic(k));
        }
        let irreducible = if q <= EXHAUSTIVE_IRREDUCIBILITY_LIMIT {
            poly::is_irreducible_exhaustive(&modulus, p)
        } else {
            poly::is_irreducible_frobenius(&modulus, p)
        };
        if !irreducible {
            return Err(Error::Reducible(p));
        }
        Ok(Self {
            p,
            k,
            q,
            modulus,
            qm1_factors: factorize(q - 1),
        })
    }

    /// The first monic degree-`k` polynomial, in index order of its lower
    /// coefficients, that is irreducible and has `x` as a primitive root.
    pub fn find_primitive(p: u64, k: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let count = checked_pow(p, k)
            .filter(|&q| q <= Q_CEILING)
            .ok_or(Error::Overflow { p, k })?;
        for idx in 0..count {
            let mut coeffs = vec![0i64; k + 1];
            let mut t = idx;
            for c in coeffs.iter_mut().take(k) {
                *c = (t % p) as i64;
                t /= p;
            }
            coeffs[k] = 1;
            if let Ok(ctx) = Self::new(p, k, &coeffs) {
                if ctx.is_primitive(&ctx.generator()) {
                    return Ok(ctx);
                }
            }
        }
        Err(Error::Internal(format!(
            "no primitive polynomial of degree {k} over F_{p}"
        )))
    }

    /// Builds a context from the textual encoding used by the CLI.
    pub fn from_text(p: u64, k: usize, modulus: &str) -> Result<Self> {
        Self::new(p, k, &parse_coeffs(modulus)?)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Order of the multiplicative group.
    pub fn group_order(&self) -> u64 {
        self.q - 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Distinct prime factors of `q - 1` with multiplicities, ascending.
    pub fn qm1_factors(&self) -> &[(u64, u32)] {
        &self.qm1_factors
    }

    /// Recurrence coefficients `a_0..a_{k-1}` of `f(x) = x^k - a_{k-1}x^{k-1} - ... - a_0`.
    pub fn recurrence_coeffs(&self) -> Vec<u64> {
        self.modulus[..self.k].iter().map(|&c| (self.p - c) % self.p).collect()
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.k],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.constant(1)
    }

    /// The class of `x`, a root of the modulus.
    pub fn generator(&self) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[1] = 1;
        e
    }

    /// The basis element `x^t`, `t < k`.
    pub fn monomial(&self, t: usize) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[t] = 1;
        e
    }

    pub fn constant(&self, c: u64) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = c % self.p;
        e
    }

    /// Element from up to `k` coefficients (constant term first); missing
    /// high coefficients are zero and negatives are normalized.
    pub fn element(&self, coeffs: &[i64]) -> Result<FieldElement> {
        if coeffs.len() > self.k {
            return Err(Error::BadElement {
                got: coeffs.len(),
                expected: self.k,
            });
        }
        let mut e = self.zero();
        for (dst, &c) in e.coeffs.iter_mut().zip(coeffs) {
            *dst = reduce_signed(c, self.p);
        }
        Ok(e)
    }

    pub fn parse_element(&self, text: &str) -> Result<FieldElement> {
        self.element(&parse_coeffs(text)?)
    }

    /// The element whose base-`p` digits (constant term least significant)
    /// spell `index`. Indices `0..q` enumerate the field.
    pub fn element_from_index(&self, mut index: u64) -> FieldElement {
        let mut e = self.zero();
        for c in e.coeffs.iter_mut() {
            *c = index % self.p;
            index /= self.p;
        }
        e
    }

    pub fn index_of(&self, e: &FieldElement) -> u64 {
        e.coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    /// All `q` elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(|i| self.element_from_index(i))
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        FieldElement { coeffs }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + self.p - y) % self.p)
            .collect();
        FieldElement { coeffs }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        self.sub(&self.zero(), a)
    }

    pub fn scale(&self, a: &FieldElement, c: u64) -> FieldElement {
        let c = c % self.p;
        FieldElement {
            coeffs: a.coeffs.iter().map(|&x| x * c % self.p).collect(),
        }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let (p, k) = (self.p, self.k);
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        // x^k = -(f_0 + f_1 x + ... + f_{k-1} x^{k-1})
        for d in (k..2 * k - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            for i in 0..k {
                let t = c * self.modulus[i] % p;
                prod[d - k + i] = (prod[d - k + i] + p - t) % p;
            }
        }
        prod.truncate(k);
        FieldElement { coeffs: prod }
    }

    pub fn square(&self, a: &FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// Non-negative power by square-and-multiply.
    pub fn pow_u(&self, base: &FieldElement, mut e: u128) -> FieldElement {
        let mut acc = self.one();
        let mut b = base.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.square(&b);
            }
        }
        acc
    }

    /// Integer power. Negative exponents are allowed for nonzero bases and
    /// are reduced modulo `q - 1`.
    pub fn pow(&self, base: &FieldElement, e: i128) -> Result<FieldElement> {
        if base.is_zero() {
            return match e {
                0 => Ok(self.one()),
                e if e > 0 => Ok(self.zero()),
                _ => Err(Error::ZeroInverse),
            };
        }
        let order = i128::from(self.q - 1);
        Ok(self.pow_u(base, e.rem_euclid(order) as u128))
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        self.pow(a, -1)
    }

    /// Frobenius map `γ ↦ γ^p`.
    pub fn frobenius(&self, a: &FieldElement) -> FieldElement {
        self.pow_u(a, u128::from(self.p))
    }

    /// Absolute trace `γ + γ^p + ... + γ^{p^{k-1}}` as a residue in `[0, p)`.
    pub fn trace(&self, a: &FieldElement) -> Result<u64> {
        let mut sum = a.clone();
        let mut conj = a.clone();
        for _ in 1..self.k {
            conj = self.frobenius(&conj);
            sum = self.add(&sum, &conj);
        }
        if sum.coeffs[1..].iter().any(|&c| c != 0) {
            return Err(Error::Internal(format!("trace {sum} is not in the prime field")));
        }
        Ok(sum.coeffs[0])
    }

    /// Trace as a linear functional: `Tr(x^i)` for `i < k`. Applying it to
    /// an element's coefficients gives the trace without exponentiation.
    pub fn trace_basis(&self) -> Result<Vec<u64>> {
        (0..self.k).map(|i| self.trace(&self.monomial(i))).collect()
    }

    /// Multiplicative order, found by stripping prime factors from `q - 1`.
    pub fn element_order(&self, a: &FieldElement) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        let one = self.one();
        let mut t = self.q - 1;
        for &(prime, _) in &self.qm1_factors {
            while t.is_multiple_of(prime) && self.pow_u(a, u128::from(t / prime)) == one {
                t /= prime;
            }
        }
        Ok(t)
    }

    pub fn is_primitive(&self, a: &FieldElement) -> bool {
        if a.is_zero() {
            return false;
        }
        let one = self.one();
        self.qm1_factors
            .iter()
            .all(|&(prime, _)| self.pow_u(a, u128::from((self.q - 1) / prime)) != one)
    }

    /// All primitive roots in index order.
    pub fn enumerate_primitive(&self) -> Vec<FieldElement> {
        self.elements().filter(|e| self.is_primitive(e)).collect()
    }

    /// Minimal polynomial of `a` over F_p (monic, constant term first),
    /// computed as the product of its distinct Frobenius conjugates.
    pub fn minimal_poly(&self, a: &FieldElement) -> Result<Vec<u64>> {
        let mut conjugates = vec![a.clone()];
        loop {
            let next = self.frobenius(conjugates.last().unwrap());
            if next == conjugates[0] {
                break;
            }
            conjugates.push(next);
        }
        // coefficients in F_q, constant term first
        let mut prod = vec![self.one()];
        for c in &conjugates {
            let neg_c = self.neg(c);
            let mut next = vec![self.zero(); prod.len() + 1];
            for (i, coef) in prod.iter().enumerate() {
                next[i + 1] = self.add(&next[i + 1], coef);
                next[i] = self.add(&next[i], &self.mul(coef, &neg_c));
            }
            prod = next;
        }
        prod.iter()
            .map(|c| {
                if c.coeffs[1..].iter().any(|&x| x != 0) {
                    Err(Error::Internal("minimal polynomial left F_p".into()))
                } else {
                    Ok(c.coeffs[0])
                }
            })
            .collect()
    }
}

fn reduce_signed(c: i64, p: u64) -> u64 {
    c.rem_euclid(p as i64) as u64
}

fn checked_pow(base: u64, exp: usize) -> Option<u64> {
    (0..exp).try_fold(1u64, |acc, _| acc.checked_mul(base))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Trial-division factorization into `(prime, multiplicity)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler's totient via the product formula over the prime factors.
pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(prime, _)| acc / prime * (prime - 1))
}

pub(crate) fn mod_pow(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        base = (base as u128 * base as u128 % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Inverse in F_p for prime `p`.
pub(crate) fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a, p - 2, p)
}

/// Dense polynomials over F_p, constant term first, used for the
/// irreducibility tests.
mod poly {
    use super::{mod_inv, reduce_signed};

    fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub(super) fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let b = trim(b.to_vec());
        let mut r = trim(a.to_vec());
        let db = b.len() - 1;
        let lead_inv = mod_inv(b[db], p);
        while r.len() > db {
            let dr = r.len() - 1;
            let c = r[dr] * lead_inv % p;
            for i in 0..=db {
                let t = c * b[i] % p;
                r[dr - db + i] = (r[dr - db + i] + p - t) % p;
            }
            r = trim(r);
        }
        r
    }

    fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        rem(&prod, f, p)
    }

    fn pow_mod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(base, f, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &b, f, p);
            }
            b = mul_mod(&b, &b, f, p);
            e >>= 1;
        }
        acc
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// No monic factor of degree `1..=k/2` divides `f`.
    pub(super) fn is_irreducible_exhaustive(f: &[u64], p: u64) -> bool {
        let k = f.len() - 1;
        for d in 1..=k / 2 {
            let count = p.pow(d as u32);
            for idx in 0..count {
                let mut g = vec![0u64; d + 1];
                let mut t = idx;
                for c in g.iter_mut().take(d) {
                    *c = t % p;
                    t /= p;
                }
                g[d] = 1;
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    /// Ben-Or: `gcd(f, x^{p^i} - x) = 1` for `i = 1..=k/2`.
    pub(super) fn is_irreducible_frobenius(f: &[u64], p: u64) -> bool {
        let k = f.len() - 1;
        let x = vec![0u64, 1];
        let mut h = x.clone();
        for _ in 1..=k / 2 {
            h = pow_mod(&h, p, f, p);
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = reduce_signed(diff[1] as i64 - 1, p);
            let g = gcd(f, &diff, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }

}
