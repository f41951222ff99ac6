//! Prime fields GF(p) and extension fields GF(p^k).
//!
//! An extension is built as GF(p)[t]/(m(t)) where `m` is the first monic
//! irreducible polynomial of degree `k` when monic polynomials are ordered by
//! their coefficient tuple read from the `t^{k-1}` coefficient down to the
//! constant term. The basis `1, t, ..., t^{k-1}` is therefore the same every
//! time the same `(p, k)` is requested, which is what lets residues from
//! different runs be lifted together.
//!
//! Elements are stored as the integer `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`
//! plus the id of their field; arithmetic on elements of two different fields
//! panics.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;
use thiserror::Error;

use crate::ring::{Field, Ring};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 32;

/// Extension fields up to this order get exp/log multiplication tables.
const TABLE_ORDER_LIMIT: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    InvalidDegree(u32),
    #[error("field order {p}^{k} exceeds 2^32")]
    TooLarge { p: u64, k: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("cannot parse field element {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

/// Identifies a field; equal `(p, k)` always means the same field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldId(u64);

impl FieldId {
    fn new(p: u64, k: u32) -> Self {
        FieldId((p << 6) | u64::from(k))
    }
}

/// An element of some GF(p^k). Plain data: copy it freely across threads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    field: FieldId,
    value: u64,
}

impl FieldElement {
    pub fn field_id(&self) -> FieldId {
        self.field
    }

    /// The packed base-p integer encoding, in `[0, q)`.
    pub fn index(&self) -> u64 {
        self.value
    }
}

#[derive(Debug)]
struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

#[derive(Debug)]
struct Inner {
    p: u64,
    k: u32,
    q: u64,
    id: FieldId,
    /// Monic modulus, low degree first, length k+1. Empty for prime fields.
    modulus: Vec<u64>,
    tables: Option<Tables>,
}

/// Shared, immutable description of GF(p^k).
#[derive(Clone)]
pub struct FieldCtx(Arc<Inner>);

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({}^{})", self.0.p, self.0.k)
        }
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for FieldCtx {}

/// Deterministic primality for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    primal_check::miller_rabin(n)
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

impl FieldCtx {
    /// Builds GF(p^k) with the deterministic modulus described in the module docs.
    pub fn new(p: u64, k: u32) -> Result<Self, FieldError> {
        if k < 1 {
            return Err(FieldError::InvalidDegree(k));
        }
        if !is_prime(p) {
            return Err(FieldError::NonPrime(p));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or(FieldError::TooLarge { p, k })?;
        let modulus = if k == 1 { Vec::new() } else { first_irreducible(p, k as usize) };
        let mut inner = Inner {
            p,
            k,
            q,
            id: FieldId::new(p, k),
            modulus,
            tables: None,
        };
        if k > 1 && q <= TABLE_ORDER_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(FieldCtx(Arc::new(inner)))
    }

    /// Parses `p` or `p,k`.
    pub fn from_spec(spec: &str) -> Result<Self, FieldError> {
        let bad = |reason: &str| FieldError::Parse {
            text: spec.to_string(),
            reason: reason.to_string(),
        };
        let mut parts = spec.split(',').map(str::trim);
        let p = parts
            .next()
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| bad("expected p or p,k"))?;
        let k = match parts.next() {
            Some(s) => s.parse::<u32>().map_err(|_| bad("bad extension degree"))?,
            None => 1,
        };
        if parts.next().is_some() {
            return Err(bad("expected p or p,k"));
        }
        FieldCtx::new(p, k)
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn k(&self) -> u32 {
        self.0.k
    }

    pub fn order(&self) -> u64 {
        self.0.q
    }

    pub fn id(&self) -> FieldId {
        self.0.id
    }

    /// The monic modulus, low degree first; `None` for a prime field.
    pub fn modulus(&self) -> Option<&[u64]> {
        (self.0.k > 1).then_some(self.0.modulus.as_slice())
    }

    #[inline]
    fn check(&self, a: &FieldElement) {
        assert!(
            a.field == self.0.id,
            "field element from another field used in {self:?}"
        );
    }

    #[inline]
    fn mk(&self, value: u64) -> FieldElement {
        FieldElement { field: self.0.id, value }
    }

    /// Element with the given packed index, `0 <= index < q`.
    pub fn from_index(&self, index: u64) -> FieldElement {
        assert!(index < self.0.q, "index {index} out of range for {self:?}");
        self.mk(index)
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.0.q).map(move |v| self.mk(v))
    }

    /// The generator `t` of the extension (equal to 0 for a prime field).
    pub fn gen(&self) -> FieldElement {
        if self.0.k == 1 {
            self.mk(0)
        } else {
            self.mk(self.0.p)
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        self.mk(rng.gen_range(0..self.0.q))
    }

    /// True when `a` lies in the prime subfield.
    pub fn in_base_field(&self, a: &FieldElement) -> bool {
        a.value < self.0.p
    }

    /// Coordinates of `a` in the basis `1, t, ..., t^{k-1}`.
    pub fn to_basis_tuple(&self, a: &FieldElement) -> Result<Vec<u64>, FieldError> {
        if a.field != self.0.id {
            return Err(FieldError::ContextMismatch(format!(
                "element does not belong to {self:?}"
            )));
        }
        Ok(self.unpack(a.value))
    }

    /// Inverse of [`FieldCtx::to_basis_tuple`]; residues are reduced mod p.
    pub fn from_basis_tuple(&self, coords: &[u64]) -> Result<FieldElement, FieldError> {
        if coords.len() != self.0.k as usize {
            return Err(FieldError::ContextMismatch(format!(
                "tuple of length {} for {self:?} (degree {})",
                coords.len(),
                self.0.k
            )));
        }
        let digits: Vec<u64> = coords.iter().map(|c| c % self.0.p).collect();
        Ok(self.mk(self.pack(&digits)))
    }

    pub fn try_inv(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        self.inv(a).ok_or(FieldError::DivisionByZero)
    }

    /// Parses the element syntax: a decimal integer, or for extensions a
    /// polynomial in `t` such as `3*t+1` or `t^2-t`.
    pub fn parse_elem(&self, text: &str) -> Result<FieldElement, FieldError> {
        let err = |reason: &str| FieldError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty"));
        }
        let bytes = s.as_bytes();
        let mut pos = 0;
        let mut acc = self.zero();
        while pos < bytes.len() {
            let mut negative = false;
            if bytes[pos] == b'+' || bytes[pos] == b'-' {
                negative = bytes[pos] == b'-';
                pos += 1;
            } else if pos != 0 {
                return Err(err("expected + or -"));
            }
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let coeff = if pos > start {
                let n: BigInt = s[start..pos].parse().map_err(|_| err("bad integer"))?;
                Some(self.from_bigint(&n))
            } else {
                None
            };
            let mut term = coeff.unwrap_or_else(|| self.one());
            if coeff.is_some() && pos < bytes.len() && bytes[pos] == b'*' {
                pos += 1;
                if pos >= bytes.len() || bytes[pos] != b't' {
                    return Err(err("expected t after *"));
                }
            }
            if pos < bytes.len() && bytes[pos] == b't' {
                if self.0.k == 1 {
                    return Err(err("t is not defined in a prime field"));
                }
                pos += 1;
                let mut e = 1u64;
                if pos < bytes.len() && bytes[pos] == b'^' {
                    pos += 1;
                    let es = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    e = s[es..pos].parse().map_err(|_| err("bad exponent"))?;
                }
                term = self.mul(&term, &self.pow(&self.gen(), e));
            } else if coeff.is_none() {
                return Err(err("expected a coefficient or t"));
            }
            acc = if negative { self.sub(&acc, &term) } else { self.add(&acc, &term) };
        }
        Ok(acc)
    }

    fn unpack(&self, mut v: u64) -> Vec<u64> {
        let p = self.0.p;
        (0..self.0.k)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    fn pack(&self, digits: &[u64]) -> u64 {
        digits.iter().rev().fold(0u64, |acc, &d| acc * self.0.p + d)
    }

    fn poly_mul_mod(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.0.p;
        let k = self.0.k as usize;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y % p) % p;
            }
        }
        let m = &self.0.modulus;
        for deg in (k..prod.len()).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (i, &mi) in m.iter().enumerate().take(k) {
                let idx = deg - k + i;
                prod[idx] = (prod[idx] + (p - c) * mi % p) % p;
            }
        }
        prod.truncate(k);
        prod
    }

    fn mul_slow(&self, a: u64, b: u64) -> u64 {
        let r = self.poly_mul_mod(&self.unpack(a), &self.unpack(b));
        self.pack(&r)
    }
}

impl Ring for FieldCtx {
    type Elem = FieldElement;

    fn zero(&self) -> FieldElement {
        self.mk(0)
    }

    fn one(&self) -> FieldElement {
        self.mk(1)
    }

    fn from_i64(&self, v: i64) -> FieldElement {
        let p = self.0.p as i128;
        self.mk((v as i128).rem_euclid(p) as u64)
    }

    fn from_bigint(&self, v: &BigInt) -> FieldElement {
        let p = BigInt::from(self.0.p);
        let r = v.mod_floor(&p);
        self.mk(r.to_u64().expect("residue fits in u64"))
    }

    #[inline]
    fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        let p = self.0.p;
        if self.0.k == 1 {
            let s = a.value + b.value;
            return self.mk(if s >= p { s - p } else { s });
        }
        let (mut x, mut y) = (a.value, b.value);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.0.k {
            let d = (x % p + y % p) % p;
            out += d * place;
            place = place.wrapping_mul(p);
            x /= p;
            y /= p;
        }
        self.mk(out)
    }

    #[inline]
    fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    #[inline]
    fn neg(&self, a: &FieldElement) -> FieldElement {
        self.check(a);
        let p = self.0.p;
        if self.0.k == 1 {
            return self.mk(if a.value == 0 { 0 } else { p - a.value });
        }
        let digits: Vec<u64> = self.unpack(a.value).iter().map(|&d| (p - d) % p).collect();
        self.mk(self.pack(&digits))
    }

    #[inline]
    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        if self.0.k == 1 {
            return self.mk(a.value * b.value % self.0.p);
        }
        if a.value == 0 || b.value == 0 {
            return self.zero();
        }
        match &self.0.tables {
            Some(t) => {
                let l = t.log[a.value as usize] as usize + t.log[b.value as usize] as usize;
                self.mk(u64::from(t.exp[l]))
            }
            None => self.mk(self.mul_slow(a.value, b.value)),
        }
    }

    #[inline]
    fn is_zero(&self, a: &FieldElement) -> bool {
        self.check(a);
        a.value == 0
    }

    fn characteristic(&self) -> u64 {
        self.0.p
    }

    fn fmt_elem(&self, a: &FieldElement, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 || a.value < self.0.p {
            return write!(f, "{}", a.value);
        }
        let digits = self.unpack(a.value);
        let mut first = true;
        for (i, &c) in digits.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("t")?,
                (1, c) => write!(f, "{c}*t")?,
                (i, 1) => write!(f, "t^{i}")?,
                (i, c) => write!(f, "{c}*t^{i}")?,
            }
        }
        Ok(())
    }

    fn needs_parens(&self, a: &FieldElement) -> bool {
        a.value >= self.0.p
    }

    fn owns(&self, a: &FieldElement) -> bool {
        a.field == self.0.id
    }
}

impl Field for FieldCtx {
    fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        self.check(a);
        if a.value == 0 {
            return None;
        }
        if self.0.k == 1 {
            let inv = BigInt::from(a.value)
                .extended_gcd(&BigInt::from(self.0.p))
                .x
                .mod_floor(&BigInt::from(self.0.p));
            return Some(self.mk(inv.to_u64().expect("residue fits")));
        }
        match &self.0.tables {
            Some(t) => {
                let n = (self.0.q - 1) as usize;
                let l = t.log[a.value as usize] as usize;
                Some(self.mk(u64::from(t.exp[(n - l) % n])))
            }
            None => Some(self.pow(a, self.0.q - 2)),
        }
    }
}

fn build_tables(inner: &Inner) -> Tables {
    // Temporary context without tables so multiplication goes through the
    // polynomial route.
    let ctx = FieldCtx(Arc::new(Inner {
        p: inner.p,
        k: inner.k,
        q: inner.q,
        id: inner.id,
        modulus: inner.modulus.clone(),
        tables: None,
    }));
    let n = inner.q - 1;
    let factors = prime_factors(n);
    let gen = (2..inner.q)
        .map(|v| ctx.mk(v))
        .find(|g| factors.iter().all(|&l| !ctx.is_one(&ctx.pow(g, n / l))))
        .expect("multiplicative group is cyclic");
    let mut exp = vec![0u32; 2 * n as usize];
    let mut log = vec![0u32; inner.q as usize];
    let mut cur = ctx.one();
    for i in 0..n as usize {
        exp[i] = cur.value as u32;
        exp[i + n as usize] = cur.value as u32;
        log[cur.value as usize] = i as u32;
        cur = ctx.mul(&cur, &gen);
    }
    Tables { exp, log }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense univariate polynomials over GF(p), low degree first, used only to
// find the modulus.

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_mod(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        for (i, &mi) in m.iter().enumerate() {
            let idx = dr - dm + i;
            r[idx] = (r[idx] + (p - c) * mi % p) % p;
        }
        trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y % p) % p;
        }
    }
    poly_mod(&prod, m, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_mod(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn mod_inv(a: u64, p: u64) -> u64 {
    let r = BigInt::from(a).extended_gcd(&BigInt::from(p)).x;
    let r = r.mod_floor(&BigInt::from(p));
    r.to_u64().unwrap_or(0)
}

/// Rabin's test: a monic `m` of degree k is irreducible iff `t^{p^k} = t mod m`
/// and `gcd(t^{p^{k/l}} - t, m) = 1` for every prime `l | k`.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let k = m.len() - 1;
    let frob = |x: &[u64]| -> Vec<u64> {
        // x^p mod m by square-and-multiply.
        let mut base = x.to_vec();
        let mut acc = vec![1u64];
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, m, p);
            }
            base = poly_mulmod(&base, &base, m, p);
            e >>= 1;
        }
        acc
    };
    let t = poly_mod(&[0, 1], m, p);
    let mut powers = vec![t.clone()];
    for _ in 0..k {
        let next = frob(powers.last().unwrap());
        powers.push(next);
    }
    if powers[k] != t {
        return false;
    }
    for l in prime_factors(k as u64) {
        let h = &powers[k / l as usize];
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        trim(&mut diff);
        if poly_gcd(m, &diff, p).len() != 1 {
            return false;
        }
    }
    true
}

fn first_irreducible(p: u64, k: usize) -> Vec<u64> {
    let count = p.pow(k as u32);
    for n in 0..count {
        let mut m = Vec::with_capacity(k + 1);
        let mut v = n;
        for _ in 0..k {
            m.push(v % p);
            v /= p;
        }
        m.push(1);
        if m[0] != 0 && is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over GF(p)")
}

impl FieldCtx {
    /// Signed representative in `(-p/2, p/2]` of a prime-field element.
    pub fn centered(&self, a: &FieldElement) -> i64 {
        self.check(a);
        let p = self.0.p;
        let v = a.value % p;
        if v > p / 2 {
            v as i64 - p as i64
        } else {
            v as i64
        }
    }

    /// Reduces a rational `n/d` into the field.
    pub fn from_ratio(&self, n: &BigInt, d: &BigInt) -> Result<FieldElement, FieldError> {
        let den = self.from_bigint(d);
        let inv = self.inv(&den).ok_or(FieldError::DivisionByZero)?;
        Ok(self.mul(&self.from_bigint(n), &inv))
    }

    /// Unsigned representative of a prime-field element as a `BigInt`.
    pub fn to_bigint(&self, a: &FieldElement) -> BigInt {
        self.check(a);
        BigInt::from(a.value)
    }

    pub fn is_square(&self, a: &FieldElement) -> bool {
        self.is_zero(a) || self.is_one(&self.pow(a, (self.0.q - 1) / 2)) || self.0.p == 2
    }
}

impl FieldCtx {
    /// Number of points of projective space of dimension `n - 1`, if it fits.
    pub fn projective_count(&self, n: usize) -> Option<u64> {
        let q = self.0.q as u128;
        let total = (0..n as u32).map(|i| q.pow(i)).sum::<u128>();
        u64::try_from(total).ok()
    }
}
