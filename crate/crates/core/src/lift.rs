//! Multimodular lifting to characteristic zero.
//!
//! Residues modulo several primes are combined by the Chinese remainder
//! theorem and turned into a rational number by rational reconstruction with
//! the balanced bound `|n|, d <= sqrt(M/2)`. With three or more primes the last
//! one is held out of the reconstruction and used as an independent check.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::fields::is_prime;
use crate::poly::{Monomial, MultiPoly, VarNames};
use crate::ring::Rationals;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("prime {0} appears more than once")]
    DuplicatePrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("need at least {needed} primes, got {got}")]
    TooFewPrimes { needed: usize, got: usize },
    #[error("{primes} primes and {payloads} payloads")]
    LengthMismatch { primes: usize, payloads: usize },
    #[error("no rational reconstruction modulo {modulus}; more primes are needed")]
    NoReconstruction { modulus: BigInt },
    #[error("lift disagrees with held-out prime {held_out}; suspect prime sets: {suspects:?}")]
    HeldOutMismatch { held_out: u64, suspects: Vec<Vec<u64>> },
    #[error("component {index}: {source}")]
    Component {
        index: usize,
        #[source]
        source: Box<LiftError>,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Per-prime payloads reduced into `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSystem<T> {
    primes: Vec<u64>,
    residues: Vec<T>,
}

/// Payloads that can be reduced modulo a prime.
pub trait Payload: Clone + Send + Sync {
    fn reduced(&self, p: u64) -> Self;
}

impl Payload for u64 {
    fn reduced(&self, p: u64) -> Self {
        self % p
    }
}

impl Payload for (u64, u64) {
    fn reduced(&self, p: u64) -> Self {
        (self.0 % p, self.1 % p)
    }
}

impl Payload for Vec<u64> {
    fn reduced(&self, p: u64) -> Self {
        self.iter().map(|x| x % p).collect()
    }
}

impl<T: Payload> ResidueSystem<T> {
    pub fn new(primes: Vec<u64>, residues: Vec<T>) -> Result<Self, LiftError> {
        if primes.len() != residues.len() {
            return Err(LiftError::LengthMismatch { primes: primes.len(), payloads: residues.len() });
        }
        let mut seen = BTreeSet::new();
        for &p in &primes {
            if !is_prime(p) {
                return Err(LiftError::NotPrime(p));
            }
            if !seen.insert(p) {
                return Err(LiftError::DuplicatePrime(p));
            }
        }
        let residues = residues.iter().zip(&primes).map(|(r, &p)| r.reduced(p)).collect();
        Ok(ResidueSystem { primes, residues })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn residues(&self) -> &[T] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    fn map<U>(&self, f: impl Fn(&T, u64) -> U) -> ResidueSystem<U> {
        ResidueSystem {
            primes: self.primes.clone(),
            residues: self.residues.iter().zip(&self.primes).map(|(r, &p)| f(r, p)).collect(),
        }
    }

    fn without(&self, skip: &[usize]) -> ResidueSystem<T> {
        let keep: Vec<usize> = (0..self.len()).filter(|i| !skip.contains(i)).collect();
        ResidueSystem {
            primes: keep.iter().map(|&i| self.primes[i]).collect(),
            residues: keep.iter().map(|&i| self.residues[i].clone()).collect(),
        }
    }
}

/// `x mod p` for `x` in `[0, p)`.
fn inv_mod(a: u64, p: u64) -> u64 {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(p));
    e.x.mod_floor(&BigInt::from(p)).to_u64().expect("fits")
}

/// The unique `x` in `[0, M)` with `x = r_i mod p_i`, and `M = prod p_i`.
pub fn crt(rs: &ResidueSystem<u64>) -> (BigInt, BigInt) {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (&p, &r) in rs.primes.iter().zip(&rs.residues) {
        let pb = BigInt::from(p);
        let xm = (&x % &pb).to_u64().expect("fits");
        let mm = (&m % &pb).to_u64().expect("fits");
        let diff = (r + p - xm) % p;
        let t = (u128::from(diff) * u128::from(inv_mod(mm, p)) % u128::from(p)) as u64;
        x += &m * BigInt::from(t);
        m *= pb;
    }
    (x, m)
}

/// Rational `n/d` with `n = a·d mod M`, `gcd(n, d) = 1`, `d > 0` and
/// `2n², 2d² <= M`, when one exists.
pub fn ratrec(a: &BigInt, m: &BigInt) -> Result<BigRational, LiftError> {
    let fail = || LiftError::NoReconstruction { modulus: m.clone() };
    let a = a.mod_floor(m);
    let within = |v: &BigInt| BigInt::from(2) * v * v <= *m;
    let (mut r0, mut r1) = (m.clone(), a);
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !within(&r1) {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    let (mut n, mut d) = (r1, t1);
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    if d.is_zero() || !within(&d) || !n.gcd(&d).is_one() {
        return Err(fail());
    }
    Ok(BigRational::new(n, d))
}

/// `n/d mod p`, or `None` when `p` divides `d`.
pub fn reduce_rational(v: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let d = v.denom().mod_floor(&pb).to_u64().expect("fits");
    if d == 0 {
        return None;
    }
    let n = v.numer().mod_floor(&pb).to_u64().expect("fits");
    Some((u128::from(n) * u128::from(inv_mod(d, p)) % u128::from(p)) as u64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedRational {
    pub value: BigRational,
    /// Product of the primes used for reconstruction.
    pub modulus: BigInt,
    /// Number of primes whose residue agrees with `value`.
    pub verified_primes: usize,
    /// The prime excluded from reconstruction and checked afterwards.
    pub held_out: Option<u64>,
}

fn agrees(v: &BigRational, p: u64, r: u64) -> bool {
    reduce_rational(v, p) == Some(r)
}

/// Reconstruction from all but the last prime, checked against the last.
fn attempt(rs: &ResidueSystem<u64>) -> Result<LiftedRational, LiftError> {
    let n = rs.len();
    if n < 3 {
        let (x, m) = crt(rs);
        let value = ratrec(&x, &m)?;
        return Ok(LiftedRational { value, modulus: m, verified_primes: n, held_out: None });
    }
    let (x, m) = crt(&rs.without(&[n - 1]));
    let value = ratrec(&x, &m)?;
    let (hp, hr) = (rs.primes[n - 1], rs.residues[n - 1]);
    if !agrees(&value, hp, hr) {
        return Err(LiftError::HeldOutMismatch { held_out: hp, suspects: Vec::new() });
    }
    Ok(LiftedRational { value, modulus: m, verified_primes: n, held_out: Some(hp) })
}

/// Minimal sets of at most two primes whose removal leaves a verified lift.
fn suspect_sets(rs: &ResidueSystem<u64>) -> Vec<Vec<u64>> {
    let n = rs.len();
    for size in 1..=2usize {
        if n < size + 3 {
            break;
        }
        let combos: Vec<Vec<usize>> = if size == 1 {
            (0..n).map(|i| vec![i]).collect()
        } else {
            (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])).collect()
        };
        let found: Vec<Vec<u64>> = combos
            .par_iter()
            .filter(|skip| attempt(&rs.without(skip)).is_ok())
            .map(|skip| skip.iter().map(|&i| rs.primes[i]).collect())
            .collect();
        if !found.is_empty() {
            return found;
        }
    }
    Vec::new()
}

/// CRT followed by rational reconstruction, with held-out verification when
/// at least three primes are given.
pub fn lift_rational(rs: &ResidueSystem<u64>) -> Result<LiftedRational, LiftError> {
    if rs.len() < 2 {
        return Err(LiftError::TooFewPrimes { needed: 2, got: rs.len() });
    }
    match attempt(rs) {
        Ok(v) => Ok(v),
        Err(e) if rs.len() >= 3 => {
            let suspects = suspect_sets(rs);
            match e {
                LiftError::NoReconstruction { .. } if suspects.is_empty() => Err(e),
                _ => Err(LiftError::HeldOutMismatch { held_out: rs.primes[rs.len() - 1], suspects }),
            }
        }
        Err(e) => Err(e),
    }
}

/// Monic quadratic `x² - e1 x + e2` lifted from per-prime unordered root pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedQuadratic {
    pub sum: LiftedRational,
    pub product: LiftedRational,
    /// Both roots, ascending, when the discriminant is a rational square.
    pub roots: Option<(BigRational, BigRational)>,
}

impl LiftedQuadratic {
    pub fn poly(&self) -> MultiPoly<Rationals> {
        MultiPoly::from_terms(
            Rationals,
            1,
            [
                (Monomial::new(vec![2]), BigRational::one()),
                (Monomial::new(vec![1]), -self.sum.value.clone()),
                (Monomial::new(vec![0]), self.product.value.clone()),
            ],
        )
    }

    /// The quadratic in polynomial text syntax, in the variable `x`.
    pub fn poly_text(&self) -> String {
        let names = VarNames::new(vec!["x".to_string()]);
        self.poly().display(&names).to_string()
    }
}

fn exact_sqrt(v: &BigInt) -> Option<BigInt> {
    if v.is_negative() {
        return None;
    }
    let s = v.sqrt();
    (&s * &s == *v).then_some(s)
}

fn rational_sqrt(v: &BigRational) -> Option<BigRational> {
    Some(BigRational::new(exact_sqrt(v.numer())?, exact_sqrt(v.denom())?))
}

/// Lifts the elementary symmetric functions of each prime's pair.
pub fn lift_unordered_pairs(rs: &ResidueSystem<(u64, u64)>) -> Result<LiftedQuadratic, LiftError> {
    let sums = rs.map(|&(a, b), p| (a + b) % p);
    let prods = rs.map(|&(a, b), p| (u128::from(a) * u128::from(b) % u128::from(p)) as u64);
    let sum = lift_rational(&sums)?;
    let product = lift_rational(&prods)?;
    let disc = &sum.value * &sum.value - BigRational::from_integer(BigInt::from(4)) * &product.value;
    let roots = rational_sqrt(&disc).map(|s| {
        let two = BigRational::from_integer(BigInt::from(2));
        ((&sum.value - &s) / &two, (&sum.value + &s) / &two)
    });
    Ok(LiftedQuadratic { sum, product, roots })
}

/// Componentwise lift of basis tuples of extension-field elements.
pub fn lift_extension_tuples(rs: &ResidueSystem<Vec<u64>>) -> Result<Vec<LiftedRational>, LiftError> {
    let k = rs.residues.first().map_or(0, Vec::len);
    if let Some(bad) = rs.residues.iter().find(|t| t.len() != k) {
        return Err(LiftError::LengthMismatch { primes: k, payloads: bad.len() });
    }
    (0..k)
        .map(|i| {
            lift_rational(&rs.map(|t, _| t[i]))
                .map_err(|e| LiftError::Component { index: i, source: Box::new(e) })
        })
        .collect()
}

/// Splits a residue file into `(prime, payload text, line)` entries.
fn residue_lines(text: &str) -> Result<Vec<(u64, String, usize)>, LiftError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (p, payload) = body.split_once(':').ok_or_else(|| LiftError::Parse {
            line: i + 1,
            msg: "expected `p: payload`".into(),
        })?;
        let p = p.trim().parse().map_err(|_| LiftError::Parse {
            line: i + 1,
            msg: format!("bad prime {:?}", p.trim()),
        })?;
        out.push((p, payload.trim().to_string(), i + 1));
    }
    Ok(out)
}

fn parse_residue(tok: &str, p: u64, line: usize) -> Result<u64, LiftError> {
    let v: BigInt = tok.trim().parse().map_err(|_| LiftError::Parse {
        line,
        msg: format!("bad residue {:?}", tok.trim()),
    })?;
    Ok(v.mod_floor(&BigInt::from(p)).to_u64().expect("fits"))
}

fn parse_list(payload: &str, p: u64, line: usize) -> Result<Vec<u64>, LiftError> {
    payload
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse_residue(s, p, line))
        .collect()
}

pub fn parse_integer_residues(text: &str) -> Result<ResidueSystem<u64>, LiftError> {
    let mut primes = Vec::new();
    let mut res = Vec::new();
    for (p, payload, line) in residue_lines(text)? {
        primes.push(p);
        res.push(parse_residue(&payload, p, line)?);
    }
    ResidueSystem::new(primes, res)
}

pub fn parse_pair_residues(text: &str) -> Result<ResidueSystem<(u64, u64)>, LiftError> {
    let mut primes = Vec::new();
    let mut res = Vec::new();
    for (p, payload, line) in residue_lines(text)? {
        match parse_list(&payload, p, line)?[..] {
            [a, b] => res.push((a, b)),
            _ => return Err(LiftError::Parse { line, msg: "expected a pair `a,b`".into() }),
        }
        primes.push(p);
    }
    ResidueSystem::new(primes, res)
}

pub fn parse_tuple_residues(text: &str, k: usize) -> Result<ResidueSystem<Vec<u64>>, LiftError> {
    let mut primes = Vec::new();
    let mut res = Vec::new();
    for (p, payload, line) in residue_lines(text)? {
        let t = parse_list(&payload, p, line)?;
        if t.len() != k {
            return Err(LiftError::Parse { line, msg: format!("expected {k} components, found {}", t.len()) });
        }
        primes.push(p);
        res.push(t);
    }
    ResidueSystem::new(primes, res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn reduce_all(v: &BigRational, primes: &[u64]) -> ResidueSystem<u64> {
        let res = primes.iter().map(|&p| reduce_rational(v, p).unwrap()).collect();
        ResidueSystem::new(primes.to_vec(), res).unwrap()
    }

    #[test]
    fn crt_small() {
        let rs = ResidueSystem::new(vec![3, 5], vec![1, 2]).unwrap();
        assert_eq!(crt(&rs), (BigInt::from(7), BigInt::from(15)));
        let zero = ResidueSystem::new(vec![3, 5, 7], vec![0, 0, 0]).unwrap();
        assert_eq!(crt(&zero).0, BigInt::zero());
        let primes = [101, 103, 107, 109, 113];
        let rs = ResidueSystem::new(primes.to_vec(), primes.iter().map(|p| 123456 % p).collect()).unwrap();
        assert_eq!(crt(&rs).0, BigInt::from(123456));
        assert_eq!(ResidueSystem::new(vec![3, 3], vec![1u64, 1]), Err(LiftError::DuplicatePrime(3)));
    }

    #[test]
    fn ratrec_examples() {
        assert_eq!(ratrec(&BigInt::from(33), &BigInt::from(97)).unwrap(), rat(2, 3));
        let m = BigInt::from(1_000_003);
        assert_eq!(ratrec(&BigInt::from(5), &m).unwrap(), rat(5, 1));
        let half = (&m + 1) / 2;
        assert_eq!(ratrec(&half, &m).unwrap(), rat(1, 2));
    }

    #[test]
    fn ratrec_can_fail() {
        // Modulo 11 the bound is 2; 5 = n/d needs |n|, d <= 2: 5 ≡ -1/2 works.
        assert_eq!(ratrec(&BigInt::from(5), &BigInt::from(11)).unwrap(), rat(-1, 2));
        // 4 ≡ ±1/±2, ±2/±1 all fail: 1/2=6, -1/2=5, 2, -2=9, 1, -1=10.
        assert!(ratrec(&BigInt::from(4), &BigInt::from(11)).is_err());
    }

    #[test]
    fn lift_with_held_out() {
        let v = rat(-22, 7);
        let lifted = lift_rational(&reduce_all(&v, &[101, 103, 107])).unwrap();
        assert_eq!(lifted.value, v);
        assert_eq!(lifted.held_out, Some(107));
        let ints = ResidueSystem::new(vec![101, 103, 107], vec![42, 42, 42]).unwrap();
        assert_eq!(lift_rational(&ints).unwrap().value, rat(42, 1));
    }

    #[test]
    fn corrupted_prime_is_named() {
        let primes = [1_000_003, 1_000_033, 1_000_037, 1_000_039, 1_000_081];
        let mut rs = reduce_all(&rat(-22, 7), &primes);
        rs.residues[1] = (rs.residues[1] + 1) % primes[1];
        match lift_rational(&rs) {
            Err(LiftError::HeldOutMismatch { suspects, .. }) => assert_eq!(suspects, vec![vec![primes[1]]]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unordered_pairs() {
        let primes = [101, 103, 107, 109];
        let ones = ResidueSystem::new(primes.to_vec(), vec![(1, 2); 4]).unwrap();
        let q = lift_unordered_pairs(&ones).unwrap();
        assert_eq!(q.poly_text(), "x^2 - 3*x + 2");
        assert_eq!(q.roots, Some((rat(1, 1), rat(2, 1))));
        let pairs: Vec<(u64, u64)> = primes
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let a = reduce_rational(&rat(1, 2), p).unwrap();
                let b = reduce_rational(&rat(1, 3), p).unwrap();
                if i % 2 == 0 { (a, b) } else { (b, a) }
            })
            .collect();
        let q = lift_unordered_pairs(&ResidueSystem::new(primes.to_vec(), pairs).unwrap()).unwrap();
        assert_eq!(q.poly_text(), "x^2 - 5/6*x + 1/6");
        assert_eq!(q.roots, Some((rat(1, 3), rat(1, 2))));
    }

    #[test]
    fn tuples_componentwise() {
        let primes = [101u64, 103, 107];
        let rs = ResidueSystem::new(primes.to_vec(), vec![vec![3, 0]; 3]).unwrap();
        let out = lift_extension_tuples(&rs).unwrap();
        assert_eq!(out.iter().map(|l| l.value.clone()).collect::<Vec<_>>(), vec![rat(3, 1), rat(0, 1)]);
        let bad = ResidueSystem::new(primes.to_vec(), vec![vec![1, 2], vec![1, 2], vec![1]]).unwrap();
        assert!(lift_extension_tuples(&bad).is_err());
    }

    #[test]
    fn residue_files() {
        let rs = parse_integer_residues("# demo\n101: 33\n103: -1\n").unwrap();
        assert_eq!(rs.residues(), &[33, 102]);
        let pairs = parse_pair_residues("101: 1,2\n103: 2, 1\n").unwrap();
        assert_eq!(pairs.residues(), &[(1, 2), (2, 1)]);
        assert!(matches!(parse_pair_residues("101: 1\n"), Err(LiftError::Parse { line: 1, .. })));
        assert!(matches!(parse_integer_residues("101 33\n"), Err(LiftError::Parse { .. })));
        assert_eq!(parse_integer_residues("100: 1\n"), Err(LiftError::NotPrime(100)));
    }
}
