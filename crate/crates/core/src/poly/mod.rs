//! Sparse multivariate polynomials.
//!
//! A [`MultiPoly`] is a map from exponent vectors to nonzero coefficients in
//! one [`Ring`]. Terms are kept in graded-lexicographic order and printed
//! leading term first. The split between geometric variables and parameters
//! lives in [`ParametricFamily`], not here.

mod family;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::ring::{Field, Ring};

pub use family::{infer_family_shape, ParametricFamily};
pub use parse::{parse_poly, parse_poly_lines, VarNames};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown variable {name:?} at line {line}, column {col}")]
    UnknownVariable { name: String, line: usize, col: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("coefficient {0} does not reduce (denominator vanishes)")]
    BadReduction(String),
    #[error("expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("coefficient {0} is not an integer")]
    NonIntegral(String),
}

/// Exponent vector, ordered graded-lexicographically (total degree first,
/// then by the exponent of `x0`, then `x1`, ...).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeMode {
    AtMost,
    Exactly,
}

/// All exponent vectors in `nvars` variables of total degree `degree`
/// (`Exactly`) or at most `degree` (`AtMost`), in ascending graded-lex order.
pub fn monomial_basis(nvars: usize, degree: u32, mode: DegreeMode) -> Vec<Monomial> {
    fn rec(nvars: usize, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i + 1 == nvars {
            cur[i] = left;
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(nvars, i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if mode == DegreeMode::AtMost || degree == 0 {
            out.push(Monomial(Vec::new()));
        }
        return out;
    }
    let lo = match mode {
        DegreeMode::AtMost => 0,
        DegreeMode::Exactly => degree,
    };
    let mut cur = vec![0; nvars];
    for d in lo..=degree {
        rec(nvars, 0, d, &mut cur, &mut out);
    }
    out.sort();
    out
}

/// Sparse polynomial over the ring `R`.
#[derive(Clone, Debug)]
pub struct MultiPoly<R: Ring> {
    ring: R,
    nvars: usize,
    terms: BTreeMap<Monomial, R::Elem>,
}

impl<R: Ring> PartialEq for MultiPoly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.nvars == other.nvars && self.terms == other.terms
    }
}

impl<R: Ring> MultiPoly<R> {
    pub fn zero(ring: R, nvars: usize) -> Self {
        MultiPoly { ring, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(ring: R, nvars: usize, c: R::Elem) -> Self {
        Self::from_terms(ring, nvars, [(Monomial::one(nvars), c)])
    }

    pub fn var(ring: R, nvars: usize, i: usize) -> Self {
        let one = ring.one();
        Self::from_terms(ring, nvars, [(Monomial::var(nvars, i), one)])
    }

    /// Sums the given terms, dropping anything that cancels to zero.
    pub fn from_terms(
        ring: R,
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, R::Elem)>,
    ) -> Self {
        let mut p = MultiPoly::zero(ring, nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "exponent vector length");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: R::Elem) {
        if self.ring.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = self.ring.add(existing, &c);
                if self.ring.is_zero(&s) {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &R::Elem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> R::Elem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// `Some(d)` when every term has total degree `d`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(Monomial::degree);
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        Self::from_terms(
            self.ring.clone(),
            self.nvars,
            self.terms.iter().map(|(m, a)| (m.clone(), self.ring.mul(a, c))),
        )
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &R::Elem) -> Self {
        Self::from_terms(
            self.ring.clone(),
            self.nvars,
            self.terms.iter().map(|(k, a)| (k.mul(m), self.ring.mul(a, c))),
        )
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = MultiPoly::constant(self.ring.clone(), self.nvars, self.ring.one());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Evaluates at a point with one coordinate per variable.
    pub fn eval(&self, point: &[R::Elem]) -> R::Elem {
        assert_eq!(point.len(), self.nvars, "evaluation point arity");
        let r = &self.ring;
        let mut maxe = vec![0u32; self.nvars];
        for m in self.terms.keys() {
            for (i, &e) in m.exps().iter().enumerate() {
                maxe[i] = maxe[i].max(e);
            }
        }
        let powers: Vec<Vec<R::Elem>> = point
            .iter()
            .zip(&maxe)
            .map(|(x, &me)| {
                let mut v = Vec::with_capacity(me as usize + 1);
                v.push(r.one());
                for e in 1..=me as usize {
                    let next = r.mul(&v[e - 1], x);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = r.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t = r.mul(&t, &powers[i][e as usize]);
                }
            }
            acc = r.add(&acc, &t);
        }
        acc
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Result<Self, PolyError> {
        if i >= self.nvars {
            return Err(PolyError::IndexOutOfRange { index: i, nvars: self.nvars });
        }
        let r = &self.ring;
        Ok(Self::from_terms(
            r.clone(),
            self.nvars,
            self.terms.iter().filter(|(m, _)| m.exps()[i] > 0).map(|(m, c)| {
                let e = m.exps()[i];
                let mut exps = m.exps().to_vec();
                exps[i] -= 1;
                (Monomial(exps), r.mul(c, &r.from_i64(i64::from(e))))
            }),
        ))
    }

    /// All first partials.
    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|i| self.partial(i).expect("in range")).collect()
    }

    /// Substitutes `subs[i]` for variable `i`; all substitutes share one
    /// variable count, which becomes the result's.
    pub fn compose(&self, subs: &[MultiPoly<R>]) -> Result<Self, PolyError> {
        if subs.len() != self.nvars {
            return Err(PolyError::Arity { expected: self.nvars, got: subs.len() });
        }
        let target = subs.first().map_or(0, |s| s.nvars);
        let mut cache: Vec<Vec<MultiPoly<R>>> = subs
            .iter()
            .map(|s| vec![MultiPoly::constant(self.ring.clone(), target, self.ring.one()), s.clone()])
            .collect();
        let mut acc = MultiPoly::zero(self.ring.clone(), target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(self.ring.clone(), target, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e as usize {
                    let next = &cache[i][cache[i].len() - 1] * &subs[i];
                    cache[i].push(next);
                }
                t = &t * &cache[i][e as usize];
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Applies a coefficient map into another ring.
    pub fn map_ring<S: Ring>(&self, target: &S, f: impl Fn(&R::Elem) -> S::Elem) -> MultiPoly<S> {
        MultiPoly::from_terms(
            target.clone(),
            self.nvars,
            self.terms.iter().map(|(m, c)| (m.clone(), f(c))),
        )
    }

    pub fn try_map_ring<S: Ring, E>(
        &self,
        target: &S,
        f: impl Fn(&R::Elem) -> Result<S::Elem, E>,
    ) -> Result<MultiPoly<S>, E> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            terms.push((m.clone(), f(c)?));
        }
        Ok(MultiPoly::from_terms(target.clone(), self.nvars, terms))
    }

    /// Same terms viewed in a larger variable set; variable `i` becomes `offset + i`.
    pub fn embed(&self, nvars: usize, offset: usize) -> Self {
        assert!(offset + self.nvars <= nvars);
        Self::from_terms(
            self.ring.clone(),
            nvars,
            self.terms.iter().map(|(m, c)| {
                let mut e = vec![0; nvars];
                e[offset..offset + self.nvars].copy_from_slice(m.exps());
                (Monomial(e), c.clone())
            }),
        )
    }

    /// Printable form with the given variable names.
    pub fn display<'a>(&'a self, names: &'a VarNames) -> PolyDisplay<'a, R> {
        PolyDisplay { poly: self, names }
    }
}

impl<R: Field> MultiPoly<R> {
    /// Divides through by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.terms.iter().next_back() {
            Some((_, lc)) => self.scale(&self.ring.inv(lc).expect("nonzero leading coefficient")),
            None => self.clone(),
        }
    }
}

pub struct PolyDisplay<'a, R: Ring> {
    poly: &'a MultiPoly<R>,
    names: &'a VarNames,
}

impl<R: Ring> fmt::Display for PolyDisplay<'_, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.poly.ring;
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let negative = r.is_negative(c);
            let abs = if negative { r.neg(c) } else { c.clone() };
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let is_const = m.degree() == 0;
            let mut need_star = false;
            if is_const || !r.is_one(&abs) {
                if r.needs_parens(&abs) {
                    write!(f, "({})", r.display(&abs))?;
                } else {
                    write!(f, "{}", r.display(&abs))?;
                }
                need_star = true;
            }
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if need_star {
                    f.write_str("*")?;
                }
                f.write_str(self.names.name(i))?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
                need_star = true;
            }
        }
        Ok(())
    }
}

impl<R: Ring> Add for &MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn add(self, rhs: &MultiPoly<R>) -> MultiPoly<R> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        assert!(self.ring == rhs.ring, "coefficient domains differ");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<R: Ring> Sub for &MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn sub(self, rhs: &MultiPoly<R>) -> MultiPoly<R> {
        self + &(-rhs)
    }
}

impl<R: Ring> Neg for &MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn neg(self) -> MultiPoly<R> {
        MultiPoly::from_terms(
            self.ring.clone(),
            self.nvars,
            self.terms.iter().map(|(m, c)| (m.clone(), self.ring.neg(c))),
        )
    }
}

impl<R: Ring> Mul for &MultiPoly<R> {
    type Output = MultiPoly<R>;
    fn mul(self, rhs: &MultiPoly<R>) -> MultiPoly<R> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        assert!(self.ring == rhs.ring, "coefficient domains differ");
        let r = &self.ring;
        let mut out = MultiPoly::zero(r.clone(), self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), r.mul(ca, cb));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldCtx;
    use crate::ring::{rat, Integers, Rationals};
    use num_bigint::BigInt;

    fn zpoly(text: &str, n: usize) -> MultiPoly<Integers> {
        let q = parse_poly(text, &VarNames::xs(n)).unwrap();
        q.try_map_ring(&Integers, |c| {
            if c.is_integer() {
                Ok(c.numer().clone())
            } else {
                Err(())
            }
        })
        .unwrap()
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(monomial_basis(3, 2, DegreeMode::AtMost).len(), 10);
        assert_eq!(monomial_basis(3, 2, DegreeMode::Exactly).len(), 6);
        assert_eq!(monomial_basis(4, 8, DegreeMode::Exactly).len(), 165);
        let b = monomial_basis(2, 1, DegreeMode::AtMost);
        let exps: Vec<_> = b.iter().map(|m| m.exps().to_vec()).collect();
        assert_eq!(exps, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn partials() {
        let f = zpoly("x0^2*x1", 2);
        assert_eq!(f.partial(0).unwrap(), zpoly("2*x0*x1", 2));
        assert!(matches!(f.partial(2), Err(PolyError::IndexOutOfRange { .. })));

        let gf7 = FieldCtx::new(7, 1).unwrap();
        let g = zpoly("x0^7", 1).map_ring(&gf7, |c| gf7.from_bigint(c));
        assert!(g.partial(0).unwrap().is_zero());
    }

    #[test]
    fn display_forms() {
        let names = VarNames::xs(3);
        assert_eq!(zpoly("x0^2 + x1*x2", 3).display(&names).to_string(), "x0^2 + x1*x2");
        assert_eq!(zpoly("-x0 + 3 - 2*x1^3", 3).display(&names).to_string(), "-2*x1^3 - x0 + 3");
        assert_eq!(zpoly("x0^2 - x0^2", 3).display(&names).to_string(), "0");
        let q = parse_poly("x0^2 - 5/6*x0 + 1/6", &VarNames::xs(1)).unwrap();
        assert_eq!(q.display(&VarNames::xs(1)).to_string(), "x0^2 - 5/6*x0 + 1/6");
        assert_eq!(q.coeff(&Monomial::new(vec![1])), rat(-5, 6));
    }

    #[test]
    fn compose_translation() {
        // (x+1)^2 = x^2 + 2x + 1
        let f = zpoly("x0^2", 1);
        let sub = zpoly("x0 + 1", 1);
        assert_eq!(f.compose(&[sub]).unwrap(), zpoly("x0^2 + 2*x0 + 1", 1));
    }

    #[test]
    fn eval_and_homogeneity() {
        let f = zpoly("x0^3 + x1^3 + x2^3 - 3*x0*x1*x2", 3);
        assert_eq!(f.homogeneous_degree(), Some(3));
        let one = BigInt::from(1);
        assert_eq!(f.eval(&[one.clone(), one.clone(), one]), BigInt::from(0));
        assert_eq!(zpoly("x0 + x1^2", 2).homogeneous_degree(), None);
        let q: MultiPoly<Rationals> = parse_poly("1/2*x0", &VarNames::xs(1)).unwrap();
        assert_eq!(q.eval(&[rat(4, 1)]), rat(2, 1));
    }
}
