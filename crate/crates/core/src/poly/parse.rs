//! Text syntax for polynomials.
//!
//! ```text
//! poly   := [sign] term { sign term }
//! term   := factor { '*' factor }
//! factor := integer [ '/' integer ] | name [ '^' integer ]
//! ```
//!
//! Whitespace is ignored. Files hold one polynomial per line; `#` starts a
//! comment.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Monomial, MultiPoly, PolyError};
use crate::ring::Rationals;

/// Names of the variables of a polynomial ring, in index order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarNames {
    names: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl VarNames {
    pub fn new(names: Vec<String>) -> Self {
        let lookup = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        VarNames { names, lookup }
    }

    /// `x0, ..., x{n-1}`.
    pub fn xs(n: usize) -> Self {
        Self::new((0..n).map(|i| format!("x{i}")).collect())
    }

    /// `p1, ..., pn`.
    pub fn params(n: usize) -> Self {
        Self::new((1..=n).map(|j| format!("p{j}")).collect())
    }

    /// `x0, ..., x{nvars-1}, p1, ..., p{nparams}`.
    pub fn family(nvars: usize, nparams: usize) -> Self {
        let mut names: Vec<String> = (0..nvars).map(|i| format!("x{i}")).collect();
        names.extend((1..=nparams).map(|j| format!("p{j}")));
        Self::new(names)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }
}

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    names: &'a VarNames,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn col(&self) -> usize {
        self.chars.get(self.pos).map_or_else(
            || self.chars.last().map_or(1, |&(c, _)| c + 2),
            |&(c, _)| c + 1,
        )
    }

    fn err(&self, msg: impl Into<String>) -> PolyError {
        PolyError::Syntax { line: self.line, col: self.col(), msg: msg.into() }
    }

    fn integer(&mut self) -> Result<BigInt, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        Ok(s.parse().expect("digits"))
    }

    fn factor(&mut self, coeff: &mut BigRational, exps: &mut [u32]) -> Result<(), PolyError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let mut v = BigRational::from_integer(n);
                if self.peek() == Some('/') {
                    self.pos += 1;
                    let d = self.integer()?;
                    if d.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    v /= BigRational::from_integer(d);
                }
                *coeff *= v;
                Ok(())
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                let col = self.col();
                while self.pos < self.chars.len() {
                    let c = self.chars[self.pos].1;
                    if c.is_ascii_alphanumeric() || c == '_' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let name: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
                let idx = self.names.index(&name).ok_or(PolyError::UnknownVariable {
                    name: name.clone(),
                    line: self.line,
                    col,
                })?;
                let mut e = 1u32;
                if self.peek() == Some('^') {
                    self.pos += 1;
                    let n = self.integer()?;
                    e = u32::try_from(n).map_err(|_| self.err("exponent too large"))?;
                }
                exps[idx] += e;
                Ok(())
            }
            Some(c) => Err(self.err(format!("unexpected character {c:?}"))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn term(&mut self, nvars: usize) -> Result<(Monomial, BigRational), PolyError> {
        let mut coeff = BigRational::one();
        let mut exps = vec![0u32; nvars];
        self.factor(&mut coeff, &mut exps)?;
        while self.peek() == Some('*') {
            self.pos += 1;
            self.factor(&mut coeff, &mut exps)?;
        }
        Ok((Monomial::new(exps), coeff))
    }
}

fn parse_line(text: &str, line: usize, names: &VarNames) -> Result<MultiPoly<Rationals>, PolyError> {
    let mut cur = Cursor {
        chars: text.chars().enumerate().collect(),
        pos: 0,
        line,
        names,
    };
    let n = names.len();
    let mut terms = Vec::new();
    let mut first = true;
    loop {
        let sign = match cur.peek() {
            None if !first => break,
            Some('+') => {
                cur.pos += 1;
                1
            }
            Some('-') => {
                cur.pos += 1;
                -1
            }
            _ if first => 1,
            Some(c) => return Err(cur.err(format!("expected + or -, found {c:?}"))),
            None => unreachable!(),
        };
        let (m, mut c) = cur.term(n)?;
        if sign < 0 {
            c = -c;
        }
        terms.push((m, c));
        first = false;
    }
    Ok(MultiPoly::from_terms(Rationals, n, terms))
}

/// Parses a single polynomial with rational coefficients.
pub fn parse_poly(text: &str, names: &VarNames) -> Result<MultiPoly<Rationals>, PolyError> {
    parse_line(text, 1, names)
}

/// Parses a polynomial file: one polynomial per nonblank line, `#` comments.
pub fn parse_poly_lines(
    text: &str,
    names: &VarNames,
) -> Result<Vec<MultiPoly<Rationals>>, PolyError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        out.push(parse_line(body, i + 1, names)?);
    }
    Ok(out)
}
