//! Intersection lattices of divisor classes.
//!
//! A lattice is a list of named classes with an integer Gram matrix of
//! pairwise intersection numbers. Numerical equivalences between classes are
//! the radical of the Gram matrix; they are reported as primitive integer
//! vectors whose canonical-class coefficient is positive.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::exactla::{parse_rational, primitive_integer_vector, Inertia, LinAlgError, Matrix};
use crate::ring::{Integers, Rationals};
use crate::rng::stream_rng;

/// Name of the canonical class in lattice files.
pub const CANONICAL: &str = "K";
/// Boxes up to this many points are searched without replacement.
pub const EXHAUSTIVE_BOX_LIMIT: u128 = 100_000;
/// Largest pairing box the template solver will enumerate.
pub const SOLVE_BOX_LIMIT: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("Gram matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("duplicate class name {0:?}")]
    DuplicateName(String),
    #[error("unknown class name {0:?}")]
    UnknownName(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("bad template: {0}")]
    Template(String),
    #[error("no assignment satisfies the template and constraints")]
    NoSolution,
    #[error("{points} pairing assignments exceed the limit of {limit}; narrow the constraints")]
    BoxTooLarge { points: u128, limit: u128 },
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Named classes with their intersection matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramLattice {
    names: Vec<String>,
    gram: Vec<Vec<i64>>,
}

impl GramLattice {
    pub fn new(names: Vec<String>, gram: Vec<Vec<i64>>) -> Result<Self, LatticeError> {
        let n = names.len();
        if gram.len() != n {
            return Err(LatticeError::DimensionMismatch { expected: n, got: gram.len() });
        }
        for row in &gram {
            if row.len() != n {
                return Err(LatticeError::DimensionMismatch { expected: n, got: row.len() });
            }
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric(i, j));
                }
            }
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name) {
                return Err(LatticeError::DuplicateName(name.clone()));
            }
        }
        Ok(GramLattice { names, gram })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn entry(&self, a: &str, b: &str) -> Result<i64, LatticeError> {
        Ok(self.gram[self.require(a)?][self.require(b)?])
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn require(&self, name: &str) -> Result<usize, LatticeError> {
        self.index(name).ok_or_else(|| LatticeError::UnknownName(name.to_string()))
    }

    pub fn canonical_index(&self) -> Option<usize> {
        self.index(CANONICAL)
    }

    pub fn matrix(&self) -> Matrix<Rationals> {
        Matrix::from_i64(Rationals, &self.gram)
    }

    pub fn rank(&self) -> usize {
        self.matrix().rank()
    }

    pub fn determinant(&self) -> BigInt {
        Matrix::from_i64(Integers, &self.gram).determinant_int().expect("square")
    }

    pub fn inertia(&self) -> Inertia {
        self.matrix().inertia().expect("square")
    }

    /// True when the sub-lattice spanned by `names` is negative definite.
    pub fn is_negative_definite_on(&self, names: &[&str]) -> Result<bool, LatticeError> {
        let idx = names.iter().map(|n| self.require(n)).collect::<Result<Vec<_>, _>>()?;
        Ok(self.matrix().principal(&idx).is_negative_definite())
    }

    /// Canonically signed primitive basis of the radical.
    pub fn radical(&self) -> Vec<Vec<BigInt>> {
        let k = self.canonical_index();
        self.matrix()
            .primitive_nullspace()
            .into_iter()
            .map(|v| orient(v, k))
            .collect()
    }

    /// True when `v` pairs to zero with every class.
    pub fn in_radical(&self, v: &[BigRational]) -> Result<bool, LatticeError> {
        Ok(self.matrix().mul_vec(v)?.iter().all(Zero::is_zero))
    }

    /// Appends a class with the given pairings against the current basis.
    pub fn extend_with_curve(&self, name: &str, pairings: &[i64], self_int: i64) -> Result<Self, LatticeError> {
        if pairings.len() != self.len() {
            return Err(LatticeError::DimensionMismatch { expected: self.len(), got: pairings.len() });
        }
        if self.index(name).is_some() {
            return Err(LatticeError::DuplicateName(name.to_string()));
        }
        let mut gram = self.gram.clone();
        for (row, &x) in gram.iter_mut().zip(pairings) {
            row.push(x);
        }
        let mut last = pairings.to_vec();
        last.push(self_int);
        gram.push(last);
        let mut names = self.names.clone();
        names.push(name.to_string());
        Ok(GramLattice { names, gram })
    }

    pub fn pairing(&self, u: &DivisorClass, v: &DivisorClass) -> Result<BigRational, LatticeError> {
        for w in [u, v] {
            if w.coeffs.len() != self.len() {
                return Err(LatticeError::DimensionMismatch { expected: self.len(), got: w.coeffs.len() });
            }
        }
        let mut acc = BigRational::zero();
        for (i, a) in u.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in v.coeffs.iter().enumerate() {
                if !b.is_zero() && self.gram[i][j] != 0 {
                    acc += a * b * BigRational::from_integer(BigInt::from(self.gram[i][j]));
                }
            }
        }
        Ok(acc)
    }

    pub fn class(&self, name: &str) -> Result<DivisorClass, LatticeError> {
        let i = self.require(name)?;
        Ok(DivisorClass::basis(self.len(), i))
    }

    /// Parses a class expression such as `2K - D' - N7`.
    pub fn parse_class(&self, text: &str) -> Result<DivisorClass, LatticeError> {
        let mut coeffs = vec![BigRational::zero(); self.len()];
        for (c, name) in parse_terms(text)? {
            let c = c.ok_or_else(|| LatticeError::Parse { line: 1, msg: "unexpected `?`".into() })?;
            match name {
                Some(name) => coeffs[self.require(&name)?] += c,
                None if c.is_zero() => {}
                None => return Err(LatticeError::Parse { line: 1, msg: "constant term in a class".into() }),
            }
        }
        Ok(DivisorClass { coeffs })
    }

    /// Display order: the canonical class, then classes not named `N<i>`, then the rest.
    fn display_order(&self) -> Vec<usize> {
        let exceptional = |s: &str| {
            s.len() > 1 && s.starts_with('N') && s[1..].chars().all(|c| c.is_ascii_digit())
        };
        let mut order: Vec<usize> = self.canonical_index().into_iter().collect();
        order.extend((0..self.len()).filter(|&i| Some(i) != self.canonical_index() && !exceptional(&self.names[i])));
        order.extend((0..self.len()).filter(|&i| exceptional(&self.names[i])));
        order
    }

    pub fn format_class(&self, c: &DivisorClass) -> String {
        let mut out = String::new();
        for i in self.display_order() {
            let a = &c.coeffs[i];
            if a.is_zero() {
                continue;
            }
            let mag = a.abs();
            let sign = if a.is_negative() { "-" } else { "+" };
            if out.is_empty() {
                if a.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            if !mag.is_one() {
                if mag.is_integer() {
                    out.push_str(&mag.numer().to_string());
                } else {
                    out.push_str(&format!("{}/{}*", mag.numer(), mag.denom()));
                }
            }
            out.push_str(&self.names[i]);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// `lhs ≡ rhs` form of an integer relation: positive coefficients on the left.
    pub fn format_relation(&self, v: &[BigInt]) -> String {
        let to_class = |sel: &dyn Fn(&BigInt) -> bool, neg: bool| DivisorClass {
            coeffs: v
                .iter()
                .map(|x| {
                    if sel(x) {
                        BigRational::from_integer(if neg { -x } else { x.clone() })
                    } else {
                        BigRational::zero()
                    }
                })
                .collect(),
        };
        let lhs = to_class(&|x: &BigInt| x.is_positive(), false);
        let rhs = to_class(&|x: &BigInt| x.is_negative(), true);
        format!("{} = {}", self.format_class(&lhs), self.format_class(&rhs))
    }

    /// Lattice file: a `names:` line followed by the matrix rows.
    pub fn parse(text: &str) -> Result<Self, LatticeError> {
        let mut names = None;
        let mut body = String::new();
        let mut first_row_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                body.push('\n');
                continue;
            }
            if let Some(rest) = line.strip_prefix("names:") {
                names = Some(rest.split_whitespace().map(str::to_string).collect::<Vec<_>>());
                body.push('\n');
                continue;
            }
            if first_row_line == 0 {
                first_row_line = i + 1;
            }
            body.push_str(line);
            body.push('\n');
        }
        let names = names.ok_or(LatticeError::Parse { line: 1, msg: "missing `names:` line".into() })?;
        let m = crate::exactla::parse_matrix(&body).map_err(|e| match e {
            LinAlgError::Parse { line, msg } => LatticeError::Parse { line, msg },
            other => other.into(),
        })?;
        let mut gram = Vec::with_capacity(m.rows());
        for i in 0..m.rows() {
            let mut row = Vec::with_capacity(m.cols());
            for j in 0..m.cols() {
                let x = m.get(i, j);
                let v = x.to_integer().to_i64().filter(|_| x.is_integer()).ok_or(LatticeError::Parse {
                    line: first_row_line + i,
                    msg: format!("entry {x} is not a machine integer"),
                })?;
                row.push(v);
            }
            gram.push(row);
        }
        GramLattice::new(names, gram)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("names: {}\n", self.names.join(" "));
        s.push_str(&Matrix::from_i64(Integers, &self.gram).to_string());
        s
    }
}

/// Primitive vector with positive canonical coefficient, else positive leading entry.
fn orient(mut v: Vec<BigInt>, k: Option<usize>) -> Vec<BigInt> {
    if let Some(k) = k {
        if v[k].is_negative() {
            for x in v.iter_mut() {
                *x = -&*x;
            }
        }
    }
    v
}

/// Canonical form of a rational relation vector.
pub fn canonical_relation(v: &[BigRational], canonical: Option<usize>) -> Vec<BigInt> {
    orient(primitive_integer_vector(v), canonical)
}

/// A rational combination of the basis classes of a lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    pub coeffs: Vec<BigRational>,
}

impl DivisorClass {
    pub fn zero(n: usize) -> Self {
        DivisorClass { coeffs: vec![BigRational::zero(); n] }
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut c = Self::zero(n);
        c.coeffs[i] = BigRational::one();
        c
    }

    pub fn from_ints(v: &[i64]) -> Self {
        DivisorClass { coeffs: v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        DivisorClass { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        DivisorClass { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        DivisorClass { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(c)))
    }
}

/// `(coefficient, name)` terms; `None` coefficient marks an unknown `?`.
type Term = (Option<BigRational>, Option<String>);

fn parse_terms(text: &str) -> Result<Vec<Term>, LatticeError> {
    let err = |msg: String| LatticeError::Parse { line: 1, msg };
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    let skip = |i: &mut usize| {
        while *i < chars.len() && chars[*i].is_whitespace() {
            *i += 1;
        }
    };
    loop {
        skip(&mut i);
        if i == chars.len() {
            if out.is_empty() {
                return Err(err("empty expression".into()));
            }
            break;
        }
        let mut neg = false;
        if chars[i] == '+' || chars[i] == '-' {
            neg = chars[i] == '-';
            i += 1;
            skip(&mut i);
        } else if !out.is_empty() {
            return Err(err(format!("expected + or - at column {}", i + 1)));
        }
        let mut coeff: Option<BigRational> = Some(BigRational::one());
        let mut numeric = false;
        if i < chars.len() && chars[i] == '?' {
            coeff = None;
            i += 1;
        } else if i < chars.len() && chars[i].is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
                i += 1;
            }
            let tok: String = chars[start..i].iter().collect();
            coeff = Some(parse_rational(&tok).map_err(err)?);
            numeric = true;
        }
        skip(&mut i);
        if i < chars.len() && chars[i] == '*' {
            i += 1;
            skip(&mut i);
        }
        let start = i;
        while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '\'' || chars[i] == '_') {
            i += 1;
        }
        let name: Option<String> = (i > start).then(|| chars[start..i].iter().collect());
        if name.is_none() && !numeric {
            return Err(err(format!("expected a class name at column {}", i + 1)));
        }
        if neg && coeff.is_none() {
            return Err(err("unknown multiplicities must enter with a + sign".into()));
        }
        out.push((coeff.map(|c| if neg { -c } else { c }), name));
    }
    Ok(out)
}

/// χ(O), K², irregularity and geometric genus, tied by χ = 1 - q + p_g.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurfaceInvariants {
    pub chi: i64,
    pub k2: i64,
    pub q: i64,
    pub pg: i64,
}

impl SurfaceInvariants {
    pub fn new(k2: i64, q: i64, pg: i64) -> Self {
        SurfaceInvariants { chi: 1 - q + pg, k2, q, pg }
    }

    pub fn from_chi(chi: i64, k2: i64, q: i64) -> Self {
        SurfaceInvariants { chi, k2, q, pg: chi - 1 + q }
    }
}

/// Second Betti number from Noether's formula: `12χ - K² + 4q - 2`.
pub fn b2(inv: &SurfaceInvariants) -> i64 {
    12 * inv.chi - inv.k2 + 4 * inv.q - 2
}

fn block_gram() -> Vec<Vec<i64>> {
    // Two A1 points give N1, N2; the A3 chains are N3-N4-N5 and N6-N7-N8.
    let mut g = vec![vec![0i64; 9]; 9];
    for (i, row) in g.iter_mut().enumerate().take(8) {
        row[i] = -2;
    }
    for (a, b) in [(2, 3), (3, 4), (5, 6), (6, 7)] {
        g[a][b] = 1;
        g[b][a] = 1;
    }
    g[8][8] = 1;
    g
}

/// The exceptional curves of the 2A1+2A3 Godeaux resolution and its canonical class.
pub fn godeaux_fixture() -> GramLattice {
    let names = (1..=8).map(|i| format!("N{i}")).chain([CANONICAL.to_string()]).collect();
    GramLattice::new(names, block_gram()).expect("fixture is well formed")
}

pub const C_PAIRINGS: [i64; 9] = [1, 0, 0, 0, 1, 1, 0, 0, 2];
pub const D_PAIRINGS: [i64; 10] = [1, 1, 0, 0, 0, 0, 1, 0, 2, 3];
pub const CURVE_SELF_INTERSECTION: i64 = 2;

/// The fixture with the two curves `C'` and `D'` appended.
pub fn godeaux_extended() -> GramLattice {
    godeaux_fixture()
        .extend_with_curve("C'", &C_PAIRINGS, CURVE_SELF_INTERSECTION)
        .and_then(|l| l.extend_with_curve("D'", &D_PAIRINGS, CURVE_SELF_INTERSECTION))
        .expect("fixture is well formed")
}

/// Inclusive integer ranges for the pairings of a hypothetical curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub pairings: Vec<(i64, i64)>,
    pub self_int: (i64, i64),
}

impl SearchBounds {
    pub fn uniform(n: usize, range: (i64, i64)) -> Self {
        SearchBounds { pairings: vec![range; n], self_int: range }
    }

    fn ranges(&self) -> Vec<(i64, i64)> {
        let mut r = self.pairings.clone();
        r.push(self.self_int);
        r
    }

    fn size(&self) -> u128 {
        self.ranges()
            .iter()
            .map(|&(lo, hi)| if hi < lo { 0 } else { (hi - lo + 1) as u128 })
            .fold(1u128, |a, b| a.saturating_mul(b))
    }

    /// Parses `name: lo..hi` or `name: v` lines; `*` sets every pairing, `self` the square.
    pub fn parse(text: &str, lattice: &GramLattice) -> Result<Self, LatticeError> {
        let mut b = SearchBounds::uniform(lattice.len(), DEFAULT_SEARCH_RANGE);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| LatticeError::Parse { line: i + 1, msg };
            let (lhs, rhs) = line.split_once(':').ok_or_else(|| perr("expected `name: range`".into()))?;
            let values = parse_int_set(rhs).map_err(perr)?;
            let range = (*values.first().expect("nonempty"), *values.last().expect("nonempty"));
            if values.len() as i64 != range.1 - range.0 + 1 {
                return Err(perr("search bounds must be contiguous ranges".into()));
            }
            for name in lhs.split_whitespace() {
                match name {
                    "*" => b.pairings = vec![range; lattice.len()],
                    "self" => b.self_int = range,
                    n => b.pairings[lattice.require(n)?] = range,
                }
            }
        }
        Ok(b)
    }
}

/// Default pairing range for searches when none is given.
pub const DEFAULT_SEARCH_RANGE: (i64, i64) = (-2, 8);

/// A radical relation found for one sampled pairing vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoundRelation {
    pub pairings: Vec<i64>,
    pub self_int: i64,
    /// Relation over the extended basis (old classes, then the new curve).
    pub relation: Vec<BigInt>,
}

fn decode_box(ranges: &[(i64, i64)], mut idx: u128) -> Vec<i64> {
    let mut out = vec![0; ranges.len()];
    for (slot, &(lo, hi)) in out.iter_mut().zip(ranges).rev() {
        let w = (hi - lo + 1) as u128;
        *slot = lo + (idx % w) as i64;
        idx /= w;
    }
    out
}

/// Samples pairing vectors for a new curve and reports those whose extended
/// lattice acquires a radical. Deterministic for a given seed.
pub fn search_relations(
    lattice: &GramLattice,
    bounds: &SearchBounds,
    seed: u64,
    trials: u64,
) -> Result<Vec<FoundRelation>, LatticeError> {
    if bounds.pairings.len() != lattice.len() {
        return Err(LatticeError::DimensionMismatch { expected: lattice.len(), got: bounds.pairings.len() });
    }
    let ranges = bounds.ranges();
    let size = bounds.size();
    if size == 0 {
        return Ok(Vec::new());
    }
    let mut rng = stream_rng(seed, 0);
    let samples: Vec<Vec<i64>> = if size <= EXHAUSTIVE_BOX_LIMIT {
        let amount = (u128::from(trials)).min(size) as usize;
        rand::seq::index::sample(&mut rng, size as usize, amount)
            .into_iter()
            .map(|i| decode_box(&ranges, i as u128))
            .collect()
    } else {
        (0..trials)
            .map(|_| ranges.iter().map(|&(lo, hi)| rng.gen_range(lo..=hi)).collect())
            .collect()
    };
    let found: Vec<Vec<FoundRelation>> = samples
        .par_iter()
        .map(|s| {
            let (pairings, self_int) = (&s[..s.len() - 1], s[s.len() - 1]);
            let ext = lattice.extend_with_curve("?", pairings, self_int)?;
            if !ext.determinant().is_zero() {
                return Ok(Vec::new());
            }
            Ok(ext
                .radical()
                .into_iter()
                .map(|relation| FoundRelation { pairings: pairings.to_vec(), self_int, relation })
                .collect())
        })
        .collect::<Result<_, LatticeError>>()?;
    let mut uniq: BTreeMap<(Vec<i64>, i64, Vec<BigInt>), FoundRelation> = BTreeMap::new();
    for r in found.into_iter().flatten() {
        uniq.entry((r.pairings.clone(), r.self_int, r.relation.clone())).or_insert(r);
    }
    Ok(uniq.into_values().collect())
}

/// A relation `Σ c_j E_j = 0` with one new curve and some unknown positive
/// multiplicities, parsed from text such as `8K = 4C' + ?N1 + ?N3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationTemplate {
    pub curve: String,
    /// Known coefficients over the lattice basis, moved to the left-hand side.
    pub fixed: Vec<BigRational>,
    pub curve_coeff: BigRational,
    /// `(basis index, sign)` of every unknown multiplicity on the left-hand side.
    pub unknown: Vec<(usize, i64)>,
}

impl RelationTemplate {
    pub fn parse(text: &str, lattice: &GramLattice) -> Result<Self, LatticeError> {
        let body: String = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .collect::<Vec<_>>()
            .join(" ");
        let (lhs, rhs) = body
            .split_once('=')
            .ok_or_else(|| LatticeError::Template("expected `lhs = rhs`".into()))?;
        let n = lattice.len();
        let mut fixed = vec![BigRational::zero(); n];
        let mut curve: Option<String> = None;
        let mut curve_coeff = BigRational::zero();
        let mut unknown: Vec<(usize, i64)> = Vec::new();
        for (side, sign) in [(lhs, 1i64), (rhs, -1i64)] {
            for (c, name) in parse_terms(side)? {
                let name = name.ok_or_else(|| LatticeError::Template("constant term".into()))?;
                let s = BigRational::from_integer(BigInt::from(sign));
                match (lattice.index(&name), c) {
                    (Some(i), Some(c)) => fixed[i] += c * s,
                    (Some(i), None) => {
                        if unknown.iter().any(|&(j, _)| j == i) {
                            return Err(LatticeError::Template(format!("{name} is unknown twice")));
                        }
                        unknown.push((i, sign));
                    }
                    (None, Some(c)) => {
                        if curve.as_ref().is_some_and(|x| *x != name) {
                            return Err(LatticeError::Template(format!(
                                "more than one new curve: {} and {name}",
                                curve.unwrap_or_default()
                            )));
                        }
                        curve = Some(name);
                        curve_coeff += c * s;
                    }
                    (None, None) => {
                        return Err(LatticeError::Template(format!("{name} is not a lattice class")))
                    }
                }
            }
        }
        let curve = curve.ok_or_else(|| LatticeError::Template("no new curve".into()))?;
        if curve_coeff.is_zero() {
            return Err(LatticeError::Template(format!("{curve} has coefficient zero")));
        }
        unknown.sort_unstable();
        if unknown.iter().any(|&(i, _)| !fixed[i].is_zero()) {
            return Err(LatticeError::Template("a class has both a known and an unknown coefficient".into()));
        }
        Ok(RelationTemplate { curve, fixed, curve_coeff, unknown })
    }
}

/// Allowed values for the pairings of the new curve, plus sum caps on groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveConstraints {
    pub pairings: Vec<Vec<i64>>,
    pub self_int: Vec<i64>,
    /// `(indices, cap)`: the pairings over `indices` sum to at most `cap`.
    pub group_caps: Vec<(Vec<usize>, i64)>,
}

fn parse_int_set(text: &str) -> Result<Vec<i64>, String> {
    let mut out = BTreeSet::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || format!("bad value {part:?}");
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
            out.extend(lo..=hi);
        } else {
            out.insert(part.parse::<i64>().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err("empty value set".into());
    }
    Ok(out.into_iter().collect())
}

impl CurveConstraints {
    pub fn uniform(n: usize, values: &[i64], self_int: &[i64]) -> Self {
        CurveConstraints { pairings: vec![values.to_vec(); n], self_int: self_int.to_vec(), group_caps: Vec::new() }
    }

    /// Lines `names: values` (values as `a,b` or `lo..hi`), `self: values`,
    /// and `cap c: names` bounding a sum of pairings. Unlisted pairings
    /// default to the search range.
    pub fn parse(text: &str, lattice: &GramLattice) -> Result<Self, LatticeError> {
        let (lo, hi) = DEFAULT_SEARCH_RANGE;
        let default: Vec<i64> = (lo..=hi).collect();
        let mut c = CurveConstraints::uniform(lattice.len(), &default, &default);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| LatticeError::Parse { line: i + 1, msg };
            let (lhs, rhs) = line.split_once(':').ok_or_else(|| perr("expected `names: values`".into()))?;
            if let Some(cap) = lhs.trim().strip_prefix("cap") {
                let cap: i64 = cap.trim().parse().map_err(|_| perr(format!("bad cap {:?}", cap.trim())))?;
                let idx = rhs.split_whitespace().map(|n| lattice.require(n)).collect::<Result<Vec<_>, _>>()?;
                c.group_caps.push((idx, cap));
                continue;
            }
            let values = parse_int_set(rhs).map_err(perr)?;
            for name in lhs.split_whitespace() {
                match name {
                    "self" => c.self_int = values.clone(),
                    "*" => c.pairings = vec![values.clone(); lattice.len()],
                    n => c.pairings[lattice.require(n)?] = values.clone(),
                }
            }
        }
        Ok(c)
    }
}

/// One consistent completion of a template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSolution {
    pub pairings: Vec<i64>,
    pub self_int: i64,
    /// Multiplicities in the order of `RelationTemplate::unknown`.
    pub multiplicities: Vec<BigInt>,
    /// Canonical relation over the extended basis.
    pub relation: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSolutions {
    pub solutions: Vec<CurveSolution>,
    /// Solutions grouped by lattice symmetries that preserve the template.
    pub orbits: Vec<Vec<usize>>,
}

impl CurveSolutions {
    pub fn is_unique(&self) -> bool {
        self.solutions.len() == 1
    }
}

fn for_each_assignment(sets: &[Vec<i64>], caps: &[(Vec<usize>, i64)], f: &mut dyn FnMut(&[i64])) {
    fn rec(
        sets: &[Vec<i64>],
        caps: &[(Vec<usize>, i64)],
        cur: &mut Vec<i64>,
        f: &mut dyn FnMut(&[i64]),
    ) {
        let k = cur.len();
        if k == sets.len() {
            f(cur);
            return;
        }
        for &v in &sets[k] {
            cur.push(v);
            let ok = caps.iter().all(|(idx, cap)| {
                let assigned: i64 = idx.iter().filter(|&&i| i <= k).map(|&i| cur[i]).sum();
                // Later entries may be negative, so only prune when all are assigned.
                idx.iter().any(|&i| i > k) || assigned <= *cap
            });
            if ok {
                rec(sets, caps, cur, f);
            }
            cur.pop();
        }
    }
    rec(sets, caps, &mut Vec::with_capacity(sets.len()), f);
}

/// Enumerates pairing assignments for the template's new curve and keeps
/// those making the template a radical relation with positive integer
/// multiplicities and an allowed self-intersection.
pub fn solve_curve_intersections(
    lattice: &GramLattice,
    template: &RelationTemplate,
    constraints: &CurveConstraints,
) -> Result<CurveSolutions, LatticeError> {
    let n = lattice.len();
    if constraints.pairings.len() != n || template.fixed.len() != n {
        return Err(LatticeError::DimensionMismatch { expected: n, got: constraints.pairings.len() });
    }
    let points = constraints
        .pairings
        .iter()
        .fold(1u128, |acc, set| acc.saturating_mul(set.len() as u128));
    if points > SOLVE_BOX_LIMIT {
        return Err(LatticeError::BoxTooLarge { points, limit: SOLVE_BOX_LIMIT });
    }
    let g = lattice.gram();
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    // Fixed part paired with each basis class.
    let fixed_row: Vec<BigRational> = (0..n)
        .map(|k| template.fixed.iter().enumerate().map(|(j, c)| c * q(g[k][j])).sum())
        .collect();
    let u = &template.unknown;
    let allowed_self: BTreeSet<i64> = constraints.self_int.iter().copied().collect();
    let mut solutions = Vec::new();
    for_each_assignment(&constraints.pairings, &constraints.group_caps, &mut |x: &[i64]| {
        // Σ_i s_i G_ki a_i = -(fixed·G_k + m x_k) for every old class k.
        let rows: Vec<Vec<BigRational>> = (0..n)
            .map(|k| {
                let mut row: Vec<BigRational> = u.iter().map(|&(i, s)| q(s * g[k][i])).collect();
                row.push(-(&fixed_row[k] + &template.curve_coeff * q(x[k])));
                row
            })
            .collect();
        let Some(a) = unique_solution(rows, u.len()) else {
            return;
        };
        if a.iter().any(|v| !v.is_integer() || !v.is_positive()) {
            return;
        }
        // Pairing with the curve itself fixes its square.
        let mut rest: BigRational = template.fixed.iter().zip(x).map(|(c, &xj)| c * q(xj)).sum();
        for ((i, s), av) in u.iter().zip(&a) {
            rest += av * q(s * x[*i]);
        }
        let s = -rest / &template.curve_coeff;
        let Some(s) = s.is_integer().then(|| s.to_integer().to_i64()).flatten() else {
            return;
        };
        if !allowed_self.contains(&s) {
            return;
        }
        let mut v = template.fixed.clone();
        for ((i, sign), av) in u.iter().zip(&a) {
            v[*i] += av * q(*sign);
        }
        v.push(template.curve_coeff.clone());
        solutions.push(CurveSolution {
            pairings: x.to_vec(),
            self_int: s,
            multiplicities: a.iter().map(|v| v.to_integer()).collect(),
            relation: canonical_relation(&v, lattice.canonical_index()),
        });
    });
    if solutions.is_empty() {
        return Err(LatticeError::NoSolution);
    }
    let orbits = solution_orbits(lattice, template, &solutions);
    Ok(CurveSolutions { solutions, orbits })
}

/// The unique solution of `[A | b]` with `m` unknowns, if there is exactly one.
fn unique_solution(mut rows: Vec<Vec<BigRational>>, m: usize) -> Option<Vec<BigRational>> {
    use crate::exactla::ExactField;
    let pivots = Rationals.reduce_rows(&mut rows, m + 1);
    if pivots.len() != m || pivots.last() == Some(&m) {
        return None;
    }
    Some(rows.iter().map(|r| r[m].clone()).collect())
}

/// Permutations `σ` of the basis with `G[σi][σj] = G[i][j]`.
pub fn gram_automorphisms(lattice: &GramLattice) -> Vec<Vec<usize>> {
    let g = lattice.gram();
    let n = g.len();
    let mut out = Vec::new();
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(g: &[Vec<i64>], perm: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let k = perm.len();
        if k == g.len() {
            out.push(perm.clone());
            return;
        }
        for c in 0..g.len() {
            if used[c] || g[c][c] != g[k][k] {
                continue;
            }
            if (0..k).any(|j| g[perm[j]][c] != g[j][k]) {
                continue;
            }
            used[c] = true;
            perm.push(c);
            rec(g, perm, used, out);
            perm.pop();
            used[c] = false;
        }
    }
    rec(g, &mut perm, &mut used, &mut out);
    out
}

fn solution_orbits(lattice: &GramLattice, t: &RelationTemplate, sols: &[CurveSolution]) -> Vec<Vec<usize>> {
    let n = lattice.len();
    let sign_of = |i: usize| t.unknown.iter().find(|&&(j, _)| j == i).map(|&(_, s)| s);
    let symmetries: Vec<Vec<usize>> = gram_automorphisms(lattice)
        .into_iter()
        .filter(|s| (0..n).all(|i| t.fixed[s[i]] == t.fixed[i] && sign_of(s[i]) == sign_of(i)))
        .collect();
    let key = |s: &CurveSolution| {
        let mut mult = vec![BigInt::zero(); n];
        for ((i, _), a) in t.unknown.iter().zip(&s.multiplicities) {
            mult[*i] = a.clone();
        }
        (s.pairings.clone(), s.self_int, mult)
    };
    let index: BTreeMap<_, usize> = sols.iter().enumerate().map(|(i, s)| (key(s), i)).collect();
    let mut orbit_of = vec![usize::MAX; sols.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..sols.len() {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let (x, s, m) = key(&sols[i]);
        let mut members = BTreeSet::new();
        for sigma in &symmetries {
            let mut x2 = vec![0; n];
            let mut m2 = vec![BigInt::zero(); n];
            for k in 0..n {
                x2[sigma[k]] = x[k];
                m2[sigma[k]] = m[k].clone();
            }
            if let Some(&j) = index.get(&(x2, s, m2)) {
                members.insert(j);
            }
        }
        for &j in &members {
            orbit_of[j] = orbits.len();
        }
        orbits.push(members.into_iter().collect());
    }
    orbits
}

impl fmt::Display for GramLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Reduces a relation vector modulo the lattice radical test: `true` when
/// `v` pairs to zero with every class.
pub fn relation_holds(lattice: &GramLattice, v: &[BigInt]) -> Result<bool, LatticeError> {
    let q: Vec<BigRational> = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    lattice.in_radical(&q)
}

/// Greatest common divisor of a relation's entries.
pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |a, b| a.gcd(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn fixture_entries() {
        let l = godeaux_fixture();
        assert_eq!(l.entry("N3", "N4").unwrap(), 1);
        assert_eq!(l.entry("N5", "N6").unwrap(), 0);
        assert_eq!(l.entry("K", "K").unwrap(), 1);
        assert_eq!(l.rank(), 9);
        assert_eq!(l.determinant(), BigInt::from(64));
        assert!(l.radical().is_empty());
        let ns: Vec<String> = (1..=8).map(|i| format!("N{i}")).collect();
        let refs: Vec<&str> = ns.iter().map(String::as_str).collect();
        assert!(l.is_negative_definite_on(&refs).unwrap());
        assert_eq!(l.inertia(), Inertia { positive: 1, negative: 8, zero: 0 });
    }

    #[test]
    fn betti_numbers() {
        assert_eq!(b2(&SurfaceInvariants::from_chi(1, 1, 0)), 9);
        assert_eq!(b2(&SurfaceInvariants::from_chi(1, 8, 0)), 2);
        assert_eq!(b2(&SurfaceInvariants::from_chi(1, 2, 0)), 8);
        assert_eq!(b2(&SurfaceInvariants::from_chi(2, 2, 0)), 20);
        assert_eq!(SurfaceInvariants::new(1, 0, 0).chi, 1);
    }

    #[test]
    fn extension_radicals() {
        let l = godeaux_fixture();
        let c = l.extend_with_curve("C'", &C_PAIRINGS, 2).unwrap();
        assert_eq!(c.radical(), vec![ints(&[-2, 0, -1, -2, -3, -3, -2, -1, 8, -4])]);
        assert_eq!(
            c.format_relation(&c.radical()[0]),
            "8K = 4C' + 2N1 + N3 + 2N4 + 3N5 + 3N6 + 2N7 + N8"
        );
        let z = l.extend_with_curve("Z", &[0; 9], 0).unwrap();
        assert_eq!(z.rank(), 9);
        assert_eq!(z.radical(), vec![ints(&[0, 0, 0, 0, 0, 0, 0, 0, 0, 1])]);
        let mut krow = vec![0; 9];
        krow[8] = 1;
        let k2 = l.extend_with_curve("K2", &krow, 1).unwrap();
        assert_eq!(k2.radical(), vec![ints(&[0, 0, 0, 0, 0, 0, 0, 0, 1, -1])]);
    }

    #[test]
    fn pairings_in_extended_fixture() {
        let l = godeaux_extended();
        let k = l.class("K").unwrap();
        assert_eq!(l.pairing(&k, &k).unwrap(), rat(1, 1));
        assert_eq!(l.pairing(&l.class("C'").unwrap(), &l.class("D'").unwrap()).unwrap(), rat(3, 1));
        let l5 = l.parse_class("2K - C'").unwrap();
        assert_eq!(l.pairing(&l5, &l5).unwrap(), rat(-2, 1));
        assert_eq!(l.format_class(&l5), "2K - C'");
        assert!(matches!(
            l.pairing(&l5, &DivisorClass::zero(3)),
            Err(LatticeError::DimensionMismatch { .. })
        ));
        let second = l.parse_class("4K - 2D' - N1 - N2 - N6 - 2N7 - N8").unwrap();
        assert!(l.in_radical(&second.coeffs).unwrap());
    }

    #[test]
    fn class_parsing() {
        let l = godeaux_extended();
        let c = l.parse_class("1/2*N1 + 3 K - D'").unwrap();
        assert_eq!(c.coeffs[0], rat(1, 2));
        assert_eq!(c.coeffs[8], rat(3, 1));
        assert!(l.parse_class("2X").is_err());
        assert!(l.parse_class("K K").is_err());
        assert!(l.parse_class("").is_err());
    }

    #[test]
    fn lattice_file_round_trip() {
        let l = godeaux_fixture();
        assert_eq!(GramLattice::parse(&l.to_text()).unwrap(), l);
        assert!(GramLattice::parse("1 0\n0 1\n").is_err());
        assert!(matches!(
            GramLattice::parse("names: a b\n1 2\n3 1\n"),
            Err(LatticeError::NotSymmetric(1, 0))
        ));
    }

    #[test]
    fn search_finds_the_c_relation() {
        let l = godeaux_fixture();
        let mut b = SearchBounds::uniform(9, (0, 1));
        b.pairings[8] = (0, 4);
        b.self_int = (-2, 4);
        let found = search_relations(&l, &b, 1, 1_000_000).unwrap();
        let want = ints(&[-2, 0, -1, -2, -3, -3, -2, -1, 8, -4]);
        assert!(found.iter().any(|r| r.pairings == C_PAIRINGS && r.self_int == 2 && r.relation == want));
        let zero = search_relations(&l, &SearchBounds::uniform(9, (0, 0)), 1, 10).unwrap();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[0].relation, ints(&[0, 0, 0, 0, 0, 0, 0, 0, 0, 1]));
    }

    #[test]
    fn automorphisms_of_fixture() {
        assert_eq!(gram_automorphisms(&godeaux_fixture()).len(), 16);
    }

    fn chain_constraints(l: &GramLattice) -> CurveConstraints {
        CurveConstraints::parse(
            "N1 N2 N3 N4 N5 N6 N7 N8: 0,1\ncap 1: N3 N4 N5\ncap 1: N6 N7 N8\n",
            l,
        )
        .unwrap()
    }

    #[test]
    fn solve_d_template() {
        let l = godeaux_fixture();
        let t = RelationTemplate::parse("4K = 2D' + ?N1 + ?N2 + ?N6 + ?N7 + ?N8", &l).unwrap();
        let s = solve_curve_intersections(&l, &t, &chain_constraints(&l)).unwrap();
        assert!(s.is_unique());
        let sol = &s.solutions[0];
        assert_eq!(sol.multiplicities, ints(&[1, 1, 1, 2, 1]));
        assert_eq!(sol.pairings, vec![1, 1, 0, 0, 0, 0, 1, 0, 2]);
        assert_eq!(sol.self_int, 2);
    }

    #[test]
    fn solve_c_template_single_orbit() {
        let l = godeaux_fixture();
        let t = RelationTemplate::parse("8K = 4C' + ?N1 + ?N3 + ?N4 + ?N5 + ?N6 + ?N7 + ?N8", &l).unwrap();
        let s = solve_curve_intersections(&l, &t, &chain_constraints(&l)).unwrap();
        assert_eq!(s.orbits.len(), 1, "{:?}", s.solutions);
        assert_eq!(s.orbits[0].len(), s.solutions.len());
        let paper = ints(&[2, 1, 2, 3, 3, 2, 1]);
        let hit = s.solutions.iter().find(|x| x.multiplicities == paper).expect("expected vector");
        assert_eq!(hit.pairings, C_PAIRINGS.to_vec());
        assert_eq!(hit.self_int, 2);
    }

    #[test]
    fn inconsistent_template() {
        let l = godeaux_fixture();
        let t = RelationTemplate::parse("3K = 2D' + N1", &l).unwrap();
        let c = CurveConstraints::parse("N1 N2 N3 N4 N5 N6 N7 N8: 0,1\n", &l).unwrap();
        assert_eq!(solve_curve_intersections(&l, &t, &c), Err(LatticeError::NoSolution));
    }

    #[test]
    fn oversized_box_is_refused() {
        let l = godeaux_fixture();
        let t = RelationTemplate::parse("3K = 2D' + ?N1", &l).unwrap();
        let c = CurveConstraints::parse("", &l).unwrap();
        assert!(matches!(
            solve_curve_intersections(&l, &t, &c),
            Err(LatticeError::BoxTooLarge { points, .. }) if points == 11u128.pow(9)
        ));
    }

    #[test]
    fn template_errors() {
        let l = godeaux_fixture();
        assert!(RelationTemplate::parse("8K + ?N1", &l).is_err());
        assert!(RelationTemplate::parse("8K = ?N1", &l).is_err());
        assert!(RelationTemplate::parse("8K = 4C' + 2X", &l).is_err());
        assert!(RelationTemplate::parse("8K = 4C' - ?N1", &l).is_err());
    }
}
