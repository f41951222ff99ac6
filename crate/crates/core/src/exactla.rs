//! Dense exact linear algebra over finite fields and ℚ.
//!
//! Finite fields use plain Gaussian elimination. Over ℚ the forward pass is
//! fraction-free (Bareiss) on rows cleared to integers, which keeps entries
//! bounded by minors of the input until the final normalization.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::fields::FieldCtx;
use crate::ring::{Field, Integers, Rationals, Ring};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A dense row-major matrix over a coefficient domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<R: Ring> {
    ring: R,
    rows: usize,
    cols: usize,
    data: Vec<R::Elem>,
}

impl<R: Ring> Matrix<R> {
    pub fn zeros(ring: R, rows: usize, cols: usize) -> Self {
        let data = vec![ring.zero(); rows * cols];
        Matrix { ring, rows, cols, data }
    }

    pub fn identity(ring: R, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = m.ring.one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(ring: R, cols: usize, rows: Vec<Vec<R::Elem>>) -> Result<Self, LinAlgError> {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinAlgError::DimensionMismatch { expected: cols, got: r.len() });
            }
            data.extend(r);
        }
        Ok(Matrix { ring, rows: nrows, cols, data })
    }

    pub fn from_i64(ring: R, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data: Vec<R::Elem> = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged rows");
                r.iter().map(|&v| ring.from_i64(v)).collect::<Vec<_>>()
            })
            .collect();
        Matrix { ring, rows: rows.len(), cols, data }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &R::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[R::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<R::Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ring.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[R::Elem]) -> Result<Vec<R::Elem>, LinAlgError> {
        if v.len() != self.cols {
            return Err(LinAlgError::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows).map(|i| dot(&self.ring, self.row(i), v)).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let r = &self.ring;
        let mut out = Self::zeros(r.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if r.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = r.add(&out.data[idx], &r.mul(a, other.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    /// Symmetric submatrix on the given index set.
    pub fn principal(&self, idx: &[usize]) -> Self {
        let rows = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| self.get(i, j).clone()).collect())
            .collect();
        Self::from_rows(self.ring.clone(), idx.len(), rows).expect("square selection")
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

pub fn dot<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> R::Elem {
    a.iter()
        .zip(b)
        .fold(ring.zero(), |acc, (x, y)| ring.add(&acc, &ring.mul(x, y)))
}

impl<R: Ring> fmt::Display for Matrix<R> {
    /// One row per line, entries separated by single spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(" ")?;
                }
                self.ring.fmt_elem(self.get(i, j), f)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Result of reducing a matrix to reduced row-echelon form.
#[derive(Clone, Debug, PartialEq)]
pub struct Rref<R: Ring> {
    pub matrix: Matrix<R>,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

/// Fields with an exact elimination routine.
pub trait ExactField: Field + Determinant {
    /// Reduces `rows` (each of length `cols`) in place to RREF, dropping zero
    /// rows, and returns the pivot columns.
    fn reduce_rows(&self, rows: &mut Vec<Vec<Self::Elem>>, cols: usize) -> Vec<usize> {
        gauss_rref(self, rows, cols)
    }
}

impl ExactField for FieldCtx {}

impl ExactField for Rationals {
    fn reduce_rows(&self, rows: &mut Vec<Vec<BigRational>>, cols: usize) -> Vec<usize> {
        bareiss_rref(rows, cols)
    }
}

fn gauss_rref<F: Field + ?Sized>(f: &F, rows: &mut Vec<Vec<F::Elem>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !f.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, p);
        let inv = f.inv(&rows[r][c]).expect("nonzero pivot");
        for x in rows[r][c..].iter_mut() {
            *x = f.mul(x, &inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || f.is_zero(&row[c]) {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x = f.sub(x, &f.mul(&factor, y));
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Clears denominators of a rational row, returning an integer row.
fn integer_row(row: &[BigRational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

/// Fraction-free forward elimination over ℤ followed by exact back substitution.
fn bareiss_rref(rows: &mut Vec<Vec<BigRational>>, cols: usize) -> Vec<usize> {
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| integer_row(r)).collect();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let pr = &head[r];
        for row in tail.iter_mut() {
            for j in c + 1..cols {
                let v = &pr[c] * &row[j] - &row[c] * &pr[j];
                debug_assert!((&v % &prev).is_zero());
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    let mut out: Vec<Vec<BigRational>> = a
        .into_iter()
        .map(|row| row.into_iter().map(BigRational::from_integer).collect())
        .collect();
    for (i, &c) in pivots.iter().enumerate().rev() {
        let inv = out[i][c].recip();
        for x in out[i][c..].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = out[i].clone();
        for row in out[..i].iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x = &*x - &factor * y;
            }
        }
    }
    *rows = out;
    pivots
}

impl<F: ExactField> Matrix<F> {
    pub fn rref(&self) -> Rref<F> {
        let mut rows = self.row_vecs();
        let pivots = self.ring.reduce_rows(&mut rows, self.cols);
        let rank = pivots.len();
        let mut matrix = Matrix::zeros(self.ring.clone(), self.rows, self.cols);
        for (i, row) in rows.into_iter().enumerate() {
            matrix.data[i * self.cols..(i + 1) * self.cols].clone_from_slice(&row);
        }
        Rref { matrix, pivots, rank }
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.row_vecs();
        self.ring.reduce_rows(&mut rows, self.cols).len()
    }

    /// Basis of the right kernel `{v : A v = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<F::Elem>> {
        let mut rows = self.row_vecs();
        let pivots = self.ring.reduce_rows(&mut rows, self.cols);
        kernel_from_rref(&self.ring, &rows, &pivots, self.cols)
    }

    pub fn determinant(&self) -> Result<F::Elem, LinAlgError> {
        if self.rows != self.cols {
            return Err(LinAlgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(self.ring.det_square(self))
    }
}

/// Kernel basis from an RREF with the given pivots.
pub fn kernel_from_rref<F: Field>(
    f: &F,
    rref_rows: &[Vec<F::Elem>],
    pivots: &[usize],
    cols: usize,
) -> Vec<Vec<F::Elem>> {
    let mut is_pivot = vec![false; cols];
    for &c in pivots {
        is_pivot[c] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![f.zero(); cols];
            v[free] = f.one();
            for (row, &pc) in rref_rows.iter().zip(pivots) {
                v[pc] = f.neg(&row[free]);
            }
            v
        })
        .collect()
}

/// Determinant routines per field.
pub trait Determinant: Ring {
    fn det_square(&self, m: &Matrix<Self>) -> Self::Elem;
}

impl Determinant for FieldCtx {
    fn det_square(&self, m: &Matrix<Self>) -> Self::Elem {
        let n = m.rows;
        let mut a = m.row_vecs();
        let mut det = self.one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !self.is_zero(&a[i][c])) else {
                return self.zero();
            };
            if p != c {
                a.swap(p, c);
                det = self.neg(&det);
            }
            det = self.mul(&det, &a[c][c]);
            let inv = self.inv(&a[c][c]).expect("nonzero pivot");
            for i in c + 1..n {
                if self.is_zero(&a[i][c]) {
                    continue;
                }
                let factor = self.mul(&a[i][c], &inv);
                for j in c..n {
                    let t = self.mul(&factor, &a[c][j]);
                    a[i][j] = self.sub(&a[i][j], &t);
                }
            }
        }
        det
    }
}

impl Determinant for Rationals {
    fn det_square(&self, m: &Matrix<Self>) -> BigRational {
        let mut scale = BigInt::one();
        let a: Vec<Vec<BigInt>> = m
            .row_vecs()
            .iter()
            .map(|row| {
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                scale *= &l;
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect();
        BigRational::new(bareiss_det(a), scale)
    }
}

impl Determinant for Integers {
    fn det_square(&self, m: &Matrix<Self>) -> BigInt {
        bareiss_det(m.row_vecs())
    }
}

impl Matrix<Integers> {
    pub fn determinant_int(&self) -> Result<BigInt, LinAlgError> {
        if self.rows != self.cols {
            return Err(LinAlgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(Integers.det_square(self))
    }

    pub fn to_rationals(&self) -> Matrix<Rationals> {
        Matrix {
            ring: Rationals,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        }
    }
}

fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

impl Matrix<Rationals> {
    /// Kernel basis as primitive integer vectors whose first nonzero entry is positive.
    pub fn primitive_nullspace(&self) -> Vec<Vec<BigInt>> {
        self.nullspace().iter().map(|v| primitive_integer_vector(v)).collect()
    }

    /// Counts of positive, negative and zero eigenvalues, for symmetric matrices.
    pub fn inertia(&self) -> Result<Inertia, LinAlgError> {
        if self.rows != self.cols {
            return Err(LinAlgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(symmetric_inertia(self.row_vecs()))
    }

    /// All leading principal minors of `-A` are positive.
    pub fn is_negative_definite(&self) -> bool {
        let neg = Matrix {
            ring: Rationals,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        };
        self.rows == self.cols
            && (1..=self.rows).all(|k| {
                let idx: Vec<usize> = (0..k).collect();
                neg.principal(&idx).determinant().expect("square").is_positive()
            })
    }
}

/// Scales a rational vector to a primitive integer vector with positive leading entry.
pub fn primitive_integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    let mut ints = integer_row(v);
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() {
        for x in ints.iter_mut() {
            *x = &*x / &g;
        }
    }
    if ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in ints.iter_mut() {
            *x = -&*x;
        }
    }
    ints
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// Congruence diagonalization; Sylvester's law makes the sign counts invariant.
fn symmetric_inertia(mut a: Vec<Vec<BigRational>>) -> Inertia {
    let n = a.len();
    let mut out = Inertia { positive: 0, negative: 0, zero: 0 };
    let mut active: Vec<usize> = (0..n).collect();
    while let Some(&first) = active.first() {
        let pivot = active.iter().copied().find(|&i| !a[i][i].is_zero());
        let k = match pivot {
            Some(k) => k,
            None => {
                let pair = active.iter().find_map(|&i| {
                    active.iter().find(|&&j| j != i && !a[i][j].is_zero()).map(|&j| (i, j))
                });
                let Some((i, j)) = pair else {
                    out.zero += active.len();
                    break;
                };
                // Replace e_i by e_i + e_j: the new diagonal entry is 2 a_ij.
                for t in 0..n {
                    let v = a[j][t].clone();
                    a[i][t] += v;
                }
                for t in 0..n {
                    let v = a[t][j].clone();
                    a[t][i] += v;
                }
                i
            }
        };
        let _ = first;
        let d = a[k][k].clone();
        if d.is_positive() {
            out.positive += 1;
        } else {
            out.negative += 1;
        }
        active.retain(|&i| i != k);
        for &i in &active {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] / &d;
            for &j in &active {
                let v = &factor * &a[k][j];
                a[i][j] -= v;
            }
        }
    }
    out
}

/// A basis kept in reduced row-echelon form, grown one row at a time.
#[derive(Clone, Debug)]
pub struct RowEchelon<F: ExactField> {
    field: F,
    cols: usize,
    rows: Vec<Vec<F::Elem>>,
    pivots: Vec<usize>,
}

impl<F: ExactField> RowEchelon<F> {
    pub fn new(field: F, cols: usize) -> Self {
        RowEchelon { field, cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<F::Elem>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn reduce(&self, row: &mut [F::Elem]) {
        let f = &self.field;
        for (b, &c) in self.rows.iter().zip(&self.pivots) {
            if f.is_zero(&row[c]) {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row.iter_mut().zip(b) {
                *x = f.sub(x, &f.mul(&factor, y));
            }
        }
    }

    pub fn contains(&self, row: &[F::Elem]) -> bool {
        let mut r = row.to_vec();
        self.reduce(&mut r);
        r.iter().all(|x| self.field.is_zero(x))
    }

    /// Adds a row; returns false when it was already in the span.
    pub fn insert(&mut self, row: &[F::Elem]) -> Result<bool, LinAlgError> {
        if row.len() != self.cols {
            return Err(LinAlgError::DimensionMismatch { expected: self.cols, got: row.len() });
        }
        let f = self.field.clone();
        let mut r = row.to_vec();
        self.reduce(&mut r);
        let Some(c) = r.iter().position(|x| !f.is_zero(x)) else {
            return Ok(false);
        };
        let inv = f.inv(&r[c]).expect("nonzero");
        for x in r.iter_mut() {
            *x = f.mul(x, &inv);
        }
        for b in self.rows.iter_mut() {
            if f.is_zero(&b[c]) {
                continue;
            }
            let factor = b[c].clone();
            for (x, y) in b.iter_mut().zip(&r) {
                *x = f.sub(x, &f.mul(&factor, y));
            }
        }
        let at = self.pivots.partition_point(|&p| p < c);
        self.pivots.insert(at, c);
        self.rows.insert(at, r);
        Ok(true)
    }

    pub fn nullspace(&self) -> Vec<Vec<F::Elem>> {
        kernel_from_rref(&self.field, &self.rows, &self.pivots, self.cols)
    }
}

/// RREF basis of a row space.
pub fn span_basis<F: ExactField>(f: &F, cols: usize, vectors: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    let mut rows = vectors.to_vec();
    f.reduce_rows(&mut rows, cols);
    rows
}

/// True when every vector of `sub` lies in the span of `sup`.
pub fn span_contains<F: ExactField>(
    f: &F,
    cols: usize,
    sup: &[Vec<F::Elem>],
    sub: &[Vec<F::Elem>],
) -> bool {
    let mut e = RowEchelon::new(f.clone(), cols);
    for v in sup {
        e.insert(v).expect("row length");
    }
    sub.iter().all(|v| e.contains(v))
}

/// RREF basis of the intersection of two row spaces.
pub fn span_intersection<F: ExactField>(
    f: &F,
    cols: usize,
    a: &[Vec<F::Elem>],
    b: &[Vec<F::Elem>],
) -> Vec<Vec<F::Elem>> {
    let a = span_basis(f, cols, a);
    let b = span_basis(f, cols, b);
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // Solve x·A = y·B through the kernel of [Aᵀ | -Bᵀ].
    let na = a.len();
    let mut m = Matrix::zeros(f.clone(), cols, na + b.len());
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            m.set(j, i, x.clone());
        }
    }
    for (i, row) in b.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            m.set(j, na + i, f.neg(x));
        }
    }
    let vecs: Vec<Vec<F::Elem>> = m
        .nullspace()
        .into_iter()
        .map(|z| {
            (0..cols)
                .map(|j| {
                    a.iter()
                        .zip(&z[..na])
                        .fold(f.zero(), |acc, (row, c)| f.add(&acc, &f.mul(c, &row[j])))
                })
                .collect()
        })
        .collect();
    span_basis(f, cols, &vecs)
}

/// Parses the matrix text format: one row per line, entries separated by
/// whitespace or commas, optional `[`/`]` brackets, `#` comments.
pub fn parse_matrix(text: &str) -> Result<Matrix<Rationals>, LinAlgError> {
    let mut rows = Vec::new();
    let mut cols = None;
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let cleaned: String = body
            .chars()
            .map(|c| if matches!(c, '[' | ']' | ',') { ' ' } else { c })
            .collect();
        if cleaned.trim().is_empty() {
            continue;
        }
        let row = cleaned
            .split_whitespace()
            .map(|tok| parse_rational(tok).map_err(|msg| LinAlgError::Parse { line: i + 1, msg }))
            .collect::<Result<Vec<_>, _>>()?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(LinAlgError::Parse {
                    line: i + 1,
                    msg: format!("expected {c} entries, found {}", row.len()),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    Matrix::from_rows(Rationals, cols.unwrap_or(0), rows)
}

/// Parses `n` or `n/d`.
pub fn parse_rational(tok: &str) -> Result<BigRational, String> {
    let bad = || format!("not a rational number: {tok:?}");
    match tok.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(format!("zero denominator in {tok:?}"));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(tok.parse().map_err(|_| bad())?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn q(rows: &[Vec<i64>]) -> Matrix<Rationals> {
        Matrix::from_i64(Rationals, rows)
    }

    #[test]
    fn rref_small_cases() {
        let id = q(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let r = id.rref();
        assert_eq!(r.rank, 3);
        assert_eq!(r.matrix, id);
        let m = q(&[vec![1, 2], vec![2, 4]]);
        let r = m.rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.matrix, q(&[vec![1, 2], vec![0, 0]]));
        assert_eq!(r.pivots, vec![0]);
    }

    #[test]
    fn nullspace_primitive_and_signed() {
        let m = q(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(m.primitive_nullspace(), vec![vec![BigInt::from(2), BigInt::from(-1)]]);
        assert!(q(&[vec![2, 1], vec![1, 1]]).nullspace().is_empty());
    }

    #[test]
    fn determinants() {
        let a3 = q(&[vec![-2, 1, 0], vec![1, -2, 1], vec![0, 1, -2]]);
        assert_eq!(a3.determinant().unwrap(), rat(-4, 1));
        assert_eq!(q(&[vec![1, 0], vec![0, 1]]).determinant().unwrap(), rat(1, 1));
        assert!(matches!(q(&[vec![1, 2]]).determinant(), Err(LinAlgError::NotSquare { .. })));
        let m = Matrix::from_rows(Rationals, 2, vec![vec![rat(1, 2), rat(1, 3)], vec![rat(1, 4), rat(1, 5)]])
            .unwrap();
        assert_eq!(m.determinant().unwrap(), rat(1, 10) - rat(1, 12));
        let f7 = FieldCtx::new(7, 1).unwrap();
        let m7 = Matrix::from_i64(f7.clone(), &[vec![0, 1], vec![1, 0]]);
        assert_eq!(m7.determinant().unwrap(), f7.from_i64(-1));
    }

    #[test]
    fn rref_with_zero_pivot_swap() {
        let m = q(&[vec![0, 0, 3], vec![0, 2, 1], vec![4, 0, 0]]);
        let r = m.rref();
        assert_eq!(r.rank, 3);
        assert_eq!(r.pivots, vec![0, 1, 2]);
    }

    #[test]
    fn inertia_counts() {
        let m = q(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(m.inertia().unwrap(), Inertia { positive: 1, negative: 1, zero: 0 });
        let m = q(&[vec![1, 1], vec![1, 1]]);
        assert_eq!(m.inertia().unwrap(), Inertia { positive: 1, negative: 0, zero: 1 });
        assert!(q(&[vec![-2, 1], vec![1, -2]]).is_negative_definite());
        assert!(!q(&[vec![-2, 2], vec![2, -2]]).is_negative_definite());
    }

    #[test]
    fn row_echelon_incremental() {
        let f = FieldCtx::new(11, 1).unwrap();
        let mut e = RowEchelon::new(f.clone(), 3);
        let v = |a: i64, b: i64, c: i64| vec![f.from_i64(a), f.from_i64(b), f.from_i64(c)];
        assert!(e.insert(&v(0, 1, 2)).unwrap());
        assert!(e.insert(&v(1, 1, 1)).unwrap());
        assert!(!e.insert(&v(1, 2, 3)).unwrap());
        assert_eq!(e.rank(), 2);
        assert_eq!(e.pivots(), &[0, 1]);
        let ker = e.nullspace();
        assert_eq!(ker.len(), 1);
        assert!(f.is_zero(&dot(&f, &ker[0], &v(0, 1, 2))));
    }

    #[test]
    fn intersection_of_planes() {
        let a = vec![vec![rat(1, 1), rat(0, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1), rat(0, 1)]];
        let b = vec![vec![rat(0, 1), rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(0, 1), rat(1, 1)]];
        let i = span_intersection(&Rationals, 3, &a, &b);
        assert_eq!(i, vec![vec![rat(0, 1), rat(1, 1), rat(0, 1)]]);
        assert!(span_contains(&Rationals, 3, &a, &i));
    }

    #[test]
    fn text_format_round_trip() {
        let m = parse_matrix("[ -2 1 0 ]\n[1, -2, 1/2]\n# c\n").unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(*m.get(1, 2), rat(1, 2));
        assert_eq!(parse_matrix(&m.to_string()).unwrap(), m);
        assert!(matches!(parse_matrix("1 2\n3\n"), Err(LinAlgError::Parse { line: 2, .. })));
    }
}
