//! Interpolation of hypersurfaces through point sets over a finite field.
//!
//! The evaluation matrix has one row per point and one column per monomial.
//! Rows are streamed into an incrementally reduced echelon basis so memory
//! stays at `columns²` regardless of the number of points.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::exactla::{span_basis, span_intersection, ExactField, Matrix, RowEchelon};
use crate::fields::{FieldCtx, FieldElement};
use crate::poly::{monomial_basis, DegreeMode, Monomial, MultiPoly};
use crate::ring::Ring;
use crate::rng::stream_rng;

pub const DEFAULT_COLUMN_CAP: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InterpError {
    #[error("{columns} monomials exceed the column cap of {cap}")]
    BudgetExceeded { columns: usize, cap: usize },
    #[error("need at least {needed} points, have {have}")]
    InsufficientPoints { needed: usize, have: usize },
    #[error("generator {generator} does not vanish at the point")]
    NotOnVariety { generator: usize },
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point coordinates do not belong to {0}")]
    ContextMismatch(String),
    #[error("slack must be at least 1")]
    ZeroSlack,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Points over one field, all with the same number of coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    ctx: FieldCtx,
    dim: usize,
    points: Vec<Vec<FieldElement>>,
}

impl PointSet {
    pub fn new(
        ctx: FieldCtx,
        dim: usize,
        points: Vec<Vec<FieldElement>>,
        dedup: bool,
    ) -> Result<Self, InterpError> {
        for p in &points {
            if p.len() != dim {
                return Err(InterpError::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|a| !ctx.owns(a)) {
                return Err(InterpError::ContextMismatch(format!("{ctx:?}")));
            }
        }
        let points = if dedup {
            let mut seen = BTreeSet::new();
            points
                .into_iter()
                .filter(|p| seen.insert(p.iter().map(FieldElement::index).collect::<Vec<_>>()))
                .collect()
        } else {
            points
        };
        Ok(PointSet { ctx, dim, points })
    }

    /// One point per nonblank line, coordinates separated by whitespace.
    pub fn parse(ctx: &FieldCtx, text: &str, dedup: bool) -> Result<Self, InterpError> {
        let mut points = Vec::new();
        let mut dim = None;
        for (i, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let pt = body
                .split_whitespace()
                .map(|tok| ctx.parse_elem(tok))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| InterpError::Parse { line: i + 1, msg: e.to_string() })?;
            match dim {
                None => dim = Some(pt.len()),
                Some(d) if d != pt.len() => {
                    return Err(InterpError::Parse {
                        line: i + 1,
                        msg: format!("expected {d} coordinates, found {}", pt.len()),
                    })
                }
                _ => {}
            }
            points.push(pt);
        }
        let dim = dim.ok_or(InterpError::EmptyPointSet)?;
        PointSet::new(ctx.clone(), dim, points, dedup)
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<FieldElement>] {
        &self.points
    }

    fn subset(&self, idx: &[usize]) -> PointSet {
        PointSet {
            ctx: self.ctx.clone(),
            dim: self.dim,
            points: idx.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }
}

/// The degree-`d` polynomials vanishing on a point set.
#[derive(Clone, Debug, PartialEq)]
pub struct VanishingSystem {
    pub ctx: FieldCtx,
    pub nvars: usize,
    pub degree: u32,
    pub homogeneous: bool,
    /// Column order: graded-lex, largest monomial first.
    pub monomials: Vec<Monomial>,
    /// RREF coefficient vectors, one per basis polynomial.
    pub basis: Vec<Vec<FieldElement>>,
}

impl VanishingSystem {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn polys(&self) -> Vec<MultiPoly<FieldCtx>> {
        self.basis.iter().map(|v| self.poly_of(v)).collect()
    }

    fn poly_of(&self, v: &[FieldElement]) -> MultiPoly<FieldCtx> {
        MultiPoly::from_terms(
            self.ctx.clone(),
            self.nvars,
            self.monomials.iter().cloned().zip(v.iter().copied()),
        )
    }

    /// Coefficient vector of `f` in this system's columns; `None` if `f`
    /// uses a monomial outside them.
    pub fn coefficients(&self, f: &MultiPoly<FieldCtx>) -> Option<Vec<FieldElement>> {
        let mut v = vec![self.ctx.zero(); self.monomials.len()];
        for (m, c) in f.terms() {
            let i = self.monomials.iter().position(|x| x == m)?;
            v[i] = *c;
        }
        Some(v)
    }

    /// True when `f` lies in the span of the basis.
    pub fn contains(&self, f: &MultiPoly<FieldCtx>) -> bool {
        let Some(v) = self.coefficients(f) else {
            return false;
        };
        let mut e = RowEchelon::new(self.ctx.clone(), self.monomials.len());
        for b in &self.basis {
            e.insert(b).expect("row length");
        }
        e.contains(&v)
    }

    /// True when the span of `self` lies inside the span of `other`.
    pub fn is_subspace_of(&self, other: &VanishingSystem) -> bool {
        self.monomials == other.monomials
            && crate::exactla::span_contains(&self.ctx, self.monomials.len(), &other.basis, &self.basis)
    }
}

fn columns(nvars: usize, degree: u32, homogeneous: bool, cap: usize) -> Result<Vec<Monomial>, InterpError> {
    let mode = if homogeneous { DegreeMode::Exactly } else { DegreeMode::AtMost };
    let count = binomial(nvars + degree as usize - usize::from(homogeneous), degree as usize);
    if count.is_none_or(|c| c > cap) {
        return Err(InterpError::BudgetExceeded { columns: count.unwrap_or(usize::MAX), cap });
    }
    let mut cols = monomial_basis(nvars, degree, mode);
    cols.reverse();
    Ok(cols)
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

fn eval_monomial(ctx: &FieldCtx, m: &Monomial, pt: &[FieldElement]) -> FieldElement {
    m.exps()
        .iter()
        .zip(pt)
        .filter(|(&e, _)| e > 0)
        .fold(ctx.one(), |acc, (&e, x)| ctx.mul(&acc, &ctx.pow(x, u64::from(e))))
}

/// Basis of the polynomials of the given degree vanishing at every point.
pub fn vanishing_system(
    pts: &PointSet,
    degree: u32,
    homogeneous: bool,
    column_cap: usize,
) -> Result<VanishingSystem, InterpError> {
    if pts.is_empty() {
        return Err(InterpError::EmptyPointSet);
    }
    let ctx = pts.ctx().clone();
    let monomials = columns(pts.dim(), degree, homogeneous, column_cap)?;
    let ncols = monomials.len();
    let mut ech = RowEchelon::new(ctx.clone(), ncols);
    for chunk in pts.points().chunks(256) {
        let rows: Vec<Vec<FieldElement>> = chunk
            .par_iter()
            .map(|p| monomials.iter().map(|m| eval_monomial(&ctx, m, p)).collect())
            .collect();
        for row in rows {
            ech.insert(&row).expect("row length");
        }
        if ech.rank() == ncols {
            break;
        }
    }
    let basis = span_basis(&ctx, ncols, &ech.nullspace());
    Ok(VanishingSystem {
        ctx,
        nvars: pts.dim(),
        degree,
        homogeneous,
        monomials,
        basis,
    })
}

/// Intersects the systems of `draws` random subsets of `|monomials| + slack`
/// points each. Every polynomial vanishing on the whole set survives.
pub fn oversampled_system(
    pts: &PointSet,
    degree: u32,
    homogeneous: bool,
    slack: usize,
    draws: usize,
    seed: u64,
    column_cap: usize,
) -> Result<VanishingSystem, InterpError> {
    if slack == 0 {
        return Err(InterpError::ZeroSlack);
    }
    let ncols = columns(pts.dim(), degree, homogeneous, column_cap)?.len();
    let needed = ncols + slack;
    if pts.len() < needed {
        return Err(InterpError::InsufficientPoints { needed, have: pts.len() });
    }
    let mut acc: Option<VanishingSystem> = None;
    for draw in 0..draws.max(1) {
        let mut rng = stream_rng(seed, draw as u64);
        let mut idx = rand::seq::index::sample(&mut rng, pts.len(), needed).into_vec();
        idx.sort_unstable();
        let sys = vanishing_system(&pts.subset(&idx), degree, homogeneous, column_cap)?;
        acc = Some(match acc {
            None => sys,
            Some(mut prev) => {
                prev.basis = span_intersection(&prev.ctx, ncols, &prev.basis, &sys.basis);
                prev
            }
        });
    }
    Ok(acc.expect("at least one draw"))
}

/// Ambient dimension minus the rank of the Jacobian of `gens` at `pt`.
pub fn tangent_dim<F: ExactField>(gens: &[MultiPoly<F>], pt: &[F::Elem]) -> Result<usize, InterpError> {
    let Some(first) = gens.first() else {
        return Ok(pt.len());
    };
    let field = first.ring();
    let n = first.nvars();
    if pt.len() != n {
        return Err(InterpError::DimensionMismatch { expected: n, got: pt.len() });
    }
    let mut rows = Vec::with_capacity(gens.len());
    for (i, g) in gens.iter().enumerate() {
        if !field.is_zero(&g.eval(pt)) {
            return Err(InterpError::NotOnVariety { generator: i });
        }
        rows.push(g.gradient().iter().map(|d| d.eval(pt)).collect::<Vec<_>>());
    }
    let jac = Matrix::from_rows(field.clone(), n, rows).expect("rectangular");
    Ok(n - jac.rank())
}

/// Keeps the points whose tangent space has positive dimension.
pub fn filter_isolated(pts: &PointSet, gens: &[MultiPoly<FieldCtx>]) -> Result<PointSet, InterpError> {
    let keep = pts
        .points()
        .par_iter()
        .map(|p| tangent_dim(gens, p).map(|d| d >= 1))
        .collect::<Result<Vec<_>, _>>()?;
    let points = pts
        .points()
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(p, _)| p.clone())
        .collect();
    Ok(PointSet { ctx: pts.ctx().clone(), dim: pts.dim(), points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, VarNames};

    fn gf(p: u64) -> FieldCtx {
        FieldCtx::new(p, 1).unwrap()
    }

    fn poly_over(ctx: &FieldCtx, text: &str, n: usize) -> MultiPoly<FieldCtx> {
        parse_poly(text, &VarNames::xs(n))
            .unwrap()
            .map_ring(ctx, |c| ctx.from_ratio(c.numer(), c.denom()).unwrap())
    }

    fn points(ctx: &FieldCtx, v: &[&[i64]]) -> PointSet {
        let pts = v.iter().map(|p| p.iter().map(|&x| ctx.from_i64(x)).collect()).collect();
        PointSet::new(ctx.clone(), v[0].len(), pts, true).unwrap()
    }

    fn conic_points(ctx: &FieldCtx) -> PointSet {
        // (1 : s : -1/s) and (0 : 0 : 1), (0 : 1 : 0) on x0² + x1x2 = 0.
        let mut pts: Vec<Vec<FieldElement>> = Vec::new();
        for s in 1..ctx.order() {
            let s = ctx.from_index(s);
            let t = ctx.neg(&ctx.try_inv(&s).unwrap());
            pts.push(vec![ctx.one(), s, t]);
        }
        pts.push(vec![ctx.zero(), ctx.zero(), ctx.one()]);
        pts.push(vec![ctx.zero(), ctx.one(), ctx.zero()]);
        PointSet::new(ctx.clone(), 3, pts, true).unwrap()
    }

    #[test]
    fn conic_through_its_points() {
        let f7 = gf(7);
        let pts = conic_points(&f7);
        assert_eq!(pts.len(), 8);
        let sys = vanishing_system(&pts, 2, true, DEFAULT_COLUMN_CAP).unwrap();
        assert_eq!(sys.dim(), 1);
        assert_eq!(sys.polys()[0], poly_over(&f7, "x0^2 + x1*x2", 3));
        let over = oversampled_system(&pts, 2, true, 2, 3, 1, DEFAULT_COLUMN_CAP).unwrap();
        assert_eq!(over.basis, sys.basis);
    }

    #[test]
    fn five_general_points_give_one_conic() {
        let f11 = gf(11);
        let pts = points(&f11, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1], &[1, 2, 3]]);
        let sys = vanishing_system(&pts, 2, true, DEFAULT_COLUMN_CAP).unwrap();
        assert_eq!(sys.dim(), 1);
        for f in sys.polys() {
            for p in pts.points() {
                assert!(f11.is_zero(&f.eval(p)));
            }
        }
    }

    #[test]
    fn affine_degree_one_cases() {
        let f11 = gf(11);
        let pts = points(&f11, &[&[0, 0], &[1, 0], &[0, 1]]);
        assert_eq!(vanishing_system(&pts, 1, false, DEFAULT_COLUMN_CAP).unwrap().dim(), 0);
        let same = PointSet::new(f11.clone(), 3, vec![vec![f11.from_i64(2); 3]; 6], false).unwrap();
        let sys = oversampled_system(&same, 1, false, 1, 2, 0, DEFAULT_COLUMN_CAP).unwrap();
        assert_eq!(sys.dim(), 3);
        assert!(matches!(
            oversampled_system(&pts, 1, false, 2, 1, 0, DEFAULT_COLUMN_CAP),
            Err(InterpError::InsufficientPoints { needed: 5, have: 3 })
        ));
        assert!(matches!(
            vanishing_system(&pts, 3, false, 5),
            Err(InterpError::BudgetExceeded { columns: 10, cap: 5 })
        ));
    }

    #[test]
    fn tangent_dimensions() {
        let q = gf(101);
        let zero = vec![q.zero(); 2];
        assert_eq!(tangent_dim(&[poly_over(&q, "x1 - x0^2", 2)], &zero).unwrap(), 1);
        assert_eq!(tangent_dim(&[poly_over(&q, "x1^2 - x0^3 - x0^2", 2)], &zero).unwrap(), 2);
        let lines = [poly_over(&q, "x0 + 2*x1", 2), poly_over(&q, "3*x0 - x1", 2)];
        assert_eq!(tangent_dim(&lines, &zero).unwrap(), 0);
        let one = vec![q.one(); 2];
        assert_eq!(
            tangent_dim(&[poly_over(&q, "x0", 2)], &one),
            Err(InterpError::NotOnVariety { generator: 0 })
        );
    }

    #[test]
    fn line_plus_isolated_point() {
        let q = gf(101);
        // x0 = 0 union the point (5, 7): ideal (x0*(x0-5), x0*(x1-7)).
        let gens = [poly_over(&q, "x0^2 - 5*x0", 2), poly_over(&q, "x0*x1 - 7*x0", 2)];
        let pts = points(&q, &[&[0, 1], &[0, 7], &[5, 7], &[0, 50]]);
        let kept = filter_isolated(&pts, &gens).unwrap();
        assert_eq!(kept.len(), 3);
        assert!(!kept.points().contains(&vec![q.from_i64(5), q.from_i64(7)]));
        let empty = PointSet::new(q.clone(), 2, vec![], false).unwrap();
        assert!(filter_isolated(&empty, &gens).unwrap().is_empty());
    }

    #[test]
    fn points_file() {
        let f = FieldCtx::new(5, 2).unwrap();
        let pts = PointSet::parse(&f, "# pts\n1 t+3\n2 3*t\n1 t+3\n", true).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(matches!(PointSet::parse(&f, "1 2\n3\n", true), Err(InterpError::Parse { line: 2, .. })));
    }
}
