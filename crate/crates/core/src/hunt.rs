//! Singular members of hypersurface families over finite fields.
//!
//! A member is singular when `f` and every `∂f/∂x_i` vanish at some point of
//! projective space. Points are classified by the corank of the Hessian and
//! the Tjurina number, computed as the colength of `(g, ∂g) + m^D` in the
//! truncated polynomial ring of an affine chart.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::exactla::{kernel_from_rref, ExactField, Matrix, RowEchelon};
use crate::fields::{FieldCtx, FieldElement};
use crate::poly::{monomial_basis, DegreeMode, MultiPoly, ParametricFamily, PolyError};
use crate::ring::Ring;
use crate::rng::stream_rng;

pub const DEFAULT_BUDGET: u64 = 2_000_000;
pub const DEFAULT_DEGREE_CAP: u32 = 8;
/// Parameter spaces up to this size are sampled without replacement.
pub const EXHAUSTIVE_SAMPLING_LIMIT: u128 = 1_000_000;
pub const DEFAULT_SOLUTION_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HuntError {
    #[error("projective space has {points} points, above the budget of {budget}")]
    BudgetExceeded { points: u128, budget: u64 },
    #[error("polynomial is not homogeneous in the x variables")]
    NotHomogeneous,
    #[error("solve-at-point needs a family that is linear in its parameters")]
    NotLinearInParams,
    #[error("the point is not a singular point")]
    NotSingular,
    #[error("the number of trials must be at least 1")]
    NoTrials,
    #[error("degree cap must be at least 2, got {0}")]
    BadDegreeCap(u32),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PointLabel {
    /// `A_k` with `k >= 1`.
    A(u32),
    Unclassified(String),
    NotComputed,
}

impl fmt::Display for PointLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointLabel::A(k) => write!(f, "A{k}"),
            PointLabel::Unclassified(why) => write!(f, "unclassified ({why})"),
            PointLabel::NotComputed => f.write_str("?"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularPoint<E> {
    pub coords: Vec<E>,
    pub label: PointLabel,
    pub corank: Option<usize>,
    pub tjurina: Option<u32>,
}

impl<E> SingularPoint<E> {
    fn unlabeled(coords: Vec<E>) -> Self {
        SingularPoint { coords, label: PointLabel::NotComputed, corank: None, tjurina: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularMember {
    pub params: Vec<FieldElement>,
    pub points: Vec<SingularPoint<FieldElement>>,
}

impl SingularMember {
    pub fn signature(&self) -> Signature {
        signature(&self.points)
    }
}

/// Multiset of point labels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    /// `k -> number of A_k points`.
    pub counts: BTreeMap<u32, usize>,
    /// Points without an `A_k` label.
    pub unlabeled: usize,
}

impl Signature {
    pub fn has_unlabeled(&self) -> bool {
        self.unlabeled > 0
    }
}

impl fmt::Display for Signature {
    /// `2A1+2A3`; unlabeled points are appended as `n?`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.counts.iter().map(|(k, n)| format!("{n}A{k}")).collect();
        if self.unlabeled > 0 {
            parts.push(format!("{}?", self.unlabeled));
        }
        if parts.is_empty() {
            f.write_str("smooth")
        } else {
            f.write_str(&parts.join("+"))
        }
    }
}

pub fn signature<E>(points: &[SingularPoint<E>]) -> Signature {
    let mut sig = Signature::default();
    for p in points {
        match p.label {
            PointLabel::A(k) => *sig.counts.entry(k).or_default() += 1,
            _ => sig.unlabeled += 1,
        }
    }
    sig
}

/// Canonical representative of the `index`-th point of `P^{n-1}(F_q)`:
/// the first nonzero coordinate is 1 and later coordinates are base-`q` digits.
fn projective_point(ctx: &FieldCtx, n: usize, mut index: u128) -> Vec<FieldElement> {
    let q = u128::from(ctx.order());
    let mut lead = 0;
    loop {
        let block = q.pow((n - 1 - lead) as u32);
        if index < block {
            break;
        }
        index -= block;
        lead += 1;
    }
    let mut coords = vec![ctx.zero(); n];
    coords[lead] = ctx.one();
    for j in (lead + 1..n).rev() {
        coords[j] = ctx.from_index((index % q) as u64);
        index /= q;
    }
    coords
}

fn projective_size(ctx: &FieldCtx, n: usize) -> u128 {
    let q = u128::from(ctx.order());
    (0..n as u32).map(|i| q.saturating_pow(i)).fold(0u128, u128::saturating_add)
}

/// Scales a nonzero vector so its first nonzero coordinate is 1.
pub fn normalize_projective<F: crate::ring::Field>(f: &F, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let lead = v.iter().find(|x| !f.is_zero(x))?;
    let inv = f.inv(lead)?;
    Some(v.iter().map(|x| f.mul(x, &inv)).collect())
}

/// All points of projective space where `f` and its partials vanish, in
/// canonical form and enumeration order.
pub fn singular_points(
    f: &MultiPoly<FieldCtx>,
    budget: u64,
) -> Result<Vec<Vec<FieldElement>>, HuntError> {
    if !f.is_zero() && f.homogeneous_degree().is_none() {
        return Err(HuntError::NotHomogeneous);
    }
    let ctx = f.ring();
    let n = f.nvars();
    if n == 0 {
        return Ok(Vec::new());
    }
    let total = projective_size(ctx, n);
    if total > u128::from(budget) {
        return Err(HuntError::BudgetExceeded { points: total, budget });
    }
    let grad = f.gradient();
    let mut out = Vec::new();
    for idx in 0..total {
        let pt = projective_point(ctx, n, idx);
        if is_singular_at(f, &grad, &pt) {
            out.push(pt);
        }
    }
    Ok(out)
}

fn is_singular_at<R: Ring>(f: &MultiPoly<R>, grad: &[MultiPoly<R>], pt: &[R::Elem]) -> bool {
    let r = f.ring();
    r.is_zero(&f.eval(pt)) && grad.iter().all(|g| r.is_zero(&g.eval(pt)))
}

/// Local data of an isolated singularity at the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GermInfo {
    pub corank: Option<usize>,
    pub tjurina: Option<u32>,
    pub label: PointLabel,
}

/// Classifies the germ of `g` at the origin of affine space.
pub fn classify_germ<F: ExactField>(g: &MultiPoly<F>, degree_cap: u32) -> Result<GermInfo, HuntError> {
    if degree_cap < 2 {
        return Err(HuntError::BadDegreeCap(degree_cap));
    }
    if g.terms().any(|(m, _)| m.degree() <= 1) {
        return Err(HuntError::NotSingular);
    }
    let field = g.ring();
    let p = field.characteristic();
    let deg = g.total_degree().unwrap_or(0);
    if p != 0 && p <= u64::from(deg) {
        return Ok(GermInfo {
            corank: None,
            tjurina: None,
            label: PointLabel::Unclassified(format!(
                "characteristic {p} does not exceed degree {deg}"
            )),
        });
    }
    let m = g.nvars();
    let corank = m - hessian_at_origin(g).rank();
    let mut gens = vec![g.clone()];
    gens.extend(g.gradient());
    let lower = truncated_colength(&gens, m, degree_cap - 1);
    let upper = truncated_colength(&gens, m, degree_cap);
    if lower != upper {
        return Ok(GermInfo {
            corank: Some(corank),
            tjurina: None,
            label: PointLabel::Unclassified(format!(
                "Tjurina number not stable at degree cap {degree_cap}"
            )),
        });
    }
    let tau = upper as u32;
    let label = if corank <= 1 {
        PointLabel::A(tau)
    } else {
        PointLabel::Unclassified(format!("corank {corank}"))
    };
    Ok(GermInfo { corank: Some(corank), tjurina: Some(tau), label })
}

fn hessian_at_origin<F: ExactField>(g: &MultiPoly<F>) -> Matrix<F> {
    let f = g.ring();
    let m = g.nvars();
    let mut h = Matrix::zeros(f.clone(), m, m);
    for (mono, c) in g.terms().filter(|(mono, _)| mono.degree() == 2) {
        let support: Vec<usize> = (0..m).filter(|&i| mono.exps()[i] > 0).collect();
        match support[..] {
            [i] => h.set(i, i, f.add(c, c)),
            [i, j] => {
                h.set(i, j, c.clone());
                h.set(j, i, c.clone());
            }
            _ => unreachable!("degree-two monomial"),
        }
    }
    h
}

/// `dim k[y]/((gens) + m^d)` by linear algebra on monomials of degree `< d`.
fn truncated_colength<F: ExactField>(gens: &[MultiPoly<F>], nvars: usize, d: u32) -> usize {
    let field = gens[0].ring().clone();
    let cols = monomial_basis(nvars, d - 1, DegreeMode::AtMost);
    let index: HashMap<_, usize> = cols.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut ech = RowEchelon::new(field.clone(), cols.len());
    // The constant 1 is never in an ideal of functions vanishing at 0.
    let floor = 1;
    for h in gens {
        let Some(ord) = h.terms().map(|(m, _)| m.degree()).min() else {
            continue;
        };
        if ord >= d {
            continue;
        }
        for mult in monomial_basis(nvars, d - 1 - ord, DegreeMode::AtMost) {
            let mut row = vec![field.zero(); cols.len()];
            for (t, c) in h.terms() {
                let prod = t.mul(&mult);
                if prod.degree() < d {
                    row[index[&prod]] = c.clone();
                }
            }
            ech.insert(&row).expect("row length");
            if cols.len() - ech.rank() == floor {
                return floor;
            }
        }
    }
    cols.len() - ech.rank()
}

/// Moves a projective point to the origin of its first nonzero affine chart.
pub fn affine_germ<F: ExactField>(f: &MultiPoly<F>, pt: &[F::Elem]) -> Result<MultiPoly<F>, HuntError> {
    let field = f.ring();
    let n = f.nvars();
    let pt = normalize_projective(field, pt).ok_or(HuntError::NotSingular)?;
    let chart = pt.iter().position(|x| !field.is_zero(x)).expect("nonzero point");
    let m = n - 1;
    let mut subs = Vec::with_capacity(n);
    let mut y = 0;
    for (j, c) in pt.iter().enumerate() {
        if j == chart {
            subs.push(MultiPoly::constant(field.clone(), m, field.one()));
        } else {
            let shift = MultiPoly::constant(field.clone(), m, c.clone());
            subs.push(&MultiPoly::var(field.clone(), m, y) + &shift);
            y += 1;
        }
    }
    Ok(f.compose(&subs)?)
}

/// Classifies a singular point of a projective hypersurface.
pub fn classify<F: ExactField>(
    f: &MultiPoly<F>,
    pt: &[F::Elem],
    degree_cap: u32,
) -> Result<SingularPoint<F::Elem>, HuntError> {
    if !f.is_zero() && f.homogeneous_degree().is_none() {
        return Err(HuntError::NotHomogeneous);
    }
    if pt.len() != f.nvars() {
        return Err(PolyError::Arity { expected: f.nvars(), got: pt.len() }.into());
    }
    if !is_singular_at(f, &f.gradient(), pt) {
        return Err(HuntError::NotSingular);
    }
    let germ = affine_germ(f, pt)?;
    let deg = f.total_degree().unwrap_or(0);
    let info = if f.ring().characteristic() != 0 && f.ring().characteristic() <= u64::from(deg) {
        GermInfo {
            corank: None,
            tjurina: None,
            label: PointLabel::Unclassified(format!(
                "characteristic {} does not exceed degree {deg}",
                f.ring().characteristic()
            )),
        }
    } else {
        classify_germ(&germ, degree_cap)?
    };
    let coords = normalize_projective(f.ring(), pt).expect("nonzero point");
    Ok(SingularPoint { coords, label: info.label, corank: info.corank, tjurina: info.tjurina })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    RandomParams,
    SolveAtPoint,
}

#[derive(Clone, Debug)]
pub struct HuntConfig {
    pub strategy: Strategy,
    pub trials: u64,
    pub seed: u64,
    pub classify: bool,
    pub degree_cap: u32,
    pub budget: u64,
    /// Upper bound on parameter points taken from one solve-at-point system.
    pub solution_cap: usize,
}

impl Default for HuntConfig {
    fn default() -> Self {
        HuntConfig {
            strategy: Strategy::RandomParams,
            trials: 100,
            seed: 0,
            classify: false,
            degree_cap: DEFAULT_DEGREE_CAP,
            budget: DEFAULT_BUDGET,
            solution_cap: DEFAULT_SOLUTION_CAP,
        }
    }
}

fn param_key(params: &[FieldElement]) -> Vec<u64> {
    params.iter().map(FieldElement::index).collect()
}

fn decode_params(ctx: &FieldCtx, n: usize, mut index: u128) -> Vec<FieldElement> {
    let q = u128::from(ctx.order());
    let mut out = vec![ctx.zero(); n];
    for slot in out.iter_mut().rev() {
        *slot = ctx.from_index((index % q) as u64);
        index /= q;
    }
    out
}

/// Every parameter point in index order; `None` when the space is too large.
pub fn all_parameter_points(ctx: &FieldCtx, nparams: usize) -> Option<Vec<Vec<FieldElement>>> {
    let size = u128::from(ctx.order()).checked_pow(nparams as u32)?;
    (size <= EXHAUSTIVE_SAMPLING_LIMIT)
        .then(|| (0..size).map(|i| decode_params(ctx, nparams, i)).collect())
}

/// Singular locus of one member, classified on request.
pub fn examine_member(
    fam: &ParametricFamily<FieldCtx>,
    params: &[FieldElement],
    cfg: &HuntConfig,
) -> Result<SingularMember, HuntError> {
    let f = fam.specialize(params)?;
    let pts = singular_points(&f, cfg.budget)?;
    let points = if cfg.classify {
        pts.into_iter()
            .map(|pt| classify(&f, &pt, cfg.degree_cap))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        pts.into_iter().map(SingularPoint::unlabeled).collect()
    };
    Ok(SingularMember { params: params.to_vec(), points })
}

/// Searches a family over its coefficient field for members with a nonempty
/// singular locus. Output is sorted by parameter point and independent of
/// thread scheduling.
pub fn hunt_members(
    fam: &ParametricFamily<FieldCtx>,
    cfg: &HuntConfig,
) -> Result<Vec<SingularMember>, HuntError> {
    if cfg.trials == 0 {
        return Err(HuntError::NoTrials);
    }
    if fam.homogeneous_degree().is_none() && !fam.poly().is_zero() {
        return Err(HuntError::NotHomogeneous);
    }
    let ctx = fam.poly().ring().clone();
    let candidates = match cfg.strategy {
        Strategy::RandomParams => sample_parameters(&ctx, fam.nparams(), cfg.trials, cfg.seed),
        Strategy::SolveAtPoint => solve_at_points(fam, cfg)?,
    };
    let mut members: Vec<SingularMember> = candidates
        .par_iter()
        .map(|p| examine_member(fam, p, cfg))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|m| !m.points.is_empty())
        .collect();
    members.sort_by_key(|m| param_key(&m.params));
    Ok(members)
}

fn sample_parameters(ctx: &FieldCtx, n: usize, trials: u64, seed: u64) -> Vec<Vec<FieldElement>> {
    let mut rng = stream_rng(seed, 0);
    let space = u128::from(ctx.order()).checked_pow(n as u32);
    match space {
        Some(size) if size <= EXHAUSTIVE_SAMPLING_LIMIT => {
            let amount = (trials as u128).min(size) as usize;
            rand::seq::index::sample(&mut rng, size as usize, amount)
                .into_iter()
                .map(|i| decode_params(ctx, n, i as u128))
                .collect()
        }
        _ => {
            let mut seen = BTreeSet::new();
            let mut out = Vec::new();
            for _ in 0..trials {
                let p: Vec<FieldElement> = (0..n).map(|_| ctx.random(&mut rng)).collect();
                if seen.insert(param_key(&p)) {
                    out.push(p);
                }
            }
            out
        }
    }
}

/// Distinct x-points when the projective space is small, independent draws otherwise.
fn sample_projective_points(ctx: &FieldCtx, n: usize, trials: u64, seed: u64) -> Vec<Vec<FieldElement>> {
    let size = projective_size(ctx, n);
    if size <= EXHAUSTIVE_SAMPLING_LIMIT {
        let mut rng = stream_rng(seed, 0);
        let amount = u128::from(trials).min(size) as usize;
        return rand::seq::index::sample(&mut rng, size as usize, amount)
            .into_iter()
            .map(|i| projective_point(ctx, n, i as u128))
            .collect();
    }
    (0..trials)
        .map(|trial| {
            let mut rng = stream_rng(seed, trial);
            loop {
                let v: Vec<FieldElement> = (0..n).map(|_| ctx.random(&mut rng)).collect();
                if let Some(p) = normalize_projective(ctx, &v) {
                    break p;
                }
            }
        })
        .collect()
}

/// Parameter points making a fixed random x-point singular, one system per trial.
fn solve_at_points(
    fam: &ParametricFamily<FieldCtx>,
    cfg: &HuntConfig,
) -> Result<Vec<Vec<FieldElement>>, HuntError> {
    if !fam.is_linear_in_params() {
        return Err(HuntError::NotLinearInParams);
    }
    let ctx = fam.poly().ring().clone();
    let (nvars, nparams) = (fam.nvars(), fam.nparams());
    let mut equations = vec![fam.linear_parts().expect("linear")];
    for i in 0..nvars {
        let d = ParametricFamily::new(fam.poly().partial(i)?, nvars, nparams)?;
        equations.push(d.linear_parts().expect("derivative of a linear family is linear"));
    }
    let mut found = BTreeMap::new();
    for x in sample_projective_points(&ctx, nvars, cfg.trials, cfg.seed) {
        let rows: Vec<Vec<FieldElement>> = equations
            .iter()
            .map(|(c0, cs)| {
                let mut row: Vec<FieldElement> = cs.iter().map(|c| c.eval(&x)).collect();
                row.push(ctx.neg(&c0.eval(&x)));
                row
            })
            .collect();
        for p in solve_affine(&ctx, nparams, rows, cfg.solution_cap) {
            found.entry(param_key(&p)).or_insert(p);
        }
    }
    Ok(found.into_values().collect())
}

/// Solutions of `[A | b]`, enumerated in index order up to `cap`.
fn solve_affine(
    ctx: &FieldCtx,
    n: usize,
    mut rows: Vec<Vec<FieldElement>>,
    cap: usize,
) -> Vec<Vec<FieldElement>> {
    let pivots = ctx.reduce_rows(&mut rows, n + 1);
    if pivots.last() == Some(&n) {
        return Vec::new();
    }
    let mut particular = vec![ctx.zero(); n];
    for (row, &c) in rows.iter().zip(&pivots) {
        particular[c] = row[n];
    }
    let coeff_rows: Vec<Vec<FieldElement>> = rows.iter().map(|r| r[..n].to_vec()).collect();
    let kernel = kernel_from_rref(ctx, &coeff_rows, &pivots, n);
    let q = u128::from(ctx.order());
    let count = q.checked_pow(kernel.len() as u32).unwrap_or(u128::MAX);
    let take = count.min(cap as u128);
    (0..take)
        .map(|idx| {
            let coeffs = decode_params(ctx, kernel.len(), idx);
            let mut v = particular.clone();
            for (c, k) in coeffs.iter().zip(&kernel) {
                for (vi, ki) in v.iter_mut().zip(k) {
                    *vi = ctx.add(vi, &ctx.mul(c, ki));
                }
            }
            v
        })
        .collect()
}

/// `params | signature | points`, with elements in field text syntax.
pub fn format_member(ctx: &FieldCtx, m: &SingularMember) -> String {
    let params: Vec<String> = m.params.iter().map(|a| ctx.display(a).to_string()).collect();
    let points: Vec<String> = m.points.iter().map(|p| format_point(ctx, &p.coords)).collect();
    format!("{} | {} | {}", params.join(" "), m.signature(), points.join(" "))
}

pub fn format_point<R: Ring>(ring: &R, coords: &[R::Elem]) -> String {
    let cs: Vec<String> = coords.iter().map(|c| ring.display(c).to_string()).collect();
    format!("({})", cs.join(":"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, VarNames};
    use crate::ring::Rationals;

    fn gf(p: u64) -> FieldCtx {
        FieldCtx::new(p, 1).unwrap()
    }

    fn poly_over(ctx: &FieldCtx, text: &str, n: usize) -> MultiPoly<FieldCtx> {
        parse_poly(text, &VarNames::xs(n))
            .unwrap()
            .map_ring(ctx, |c| ctx.from_ratio(c.numer(), c.denom()).unwrap())
    }

    fn pt(ctx: &FieldCtx, v: &[i64]) -> Vec<FieldElement> {
        v.iter().map(|&x| ctx.from_i64(x)).collect()
    }

    #[test]
    fn cone_has_one_vertex() {
        let f7 = gf(7);
        let f = poly_over(&f7, "x0*x1 - x2^2", 4);
        assert_eq!(singular_points(&f, DEFAULT_BUDGET).unwrap(), vec![pt(&f7, &[0, 0, 0, 1])]);
    }

    #[test]
    fn smooth_conic_and_budget() {
        let f7 = gf(7);
        let f = poly_over(&f7, "x0^2 + x1^2 + x2^2", 3);
        assert!(singular_points(&f, DEFAULT_BUDGET).unwrap().is_empty());
        assert!(matches!(singular_points(&f, 10), Err(HuntError::BudgetExceeded { points: 57, .. })));
        let g = poly_over(&f7, "x0^2 + x1", 2);
        assert_eq!(singular_points(&g, DEFAULT_BUDGET), Err(HuntError::NotHomogeneous));
    }

    #[test]
    fn hesse_member_has_three_nodes() {
        let f7 = gf(7);
        let f = poly_over(&f7, "x0^3 + x1^3 + x2^3 - 3*x0*x1*x2", 3);
        let pts = singular_points(&f, DEFAULT_BUDGET).unwrap();
        assert!(pts.contains(&pt(&f7, &[1, 1, 1])));
        let classified: Vec<_> = pts.iter().map(|p| classify(&f, p, 8).unwrap()).collect();
        assert_eq!(signature(&classified).to_string(), format!("{}A1", pts.len()));
    }

    #[test]
    fn projective_enumeration_is_canonical() {
        let f3 = gf(3);
        let pts: Vec<_> = (0..13).map(|i| projective_point(&f3, 3, i)).collect();
        assert_eq!(pts[0], pt(&f3, &[1, 0, 0]));
        assert_eq!(pts[9], pt(&f3, &[0, 1, 0]));
        assert_eq!(pts[12], pt(&f3, &[0, 0, 1]));
        let set: BTreeSet<_> = pts.iter().map(|p| param_key(p)).collect();
        assert_eq!(set.len(), 13);
    }

    fn germ(text: &str) -> GermInfo {
        let g = parse_poly(text, &VarNames::xs(3)).unwrap();
        classify_germ(&g, DEFAULT_DEGREE_CAP).unwrap()
    }

    #[test]
    fn normal_forms() {
        let a1 = germ("x0^2 + x1^2 + x2^2");
        assert_eq!((a1.label, a1.corank, a1.tjurina), (PointLabel::A(1), Some(0), Some(1)));
        let a3 = germ("x0^2 + x1^2 + x2^4");
        assert_eq!((a3.label, a3.corank, a3.tjurina), (PointLabel::A(3), Some(1), Some(3)));
        let bad = germ("x0^2 + x1^4 + x2^4");
        assert_eq!(bad.corank, Some(2));
        assert!(matches!(bad.label, PointLabel::Unclassified(_)));
    }

    #[test]
    fn unstable_and_refused() {
        let g = parse_poly("x0^2 + x1^2 + x2^9", &VarNames::xs(3)).unwrap();
        let info = classify_germ(&g, 8).unwrap();
        assert_eq!(info.tjurina, None);
        let f3 = gf(3);
        let f = poly_over(&f3, "x0^3 + x1^3 + x2^3", 3);
        let p = classify(&f, &pt(&f3, &[1, 2, 0]), 8).unwrap();
        assert!(matches!(p.label, PointLabel::Unclassified(_)));
        let smooth = parse_poly("x0 + x1^2", &VarNames::xs(2)).unwrap();
        assert_eq!(classify_germ(&smooth, 8), Err(HuntError::NotSingular));
    }

    #[test]
    fn classify_over_rationals() {
        let f = parse_poly("x0^2*x3^2 + x1^2*x3^2 + x2^4", &VarNames::xs(4)).unwrap();
        let p = classify(&f, &[Rationals.zero(), Rationals.zero(), Rationals.zero(), Rationals.one()], 8)
            .unwrap();
        assert_eq!(p.label, PointLabel::A(3));
    }

    #[test]
    fn signature_strings() {
        let mk = |k| SingularPoint::<u8> {
            coords: vec![],
            label: PointLabel::A(k),
            corank: Some(1),
            tjurina: Some(k),
        };
        assert_eq!(signature(&[mk(1), mk(3), mk(1), mk(3)]).to_string(), "2A1+2A3");
        assert_eq!(signature(&vec![mk(1); 6]).to_string(), "6A1");
        assert_eq!(signature(&[mk(1), mk(1), mk(3), mk(1), mk(1)]).to_string(), "4A1+1A3");
        let mut s = vec![mk(1)];
        s.push(SingularPoint::unlabeled(vec![]));
        let sig = signature(&s);
        assert!(sig.has_unlabeled());
        assert_eq!(sig.to_string(), "1A1+1?");
    }

    #[test]
    fn hesse_hunt_matches_scan() {
        let f7 = gf(7);
        let fam = ParametricFamily::parse("x0^3+x1^3+x2^3+p1*x0*x1*x2", 3, 1).unwrap().reduce(&f7);
        let cfg = HuntConfig { trials: 200, seed: 3, classify: true, ..HuntConfig::default() };
        let found: Vec<u64> = hunt_members(&fam, &cfg).unwrap().iter().map(|m| m.params[0].index()).collect();
        assert_eq!(found, vec![1, 2, 4]);
    }

    #[test]
    fn solve_at_point_members_are_singular_there() {
        let f7 = gf(7);
        let fam = ParametricFamily::parse("x0^3+x1^3+x2^3+p1*x0*x1*x2", 3, 1).unwrap().reduce(&f7);
        let cfg = HuntConfig { strategy: Strategy::SolveAtPoint, trials: 30, seed: 9, ..HuntConfig::default() };
        let members = hunt_members(&fam, &cfg).unwrap();
        assert!(!members.is_empty());
        for m in &members {
            assert!([1, 2, 4].contains(&m.params[0].index()));
        }
        let nonlin = ParametricFamily::parse("x0^2 + p1^2*x1^2", 2, 1).unwrap().reduce(&f7);
        assert_eq!(hunt_members(&nonlin, &cfg), Err(HuntError::NotLinearInParams));
    }
}
