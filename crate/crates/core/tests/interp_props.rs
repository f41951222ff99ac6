use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;
use singhunt_core::fields::{FieldCtx, FieldElement};
use singhunt_core::interp::{
    filter_isolated, oversampled_system, tangent_dim, vanishing_system, PointSet, DEFAULT_COLUMN_CAP,
};
use singhunt_core::poly::{monomial_basis, DegreeMode, Monomial, MultiPoly};
use singhunt_core::ring::Ring;
use singhunt_core::rng::stream_rng;

const P: u64 = 101;

fn ctx() -> FieldCtx {
    FieldCtx::new(P, 1).unwrap()
}

/// Random `g(x, y)` of degree at most `d` with a nonzero top coefficient.
fn random_graph(f: &FieldCtx, d: u32, seed: u64) -> MultiPoly<FieldCtx> {
    let mut rng = stream_rng(seed, 1);
    let mut terms: Vec<(Monomial, FieldElement)> = monomial_basis(2, d, DegreeMode::AtMost)
        .into_iter()
        .map(|m| (m, f.random(&mut rng)))
        .collect();
    terms.push((Monomial::new(vec![d, 0]), f.one()));
    MultiPoly::from_terms(f.clone(), 2, terms)
}

/// `z - g(x, y)` and `n` points on it, plus `noise` random points off it.
fn planted(d: u32, n: usize, noise: usize, seed: u64) -> (MultiPoly<FieldCtx>, Vec<Vec<FieldElement>>) {
    let f = ctx();
    let g = random_graph(&f, d, seed);
    let h = &MultiPoly::var(f.clone(), 3, 2) - &g.embed(3, 0);
    let mut rng = stream_rng(seed, 2);
    let mut pts = Vec::new();
    for _ in 0..n {
        let (x, y) = (f.random(&mut rng), f.random(&mut rng));
        pts.push(vec![x, y, g.eval(&[x, y])]);
    }
    while pts.len() < n + noise {
        let p: Vec<FieldElement> = (0..3).map(|_| f.random(&mut rng)).collect();
        if !f.is_zero(&h.eval(&p)) {
            pts.push(p);
        }
    }
    (h, pts)
}

fn eval_by_hand(f: &FieldCtx, poly: &MultiPoly<FieldCtx>, pt: &[FieldElement]) -> FieldElement {
    poly.terms().fold(f.zero(), |acc, (m, c)| {
        let mono = m.exps().iter().zip(pt).fold(f.one(), |acc, (&e, x)| {
            (0..e).fold(acc, |a, _| f.mul(&a, x))
        });
        f.add(&acc, &f.mul(c, &mono))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_generator_vanishes_on_the_input(
        d in 1u32..=3,
        n in 1usize..40,
        noise in 0usize..6,
        homogeneous in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let (_, pts) = planted(d, n, noise, seed);
        let set = PointSet::new(ctx(), 3, pts.clone(), true).unwrap();
        let sys = vanishing_system(&set, d, homogeneous, DEFAULT_COLUMN_CAP).unwrap();
        let f = ctx();
        for g in sys.polys() {
            for p in &pts {
                prop_assert!(f.is_zero(&eval_by_hand(&f, &g, p)));
            }
        }
        // Dimension count: columns minus the rank of the evaluation matrix.
        let cols = monomial_basis(3, d, if homogeneous { DegreeMode::Exactly } else { DegreeMode::AtMost });
        prop_assert!(sys.dim() <= cols.len());
        prop_assert!(sys.dim() + set.len() >= cols.len());
    }

    #[test]
    fn planted_surface_is_recovered(d in 1u32..=3, seed in any::<u64>()) {
        let cols = monomial_basis(3, d, DegreeMode::AtMost).len();
        let (h, pts) = planted(d, cols + 10, 0, seed);
        let set = PointSet::new(ctx(), 3, pts, true).unwrap();
        let sys = vanishing_system(&set, d, false, DEFAULT_COLUMN_CAP).unwrap();
        prop_assert!(sys.contains(&h));
    }

    #[test]
    fn oversampled_system_is_contained(
        d in 1u32..=2,
        noise in 0usize..4,
        slack in 1usize..6,
        draws in 1usize..4,
        seed in any::<u64>(),
    ) {
        let cols = monomial_basis(3, d, DegreeMode::AtMost).len();
        let (_, pts) = planted(d, cols + slack + 20, noise, seed);
        let set = PointSet::new(ctx(), 3, pts, true).unwrap();
        prop_assume!(set.len() >= cols + slack);
        let full = vanishing_system(&set, d, false, DEFAULT_COLUMN_CAP).unwrap();
        let over = oversampled_system(&set, d, false, slack, draws, seed, DEFAULT_COLUMN_CAP).unwrap();
        prop_assert!(full.is_subspace_of(&over));
        prop_assert!(over.dim() >= full.dim());
    }

    #[test]
    fn isolation_filter_keeps_positive_dimensional_points(
        d in 1u32..=2,
        noise in 0usize..8,
        seed in any::<u64>(),
    ) {
        let (h, mut pts) = planted(d, 200, 0, seed);
        let mut rng = stream_rng(seed, 9);
        let f = ctx();
        // Points of a second component: the line x = y = 0 when it is not on h.
        for _ in 0..noise {
            pts.push(vec![f.zero(), f.zero(), f.from_index(rng.gen_range(0..P))]);
        }
        let set = PointSet::new(f.clone(), 3, pts, true).unwrap();
        let gens = vanishing_system(&set, d + 1, false, DEFAULT_COLUMN_CAP).unwrap().polys();
        let kept = filter_isolated(&set, &gens).unwrap();
        let kept_keys: BTreeSet<Vec<u64>> =
            kept.points().iter().map(|p| p.iter().map(FieldElement::index).collect()).collect();
        for p in set.points() {
            let key: Vec<u64> = p.iter().map(FieldElement::index).collect();
            let positive = tangent_dim(&gens, p).unwrap() >= 1;
            prop_assert_eq!(kept_keys.contains(&key), positive);
        }
        // The planted surface is smooth, so none of its points may be dropped.
        for p in set.points().iter().filter(|p| f.is_zero(&h.eval(p))) {
            let key: Vec<u64> = p.iter().map(FieldElement::index).collect();
            prop_assert!(kept_keys.contains(&key) || gens.is_empty());
        }
    }
}
