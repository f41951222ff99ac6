use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use singhunt_core::exactla::Matrix;
use singhunt_core::fixture::{C_MULTIPLICITIES, C_TEMPLATE, CURVE_CONSTRAINTS, D_MULTIPLICITIES, D_TEMPLATE};
use singhunt_core::lattice::{
    b2, godeaux_extended, godeaux_fixture, solve_curve_intersections, CurveConstraints, DivisorClass, GramLattice,
    RelationTemplate, SurfaceInvariants, C_PAIRINGS, D_PAIRINGS,
};
use singhunt_core::ring::Rationals;

fn ints(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn exceptional() -> Vec<String> {
    (1..=8).map(|i| format!("N{i}")).collect()
}

#[test]
fn fixture_is_nondegenerate_of_rank_b2() {
    let l = godeaux_fixture();
    assert_eq!(l.len(), 9);
    assert_eq!(l.rank(), 9);
    assert!(l.radical().is_empty());
    assert_eq!(i64::try_from(l.rank()).unwrap(), b2(&SurfaceInvariants::from_chi(1, 1, 0)));
}

/// Sign changes in the sequence of leading principal minors, counted
/// independently of the congruence diagonalization used by `inertia`.
#[test]
fn fixture_signature_from_minors() {
    let l = godeaux_fixture();
    let names = exceptional();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    assert!(l.is_negative_definite_on(&refs).unwrap());

    // Order the basis so that K comes first; all minors are then nonzero.
    let k = l.index("K").unwrap();
    let mut order = vec![k];
    order.extend((0..l.len()).filter(|&i| i != k));
    let m = l.matrix();
    let mut prev = BigRational::from_integer(1.into());
    let mut changes = 0;
    for size in 1..=order.len() {
        let d = m.principal(&order[..size]).determinant().unwrap();
        assert!(!d.is_zero());
        if d.is_negative() != prev.is_negative() {
            changes += 1;
        }
        prev = d;
    }
    assert_eq!(changes, 8);
    let inertia = l.inertia();
    assert_eq!((inertia.positive, inertia.negative, inertia.zero), (1, 8, 0));
}

#[test]
fn both_curve_relations_lie_in_the_radical() {
    let ext = godeaux_extended();
    assert_eq!(ext.rank(), 9);
    let c = format!(
        "8K - 4C' - {}",
        ["N1", "N3", "N4", "N5", "N6", "N7", "N8"]
            .iter()
            .zip(C_MULTIPLICITIES)
            .map(|(n, a)| format!("{a}{n}"))
            .collect::<Vec<_>>()
            .join(" - ")
    );
    let d = format!(
        "4K - 2D' - {}",
        ["N1", "N2", "N6", "N7", "N8"]
            .iter()
            .zip(D_MULTIPLICITIES)
            .map(|(n, a)| format!("{a}{n}"))
            .collect::<Vec<_>>()
            .join(" - ")
    );
    for rel in [c, d] {
        let v = ext.parse_class(&rel).unwrap();
        assert!(ext.in_radical(&v.coeffs).unwrap(), "{rel}");
    }
    let radical = ext.radical();
    assert_eq!(radical.len(), 2);
}

#[test]
fn templates_determine_the_pairings() {
    let base = godeaux_fixture();
    let cons = CurveConstraints::parse(CURVE_CONSTRAINTS, &base).unwrap();
    let d = solve_curve_intersections(&base, &RelationTemplate::parse(D_TEMPLATE, &base).unwrap(), &cons).unwrap();
    assert!(d.is_unique());
    assert_eq!(d.solutions[0].pairings, D_PAIRINGS[..9]);
    let c = solve_curve_intersections(&base, &RelationTemplate::parse(C_TEMPLATE, &base).unwrap(), &cons).unwrap();
    assert_eq!(c.orbits.len(), 1);
    assert!(c.solutions.iter().any(|s| s.pairings == C_PAIRINGS));
    for s in &c.solutions {
        assert_eq!((s.pairings[8], s.self_int), (2, 2));
    }
}

/// Random nondegenerate symmetric matrix with diagonal dominance.
fn gram(n: usize, vals: &[i64]) -> Vec<Vec<i64>> {
    let mut g = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = vals[(i * n + j) % vals.len()];
            g[i][j] = v;
            g[j][i] = v;
        }
        g[i][i] = -(4 * n as i64) - vals[i % vals.len()].abs();
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn b2_matches_noether_and_betti_count(chi in -20i64..20, k2 in -20i64..20, q in 0i64..10) {
        let inv = SurfaceInvariants::from_chi(chi, k2, q);
        prop_assert_eq!(inv.chi, 1 - inv.q + inv.pg);
        // e = 12χ - K² and e = 2 - 2b1 + b2 with b1 = 2q.
        let e = 12 * chi - k2;
        prop_assert_eq!(b2(&inv), e - 2 + 2 * (2 * q));
        prop_assert_eq!(b2(&SurfaceInvariants::new(k2, q, inv.pg)), b2(&inv));
    }

    /// Appending a class numerically equal to an integer combination of the
    /// basis adds exactly that relation to the radical.
    #[test]
    fn extension_by_a_combination_adds_one_radical_vector(
        n in 1usize..6,
        vals in prop::collection::vec(-3i64..4, 36),
        combo in prop::collection::vec(-4i64..5, 6),
    ) {
        let names: Vec<String> = (0..n).map(|i| format!("E{i}")).collect();
        let g = gram(n, &vals);
        let base = GramLattice::new(names, g.clone()).unwrap();
        prop_assume!(base.rank() == n);
        let a = &combo[..n];
        prop_assume!(a.iter().any(|&x| x != 0));
        let pairings: Vec<i64> = (0..n).map(|i| (0..n).map(|j| g[i][j] * a[j]).sum()).collect();
        let self_int: i64 = (0..n).map(|i| a[i] * pairings[i]).sum();
        let ext = base.extend_with_curve("X", &pairings, self_int).unwrap();
        let radical = ext.radical();
        prop_assert_eq!(radical.len(), 1);
        let mut want: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
        want.push(BigInt::from(-1));
        prop_assert!(ext.in_radical(&ints(&want)).unwrap());
        // The reported vector is a primitive multiple of `want`.
        let r = &radical[0];
        let m = Matrix::from_rows(Rationals, n + 1, vec![ints(r), ints(&want)]).unwrap();
        prop_assert_eq!(m.rank(), 1);
    }

    #[test]
    fn class_text_round_trip(coeffs in prop::collection::vec(-9i64..10, 11)) {
        let ext = godeaux_extended();
        let c = DivisorClass::from_ints(&coeffs);
        let text = ext.format_class(&c);
        prop_assert_eq!(ext.parse_class(&text).unwrap(), c, "{}", text);
    }

    #[test]
    fn pairing_is_symmetric_and_bilinear(
        u in prop::collection::vec(-5i64..6, 9),
        v in prop::collection::vec(-5i64..6, 9),
        w in prop::collection::vec(-5i64..6, 9),
        s in -4i64..5,
    ) {
        let l = godeaux_fixture();
        let (u, v, w) = (DivisorClass::from_ints(&u), DivisorClass::from_ints(&v), DivisorClass::from_ints(&w));
        prop_assert_eq!(l.pairing(&u, &v).unwrap(), l.pairing(&v, &u).unwrap());
        let lhs = l.pairing(&u.scale_int(s).add(&w), &v).unwrap();
        let rhs = l.pairing(&u, &v).unwrap() * BigRational::from_integer(s.into()) + l.pairing(&w, &v).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
