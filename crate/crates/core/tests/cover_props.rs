use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use singhunt_core::cover::{
    branch_slots, chi_cover, cyclic_subgroups, epsilon, exponent_from_restriction, pg_cover, reduced_building_data,
    AbelianGroup, Character, CoverData, CoverSpec, GODEAUX_COVER,
};
use singhunt_core::lattice::{b2, godeaux_extended, SurfaceInvariants};

/// Every `ℤ/m_1 × … × ℤ/m_n` with `2 <= m_1 <= … <= m_n` and order at most `limit`.
fn groups_up_to(limit: u64) -> Vec<Vec<u64>> {
    fn rec(prefix: &mut Vec<u64>, min: u64, prod: u64, limit: u64, out: &mut Vec<Vec<u64>>) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        for m in min..=limit / prod {
            prefix.push(m);
            rec(prefix, m, prod * m, limit, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), 2, 1, limit, &mut out);
    out
}

fn totient(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

#[test]
fn character_pairing_is_a_group_isomorphism() {
    for orders in groups_up_to(64) {
        let g = AbelianGroup::new(orders.clone()).unwrap();
        let elems = g.elements();
        let chars = g.characters();
        let e = g.exponent();
        assert_eq!(chars.len() as u64, g.order(), "{orders:?}");
        assert_eq!(elems.len() as u64, orders.iter().product::<u64>());
        for chi in &chars {
            let row: Vec<u64> = elems.iter().map(|x| g.value(chi, x)).collect();
            for (i, x) in elems.iter().enumerate() {
                for (j, y) in elems.iter().enumerate() {
                    assert_eq!(g.value(chi, &g.add(x, y)), (row[i] + row[j]) % e);
                }
            }
            // Nondegenerate: only the trivial character vanishes everywhere.
            assert_eq!(row.iter().all(|&v| v == 0), g.is_trivial(chi), "{orders:?} {chi}");
            assert_eq!(g.character_order(chi), g.element_order(&chi.0));
        }
        for a in &chars {
            for b in &chars {
                let ab = g.mul_chars(a, b);
                for x in &elems {
                    assert_eq!(g.value(&ab, x), (g.value(a, x) + g.value(b, x)) % e);
                }
            }
        }
    }
}

#[test]
fn cyclic_subgroups_are_counted_by_element_orders() {
    for orders in groups_up_to(64) {
        let g = AbelianGroup::new(orders.clone()).unwrap();
        let subs = cyclic_subgroups(&g);
        let mut by_order: BTreeMap<u64, u64> = BTreeMap::new();
        for x in g.elements() {
            *by_order.entry(g.element_order(&x)).or_default() += 1;
        }
        for (&d, &count) in by_order.iter().filter(|(&d, _)| d > 1) {
            let want = count / totient(d);
            let got = subs.iter().filter(|h| h.order == d).count() as u64;
            assert_eq!(got, want, "{orders:?}, order {d}");
        }
        let slots = branch_slots(&subs);
        let want: u64 = by_order.iter().filter(|(&d, _)| d > 1).map(|(_, &c)| c).sum();
        assert_eq!(slots.len() as u64, want, "one slot per nonidentity element");
        for w in subs.windows(2) {
            assert!((w[0].order, &w[0].generator) < (w[1].order, &w[1].generator));
        }
    }
}

/// `r(χχ') = r(χ) + r(χ') − |H|·ε`, the identity behind the carry divisors.
#[test]
fn epsilon_is_the_carry_of_restriction_exponents() {
    for orders in groups_up_to(32) {
        let g = AbelianGroup::new(orders).unwrap();
        let subs = cyclic_subgroups(&g);
        let slots = branch_slots(&subs);
        let chars = g.characters();
        for a in &chars {
            for b in &chars {
                let ab = g.mul_chars(a, b);
                for s in &slots {
                    let h = &subs[s.subgroup];
                    let ra = exponent_from_restriction(&g, a, h, s.psi).unwrap();
                    let rb = exponent_from_restriction(&g, b, h, s.psi).unwrap();
                    let rab = exponent_from_restriction(&g, &ab, h, s.psi).unwrap();
                    let eps = epsilon(&g, a, b, h, s.psi).unwrap();
                    assert_eq!(rab + h.order * eps, ra + rb);
                }
            }
        }
    }
}

fn fixture() -> (CoverSpec, BTreeMap<Character, singhunt_core::lattice::DivisorClass>) {
    let ext = godeaux_extended();
    let spec = CoverSpec::parse(GODEAUX_COVER, &ext).unwrap();
    let all = spec.data.derive_all_l().unwrap();
    (spec, all)
}

#[test]
fn fixture_derivation_is_path_independent() {
    let (spec, all) = fixture();
    let d = &spec.data;
    let g = &d.group;
    let n = d.lattice.len();
    assert_eq!(all.len(), 7);
    // Every factorization χ = χ₁χ₂ into nontrivial characters.
    let mut factorizations = 0;
    for (a, la) in &all {
        for (b, lb) in &all {
            let ab = g.mul_chars(a, b);
            let Some(lab) = all.get(&ab) else {
                continue;
            };
            let via = la.add(lb).sub(&d.branch.carry(g, a, b, n).unwrap());
            assert!(d.lattice.in_radical(&via.sub(lab).coeffs).unwrap(), "{a}·{b}");
            factorizations += 1;
        }
    }
    assert_eq!(factorizations, 7 * 7 - 7);

    // Starting from any other generating pair gives the same classes.
    let chars: Vec<&Character> = all.keys().collect();
    let mut pairs = 0;
    for a in &chars {
        for b in &chars {
            if a >= b || !g.generates(&[(*a).clone(), (*b).clone()]) {
                continue;
            }
            let alt = CoverData {
                l: BTreeMap::from([((*a).clone(), all[*a].clone()), ((*b).clone(), all[*b].clone())]),
                ..d.clone()
            };
            let derived = alt.derive_all_l().unwrap();
            for (chi, l) in &derived {
                assert!(d.lattice.in_radical(&l.sub(&all[chi]).coeffs).unwrap(), "from {a},{b}: {chi}");
            }
            pairs += 1;
        }
    }
    assert!(pairs > 1);
}

#[test]
fn fixture_reduced_data_and_invariants() {
    let (spec, all) = fixture();
    let d = &spec.data;
    for (chi, l) in &all {
        let v = reduced_building_data(&d.group, chi, &d.branch, l).unwrap();
        assert!(d.lattice.in_radical(&v.coeffs).unwrap(), "{chi}");
    }
    assert_eq!(chi_cover(&spec.base, &d.group, &d.lattice, &all).unwrap(), BigInt::from(1));
    let h0 = spec.h0_values().unwrap();
    assert_eq!(h0.len(), 7);
    assert_eq!(pg_cover(spec.base.pg, &h0).unwrap(), 0);
    assert_eq!(b2(&SurfaceInvariants::from_chi(1, 8, 0)), 2);
}
