//! Built-in end-to-end check on the 2A1+2A3 Godeaux resolution and its
//! `ℤ/2 × ℤ/4` cover, from Gram data alone.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::cover::{
    chi_cover, cover_canonical_square, euler_term, format_table, pg_cover, reduced_building_data, Character,
    CoverError, CoverSpec, GODEAUX_COVER,
};
use crate::lattice::{
    b2, godeaux_fixture, solve_curve_intersections, CurveConstraints, GramLattice, LatticeError,
    RelationTemplate, SurfaceInvariants, C_PAIRINGS, CURVE_SELF_INTERSECTION,
};
use crate::report::{Report, Section};

pub const FIXTURE_NAME: &str = "godeaux-2a1-2a3";

pub const C_TEMPLATE: &str = "8K = 4C' + ?N1 + ?N3 + ?N4 + ?N5 + ?N6 + ?N7 + ?N8";
pub const D_TEMPLATE: &str = "4K = 2D' + ?N1 + ?N2 + ?N6 + ?N7 + ?N8";
pub const C_MULTIPLICITIES: [i64; 7] = [2, 1, 2, 3, 3, 2, 1];
pub const D_MULTIPLICITIES: [i64; 5] = [1, 1, 1, 2, 1];

/// Curves meet each exceptional curve at most once and each A3 chain at most once.
pub const CURVE_CONSTRAINTS: &str = "\
N1 N2 N3 N4 N5 N6 N7 N8: 0,1
cap 1: N3 N4 N5
cap 1: N6 N7 N8
";

pub const CHAIN_A3: [[&str; 3]; 2] = [["N3", "N4", "N5"], ["N6", "N7", "N8"]];

/// Expected classes per character, with the alternative forms of some.
pub const EXPECTED_L: [((u64, u64), &[&str]); 7] = [
    ((1, 0), &["2K - D' - N7"]),
    ((0, 2), &["4K - 2C' - N1 - N4 - N5 - N6 - N7"]),
    (
        (1, 2),
        &[
            "14K - 6C' - D' - 3N1 - N3 - 3N4 - 4N5 - 5N6 - 4N7 - 2N8",
            "6K - 2C' - D' - N1 - N4 - N5 - 2N6 - 2N7 - N8",
        ],
    ),
    ((1, 1), &["2K - C'"]),
    ((0, 1), &["4K - C' - D' - N1 - N6 - N7"]),
    ((1, 3), &["6K - 3C' - N1 - N4 - 2N5 - 2N6 - N7"]),
    ((0, 3), &["8K - 3C' - D' - 2N1 - N4 - 2N5 - 2N6 - 2N7 - N8"]),
];

pub const EXPECTED_TABLES: [((u64, u64), &str); 2] =
    [((1, 0), "[[0],[1],[1],[0,0],[1,1]]"), ((1, 1), "[[2],[2],[0],[1,3],[3,1]]")];

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Runs the full chain of checks. Errors mean malformed built-in data;
/// failed checks are reported as verdicts.
pub fn godeaux_report() -> Result<Report, FixtureError> {
    let mut report = Report::new(format!("fixture {FIXTURE_NAME}"));
    let base = godeaux_fixture();

    let mut s = Section::new("(a) intersection lattice");
    s.check("rank", base.rank() == 9, format!("{}", base.rank()));
    s.check("determinant", base.determinant() == BigInt::from(64), base.determinant().to_string());
    let ns: Vec<String> = (1..=8).map(|i| format!("N{i}")).collect();
    let refs: Vec<&str> = ns.iter().map(String::as_str).collect();
    s.check("exceptional block negative definite", base.is_negative_definite_on(&refs)?, "");
    let inertia = base.inertia();
    s.check(
        "signature (1, 8)",
        inertia.positive == 1 && inertia.negative == 8 && inertia.zero == 0,
        format!("({}, {})", inertia.positive, inertia.negative),
    );
    report.push(s);

    let mut s = Section::new("(b) base invariants");
    let base_inv = SurfaceInvariants::from_chi(1, 1, 0);
    s.check("b2 = 9", b2(&base_inv) == 9, b2(&base_inv).to_string());
    report.push(s);

    let mut s = Section::new("(c) curve relations");
    let ext = curve_relations(&base, &mut s)?;
    report.push(s);

    let mut s = Section::new("(d) reduced building data");
    let spec = CoverSpec::parse(GODEAUX_COVER, &ext)?;
    let g = &spec.data.group;
    for ((a, b), want) in EXPECTED_TABLES {
        let chi = Character(vec![a, b]);
        let got = format_table(&spec.data.branch.coefficient_table(g, &chi)?);
        s.check(format!("table of {chi}"), got == want, got);
    }
    let derived = spec.data.derive_all_l();
    let all = match &derived {
        Ok(all) => all.clone(),
        Err(e) => {
            s.check("classes derivable", false, e.to_string());
            report.push(s);
            return Ok(report);
        }
    };
    for (chi, l) in &all {
        let v = reduced_building_data(g, chi, &spec.data.branch, l)?;
        s.check(
            format!("{}·L{chi} numerically equals its branch sum", g.character_order(chi)),
            ext.in_radical(&v.coeffs)?,
            "",
        );
    }
    report.push(s);

    let mut s = Section::new("(e) derived classes");
    s.check("derivation is path independent", true, "all products agree");
    let mut expected: BTreeMap<Character, Vec<String>> = BTreeMap::new();
    for ((a, b), forms) in EXPECTED_L {
        expected.insert(Character(vec![a, b]), forms.iter().map(|f| f.to_string()).collect());
    }
    for (chi, l) in &all {
        s.line(format!("L{chi} = {}", ext.format_class(l)));
        for form in expected.get(chi).into_iter().flatten() {
            let want = ext.parse_class(form)?;
            s.check(format!("L{chi} ≡ {form}"), ext.in_radical(&l.sub(&want).coeffs)?, "");
        }
    }
    report.push(s);

    let mut s = Section::new("(f) cover invariants");
    let minus_one = BigRational::from_integer(BigInt::from(-1));
    let terms_ok = all.values().map(|l| euler_term(&ext, l)).collect::<Result<Vec<_>, _>>()?;
    s.check("each ½L(K+L) = -1", terms_ok.iter().all(|t| *t == minus_one), "");
    let chi = chi_cover(&spec.base, g, &ext, &all)?;
    let h0 = spec.h0_values().unwrap_or_default();
    let pg = pg_cover(spec.base.pg, &h0)?;
    let k2 = cover_canonical_square(g.order(), spec.base_k2);
    let chi_i64 = i64::try_from(&chi).unwrap_or(i64::MAX);
    let cover_inv = SurfaceInvariants::new(k2, 1 + pg - chi_i64, pg);
    s.check("χ = 1", chi == BigInt::from(1), chi.to_string());
    s.check("p_g = 0", pg == 0, pg.to_string());
    s.check("K² = 8", k2 == 8, k2.to_string());
    s.check("q = 0", cover_inv.q == 0, cover_inv.q.to_string());
    s.check("b2 = 2", b2(&cover_inv) == 2, b2(&cover_inv).to_string());
    report.push(s);
    Ok(report)
}

/// Solves both templates, derives `C'·D'` from the `C'` relation, and returns
/// the lattice extended by both curves.
fn curve_relations(base: &GramLattice, s: &mut Section) -> Result<GramLattice, FixtureError> {
    let cons = CurveConstraints::parse(CURVE_CONSTRAINTS, base)?;
    let tc = RelationTemplate::parse(C_TEMPLATE, base)?;
    let td = RelationTemplate::parse(D_TEMPLATE, base)?;
    let sc = solve_curve_intersections(base, &tc, &cons)?;
    let sd = solve_curve_intersections(base, &td, &cons)?;
    let want_c = ints(&C_MULTIPLICITIES);
    let want_d = ints(&D_MULTIPLICITIES);
    let c = sc.solutions.iter().position(|x| x.multiplicities == want_c);
    s.line(format!("{C_TEMPLATE}: {} solutions in {} symmetry orbits", sc.solutions.len(), sc.orbits.len()));
    s.check(
        "C' relation unique up to symmetry",
        sc.orbits.len() == 1 && c.is_some(),
        format!("{:?}", C_MULTIPLICITIES),
    );
    s.line(format!("{D_TEMPLATE}: {} solutions", sd.solutions.len()));
    s.check(
        "D' relation unique",
        sd.is_unique() && sd.solutions[0].multiplicities == want_d,
        format!("{:?}", D_MULTIPLICITIES),
    );
    let Some(c) = c else {
        return Ok(base.clone());
    };
    let cs = &sc.solutions[c];
    let ds = &sd.solutions[0];
    s.check("C'·K = 2, C'² = 2", cs.pairings[8] == 2 && cs.self_int == 2, "");
    s.check("D'·K = 2, D'² = 2", ds.pairings[8] == 2 && ds.self_int == 2, "");
    s.check("C' pairings", cs.pairings == C_PAIRINGS, format!("{:?}", cs.pairings));

    // Pair the C' relation with D': 8·D'K = 4·C'D' + Σ a_i·D'N_i.
    let with_c = base.extend_with_curve("C'", &cs.pairings, cs.self_int)?;
    let rel = &cs.relation;
    let mut known = BigInt::from(0);
    for (i, r) in rel.iter().enumerate().take(base.len()) {
        known += r * BigInt::from(ds.pairings[i]);
    }
    let c_coeff = &rel[base.len()];
    let cd = -known / c_coeff;
    let cd = i64::try_from(&cd).unwrap_or(i64::MAX);
    s.check("C'·D' = 3", cd == 3, cd.to_string());
    let mut d_row = ds.pairings.clone();
    d_row.push(cd);
    let ext = with_c.extend_with_curve("D'", &d_row, CURVE_SELF_INTERSECTION)?;
    for (name, sol) in [("C'", cs), ("D'", ds)] {
        let mut v = sol.relation.clone();
        if name == "C'" {
            v.push(BigInt::from(0));
        } else {
            v.insert(base.len(), BigInt::from(0));
        }
        s.line(ext.format_relation(&v));
        s.check(format!("{name} relation in the radical"), crate::lattice::relation_holds(&ext, &v)?, "");
    }
    Ok(ext)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_passes() {
        let r = godeaux_report().unwrap();
        assert!(r.passed, "{r}");
        assert!(r.verdicts().count() > 25);
    }
}
