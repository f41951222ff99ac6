//! Building data of abelian covers.
//!
//! A cover of a surface with group `G = ∏ ℤ/m_j` is determined by branch
//! divisors `D_{H,ψ}`, one per cyclic subgroup `H` and generator `ψ` of its
//! character group, together with classes `L_χ` for the nontrivial characters
//! `χ`. The classes obey `L_χ + L_χ' ≡ L_{χχ'} + Σ ε D_{H,ψ}` where
//! `ε = 1` exactly when the restriction exponents satisfy `r_χ + r_χ' ≥ |H|`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use thiserror::Error;

use crate::lattice::{DivisorClass, GramLattice, LatticeError, SurfaceInvariants};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("cyclic orders must be at least 2, got {0:?}")]
    BadGroup(Vec<u64>),
    #[error("character of H* with exponent {psi} does not generate a group of order {order}")]
    NotAGenerator { psi: u64, order: u64 },
    #[error("non-integral value {0}")]
    NonIntegral(String),
    #[error("derivations of L for {character} disagree")]
    InconsistentData { character: String },
    #[error("reduced building data fails for {character}: {relation}")]
    BadReducedData { character: String, relation: String },
    #[error("h0 entry {index} is negative ({value})")]
    NegativeH0 { index: usize, value: i64 },
    #[error("tuple {0:?} is not an element of the group")]
    NotInGroup(Vec<u64>),
    #[error("the given classes do not generate the character group")]
    NotGenerating,
    #[error("expected {expected} branch slots, got {got}")]
    SlotCount { expected: usize, got: usize },
    #[error("lattice has no canonical class")]
    MissingCanonical,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// `ℤ/m_1 × … × ℤ/m_n` with elements as exponent tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    orders: Vec<u64>,
}

/// An element of a group or of its character group; both are exponent tuples.
pub type Element = Vec<u64>;

/// A character `g ↦ Σ c_j g_j / m_j` in `ℚ/ℤ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Character(pub Element);

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl AbelianGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self, CoverError> {
        if orders.is_empty() || orders.iter().any(|&m| m < 2) {
            return Err(CoverError::BadGroup(orders));
        }
        Ok(AbelianGroup { orders })
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Least common multiple of the cyclic orders; character values live in `(1/e)ℤ/ℤ`.
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |a, &m| a.lcm(&m))
    }

    pub fn identity(&self) -> Element {
        vec![0; self.orders.len()]
    }

    pub fn contains(&self, g: &[u64]) -> bool {
        g.len() == self.orders.len() && g.iter().zip(&self.orders).all(|(x, m)| x < m)
    }

    pub fn check(&self, g: &[u64]) -> Result<(), CoverError> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(CoverError::NotInGroup(g.to_vec()))
        }
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> Vec<Element> {
        let mut out = vec![Vec::new()];
        for &m in &self.orders {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..m).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Element {
        a.iter().zip(b).zip(&self.orders).map(|((x, y), m)| (x + y) % m).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Element {
        a.iter().zip(&self.orders).map(|(x, m)| (m - x) % m).collect()
    }

    pub fn scale(&self, a: &[u64], k: u64) -> Element {
        a.iter().zip(&self.orders).map(|(x, m)| (x * (k % m)) % m).collect()
    }

    pub fn element_order(&self, a: &[u64]) -> u64 {
        a.iter().zip(&self.orders).fold(1, |acc, (&x, &m)| acc.lcm(&(m / x.gcd(&m))))
    }

    pub fn characters(&self) -> Vec<Character> {
        self.elements().into_iter().map(Character).collect()
    }

    pub fn character_order(&self, chi: &Character) -> u64 {
        self.element_order(&chi.0)
    }

    /// `χ(g)` as a numerator over the group exponent.
    pub fn value(&self, chi: &Character, g: &[u64]) -> u64 {
        let e = self.exponent();
        chi.0
            .iter()
            .zip(g)
            .zip(&self.orders)
            .fold(0, |acc, ((&c, &x), &m)| (acc + c * x % m * (e / m)) % e)
    }

    pub fn mul_chars(&self, a: &Character, b: &Character) -> Character {
        Character(self.add(&a.0, &b.0))
    }

    pub fn is_trivial(&self, chi: &Character) -> bool {
        chi.0.iter().all(|&c| c == 0)
    }

    /// True when the listed characters generate the full character group.
    pub fn generates(&self, gens: &[Character]) -> bool {
        self.span(gens).len() as u64 == self.order()
    }

    fn span(&self, gens: &[Character]) -> BTreeSet<Element> {
        let mut seen = BTreeSet::from([self.identity()]);
        let mut queue = VecDeque::from([self.identity()]);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = self.add(&x, &g.0);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }
}

/// A nontrivial cyclic subgroup with its chosen generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicSubgroup {
    pub generator: Element,
    pub order: u64,
    pub elements: BTreeSet<Element>,
}

/// All nontrivial cyclic subgroups, sorted by order then generator. The
/// generator is the lexicographically least element of maximal order.
pub fn cyclic_subgroups(group: &AbelianGroup) -> Vec<CyclicSubgroup> {
    let mut seen: BTreeSet<BTreeSet<Element>> = BTreeSet::new();
    let mut out = Vec::new();
    for g in group.elements() {
        let order = group.element_order(&g);
        if order == 1 {
            continue;
        }
        let elements: BTreeSet<Element> = (0..order).map(|k| group.scale(&g, k)).collect();
        if !seen.insert(elements.clone()) {
            continue;
        }
        let generator = elements
            .iter()
            .filter(|h| group.element_order(h) == order)
            .min()
            .expect("g generates")
            .clone();
        out.push(CyclicSubgroup { generator, order, elements });
    }
    out.sort_by(|a, b| (a.order, &a.generator).cmp(&(b.order, &b.generator)));
    out
}

/// One branch slot: a subgroup `H` and the character `ψ` of `H` sending the
/// chosen generator to `psi/|H|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub subgroup: usize,
    pub psi: u64,
}

/// Slots in subgroup order, generators `ψ` by increasing exponent.
pub fn branch_slots(subgroups: &[CyclicSubgroup]) -> Vec<Slot> {
    subgroups
        .iter()
        .enumerate()
        .flat_map(|(i, h)| {
            (1..h.order).filter(move |j| j.gcd(&h.order) == 1).map(move |psi| Slot { subgroup: i, psi })
        })
        .collect()
}

/// The unique `r` in `[0, |H|)` with `χ|_H = ψ^r`.
pub fn exponent_from_restriction(
    group: &AbelianGroup,
    chi: &Character,
    h: &CyclicSubgroup,
    psi: u64,
) -> Result<u64, CoverError> {
    group.check(&chi.0)?;
    if psi.gcd(&h.order) != 1 {
        return Err(CoverError::NotAGenerator { psi, order: h.order });
    }
    // χ(generator) as a multiple of 1/|H|.
    let e = group.exponent();
    let k = group.value(chi, &h.generator) / (e / h.order);
    Ok((0..h.order).find(|r| (r * psi) % h.order == k).expect("ψ generates H*"))
}

/// `order(χ)·r/|H|`, the coefficient of `D_{H,ψ}` in the reduced building data.
pub fn reduced_coeff(group: &AbelianGroup, chi: &Character, h: &CyclicSubgroup, psi: u64) -> Result<u64, CoverError> {
    let r = exponent_from_restriction(group, chi, h, psi)?;
    let num = group.character_order(chi) * r;
    if num % h.order != 0 {
        return Err(CoverError::NonIntegral(format!("{num}/{}", h.order)));
    }
    Ok(num / h.order)
}

/// `1` when the restriction exponents of `χ` and `χ'` to `(H,ψ)` add up to at least `|H|`.
pub fn epsilon(
    group: &AbelianGroup,
    a: &Character,
    b: &Character,
    h: &CyclicSubgroup,
    psi: u64,
) -> Result<u64, CoverError> {
    let r = exponent_from_restriction(group, a, h, psi)?;
    let s = exponent_from_restriction(group, b, h, psi)?;
    Ok(u64::from(r + s >= h.order))
}

/// Branch divisors, one per slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchAssignment {
    pub subgroups: Vec<CyclicSubgroup>,
    pub slots: Vec<Slot>,
    pub divisors: Vec<DivisorClass>,
}

impl BranchAssignment {
    pub fn new(group: &AbelianGroup, divisors: Vec<DivisorClass>) -> Result<Self, CoverError> {
        let subgroups = cyclic_subgroups(group);
        let slots = branch_slots(&subgroups);
        if slots.len() != divisors.len() {
            return Err(CoverError::SlotCount { expected: slots.len(), got: divisors.len() });
        }
        Ok(BranchAssignment { subgroups, slots, divisors })
    }

    /// Reduced coefficients of `χ` grouped per subgroup, as printed in tables.
    pub fn coefficient_table(&self, group: &AbelianGroup, chi: &Character) -> Result<Vec<Vec<u64>>, CoverError> {
        let mut table = vec![Vec::new(); self.subgroups.len()];
        for s in &self.slots {
            table[s.subgroup].push(reduced_coeff(group, chi, &self.subgroups[s.subgroup], s.psi)?);
        }
        Ok(table)
    }

    /// `Σ ε^{χ,χ'}_{H,ψ} D_{H,ψ}`.
    pub fn carry(&self, group: &AbelianGroup, a: &Character, b: &Character, n: usize) -> Result<DivisorClass, CoverError> {
        let mut acc = DivisorClass::zero(n);
        for (s, d) in self.slots.iter().zip(&self.divisors) {
            if epsilon(group, a, b, &self.subgroups[s.subgroup], s.psi)? == 1 {
                acc = acc.add(d);
            }
        }
        Ok(acc)
    }
}

/// Formats a coefficient table like `[[0],[1],[1],[0,0],[1,1]]`.
pub fn format_table(table: &[Vec<u64>]) -> String {
    let inner: Vec<String> = table
        .iter()
        .map(|r| format!("[{}]", r.iter().map(u64::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", inner.join(","))
}

/// `order(χ)·L_χ − Σ reduced_coeff·D_{H,ψ}`; a valid cover makes this numerically trivial.
pub fn reduced_building_data(
    group: &AbelianGroup,
    chi: &Character,
    branch: &BranchAssignment,
    l: &DivisorClass,
) -> Result<DivisorClass, CoverError> {
    let order = group.character_order(chi) as i64;
    let mut v = l.scale_int(order);
    for (s, d) in branch.slots.iter().zip(&branch.divisors) {
        let c = reduced_coeff(group, chi, &branch.subgroups[s.subgroup], s.psi)?;
        v = v.sub(&d.scale_int(c as i64));
    }
    Ok(v)
}

/// A group, its branch divisors on a lattice, and classes for nontrivial characters.
#[derive(Clone, Debug)]
pub struct CoverData {
    pub group: AbelianGroup,
    pub branch: BranchAssignment,
    pub lattice: GramLattice,
    pub l: BTreeMap<Character, DivisorClass>,
}

impl CoverData {
    /// Checks the reduced relation for each given class.
    pub fn check_reduced(&self) -> Result<(), CoverError> {
        for (chi, l) in &self.l {
            let v = reduced_building_data(&self.group, chi, &self.branch, l)?;
            if !self.lattice.in_radical(&v.coeffs)? {
                return Err(CoverError::BadReducedData {
                    character: chi.to_string(),
                    relation: self.lattice.format_class(&v),
                });
            }
        }
        Ok(())
    }

    /// Completes `l` from generator classes, breadth first over the
    /// generators in the given order, then checks every product `χχ'`
    /// against the completed map modulo numerical equivalence.
    pub fn derive_all_l(&self) -> Result<BTreeMap<Character, DivisorClass>, CoverError> {
        let g = &self.group;
        let n = self.lattice.len();
        let gens: Vec<Character> = self.l.keys().cloned().collect();
        if !g.generates(&gens) {
            return Err(CoverError::NotGenerating);
        }
        let trivial = Character(g.identity());
        let mut all: BTreeMap<Character, DivisorClass> = BTreeMap::from([(trivial.clone(), DivisorClass::zero(n))]);
        let mut queue = VecDeque::from([trivial]);
        while let Some(chi) = queue.pop_front() {
            for gen in &gens {
                let next = g.mul_chars(&chi, gen);
                if all.contains_key(&next) {
                    continue;
                }
                let l = if g.is_trivial(&chi) {
                    self.l[gen].clone()
                } else {
                    let carry = self.branch.carry(g, &chi, gen, n)?;
                    all[&chi].add(&self.l[gen]).sub(&carry)
                };
                all.insert(next.clone(), l);
                queue.push_back(next);
            }
        }
        for (chi, l) in &self.l {
            if !self.lattice.in_radical(&all[chi].sub(l).coeffs)? {
                return Err(CoverError::InconsistentData { character: chi.to_string() });
            }
        }
        let chars: Vec<&Character> = all.keys().collect();
        for a in &chars {
            for b in &chars {
                let ab = g.mul_chars(a, b);
                let via = all[*a].add(&all[*b]).sub(&self.branch.carry(g, a, b, n)?);
                if !self.lattice.in_radical(&via.sub(&all[&ab]).coeffs)? {
                    return Err(CoverError::InconsistentData { character: ab.to_string() });
                }
            }
        }
        all.remove(&Character(g.identity()));
        Ok(all)
    }
}

fn to_integer(v: BigRational) -> Result<BigInt, CoverError> {
    if v.is_integer() {
        Ok(v.to_integer())
    } else {
        Err(CoverError::NonIntegral(v.to_string()))
    }
}

/// `½·L(K + L)` for one class.
pub fn euler_term(lattice: &GramLattice, l: &DivisorClass) -> Result<BigRational, CoverError> {
    let k = lattice.class(crate::lattice::CANONICAL).map_err(|_| CoverError::MissingCanonical)?;
    Ok(lattice.pairing(l, &k.add(l))? / BigRational::from_integer(BigInt::from(2)))
}

/// `|G|·χ(base) + Σ ½·L_χ(K + L_χ)` over the nontrivial characters.
pub fn chi_cover(
    base: &SurfaceInvariants,
    group: &AbelianGroup,
    lattice: &GramLattice,
    classes: &BTreeMap<Character, DivisorClass>,
) -> Result<BigInt, CoverError> {
    let mut acc = BigRational::from_integer(BigInt::from(group.order() as i64 * base.chi));
    for (chi, l) in classes {
        if !group.is_trivial(chi) {
            acc += euler_term(lattice, l)?;
        }
    }
    to_integer(acc)
}

/// `p_g(base) + Σ h⁰(K + L_χ)`; the `h⁰` values are inputs.
pub fn pg_cover(pg_base: i64, h0: &[i64]) -> Result<i64, CoverError> {
    if let Some((index, &value)) = h0.iter().enumerate().find(|(_, &v)| v < 0) {
        return Err(CoverError::NegativeH0 { index, value });
    }
    Ok(pg_base + h0.iter().sum::<i64>())
}

/// `K²` of an unramified-in-codimension-one cover whose canonical class is a pullback.
pub fn cover_canonical_square(group_order: u64, k2_base: i64) -> i64 {
    group_order as i64 * k2_base
}

/// A parsed cover description.
#[derive(Clone, Debug)]
pub struct CoverSpec {
    pub data: CoverData,
    pub base: SurfaceInvariants,
    /// `K²` of the minimal model below the cover, when it differs from the lattice value.
    pub base_k2: i64,
    pub h0: BTreeMap<Character, i64>,
    pub h0_default: Option<i64>,
}

fn parse_tuple(text: &str) -> Result<Element, String> {
    text.trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| format!("bad tuple entry {s:?}")))
        .collect()
}

impl CoverSpec {
    /// Line-oriented format:
    ///
    /// ```text
    /// group 2 4
    /// branch [N4+N7],[N1],[N2],[N3,N5],[N6,N8]
    /// L 1,0 = 2K - D' - N7
    /// L 1,1 = 2K - C'
    /// chi 1
    /// K2 1
    /// q 0
    /// h0 * = 0
    /// ```
    ///
    /// Branch groups follow the subgroup order; `0` marks an empty slot.
    pub fn parse(text: &str, lattice: &GramLattice) -> Result<Self, CoverError> {
        let mut group = None;
        let mut branch_text = None;
        let mut classes = Vec::new();
        let (mut chi, mut k2, mut q, mut pg) = (None, None, 0i64, None);
        let mut h0 = Vec::new();
        let mut h0_default = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| CoverError::Parse { line: i + 1, msg };
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            let int = |s: &str| s.trim().parse::<i64>().map_err(|_| perr(format!("bad integer {s:?}")));
            match key {
                "group" => {
                    let orders = rest
                        .split_whitespace()
                        .map(|s| s.parse::<u64>().map_err(|_| perr(format!("bad order {s:?}"))))
                        .collect::<Result<Vec<_>, _>>()?;
                    group = Some(AbelianGroup::new(orders)?);
                }
                "branch" => branch_text = Some((i + 1, rest.to_string())),
                "L" => {
                    let (c, expr) = rest.split_once('=').ok_or_else(|| perr("expected `L tuple = class`".into()))?;
                    let c = parse_tuple(c).map_err(perr)?;
                    let class = lattice.parse_class(expr).map_err(|e| perr(e.to_string()))?;
                    classes.push((i + 1, Character(c), class));
                }
                "h0" => {
                    let (c, v) = rest.split_once('=').ok_or_else(|| perr("expected `h0 tuple = n`".into()))?;
                    let v = int(v)?;
                    if c.trim() == "*" {
                        h0_default = Some(v);
                    } else {
                        h0.push((i + 1, parse_tuple(c).map_err(perr)?, v));
                    }
                }
                "chi" => chi = Some(int(rest)?),
                "K2" => k2 = Some(int(rest)?),
                "q" => q = int(rest)?,
                "pg" => pg = Some(int(rest)?),
                other => return Err(perr(format!("unknown key {other:?}"))),
            }
        }
        let group = group.ok_or(CoverError::Parse { line: 1, msg: "missing `group` line".into() })?;
        let (bline, btext) = branch_text.ok_or(CoverError::Parse { line: 1, msg: "missing `branch` line".into() })?;
        let divisors = parse_branch(&btext, lattice).map_err(|msg| CoverError::Parse { line: bline, msg })?;
        let branch = BranchAssignment::new(&group, divisors)?;
        let mut l = BTreeMap::new();
        for (line, c, class) in classes {
            group.check(&c.0).map_err(|e| CoverError::Parse { line, msg: e.to_string() })?;
            l.insert(c, class);
        }
        let mut h0_map = BTreeMap::new();
        for (line, c, v) in h0 {
            group.check(&c).map_err(|e| CoverError::Parse { line, msg: e.to_string() })?;
            h0_map.insert(Character(c), v);
        }
        let lattice_k2 = lattice.entry(crate::lattice::CANONICAL, crate::lattice::CANONICAL).ok();
        let k2 = k2.or(lattice_k2).ok_or(CoverError::MissingCanonical)?;
        let base = match (chi, pg) {
            (Some(c), _) => SurfaceInvariants::from_chi(c, k2, q),
            (None, Some(p)) => SurfaceInvariants::new(k2, q, p),
            (None, None) => return Err(CoverError::Parse { line: 1, msg: "missing `chi` or `pg` line".into() }),
        };
        Ok(CoverSpec {
            data: CoverData { group, branch, lattice: lattice.clone(), l },
            base,
            base_k2: k2,
            h0: h0_map,
            h0_default,
        })
    }

    /// `h⁰(K + L_χ)` for every nontrivial character, if all are declared.
    pub fn h0_values(&self) -> Option<Vec<i64>> {
        self.data
            .group
            .characters()
            .into_iter()
            .filter(|c| !self.data.group.is_trivial(c))
            .map(|c| self.h0.get(&c).copied().or(self.h0_default))
            .collect()
    }
}

fn parse_branch(text: &str, lattice: &GramLattice) -> Result<Vec<DivisorClass>, String> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest.strip_prefix('[').ok_or("expected `[`")?;
        let end = body.find(']').ok_or("unclosed `[`")?;
        for part in body[..end].split(',') {
            out.push(lattice.parse_class(part).map_err(|e| e.to_string())?);
        }
        rest = body[end + 1..].trim_start().trim_start_matches(',').trim_start();
    }
    Ok(out)
}

/// The `ℤ/2 × ℤ/4` cover of the 2A1+2A3 fixture.
pub const GODEAUX_COVER: &str = "\
group 2 4
branch [N4+N7],[N1],[N2],[N3,N5],[N6,N8]
L 1,0 = 2K - D' - N7
L 1,1 = 2K - C'
chi 1
K2 1
q 0
h0 * = 0
";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::godeaux_extended;

    fn z2z4() -> AbelianGroup {
        AbelianGroup::new(vec![2, 4]).unwrap()
    }

    #[test]
    fn subgroups() {
        let g = z2z4();
        let subs = cyclic_subgroups(&g);
        let gens: Vec<(u64, Element)> = subs.iter().map(|h| (h.order, h.generator.clone())).collect();
        assert_eq!(
            gens,
            vec![(2, vec![0, 2]), (2, vec![1, 0]), (2, vec![1, 2]), (4, vec![0, 1]), (4, vec![1, 1])]
        );
        assert_eq!(branch_slots(&subs).len(), 7);
        assert_eq!(cyclic_subgroups(&AbelianGroup::new(vec![2]).unwrap()).len(), 1);
        let z3z3 = AbelianGroup::new(vec![3, 3]).unwrap();
        let s = cyclic_subgroups(&z3z3);
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|h| h.order == 3));
        assert!(AbelianGroup::new(vec![1]).is_err());
    }

    #[test]
    fn restriction_exponents() {
        let g = z2z4();
        let subs = cyclic_subgroups(&g);
        let triv = Character(vec![0, 0]);
        for h in &subs {
            assert_eq!(exponent_from_restriction(&g, &triv, h, 1).unwrap(), 0);
        }
        // Order-2 character nontrivial on the subgroup generated by (1,0).
        assert_eq!(exponent_from_restriction(&g, &Character(vec![1, 0]), &subs[1], 1).unwrap(), 1);
        // (0,3) sends (0,1) to 3/4, which is ψ^3 for ψ(0,1) = 1/4.
        assert_eq!(exponent_from_restriction(&g, &Character(vec![0, 3]), &subs[3], 1).unwrap(), 3);
        assert_eq!(
            exponent_from_restriction(&g, &triv, &subs[3], 2),
            Err(CoverError::NotAGenerator { psi: 2, order: 4 })
        );
        assert_eq!(reduced_coeff(&g, &Character(vec![0, 1]), &subs[0], 1).unwrap(), 2);
    }

    #[test]
    fn epsilon_values() {
        let g = z2z4();
        let subs = cyclic_subgroups(&g);
        let (a, b) = (Character(vec![0, 1]), Character(vec![0, 3]));
        assert_eq!(epsilon(&g, &Character(vec![0, 0]), &a, &subs[3], 1).unwrap(), 0);
        assert_eq!(epsilon(&g, &a, &b, &subs[3], 1).unwrap(), 1);
        assert_eq!(epsilon(&g, &a, &Character(vec![0, 2]), &subs[3], 1).unwrap(), 0);
        assert_eq!(epsilon(&g, &Character(vec![1, 0]), &Character(vec![1, 0]), &subs[1], 1).unwrap(), 1);
    }

    #[test]
    fn fixture_tables() {
        let g = z2z4();
        let l = godeaux_extended();
        let spec = CoverSpec::parse(GODEAUX_COVER, &l).unwrap();
        let b = &spec.data.branch;
        assert_eq!(format_table(&b.coefficient_table(&g, &Character(vec![1, 0])).unwrap()), "[[0],[1],[1],[0,0],[1,1]]");
        assert_eq!(format_table(&b.coefficient_table(&g, &Character(vec![1, 1])).unwrap()), "[[2],[2],[0],[1,3],[3,1]]");
    }

    #[test]
    fn fixture_cover_invariants() {
        let l = godeaux_extended();
        let spec = CoverSpec::parse(GODEAUX_COVER, &l).unwrap();
        spec.data.check_reduced().unwrap();
        let all = spec.data.derive_all_l().unwrap();
        assert_eq!(all.len(), 7);
        for c in all.values() {
            assert_eq!(euler_term(&l, c).unwrap(), BigRational::from_integer((-1).into()));
        }
        let l3 = l.parse_class("4K - 2C' - N1 - N4 - N5 - N6 - N7").unwrap();
        assert!(l.in_radical(&all[&Character(vec![0, 2])].sub(&l3).coeffs).unwrap());
        let chi = chi_cover(&spec.base, &spec.data.group, &l, &all).unwrap();
        assert_eq!(chi, BigInt::from(1));
        assert_eq!(pg_cover(0, &spec.h0_values().unwrap()).unwrap(), 0);
        assert_eq!(cover_canonical_square(8, spec.base_k2), 8);
    }

    #[test]
    fn bad_generator_class_is_caught() {
        let l = godeaux_extended();
        let text = GODEAUX_COVER.replace("L 1,1 = 2K - C'", "L 1,1 = 2K - D'");
        let spec = CoverSpec::parse(&text, &l).unwrap();
        assert!(matches!(spec.data.check_reduced(), Err(CoverError::BadReducedData { .. })));
        assert!(matches!(spec.data.derive_all_l(), Err(CoverError::InconsistentData { .. })));
    }

    #[test]
    fn trivial_cover() {
        let l = godeaux_extended();
        let g = z2z4();
        let zero = DivisorClass::zero(l.len());
        let branch = BranchAssignment::new(&g, vec![zero.clone(); 7]).unwrap();
        let data = CoverData {
            group: g.clone(),
            branch: branch.clone(),
            lattice: l.clone(),
            l: BTreeMap::from([(Character(vec![1, 0]), zero.clone()), (Character(vec![0, 1]), zero.clone())]),
        };
        assert!(reduced_building_data(&g, &Character(vec![0, 1]), &branch, &zero).unwrap().is_zero());
        let all = data.derive_all_l().unwrap();
        assert!(all.values().all(DivisorClass::is_zero));
        let base = SurfaceInvariants::from_chi(1, 1, 0);
        assert_eq!(chi_cover(&base, &g, &l, &all).unwrap(), BigInt::from(8));
    }

    #[test]
    fn pg_and_square() {
        assert_eq!(pg_cover(0, &[1, 0, 0]).unwrap(), 1);
        assert_eq!(pg_cover(2, &[]).unwrap(), 2);
        assert_eq!(pg_cover(0, &[0, -1]), Err(CoverError::NegativeH0 { index: 1, value: -1 }));
        assert_eq!(cover_canonical_square(1, 5), 5);
        assert_eq!(cover_canonical_square(2, 2), 4);
    }

    #[test]
    fn slot_count_mismatch() {
        let l = godeaux_extended();
        let text = GODEAUX_COVER.replace("[N6,N8]", "[N6]");
        assert!(matches!(CoverSpec::parse(&text, &l), Err(CoverError::SlotCount { expected: 7, got: 6 })));
    }

    #[test]
    fn not_generating() {
        let l = godeaux_extended();
        let text = GODEAUX_COVER.replace("L 1,1 = 2K - C'", "");
        let spec = CoverSpec::parse(&text, &l).unwrap();
        assert_eq!(spec.data.derive_all_l().unwrap_err(), CoverError::NotGenerating);
    }
}
