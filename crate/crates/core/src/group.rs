//! Finite abelian groups `Z_{n1} × … × Z_{nk}`, their characters, subgroups
//! and quotients.
//!
//! Elements are addressed by a mixed-radix index whose order agrees with the
//! lexicographic order of coordinate tuples, so sorting indices sorts
//! elements.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::TorusExponent;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    orders: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    pub coords: Vec<u64>,
}

/// `χ_y(x) = exp(2πi Σ_j x_j y_j / n_j)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Character {
    pub coords: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        if let Some(pos) = orders.iter().position(|&n| n == 0) {
            return Err(Error::Input(format!("cyclic order at position {pos} must be positive")));
        }
        Ok(FiniteAbelianGroup { orders })
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> usize {
        self.orders.iter().product::<u64>() as usize
    }

    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |acc, n| acc.lcm(n))
    }

    /// `self × other`, coordinates of `self` first.
    pub fn product(&self, other: &FiniteAbelianGroup) -> FiniteAbelianGroup {
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        FiniteAbelianGroup { orders }
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.rank()],
        }
    }

    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::Input(format!(
                "element has {} coordinates, group has {}",
                coords.len(),
                self.rank()
            )));
        }
        Ok(GroupElement {
            coords: coords
                .iter()
                .zip(&self.orders)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as u64)
                .collect(),
        })
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.coords.len() == self.rank() && x.coords.iter().zip(&self.orders).all(|(c, n)| c < n)
    }

    pub fn check(&self, x: &GroupElement) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Input(format!("{x} is not an element of {self}")))
        }
    }

    pub fn index_of(&self, x: &GroupElement) -> usize {
        x.coords
            .iter()
            .zip(&self.orders)
            .fold(0usize, |acc, (&c, &n)| acc * n as usize + c as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![0; self.rank()];
        for (slot, &n) in coords.iter_mut().zip(&self.orders).rev() {
            *slot = (index % n as usize) as u64;
            index /= n as usize;
        }
        GroupElement { coords }
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(move |i| self.element_at(i))
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement {
            coords: x
                .coords
                .iter()
                .zip(&y.coords)
                .zip(&self.orders)
                .map(|((a, b), n)| (a + b) % n)
                .collect(),
        }
    }

    pub fn neg(&self, x: &GroupElement) -> GroupElement {
        GroupElement {
            coords: x.coords.iter().zip(&self.orders).map(|(a, n)| (n - a) % n).collect(),
        }
    }

    pub fn sub(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        self.add(x, &self.neg(y))
    }

    pub fn scale(&self, k: i64, x: &GroupElement) -> GroupElement {
        GroupElement {
            coords: x
                .coords
                .iter()
                .zip(&self.orders)
                .map(|(&a, &n)| ((a as i128 * k as i128).rem_euclid(n as i128)) as u64)
                .collect(),
        }
    }

    /// Order of `x` as a group element.
    pub fn element_order(&self, x: &GroupElement) -> u64 {
        x.coords
            .iter()
            .zip(&self.orders)
            .fold(1, |acc, (&a, &n)| acc.lcm(&(n / a.gcd(&n))))
    }

    /// Precomputed addition table on indices, `table[i * |G| + j] = i + j`.
    pub fn addition_table(&self) -> Vec<usize> {
        let n = self.order();
        let elems: Vec<_> = self.elements().collect();
        let mut table = vec![0; n * n];
        for (i, x) in elems.iter().enumerate() {
            for (j, y) in elems.iter().enumerate() {
                table[i * n + j] = self.index_of(&self.add(x, y));
            }
        }
        table
    }

    pub fn negation_table(&self) -> Vec<usize> {
        self.elements().map(|x| self.index_of(&self.neg(&x))).collect()
    }

    pub fn character(&self, coords: &[i64]) -> Result<Character> {
        Ok(Character {
            coords: self.element(coords)?.coords,
        })
    }

    /// All characters, in the same lexicographic order as the elements.
    pub fn characters(&self) -> impl Iterator<Item = Character> + '_ {
        self.elements().map(|e| Character { coords: e.coords })
    }

    /// `χ(x)`, exact.
    pub fn character_eval(&self, chi: &Character, x: &GroupElement) -> TorusExponent {
        let m = self.exponent();
        let k = chi
            .coords
            .iter()
            .zip(&x.coords)
            .zip(&self.orders)
            .fold(0u128, |acc, ((&c, &a), &n)| {
                (acc + c as u128 * a as u128 * (m / n) as u128) % m as u128
            });
        TorusExponent::root(k as u64, m)
    }
}

/// Parses `"2"`, `"2x2"`, `"2×3"`.
impl FromStr for FiniteAbelianGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut orders = Vec::new();
        let mut offset = 0;
        for part in s.split(['x', 'X', '×']) {
            let trimmed = part.trim();
            let n: u64 = trimmed.parse().map_err(|_| {
                Error::Input(format!(
                    "group spec {s:?}: invalid cyclic order {trimmed:?} at position {offset}"
                ))
            })?;
            if n == 0 {
                return Err(Error::Input(format!(
                    "group spec {s:?}: cyclic order at position {offset} must be positive"
                )));
            }
            orders.push(n);
            offset += part.len() + 1;
        }
        Self::new(orders)
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.orders.iter().map(|n| format!("Z{n}")).collect();
        if parts.is_empty() {
            f.write_str("{0}")
        } else {
            f.write_str(&parts.join("×"))
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A subgroup stored as the sorted set of its element indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Subgroup {
    parent: FiniteAbelianGroup,
    elements: Vec<GroupElement>,
    generators: Vec<GroupElement>,
    #[serde(skip)]
    indices: Vec<usize>,
}

impl Subgroup {
    fn from_index_set(parent: &FiniteAbelianGroup, indices: Vec<usize>, generators: Vec<GroupElement>) -> Self {
        Subgroup {
            elements: indices.iter().map(|&i| parent.element_at(i)).collect(),
            parent: parent.clone(),
            generators,
            indices,
        }
    }

    /// Builds the subgroup with exactly the given element indices, choosing
    /// generators greedily in lexicographic order. Fails if the set is not a
    /// subgroup.
    pub fn from_indices(parent: &FiniteAbelianGroup, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        let mut member = vec![false; parent.order()];
        for &i in &indices {
            if i >= member.len() {
                return Err(Error::Input(format!("element index {i} out of range")));
            }
            member[i] = true;
        }
        let mut gens = Vec::new();
        let mut span = closure(parent, &[]);
        for &i in &indices {
            if span.binary_search(&i).is_err() {
                gens.push(parent.element_at(i));
                span = closure(parent, &gens);
            }
        }
        if span != indices {
            return Err(Error::Input("element set is not closed under addition".into()));
        }
        Ok(Self::from_index_set(parent, indices, gens))
    }

    pub fn parent(&self) -> &FiniteAbelianGroup {
        &self.parent
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    /// Sorted element indices in the parent.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn order(&self) -> usize {
        self.indices.len()
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.parent.contains(x) && self.contains_index(self.parent.index_of(x))
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.indices.iter().all(|&i| other.contains_index(i))
    }

    pub fn same_elements(&self, other: &Subgroup) -> bool {
        self.indices == other.indices
    }

    /// Exponent of the subgroup (lcm of element orders).
    pub fn exponent(&self) -> u64 {
        self.elements
            .iter()
            .fold(1, |acc, x| acc.lcm(&self.parent.element_order(x)))
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.elements.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn closure(group: &FiniteAbelianGroup, gens: &[GroupElement]) -> Vec<usize> {
    let mut member = vec![false; group.order()];
    let zero = group.index_of(&group.zero());
    member[zero] = true;
    let mut current = vec![group.zero()];
    for g in gens {
        let mut next = current.clone();
        for x in &current {
            let mut y = group.add(x, g);
            loop {
                let iy = group.index_of(&y);
                if member[iy] {
                    break;
                }
                member[iy] = true;
                next.push(y.clone());
                y = group.add(&y, g);
            }
        }
        current = next;
    }
    let mut out: Vec<usize> = member.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect();
    out.sort_unstable();
    out
}

/// The smallest subgroup containing `gens`.
pub fn generated_subgroup(group: &FiniteAbelianGroup, gens: &[GroupElement]) -> Result<Subgroup> {
    for g in gens {
        group.check(g)?;
    }
    Ok(Subgroup::from_index_set(group, closure(group, gens), gens.to_vec()))
}

/// Every subgroup (optionally only those of a given order), ordered
/// lexicographically by their sorted element lists.
///
/// A subgroup of a group with `k` cyclic factors needs at most `k`
/// generators, so `k` rounds of joining a cyclic subgroup reach them all.
pub fn enumerate_subgroups(group: &FiniteAbelianGroup, order: Option<usize>) -> Result<Vec<Subgroup>> {
    if let Some(o) = order {
        if o == 0 || !group.order().is_multiple_of(o) {
            return Err(Error::Input(format!(
                "order {o} does not divide |G| = {}",
                group.order()
            )));
        }
    }
    let elems: Vec<GroupElement> = group.elements().collect();
    let mut found: BTreeMap<Vec<usize>, Vec<GroupElement>> = BTreeMap::new();
    found.insert(closure(group, &[]), Vec::new());
    let mut frontier: Vec<(Vec<usize>, Vec<GroupElement>)> = vec![(closure(group, &[]), Vec::new())];
    for _ in 0..group.rank() {
        let mut next = Vec::new();
        for (set, gens) in &frontier {
            for (i, g) in elems.iter().enumerate() {
                if set.binary_search(&i).is_ok() {
                    continue;
                }
                let mut new_gens = gens.clone();
                new_gens.push(g.clone());
                let span = closure(group, &new_gens);
                if !found.contains_key(&span) {
                    found.insert(span.clone(), new_gens.clone());
                    next.push((span, new_gens));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(found
        .into_iter()
        .filter(|(set, _)| order.is_none_or(|o| set.len() == o))
        .map(|(set, gens)| Subgroup::from_index_set(group, set, gens))
        .collect())
}

/// Cosets of `subgroup` with lexicographically minimal representatives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientData {
    pub coset_reps: Vec<GroupElement>,
    /// Coset number of every element of the parent, by element index.
    pub index_of: Vec<usize>,
    #[serde(skip)]
    rep_indices: Vec<usize>,
}

impl QuotientData {
    pub fn len(&self) -> usize {
        self.coset_reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coset_reps.is_empty()
    }

    /// Parent index of the representative of coset `c`.
    pub fn rep_index(&self, c: usize) -> usize {
        self.rep_indices[c]
    }

    pub fn coset(&self, element_index: usize) -> usize {
        self.index_of[element_index]
    }
}

pub fn quotient(group: &FiniteAbelianGroup, subgroup: &Subgroup) -> Result<QuotientData> {
    if subgroup.parent() != group {
        return Err(Error::Input("subgroup belongs to a different group".into()));
    }
    let n = group.order();
    let mut index_of = vec![usize::MAX; n];
    let mut coset_reps = Vec::new();
    let mut rep_indices = Vec::new();
    for i in 0..n {
        if index_of[i] != usize::MAX {
            continue;
        }
        let c = coset_reps.len();
        let x = group.element_at(i);
        for h in subgroup.elements() {
            index_of[group.index_of(&group.add(&x, h))] = c;
        }
        coset_reps.push(x);
        rep_indices.push(i);
    }
    Ok(QuotientData {
        coset_reps,
        index_of,
        rep_indices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(orders: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(orders.to_vec()).unwrap()
    }

    fn e(group: &FiniteAbelianGroup, c: &[i64]) -> GroupElement {
        group.element(c).unwrap()
    }

    #[test]
    fn parse_group_specs() {
        assert_eq!("2x2".parse::<FiniteAbelianGroup>().unwrap().orders(), &[2, 2]);
        assert_eq!("3".parse::<FiniteAbelianGroup>().unwrap().order(), 3);
        assert!("0".parse::<FiniteAbelianGroup>().is_err());
        assert!("2xa".parse::<FiniteAbelianGroup>().is_err());
        assert_eq!(g(&[4, 6]).exponent(), 12);
    }

    #[test]
    fn index_order_is_lexicographic() {
        let grp = g(&[2, 3]);
        let elems: Vec<_> = grp.elements().collect();
        let mut sorted = elems.clone();
        sorted.sort();
        assert_eq!(elems, sorted);
        for (i, x) in elems.iter().enumerate() {
            assert_eq!(grp.index_of(x), i);
        }
    }

    #[test]
    fn generated_subgroup_examples() {
        let grp = g(&[2, 2]);
        let h = generated_subgroup(&grp, &[e(&grp, &[1, 1])]).unwrap();
        assert_eq!(h.elements(), &[e(&grp, &[0, 0]), e(&grp, &[1, 1])]);
        let trivial = generated_subgroup(&grp, &[]).unwrap();
        assert_eq!(trivial.elements(), &[grp.zero()]);
        let all = generated_subgroup(&grp, &[e(&grp, &[1, 0]), e(&grp, &[0, 1])]).unwrap();
        assert_eq!(all.order(), 4);
        let bad = GroupElement { coords: vec![2, 0] };
        assert!(generated_subgroup(&grp, &[bad]).is_err());
    }

    /// Brute force: close every subset of elements.
    fn brute_force_subgroup_count(grp: &FiniteAbelianGroup) -> usize {
        let elems: Vec<_> = grp.elements().collect();
        let mut seen = std::collections::BTreeSet::new();
        for mask in 0u32..(1 << elems.len()) {
            let gens: Vec<_> = (0..elems.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| elems[i].clone())
                .collect();
            seen.insert(closure(grp, &gens));
        }
        seen.len()
    }

    #[test]
    fn enumerate_subgroups_examples() {
        let z2z2 = g(&[2, 2]);
        assert_eq!(brute_force_subgroup_count(&z2z2), 5);
        assert_eq!(enumerate_subgroups(&z2z2, None).unwrap().len(), 5);
        let z3z3 = g(&[3, 3]);
        assert_eq!(enumerate_subgroups(&z3z3, Some(3)).unwrap().len(), 4);
        let ones = enumerate_subgroups(&g(&[4, 2]), Some(1)).unwrap();
        assert_eq!(ones.len(), 1);
        assert_eq!(ones[0].order(), 1);
        assert!(enumerate_subgroups(&z2z2, Some(3)).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for orders in [&[4][..], &[2, 4], &[6], &[2, 2, 2], &[3, 3], &[4, 4]] {
            let grp = g(orders);
            if grp.order() <= 16 {
                assert_eq!(
                    enumerate_subgroups(&grp, None).unwrap().len(),
                    brute_force_subgroup_count(&grp),
                    "{grp}"
                );
            }
        }
        // Z4×Z4 has 15 subgroups
        assert_eq!(enumerate_subgroups(&g(&[4, 4]), None).unwrap().len(), 15);
    }

    #[test]
    fn enumeration_is_sorted_and_closed() {
        let grp = g(&[2, 6]);
        let subs = enumerate_subgroups(&grp, None).unwrap();
        for w in subs.windows(2) {
            assert!(w[0].elements() < w[1].elements());
        }
        for s in &subs {
            assert_eq!(grp.order() % s.order(), 0);
            let regen = generated_subgroup(&grp, s.generators()).unwrap();
            assert!(regen.same_elements(s));
            let again = generated_subgroup(&grp, s.elements()).unwrap();
            assert!(again.same_elements(s));
        }
    }

    #[test]
    fn quotient_examples() {
        let grp = g(&[2, 2]);
        let h = generated_subgroup(&grp, &[e(&grp, &[1, 1])]).unwrap();
        let q = quotient(&grp, &h).unwrap();
        assert_eq!(q.coset_reps, vec![e(&grp, &[0, 0]), e(&grp, &[0, 1])]);

        let trivial = generated_subgroup(&grp, &[]).unwrap();
        let q = quotient(&grp, &trivial).unwrap();
        assert_eq!(q.coset_reps, grp.elements().collect::<Vec<_>>());

        let all = generated_subgroup(&grp, &[e(&grp, &[1, 0]), e(&grp, &[0, 1])]).unwrap();
        let q = quotient(&grp, &all).unwrap();
        assert_eq!(q.coset_reps, vec![grp.zero()]);
    }

    #[test]
    fn quotient_invariants() {
        let grp = g(&[2, 4]);
        for h in enumerate_subgroups(&grp, None).unwrap() {
            let q = quotient(&grp, &h).unwrap();
            assert_eq!(q.len() * h.order(), grp.order());
            for x in grp.elements() {
                let ix = grp.index_of(&x);
                for y in h.elements() {
                    assert_eq!(q.coset(ix), q.coset(grp.index_of(&grp.add(&x, y))));
                }
                // the representative is minimal in its coset
                assert!(q.coset_reps[q.coset(ix)] <= x);
            }
        }
    }

    #[test]
    fn character_values() {
        let z3 = g(&[3]);
        let phi1 = z3.character(&[1]).unwrap();
        assert_eq!(z3.character_eval(&phi1, &e(&z3, &[2])), TorusExponent::root(2, 3));
        let phi0 = z3.character(&[0]).unwrap();
        for x in z3.elements() {
            assert!(z3.character_eval(&phi0, &x).is_one());
        }
        assert!(z3.character_eval(&phi1, &z3.zero()).is_one());
    }

    fn group_and_three() -> impl Strategy<Value = (FiniteAbelianGroup, usize, usize, usize)> {
        prop::collection::vec(1u64..7, 1..4).prop_flat_map(|orders| {
            let grp = FiniteAbelianGroup::new(orders).unwrap();
            let n = grp.order();
            (Just(grp), 0..n, 0..n, 0..n)
        })
    }

    proptest! {
        #[test]
        fn characters_are_homomorphisms((grp, a, b, c) in group_and_three()) {
            let chi = Character { coords: grp.element_at(a).coords };
            let x = grp.element_at(b);
            let y = grp.element_at(c);
            prop_assert_eq!(
                grp.character_eval(&chi, &grp.add(&x, &y)),
                grp.character_eval(&chi, &x) * grp.character_eval(&chi, &y)
            );
        }

        #[test]
        fn index_round_trips((grp, a, _b, _c) in group_and_three()) {
            prop_assert_eq!(grp.index_of(&grp.element_at(a)), a);
        }
    }
}
