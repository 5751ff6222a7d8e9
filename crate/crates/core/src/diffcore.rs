//! Multiset difference operators.
//!
//! Direction convention: a difference between `A` and `B` always counts
//! `x - y` with `x` taken from the first argument. "Outgoing" differences of
//! set `i` take `x` from `A_i`; "incoming" differences of set `j` take `y`
//! from `A_j`. The two are negation reflections of each other.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{Element, FiniteAbelianGroup};

/// An ordered list of element subsets of a group.
///
/// Elements inside each set are kept in canonical group order; the order of
/// the sets themselves is preserved. Families built with [`SetFamily::new`]
/// are pairwise disjoint; [`SetFamily::blocks`] relaxes that for classical
/// difference families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    group: FiniteAbelianGroup,
    sets: Vec<Vec<Element>>,
    indices: Vec<Vec<usize>>,
    disjoint: bool,
}

impl SetFamily {
    /// A family of pairwise disjoint nonempty sets.
    pub fn new(group: FiniteAbelianGroup, sets: Vec<Vec<Element>>) -> Result<Self> {
        let fam = Self::blocks(group, sets)?;
        if let Some((element, first, second)) = fam.first_overlap() {
            return Err(Error::Disjointness { element: element.to_string(), first, second });
        }
        Ok(fam)
    }

    /// A list of blocks that may share elements.
    pub fn blocks(group: FiniteAbelianGroup, sets: Vec<Vec<Element>>) -> Result<Self> {
        let mut sorted_sets = Vec::with_capacity(sets.len());
        let mut indices = Vec::with_capacity(sets.len());
        for (i, set) in sets.into_iter().enumerate() {
            if set.is_empty() {
                return Err(Error::EmptySet(i));
            }
            let mut idx = Vec::with_capacity(set.len());
            for e in &set {
                idx.push(group.index_of(e)?);
            }
            let mut pairs: Vec<(usize, Element)> = idx.into_iter().zip(set).collect();
            pairs.sort_by_key(|(k, _)| *k);
            if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::DuplicateElement { element: w[0].1.to_string(), set: i });
            }
            indices.push(pairs.iter().map(|(k, _)| *k).collect());
            sorted_sets.push(pairs.into_iter().map(|(_, e)| e).collect());
        }
        let mut fam = SetFamily { group, sets: sorted_sets, indices, disjoint: true };
        fam.disjoint = fam.first_overlap().is_none();
        Ok(fam)
    }

    /// Family from canonical element indices.
    pub fn from_indices(group: FiniteAbelianGroup, sets: &[Vec<usize>]) -> Result<Self> {
        let mut elems = Vec::with_capacity(sets.len());
        for s in sets {
            let mut v = Vec::with_capacity(s.len());
            for &i in s {
                if i >= group.order() {
                    return Err(Error::ElementDomain(format!("index {i} outside {group}")));
                }
                v.push(group.element_at(i));
            }
            elems.push(v);
        }
        Self::new(group, elems)
    }

    fn first_overlap(&self) -> Option<(Element, usize, usize)> {
        let mut owner = vec![usize::MAX; self.group.order()];
        for (i, set) in self.indices.iter().enumerate() {
            for &x in set {
                if owner[x] != usize::MAX {
                    return Some((self.group.element_at(x), owner[x], i));
                }
                owner[x] = i;
            }
        }
        None
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn sets(&self) -> &[Vec<Element>] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> Result<&[Element]> {
        self.sets
            .get(i)
            .map(Vec::as_slice)
            .ok_or(Error::IndexOutOfRange { index: i, len: self.sets.len() })
    }

    pub fn index_sets(&self) -> &[Vec<usize>] {
        &self.indices
    }

    /// Number of sets, m.
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sets.iter().map(Vec::len).collect()
    }

    /// Total number of elements, a.
    pub fn total_size(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    pub fn is_disjoint(&self) -> bool {
        self.disjoint
    }

    /// Every set has the same size.
    pub fn uniform_size(&self) -> Option<usize> {
        let k = self.sets.first()?.len();
        self.sets.iter().all(|s| s.len() == k).then_some(k)
    }

    /// The sets cover the whole group.
    pub fn is_partition(&self) -> bool {
        self.disjoint && self.total_size() == self.group.order()
    }

    pub fn require_disjoint(&self) -> Result<()> {
        match self.first_overlap() {
            None => Ok(()),
            Some((element, first, second)) => {
                Err(Error::Disjointness { element: element.to_string(), first, second })
            }
        }
    }
}

/// `{"group": {"cyclic": [...]}, "sets": [[[x], ...], ...]}`.
impl Serialize for SetFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("group", &self.group)?;
        map.serialize_entry("sets", &self.sets)?;
        map.end()
    }
}

/// Exact multiset of nonzero group elements.
///
/// Absent elements have count zero; the identity never carries a count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyMap {
    group: FiniteAbelianGroup,
    counts: Vec<u64>,
}

impl FrequencyMap {
    pub fn empty(group: &FiniteAbelianGroup) -> Self {
        FrequencyMap { group: group.clone(), counts: vec![0; group.order()] }
    }

    pub(crate) fn from_counts(group: &FiniteAbelianGroup, counts: Vec<u64>) -> Self {
        debug_assert_eq!(counts.len(), group.order());
        debug_assert_eq!(counts[0], 0);
        FrequencyMap { group: group.clone(), counts }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn get(&self, g: &Element) -> u64 {
        self.group.index_of(g).map(|i| self.counts[i]).unwrap_or(0)
    }

    pub fn get_index(&self, i: usize) -> u64 {
        self.counts[i]
    }

    /// Dense counts indexed by canonical element index.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Nonzero entries in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (Element, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (self.group.element_at(i), c))
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn max(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// The common count if every nonzero element occurs equally often.
    pub fn uniform_count(&self) -> Option<u64> {
        let first = *self.counts.get(1)?;
        self.counts[1..].iter().all(|&c| c == first).then_some(first)
    }

    /// First nonzero element (canonical order) whose count differs from
    /// `required`, with its observed count.
    pub fn first_deviation(&self, required: u64) -> Option<(Element, u64)> {
        (1..self.counts.len())
            .find(|&i| self.counts[i] != required)
            .map(|i| (self.group.element_at(i), self.counts[i]))
    }

    /// First nonzero element whose count exceeds `bound`.
    pub fn first_exceeding(&self, bound: u64) -> Option<(Element, u64)> {
        (1..self.counts.len())
            .find(|&i| self.counts[i] > bound)
            .map(|i| (self.group.element_at(i), self.counts[i]))
    }

    /// The map `g -> count(-g)`.
    pub fn negated(&self) -> FrequencyMap {
        let mut counts = vec![0; self.counts.len()];
        for (i, &c) in self.counts.iter().enumerate() {
            counts[self.group.neg_index(i)] = c;
        }
        FrequencyMap { group: self.group.clone(), counts }
    }

    pub fn is_negation_symmetric(&self) -> bool {
        (0..self.counts.len()).all(|i| self.counts[i] == self.counts[self.group.neg_index(i)])
    }

    /// Count-wise sum.
    pub fn merge(&mut self, other: &FrequencyMap) {
        assert_eq!(self.group, other.group, "frequency maps over different groups");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// Two-row table of every nonzero element and its count.
    pub fn render_table(&self) -> String {
        let heads: Vec<String> = self.group.nonzero_elements().map(|e| e.to_string()).collect();
        let vals: Vec<String> = self.counts[1..].iter().map(u64::to_string).collect();
        let w = heads.iter().chain(&vals).map(String::len).max().unwrap_or(1);
        let mut out = String::new();
        let _ = write!(out, "difference");
        for h in &heads {
            let _ = write!(out, " {h:>w$}");
        }
        out.push('\n');
        let _ = write!(out, "frequency ");
        for v in &vals {
            let _ = write!(out, " {v:>w$}");
        }
        out.push('\n');
        out
    }
}

impl Serialize for FrequencyMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<(Element, u64)> = self.iter().collect();
        let mut map = serializer.serialize_map(Some(entries.len()))?;
        for (e, c) in entries {
            let key = serde_json::to_string(&e).map_err(serde::ser::Error::custom)?;
            map.serialize_entry(&key, &c)?;
        }
        map.end()
    }
}

fn indices_of(group: &FiniteAbelianGroup, set: &[Element], pos: usize) -> Result<Vec<usize>> {
    if set.is_empty() {
        return Err(Error::EmptySet(pos));
    }
    let mut seen = HashSet::with_capacity(set.len());
    let mut out = Vec::with_capacity(set.len());
    for e in set {
        let i = group.index_of(e)?;
        if !seen.insert(i) {
            return Err(Error::DuplicateElement { element: e.to_string(), set: pos });
        }
        out.push(i);
    }
    Ok(out)
}

fn accumulate_cross(group: &FiniteAbelianGroup, a: &[usize], b: &[usize], counts: &mut [u64]) {
    for &x in a {
        for &y in b {
            counts[group.sub_index(x, y)] += 1;
        }
    }
}

fn accumulate_internal(group: &FiniteAbelianGroup, a: &[usize], counts: &mut [u64]) {
    for &x in a {
        for &y in a {
            if x != y {
                counts[group.sub_index(x, y)] += 1;
            }
        }
    }
}

/// `D(A) = { x - y : x, y in A, x != y }`.
pub fn internal_differences(group: &FiniteAbelianGroup, set: &[Element]) -> Result<FrequencyMap> {
    let a = indices_of(group, set, 0)?;
    let mut counts = vec![0; group.order()];
    accumulate_internal(group, &a, &mut counts);
    Ok(FrequencyMap::from_counts(group, counts))
}

/// `D(A, B) = { x - y : x in A, y in B }` for disjoint `A`, `B`.
pub fn cross_differences(group: &FiniteAbelianGroup, a: &[Element], b: &[Element]) -> Result<FrequencyMap> {
    let ai = indices_of(group, a, 0)?;
    let bi = indices_of(group, b, 1)?;
    let bset: HashSet<usize> = bi.iter().copied().collect();
    if let Some(&x) = ai.iter().find(|x| bset.contains(x)) {
        return Err(Error::Disjointness { element: group.element_at(x).to_string(), first: 0, second: 1 });
    }
    let mut counts = vec![0; group.order()];
    accumulate_cross(group, &ai, &bi, &mut counts);
    Ok(FrequencyMap::from_counts(group, counts))
}

fn require_external(family: &SetFamily) -> Result<()> {
    if family.len() < 2 {
        return Err(Error::TrivialFamily(family.len()));
    }
    family.require_disjoint()
}

/// Sum of internal differences over every block.
pub fn summed_internal_differences(family: &SetFamily) -> FrequencyMap {
    let g = family.group();
    let mut counts = vec![0; g.order()];
    for set in family.index_sets() {
        accumulate_internal(g, set, &mut counts);
    }
    FrequencyMap::from_counts(g, counts)
}

/// Union of `D(A_i, A_j)` over all ordered pairs `i != j`.
pub fn external_difference_multiset(family: &SetFamily) -> Result<FrequencyMap> {
    require_external(family)?;
    let g = family.group();
    let sets = family.index_sets();
    let mut counts = vec![0; g.order()];
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate() {
            if i != j {
                accumulate_cross(g, a, b, &mut counts);
            }
        }
    }
    Ok(FrequencyMap::from_counts(g, counts))
}

fn check_index(family: &SetFamily, i: usize) -> Result<()> {
    if i >= family.len() {
        Err(Error::IndexOutOfRange { index: i, len: family.len() })
    } else {
        Ok(())
    }
}

/// Union of `D(A_i, A_j)` over `j != i` (0-based `i`).
pub fn outgoing_differences(family: &SetFamily, i: usize) -> Result<FrequencyMap> {
    check_index(family, i)?;
    require_external(family)?;
    let g = family.group();
    let sets = family.index_sets();
    let mut counts = vec![0; g.order()];
    for (j, b) in sets.iter().enumerate() {
        if j != i {
            accumulate_cross(g, &sets[i], b, &mut counts);
        }
    }
    Ok(FrequencyMap::from_counts(g, counts))
}

/// Union of `D(A_i, A_j)` over `i != j` for fixed `j` (0-based): the
/// differences landing in `A_j`.
pub fn incoming_differences(family: &SetFamily, j: usize) -> Result<FrequencyMap> {
    check_index(family, j)?;
    require_external(family)?;
    let g = family.group();
    let sets = family.index_sets();
    let mut counts = vec![0; g.order()];
    for (i, a) in sets.iter().enumerate() {
        if i != j {
            accumulate_cross(g, a, &sets[j], &mut counts);
        }
    }
    Ok(FrequencyMap::from_counts(g, counts))
}

/// Sum of outgoing differences over a class of equally sized sets.
pub fn class_differences(family: &SetFamily, class: &[usize]) -> Result<FrequencyMap> {
    if class.is_empty() {
        return Err(Error::ClassDefinition("empty class".into()));
    }
    for &i in class {
        check_index(family, i)?;
    }
    let sizes = family.sizes();
    let k = sizes[class[0]];
    if let Some(&bad) = class.iter().find(|&&i| sizes[i] != k) {
        return Err(Error::ClassDefinition(format!(
            "set {bad} has size {} but the class has size {k}",
            sizes[bad]
        )));
    }
    let mut uniq = class.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    if uniq.len() != class.len() {
        return Err(Error::ClassDefinition("repeated index in class".into()));
    }
    let mut total = FrequencyMap::empty(family.group());
    for &i in class {
        total.merge(&outgoing_differences(family, i)?);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n).unwrap()
    }

    fn els(xs: &[u32]) -> Vec<Element> {
        xs.iter().map(|&x| Element::from(x)).collect()
    }

    fn fam(n: u64, sets: &[&[u32]]) -> SetFamily {
        SetFamily::new(z(n), sets.iter().map(|s| els(s)).collect()).unwrap()
    }

    fn row(map: &FrequencyMap) -> Vec<u64> {
        map.counts()[1..].to_vec()
    }

    #[test]
    fn internal_of_planar_difference_set() {
        let m = internal_differences(&z(21), &els(&[3, 6, 12, 7, 14])).unwrap();
        assert_eq!(m.uniform_count(), Some(1));
        assert_eq!(m.total(), 20);
    }

    #[test]
    fn internal_of_singleton_is_empty() {
        let m = internal_differences(&z(9), &els(&[4])).unwrap();
        assert_eq!(m.total(), 0);
        assert_eq!(m.iter().count(), 0);
    }

    #[test]
    fn internal_small_enumeration() {
        // Ordered pairs of {0,1,4} in Z_13: 1-0, 4-0, 4-1 and negatives.
        let m = internal_differences(&z(13), &els(&[0, 1, 4])).unwrap();
        let expected: Vec<(Element, u64)> =
            [1, 3, 4, 9, 10, 12].iter().map(|&x| (Element::from(x), 1)).collect();
        assert_eq!(m.iter().collect::<Vec<_>>(), expected);
        assert_eq!(m.total(), 6);
        assert!(m.is_negation_symmetric());
    }

    #[test]
    fn cross_examples() {
        let m = cross_differences(&z(13), &els(&[0, 1]), &els(&[2, 4, 6])).unwrap();
        let expected: Vec<(Element, u64)> =
            [7, 8, 9, 10, 11, 12].iter().map(|&x| (Element::from(x), 1)).collect();
        assert_eq!(m.iter().collect::<Vec<_>>(), expected);
        let m = cross_differences(&z(10), &els(&[0]), &els(&[5])).unwrap();
        assert_eq!(m.iter().collect::<Vec<_>>(), vec![(Element::from(5), 1)]);
        assert!(matches!(
            cross_differences(&z(10), &els(&[0, 5]), &els(&[5])),
            Err(Error::Disjointness { .. })
        ));
    }

    #[test]
    fn external_examples() {
        let f = fam(19, &[&[1, 7, 11], &[4, 9, 6], &[16, 17, 5]]);
        assert_eq!(external_difference_multiset(&f).unwrap().uniform_count(), Some(3));
        let f = fam(13, &[&[0, 1], &[2, 4, 6]]);
        assert_eq!(external_difference_multiset(&f).unwrap().uniform_count(), Some(1));
        let f = fam(2, &[&[0], &[1]]);
        let m = external_difference_multiset(&f).unwrap();
        assert_eq!(m.iter().collect::<Vec<_>>(), vec![(Element::from(1), 2)]);
        let single = fam(5, &[&[0, 1]]);
        assert_eq!(external_difference_multiset(&single), Err(Error::TrivialFamily(1)));
    }

    fn pedf13() -> SetFamily {
        fam(13, &[&[0, 1, 4], &[3, 5, 10], &[2, 6, 7, 9], &[8], &[11], &[12]])
    }

    #[test]
    fn outgoing_tables_of_the_z13_pedf() {
        let f = pedf13();
        assert_eq!(row(&outgoing_differences(&f, 0).unwrap()), vec![2, 3, 2, 2, 3, 3, 3, 3, 2, 2, 3, 2]);
        assert_eq!(row(&outgoing_differences(&f, 1).unwrap()), vec![3, 2, 3, 3, 2, 2, 2, 2, 3, 3, 2, 3]);
        let qr = fam(7, &[&[1], &[2], &[4], &[0, 3, 5, 6]]);
        assert_eq!(outgoing_differences(&qr, 0).unwrap().uniform_count(), Some(1));
        assert!(matches!(outgoing_differences(&qr, 4), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn incoming_examples() {
        let qr = fam(7, &[&[1], &[2], &[4], &[0, 3, 5, 6]]);
        assert_eq!(incoming_differences(&qr, 3).unwrap().uniform_count(), Some(2));
        let f = fam(5, &[&[0, 1], &[2, 4]]);
        assert_eq!(incoming_differences(&f, 0).unwrap().uniform_count(), Some(1));
        let f = fam(13, &[&[0, 1], &[2, 4, 6]]);
        assert_eq!(incoming_differences(&f, 0).unwrap(), outgoing_differences(&f, 0).unwrap().negated());
    }

    #[test]
    fn class_examples() {
        let f = pedf13();
        assert_eq!(class_differences(&f, &[0, 1]).unwrap().uniform_count(), Some(5));
        assert_eq!(class_differences(&f, &[2]).unwrap().uniform_count(), Some(3));
        assert_eq!(class_differences(&f, &[3, 4, 5]).unwrap().uniform_count(), Some(3));
        assert_eq!(class_differences(&f, &[1]).unwrap(), outgoing_differences(&f, 1).unwrap());
        assert!(matches!(class_differences(&f, &[0, 2]), Err(Error::ClassDefinition(_))));
    }

    #[test]
    fn family_validation() {
        assert!(matches!(
            SetFamily::new(z(7), vec![els(&[1, 2]), els(&[2])]),
            Err(Error::Disjointness { .. })
        ));
        assert!(matches!(SetFamily::new(z(7), vec![els(&[1, 1])]), Err(Error::DuplicateElement { .. })));
        assert!(matches!(SetFamily::new(z(7), vec![els(&[7])]), Err(Error::ElementDomain(_))));
        assert!(matches!(SetFamily::new(z(7), vec![vec![]]), Err(Error::EmptySet(0))));
        let b = SetFamily::blocks(z(7), vec![els(&[1, 2]), els(&[2, 3])]).unwrap();
        assert!(!b.is_disjoint());
        let f = fam(13, &[&[4, 1, 0]]);
        assert_eq!(f.sets()[0], els(&[0, 1, 4]));
    }

    #[test]
    fn table_rendering() {
        let f = pedf13();
        let t = outgoing_differences(&f, 0).unwrap().render_table();
        let lines: Vec<&str> = t.lines().collect();
        assert!(lines[0].starts_with("difference  1  2  3"));
        assert!(lines[1].starts_with("frequency   2  3  2"));
    }

    #[test]
    fn serializes_as_element_keyed_object() {
        let m = cross_differences(&z(10), &els(&[0]), &els(&[5])).unwrap();
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"[5]":1}"#);
    }
}
