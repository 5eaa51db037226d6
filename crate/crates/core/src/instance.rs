//! Instance data model, solutions, assignments and the equivalence-class
//! machinery (classes `A_E` and stars `A_s`) used by the approximation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a universe element.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct ElementId(pub u32);

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How many copies of an element a solution may buy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Multiplicity {
    Bounded(u32),
    Unbounded,
}

impl Multiplicity {
    /// `min(k, M(v))`, the number of copies any size-`k` solution can use.
    pub fn clamp(self, k: u32) -> u32 {
        match self {
            Multiplicity::Bounded(m) => m.min(k),
            Multiplicity::Unbounded => k,
        }
    }

    pub fn allows(self, copies: u32) -> bool {
        match self {
            Multiplicity::Bounded(m) => copies <= m,
            Multiplicity::Unbounded => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub id: ElementId,
    pub cap: u64,
    pub mult: Multiplicity,
    pub weight: u64,
}

impl Element {
    pub fn new(id: u32, cap: u64, mult: Multiplicity, weight: u64) -> Self {
        Element {
            id: ElementId(id),
            cap,
            mult,
            weight,
        }
    }

    /// Unit weight, multiplicity one.
    pub fn simple(id: u32, cap: u64) -> Self {
        Element::new(id, cap, Multiplicity::Bounded(1), 1)
    }
}

/// A validated capacitated hitting-set instance.
///
/// Set occurrences are identified by their index in `family`; repeated sets
/// are distinct occurrences.
#[derive(Debug, Clone)]
pub struct Instance {
    d: usize,
    elements: Vec<Element>,
    family: Vec<Vec<ElementId>>,
    position: HashMap<ElementId, usize>,
    incidence: Vec<Vec<usize>>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.elements == other.elements && self.family == other.family
    }
}

impl Eq for Instance {}

impl Instance {
    /// Validates and canonicalizes (sorts) every set.
    pub fn new(d: usize, elements: Vec<Element>, family: Vec<Vec<ElementId>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Validation("d must be positive".into()));
        }
        let mut position = HashMap::with_capacity(elements.len());
        for (pos, e) in elements.iter().enumerate() {
            if position.insert(e.id, pos).is_some() {
                return Err(Error::Validation(format!("duplicate element id {}", e.id)));
            }
            if e.mult == Multiplicity::Bounded(0) {
                return Err(Error::Validation(format!(
                    "element {} has multiplicity 0",
                    e.id
                )));
            }
        }
        let mut incidence = vec![Vec::new(); elements.len()];
        let mut canonical = Vec::with_capacity(family.len());
        for (idx, mut set) in family.into_iter().enumerate() {
            if set.is_empty() {
                return Err(Error::Validation(format!("set {idx} is empty")));
            }
            set.sort_unstable();
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Validation(format!(
                    "set {idx} repeats an element id"
                )));
            }
            if set.len() > d {
                return Err(Error::Validation(format!(
                    "set {idx} has {} elements, more than d = {d}",
                    set.len()
                )));
            }
            for x in &set {
                let pos = *position.get(x).ok_or_else(|| {
                    Error::Validation(format!("set {idx} mentions unknown element {x}"))
                })?;
                incidence[pos].push(idx);
            }
            canonical.push(set);
        }
        Ok(Instance {
            d,
            elements,
            family: canonical,
            position,
            incidence,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.elements.len()
    }

    pub fn m(&self) -> usize {
        self.family.len()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn family(&self) -> &[Vec<ElementId>] {
        &self.family
    }

    pub fn set(&self, idx: usize) -> &[ElementId] {
        &self.family[idx]
    }

    /// Ids in file order.
    pub fn ids(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.elements.iter().map(|e| e.id)
    }

    /// Ids in ascending order.
    pub fn sorted_ids(&self) -> Vec<ElementId> {
        let mut ids: Vec<_> = self.ids().collect();
        ids.sort_unstable();
        ids
    }

    pub fn contains(&self, x: ElementId) -> bool {
        self.position.contains_key(&x)
    }

    pub fn element(&self, x: ElementId) -> Result<&Element> {
        self.position
            .get(&x)
            .map(|&p| &self.elements[p])
            .ok_or(Error::UnknownElement(x))
    }

    pub fn cap(&self, x: ElementId) -> u64 {
        self.elements[self.position[&x]].cap
    }

    pub fn weight(&self, x: ElementId) -> u64 {
        self.elements[self.position[&x]].weight
    }

    /// Indices of the sets containing `x`, ascending.
    pub fn sets_containing(&self, x: ElementId) -> &[usize] {
        &self.incidence[self.position[&x]]
    }

    pub fn set_contains(&self, idx: usize, x: ElementId) -> bool {
        self.family[idx].binary_search(&x).is_ok()
    }
}

/// A multiset of bought element copies.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solution {
    copies: BTreeMap<ElementId, u32>,
}

impl Solution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a solution from (id, copies) pairs; zero counts are dropped and
    /// repeated ids accumulate.
    pub fn from_copies<I: IntoIterator<Item = (ElementId, u32)>>(pairs: I) -> Self {
        let mut sol = Solution::new();
        for (x, c) in pairs {
            sol.add(x, c);
        }
        sol
    }

    /// One copy of each listed element.
    pub fn from_set<I: IntoIterator<Item = ElementId>>(ids: I) -> Self {
        Self::from_copies(ids.into_iter().map(|x| (x, 1)))
    }

    pub fn add(&mut self, x: ElementId, c: u32) {
        if c > 0 {
            *self.copies.entry(x).or_insert(0) += c;
        }
    }

    pub fn copies(&self, x: ElementId) -> u32 {
        self.copies.get(&x).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ElementId, u32)> + '_ {
        self.copies.iter().map(|(&x, &c)| (x, c))
    }

    /// Elements with at least one copy, ascending.
    pub fn support(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.copies.keys().copied()
    }

    pub fn size(&self) -> u64 {
        self.copies.values().map(|&c| u64::from(c)).sum()
    }

    pub fn weight(&self, inst: &Instance) -> u64 {
        self.iter()
            .map(|(x, c)| inst.weight(x) * u64::from(c))
            .sum()
    }

    /// Unknown ids and copies above the multiplicity are rejected.
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        for (x, c) in self.iter() {
            let e = inst.element(x)?;
            if !e.mult.allows(c) {
                return Err(Error::Validation(format!(
                    "{c} copies of element {x} exceed its multiplicity"
                )));
            }
        }
        Ok(())
    }
}

/// Set-index to element map `phi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    target: Vec<ElementId>,
}

impl Assignment {
    pub fn new(target: Vec<ElementId>) -> Self {
        Assignment { target }
    }

    pub fn target(&self, set: usize) -> ElementId {
        self.target[set]
    }

    pub fn targets(&self) -> &[ElementId] {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.target.len()
    }

    pub fn is_empty(&self) -> bool {
        self.target.is_empty()
    }

    /// Number of sets assigned to `x`.
    pub fn load(&self, x: ElementId) -> u64 {
        self.target.iter().filter(|&&t| t == x).count() as u64
    }

    /// Membership (`phi(A) in A`) and load (`load(x) <= cap(x) * copies(x)`).
    pub fn is_valid_for(&self, inst: &Instance, sol: &Solution) -> bool {
        if self.target.len() != inst.m() {
            return false;
        }
        let mut load: BTreeMap<ElementId, u64> = BTreeMap::new();
        for (idx, &x) in self.target.iter().enumerate() {
            if !inst.set_contains(idx, x) {
                return false;
            }
            *load.entry(x).or_insert(0) += 1;
        }
        load.into_iter()
            .all(|(x, l)| l <= inst.cap(x) * u64::from(sol.copies(x)))
    }
}

/// Sorted subset `E` of a partial solution, the key of class `A_E`.
pub type ClassKey = Vec<ElementId>;

/// The partition of the family by `A ∩ S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClasses {
    pub by_class: BTreeMap<ClassKey, Vec<usize>>,
}

impl EquivalenceClasses {
    pub fn class(&self, key: &[ElementId]) -> &[usize] {
        self.by_class.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn keys(&self) -> impl Iterator<Item = &ClassKey> {
        self.by_class.keys()
    }

    pub fn total(&self) -> usize {
        self.by_class.values().map(Vec::len).sum()
    }
}

/// Groups the family by intersection with `partial`.
///
/// Only classes that contain at least one set are materialized.
pub fn equivalence_classes(inst: &Instance, partial: &[ElementId]) -> Result<EquivalenceClasses> {
    let mut s: Vec<ElementId> = partial.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&x) = s.iter().find(|&&x| !inst.contains(x)) {
        return Err(Error::UnknownElement(x));
    }
    let mut by_class: BTreeMap<ClassKey, Vec<usize>> = BTreeMap::new();
    for (idx, set) in inst.family().iter().enumerate() {
        let key: ClassKey = set
            .iter()
            .copied()
            .filter(|x| s.binary_search(x).is_ok())
            .collect();
        by_class.entry(key).or_default().push(idx);
    }
    Ok(EquivalenceClasses { by_class })
}

/// Stars `A_s`: the union of the classes the plurality map sends to `s`.
///
/// Every materialized class must be in the domain of `plurality`, except the
/// empty class when `S` itself is empty.
pub fn stars(
    classes: &EquivalenceClasses,
    plurality: &BTreeMap<ClassKey, ElementId>,
) -> Result<BTreeMap<ElementId, Vec<usize>>> {
    let mut out: BTreeMap<ElementId, Vec<usize>> = BTreeMap::new();
    for (key, sets) in &classes.by_class {
        match plurality.get(key) {
            Some(&s) => out.entry(s).or_default().extend_from_slice(sets),
            None if key.is_empty() && plurality.is_empty() => {}
            None => return Err(Error::PartialPlurality(key.clone())),
        }
    }
    for sets in out.values_mut() {
        sets.sort_unstable();
    }
    Ok(out)
}
