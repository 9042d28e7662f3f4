//! The powerset lattice over a program signature.
//!
//! Atom sets are fixed-width bit vectors indexed by atom id. Ids are assigned
//! in lexicographic order of atom names, so the numeric order of ids doubles
//! as the canonical output order. Families of sets are kept in canonical
//! order (cardinality first, then lexicographic on the sorted member names),
//! which makes every operator output deterministic and diffable.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{BitAnd, BitOr, Not, Sub};

use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Hard width of an [`AtomSet`].
pub const MAX_ATOMS: usize = 64;

pub type AtomId = usize;

/// Interned atom names of a program.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    atoms: Vec<String>,
    index: BTreeMap<String, AtomId>,
}

impl Signature {
    /// Builds a signature from arbitrary names; duplicates are merged and ids
    /// follow the lexicographic order of the names.
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let sorted: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        if sorted.len() > MAX_ATOMS {
            return Err(Error::SignatureTooLarge {
                size: sorted.len(),
                cap: MAX_ATOMS,
            });
        }
        let atoms: Vec<String> = sorted.into_iter().collect();
        let index = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        Ok(Signature { atoms, index })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn id(&self, name: &str) -> Option<AtomId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: AtomId) -> &str {
        &self.atoms[id]
    }

    /// The top element of the lattice.
    pub fn full(&self) -> AtomSet {
        AtomSet::full(self.len())
    }

    pub fn atom(&self, name: &str) -> Result<AtomId> {
        self.id(name)
            .ok_or_else(|| Error::UnknownAtom(name.to_string()))
    }

    pub fn set_of<'a, I>(&self, names: I) -> Result<AtomSet>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut s = AtomSet::empty();
        for n in names {
            s.insert(self.atom(n)?);
        }
        Ok(s)
    }

    /// Parses a comma-separated list of atom names; blank input is the empty set.
    pub fn parse_set(&self, text: &str) -> Result<AtomSet> {
        self.set_of(text.split(',').map(str::trim).filter(|s| !s.is_empty()))
    }

    pub fn names(&self, s: AtomSet) -> Vec<&str> {
        s.iter().map(|i| self.name(i)).collect()
    }

    pub fn render(&self, s: AtomSet) -> String {
        format!("{{{}}}", self.names(s).join(","))
    }

    pub fn render_pair(&self, p: Pair) -> String {
        format!("({},{})", self.render(p.lower), self.render(p.upper))
    }

    pub fn render_family(&self, f: &AtomSetFamily) -> String {
        let parts: Vec<String> = f.iter().map(|s| self.render(s)).collect();
        format!("{{{}}}", parts.join(","))
    }

    pub fn set_json(&self, s: AtomSet) -> Value {
        json!(self.names(s))
    }

    pub fn family_json(&self, f: &AtomSetFamily) -> Value {
        Value::Array(f.iter().map(|s| self.set_json(s)).collect())
    }

    pub fn pair_json(&self, p: Pair) -> Value {
        json!({ "lower": self.set_json(p.lower), "upper": self.set_json(p.upper) })
    }

    pub fn set_from_json(&self, v: &Value) -> Result<AtomSet> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Json("atom set must be an array of names".into()))?;
        let mut s = AtomSet::empty();
        for item in arr {
            let name = item
                .as_str()
                .ok_or_else(|| Error::Json("atom names must be strings".into()))?;
            s.insert(self.atom(name)?);
        }
        Ok(s)
    }
}

/// A subset of the signature.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AtomSet(u64);

impl AtomSet {
    pub const fn empty() -> Self {
        AtomSet(0)
    }

    pub fn full(width: usize) -> Self {
        assert!(width <= MAX_ATOMS);
        if width == MAX_ATOMS {
            AtomSet(u64::MAX)
        } else {
            AtomSet((1u64 << width) - 1)
        }
    }

    pub fn singleton(id: AtomId) -> Self {
        assert!(id < MAX_ATOMS);
        AtomSet(1u64 << id)
    }

    pub const fn from_bits(bits: u64) -> Self {
        AtomSet(bits)
    }

    pub fn from_ids<I: IntoIterator<Item = AtomId>>(ids: I) -> Self {
        let mut s = AtomSet::empty();
        for i in ids {
            s.insert(i);
        }
        s
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, id: AtomId) -> bool {
        id < MAX_ATOMS && self.0 & (1u64 << id) != 0
    }

    pub fn insert(&mut self, id: AtomId) {
        assert!(id < MAX_ATOMS);
        self.0 |= 1u64 << id;
    }

    pub fn remove(&mut self, id: AtomId) {
        if id < MAX_ATOMS {
            self.0 &= !(1u64 << id);
        }
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: AtomSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_superset(self, other: AtomSet) -> bool {
        other.is_subset(self)
    }

    pub fn is_disjoint(self, other: AtomSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: AtomSet) -> AtomSet {
        AtomSet(self.0 | other.0)
    }

    pub fn intersection(self, other: AtomSet) -> AtomSet {
        AtomSet(self.0 & other.0)
    }

    pub fn difference(self, other: AtomSet) -> AtomSet {
        AtomSet(self.0 & !other.0)
    }

    /// Member ids in ascending order.
    pub fn iter(self) -> Ids {
        Ids(self.0)
    }

    /// Every subset of `self`, in no particular order.
    pub fn subsets(self) -> Subsets {
        Subsets {
            of: self.0,
            next: Some(0),
        }
    }

    /// Ids below the signature width only.
    pub fn within(self, width: usize) -> bool {
        self.is_subset(AtomSet::full(width))
    }
}

impl Ord for AtomSet {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.len().cmp(&other.len()) {
            Ordering::Equal => {
                let diff = self.0 ^ other.0;
                if diff == 0 {
                    Ordering::Equal
                } else {
                    // Equal cardinality: the sorted id lists first differ at the
                    // lowest differing id, and the set holding it comes first.
                    let lowest = diff & diff.wrapping_neg();
                    if self.0 & lowest != 0 {
                        Ordering::Less
                    } else {
                        Ordering::Greater
                    }
                }
            }
            ord => ord,
        }
    }
}

impl PartialOrd for AtomSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl BitOr for AtomSet {
    type Output = AtomSet;
    fn bitor(self, rhs: AtomSet) -> AtomSet {
        self.union(rhs)
    }
}

impl BitAnd for AtomSet {
    type Output = AtomSet;
    fn bitand(self, rhs: AtomSet) -> AtomSet {
        self.intersection(rhs)
    }
}

impl Sub for AtomSet {
    type Output = AtomSet;
    fn sub(self, rhs: AtomSet) -> AtomSet {
        self.difference(rhs)
    }
}

impl Not for AtomSet {
    type Output = AtomSet;
    fn not(self) -> AtomSet {
        AtomSet(!self.0)
    }
}

impl FromIterator<AtomId> for AtomSet {
    fn from_iter<T: IntoIterator<Item = AtomId>>(iter: T) -> Self {
        AtomSet::from_ids(iter)
    }
}

pub struct Ids(u64);

impl Iterator for Ids {
    type Item = AtomId;

    fn next(&mut self) -> Option<AtomId> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

/// Carry-rippler enumeration of the subsets of a mask.
pub struct Subsets {
    of: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = AtomSet;

    fn next(&mut self) -> Option<AtomSet> {
        let cur = self.next?;
        let nxt = cur.wrapping_sub(self.of) & self.of;
        self.next = if nxt == 0 { None } else { Some(nxt) };
        Some(AtomSet(cur))
    }
}

/// A four-valued interpretation: `lower` holds the true atoms, `upper` the
/// atoms that are not false. Consistency is not enforced.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Pair {
    pub lower: AtomSet,
    pub upper: AtomSet,
}

impl Pair {
    pub fn new(lower: AtomSet, upper: AtomSet) -> Self {
        Pair { lower, upper }
    }

    pub fn total(x: AtomSet) -> Self {
        Pair { lower: x, upper: x }
    }

    pub fn is_consistent(&self) -> bool {
        self.lower.is_subset(self.upper)
    }

    pub fn is_total(&self) -> bool {
        self.lower == self.upper
    }

    /// Atoms left undecided by a consistent pair.
    pub fn gap(&self) -> AtomSet {
        self.upper - self.lower
    }
}

/// Candidate-pair order: narrow gaps first, then canonical on the bounds.
impl Ord for Pair {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gap()
            .len()
            .cmp(&other.gap().len())
            .then_with(|| self.lower.cmp(&other.lower))
            .then_with(|| self.upper.cmp(&other.upper))
    }
}

impl PartialOrd for Pair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Information order on pairs.
pub fn leq_i(a: Pair, b: Pair) -> bool {
    a.lower.is_subset(b.lower) && b.upper.is_subset(a.upper)
}

/// Truth order on pairs.
pub fn leq_t(a: Pair, b: Pair) -> bool {
    a.lower.is_subset(b.lower) && a.upper.is_subset(b.upper)
}

/// A finite family of atom sets in canonical order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct AtomSetFamily(BTreeSet<AtomSet>);

impl AtomSetFamily {
    pub fn new() -> Self {
        AtomSetFamily(BTreeSet::new())
    }

    pub fn singleton(s: AtomSet) -> Self {
        let mut f = AtomSetFamily::new();
        f.insert(s);
        f
    }

    pub fn insert(&mut self, s: AtomSet) -> bool {
        self.0.insert(s)
    }

    pub fn contains(&self, s: AtomSet) -> bool {
        self.0.contains(&s)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = AtomSet> + '_ {
        self.0.iter().copied()
    }

    pub fn extend_from(&mut self, other: &AtomSetFamily) {
        self.0.extend(other.0.iter().copied());
    }

    /// The ⊆-minimal members.
    pub fn minimal(&self) -> AtomSetFamily {
        self.iter()
            .filter(|&s| !self.iter().any(|t| t != s && t.is_subset(s)))
            .collect()
    }
}

impl fmt::Debug for AtomSetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl FromIterator<AtomSet> for AtomSetFamily {
    fn from_iter<T: IntoIterator<Item = AtomSet>>(iter: T) -> Self {
        AtomSetFamily(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a AtomSetFamily {
    type Item = AtomSet;
    type IntoIter = std::iter::Copied<std::collections::btree_set::Iter<'a, AtomSet>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

/// Smyth order: every member of `y` has a subset in `x`.
pub fn smyth_leq(x: &AtomSetFamily, y: &AtomSetFamily) -> bool {
    y.iter().all(|b| x.iter().any(|a| a.is_subset(b)))
}

/// Hoare order: every member of `x` has a superset in `y`.
pub fn hoare_leq(x: &AtomSetFamily, y: &AtomSetFamily) -> bool {
    x.iter().all(|a| y.iter().any(|b| a.is_subset(b)))
}

/// Information order on pairs of families: Smyth on the lower families,
/// reversed Hoare on the upper ones.
pub fn ai_leq(a: (&AtomSetFamily, &AtomSetFamily), b: (&AtomSetFamily, &AtomSetFamily)) -> bool {
    smyth_leq(a.0, b.0) && hoare_leq(b.1, a.1)
}

/// Default cap on the number of free atoms of an enumerated interval.
pub const DEFAULT_INTERVAL_CAP: usize = 24;

/// All `z` with `x ⊆ z ⊆ y`, in canonical order. Empty when `x ⊄ y`.
pub fn interval(x: AtomSet, y: AtomSet, cap: usize) -> Result<Interval> {
    if !x.is_subset(y) {
        return Ok(Interval::empty());
    }
    let free: Vec<AtomId> = (y - x).iter().collect();
    if free.len() > cap {
        return Err(Error::IntervalTooLarge {
            free: free.len(),
            cap,
        });
    }
    Ok(Interval {
        base: x,
        free,
        k: 0,
        combo: Some(Vec::new()),
    })
}

/// Streaming enumeration of an interval: cardinality by cardinality, each
/// layer in lexicographic order of the chosen free atoms.
pub struct Interval {
    base: AtomSet,
    free: Vec<AtomId>,
    k: usize,
    combo: Option<Vec<usize>>,
}

impl Interval {
    fn empty() -> Self {
        Interval {
            base: AtomSet::empty(),
            free: Vec::new(),
            k: 0,
            combo: None,
        }
    }

    fn advance(&mut self) {
        let n = self.free.len();
        let Some(combo) = self.combo.as_mut() else {
            return;
        };
        let k = combo.len();
        // Rightmost position that can still move.
        let mut i = k;
        while i > 0 {
            i -= 1;
            if combo[i] < n - k + i {
                combo[i] += 1;
                for j in i + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
                return;
            }
        }
        self.k += 1;
        self.combo = if self.k > n {
            None
        } else {
            Some((0..self.k).collect())
        };
    }
}

impl Iterator for Interval {
    type Item = AtomSet;

    fn next(&mut self) -> Option<AtomSet> {
        let combo = self.combo.as_ref()?;
        let mut z = self.base;
        for &c in combo {
            z.insert(self.free[c]);
        }
        self.advance();
        Some(z)
    }
}
