//! Choice atoms, choice rules and programs, and disjunctive programs.

use crate::error::{Error, Result};
use crate::lattice::{AtomId, AtomSet, AtomSetFamily, Signature};

/// How the satisfiers of a choice atom are given.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Satisfiers {
    /// Between `lo` and `hi` members of the domain are true.
    Cardinality {
        lo: usize,
        hi: Option<usize>,
    },
    /// Exactly `k` members are true.
    CountEq(usize),
    /// Any number of members except `k` is true.
    CountNeq(usize),
    PosLiteral,
    NegLiteral,
    /// Explicit satisfier family, every member a subset of the domain.
    Extensional(AtomSetFamily),
}

/// A choice atom `(dom, sat)`: `x` satisfies it iff `x ∩ dom ∈ sat`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChoiceAtom {
    dom: AtomSet,
    sat: Satisfiers,
}

impl ChoiceAtom {
    pub fn cardinality(dom: AtomSet, lo: usize, hi: Option<usize>) -> Result<Self> {
        require_nonempty(dom)?;
        if let Some(hi) = hi {
            if lo > hi {
                return Err(Error::InvalidAtom(format!(
                    "lower bound {lo} exceeds upper bound {hi}"
                )));
            }
        }
        Ok(ChoiceAtom {
            dom,
            sat: Satisfiers::Cardinality { lo, hi },
        })
    }

    pub fn count_eq(dom: AtomSet, k: usize) -> Result<Self> {
        require_nonempty(dom)?;
        if k > dom.len() {
            return Err(Error::InvalidAtom(format!(
                "count {k} exceeds the domain size {}",
                dom.len()
            )));
        }
        Ok(ChoiceAtom {
            dom,
            sat: Satisfiers::CountEq(k),
        })
    }

    pub fn count_neq(dom: AtomSet, k: usize) -> Result<Self> {
        require_nonempty(dom)?;
        Ok(ChoiceAtom {
            dom,
            sat: Satisfiers::CountNeq(k),
        })
    }

    pub fn literal(atom: AtomId, positive: bool) -> Self {
        ChoiceAtom {
            dom: AtomSet::singleton(atom),
            sat: if positive {
                Satisfiers::PosLiteral
            } else {
                Satisfiers::NegLiteral
            },
        }
    }

    pub fn extensional<I>(dom: AtomSet, sat: I) -> Result<Self>
    where
        I: IntoIterator<Item = AtomSet>,
    {
        let family: AtomSetFamily = sat.into_iter().collect();
        if let Some(bad) = family.iter().find(|s| !s.is_subset(dom)) {
            return Err(Error::InvalidAtom(format!(
                "satisfier {bad:?} is not a subset of the domain {dom:?}"
            )));
        }
        Ok(ChoiceAtom {
            dom,
            sat: Satisfiers::Extensional(family),
        })
    }

    pub fn dom(&self) -> AtomSet {
        self.dom
    }

    pub fn sat(&self) -> &Satisfiers {
        &self.sat
    }

    /// Whether `x ∩ dom` is a satisfier.
    pub fn satisfied_by(&self, x: AtomSet) -> bool {
        let w = x & self.dom;
        match &self.sat {
            Satisfiers::Cardinality { lo, hi } => {
                let n = w.len();
                n >= *lo && hi.is_none_or(|h| n <= h)
            }
            Satisfiers::CountEq(k) => w.len() == *k,
            Satisfiers::CountNeq(k) => w.len() != *k,
            Satisfiers::PosLiteral => !w.is_empty(),
            Satisfiers::NegLiteral => w.is_empty(),
            Satisfiers::Extensional(f) => f.contains(w),
        }
    }

    /// Every `w` with `lower ⊆ w ⊆ upper` satisfies the atom. Only the part
    /// of the interval inside the domain is enumerated. Vacuously true when
    /// `lower ⊄ upper`.
    pub fn satisfied_throughout(&self, lower: AtomSet, upper: AtomSet, cap: usize) -> Result<bool> {
        if !lower.is_subset(upper) {
            return Ok(true);
        }
        let lo = lower & self.dom;
        let hi = upper & self.dom;
        let (a, b) = (lo.len(), hi.len());
        Ok(match &self.sat {
            Satisfiers::Cardinality { lo: l, hi: h } => a >= *l && h.is_none_or(|h| b <= h),
            Satisfiers::CountEq(k) => a == *k && b == *k,
            Satisfiers::CountNeq(k) => *k < a || *k > b,
            Satisfiers::PosLiteral => !lo.is_empty(),
            Satisfiers::NegLiteral => hi.is_empty(),
            Satisfiers::Extensional(f) => {
                let free = hi - lo;
                if free.len() > cap {
                    return Err(Error::IntervalTooLarge {
                        free: free.len(),
                        cap,
                    });
                }
                // Every member of the interval must be listed.
                f.len() >= 1usize << free.len() && free.subsets().all(|w| f.contains(lo | w))
            }
        })
    }

    /// Some `w` with `lower ⊆ w ⊆ upper` satisfies the atom. False when
    /// `lower ⊄ upper`.
    pub fn satisfied_somewhere(&self, lower: AtomSet, upper: AtomSet) -> bool {
        if !lower.is_subset(upper) {
            return false;
        }
        let lo = lower & self.dom;
        let hi = upper & self.dom;
        let (a, b) = (lo.len(), hi.len());
        match &self.sat {
            Satisfiers::Cardinality { lo: l, hi: h } => a.max(*l) <= h.map_or(b, |h| b.min(h)),
            Satisfiers::CountEq(k) => a <= *k && *k <= b,
            Satisfiers::CountNeq(k) => !(a == *k && b == *k),
            Satisfiers::PosLiteral => !hi.is_empty(),
            Satisfiers::NegLiteral => lo.is_empty(),
            Satisfiers::Extensional(f) => f.iter().any(|s| lo.is_subset(s) && s.is_subset(hi)),
        }
    }

    /// All satisfiers, each a subset of the domain.
    pub fn satisfiers(&self, cap: usize) -> Result<AtomSetFamily> {
        if let Satisfiers::Extensional(f) = &self.sat {
            return Ok(f.clone());
        }
        self.check_domain(cap)?;
        Ok(self
            .dom
            .subsets()
            .filter(|&w| self.satisfied_by(w))
            .collect())
    }

    pub fn extensionalize(&self, cap: usize) -> Result<ChoiceAtom> {
        Ok(ChoiceAtom {
            dom: self.dom,
            sat: Satisfiers::Extensional(self.satisfiers(cap)?),
        })
    }

    /// `Some((atom, positive))` when the atom behaves exactly like a literal.
    pub fn as_literal(&self) -> Option<(AtomId, bool)> {
        match self.sat {
            Satisfiers::PosLiteral => return self.dom.iter().next().map(|a| (a, true)),
            Satisfiers::NegLiteral => return self.dom.iter().next().map(|a| (a, false)),
            _ => {}
        }
        if self.dom.len() != 1 {
            return None;
        }
        let a = self.dom.iter().next()?;
        match (
            self.satisfied_by(AtomSet::empty()),
            self.satisfied_by(self.dom),
        ) {
            (false, true) => Some((a, true)),
            (true, false) => Some((a, false)),
            _ => None,
        }
    }

    /// Upward closure of the satisfiers within the powerset of the domain.
    pub fn is_monotone(&self, cap: usize) -> Result<bool> {
        match self.sat {
            Satisfiers::PosLiteral => return Ok(true),
            Satisfiers::Cardinality { hi: None, .. } => return Ok(true),
            _ => {}
        }
        let table = self.table(cap)?;
        let n = self.dom.len();
        Ok((0..table.len()).all(|i| !table[i] || (0..n).all(|b| table[i | (1 << b)])))
    }

    /// No gaps: whenever `x ⊆ z ⊆ y` with `x`, `y` satisfiers, `z` is one too.
    pub fn is_convex(&self, cap: usize) -> Result<bool> {
        let table = self.table(cap)?;
        let n = self.dom.len();
        let size = table.len();
        // below[z]: some satisfier ⊆ z; above[z]: some satisfier ⊇ z.
        let mut below = table.clone();
        for i in 0..size {
            if !below[i] {
                below[i] = (0..n).any(|b| i & (1 << b) != 0 && below[i & !(1 << b)]);
            }
        }
        let mut above = table.clone();
        for i in (0..size).rev() {
            if !above[i] {
                above[i] = (0..n).any(|b| i & (1 << b) == 0 && above[i | (1 << b)]);
            }
        }
        Ok((0..size).all(|i| table[i] || !(below[i] && above[i])))
    }

    fn check_domain(&self, cap: usize) -> Result<()> {
        if self.dom.len() > cap {
            return Err(Error::DomainTooLarge {
                size: self.dom.len(),
                cap,
            });
        }
        Ok(())
    }

    /// Satisfaction indexed by the subsets of the domain, bit `b` of the
    /// index standing for the `b`-th smallest domain atom.
    fn table(&self, cap: usize) -> Result<Vec<bool>> {
        self.check_domain(cap)?;
        let ids: Vec<AtomId> = self.dom.iter().collect();
        Ok((0..1usize << ids.len())
            .map(|i| self.satisfied_by(deposit(i, &ids)))
            .collect())
    }
}

fn deposit(bits: usize, ids: &[AtomId]) -> AtomSet {
    ids.iter()
        .enumerate()
        .filter(|(b, _)| bits & (1 << b) != 0)
        .map(|(_, &id)| id)
        .collect()
}

fn require_nonempty(dom: AtomSet) -> Result<()> {
    if dom.is_empty() {
        return Err(Error::InvalidAtom("empty domain".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChoiceRule {
    pub head: ChoiceAtom,
    pub body: Vec<ChoiceAtom>,
}

impl ChoiceRule {
    pub fn new(head: ChoiceAtom, body: Vec<ChoiceAtom>) -> Self {
        ChoiceRule { head, body }
    }

    pub fn fact(head: ChoiceAtom) -> Self {
        ChoiceRule {
            head,
            body: Vec::new(),
        }
    }

    /// The body holds in `x`; an empty body always holds.
    pub fn applicable(&self, x: AtomSet) -> bool {
        self.body.iter().all(|c| c.satisfied_by(x))
    }

    pub fn body_dom(&self) -> AtomSet {
        self.body
            .iter()
            .fold(AtomSet::empty(), |acc, c| acc | c.dom())
    }

    pub fn is_normal(&self) -> bool {
        self.body.iter().all(|c| c.as_literal().is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceProgram {
    signature: Signature,
    rules: Vec<ChoiceRule>,
}

impl ChoiceProgram {
    /// Checks every domain against the signature and drops repeated rules,
    /// keeping the first occurrence.
    pub fn new(signature: Signature, rules: Vec<ChoiceRule>) -> Result<Self> {
        let width = signature.len();
        let mut kept: Vec<ChoiceRule> = Vec::with_capacity(rules.len());
        for r in rules {
            for c in std::iter::once(&r.head).chain(&r.body) {
                if !c.dom().within(width) {
                    return Err(Error::InvalidAtom(
                        "domain refers to atoms outside the signature".into(),
                    ));
                }
            }
            if !kept.contains(&r) {
                kept.push(r);
            }
        }
        Ok(ChoiceProgram {
            signature,
            rules: kept,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[ChoiceRule] {
        &self.rules
    }

    pub fn is_normal(&self) -> bool {
        self.rules.iter().all(ChoiceRule::is_normal)
    }

    /// Every head is a positive atom.
    pub fn is_aggregate(&self) -> bool {
        self.rules
            .iter()
            .all(|r| matches!(r.head.as_literal(), Some((_, true))))
    }

    /// Normal and aggregate: a normal logic program.
    pub fn is_normal_logic_program(&self) -> bool {
        self.is_normal() && self.is_aggregate()
    }

    pub fn heads_monotone(&self, cap: usize) -> Result<bool> {
        for r in &self.rules {
            if !r.head.is_monotone(cap)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Union of all head domains.
    pub fn head_atoms(&self) -> AtomSet {
        self.rules
            .iter()
            .fold(AtomSet::empty(), |acc, r| acc | r.head.dom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub atom: AtomId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: AtomId) -> Self {
        Literal {
            atom,
            positive: true,
        }
    }

    pub fn neg(atom: AtomId) -> Self {
        Literal {
            atom,
            positive: false,
        }
    }
}

/// `⋁ head ← body` with a non-empty head and a conjunction of literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DisjunctiveRule {
    head: AtomSet,
    pub body: Vec<Literal>,
}

impl DisjunctiveRule {
    pub fn new(head: AtomSet, body: Vec<Literal>) -> Result<Self> {
        if head.is_empty() {
            return Err(Error::InvalidAtom("disjunctive head is empty".into()));
        }
        Ok(DisjunctiveRule { head, body })
    }

    pub fn head(&self) -> AtomSet {
        self.head
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjunctiveProgram {
    signature: Signature,
    rules: Vec<DisjunctiveRule>,
}

impl DisjunctiveProgram {
    pub fn new(signature: Signature, rules: Vec<DisjunctiveRule>) -> Result<Self> {
        let width = signature.len();
        let mut kept: Vec<DisjunctiveRule> = Vec::with_capacity(rules.len());
        for r in rules {
            if !r.head.within(width) || r.body.iter().any(|l| l.atom >= width) {
                return Err(Error::InvalidAtom(
                    "rule refers to atoms outside the signature".into(),
                ));
            }
            if !kept.contains(&r) {
                kept.push(r);
            }
        }
        Ok(DisjunctiveProgram {
            signature,
            rules: kept,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[DisjunctiveRule] {
        &self.rules
    }
}
