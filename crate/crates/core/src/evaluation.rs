//! Two- and four-valued evaluation of choice atoms, rule bodies and programs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{AtomSet, Pair};
use crate::syntax::{ChoiceAtom, ChoiceProgram, Literal};

/// The bilattice FOUR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FourValue {
    T,
    F,
    U,
    C,
}

impl FourValue {
    /// Truth order: F at the bottom, T at the top, U and C incomparable.
    pub fn leq_t(self, other: FourValue) -> bool {
        use FourValue::*;
        self == other || self == F || other == T
    }

    /// Information order: U at the bottom, C at the top, T and F incomparable.
    pub fn leq_i(self, other: FourValue) -> bool {
        use FourValue::*;
        self == other || self == U || other == C
    }

    pub fn meet_t(self, other: FourValue) -> FourValue {
        if self.leq_t(other) {
            self
        } else if other.leq_t(self) {
            other
        } else {
            FourValue::F
        }
    }

    pub fn join_t(self, other: FourValue) -> FourValue {
        if self.leq_t(other) {
            other
        } else if other.leq_t(self) {
            self
        } else {
            FourValue::T
        }
    }

    /// Value of a statement that holds in the lower bound iff `lower` and in
    /// the upper bound iff `upper`.
    pub fn from_bounds(lower: bool, upper: bool) -> FourValue {
        match (lower, upper) {
            (true, true) => FourValue::T,
            (false, false) => FourValue::F,
            (true, false) => FourValue::C,
            (false, true) => FourValue::U,
        }
    }
}

/// The involution: swaps T and F, fixes U and C.
impl std::ops::Neg for FourValue {
    type Output = FourValue;

    fn neg(self) -> FourValue {
        match self {
            FourValue::T => FourValue::F,
            FourValue::F => FourValue::T,
            v => v,
        }
    }
}

impl fmt::Display for FourValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FourValue::T => "T",
            FourValue::F => "F",
            FourValue::U => "U",
            FourValue::C => "C",
        };
        f.write_str(s)
    }
}

/// Whether `x ∩ dom(c) ∈ sat(c)`.
pub fn satisfies(x: AtomSet, c: &ChoiceAtom) -> bool {
    c.satisfied_by(x)
}

/// Value of an atom: T in both bounds, U only in the upper one, C only in
/// the lower one, F in neither.
pub fn eval_atom(pair: Pair, atom: usize) -> FourValue {
    FourValue::from_bounds(pair.lower.contains(atom), pair.upper.contains(atom))
}

pub fn eval_literal(pair: Pair, lit: Literal) -> FourValue {
    let v = eval_atom(pair, lit.atom);
    if lit.positive {
        v
    } else {
        -v
    }
}

/// Four-valued value of a choice atom.
///
/// Literal-shaped atoms go through the atom case and the involution, so
/// `¬q` is U at `({p},{p,q})`. Every other atom is valued by whether each
/// bound satisfies it.
pub fn eval4(pair: Pair, c: &ChoiceAtom) -> FourValue {
    match c.as_literal() {
        Some((atom, positive)) => eval_literal(pair, Literal { atom, positive }),
        None => FourValue::from_bounds(c.satisfied_by(pair.lower), c.satisfied_by(pair.upper)),
    }
}

/// `≤_t`-meet over a conjunction of literals; the empty conjunction is T.
pub fn eval_formula4(pair: Pair, body: &[Literal]) -> FourValue {
    body.iter()
        .fold(FourValue::T, |acc, &l| acc.meet_t(eval_literal(pair, l)))
}

/// `≤_t`-meet over a body of choice atoms.
pub fn eval_body4(pair: Pair, body: &[ChoiceAtom]) -> FourValue {
    body.iter()
        .fold(FourValue::T, |acc, c| acc.meet_t(eval4(pair, c)))
}

pub fn is_model(x: AtomSet, p: &ChoiceProgram) -> bool {
    p.rules()
        .iter()
        .all(|r| !r.applicable(x) || r.head.satisfied_by(x))
}

pub fn is_supported_model(x: AtomSet, p: &ChoiceProgram) -> bool {
    if !is_model(x, p) {
        return false;
    }
    let support = p
        .rules()
        .iter()
        .filter(|r| r.applicable(x))
        .fold(AtomSet::empty(), |acc, r| acc | r.head.dom());
    x.is_subset(support)
}

fn check_3v(pair: Pair, p: &ChoiceProgram) -> Result<()> {
    if !p.is_normal() {
        return Err(Error::NotNormal);
    }
    if !pair.is_consistent() {
        return Err(Error::NotConsistent {
            pair: p.signature().render_pair(pair),
        });
    }
    Ok(())
}

/// Every rule body is `≤_t` its head.
pub fn is_3v_model(pair: Pair, p: &ChoiceProgram) -> Result<bool> {
    check_3v(pair, p)?;
    Ok(p.rules()
        .iter()
        .all(|r| eval_body4(pair, &r.body).leq_t(eval4(pair, &r.head))))
}

/// A three-valued model in which every non-false atom has a rule whose
/// body is at least as true as the atom.
pub fn is_3v_supported(pair: Pair, p: &ChoiceProgram) -> Result<bool> {
    if !is_3v_model(pair, p)? {
        return Ok(false);
    }
    Ok(pair.upper.iter().all(|a| {
        let value = eval_atom(pair, a);
        p.rules()
            .iter()
            .any(|r| r.head.dom().contains(a) && value.leq_t(eval_body4(pair, &r.body)))
    }))
}
