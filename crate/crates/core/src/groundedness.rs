//! Level-map groundedness notions and the trigger relation.
//!
//! Each notion asks for a ranking `κ: x → ℕ` such that every atom of `x` is
//! supported by a rule whose support lies strictly below it. The conditions
//! are monotone in the set of lower-ranked atoms, so the least ranking is
//! found by saturation; [`grounded_bruteforce`] searches all rankings.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{AtomId, AtomSet, Pair, Signature};
use crate::limits::Limits;
use crate::operators::{Approximator, OperatorKind};
use crate::semantics::c_stable_fixpoints;
use crate::syntax::{ChoiceProgram, ChoiceRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Notion {
    D,
    S,
    A,
    Erdem,
}

impl Notion {
    pub const CHOICE: [Notion; 3] = [Notion::D, Notion::S, Notion::A];
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Notion::D => "d",
            Notion::S => "s",
            Notion::A => "a",
            Notion::Erdem => "erdem",
        })
    }
}

impl FromStr for Notion {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "d" => Ok(Notion::D),
            "s" => Ok(Notion::S),
            "a" => Ok(Notion::A),
            "erdem" => Ok(Notion::Erdem),
            other => Err(format!("unknown groundedness notion `{other}`")),
        }
    }
}

/// A ranking of the atoms of a set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LevelMap {
    kappa: BTreeMap<AtomId, usize>,
}

impl LevelMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, atom: AtomId, level: usize) {
        self.kappa.insert(atom, level);
    }

    pub fn get(&self, atom: AtomId) -> Option<usize> {
        self.kappa.get(&atom).copied()
    }

    pub fn domain(&self) -> AtomSet {
        self.kappa.keys().copied().collect()
    }

    /// Atoms ranked strictly below `level`.
    pub fn below(&self, level: usize) -> AtomSet {
        self.kappa
            .iter()
            .filter(|&(_, &l)| l < level)
            .map(|(&a, _)| a)
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AtomId, usize)> + '_ {
        self.kappa.iter().map(|(&a, &l)| (a, l))
    }

    pub fn to_json(&self, sig: &Signature) -> Value {
        let map: serde_json::Map<String, Value> = self
            .iter()
            .map(|(a, l)| (sig.name(a).to_string(), json!(l)))
            .collect();
        Value::Object(map)
    }

    pub fn render(&self, sig: &Signature) -> String {
        let parts: Vec<String> = self
            .iter()
            .map(|(a, l)| format!("κ({})={l}", sig.name(a)))
            .collect();
        parts.join(",")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundednessReport {
    pub notion: Notion,
    pub set: AtomSet,
    pub holds: bool,
    /// Least ranking, when the set is grounded.
    pub levels: Option<LevelMap>,
    /// Atoms that never receive support, when it is not.
    pub blocking: Option<AtomSet>,
}

impl GroundednessReport {
    pub fn to_json(&self, sig: &Signature) -> Value {
        json!({
            "notion": self.notion,
            "set": sig.set_json(self.set),
            "holds": self.holds,
            "levels": self.levels.as_ref().map(|l| l.to_json(sig)),
            "blocking": self.blocking.map(|b| sig.set_json(b)),
        })
    }
}

/// Every `w ∈ [z, upper]` satisfies every body atom of `r`. False unless
/// `z ⊆ upper`.
pub fn is_trigger(z: AtomSet, upper: AtomSet, r: &ChoiceRule, cap: usize) -> Result<bool> {
    if !z.is_subset(upper) {
        return Ok(false);
    }
    for c in &r.body {
        if !c.satisfied_throughout(z, upper, cap)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_notion(notion: Notion, p: &ChoiceProgram) -> Result<()> {
    if notion == Notion::Erdem && !p.is_normal_logic_program() {
        return Err(Error::NotNormal);
    }
    Ok(())
}

/// Whether `a` has a rule whose support lies within `below`.
fn supported(
    notion: Notion,
    p: &ChoiceProgram,
    x: AtomSet,
    a: AtomId,
    below: AtomSet,
    cap: usize,
) -> Result<bool> {
    for r in p.rules().iter().filter(|r| r.head.dom().contains(a)) {
        let ok = match notion {
            Notion::D => r.applicable(x) && (r.body_dom() & x).is_subset(below),
            // Triggers are closed upwards within `x`, so `below` is the best
            // candidate.
            Notion::S => is_trigger(below, x, r, cap)?,
            Notion::A => r
                .body
                .iter()
                .all(|c| c.satisfied_somewhere(AtomSet::empty(), below)),
            Notion::Erdem => r
                .body
                .iter()
                .filter_map(|c| c.as_literal())
                .filter(|&(_, positive)| positive)
                .all(|(b, _)| below.contains(b)),
        };
        if ok {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Decides `notion` for `x` by least-level saturation.
pub fn grounded(
    notion: Notion,
    x: AtomSet,
    p: &ChoiceProgram,
    limits: Limits,
) -> Result<GroundednessReport> {
    check_notion(notion, p)?;
    let mut levels = LevelMap::new();
    let mut reached = AtomSet::empty();
    let mut level = 0;
    loop {
        let mut next = AtomSet::empty();
        for a in (x - reached).iter() {
            if supported(notion, p, x, a, reached, limits.max_interval)? {
                next.insert(a);
            }
        }
        if next.is_empty() {
            break;
        }
        for a in next.iter() {
            levels.set(a, level);
        }
        reached = reached | next;
        level += 1;
    }
    let holds = reached == x;
    Ok(GroundednessReport {
        notion,
        set: x,
        holds,
        levels: holds.then_some(levels),
        blocking: (!holds).then_some(x - reached),
    })
}

pub fn is_d_grounded(x: AtomSet, p: &ChoiceProgram) -> Result<GroundednessReport> {
    grounded(Notion::D, x, p, Limits::default())
}

pub fn is_s_grounded(x: AtomSet, p: &ChoiceProgram) -> Result<GroundednessReport> {
    grounded(Notion::S, x, p, Limits::default())
}

pub fn is_a_grounded(x: AtomSet, p: &ChoiceProgram) -> Result<GroundednessReport> {
    grounded(Notion::A, x, p, Limits::default())
}

pub fn erdem_grounded(x: AtomSet, p: &ChoiceProgram) -> Result<GroundednessReport> {
    grounded(Notion::Erdem, x, p, Limits::default())
}

/// The defining condition of `notion` for one ranking, checked as written:
/// maxima over ranks, triggers and witnesses enumerated explicitly.
pub fn validate_levels(
    notion: Notion,
    x: AtomSet,
    p: &ChoiceProgram,
    kappa: &LevelMap,
    limits: Limits,
) -> Result<bool> {
    check_notion(notion, p)?;
    if kappa.domain() != x {
        return Ok(false);
    }
    for a in x.iter() {
        let rank = kappa.get(a).expect("domain checked");
        let lower = kappa.below(rank);
        let mut found = false;
        for r in p.rules().iter().filter(|r| r.head.dom().contains(a)) {
            found = match notion {
                Notion::D => {
                    r.applicable(x)
                        && (r.body_dom() & x)
                            .iter()
                            .all(|b| kappa.get(b).expect("b ∈ x") < rank)
                }
                Notion::S => {
                    let mut any = false;
                    for z in lower.subsets() {
                        if is_trigger(z, x, r, limits.max_interval)? {
                            any = true;
                            break;
                        }
                    }
                    any
                }
                Notion::A => r
                    .body
                    .iter()
                    .all(|c| lower.subsets().any(|z| c.satisfied_by(z))),
                Notion::Erdem => r.body.iter().all(|c| match c.as_literal() {
                    Some((b, true)) => kappa.get(b).is_some_and(|k| k < rank),
                    _ => true,
                }),
            };
            if found {
                break;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Searches every ranking `κ: x → {0..|x|-1}`.
pub fn grounded_bruteforce(
    notion: Notion,
    x: AtomSet,
    p: &ChoiceProgram,
    limits: Limits,
) -> Result<GroundednessReport> {
    check_notion(notion, p)?;
    let n = x.len();
    if n > limits.max_kappa_atoms {
        return Err(Error::LevelSearchTooLarge {
            size: n,
            cap: limits.max_kappa_atoms,
        });
    }
    let atoms: Vec<AtomId> = x.iter().collect();
    let mut digits = vec![0usize; n];
    loop {
        let mut kappa = LevelMap::new();
        for (&a, &l) in atoms.iter().zip(&digits) {
            kappa.set(a, l);
        }
        if validate_levels(notion, x, p, &kappa, limits)? {
            return Ok(GroundednessReport {
                notion,
                set: x,
                holds: true,
                levels: Some(kappa),
                blocking: None,
            });
        }
        // Advance the mixed-radix counter; stop after the last ranking.
        let mut i = 0;
        while i < n {
            digits[i] += 1;
            if digits[i] < n {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == n {
            return Ok(GroundednessReport {
                notion,
                set: x,
                holds: false,
                levels: None,
                blocking: Some(x),
            });
        }
    }
}

/// Outcome of d-, s- and a-groundedness for one set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Grades {
    pub d: bool,
    pub s: bool,
    pub a: bool,
}

impl Grades {
    pub fn of(x: AtomSet, p: &ChoiceProgram, limits: Limits) -> Result<Grades> {
        Ok(Grades {
            d: grounded(Notion::D, x, p, limits)?.holds,
            s: grounded(Notion::S, x, p, limits)?.holds,
            a: grounded(Notion::A, x, p, limits)?.holds,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableGroundedness {
    pub pair: Pair,
    pub lower: Grades,
    pub upper: Grades,
}

/// Grades both bounds of every constructive stable fixpoint of `kind`.
/// GZ is restricted to total fixpoints.
pub fn groundedness_of_cstable(
    op: &Approximator,
    kind: OperatorKind,
) -> Result<Vec<StableGroundedness>> {
    let res = c_stable_fixpoints(op, kind, kind == OperatorKind::Gz)?;
    let p = op.program();
    res.pairs
        .into_iter()
        .map(|pair| {
            Ok(StableGroundedness {
                pair,
                lower: Grades::of(pair.lower, p, op.limits())?,
                upper: Grades::of(pair.upper, p, op.limits())?,
            })
        })
        .collect()
}
