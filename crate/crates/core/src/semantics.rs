//! Fixpoints, stable fixpoints and constructive stable fixpoints.
//!
//! Signatures are finite, so a well-founded sequence never needs a limit
//! step: every chain is finite and reachability is a breadth-first closure.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{is_model, is_supported_model};
use crate::lattice::{smyth_leq, AtomSet, AtomSetFamily, Pair};
use crate::operators::{Approximator, OperatorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Minimal fixpoints of the frozen-bound projections.
    Minimal,
    /// Fixpoints reachable by a well-founded sequence.
    Constructive,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Minimal => "minimal",
            Flavor::Constructive => "constructive",
        })
    }
}

impl FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "minimal" => Ok(Flavor::Minimal),
            "constructive" => Ok(Flavor::Constructive),
            other => Err(format!("unknown flavor `{other}`")),
        }
    }
}

/// A well-founded sequence, from its start to its terminal set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WfsTrace {
    pub steps: Vec<AtomSet>,
}

impl WfsTrace {
    pub fn terminal(&self) -> AtomSet {
        *self.steps.last().expect("traces are non-empty")
    }
}

/// Witness sequences for both bounds of a stable pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTraces {
    pub lower: WfsTrace,
    pub upper: WfsTrace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableResult {
    pub kind: OperatorKind,
    pub flavor: Flavor,
    pub pairs: Vec<Pair>,
    /// One entry per pair, present for the constructive flavor.
    pub traces: Option<Vec<PairTraces>>,
}

/// Sets reachable from a start set, with breadth-first parents.
#[derive(Debug, Clone)]
pub struct Reach {
    parent: BTreeMap<AtomSet, Option<AtomSet>>,
}

impl Reach {
    pub fn reachable(&self) -> AtomSetFamily {
        self.parent.keys().copied().collect()
    }

    pub fn contains(&self, x: AtomSet) -> bool {
        self.parent.contains_key(&x)
    }

    /// A shortest sequence from the start to `x`.
    pub fn trace(&self, x: AtomSet) -> Option<WfsTrace> {
        let mut steps = vec![x];
        let mut cur = *self.parent.get(&x)?;
        while let Some(p) = cur {
            steps.push(p);
            cur = self.parent[&p];
        }
        steps.reverse();
        Some(WfsTrace { steps })
    }
}

/// Breadth-first closure of `start` under `x ↦ {x' ∈ step(x) | x ⊆ x'}`.
pub fn wfs_reach<F>(start: AtomSet, step: F, max_states: usize) -> Result<Reach>
where
    F: Fn(AtomSet) -> Result<AtomSetFamily>,
{
    let mut parent = BTreeMap::new();
    parent.insert(start, None);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for next in step(x)?.iter() {
            if x.is_subset(next) && !parent.contains_key(&next) {
                if parent.len() >= max_states {
                    return Err(Error::StateCapExceeded { cap: max_states });
                }
                parent.insert(next, Some(x));
                queue.push_back(next);
            }
        }
    }
    Ok(Reach { parent })
}

fn check_sweep(op: &Approximator) -> Result<()> {
    let n = op.program().signature().len();
    let cap = op.limits().max_sweep_atoms;
    if n > cap {
        return Err(Error::SignatureTooLarge { size: n, cap });
    }
    Ok(())
}

/// Fails unless every operator image at every consistent pair is non-empty.
///
/// On consistent pairs each head set of the four operators is contained in
/// the applicable heads of some single interpretation, so it suffices that
/// `IC_P(z)` is non-empty for every `z`.
pub fn check_assumption(op: &Approximator, kind: OperatorKind) -> Result<()> {
    check_sweep(op)?;
    let sig = op.program().signature();
    for z in sig.full().subsets() {
        if op.ic_raw(z)?.is_empty() {
            return Err(Error::AssumptionViolation {
                operator: kind,
                bound: "lower",
                pair: sig.render_pair(Pair::total(z)),
            });
        }
    }
    Ok(())
}

fn candidate_pairs(op: &Approximator, totals_only: bool) -> Vec<Pair> {
    let full = op.program().signature().full();
    let mut pairs: Vec<Pair> = if totals_only {
        full.subsets().map(Pair::total).collect()
    } else {
        full.subsets()
            .flat_map(|y| y.subsets().map(move |x| Pair::new(x, y)))
            .collect()
    };
    pairs.sort();
    pairs
}

/// Consistent (or total) fixpoints of `kind`, in candidate order.
pub fn fixpoints(op: &Approximator, kind: OperatorKind, totals_only: bool) -> Result<Vec<Pair>> {
    check_assumption(op, kind)?;
    let candidates = candidate_pairs(op, totals_only);
    let flags: Vec<bool> = candidates
        .par_iter()
        .map(|&p| op.is_fixpoint(kind, p))
        .collect::<Result<_>>()?;
    Ok(candidates
        .into_iter()
        .zip(flags)
        .filter_map(|(p, keep)| keep.then_some(p))
        .collect())
}

/// Supported models by direct enumeration, in canonical order.
pub fn supported_models(op: &Approximator) -> Result<Vec<AtomSet>> {
    check_sweep(op)?;
    let p = op.program();
    let mut out: Vec<AtomSet> = p
        .signature()
        .full()
        .subsets()
        .filter(|&x| is_supported_model(x, p))
        .collect();
    out.sort();
    Ok(out)
}

/// The lower image of `kind` at `(x, y)`; GZ is evaluated by its defining
/// formula even when `x ⊄ y`, which only sequences passing outside `y` reach.
fn lower_step(
    op: &Approximator,
    kind: OperatorKind,
    x: AtomSet,
    y: AtomSet,
) -> Result<AtomSetFamily> {
    if kind == OperatorKind::Gz && !x.is_subset(y) {
        let relaxed = Approximator::with_limits(op.program(), op.limits()).allow_inconsistent_gz();
        return relaxed.lower_image(kind, Pair::new(x, y));
    }
    op.lower_image(kind, Pair::new(x, y))
}

/// Well-founded sequences of `O_l(·, y)` from the empty set.
pub fn lower_reach(op: &Approximator, kind: OperatorKind, y: AtomSet) -> Result<Reach> {
    wfs_reach(
        AtomSet::empty(),
        |x| lower_step(op, kind, x, y),
        op.limits().max_states,
    )
}

/// Well-founded sequences of `O_u(x, ·)`. They start at `x`, the least
/// upper bound for which `(x, ·)` is consistent.
pub fn upper_reach(op: &Approximator, kind: OperatorKind, x: AtomSet) -> Result<Reach> {
    if kind == OperatorKind::Gz {
        return Err(Error::GzUpperUnsupported);
    }
    wfs_reach(
        x,
        |y| op.upper_image(kind, Pair::new(x, y)),
        op.limits().max_states,
    )
}

/// Reachable fixpoints of `O_l(·, y)`.
pub fn c_complete_lower(
    op: &Approximator,
    kind: OperatorKind,
    y: AtomSet,
) -> Result<AtomSetFamily> {
    let reach = lower_reach(op, kind, y)?;
    let mut out = AtomSetFamily::new();
    for x in reach.reachable().iter() {
        if lower_step(op, kind, x, y)?.contains(x) {
            out.insert(x);
        }
    }
    Ok(out)
}

/// Reachable fixpoints of `O_u(x, ·)`.
pub fn c_complete_upper(
    op: &Approximator,
    kind: OperatorKind,
    x: AtomSet,
) -> Result<AtomSetFamily> {
    let reach = upper_reach(op, kind, x)?;
    let mut out = AtomSetFamily::new();
    for y in reach.reachable().iter() {
        if op.upper_contains(kind, Pair::new(x, y), y)? {
            out.insert(y);
        }
    }
    Ok(out)
}

/// `⊆`-minimal fixpoints of `O_l(·, y)` among the subsets of `y`.
pub fn minimal_complete_lower(
    op: &Approximator,
    kind: OperatorKind,
    y: AtomSet,
) -> Result<AtomSetFamily> {
    let mut fixed = AtomSetFamily::new();
    for x in y.subsets() {
        if op.lower_contains(kind, Pair::new(x, y), x)? {
            fixed.insert(x);
        }
    }
    Ok(fixed.minimal())
}

/// `⊆`-minimal fixpoints of `O_u(x, ·)` among the supersets of `x`.
pub fn minimal_complete_upper(
    op: &Approximator,
    kind: OperatorKind,
    x: AtomSet,
) -> Result<AtomSetFamily> {
    let full = op.program().signature().full();
    let mut fixed = AtomSetFamily::new();
    for extra in (full - x).subsets() {
        let y = x | extra;
        if op.upper_contains(kind, Pair::new(x, y), y)? {
            fixed.insert(y);
        }
    }
    Ok(fixed.minimal())
}

/// Constructive stable fixpoints: `x` reachable for `O_l(·, y)` and `y`
/// reachable for `O_u(x, ·)`, both fixpoints.
pub fn c_stable_fixpoints(
    op: &Approximator,
    kind: OperatorKind,
    totals_only: bool,
) -> Result<StableResult> {
    if kind == OperatorKind::Gz && !totals_only {
        return Err(Error::GzUpperUnsupported);
    }
    let candidates = fixpoints(op, kind, totals_only)?;

    let mut ys: Vec<AtomSet> = candidates.iter().map(|p| p.upper).collect();
    ys.sort();
    ys.dedup();
    let lower: HashMap<AtomSet, Reach> = ys
        .par_iter()
        .map(|&y| Ok((y, lower_reach(op, kind, y)?)))
        .collect::<Result<_>>()?;

    let upper: HashMap<AtomSet, Reach> = if totals_only {
        HashMap::new()
    } else {
        let mut xs: Vec<AtomSet> = candidates.iter().map(|p| p.lower).collect();
        xs.sort();
        xs.dedup();
        xs.par_iter()
            .map(|&x| Ok((x, upper_reach(op, kind, x)?)))
            .collect::<Result<_>>()?
    };

    let mut pairs = Vec::new();
    let mut traces = Vec::new();
    for p in candidates {
        let Some(lo) = lower[&p.upper].trace(p.lower) else {
            continue;
        };
        let up = if totals_only {
            // The upper sequence of a total pair starts at its own terminal.
            Some(WfsTrace {
                steps: vec![p.upper],
            })
        } else {
            upper[&p.lower].trace(p.upper)
        };
        if let Some(up) = up {
            pairs.push(p);
            traces.push(PairTraces {
                lower: lo,
                upper: up,
            });
        }
    }
    Ok(StableResult {
        kind,
        flavor: Flavor::Constructive,
        pairs,
        traces: Some(traces),
    })
}

/// Minimality-based stable fixpoints.
pub fn stable_fixpoints(
    op: &Approximator,
    kind: OperatorKind,
    totals_only: bool,
) -> Result<StableResult> {
    let candidates = fixpoints(op, kind, totals_only)?;
    let mut ys: Vec<AtomSet> = candidates.iter().map(|p| p.upper).collect();
    ys.sort();
    ys.dedup();
    let lower: HashMap<AtomSet, AtomSetFamily> = ys
        .par_iter()
        .map(|&y| Ok((y, minimal_complete_lower(op, kind, y)?)))
        .collect::<Result<_>>()?;
    let mut xs: Vec<AtomSet> = candidates.iter().map(|p| p.lower).collect();
    xs.sort();
    xs.dedup();
    let upper: HashMap<AtomSet, AtomSetFamily> = xs
        .par_iter()
        .map(|&x| Ok((x, minimal_complete_upper(op, kind, x)?)))
        .collect::<Result<_>>()?;
    let pairs = candidates
        .into_iter()
        .filter(|p| lower[&p.upper].contains(p.lower) && upper[&p.lower].contains(p.upper))
        .collect();
    Ok(StableResult {
        kind,
        flavor: Flavor::Minimal,
        pairs,
        traces: None,
    })
}

pub fn stable(
    op: &Approximator,
    kind: OperatorKind,
    flavor: Flavor,
    totals_only: bool,
) -> Result<StableResult> {
    match flavor {
        Flavor::Minimal => stable_fixpoints(op, kind, totals_only),
        Flavor::Constructive => c_stable_fixpoints(op, kind, totals_only),
    }
}

/// Models characterised as sets `x` with `IC_P(x)` Smyth-below `{x}`.
/// Only sound for programs whose heads are all monotone.
pub fn prefixpoint_models(op: &Approximator) -> Result<Vec<AtomSet>> {
    check_sweep(op)?;
    let p = op.program();
    if !p.heads_monotone(op.limits().max_domain)? {
        return Err(Error::NonMonotoneHead);
    }
    let mut out = Vec::new();
    for x in p.signature().full().subsets() {
        if smyth_leq(&op.ic_raw(x)?, &AtomSetFamily::singleton(x)) {
            out.push(x);
        }
    }
    out.sort();
    Ok(out)
}

/// Models by direct enumeration, in canonical order.
pub fn models(op: &Approximator) -> Result<Vec<AtomSet>> {
    check_sweep(op)?;
    let p = op.program();
    let mut out: Vec<AtomSet> = p
        .signature()
        .full()
        .subsets()
        .filter(|&x| is_model(x, p))
        .collect();
    out.sort();
    Ok(out)
}
