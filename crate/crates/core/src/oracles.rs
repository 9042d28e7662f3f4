//! Reference semantics used to cross-check the operator-based ones.
//!
//! Nothing here calls into `operators` or `semantics`: each oracle works
//! from the rules and plain set enumeration only.

use crate::error::{Error, Result};
use crate::lattice::{interval, AtomId, AtomSet, Pair};
use crate::limits::Limits;
use crate::syntax::{ChoiceAtom, ChoiceProgram, ChoiceRule};

fn holds_in(x: AtomSet, p: &ChoiceProgram) -> bool {
    p.rules()
        .iter()
        .all(|r| !r.body.iter().all(|c| c.satisfied_by(x)) || r.head.satisfied_by(x))
}

fn check_sweep(p: &ChoiceProgram, limits: Limits) -> Result<()> {
    let n = p.signature().len();
    if n > limits.max_sweep_atoms {
        return Err(Error::SignatureTooLarge {
            size: n,
            cap: limits.max_sweep_atoms,
        });
    }
    Ok(())
}

/// A rule of the reduct: a single head atom and upward-closed body atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NssRule {
    pub head: AtomId,
    pub body: Vec<ChoiceAtom>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NssProgram {
    pub rules: Vec<NssRule>,
}

/// `C̄_y`: the satisfiers of `c` inside `y`, closed upwards within `y`.
pub fn closure_within(c: &ChoiceAtom, y: AtomSet, cap: usize) -> Result<ChoiceAtom> {
    let top = y & c.dom();
    let mut sat = Vec::new();
    for z in c.satisfiers(cap)?.iter().filter(|z| z.is_subset(y)) {
        for extra in (top - z).subsets() {
            sat.push(z | extra);
        }
    }
    ChoiceAtom::extensional(c.dom(), sat)
}

/// Drops the rules whose body is false in `y` and splits every remaining
/// head into one rule per head atom inside `y`.
pub fn nss_build(p: &ChoiceProgram, y: AtomSet, limits: Limits) -> Result<NssProgram> {
    let mut rules = Vec::new();
    for r in p.rules() {
        if !r.body.iter().all(|c| c.satisfied_by(y)) {
            continue;
        }
        let body = r
            .body
            .iter()
            .map(|c| closure_within(c, y, limits.max_domain))
            .collect::<Result<Vec<_>>>()?;
        for head in (r.head.dom() & y).iter() {
            rules.push(NssRule {
                head,
                body: body.clone(),
            });
        }
    }
    Ok(NssProgram { rules })
}

/// Least fixpoint of the one-step provability operator of the reduct.
pub fn nss_least_model(p: &ChoiceProgram, y: AtomSet, limits: Limits) -> Result<AtomSet> {
    let nss = nss_build(p, y, limits)?;
    let mut x = AtomSet::empty();
    loop {
        let next: AtomSet = nss
            .rules
            .iter()
            .filter(|r| r.body.iter().all(|c| c.satisfied_by(x)))
            .map(|r| r.head)
            .collect();
        if next == x {
            return Ok(x);
        }
        x = next;
    }
}

/// Models `y` that equal the least model of their reduct.
pub fn mr_stable_via_nss(p: &ChoiceProgram, limits: Limits) -> Result<Vec<AtomSet>> {
    check_sweep(p, limits)?;
    let mut out = Vec::new();
    for y in p.signature().full().subsets() {
        if holds_in(y, p) && nss_least_model(p, y, limits)? == y {
            out.push(y);
        }
    }
    out.sort();
    Ok(out)
}

/// Head atom, positive body atoms and negated body atoms of a normal rule.
fn normal_parts(r: &ChoiceRule) -> Option<(AtomId, AtomSet, AtomSet)> {
    let (head, true) = r.head.as_literal()? else {
        return None;
    };
    let mut pos = AtomSet::empty();
    let mut neg = AtomSet::empty();
    for c in &r.body {
        let (a, positive) = c.as_literal()?;
        if positive {
            pos.insert(a);
        } else {
            neg.insert(a);
        }
    }
    Some((head, pos, neg))
}

/// Least model of the reduct of a normal logic program with respect to `y`.
pub fn gl_reduct_least_model(p: &ChoiceProgram, y: AtomSet) -> Result<AtomSet> {
    let rules: Vec<(AtomId, AtomSet, AtomSet)> = p
        .rules()
        .iter()
        .map(normal_parts)
        .collect::<Option<_>>()
        .ok_or(Error::NotNormal)?;
    let mut x = AtomSet::empty();
    loop {
        let next: AtomSet = rules
            .iter()
            .filter(|(_, pos, neg)| neg.is_disjoint(y) && pos.is_subset(x))
            .map(|&(h, _, _)| h)
            .collect();
        if next == x {
            return Ok(x);
        }
        x = next;
    }
}

/// Stable models of a normal logic program: `y` equal to the least model
/// of its reduct.
pub fn gl_stable_models(p: &ChoiceProgram, limits: Limits) -> Result<Vec<AtomSet>> {
    check_sweep(p, limits)?;
    let mut out = Vec::new();
    for y in p.signature().full().subsets() {
        if gl_reduct_least_model(p, y)? == y {
            out.push(y);
        }
    }
    out.sort();
    Ok(out)
}

/// Partial stable models: consistent `(x, y)` with `x = Γ(y)` and `y = Γ(x)`.
pub fn gl_partial_stable(p: &ChoiceProgram, limits: Limits) -> Result<Vec<Pair>> {
    check_sweep(p, limits)?;
    let mut out = Vec::new();
    for y in p.signature().full().subsets() {
        let x = gl_reduct_least_model(p, y)?;
        if x.is_subset(y) && gl_reduct_least_model(p, x)? == y {
            out.push(Pair::new(x, y));
        }
    }
    out.sort();
    Ok(out)
}

/// Heads of rules whose body holds at every set of `[x, y]`, found by
/// enumerating the interval.
pub fn naive_lpst_hd(p: &ChoiceProgram, pair: Pair, limits: Limits) -> Result<Vec<ChoiceAtom>> {
    let members: Vec<AtomSet> = interval(pair.lower, pair.upper, limits.max_interval)?.collect();
    let mut heads: Vec<ChoiceAtom> = Vec::new();
    for r in p.rules() {
        let fires = members
            .iter()
            .all(|&z| r.body.iter().all(|c| c.satisfied_by(z)));
        if fires && !heads.contains(&r.head) {
            heads.push(r.head.clone());
        }
    }
    Ok(heads)
}

/// Answer sets of an aggregate program under the vicious-circle reduct:
/// drop rules with a body atom false in `x`, replace each remaining body
/// atom by the conjunction of its domain atoms true in `x`, and keep `x`
/// when it is the least model of the result.
pub fn gz_reduct_stable(p: &ChoiceProgram, limits: Limits) -> Result<Vec<AtomSet>> {
    check_sweep(p, limits)?;
    let mut heads = Vec::new();
    for r in p.rules() {
        match r.head.as_literal() {
            Some((a, true)) => heads.push(a),
            _ => {
                return Err(Error::InvalidAtom(
                    "aggregate programs have atom heads".into(),
                ))
            }
        }
    }
    let mut out = Vec::new();
    for x in p.signature().full().subsets() {
        let reduct: Vec<(AtomId, AtomSet)> = p
            .rules()
            .iter()
            .zip(&heads)
            .filter(|(r, _)| r.body.iter().all(|c| c.satisfied_by(x)))
            .map(|(r, &h)| {
                (
                    h,
                    r.body
                        .iter()
                        .fold(AtomSet::empty(), |acc, c| acc | (c.dom() & x)),
                )
            })
            .collect();
        let mut m = AtomSet::empty();
        loop {
            let next: AtomSet = reduct
                .iter()
                .filter(|(_, need)| need.is_subset(m))
                .map(|&(h, _)| h)
                .collect();
            if next == m {
                break;
            }
            m = next;
        }
        if m == x {
            out.push(x);
        }
    }
    out.sort();
    Ok(out)
}
