//! The immediate consequence operator and its four approximators, plus the
//! operator for disjunctive programs and the translation into choice programs.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{eval_formula4, FourValue};
use crate::lattice::{interval, AtomSet, AtomSetFamily, Pair};
use crate::limits::Limits;
use crate::syntax::{ChoiceAtom, ChoiceProgram, ChoiceRule, DisjunctiveProgram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperatorKind {
    #[serde(rename = "GZ")]
    Gz,
    #[serde(rename = "LPST")]
    Lpst,
    #[serde(rename = "MR")]
    Mr,
    #[serde(rename = "ULT")]
    Ult,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 4] = [
        OperatorKind::Gz,
        OperatorKind::Lpst,
        OperatorKind::Mr,
        OperatorKind::Ult,
    ];
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::Gz => "GZ",
            OperatorKind::Lpst => "LPST",
            OperatorKind::Mr => "MR",
            OperatorKind::Ult => "ULT",
        })
    }
}

impl FromStr for OperatorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "gz" => Ok(OperatorKind::Gz),
            "lpst" => Ok(OperatorKind::Lpst),
            "mr" => Ok(OperatorKind::Mr),
            "ult" | "u" => Ok(OperatorKind::Ult),
            other => Err(format!("unknown operator `{other}`")),
        }
    }
}

/// Lower and upper image of an approximator at a pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdaoOutput {
    pub lower: AtomSetFamily,
    pub upper: AtomSetFamily,
}

/// Applicable rules as a bitmap over rule indices.
type RuleMask = Vec<u64>;

/// Evaluates the approximators of one program.
///
/// The raw images (`lower_image`, `upper_image`) may be empty; the checked
/// ones (`ic_lower`, `ic_upper`, `apply_ndao`) turn an empty image into an
/// [`Error::AssumptionViolation`].
pub struct Approximator<'p> {
    program: &'p ChoiceProgram,
    limits: Limits,
    gz_inconsistent: bool,
    ic_cache: Mutex<HashMap<RuleMask, Arc<AtomSetFamily>>>,
}

impl<'p> Approximator<'p> {
    pub fn new(program: &'p ChoiceProgram) -> Self {
        Self::with_limits(program, Limits::default())
    }

    pub fn with_limits(program: &'p ChoiceProgram, limits: Limits) -> Self {
        Approximator {
            program,
            limits,
            gz_inconsistent: false,
            ic_cache: Mutex::new(HashMap::new()),
        }
    }

    /// Lets the GZ operator run on inconsistent pairs. Only meant for
    /// reproducing its failure of monotonicity there.
    pub fn allow_inconsistent_gz(mut self) -> Self {
        self.gz_inconsistent = true;
        self
    }

    pub fn program(&self) -> &'p ChoiceProgram {
        self.program
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    /// Rules whose body holds in `x`.
    pub fn applicable(&self, x: AtomSet) -> Vec<&'p ChoiceRule> {
        self.program
            .rules()
            .iter()
            .filter(|r| r.applicable(x))
            .collect()
    }

    /// `IC_P(x)`; an empty result means the applicable heads are jointly
    /// unsatisfiable.
    pub fn ic(&self, x: AtomSet) -> Result<AtomSetFamily> {
        let f = self.ic_raw(x)?;
        if f.is_empty() {
            return Err(Error::HeadInconsistent {
                at: self.program.signature().render(x),
            });
        }
        Ok(f)
    }

    /// `IC_P(x)` without the emptiness check.
    pub fn ic_raw(&self, x: AtomSet) -> Result<AtomSetFamily> {
        Ok(self.ic_of_mask(&self.mask(x))?.as_ref().clone())
    }

    fn mask(&self, x: AtomSet) -> RuleMask {
        let rules = self.program.rules();
        let mut m = vec![0u64; rules.len().div_ceil(64)];
        for (i, r) in rules.iter().enumerate() {
            if r.applicable(x) {
                m[i / 64] |= 1 << (i % 64);
            }
        }
        m
    }

    fn ic_of_mask(&self, mask: &RuleMask) -> Result<Arc<AtomSetFamily>> {
        if let Some(f) = self.ic_cache.lock().unwrap().get(mask) {
            return Ok(Arc::clone(f));
        }
        let heads = self
            .program
            .rules()
            .iter()
            .enumerate()
            .filter(|(i, _)| mask[i / 64] & (1 << (i % 64)) != 0)
            .map(|(_, r)| &r.head);
        let f = Arc::new(consequences(heads, self.limits.max_interval)?);
        self.ic_cache
            .lock()
            .unwrap()
            .insert(mask.clone(), Arc::clone(&f));
        Ok(f)
    }

    fn check_pair(&self, kind: OperatorKind, pair: Pair) -> Result<()> {
        if kind == OperatorKind::Gz && !pair.is_consistent() && !self.gz_inconsistent {
            return Err(Error::InconsistentPair {
                pair: self.program.signature().render_pair(pair),
            });
        }
        Ok(())
    }

    /// Whether the body of `r` passes the lower-bound test of `kind`.
    fn fires(&self, kind: OperatorKind, r: &ChoiceRule, pair: Pair) -> Result<bool> {
        let (x, y) = (pair.lower, pair.upper);
        match kind {
            OperatorKind::Gz => Ok(r
                .body
                .iter()
                .all(|c| x & c.dom() == y & c.dom() && c.satisfied_by(x))),
            OperatorKind::Lpst => {
                for c in &r.body {
                    if !c.satisfied_throughout(x, y, self.limits.max_interval)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            OperatorKind::Mr => {
                if !r.applicable(y) {
                    return Ok(false);
                }
                self.joint_witness(r, x)
            }
            OperatorKind::Ult => Err(Error::NoHeadSet),
        }
    }

    /// Some single `z ⊆ x` satisfies every body atom of `r`.
    fn joint_witness(&self, r: &ChoiceRule, x: AtomSet) -> Result<bool> {
        let mut seen = AtomSet::empty();
        let mut disjoint = true;
        for c in &r.body {
            if !seen.is_disjoint(c.dom()) {
                disjoint = false;
            }
            seen = seen | c.dom();
        }
        if disjoint {
            // Witnesses for atoms over disjoint domains combine freely.
            return Ok(r
                .body
                .iter()
                .all(|c| c.satisfied_somewhere(AtomSet::empty(), x)));
        }
        let space = x & seen;
        if space.len() > self.limits.max_interval {
            return Err(Error::IntervalTooLarge {
                free: space.len(),
                cap: self.limits.max_interval,
            });
        }
        Ok(space.subsets().any(|z| r.applicable(z)))
    }

    /// The head set of `kind` at `pair`. Not defined for the ultimate operator.
    pub fn hd_lower(&self, kind: OperatorKind, pair: Pair) -> Result<Vec<&'p ChoiceAtom>> {
        if kind == OperatorKind::Ult {
            return Err(Error::NoHeadSet);
        }
        self.check_pair(kind, pair)?;
        let mut heads: Vec<&'p ChoiceAtom> = Vec::new();
        for r in self.program.rules() {
            if self.fires(kind, r, pair)? && !heads.contains(&&r.head) {
                heads.push(&r.head);
            }
        }
        Ok(heads)
    }

    /// `⋃_{x ⊆ z ⊆ y} IC_P(z)`, empty when `x ⊄ y`.
    pub fn ultimate_image(&self, pair: Pair) -> Result<AtomSetFamily> {
        let mut masks: Vec<RuleMask> = Vec::new();
        for z in interval(pair.lower, pair.upper, self.limits.max_interval)? {
            let m = self.mask(z);
            if !masks.contains(&m) {
                masks.push(m);
            }
        }
        let mut out = AtomSetFamily::new();
        for m in &masks {
            out.extend_from(self.ic_of_mask(m)?.as_ref());
        }
        Ok(out)
    }

    /// Lower image, possibly empty.
    pub fn lower_image(&self, kind: OperatorKind, pair: Pair) -> Result<AtomSetFamily> {
        self.check_pair(kind, pair)?;
        match kind {
            OperatorKind::Ult => self.ultimate_image(pair),
            _ => consequences(
                self.hd_lower(kind, pair)?.into_iter(),
                self.limits.max_interval,
            ),
        }
    }

    /// Upper image, possibly empty.
    pub fn upper_image(&self, kind: OperatorKind, pair: Pair) -> Result<AtomSetFamily> {
        self.check_pair(kind, pair)?;
        match kind {
            OperatorKind::Gz => self.lower_image(kind, pair),
            _ => self.ultimate_image(pair),
        }
    }

    fn nonempty(
        &self,
        kind: OperatorKind,
        bound: &'static str,
        pair: Pair,
        f: AtomSetFamily,
    ) -> Result<AtomSetFamily> {
        if f.is_empty() {
            return Err(Error::AssumptionViolation {
                operator: kind,
                bound,
                pair: self.program.signature().render_pair(pair),
            });
        }
        Ok(f)
    }

    pub fn ic_lower(&self, kind: OperatorKind, pair: Pair) -> Result<AtomSetFamily> {
        let f = self.lower_image(kind, pair)?;
        self.nonempty(kind, "lower", pair, f)
    }

    pub fn ic_upper(&self, kind: OperatorKind, pair: Pair) -> Result<AtomSetFamily> {
        let f = self.upper_image(kind, pair)?;
        self.nonempty(kind, "upper", pair, f)
    }

    pub fn apply_ndao(&self, kind: OperatorKind, pair: Pair) -> Result<NdaoOutput> {
        Ok(NdaoOutput {
            lower: self.ic_lower(kind, pair)?,
            upper: self.ic_upper(kind, pair)?,
        })
    }

    /// `z ∈ lower_image(kind, pair)` without building the image.
    pub fn lower_contains(&self, kind: OperatorKind, pair: Pair, z: AtomSet) -> Result<bool> {
        self.check_pair(kind, pair)?;
        match kind {
            OperatorKind::Ult => self.ultimate_contains(pair, z),
            _ => {
                let heads = self.hd_lower(kind, pair)?;
                Ok(is_consequence(heads.into_iter(), z))
            }
        }
    }

    pub fn upper_contains(&self, kind: OperatorKind, pair: Pair, z: AtomSet) -> Result<bool> {
        match kind {
            OperatorKind::Gz => self.lower_contains(kind, pair, z),
            _ => self.ultimate_contains(pair, z),
        }
    }

    fn ultimate_contains(&self, pair: Pair, z: AtomSet) -> Result<bool> {
        for w in interval(pair.lower, pair.upper, self.limits.max_interval)? {
            if is_consequence(self.applicable(w).into_iter().map(|r| &r.head), z) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// `x ∈ O_l(x,y)` and `y ∈ O_u(x,y)`.
    pub fn is_fixpoint(&self, kind: OperatorKind, pair: Pair) -> Result<bool> {
        Ok(self.lower_contains(kind, pair, pair.lower)?
            && self.upper_contains(kind, pair, pair.upper)?)
    }
}

/// Whether `z` lies in the union of the head domains and satisfies every head.
fn is_consequence<'a, I>(heads: I, z: AtomSet) -> bool
where
    I: Iterator<Item = &'a ChoiceAtom>,
{
    let mut dom = AtomSet::empty();
    for h in heads {
        if !h.satisfied_by(z) {
            return false;
        }
        dom = dom | h.dom();
    }
    z.is_subset(dom)
}

/// All subsets of the union of the head domains satisfying every head.
fn consequences<'a, I>(heads: I, cap: usize) -> Result<AtomSetFamily>
where
    I: Iterator<Item = &'a ChoiceAtom>,
{
    let heads: Vec<&ChoiceAtom> = heads.collect();
    let dom = heads.iter().fold(AtomSet::empty(), |acc, h| acc | h.dom());
    if dom.len() > cap {
        return Err(Error::IntervalTooLarge {
            free: dom.len(),
            cap,
        });
    }
    Ok(dom
        .subsets()
        .filter(|&z| heads.iter().all(|h| h.satisfied_by(z)))
        .collect())
}

/// Replaces every disjunctive head by "at least one of" its atoms.
pub fn d2c(d: &DisjunctiveProgram) -> ChoiceProgram {
    let rules = d
        .rules()
        .iter()
        .map(|r| {
            let head = ChoiceAtom::cardinality(r.head(), 1, None)
                .expect("disjunctive heads are non-empty");
            let body = r
                .body
                .iter()
                .map(|l| ChoiceAtom::literal(l.atom, l.positive))
                .collect();
            ChoiceRule::new(head, body)
        })
        .collect();
    ChoiceProgram::new(d.signature().clone(), rules).expect("translation keeps the signature")
}

/// The operator for disjunctive programs: hitting sets of the heads whose
/// body is at least C (lower) or at least U (upper) in the truth order.
pub fn ic_d(d: &DisjunctiveProgram, pair: Pair, limits: Limits) -> Result<NdaoOutput> {
    let mut lower_heads = Vec::new();
    let mut upper_heads = Vec::new();
    for r in d.rules() {
        let v = eval_formula4(pair, &r.body);
        if FourValue::C.leq_t(v) {
            lower_heads.push(r.head());
        }
        if FourValue::U.leq_t(v) {
            upper_heads.push(r.head());
        }
    }
    Ok(NdaoOutput {
        lower: hitting_sets(&lower_heads, limits.max_interval)?,
        upper: hitting_sets(&upper_heads, limits.max_interval)?,
    })
}

fn hitting_sets(heads: &[AtomSet], cap: usize) -> Result<AtomSetFamily> {
    let dom = heads.iter().fold(AtomSet::empty(), |acc, &h| acc | h);
    if dom.len() > cap {
        return Err(Error::IntervalTooLarge {
            free: dom.len(),
            cap,
        });
    }
    Ok(dom
        .subsets()
        .filter(|&z| heads.iter().all(|&h| !z.is_disjoint(h)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{smyth_leq, Signature};
    use crate::syntax::{DisjunctiveRule, Literal};

    fn ex1() -> ChoiceProgram {
        let sig = Signature::new(["p", "q"]).unwrap();
        let pq = sig.full();
        ChoiceProgram::new(
            sig,
            vec![ChoiceRule::new(
                ChoiceAtom::cardinality(pq, 1, Some(2)).unwrap(),
                vec![ChoiceAtom::count_neq(pq, 1).unwrap()],
            )],
        )
        .unwrap()
    }

    fn rendered(p: &ChoiceProgram, f: &AtomSetFamily) -> String {
        p.signature().render_family(f)
    }

    fn pair(p: &ChoiceProgram, lower: &str, upper: &str) -> Pair {
        let s = p.signature();
        Pair::new(s.parse_set(lower).unwrap(), s.parse_set(upper).unwrap())
    }

    #[test]
    fn example_one_consequences() {
        let p = ex1();
        let op = Approximator::new(&p);
        let s = p.signature();
        assert_eq!(op.applicable(AtomSet::empty()).len(), 1);
        assert!(op.applicable(s.parse_set("p").unwrap()).is_empty());
        let all = "{{p},{q},{p,q}}";
        assert_eq!(rendered(&p, &op.ic(AtomSet::empty()).unwrap()), all);
        assert_eq!(rendered(&p, &op.ic(s.full()).unwrap()), all);
        assert_eq!(
            rendered(&p, &op.ic(s.parse_set("p").unwrap()).unwrap()),
            "{{}}"
        );
        assert_eq!(
            rendered(&p, &op.ic(s.parse_set("q").unwrap()).unwrap()),
            "{{}}"
        );
    }

    #[test]
    fn empty_program_consequences() {
        let p = ChoiceProgram::new(Signature::new(["a"]).unwrap(), vec![]).unwrap();
        let op = Approximator::new(&p);
        assert_eq!(rendered(&p, &op.ic(p.signature().full()).unwrap()), "{{}}");
    }

    #[test]
    fn example_one_operators_at_gap_pair() {
        let p = ex1();
        let op = Approximator::new(&p);
        let at = pair(&p, "p", "p,q");
        assert!(op.hd_lower(OperatorKind::Lpst, at).unwrap().is_empty());
        assert!(op.hd_lower(OperatorKind::Gz, at).unwrap().is_empty());
        assert_eq!(op.hd_lower(OperatorKind::Mr, at).unwrap().len(), 1);
        assert_eq!(op.hd_lower(OperatorKind::Ult, at), Err(Error::NoHeadSet));

        let mr = op.apply_ndao(OperatorKind::Mr, at).unwrap();
        assert_eq!(rendered(&p, &mr.lower), "{{p},{q},{p,q}}");
        let lpst = op.apply_ndao(OperatorKind::Lpst, at).unwrap();
        assert_eq!(rendered(&p, &lpst.lower), "{{}}");
        let gz = op.apply_ndao(OperatorKind::Gz, at).unwrap();
        assert_eq!(rendered(&p, &gz.lower), "{{}}");
        assert_eq!(rendered(&p, &gz.upper), "{{}}");
        let ult = op.apply_ndao(OperatorKind::Ult, at).unwrap();
        assert_eq!(rendered(&p, &ult.lower), "{{},{p},{q},{p,q}}");
        assert_eq!(ult.lower, ult.upper);
        assert_eq!(mr.upper, ult.lower);
        assert_eq!(lpst.upper, ult.lower);

        assert!(op.is_fixpoint(OperatorKind::Mr, at).unwrap());
        assert!(op.is_fixpoint(OperatorKind::Ult, at).unwrap());
        assert!(!op.is_fixpoint(OperatorKind::Lpst, at).unwrap());
        assert!(!op.is_fixpoint(OperatorKind::Gz, at).unwrap());
    }

    #[test]
    fn membership_agrees_with_images() {
        let p = ex1();
        let op = Approximator::new(&p);
        let full = p.signature().full();
        for y in full.subsets() {
            for x in y.subsets() {
                let at = Pair::new(x, y);
                for kind in OperatorKind::ALL {
                    let lo = op.lower_image(kind, at).unwrap();
                    let up = op.upper_image(kind, at).unwrap();
                    for z in full.subsets() {
                        assert_eq!(op.lower_contains(kind, at, z).unwrap(), lo.contains(z));
                        assert_eq!(op.upper_contains(kind, at, z).unwrap(), up.contains(z));
                    }
                }
            }
        }
    }

    #[test]
    fn gz_counterexample_needs_override() {
        let sig = Signature::new(["p", "q"]).unwrap();
        let pq = sig.full();
        let p = ChoiceProgram::new(
            sig,
            vec![ChoiceRule::new(
                ChoiceAtom::literal(0, true),
                vec![ChoiceAtom::count_neq(pq, 0).unwrap()],
            )],
        )
        .unwrap();
        let strict = Approximator::new(&p);
        let bad = pair(&p, "p,q", "p");
        assert!(matches!(
            strict.lower_image(OperatorKind::Gz, bad),
            Err(Error::InconsistentPair { .. })
        ));
        let op = Approximator::new(&p).allow_inconsistent_gz();
        let small = op.ic_lower(OperatorKind::Gz, pair(&p, "p", "p")).unwrap();
        let big = op.ic_lower(OperatorKind::Gz, bad).unwrap();
        assert_eq!(rendered(&p, &small), "{{p}}");
        assert_eq!(rendered(&p, &big), "{{}}");
        assert!(!smyth_leq(&small, &big));
    }

    #[test]
    fn degenerate_program_violates_assumption() {
        let sig = Signature::new(["p", "q"]).unwrap();
        let pq = sig.full();
        let p = ChoiceProgram::new(
            sig,
            vec![
                ChoiceRule::fact(ChoiceAtom::count_neq(pq, 2).unwrap()),
                ChoiceRule::fact(ChoiceAtom::count_eq(pq, 2).unwrap()),
            ],
        )
        .unwrap();
        let op = Approximator::new(&p);
        assert!(matches!(
            op.ic(AtomSet::empty()),
            Err(Error::HeadInconsistent { .. })
        ));
        for kind in OperatorKind::ALL {
            let err = op
                .apply_ndao(kind, Pair::new(AtomSet::empty(), pq))
                .unwrap_err();
            assert!(matches!(err, Error::AssumptionViolation { operator, .. } if operator == kind));
        }
    }

    #[test]
    fn mr_needs_a_joint_witness() {
        // {p,q}=1 and {p,q}!=1 cannot hold in the same subset of x, although
        // each has a witness of its own.
        let sig = Signature::new(["p", "q", "r"]).unwrap();
        let pq = AtomSet::from_ids([0, 1]);
        let p = ChoiceProgram::new(
            sig.clone(),
            vec![ChoiceRule::new(
                ChoiceAtom::literal(2, true),
                vec![
                    ChoiceAtom::count_eq(pq, 1).unwrap(),
                    ChoiceAtom::count_neq(pq, 1).unwrap(),
                ],
            )],
        )
        .unwrap();
        let op = Approximator::new(&p);
        assert!(op
            .hd_lower(OperatorKind::Mr, Pair::new(pq, pq))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn translation_and_disjunctive_operator() {
        let sig = Signature::new(["a", "b", "p", "q"]).unwrap();
        let pq = AtomSet::from_ids([2, 3]);
        let d = DisjunctiveProgram::new(
            sig.clone(),
            vec![
                DisjunctiveRule::new(pq, vec![]).unwrap(),
                DisjunctiveRule::new(pq, vec![Literal::pos(0), Literal::neg(1)]).unwrap(),
            ],
        )
        .unwrap();
        let c = d2c(&d);
        assert_eq!(c.rules().len(), 2);
        assert_eq!(
            c.rules()[0].head,
            ChoiceAtom::cardinality(pq, 1, None).unwrap()
        );
        assert_eq!(
            c.rules()[1].body,
            vec![ChoiceAtom::literal(0, true), ChoiceAtom::literal(1, false)]
        );
        assert!(c.is_normal());

        let out = ic_d(&d, Pair::total(AtomSet::empty()), Limits::default()).unwrap();
        assert_eq!(sig.render_family(&out.lower), "{{p},{q},{p,q}}");

        let none = DisjunctiveProgram::new(sig.clone(), vec![]).unwrap();
        let out = ic_d(&none, Pair::total(AtomSet::empty()), Limits::default()).unwrap();
        assert_eq!(sig.render_family(&out.lower), "{{}}");
        assert_eq!(sig.render_family(&out.upper), "{{}}");
    }

    #[test]
    fn kind_names_round_trip() {
        for k in OperatorKind::ALL {
            assert_eq!(k.to_string().parse::<OperatorKind>().unwrap(), k);
        }
        assert!("xyz".parse::<OperatorKind>().is_err());
    }
}
