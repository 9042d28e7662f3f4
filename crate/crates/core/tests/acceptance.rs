//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::time::Instant;

use choice_aft::cli;
use choice_aft::error::Error;
use choice_aft::groundedness::{grounded, grounded_bruteforce, groundedness_of_cstable, Notion};
use choice_aft::lattice::{ai_leq, hoare_leq, smyth_leq, AtomSet, AtomSetFamily, Pair};
use choice_aft::operators::{d2c, ic_d, Approximator, OperatorKind};
use choice_aft::oracles::{gl_stable_models, gz_reduct_stable, mr_stable_via_nss};
use choice_aft::parser::parse_program;
use choice_aft::semantics::{
    c_complete_lower, c_stable_fixpoints, models, stable_fixpoints, supported_models,
};
use choice_aft::syntax::ChoiceProgram;
use choice_aft::Limits;
use common::Shape;

use OperatorKind::{Gz, Lpst, Mr, Ult};

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn program(text: &str) -> ChoiceProgram {
    parse_program(text).expect("fixture parses").into_choice()
}

fn set(p: &ChoiceProgram, names: &str) -> AtomSet {
    p.signature().parse_set(names).expect("fixture atoms")
}

fn family(p: &ChoiceProgram, sets: &[&str]) -> AtomSetFamily {
    let mut f = AtomSetFamily::new();
    for s in sets {
        f.insert(set(p, s));
    }
    f
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

const EXAMPLE_ONE: &str = "1 {p; q} 2 :- {p; q} != 1.";

fn criterion_1() -> Outcome {
    let p = program(EXAMPLE_ONE);
    let op = Approximator::new(&p);
    let three = family(&p, &["p", "q", "p,q"]);
    let empty = family(&p, &[""]);
    for (x, want) in [("", &three), ("p,q", &three), ("p", &empty), ("q", &empty)] {
        let got = op.ic(set(&p, x)).map_err(err)?;
        ensure!(
            &got == want,
            "IC({{{x}}}) = {}",
            p.signature().render_family(&got)
        );
    }
    let m = models(&op).map_err(err)?;
    ensure!(
        m == vec![set(&p, "p"), set(&p, "q"), set(&p, "p,q")],
        "models {m:?}"
    );
    let s = supported_models(&op).map_err(err)?;
    ensure!(s == vec![set(&p, "p,q")], "supported {s:?}");
    Ok(())
}

fn criterion_2() -> Outcome {
    let p = program(EXAMPLE_ONE);
    let op = Approximator::new(&p);
    let pair = Pair::new(set(&p, "p"), set(&p, "p,q"));
    let empty = family(&p, &[""]);
    let all = family(&p, &["", "p", "q", "p,q"]);

    let mr = op.apply_ndao(Mr, pair).map_err(err)?;
    ensure!(
        mr.lower == family(&p, &["p", "q", "p,q"]),
        "MR lower {:?}",
        mr.lower
    );
    let lpst = op.apply_ndao(Lpst, pair).map_err(err)?;
    ensure!(lpst.lower == empty, "LPST lower {:?}", lpst.lower);
    let gz = op.apply_ndao(Gz, pair).map_err(err)?;
    ensure!(gz.lower == empty && gz.upper == empty, "GZ {gz:?}");
    let ult = op.apply_ndao(Ult, pair).map_err(err)?;
    ensure!(ult.lower == all && ult.upper == all, "ULT {ult:?}");

    for (kind, want) in [(Mr, true), (Ult, true), (Lpst, false), (Gz, false)] {
        let got = op.is_fixpoint(kind, pair).map_err(err)?;
        ensure!(got == want, "{kind} fixpoint = {got}");
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let p = program("p :- {p; q} != 0.");
    let op = Approximator::new(&p).allow_inconsistent_gz();
    let small = Pair::new(set(&p, "p"), set(&p, "p"));
    let big = Pair::new(set(&p, "p,q"), set(&p, "p"));
    let a = op.lower_image(Gz, small).map_err(err)?;
    let b = op.lower_image(Gz, big).map_err(err)?;
    ensure!(a == family(&p, &["p"]), "GZ lower at ({{p}},{{p}}) = {a:?}");
    ensure!(
        b == family(&p, &[""]),
        "GZ lower at ({{p,q}},{{p}}) = {b:?}"
    );
    ensure!(!smyth_leq(&a, &b), "Smyth order unexpectedly holds");
    // The same pair is refused without the override.
    ensure!(
        matches!(
            Approximator::new(&p).apply_ndao(Gz, big),
            Err(Error::InconsistentPair { .. })
        ),
        "inconsistent GZ input accepted"
    );
    Ok(())
}

fn criterion_4() -> Outcome {
    let (programs, _) = common::programs(4, 200, 4, Shape::Any);
    for p in &programs {
        let op = Approximator::new(p);
        for x in p.signature().full().subsets() {
            let ic = op.ic(x).map_err(err)?;
            for kind in OperatorKind::ALL {
                let out = op.apply_ndao(kind, Pair::total(x)).map_err(err)?;
                ensure!(
                    out.lower == ic && out.upper == ic,
                    "{kind} at ({x:?},{x:?}) differs from IC\n{}",
                    choice_aft::parser::print_choice(p)
                );
            }
        }
    }
    Ok(())
}

/// Related pairs `a ≤_i b` over `pairs`.
fn related(pairs: &[Pair]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..pairs.len()).flat_map(move |i| {
        (0..pairs.len())
            .filter(move |&j| choice_aft::lattice::leq_i(pairs[i], pairs[j]))
            .map(move |j| (i, j))
    })
}

fn criterion_5() -> Outcome {
    let (programs, _) = common::programs(5, 500, 4, Shape::Any);
    let mut violations: Vec<String> = Vec::new();
    for p in &programs {
        let op = Approximator::new(p).allow_inconsistent_gz();
        let sig = p.signature();
        let all = common::all_pairs(sig);
        let consistent = common::consistent_pairs(sig);
        for (kind, pairs) in [(Lpst, &all), (Ult, &all), (Gz, &consistent)] {
            let images = pairs
                .iter()
                .map(|&q| Ok((op.lower_image(kind, q)?, op.upper_image(kind, q)?)))
                .collect::<choice_aft::Result<Vec<_>>>()
                .map_err(err)?;
            if let Some((i, j)) = related(pairs)
                .find(|&(i, j)| !ai_leq((&images[i].0, &images[i].1), (&images[j].0, &images[j].1)))
            {
                violations.push(format!(
                    "{kind}: {} ≤_i {} in\n{}",
                    sig.render_pair(pairs[i]),
                    sig.render_pair(pairs[j]),
                    choice_aft::parser::print_choice(p)
                ));
            }
        }
        // MR as a semi-ndao over consistent pairs.
        let images = consistent
            .iter()
            .map(|&q| Ok((op.lower_image(Mr, q)?, op.upper_image(Mr, q)?)))
            .collect::<choice_aft::Result<Vec<_>>>()
            .map_err(err)?;
        for (i, j) in related(&consistent) {
            let (a, b) = (consistent[i], consistent[j]);
            if a.upper == b.upper && !smyth_leq(&images[i].0, &images[j].0) {
                violations.push(format!(
                    "MR lower: {} to {}",
                    sig.render_pair(a),
                    sig.render_pair(b)
                ));
            }
            if !hoare_leq(&images[j].1, &images[i].1) {
                violations.push(format!(
                    "MR upper: {} to {}",
                    sig.render_pair(a),
                    sig.render_pair(b)
                ));
            }
        }
    }
    if violations.is_empty() {
        return Ok(());
    }
    let kinds: Vec<&str> = ["LPST", "ULT", "GZ", "MR"]
        .into_iter()
        .filter(|k| violations.iter().any(|v| v.starts_with(k)))
        .collect();
    Err(format!(
        "{} violations ({}); first: {}",
        violations.len(),
        kinds.join(", "),
        violations[0]
    ))
}

fn criterion_6() -> Outcome {
    let (programs, _) = common::programs(6, 200, 4, Shape::Normal);
    for p in &programs {
        let op = Approximator::new(p);
        for pair in common::all_pairs(p.signature()) {
            let mr = op.apply_ndao(Mr, pair);
            let lpst = op.apply_ndao(Lpst, pair);
            let same = match (&mr, &lpst) {
                (Ok(a), Ok(b)) => a == b,
                (Err(_), Err(_)) => true,
                _ => false,
            };
            ensure!(
                same,
                "at {}: MR {mr:?} vs LPST {lpst:?}\n{}",
                p.signature().render_pair(pair),
                choice_aft::parser::print_choice(p)
            );
        }
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let p = program("1 {p; q} 2.");
    let op = Approximator::new(&p);
    let totals = |names: &[&str]| {
        names
            .iter()
            .map(|n| Pair::total(set(&p, n)))
            .collect::<Vec<_>>()
    };
    for kind in OperatorKind::ALL {
        let minimal = stable_fixpoints(&op, kind, true).map_err(err)?.pairs;
        ensure!(
            minimal == totals(&["p", "q"]),
            "{kind} minimal totals {minimal:?}"
        );
        let constructive = c_stable_fixpoints(&op, kind, true).map_err(err)?.pairs;
        ensure!(
            constructive == totals(&["p", "q", "p,q"]),
            "{kind} constructive totals {constructive:?}"
        );
    }

    let (programs, _) = common::programs(7, 200, 4, Shape::Any);
    for p in &programs {
        let op = Approximator::new(p);
        for kind in OperatorKind::ALL {
            let totals_only = kind == Gz;
            let minimal = stable_fixpoints(&op, kind, totals_only).map_err(err)?.pairs;
            let constructive = c_stable_fixpoints(&op, kind, totals_only)
                .map_err(err)?
                .pairs;
            if let Some(missing) = minimal.iter().find(|q| !constructive.contains(q)) {
                return Err(format!(
                    "{kind}: minimal {} is not constructive in\n{}",
                    p.signature().render_pair(*missing),
                    choice_aft::parser::print_choice(p)
                ));
            }
        }
    }
    Ok(())
}

fn total_uppers(pairs: &[Pair]) -> Vec<AtomSet> {
    let mut out: Vec<AtomSet> = pairs
        .iter()
        .filter(|q| q.is_total())
        .map(|q| q.upper)
        .collect();
    out.sort();
    out
}

fn criterion_8() -> Outcome {
    let limits = Limits::default();
    let (programs, _) = common::programs(8, 100, 4, Shape::Any);
    for p in &programs {
        let op = Approximator::new(p);
        let ours = total_uppers(&c_stable_fixpoints(&op, Mr, true).map_err(err)?.pairs);
        let oracle = mr_stable_via_nss(p, limits).map_err(err)?;
        ensure!(
            ours == oracle,
            "MR c-stable {ours:?} vs NSS {oracle:?} in\n{}",
            choice_aft::parser::print_choice(p)
        );
    }

    let (programs, _) = common::programs(80, 100, 4, Shape::NormalLogic);
    for p in &programs {
        let op = Approximator::new(p);
        let ours = total_uppers(&c_stable_fixpoints(&op, Lpst, true).map_err(err)?.pairs);
        let oracle = gl_stable_models(p, limits).map_err(err)?;
        ensure!(
            ours == oracle,
            "LPST c-stable {ours:?} vs reduct {oracle:?} in\n{}",
            choice_aft::parser::print_choice(p)
        );
    }

    let (programs, _) = common::programs(81, 100, 4, Shape::Aggregate);
    for p in &programs {
        let op = Approximator::new(p);
        let mut ours = Vec::new();
        for x in p.signature().full().subsets() {
            if c_complete_lower(&op, Gz, x).map_err(err)?.contains(x) {
                ours.push(x);
            }
        }
        ours.sort();
        let oracle = gz_reduct_stable(p, limits).map_err(err)?;
        ensure!(
            ours == oracle,
            "GZ c-complete {ours:?} vs reduct {oracle:?} in\n{}",
            choice_aft::parser::print_choice(p)
        );
    }
    Ok(())
}

/// Checks the groundedness guarantees on every c-stable fixpoint of `p`.
fn guarantees(p: &ChoiceProgram) -> Outcome {
    let op = Approximator::new(p);
    for kind in [Gz, Lpst, Mr] {
        for row in groundedness_of_cstable(&op, kind).map_err(err)? {
            let at = p.signature().render_pair(row.pair);
            ensure!(row.lower.a && row.upper.a, "{kind} {at} not a-grounded");
            if kind != Mr {
                ensure!(row.lower.s, "{kind} {at} lower not s-grounded");
            }
            if kind == Gz {
                ensure!(row.lower.d && row.upper.d, "GZ {at} not d-grounded");
            }
        }
    }
    Ok(())
}

fn cstable_totals(p: &ChoiceProgram, kind: OperatorKind) -> Result<Vec<AtomSet>, String> {
    let op = Approximator::new(p);
    Ok(total_uppers(
        &c_stable_fixpoints(&op, kind, true).map_err(err)?.pairs,
    ))
}

/// Program, set, the notion the set fails, operators that have the set as a
/// c-stable total, operators that do not.
type GroundedCase = (
    &'static str,
    &'static str,
    Notion,
    &'static [OperatorKind],
    &'static [OperatorKind],
);

fn criterion_9() -> Outcome {
    let limits = Limits::default();
    // Each example separates one column of the table.
    let cases: [GroundedCase; 3] = [
        (
            "b :- 1 {a; b}. a.",
            "a,b",
            Notion::D,
            &[Lpst, Mr, Ult],
            &[Gz],
        ),
        (
            "a :- {a; b} != 1. b :- {a; b} != 1.",
            "a,b",
            Notion::S,
            &[Mr, Ult],
            &[Lpst, Gz],
        ),
        (
            "{p; q} = 2 :- {p; q} != 1.",
            "p,q",
            Notion::S,
            &[Mr, Ult],
            &[Lpst, Gz],
        ),
    ];
    for (text, x, fails, accepted_by, rejected_by) in cases {
        let p = program(text);
        let x = set(&p, x);
        ensure!(
            !grounded(fails, x, &p, limits).map_err(err)?.holds,
            "{text}: {fails} holds"
        );
        let weaker = if fails == Notion::D {
            Notion::S
        } else {
            Notion::A
        };
        ensure!(
            grounded(weaker, x, &p, limits).map_err(err)?.holds,
            "{text}: {weaker} fails"
        );
        for &kind in accepted_by {
            ensure!(
                cstable_totals(&p, kind)?.contains(&x),
                "{text}: not {kind} c-stable"
            );
        }
        for &kind in rejected_by {
            ensure!(
                !cstable_totals(&p, kind)?.contains(&x),
                "{text}: {kind} c-stable"
            );
        }
        guarantees(&p)?;
    }

    let ult = program("{p; q} = 2 :- {p; q} = 2.");
    let pq = set(&ult, "p,q");
    let rows = groundedness_of_cstable(&Approximator::new(&ult), Ult).map_err(err)?;
    let row = rows
        .iter()
        .find(|r| r.pair == Pair::total(pq))
        .ok_or("ULT: {p,q} not c-stable")?;
    ensure!(
        !row.lower.a && !row.upper.a,
        "ULT counterexample is a-grounded"
    );

    let (programs, _) = common::programs(9, 100, 5, Shape::Any);
    for p in &programs {
        for x in p.signature().full().subsets() {
            let mut holds = Vec::new();
            for notion in Notion::CHOICE {
                let fast = grounded(notion, x, p, limits).map_err(err)?.holds;
                let slow = grounded_bruteforce(notion, x, p, limits)
                    .map_err(err)?
                    .holds;
                ensure!(
                    fast == slow,
                    "{notion} on {}: saturation {fast}, search {slow}\n{}",
                    p.signature().render(x),
                    choice_aft::parser::print_choice(p)
                );
                holds.push(fast);
            }
            ensure!(
                (!holds[0] || holds[1]) && (!holds[1] || holds[2]),
                "chain broken on {}: {holds:?}\n{}",
                p.signature().render(x),
                choice_aft::parser::print_choice(p)
            );
        }
        guarantees(p).map_err(|e| format!("{e} in\n{}", choice_aft::parser::print_choice(p)))?;
    }
    Ok(())
}

fn criterion_10() -> Outcome {
    let limits = Limits::default();
    for d in common::dlps(10, 100, 4) {
        let c = d2c(&d);
        let op = Approximator::new(&c);
        for pair in common::all_pairs(d.signature()) {
            let bridge = ic_d(&d, pair, limits);
            let mr = op.apply_ndao(Mr, pair);
            let lpst = op.apply_ndao(Lpst, pair);
            ensure!(
                bridge.is_ok() && bridge == mr && mr == lpst,
                "at {}: DLP {bridge:?}, MR {mr:?}, LPST {lpst:?} in\n{}",
                d.signature().render_pair(pair),
                choice_aft::parser::print_disjunctive(&d)
            );
        }
    }

    let p = parse_program("p | q.")
        .expect("fixture parses")
        .into_choice();
    let op = Approximator::new(&p);
    let pq = Pair::total(set(&p, "p,q"));
    ensure!(
        c_stable_fixpoints(&op, Mr, false)
            .map_err(err)?
            .pairs
            .contains(&pq),
        "not c-stable"
    );
    ensure!(
        !stable_fixpoints(&op, Mr, false)
            .map_err(err)?
            .pairs
            .contains(&pq),
        "minimal-stable"
    );
    Ok(())
}

fn criterion_11() -> Outcome {
    let p = program("{p; q} != 2. {p; q} = 2.");
    let op = Approximator::new(&p);
    for kind in OperatorKind::ALL {
        let r = c_stable_fixpoints(&op, kind, true);
        ensure!(
            matches!(r, Err(Error::AssumptionViolation { .. })),
            "{kind}: {r:?}"
        );
    }

    let dir = tempfile::tempdir().map_err(err)?;
    let file = dir.path().join("degenerate.lp");
    std::fs::write(&file, "{p; q} != 2.\n{p; q} = 2.\n").map_err(err)?;
    for args in [
        vec!["models"],
        vec!["stable", "--operator", "mr"],
        vec!["eval", "--pair", ";p,q"],
    ] {
        let mut argv = vec!["choice-aft".to_string()];
        argv.extend(args.iter().map(|s| s.to_string()));
        argv.push(file.display().to_string());
        let (mut out, mut errs) = (Vec::new(), Vec::new());
        let code = cli::run(&argv, &mut out, &mut errs);
        let text = String::from_utf8_lossy(&errs);
        ensure!(code == cli::EXIT_SEMANTIC, "{args:?} exited {code}");
        ensure!(text.contains("ssumption"), "{args:?} printed {text}");
    }
    Ok(())
}

fn criterion_12() -> Outcome {
    let p = program("{p; q} = 1 :- {p} != 1. p :- q.");
    let op = Approximator::new(&p);
    let s = supported_models(&op).map_err(err)?;
    ensure!(s.is_empty(), "supported models {s:?}");
    let pair = Pair::new(AtomSet::empty(), set(&p, "p"));
    for kind in [Lpst, Mr, Ult] {
        ensure!(
            op.is_fixpoint(kind, pair).map_err(err)?,
            "{kind}: (∅,{{p}}) not a fixpoint"
        );
    }
    Ok(())
}

type Criterion = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Criterion); 12] = [
        (
            "choice rule example: IC, models, supported models",
            criterion_1,
        ),
        ("operator images at ({p},{p,q})", criterion_2),
        ("GZ Smyth failure at an inconsistent pair", criterion_3),
        ("exactness on total pairs", criterion_4),
        ("information-order monotonicity", criterion_5),
        ("MR and LPST agree on normal programs", criterion_6),
        ("minimal vs constructive stable fixpoints", criterion_7),
        ("representation against reference semantics", criterion_8),
        ("groundedness pattern", criterion_9),
        ("disjunctive bridge", criterion_10),
        ("degenerate program diagnostic", criterion_11),
        (
            "three-valued fixpoint without supported model",
            criterion_12,
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS criterion {:>2}: {name} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name} ({secs:.2}s)", i + 1);
                for line in why.lines() {
                    eprintln!("    {line}");
                }
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
