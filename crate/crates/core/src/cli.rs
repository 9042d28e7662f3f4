//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::groundedness::{grounded, Notion};
use crate::json::{program_from_json, program_to_json};
use crate::lattice::{AtomSet, Pair, Signature};
use crate::limits::Limits;
use crate::operators::{Approximator, OperatorKind};
use crate::parser::{parse_program, print_atom, print_program, ParsedProgram};
use crate::semantics::{fixpoints, stable, supported_models, Flavor, StableResult};
use crate::syntax::ChoiceProgram;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SEMANTIC: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

pub const MAX_STATES_ENV: &str = "CHOICE_AFT_MAX_STATES";

#[derive(Debug, Parser)]
#[command(
    name = "choice-aft",
    version,
    about = "Operator-based semantics for choice logic programs"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Print canonical JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Largest signature accepted by exhaustive sweeps.
    #[arg(long, global = true, value_name = "N")]
    max_atoms: Option<usize>,
    /// Largest number of free atoms in an enumerated interval.
    #[arg(long, global = true, value_name = "N")]
    max_interval: Option<usize>,
    /// Worker threads for the sweeps.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Supported models and three-valued fixpoints.
    Models {
        file: PathBuf,
        #[arg(long)]
        operator: Option<OperatorKind>,
        #[arg(long)]
        totals_only: bool,
    },
    /// Stable or constructive stable fixpoints.
    Stable {
        file: PathBuf,
        #[arg(long)]
        operator: OperatorKind,
        #[arg(long, default_value = "constructive")]
        flavor: Flavor,
        #[arg(long)]
        totals_only: bool,
        /// Show a shortest well-founded sequence for each bound.
        #[arg(long)]
        traces: bool,
    },
    /// Decide a groundedness notion for a set of atoms.
    Grounded {
        file: PathBuf,
        /// Comma-separated atoms.
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long)]
        notion: Notion,
    },
    /// Print the program in canonical form.
    Translate {
        file: PathBuf,
        /// Replace disjunctive heads by "at least one of" choice atoms.
        #[arg(long)]
        d2c: bool,
    },
    /// Operator images at a pair, written "lower;upper".
    Eval {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        pair: String,
    },
    /// Program classes and per-atom monotonicity and convexity.
    Classify { file: PathBuf },
}

/// Runs the command line and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = limits(&cli.global).and_then(|limits| match cli.global.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Io(e.to_string()))?
            .install(|| dispatch(&cli, limits)),
        None => dispatch(&cli, limits),
    });
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_parse() {
        EXIT_PARSE
    } else if e.is_resource() {
        EXIT_RESOURCE
    } else {
        EXIT_SEMANTIC
    }
}

fn limits(g: &Global) -> Result<Limits> {
    let mut l = Limits::default();
    if let Some(n) = g.max_atoms {
        l.max_sweep_atoms = n;
    }
    if let Some(n) = g.max_interval {
        l.max_interval = n;
    }
    if let Ok(v) = std::env::var(MAX_STATES_ENV) {
        l.max_states = v
            .trim()
            .parse()
            .map_err(|_| Error::Io(format!("{MAX_STATES_ENV} must be a number, got `{v}`")))?;
    }
    Ok(l)
}

fn load(path: &Path) -> Result<ParsedProgram> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") {
        program_from_json(&text)
    } else {
        parse_program(&text)
    }
}

fn render(v: Value) -> String {
    serde_json::to_string_pretty(&v).expect("values always serialize") + "\n"
}

fn dispatch(cli: &Cli, limits: Limits) -> Result<String> {
    let json = cli.global.json;
    match &cli.command {
        Command::Models {
            file,
            operator,
            totals_only,
        } => {
            let p = load(file)?.into_choice();
            let kinds = operator.map_or(OperatorKind::ALL.to_vec(), |k| vec![k]);
            models(&p, limits, &kinds, *totals_only, json)
        }
        Command::Stable {
            file,
            operator,
            flavor,
            totals_only,
            traces,
        } => {
            let p = load(file)?.into_choice();
            let op = Approximator::with_limits(&p, limits);
            let res = stable(&op, *operator, *flavor, *totals_only)?;
            Ok(stable_output(p.signature(), &res, *traces, json))
        }
        Command::Grounded { file, set, notion } => {
            let p = load(file)?.into_choice();
            let x = p.signature().parse_set(set)?;
            let report = grounded(*notion, x, &p, limits)?;
            if json {
                return Ok(render(report.to_json(p.signature())));
            }
            let sig = p.signature();
            let mut s = format!(
                "{} is {}{}-grounded\n",
                sig.render(x),
                if report.holds { "" } else { "not " },
                notion
            );
            if let Some(levels) = &report.levels {
                s += &format!("  levels: {}\n", levels.render(sig));
            }
            if let Some(b) = report.blocking {
                s += &format!("  unsupported: {}\n", sig.render(b));
            }
            Ok(s)
        }
        Command::Translate { file, d2c } => {
            let mut p = load(file)?;
            if *d2c {
                p = ParsedProgram::Choice(p.into_choice());
            }
            Ok(if json {
                program_to_json(&p) + "\n"
            } else {
                print_program(&p)
            })
        }
        Command::Eval { file, pair } => {
            let p = load(file)?.into_choice();
            let pair = parse_pair(p.signature(), pair)?;
            eval(&p, limits, pair, json)
        }
        Command::Classify { file } => classify(&load(file)?.into_choice(), limits, json),
    }
}

/// `"p;p,q"` is the pair `({p},{p,q})`.
fn parse_pair(sig: &Signature, text: &str) -> Result<Pair> {
    let (lower, upper) = text
        .split_once(';')
        .ok_or_else(|| Error::Io(format!("pair must be written `lower;upper`, got `{text}`")))?;
    Ok(Pair::new(sig.parse_set(lower)?, sig.parse_set(upper)?))
}

fn models(
    p: &ChoiceProgram,
    limits: Limits,
    kinds: &[OperatorKind],
    totals_only: bool,
    json: bool,
) -> Result<String> {
    let sig = p.signature();
    let op = Approximator::with_limits(p, limits);
    let sm = supported_models(&op)?;
    let mut per_kind = Vec::new();
    for &k in kinds {
        per_kind.push((k, fixpoints(&op, k, totals_only)?));
    }
    if json {
        let fx: serde_json::Map<String, Value> = per_kind
            .iter()
            .map(|(k, pairs)| {
                (
                    k.to_string(),
                    Value::Array(pairs.iter().map(|&q| sig.pair_json(q)).collect()),
                )
            })
            .collect();
        return Ok(render(json!({
            "supported_models": sm.iter().map(|&x| sig.set_json(x)).collect::<Vec<_>>(),
            "fixpoints": fx,
        })));
    }
    let mut s = String::from("supported models:\n");
    for x in &sm {
        s += &format!("  {}\n", sig.render(*x));
    }
    for (k, pairs) in &per_kind {
        s += &format!("{k} fixpoints:\n");
        for q in pairs {
            s += &format!("  {}\n", sig.render_pair(*q));
        }
    }
    Ok(s)
}

fn stable_output(sig: &Signature, res: &StableResult, traces: bool, json: bool) -> String {
    let trace_json =
        |steps: &[AtomSet]| Value::Array(steps.iter().map(|&x| sig.set_json(x)).collect());
    let trace_text = |steps: &[AtomSet]| {
        steps
            .iter()
            .map(|&x| sig.render(x))
            .collect::<Vec<_>>()
            .join(" -> ")
    };
    let shown = if traces { res.traces.as_ref() } else { None };
    if json {
        let mut v = json!({
            "kind": res.kind,
            "flavor": res.flavor,
            "pairs": res.pairs.iter().map(|&q| sig.pair_json(q)).collect::<Vec<_>>(),
        });
        if let Some(ts) = shown {
            v["traces"] = Value::Array(
                ts.iter()
                    .map(|t| json!({"lower": trace_json(&t.lower.steps), "upper": trace_json(&t.upper.steps)}))
                    .collect(),
            );
        }
        return render(v);
    }
    let mut s = format!("{} {} stable fixpoints:\n", res.kind, res.flavor);
    for (i, q) in res.pairs.iter().enumerate() {
        s += &format!("  {}\n", sig.render_pair(*q));
        if let Some(ts) = shown {
            s += &format!("    lower: {}\n", trace_text(&ts[i].lower.steps));
            s += &format!("    upper: {}\n", trace_text(&ts[i].upper.steps));
        }
    }
    s
}

fn eval(p: &ChoiceProgram, limits: Limits, pair: Pair, json: bool) -> Result<String> {
    let sig = p.signature();
    let op = Approximator::with_limits(p, limits);
    let mut rows = Vec::new();
    for k in OperatorKind::ALL {
        let out = op.apply_ndao(k, pair)?;
        let fixed = out.lower.contains(pair.lower) && out.upper.contains(pair.upper);
        rows.push((k, out, fixed));
    }
    if json {
        let m: serde_json::Map<String, Value> = rows
            .iter()
            .map(|(k, out, fixed)| {
                (
                    k.to_string(),
                    json!({
                        "lower": sig.family_json(&out.lower),
                        "upper": sig.family_json(&out.upper),
                        "fixpoint": fixed,
                    }),
                )
            })
            .collect();
        return Ok(render(
            json!({ "pair": sig.pair_json(pair), "operators": m }),
        ));
    }
    let mut s = format!("at {}:\n", sig.render_pair(pair));
    for (k, out, fixed) in &rows {
        s += &format!(
            "  {k}: lower {} upper {}{}\n",
            sig.render_family(&out.lower),
            sig.render_family(&out.upper),
            if *fixed { " (fixpoint)" } else { "" }
        );
    }
    Ok(s)
}

fn classify(p: &ChoiceProgram, limits: Limits, json: bool) -> Result<String> {
    let sig = p.signature();
    let mut atoms = Vec::new();
    for r in p.rules() {
        for c in std::iter::once(&r.head).chain(&r.body) {
            if !atoms.contains(&c) {
                atoms.push(c);
            }
        }
    }
    let mut rows = Vec::new();
    for c in atoms {
        rows.push((
            print_atom(sig, c),
            c.is_monotone(limits.max_domain)?,
            c.is_convex(limits.max_domain)?,
        ));
    }
    if json {
        return Ok(render(json!({
            "normal": p.is_normal(),
            "aggregate": p.is_aggregate(),
            "normal_logic_program": p.is_normal_logic_program(),
            "atoms": rows.iter().map(|(a, m, c)| json!({"atom": a, "monotone": m, "convex": c})).collect::<Vec<_>>(),
        })));
    }
    let yes = |b: bool| if b { "yes" } else { "no" };
    let mut s = format!(
        "normal: {}\naggregate: {}\nnormal logic program: {}\n",
        yes(p.is_normal()),
        yes(p.is_aggregate()),
        yes(p.is_normal_logic_program())
    );
    for (a, m, c) in rows {
        s += &format!("  {a}: monotone={} convex={}\n", yes(m), yes(c));
    }
    Ok(s)
}
