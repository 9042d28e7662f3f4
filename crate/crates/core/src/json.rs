//! JSON form of programs.
//!
//! ```json
//! {"dialect": "choice", "atoms": ["p", "q"],
//!  "rules": [{"head": {"kind": "cardinality", "dom": ["p", "q"], "lo": 1, "hi": 2},
//!             "body": [{"kind": "count_neq", "dom": ["p", "q"], "k": 1}]}]}
//! ```
//!
//! Disjunctive programs use `"dialect": "disjunctive"`, heads as atom lists
//! and bodies as `{"atom": "a", "positive": false}` literals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{AtomSet, Signature};
use crate::parser::ParsedProgram;
use crate::syntax::{
    ChoiceAtom, ChoiceProgram, ChoiceRule, DisjunctiveProgram, DisjunctiveRule, Literal, Satisfiers,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AtomDto {
    Literal {
        atom: String,
        positive: bool,
    },
    Cardinality {
        dom: Vec<String>,
        lo: usize,
        hi: Option<usize>,
    },
    CountEq {
        dom: Vec<String>,
        k: usize,
    },
    CountNeq {
        dom: Vec<String>,
        k: usize,
    },
    Extensional {
        dom: Vec<String>,
        sat: Vec<Vec<String>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoiceRuleDto {
    pub head: AtomDto,
    #[serde(default)]
    pub body: Vec<AtomDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiteralDto {
    pub atom: String,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjunctiveRuleDto {
    pub head: Vec<String>,
    #[serde(default)]
    pub body: Vec<LiteralDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "dialect", rename_all = "snake_case")]
pub enum ProgramDto {
    Choice {
        atoms: Vec<String>,
        rules: Vec<ChoiceRuleDto>,
    },
    Disjunctive {
        atoms: Vec<String>,
        rules: Vec<DisjunctiveRuleDto>,
    },
}

fn names(sig: &Signature, s: AtomSet) -> Vec<String> {
    sig.names(s).into_iter().map(String::from).collect()
}

fn atom_dto(sig: &Signature, c: &ChoiceAtom) -> AtomDto {
    let dom = names(sig, c.dom());
    match c.sat() {
        Satisfiers::PosLiteral | Satisfiers::NegLiteral => AtomDto::Literal {
            atom: dom[0].clone(),
            positive: matches!(c.sat(), Satisfiers::PosLiteral),
        },
        Satisfiers::Cardinality { lo, hi } => AtomDto::Cardinality {
            dom,
            lo: *lo,
            hi: *hi,
        },
        Satisfiers::CountEq(k) => AtomDto::CountEq { dom, k: *k },
        Satisfiers::CountNeq(k) => AtomDto::CountNeq { dom, k: *k },
        Satisfiers::Extensional(f) => AtomDto::Extensional {
            dom,
            sat: f.iter().map(|s| names(sig, s)).collect(),
        },
    }
}

impl ProgramDto {
    pub fn from_program(p: &ParsedProgram) -> ProgramDto {
        match p {
            ParsedProgram::Choice(c) => {
                let sig = c.signature();
                ProgramDto::Choice {
                    atoms: sig.atoms().to_vec(),
                    rules: c
                        .rules()
                        .iter()
                        .map(|r| ChoiceRuleDto {
                            head: atom_dto(sig, &r.head),
                            body: r.body.iter().map(|b| atom_dto(sig, b)).collect(),
                        })
                        .collect(),
                }
            }
            ParsedProgram::Disjunctive(d) => {
                let sig = d.signature();
                ProgramDto::Disjunctive {
                    atoms: sig.atoms().to_vec(),
                    rules: d
                        .rules()
                        .iter()
                        .map(|r| DisjunctiveRuleDto {
                            head: names(sig, r.head()),
                            body: r
                                .body
                                .iter()
                                .map(|l| LiteralDto {
                                    atom: sig.name(l.atom).to_string(),
                                    positive: l.positive,
                                })
                                .collect(),
                        })
                        .collect(),
                }
            }
        }
    }

    pub fn into_program(self) -> Result<ParsedProgram> {
        match self {
            ProgramDto::Choice { atoms, rules } => {
                let sig = Signature::new(atoms)?;
                let rules = rules
                    .iter()
                    .map(|r| {
                        let body = r
                            .body
                            .iter()
                            .map(|b| build_atom(&sig, b))
                            .collect::<Result<Vec<_>>>()?;
                        Ok(ChoiceRule::new(build_atom(&sig, &r.head)?, body))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ParsedProgram::Choice(ChoiceProgram::new(sig, rules)?))
            }
            ProgramDto::Disjunctive { atoms, rules } => {
                let sig = Signature::new(atoms)?;
                let rules = rules
                    .iter()
                    .map(|r| {
                        let body = r
                            .body
                            .iter()
                            .map(|l| {
                                Ok(Literal {
                                    atom: sig.atom(&l.atom)?,
                                    positive: l.positive,
                                })
                            })
                            .collect::<Result<Vec<_>>>()?;
                        DisjunctiveRule::new(sig.set_of(r.head.iter().map(String::as_str))?, body)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ParsedProgram::Disjunctive(DisjunctiveProgram::new(
                    sig, rules,
                )?))
            }
        }
    }
}

fn build_atom(sig: &Signature, dto: &AtomDto) -> Result<ChoiceAtom> {
    let set = |v: &[String]| sig.set_of(v.iter().map(String::as_str));
    match dto {
        AtomDto::Literal { atom, positive } => Ok(ChoiceAtom::literal(sig.atom(atom)?, *positive)),
        AtomDto::Cardinality { dom, lo, hi } => ChoiceAtom::cardinality(set(dom)?, *lo, *hi),
        AtomDto::CountEq { dom, k } => ChoiceAtom::count_eq(set(dom)?, *k),
        AtomDto::CountNeq { dom, k } => ChoiceAtom::count_neq(set(dom)?, *k),
        AtomDto::Extensional { dom, sat } => {
            let sat = sat.iter().map(|s| set(s)).collect::<Result<Vec<_>>>()?;
            ChoiceAtom::extensional(set(dom)?, sat)
        }
    }
}

pub fn program_from_json(text: &str) -> Result<ParsedProgram> {
    let dto: ProgramDto = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    dto.into_program()
}

pub fn program_to_json(p: &ParsedProgram) -> String {
    serde_json::to_string_pretty(&ProgramDto::from_program(p)).expect("DTOs always serialize")
}
