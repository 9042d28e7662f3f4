//! Text format for choice programs and disjunctive programs.
//!
//! ```text
//! rule     := head ":-" body "." | head "."
//! body     := catom ("," catom)*
//! head     := catom | atom ("|" atom)+
//! catom    := atom | "not" atom | card | count | explicit
//! card     := [nat] "{" atom (";" atom)* "}" [nat]
//! count    := "{" atom (";" atom)* "}" ("=" | "!=") nat
//! explicit := "choice" "(" "[" atoms "]" "," "[" [set ("," set)*] "]" ")"
//! set      := "{" [atom (";" atom)*] "}"
//! ```
//!
//! `%` starts a comment. A file with a `|` head is a disjunctive program and
//! may only use atoms and negated atoms elsewhere.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{AtomSet, Signature};
use crate::operators::d2c;
use crate::syntax::{
    ChoiceAtom, ChoiceProgram, ChoiceRule, DisjunctiveProgram, DisjunctiveRule, Literal, Satisfiers,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    /// 1-based.
    pub line: usize,
    /// 1-based, in characters.
    pub column: usize,
    pub message: String,
    pub token: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at {}:{}: {}",
            self.line, self.column, self.message
        )?;
        if let Some(t) = &self.token {
            write!(f, " (found `{t}`)")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedProgram {
    Choice(ChoiceProgram),
    Disjunctive(DisjunctiveProgram),
}

impl ParsedProgram {
    pub fn signature(&self) -> &Signature {
        match self {
            ParsedProgram::Choice(p) => p.signature(),
            ParsedProgram::Disjunctive(d) => d.signature(),
        }
    }

    /// The program itself, or the translation of a disjunctive one.
    pub fn into_choice(self) -> ChoiceProgram {
        match self {
            ParsedProgram::Choice(p) => p,
            ParsedProgram::Disjunctive(d) => d2c(&d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(usize),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Semi,
    Comma,
    Dot,
    If,
    Pipe,
    Eq,
    Neq,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => f.write_str(s),
            Tok::Nat(n) => write!(f, "{n}"),
            Tok::LBrace => f.write_str("{"),
            Tok::RBrace => f.write_str("}"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
            Tok::LBrack => f.write_str("["),
            Tok::RBrack => f.write_str("]"),
            Tok::Semi => f.write_str(";"),
            Tok::Comma => f.write_str(","),
            Tok::Dot => f.write_str("."),
            Tok::If => f.write_str(":-"),
            Tok::Pipe => f.write_str("|"),
            Tok::Eq => f.write_str("="),
            Tok::Neq => f.write_str("!="),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err(
    line: usize,
    column: usize,
    message: impl Into<String>,
    token: Option<String>,
) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
        token,
    }
}

fn lex(text: &str) -> std::result::Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        let mut push = |tok: Tok, width: usize, i: &mut usize, column: &mut usize| {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            });
            *i += width;
            *column += width;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                column += 1;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '{' => push(Tok::LBrace, 1, &mut i, &mut column),
            '}' => push(Tok::RBrace, 1, &mut i, &mut column),
            '(' => push(Tok::LParen, 1, &mut i, &mut column),
            ')' => push(Tok::RParen, 1, &mut i, &mut column),
            '[' => push(Tok::LBrack, 1, &mut i, &mut column),
            ']' => push(Tok::RBrack, 1, &mut i, &mut column),
            ';' => push(Tok::Semi, 1, &mut i, &mut column),
            ',' => push(Tok::Comma, 1, &mut i, &mut column),
            '.' => push(Tok::Dot, 1, &mut i, &mut column),
            '|' => push(Tok::Pipe, 1, &mut i, &mut column),
            '=' => push(Tok::Eq, 1, &mut i, &mut column),
            ':' if chars.get(i + 1) == Some(&'-') => push(Tok::If, 2, &mut i, &mut column),
            '!' if chars.get(i + 1) == Some(&'=') => push(Tok::Neq, 2, &mut i, &mut column),
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i..j].iter().collect();
                let n = digits
                    .parse()
                    .map_err(|_| err(line, column, "number out of range", Some(digits.clone())))?;
                push(Tok::Nat(n), j - i, &mut i, &mut column);
            }
            c if c.is_ascii_lowercase() => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let name: String = chars[i..j].iter().collect();
                push(Tok::Ident(name), j - i, &mut i, &mut column);
            }
            other => {
                return Err(err(
                    line,
                    column,
                    "unexpected character",
                    Some(other.to_string()),
                ));
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

/// A choice atom before atom names are resolved.
#[derive(Debug, Clone)]
enum RawAtom {
    Literal(String, bool),
    Card(Vec<String>, usize, Option<usize>),
    Count(Vec<String>, bool, usize),
    Explicit(Vec<String>, Vec<Vec<String>>),
}

impl RawAtom {
    fn names(&self) -> Vec<&String> {
        match self {
            RawAtom::Literal(a, _) => vec![a],
            RawAtom::Card(atoms, ..) | RawAtom::Count(atoms, ..) => atoms.iter().collect(),
            RawAtom::Explicit(dom, sets) => dom.iter().chain(sets.iter().flatten()).collect(),
        }
    }
}

#[derive(Debug, Clone)]
struct Located<T> {
    item: T,
    line: usize,
    column: usize,
}

#[derive(Debug, Clone)]
enum RawHead {
    Atom(Located<RawAtom>),
    Disjunction(Vec<String>),
}

#[derive(Debug, Clone)]
struct RawRule {
    head: RawHead,
    body: Vec<Located<RawAtom>>,
    line: usize,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, expected: &str) -> PResult<T> {
        let (line, column) = self.here();
        Err(err(
            line,
            column,
            format!("expected {expected}"),
            Some(self.peek().to_string()),
        ))
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{tok}`"))
        }
    }

    fn atom_name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(name) if name != "not" => {
                self.bump();
                Ok(name)
            }
            _ => self.unexpected("an atom"),
        }
    }

    fn program(&mut self) -> PResult<Vec<RawRule>> {
        let mut rules = Vec::new();
        while *self.peek() != Tok::Eof {
            rules.push(self.rule()?);
        }
        Ok(rules)
    }

    fn rule(&mut self) -> PResult<RawRule> {
        let (line, _) = self.here();
        let head = self.head()?;
        let mut body = Vec::new();
        if *self.peek() == Tok::If {
            self.bump();
            body.push(self.catom()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                body.push(self.catom()?);
            }
        }
        self.expect(Tok::Dot)?;
        Ok(RawRule { head, body, line })
    }

    fn head(&mut self) -> PResult<RawHead> {
        let is_plain_atom = matches!(self.peek(), Tok::Ident(n) if n != "not" && n != "choice")
            || matches!((self.peek(), self.peek_at(1)), (Tok::Ident(n), t) if n == "choice" && *t != Tok::LParen);
        if is_plain_atom && *self.peek_at(1) == Tok::Pipe {
            let mut atoms = vec![self.atom_name()?];
            while *self.peek() == Tok::Pipe {
                self.bump();
                atoms.push(self.atom_name()?);
            }
            return Ok(RawHead::Disjunction(atoms));
        }
        Ok(RawHead::Atom(self.catom()?))
    }

    fn braced_atoms(&mut self, allow_empty: bool) -> PResult<Vec<String>> {
        self.expect(Tok::LBrace)?;
        let mut atoms = Vec::new();
        if *self.peek() == Tok::RBrace && allow_empty {
            self.bump();
            return Ok(atoms);
        }
        atoms.push(self.atom_name()?);
        while *self.peek() == Tok::Semi {
            self.bump();
            atoms.push(self.atom_name()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(atoms)
    }

    fn catom(&mut self) -> PResult<Located<RawAtom>> {
        let (line, column) = self.here();
        let item = match self.peek().clone() {
            Tok::Ident(n) if n == "not" => {
                self.bump();
                RawAtom::Literal(self.atom_name()?, false)
            }
            Tok::Ident(n) if n == "choice" && *self.peek_at(1) == Tok::LParen => self.explicit()?,
            Tok::Ident(_) => RawAtom::Literal(self.atom_name()?, true),
            Tok::Nat(lo) => {
                self.bump();
                let atoms = self.braced_atoms(false)?;
                RawAtom::Card(atoms, lo, self.upper_bound())
            }
            Tok::LBrace => {
                let atoms = self.braced_atoms(false)?;
                match self.peek() {
                    Tok::Eq | Tok::Neq => {
                        let eq = self.bump() == Tok::Eq;
                        match self.bump() {
                            Tok::Nat(k) => RawAtom::Count(atoms, eq, k),
                            _ => {
                                self.pos -= 1;
                                return self.unexpected("a number");
                            }
                        }
                    }
                    _ => RawAtom::Card(atoms, 0, self.upper_bound()),
                }
            }
            _ => return self.unexpected("a choice atom"),
        };
        Ok(Located { item, line, column })
    }

    fn upper_bound(&mut self) -> Option<usize> {
        match *self.peek() {
            Tok::Nat(hi) => {
                self.bump();
                Some(hi)
            }
            _ => None,
        }
    }

    fn explicit(&mut self) -> PResult<RawAtom> {
        self.bump();
        self.expect(Tok::LParen)?;
        self.expect(Tok::LBrack)?;
        let mut dom = vec![self.atom_name()?];
        while *self.peek() == Tok::Semi {
            self.bump();
            dom.push(self.atom_name()?);
        }
        self.expect(Tok::RBrack)?;
        self.expect(Tok::Comma)?;
        self.expect(Tok::LBrack)?;
        let mut sets = Vec::new();
        if *self.peek() != Tok::RBrack {
            sets.push(self.braced_atoms(true)?);
            while *self.peek() == Tok::Comma {
                self.bump();
                sets.push(self.braced_atoms(true)?);
            }
        }
        self.expect(Tok::RBrack)?;
        self.expect(Tok::RParen)?;
        Ok(RawAtom::Explicit(dom, sets))
    }
}

fn resolve(sig: &Signature, names: &[String]) -> AtomSet {
    names
        .iter()
        .map(|n| sig.id(n).expect("collected from the same source"))
        .collect()
}

fn build_atom(sig: &Signature, raw: &Located<RawAtom>) -> Result<ChoiceAtom> {
    let id = |n: &String| sig.id(n).expect("collected from the same source");
    let built = match &raw.item {
        RawAtom::Literal(a, positive) => Ok(ChoiceAtom::literal(id(a), *positive)),
        RawAtom::Card(atoms, lo, hi) => ChoiceAtom::cardinality(resolve(sig, atoms), *lo, *hi),
        RawAtom::Count(atoms, true, k) => ChoiceAtom::count_eq(resolve(sig, atoms), *k),
        RawAtom::Count(atoms, false, k) => ChoiceAtom::count_neq(resolve(sig, atoms), *k),
        RawAtom::Explicit(dom, sets) => {
            ChoiceAtom::extensional(resolve(sig, dom), sets.iter().map(|s| resolve(sig, s)))
        }
    };
    built.map_err(|e| match e {
        Error::InvalidAtom(message) => Error::Parse(err(raw.line, raw.column, message, None)),
        other => other,
    })
}

/// Parses a program, choosing the dialect from its heads.
pub fn parse_program(text: &str) -> Result<ParsedProgram> {
    let toks = lex(text)?;
    let rules = Parser { toks, pos: 0 }.program()?;

    let mut names: BTreeSet<&String> = BTreeSet::new();
    for r in &rules {
        match &r.head {
            RawHead::Atom(a) => names.extend(a.item.names()),
            RawHead::Disjunction(atoms) => names.extend(atoms),
        }
        for b in &r.body {
            names.extend(b.item.names());
        }
    }
    let sig = Signature::new(names.into_iter().cloned())?;

    let disjunctive = rules
        .iter()
        .any(|r| matches!(r.head, RawHead::Disjunction(_)));
    if !disjunctive {
        let mut out = Vec::new();
        for r in &rules {
            let RawHead::Atom(h) = &r.head else {
                unreachable!("no disjunctive heads")
            };
            let body = r
                .body
                .iter()
                .map(|b| build_atom(&sig, b))
                .collect::<Result<Vec<_>>>()?;
            out.push(ChoiceRule::new(build_atom(&sig, h)?, body));
        }
        return Ok(ParsedProgram::Choice(ChoiceProgram::new(sig, out)?));
    }

    let mut out = Vec::new();
    for r in &rules {
        let head = match &r.head {
            RawHead::Disjunction(atoms) => resolve(&sig, atoms),
            RawHead::Atom(Located {
                item: RawAtom::Literal(a, true),
                ..
            }) => resolve(&sig, std::slice::from_ref(a)),
            RawHead::Atom(_) => return Err(Error::DialectMix { line: r.line }),
        };
        let mut body = Vec::new();
        for b in &r.body {
            match &b.item {
                RawAtom::Literal(a, positive) => body.push(Literal {
                    atom: sig.id(a).expect("collected from the same source"),
                    positive: *positive,
                }),
                _ => return Err(Error::DialectMix { line: b.line }),
            }
        }
        out.push(DisjunctiveRule::new(head, body)?);
    }
    Ok(ParsedProgram::Disjunctive(DisjunctiveProgram::new(
        sig, out,
    )?))
}

fn braces(sig: &Signature, s: AtomSet) -> String {
    format!("{{{}}}", sig.names(s).join("; "))
}

pub fn print_atom(sig: &Signature, c: &ChoiceAtom) -> String {
    let dom = braces(sig, c.dom());
    match c.sat() {
        Satisfiers::PosLiteral => sig
            .name(c.dom().iter().next().expect("literal"))
            .to_string(),
        Satisfiers::NegLiteral => {
            format!("not {}", sig.name(c.dom().iter().next().expect("literal")))
        }
        Satisfiers::Cardinality { lo, hi } => {
            let mut s = String::new();
            if *lo > 0 {
                s.push_str(&format!("{lo} "));
            }
            s.push_str(&dom);
            if let Some(hi) = hi {
                s.push_str(&format!(" {hi}"));
            }
            s
        }
        Satisfiers::CountEq(k) => format!("{dom} = {k}"),
        Satisfiers::CountNeq(k) => format!("{dom} != {k}"),
        Satisfiers::Extensional(f) => {
            let sets: Vec<String> = f.iter().map(|s| braces(sig, s)).collect();
            format!(
                "choice([{}], [{}])",
                sig.names(c.dom()).join("; "),
                sets.join(", ")
            )
        }
    }
}

fn print_rule_tail(head: String, body: Vec<String>) -> String {
    if body.is_empty() {
        format!("{head}.")
    } else {
        format!("{head} :- {}.", body.join(", "))
    }
}

/// Canonical text of a choice program, one rule per line.
pub fn print_choice(p: &ChoiceProgram) -> String {
    let sig = p.signature();
    p.rules()
        .iter()
        .map(|r| {
            let body = r.body.iter().map(|c| print_atom(sig, c)).collect();
            print_rule_tail(print_atom(sig, &r.head), body) + "\n"
        })
        .collect()
}

pub fn print_disjunctive(d: &DisjunctiveProgram) -> String {
    let sig = d.signature();
    d.rules()
        .iter()
        .map(|r| {
            let head = sig.names(r.head()).join(" | ");
            let body = r
                .body
                .iter()
                .map(|l| {
                    let name = sig.name(l.atom);
                    if l.positive {
                        name.to_string()
                    } else {
                        format!("not {name}")
                    }
                })
                .collect();
            print_rule_tail(head, body) + "\n"
        })
        .collect()
}

pub fn print_program(p: &ParsedProgram) -> String {
    match p {
        ParsedProgram::Choice(c) => print_choice(c),
        ParsedProgram::Disjunctive(d) => print_disjunctive(d),
    }
}
