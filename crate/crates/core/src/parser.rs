//! Concrete syntax shared by LTL and robust LTL.
//!
//! ```text
//! formula := or (("->" | "=>") formula)?          right associative
//! or      := and ("|" and)*
//! and     := binary ("&" binary)*
//! binary  := unary (("U" | "R" | "W") binary)?     right associative
//! unary   := ("!" | "X" | "F" | "G") unary
//!          | "true" | "false" | atom | "(" formula ")"
//! atom    := [a-zA-Z_][a-zA-Z0-9_]*  (other than the keywords above)
//! ```
//!
//! In robust mode the same text denotes the dotted operators. `a W b` is
//! desugared to `b R (b | a)` by the public entry points.

use std::fmt;

use thiserror::Error;

use crate::formula::{Formula, Kind, Logic, Ltl, Rltl};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}{}", expected.as_ref().map(|e| format!(" (expected {e})")).unwrap_or_default())]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Next,
    Eventually,
    Always,
    Until,
    Release,
    WeakUntil,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "atom `{name}`"),
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Not => "`!`",
            Tok::And => "`&`",
            Tok::Or => "`|`",
            Tok::Implies => "`->`",
            Tok::Next => "`X`",
            Tok::Eventually => "`F`",
            Tok::Always => "`G`",
            Tok::Until => "`U`",
            Tok::Release => "`R`",
            Tok::WeakUntil => "`W`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = match c {
            '!' => {
                bump(&mut chars);
                Tok::Not
            }
            '&' => {
                bump(&mut chars);
                Tok::And
            }
            '|' => {
                bump(&mut chars);
                Tok::Or
            }
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            '-' | '=' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    Tok::Implies
                } else {
                    return Err(ParseError {
                        line: tline,
                        column: tcol,
                        message: format!("unknown operator `{c}`"),
                        expected: Some("`->` or `=>`".into()),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "X" => Tok::Next,
                    "F" => Tok::Eventually,
                    "G" => Tok::Always,
                    "U" => Tok::Until,
                    "R" => Tok::Release,
                    "W" => Tok::WeakUntil,
                    _ => Tok::Ident(word),
                }
            }
            other => {
                return Err(ParseError {
                    line: tline,
                    column: tcol,
                    message: format!("unknown token `{other}`"),
                    expected: None,
                })
            }
        };
        out.push(Spanned { tok, line: tline, column: tcol });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn error(&self, message: impl Into<String>, expected: &str) -> ParseError {
        let (line, column) = match self.toks.get(self.pos) {
            Some(s) => (s.line, s.column),
            None => end_position(self.text),
        };
        ParseError { line, column, message: message.into(), expected: Some(expected.to_string()) }
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(t) => format!("unexpected {t}"),
            None => "unexpected end of input".to_string(),
        }
    }

    fn implication<L: Logic>(&mut self) -> Result<Formula<L>, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction<L: Logic>(&mut self) -> Result<Formula<L>, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction<L: Logic>(&mut self) -> Result<Formula<L>, ParseError> {
        let mut lhs = self.binary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            lhs = Formula::and(lhs, self.binary()?);
        }
        Ok(lhs)
    }

    fn binary<L: Logic>(&mut self) -> Result<Formula<L>, ParseError> {
        let lhs = self.unary()?;
        let build: fn(Formula<L>, Formula<L>) -> Formula<L> = match self.peek() {
            Some(Tok::Until) => Formula::until,
            Some(Tok::Release) => Formula::release,
            Some(Tok::WeakUntil) => Formula::weak_until,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.binary()?;
        Ok(build(lhs, rhs))
    }

    fn unary<L: Logic>(&mut self) -> Result<Formula<L>, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error(self.found(), "a formula"));
        };
        let unary: Option<fn(Formula<L>) -> Formula<L>> = match tok {
            Tok::Not => Some(Formula::not),
            Tok::Next => Some(Formula::next),
            Tok::Eventually => Some(Formula::eventually),
            Tok::Always => Some(Formula::always),
            _ => None,
        };
        if let Some(build) = unary {
            self.pos += 1;
            return Ok(build(self.unary()?));
        }
        match tok {
            Tok::True => {
                self.pos += 1;
                Ok(Formula::tt())
            }
            Tok::False => {
                self.pos += 1;
                Ok(Formula::ff())
            }
            Tok::Ident(name) => {
                self.pos += 1;
                Ok(Formula::atom(&name))
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.implication()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.error(self.found(), "`)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.error(self.found(), "a formula")),
        }
    }
}

fn end_position(text: &str) -> (usize, usize) {
    let line = text.lines().count().max(1);
    let last = text.lines().last().unwrap_or("");
    (line, last.chars().count().max(1))
}

/// Parses without desugaring weak until.
pub fn parse_raw<L: Logic>(text: &str) -> Result<Formula<L>, ParseError> {
    let mut parser = Parser { toks: tokenize(text)?, pos: 0, text };
    let f = parser.implication()?;
    if parser.pos != parser.toks.len() {
        return Err(parser.error(parser.found(), "an operator or end of input"));
    }
    Ok(f)
}

pub fn parse<L: Logic>(text: &str) -> Result<Formula<L>, ParseError> {
    Ok(parse_raw::<L>(text)?.desugar_weak_until())
}

pub fn parse_ltl(text: &str) -> Result<Ltl, ParseError> {
    parse(text)
}

pub fn parse_rltl(text: &str) -> Result<Rltl, ParseError> {
    parse(text)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RenderOptions {
    pub fully_parenthesized: bool,
    pub unicode: bool,
}

struct Glyphs {
    not: &'static str,
    and: &'static str,
    or: &'static str,
    implies: &'static str,
    next: &'static str,
    eventually: &'static str,
    always: &'static str,
    until: &'static str,
    release: &'static str,
    weak_until: &'static str,
}

const ASCII: Glyphs = Glyphs {
    not: "!",
    and: "&",
    or: "|",
    implies: "->",
    next: "X",
    eventually: "F",
    always: "G",
    until: "U",
    release: "R",
    weak_until: "W",
};

const CLASSICAL_UNICODE: Glyphs = Glyphs {
    not: "¬",
    and: "∧",
    or: "∨",
    implies: "⟹",
    next: "◯",
    eventually: "◇",
    always: "□",
    until: "U",
    release: "R",
    weak_until: "W",
};

const ROBUST_UNICODE: Glyphs = Glyphs {
    not: "¬",
    and: "∧",
    or: "∨",
    implies: "⇛",
    next: "⊙",
    eventually: "◇\u{307}",
    always: "⊡",
    until: "U\u{307}",
    release: "R\u{307}",
    weak_until: "W\u{307}",
};

fn precedence<L: Logic>(f: &Formula<L>) -> u8 {
    match f.kind() {
        Kind::Implies(..) => 1,
        Kind::Or(..) => 2,
        Kind::And(..) => 3,
        Kind::Until(..) | Kind::Release(..) | Kind::WeakUntil(..) => 4,
        Kind::Not(_) | Kind::Next(_) | Kind::Eventually(_) | Kind::Always(_) => 5,
        Kind::True | Kind::False | Kind::Atom(_) => 6,
    }
}

/// Prints a formula in the concrete syntax. Without `fully_parenthesized`
/// only the parentheses required by precedence and associativity are kept,
/// so `parse(render(f)) == f`.
pub fn render<L: Logic>(f: &Formula<L>, options: RenderOptions) -> String {
    let glyphs = match (options.unicode, L::ROBUST) {
        (false, _) => &ASCII,
        (true, false) => &CLASSICAL_UNICODE,
        (true, true) => &ROBUST_UNICODE,
    };
    let mut out = String::new();
    write_formula(f, 0, glyphs, options.fully_parenthesized, &mut out);
    out
}

fn write_formula<L: Logic>(f: &Formula<L>, min: u8, g: &Glyphs, full: bool, out: &mut String) {
    let prec = precedence(f);
    let wrap = prec < min || (full && min > 0 && prec < 6);
    if wrap {
        out.push('(');
    }
    let binary = |a: &Formula<L>, op: &str, b: &Formula<L>, left: u8, right: u8, out: &mut String| {
        write_formula(a, left, g, full, out);
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        write_formula(b, right, g, full, out);
    };
    match f.kind() {
        Kind::True => out.push_str("true"),
        Kind::False => out.push_str("false"),
        Kind::Atom(name) => out.push_str(name),
        Kind::Not(a) => {
            out.push_str(g.not);
            write_formula(a, 5, g, full, out);
        }
        Kind::Next(a) | Kind::Eventually(a) | Kind::Always(a) => {
            let op = match f.kind() {
                Kind::Next(_) => g.next,
                Kind::Eventually(_) => g.eventually,
                _ => g.always,
            };
            out.push_str(op);
            out.push(' ');
            write_formula(a, 5, g, full, out);
        }
        Kind::Implies(a, b) => binary(a, g.implies, b, 2, 1, out),
        Kind::Or(a, b) => binary(a, g.or, b, 2, 3, out),
        Kind::And(a, b) => binary(a, g.and, b, 3, 4, out),
        Kind::Until(a, b) => binary(a, g.until, b, 5, 4, out),
        Kind::Release(a, b) => binary(a, g.release, b, 5, 4, out),
        Kind::WeakUntil(a, b) => binary(a, g.weak_until, b, 5, 4, out),
    }
    if wrap {
        out.push(')');
    }
}
