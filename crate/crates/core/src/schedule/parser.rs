//! LL(1) recursive-descent parser for `.sched` sources.
//!
//! ```text
//! schedule   := "schedule" STRING "{" item* "}"
//! item       := constdecl | resonate | idle
//! constdecl  := "const" IDENT "=" expr ";"
//! resonate   := "resonate" qubit+ "for" expr ";"
//! idle       := "idle" "for" expr ";"
//! qubit      := "q" INTEGER
//! expr       := term (("+" | "-") term)*
//! term       := unary (("*" | "/") unary)*
//! unary      := "-" unary | primary
//! primary    := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
//! ```
//!
//! Identifiers are resolved while parsing: `pi`, `lambda` and constants
//! declared earlier in the file.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};

use super::lexer::{tokenize, Tok, Token};
use super::{SourcePos, Span};

const KEYWORDS: &[&str] = &["schedule", "const", "resonate", "idle", "for", "with", "pi", "lambda"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Func {
    Sqrt,
    Cos,
    Sin,
    Acos,
    Asin,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "cos" => Func::Cos,
            "sin" => Func::Sin,
            "acos" => Func::Acos,
            "asin" => Func::Asin,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Cos => "cos",
            Func::Sin => "sin",
            Func::Acos => "acos",
            Func::Asin => "asin",
        }
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sqrt => x.sqrt(),
            Func::Cos => x.cos(),
            Func::Sin => x.sin(),
            Func::Acos => x.acos(),
            Func::Asin => x.asin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ExprKind {
    Number(f64),
    Pi,
    Lambda,
    Const(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Item {
    Const { name: String, span: Span, value: Expr },
    Resonate { qubits: Vec<(usize, Span)>, duration: Expr, span: Span },
    Idle { duration: Expr, span: Span },
}

impl Item {
    pub fn span(&self) -> Span {
        match self {
            Item::Const { span, .. } | Item::Resonate { span, .. } | Item::Idle { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleAst {
    pub name: String,
    pub span: Span,
    pub items: Vec<Item>,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    consts: HashSet<String>,
}

fn err(pos: SourcePos, message: impl Into<String>) -> Error {
    Error::Parse { pos, message: message.into() }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> Error {
        let t = self.peek();
        err(t.span.start, format!("expected {expected}, found {}", t.tok.describe()))
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<Token> {
        if self.peek().tok == tok {
            Ok(self.next())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Token> {
        if self.at_keyword(kw) {
            Ok(self.next())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn schedule(&mut self) -> Result<ScheduleAst> {
        let start = self.expect_keyword("schedule")?.span;
        let name = match self.peek().tok.clone() {
            Tok::Str(s) => {
                self.next();
                s
            }
            _ => return Err(self.unexpected("schedule name string")),
        };
        self.expect(Tok::LBrace, "`{`")?;
        let mut items = Vec::new();
        loop {
            let item = match &self.peek().tok {
                Tok::RBrace => break,
                Tok::Ident(s) if s == "const" => self.const_decl()?,
                Tok::Ident(s) if s == "resonate" => self.resonate()?,
                Tok::Ident(s) if s == "idle" => self.idle()?,
                _ => return Err(self.unexpected("`const`, `resonate`, `idle` or `}`")),
            };
            items.push(item);
        }
        let end = self.next().span;
        if self.peek().tok != Tok::Eof {
            return Err(self.unexpected("end of input after schedule body"));
        }
        Ok(ScheduleAst { name, span: start.to(end), items })
    }

    fn const_decl(&mut self) -> Result<Item> {
        let start = self.next().span;
        let (name, name_span) = match self.peek().tok.clone() {
            Tok::Ident(s) => (s, self.next().span),
            _ => return Err(self.unexpected("constant name")),
        };
        if KEYWORDS.contains(&name.as_str()) || Func::from_name(&name).is_some() {
            return Err(err(name_span.start, format!("`{name}` is reserved and cannot be redefined")));
        }
        if self.consts.contains(&name) {
            return Err(err(name_span.start, format!("duplicate constant `{name}`")));
        }
        self.expect(Tok::Eq, "`=`")?;
        let value = self.expr()?;
        let end = self.expect(Tok::Semi, "`;`")?.span;
        self.consts.insert(name.clone());
        Ok(Item::Const { name, span: start.to(end), value })
    }

    fn qubit(&mut self) -> Result<(usize, Span)> {
        let t = self.next();
        let Tok::Ident(s) = &t.tok else { unreachable!("caller checked for an identifier") };
        let digits = &s[1..];
        let (index_text, span) = if digits.is_empty() {
            // "q" INTEGER written with a space
            match self.peek().tok {
                Tok::Number(_) => {
                    let n = self.next();
                    let text = source_number(&n);
                    (text, t.span.to(n.span))
                }
                _ => {
                    let found = self.peek().tok.describe();
                    return Err(err(t.span.start, format!("qubit `q` has no index, found {found}")));
                }
            }
        } else {
            (digits.to_string(), t.span)
        };
        if index_text.is_empty() || !index_text.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err(t.span.start, format!("malformed qubit `{s}`, expected q<index>")));
        }
        let idx =
            index_text.parse().map_err(|_| err(t.span.start, format!("qubit index `{index_text}` is too large")))?;
        Ok((idx, span))
    }

    fn resonate(&mut self) -> Result<Item> {
        let start = self.next().span;
        let mut qubits = Vec::new();
        while matches!(&self.peek().tok, Tok::Ident(s) if s.starts_with('q') && s != "for") {
            qubits.push(self.qubit()?);
        }
        if qubits.is_empty() {
            return Err(self.unexpected("at least one qubit (q0, q1, ...)"));
        }
        self.expect_keyword("for")?;
        let duration = self.expr()?;
        if self.at_keyword("with") {
            let t = self.peek();
            return Err(err(t.span.start, "`with lambda = ...` segment suffix is reserved and not supported"));
        }
        let end = self.expect(Tok::Semi, "`;`")?.span;
        Ok(Item::Resonate { qubits, duration, span: start.to(end) })
    }

    fn idle(&mut self) -> Result<Item> {
        let start = self.next().span;
        self.expect_keyword("for")?;
        let duration = self.expr()?;
        let end = self.expect(Tok::Semi, "`;`")?.span;
        Ok(Item::Idle { duration, span: start.to(end) })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.term()?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr { kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span };
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.unary()?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr { kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span };
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek().tok == Tok::Minus {
            let start = self.next().span;
            let inner = self.unary()?;
            let span = start.to(inner.span);
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), span });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Number(v) => {
                self.next();
                Ok(Expr { kind: ExprKind::Number(v), span: t.span })
            }
            Tok::LParen => {
                self.next();
                let inner = self.expr()?;
                let end = self.expect(Tok::RParen, "`)`")?.span;
                Ok(Expr { kind: inner.kind, span: t.span.to(end) })
            }
            Tok::Ident(name) => {
                self.next();
                if self.peek().tok == Tok::LParen {
                    let func = Func::from_name(&name)
                        .ok_or_else(|| err(t.span.start, format!("unknown function `{name}`")))?;
                    self.next();
                    let arg = self.expr()?;
                    let end = self.expect(Tok::RParen, "`)`")?.span;
                    return Ok(Expr { kind: ExprKind::Call(func, Box::new(arg)), span: t.span.to(end) });
                }
                let kind = match name.as_str() {
                    "pi" => ExprKind::Pi,
                    "lambda" => ExprKind::Lambda,
                    _ if self.consts.contains(&name) => ExprKind::Const(name),
                    _ if Func::from_name(&name).is_some() => {
                        return Err(err(t.span.start, format!("function `{name}` needs an argument")))
                    }
                    _ => return Err(err(t.span.start, format!("unknown identifier `{name}`"))),
                };
                Ok(Expr { kind, span: t.span })
            }
            _ => Err(self.unexpected("expression")),
        }
    }
}

fn source_number(t: &Token) -> String {
    match t.tok {
        Tok::Number(v) if v.fract() == 0.0 && (0.0..1e15).contains(&v) => format!("{}", v as u64),
        _ => String::new(),
    }
}

pub fn parse(source: &str) -> Result<ScheduleAst> {
    let tokens = tokenize(source)?;
    Parser { tokens, pos: 0, consts: HashSet::new() }.schedule()
}

/// Parses a standalone expression; only `pi` and `lambda` are in scope.
pub fn parse_expr(source: &str) -> Result<Expr> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, pos: 0, consts: HashSet::new() };
    let e = p.expr()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.unexpected("end of expression"));
    }
    Ok(e)
}
