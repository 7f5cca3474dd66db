//! Concrete syntax, abstract syntax, and well-formedness for the toy
//! imperative language
//! `S ::= x=A | x=[a,b] | skip | S;S | if (B) S else S | while (B) S | break`,
//! plus the predicate language (boolean formulas over program variables,
//! `old(x)` atoms, and the `bot` atom) evaluated to concrete state sets.
//!
//! Arithmetic inside programs saturates at the domain bounds after every
//! operation; arithmetic inside predicates is exact (specification-side).
//!
//! A predicate denotes a subset of Σ ∪ {⊥} (assertional) or of Σ × (Σ ∪ {⊥})
//! (relational, `old(x)` reading the first component). ⊥ (or a (σ₀,⊥) pair)
//! belongs to the denotation iff the formula mentions the `bot` atom and
//! evaluates to true with `bot` := true and every comparison reading a
//! current-state variable := false; comparisons over `old(x)` and constants
//! still evaluate normally at ⊥.

use std::fmt;

use thiserror::Error;

use crate::space::{El, Pred, Rel, Space};

/// Errors from parsing and well-formedness checking.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LangError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("'break' outside any loop at {line}:{col}")]
    BreakOutsideLoop { line: usize, col: usize },
    #[error("undeclared variable '{name}' at {line}:{col}")]
    UndeclaredVariable { name: String, line: usize, col: usize },
    #[error("duplicate variable '{name}' in declaration")]
    DuplicateVariable { name: String },
    #[error("'old({name})' used in an assertional predicate")]
    OldInAssertional { name: String },
}

/// An interval bound in a nondeterministic assignment `x = [a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Int(i64),
    NegInf,
    PosInf,
}

/// Arithmetic expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AExpr {
    Int(i64),
    Var(String),
    Add(Box<AExpr>, Box<AExpr>),
    Sub(Box<AExpr>, Box<AExpr>),
    Mul(Box<AExpr>, Box<AExpr>),
}

/// Comparison operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

/// Boolean expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BExpr {
    Const(bool),
    Cmp(CmpOp, AExpr, AExpr),
    Not(Box<BExpr>),
    And(Box<BExpr>, Box<BExpr>),
    Or(Box<BExpr>, Box<BExpr>),
}

/// Statements. Sequencing is represented by the surrounding `Vec<Stmt>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Assign { var: String, expr: AExpr },
    Nondet { var: String, lo: Bound, hi: Bound },
    Skip,
    Break,
    If { cond: BExpr, then_b: Vec<Stmt>, else_b: Vec<Stmt> },
    While { cond: BExpr, body: Vec<Stmt> },
}

/// A parsed program: declared variables plus the statement sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub vars: Vec<String>,
    pub body: Vec<Stmt>,
}

/// Predicate-language arithmetic: program variables and `old(x)` atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PAExpr {
    Int(i64),
    Var(String),
    Old(String),
    Add(Box<PAExpr>, Box<PAExpr>),
    Sub(Box<PAExpr>, Box<PAExpr>),
    Mul(Box<PAExpr>, Box<PAExpr>),
}

/// Predicate formulas: boolean formulas plus the `bot` atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PredExpr {
    Const(bool),
    Bot,
    Cmp(CmpOp, PAExpr, PAExpr),
    Not(Box<PredExpr>),
    And(Box<PredExpr>, Box<PredExpr>),
    Or(Box<PredExpr>, Box<PredExpr>),
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier '{s}'"),
            Tok::Int(v) => write!(f, "integer {v}"),
            Tok::Kw(k) => write!(f, "'{k}'"),
            Tok::Sym(s) => write!(f, "'{s}'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "vars", "skip", "break", "if", "else", "while", "true", "false", "inf", "old", "bot",
];

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, LangError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
                self.bump();
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else {
                out.push((Tok::Eof, line, col));
                return Ok(out);
            };
            let tok = match c {
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let mut s = String::new();
                    while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                        s.push(self.bump() as char);
                    }
                    match KEYWORDS.iter().find(|k| **k == s) {
                        Some(k) => Tok::Kw(k),
                        None => Tok::Ident(s),
                    }
                }
                b'0'..=b'9' => {
                    let mut v: i64 = 0;
                    while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                        v = v.saturating_mul(10).saturating_add((self.bump() - b'0') as i64);
                    }
                    Tok::Int(v)
                }
                _ => {
                    self.bump();
                    match c {
                        b',' => Tok::Sym(","),
                        b';' => Tok::Sym(";"),
                        b'(' => Tok::Sym("("),
                        b')' => Tok::Sym(")"),
                        b'{' => Tok::Sym("{"),
                        b'}' => Tok::Sym("}"),
                        b'[' => Tok::Sym("["),
                        b']' => Tok::Sym("]"),
                        b'+' => Tok::Sym("+"),
                        b'-' => Tok::Sym("-"),
                        b'*' => Tok::Sym("*"),
                        b'=' => {
                            if self.peek() == Some(b'=') {
                                self.bump();
                                Tok::Sym("==")
                            } else {
                                Tok::Sym("=")
                            }
                        }
                        b'!' => {
                            if self.peek() == Some(b'=') {
                                self.bump();
                                Tok::Sym("!=")
                            } else {
                                Tok::Sym("!")
                            }
                        }
                        b'<' => {
                            if self.peek() == Some(b'=') {
                                self.bump();
                                Tok::Sym("<=")
                            } else {
                                Tok::Sym("<")
                            }
                        }
                        b'>' => {
                            if self.peek() == Some(b'=') {
                                self.bump();
                                Tok::Sym(">=")
                            } else {
                                Tok::Sym(">")
                            }
                        }
                        b'&' => {
                            if self.peek() == Some(b'&') {
                                self.bump();
                                Tok::Sym("&&")
                            } else {
                                return Err(LangError::Syntax {
                                    line,
                                    col,
                                    msg: "expected '&&'".to_string(),
                                });
                            }
                        }
                        b'|' => {
                            if self.peek() == Some(b'|') {
                                self.bump();
                                Tok::Sym("||")
                            } else {
                                return Err(LangError::Syntax {
                                    line,
                                    col,
                                    msg: "expected '||'".to_string(),
                                });
                            }
                        }
                        _ => {
                            return Err(LangError::Syntax {
                                line,
                                col,
                                msg: format!("unexpected character '{}'", c as char),
                            })
                        }
                    }
                }
            };
            out.push((tok, line, col));
        }
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    ix: usize,
    vars: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.ix].0
    }

    fn pos(&self) -> (usize, usize) {
        (self.toks[self.ix].1, self.toks[self.ix].2)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.ix].0.clone();
        if self.ix + 1 < self.toks.len() {
            self.ix += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LangError> {
        let (line, col) = self.pos();
        Err(LangError::Syntax { line, col, msg: msg.into() })
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), LangError> {
        if matches!(self.peek(), Tok::Sym(t) if *t == s) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected '{s}', found {}", self.peek()))
        }
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if let Tok::Sym(t) = self.peek() {
            if *t == s {
                self.bump();
                return true;
            }
        }
        false
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if let Tok::Kw(t) = self.peek() {
            if *t == k {
                self.bump();
                return true;
            }
        }
        false
    }

    fn ident(&mut self) -> Result<String, LangError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            t => self.err(format!("expected identifier, found {t}")),
        }
    }

    fn check_var(&self, name: &str, line: usize, col: usize) -> Result<(), LangError> {
        if self.vars.iter().any(|v| v == name) {
            Ok(())
        } else {
            Err(LangError::UndeclaredVariable { name: name.to_string(), line, col })
        }
    }

    fn int_lit(&mut self) -> Result<i64, LangError> {
        let neg = self.eat_sym("-");
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            t => self.err(format!("expected integer, found {t}")),
        }
    }

    fn bound(&mut self) -> Result<Bound, LangError> {
        if self.eat_kw("inf") {
            return Ok(Bound::PosInf);
        }
        if self.eat_sym("-") {
            if self.eat_kw("inf") {
                return Ok(Bound::NegInf);
            }
            match self.peek().clone() {
                Tok::Int(v) => {
                    self.bump();
                    return Ok(Bound::Int(-v));
                }
                t => return self.err(format!("expected integer or 'inf', found {t}")),
            }
        }
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Bound::Int(v))
            }
            t => self.err(format!("expected bound, found {t}")),
        }
    }

    // aexpr ::= term (("+" | "-") term)*
    fn aexpr(&mut self) -> Result<AExpr, LangError> {
        let mut e = self.aterm()?;
        loop {
            if self.eat_sym("+") {
                e = AExpr::Add(Box::new(e), Box::new(self.aterm()?));
            } else if self.eat_sym("-") {
                e = AExpr::Sub(Box::new(e), Box::new(self.aterm()?));
            } else {
                return Ok(e);
            }
        }
    }

    // term ::= atom ("*" atom)*
    fn aterm(&mut self) -> Result<AExpr, LangError> {
        let mut e = self.aatom()?;
        while self.eat_sym("*") {
            e = AExpr::Mul(Box::new(e), Box::new(self.aatom()?));
        }
        Ok(e)
    }

    fn aatom(&mut self) -> Result<AExpr, LangError> {
        let (line, col) = self.pos();
        if self.eat_sym("(") {
            let e = self.aexpr()?;
            self.expect_sym(")")?;
            return Ok(e);
        }
        if self.eat_sym("-") {
            match self.peek().clone() {
                Tok::Int(v) => {
                    self.bump();
                    return Ok(AExpr::Int(-v));
                }
                t => return self.err(format!("expected integer after '-', found {t}")),
            }
        }
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(AExpr::Int(v))
            }
            Tok::Ident(name) => {
                self.bump();
                self.check_var(&name, line, col)?;
                Ok(AExpr::Var(name))
            }
            t => self.err(format!("expected arithmetic expression, found {t}")),
        }
    }

    // bexpr ::= band ("||" band)*
    fn bexpr(&mut self) -> Result<BExpr, LangError> {
        let mut e = self.band()?;
        while self.eat_sym("||") {
            e = BExpr::Or(Box::new(e), Box::new(self.band()?));
        }
        Ok(e)
    }

    fn band(&mut self) -> Result<BExpr, LangError> {
        let mut e = self.bunary()?;
        while self.eat_sym("&&") {
            e = BExpr::And(Box::new(e), Box::new(self.bunary()?));
        }
        Ok(e)
    }

    fn bunary(&mut self) -> Result<BExpr, LangError> {
        if self.eat_sym("!") {
            return Ok(BExpr::Not(Box::new(self.bunary()?)));
        }
        self.batom()
    }

    fn batom(&mut self) -> Result<BExpr, LangError> {
        if self.eat_kw("true") {
            return Ok(BExpr::Const(true));
        }
        if self.eat_kw("false") {
            return Ok(BExpr::Const(false));
        }
        // "(" may open a parenthesized bexpr or the left aexpr of a comparison;
        // resolve by backtracking on the comparison path.
        if matches!(self.peek(), Tok::Sym("(")) {
            let save = self.ix;
            self.bump();
            if let Ok(e) = self.bexpr() {
                if self.eat_sym(")") && !self.peek_cmp_or_arith() {
                    return Ok(e);
                }
            }
            self.ix = save;
        }
        let lhs = self.aexpr()?;
        let op = match self.peek() {
            Tok::Sym("==") => CmpOp::Eq,
            Tok::Sym("!=") => CmpOp::Ne,
            Tok::Sym("<") => CmpOp::Lt,
            Tok::Sym("<=") => CmpOp::Le,
            Tok::Sym(">") => CmpOp::Gt,
            Tok::Sym(">=") => CmpOp::Ge,
            t => return self.err(format!("expected comparison operator, found {t}")),
        };
        self.bump();
        let rhs = self.aexpr()?;
        Ok(BExpr::Cmp(op, lhs, rhs))
    }

    fn peek_cmp_or_arith(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Sym("==")
                | Tok::Sym("!=")
                | Tok::Sym("<")
                | Tok::Sym("<=")
                | Tok::Sym(">")
                | Tok::Sym(">=")
                | Tok::Sym("+")
                | Tok::Sym("-")
                | Tok::Sym("*")
        )
    }

    fn block(&mut self, in_loop: bool) -> Result<Vec<Stmt>, LangError> {
        self.expect_sym("{")?;
        let mut out = Vec::new();
        while !self.eat_sym("}") {
            if matches!(self.peek(), Tok::Eof) {
                return self.err("unexpected end of input inside block");
            }
            out.push(self.stmt(in_loop)?);
        }
        Ok(out)
    }

    fn stmt(&mut self, in_loop: bool) -> Result<Stmt, LangError> {
        let (line, col) = self.pos();
        if self.eat_kw("skip") {
            self.expect_sym(";")?;
            return Ok(Stmt::Skip);
        }
        if self.eat_kw("break") {
            self.expect_sym(";")?;
            if !in_loop {
                return Err(LangError::BreakOutsideLoop { line, col });
            }
            return Ok(Stmt::Break);
        }
        if self.eat_kw("if") {
            self.expect_sym("(")?;
            let cond = self.bexpr()?;
            self.expect_sym(")")?;
            let then_b = self.block(in_loop)?;
            if !self.eat_kw("else") {
                return self.err("expected 'else'");
            }
            let else_b = self.block(in_loop)?;
            return Ok(Stmt::If { cond, then_b, else_b });
        }
        if self.eat_kw("while") {
            self.expect_sym("(")?;
            let cond = self.bexpr()?;
            self.expect_sym(")")?;
            let body = self.block(true)?;
            return Ok(Stmt::While { cond, body });
        }
        let var = self.ident()?;
        self.check_var(&var, line, col)?;
        self.expect_sym("=")?;
        if self.eat_sym("[") {
            let lo = self.bound()?;
            self.expect_sym(",")?;
            let hi = self.bound()?;
            self.expect_sym("]")?;
            self.expect_sym(";")?;
            return Ok(Stmt::Nondet { var, lo, hi });
        }
        let expr = self.aexpr()?;
        self.expect_sym(";")?;
        Ok(Stmt::Assign { var, expr })
    }
}

/// Parse a program from its concrete syntax.
pub fn parse_program(text: &str) -> Result<Program, LangError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, ix: 0, vars: Vec::new() };
    if !p.eat_kw("vars") {
        return p.err("expected 'vars'");
    }
    let mut vars = vec![p.ident()?];
    while p.eat_sym(",") {
        vars.push(p.ident()?);
    }
    p.expect_sym(";")?;
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(LangError::DuplicateVariable { name: v.clone() });
        }
    }
    p.vars = vars.clone();
    let mut body = Vec::new();
    while !matches!(p.peek(), Tok::Eof) {
        body.push(p.stmt(false)?);
    }
    if body.is_empty() {
        return p.err("expected at least one statement");
    }
    Ok(Program { vars, body })
}

/// Parse a predicate formula. `relational` permits `old(x)` atoms; `vars` is
/// the declared variable list the formula may reference.
pub fn parse_predicate(text: &str, relational: bool, vars: &[String]) -> Result<PredExpr, LangError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = PredParser {
        inner: Parser { toks, ix: 0, vars: vars.to_vec() },
        relational,
    };
    let e = p.pexpr()?;
    if !matches!(p.inner.peek(), Tok::Eof) {
        return p.inner.err(format!("unexpected trailing input: {}", p.inner.peek()));
    }
    Ok(e)
}

struct PredParser {
    inner: Parser,
    relational: bool,
}

impl PredParser {
    fn pexpr(&mut self) -> Result<PredExpr, LangError> {
        let mut e = self.pand()?;
        while self.inner.eat_sym("||") {
            e = PredExpr::Or(Box::new(e), Box::new(self.pand()?));
        }
        Ok(e)
    }

    fn pand(&mut self) -> Result<PredExpr, LangError> {
        let mut e = self.punary()?;
        while self.inner.eat_sym("&&") {
            e = PredExpr::And(Box::new(e), Box::new(self.punary()?));
        }
        Ok(e)
    }

    fn punary(&mut self) -> Result<PredExpr, LangError> {
        if self.inner.eat_sym("!") {
            return Ok(PredExpr::Not(Box::new(self.punary()?)));
        }
        self.patom()
    }

    fn patom(&mut self) -> Result<PredExpr, LangError> {
        if self.inner.eat_kw("true") {
            return Ok(PredExpr::Const(true));
        }
        if self.inner.eat_kw("false") {
            return Ok(PredExpr::Const(false));
        }
        if self.inner.eat_kw("bot") {
            return Ok(PredExpr::Bot);
        }
        if matches!(self.inner.peek(), Tok::Sym("(")) {
            let save = self.inner.ix;
            self.inner.bump();
            if let Ok(e) = self.pexpr() {
                if self.inner.eat_sym(")") && !self.inner.peek_cmp_or_arith() {
                    return Ok(e);
                }
            }
            self.inner.ix = save;
        }
        let lhs = self.paexpr()?;
        let op = match self.inner.peek() {
            Tok::Sym("==") => CmpOp::Eq,
            Tok::Sym("!=") => CmpOp::Ne,
            Tok::Sym("<") => CmpOp::Lt,
            Tok::Sym("<=") => CmpOp::Le,
            Tok::Sym(">") => CmpOp::Gt,
            Tok::Sym(">=") => CmpOp::Ge,
            t => return self.inner.err(format!("expected comparison operator, found {t}")),
        };
        self.inner.bump();
        let rhs = self.paexpr()?;
        Ok(PredExpr::Cmp(op, lhs, rhs))
    }

    fn paexpr(&mut self) -> Result<PAExpr, LangError> {
        let mut e = self.paterm()?;
        loop {
            if self.inner.eat_sym("+") {
                e = PAExpr::Add(Box::new(e), Box::new(self.paterm()?));
            } else if self.inner.eat_sym("-") {
                e = PAExpr::Sub(Box::new(e), Box::new(self.paterm()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn paterm(&mut self) -> Result<PAExpr, LangError> {
        let mut e = self.paatom()?;
        while self.inner.eat_sym("*") {
            e = PAExpr::Mul(Box::new(e), Box::new(self.paatom()?));
        }
        Ok(e)
    }

    fn paatom(&mut self) -> Result<PAExpr, LangError> {
        let (line, col) = self.inner.pos();
        if self.inner.eat_sym("(") {
            let e = self.paexpr()?;
            self.inner.expect_sym(")")?;
            return Ok(e);
        }
        if self.inner.eat_sym("-") {
            match self.inner.peek().clone() {
                Tok::Int(v) => {
                    self.inner.bump();
                    return Ok(PAExpr::Int(-v));
                }
                t => return self.inner.err(format!("expected integer after '-', found {t}")),
            }
        }
        if self.inner.eat_kw("old") {
            self.inner.expect_sym("(")?;
            let name = self.inner.ident()?;
            self.inner.check_var(&name, line, col)?;
            self.inner.expect_sym(")")?;
            if !self.relational {
                return Err(LangError::OldInAssertional { name });
            }
            return Ok(PAExpr::Old(name));
        }
        match self.inner.peek().clone() {
            Tok::Int(v) => {
                self.inner.bump();
                Ok(PAExpr::Int(v))
            }
            Tok::Ident(name) => {
                self.inner.bump();
                self.inner.check_var(&name, line, col)?;
                Ok(PAExpr::Var(name))
            }
            t => self.inner.err(format!("expected arithmetic atom, found {t}")),
        }
    }
}

// ---------------------------------------------------------------------------
// Pretty-printing (canonical concrete syntax; parse ∘ pretty = id)
// ---------------------------------------------------------------------------

fn aexpr_prec(e: &AExpr) -> u8 {
    match e {
        AExpr::Add(..) | AExpr::Sub(..) => 1,
        AExpr::Mul(..) => 2,
        AExpr::Int(_) | AExpr::Var(_) => 3,
    }
}

fn fmt_aexpr(e: &AExpr, min_prec: u8, out: &mut String) {
    let prec = aexpr_prec(e);
    if prec < min_prec {
        out.push('(');
    }
    match e {
        AExpr::Int(v) => out.push_str(&v.to_string()),
        AExpr::Var(v) => out.push_str(v),
        AExpr::Add(a, b) => {
            fmt_aexpr(a, 1, out);
            out.push_str(" + ");
            fmt_aexpr(b, 2, out);
        }
        AExpr::Sub(a, b) => {
            fmt_aexpr(a, 1, out);
            out.push_str(" - ");
            fmt_aexpr(b, 2, out);
        }
        AExpr::Mul(a, b) => {
            fmt_aexpr(a, 2, out);
            out.push_str(" * ");
            fmt_aexpr(b, 3, out);
        }
    }
    if prec < min_prec {
        out.push(')');
    }
}

pub fn pretty_aexpr(e: &AExpr) -> String {
    let mut s = String::new();
    fmt_aexpr(e, 0, &mut s);
    s
}

fn cmp_op_str(op: CmpOp) -> &'static str {
    match op {
        CmpOp::Eq => "==",
        CmpOp::Ne => "!=",
        CmpOp::Lt => "<",
        CmpOp::Le => "<=",
        CmpOp::Gt => ">",
        CmpOp::Ge => ">=",
    }
}

fn bexpr_prec(e: &BExpr) -> u8 {
    match e {
        BExpr::Or(..) => 1,
        BExpr::And(..) => 2,
        BExpr::Not(..) => 3,
        BExpr::Const(_) | BExpr::Cmp(..) => 4,
    }
}

fn fmt_bexpr(e: &BExpr, min_prec: u8, out: &mut String) {
    let prec = bexpr_prec(e);
    if prec < min_prec {
        out.push('(');
    }
    match e {
        BExpr::Const(true) => out.push_str("true"),
        BExpr::Const(false) => out.push_str("false"),
        BExpr::Cmp(op, a, b) => {
            fmt_aexpr(a, 0, out);
            out.push(' ');
            out.push_str(cmp_op_str(*op));
            out.push(' ');
            fmt_aexpr(b, 0, out);
        }
        BExpr::Not(b) => {
            out.push('!');
            fmt_bexpr(b, 3, out);
        }
        BExpr::And(a, b) => {
            fmt_bexpr(a, 2, out);
            out.push_str(" && ");
            fmt_bexpr(b, 3, out);
        }
        BExpr::Or(a, b) => {
            fmt_bexpr(a, 1, out);
            out.push_str(" || ");
            fmt_bexpr(b, 2, out);
        }
    }
    if prec < min_prec {
        out.push(')');
    }
}

pub fn pretty_bexpr(e: &BExpr) -> String {
    let mut s = String::new();
    fmt_bexpr(e, 0, &mut s);
    s
}

fn fmt_bound(b: Bound) -> String {
    match b {
        Bound::Int(v) => v.to_string(),
        Bound::NegInf => "-inf".to_string(),
        Bound::PosInf => "inf".to_string(),
    }
}

fn fmt_stmt(s: &Stmt, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match s {
        Stmt::Assign { var, expr } => {
            out.push_str(&format!("{pad}{var} = {};\n", pretty_aexpr(expr)));
        }
        Stmt::Nondet { var, lo, hi } => {
            out.push_str(&format!("{pad}{var} = [{}, {}];\n", fmt_bound(*lo), fmt_bound(*hi)));
        }
        Stmt::Skip => out.push_str(&format!("{pad}skip;\n")),
        Stmt::Break => out.push_str(&format!("{pad}break;\n")),
        Stmt::If { cond, then_b, else_b } => {
            out.push_str(&format!("{pad}if ({}) {{\n", pretty_bexpr(cond)));
            for st in then_b {
                fmt_stmt(st, indent + 1, out);
            }
            out.push_str(&format!("{pad}}} else {{\n"));
            for st in else_b {
                fmt_stmt(st, indent + 1, out);
            }
            out.push_str(&format!("{pad}}}\n"));
        }
        Stmt::While { cond, body } => {
            out.push_str(&format!("{pad}while ({}) {{\n", pretty_bexpr(cond)));
            for st in body {
                fmt_stmt(st, indent + 1, out);
            }
            out.push_str(&format!("{pad}}}\n"));
        }
    }
}

/// Canonical concrete syntax of a program.
pub fn pretty_program(p: &Program) -> String {
    let mut out = format!("vars {};\n", p.vars.join(", "));
    for s in &p.body {
        fmt_stmt(s, 0, &mut out);
    }
    out
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Evaluate an arithmetic expression at a state with saturating arithmetic
/// (the result of every operation is clamped to the domain bounds).
pub fn eval_aexpr(e: &AExpr, sp: &Space, s: u32) -> i64 {
    let d = sp.domain();
    match e {
        AExpr::Int(v) => d.clamp(*v),
        AExpr::Var(name) => sp.value(s, sp.var_index(name).expect("validated variable")),
        AExpr::Add(a, b) => d.clamp(eval_aexpr(a, sp, s) + eval_aexpr(b, sp, s)),
        AExpr::Sub(a, b) => d.clamp(eval_aexpr(a, sp, s) - eval_aexpr(b, sp, s)),
        AExpr::Mul(a, b) => d.clamp(eval_aexpr(a, sp, s) * eval_aexpr(b, sp, s)),
    }
}

fn cmp_eval(op: CmpOp, a: i64, b: i64) -> bool {
    match op {
        CmpOp::Eq => a == b,
        CmpOp::Ne => a != b,
        CmpOp::Lt => a < b,
        CmpOp::Le => a <= b,
        CmpOp::Gt => a > b,
        CmpOp::Ge => a >= b,
    }
}

/// Evaluate a boolean expression at a state.
pub fn eval_bexpr(e: &BExpr, sp: &Space, s: u32) -> bool {
    match e {
        BExpr::Const(v) => *v,
        BExpr::Cmp(op, a, b) => cmp_eval(*op, eval_aexpr(a, sp, s), eval_aexpr(b, sp, s)),
        BExpr::Not(b) => !eval_bexpr(b, sp, s),
        BExpr::And(a, b) => eval_bexpr(a, sp, s) && eval_bexpr(b, sp, s),
        BExpr::Or(a, b) => eval_bexpr(a, sp, s) || eval_bexpr(b, sp, s),
    }
}

/// Does the formula mention the `bot` atom?
pub fn mentions_bot(p: &PredExpr) -> bool {
    match p {
        PredExpr::Bot => true,
        PredExpr::Const(_) | PredExpr::Cmp(..) => false,
        PredExpr::Not(a) => mentions_bot(a),
        PredExpr::And(a, b) | PredExpr::Or(a, b) => mentions_bot(a) || mentions_bot(b),
    }
}

// Predicate arithmetic is exact; `None` means the term reads a current-state
// variable while the current element is ⊥.
fn eval_paexpr(e: &PAExpr, sp: &Space, old: Option<u32>, cur: Option<u32>) -> Option<i64> {
    match e {
        PAExpr::Int(v) => Some(*v),
        PAExpr::Var(name) => cur.map(|s| sp.value(s, sp.var_index(name).expect("validated"))),
        PAExpr::Old(name) => {
            let s = old.expect("old() only in relational context");
            Some(sp.value(s, sp.var_index(name).expect("validated")))
        }
        PAExpr::Add(a, b) => Some(eval_paexpr(a, sp, old, cur)? + eval_paexpr(b, sp, old, cur)?),
        PAExpr::Sub(a, b) => Some(eval_paexpr(a, sp, old, cur)? - eval_paexpr(b, sp, old, cur)?),
        PAExpr::Mul(a, b) => Some(eval_paexpr(a, sp, old, cur)? * eval_paexpr(b, sp, old, cur)?),
    }
}

fn eval_predexpr(p: &PredExpr, sp: &Space, old: Option<u32>, cur: Option<u32>, at_bot: bool) -> bool {
    match p {
        PredExpr::Const(v) => *v,
        PredExpr::Bot => at_bot,
        PredExpr::Cmp(op, a, b) => {
            match (eval_paexpr(a, sp, old, cur), eval_paexpr(b, sp, old, cur)) {
                (Some(x), Some(y)) => cmp_eval(*op, x, y),
                _ => false,
            }
        }
        PredExpr::Not(a) => !eval_predexpr(a, sp, old, cur, at_bot),
        PredExpr::And(a, b) => {
            eval_predexpr(a, sp, old, cur, at_bot) && eval_predexpr(b, sp, old, cur, at_bot)
        }
        PredExpr::Or(a, b) => {
            eval_predexpr(a, sp, old, cur, at_bot) || eval_predexpr(b, sp, old, cur, at_bot)
        }
    }
}

/// Evaluate an assertional predicate to a subset of Σ ∪ {⊥}.
pub fn eval_pred_assertional(p: &PredExpr, sp: &Space) -> Pred {
    let mut out = Pred::new();
    for s in sp.states() {
        if eval_predexpr(p, sp, None, Some(s), false) {
            out.insert(El::St(s));
        }
    }
    if mentions_bot(p) && eval_predexpr(p, sp, None, None, true) {
        out.insert(El::Bot);
    }
    out
}

/// Evaluate a relational predicate to a subset of Σ × (Σ ∪ {⊥}); `old(x)`
/// reads the first component.
pub fn eval_pred_relational(p: &PredExpr, sp: &Space) -> Rel {
    let mut out = Rel::new();
    let bot_side = mentions_bot(p);
    for s0 in sp.states() {
        for s in sp.states() {
            if eval_predexpr(p, sp, Some(s0), Some(s), false) {
                out.insert((El::St(s0), El::St(s)));
            }
        }
        if bot_side && eval_predexpr(p, sp, Some(s0), None, true) {
            out.insert((El::St(s0), El::Bot));
        }
    }
    out
}
