//! Text grammar for gauges.
//!
//! ```text
//! spec    := "const:" rational
//!          | builtin "(" raw ")"
//!          | "baire1" "(" ident arrow expr [";" "modulus" ident arrow expr] ")"
//!          | "baire2" "(" ident arrow baire1 [";" "modulus" ident arrow expr] ")"
//!          | expr
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ["^" atom]
//! atom    := integer | "x" | ident | "(" expr ")" | "|" expr "|"
//!          | ("min" | "max") "(" expr ("," expr)* ")"
//!          | "dist" "(" expr ";" rational ("," rational)* ")"
//! arrow   := "->" | "↦"
//! ```
//!
//! On Cantor space `x` stands for the binary value `φ(x)`. Powers need a
//! positive constant base; a non-integral exponent enclosure is rounded
//! outward. `#` starts a comment.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{Baire1Code, Baire2Code, ContinuousCode, GaugeCode, GaugeError, Region, Space};
use crate::numerics::rational::{floor, parse_rational};
use crate::numerics::{Interval, Rational};
use crate::spaces::phi_cylinder;

const MAX_EXPONENT: i64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ExprError {}

/// Resolves named built-in gauges such as `heine-borel(two.cov)`.
pub trait Builtins {
    fn resolve(&self, name: &str, arg: &str) -> Option<Result<GaugeCode, String>>;
}

impl Builtins for () {
    fn resolve(&self, _: &str, _: &str) -> Option<Result<GaugeCode, String>> {
        None
    }
}

#[derive(Clone, Debug)]
enum Expr {
    Const(Rational),
    X,
    Index(usize),
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Abs(Box<Expr>),
    Min(Vec<Expr>),
    Max(Vec<Expr>),
    Dist(Box<Expr>, Vec<Rational>),
    Pow(Rational, Box<Expr>),
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

impl Expr {
    fn eval(&self, x: &Interval, env: &[u64]) -> Result<Interval, String> {
        Ok(match self {
            Expr::Const(c) => Interval::point(c.clone()),
            Expr::X => x.clone(),
            Expr::Index(i) => Interval::point(Rational::from_integer(BigInt::from(env[*i]))),
            Expr::Neg(e) => e.eval(x, env)?.neg(),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x, env)?, b.eval(x, env)?);
                match op {
                    Op::Add => a.add(&b),
                    Op::Sub => a.sub(&b),
                    Op::Mul => a.mul(&b),
                    Op::Div => {
                        if b.contains_zero() {
                            return Err(format!("division by an enclosure containing 0: {b}"));
                        }
                        a.div(&b)
                    }
                }
            }
            Expr::Abs(e) => e.eval(x, env)?.abs(),
            Expr::Min(es) => fold(es, x, env, Interval::min)?,
            Expr::Max(es) => fold(es, x, env, Interval::max)?,
            Expr::Dist(e, qs) => {
                let v = e.eval(x, env)?;
                let mut acc: Option<Interval> = None;
                for q in qs {
                    let d = v.shift(&-q).abs();
                    acc = Some(match acc {
                        None => d,
                        Some(a) => a.min(&d),
                    });
                }
                acc.expect("dist has at least one point")
            }
            Expr::Pow(base, e) => {
                let t = e.eval(x, env)?;
                let lo = floor(t.lo());
                let hi = -floor(&-t.hi());
                let (lo, hi) = match (lo.to_i64(), hi.to_i64()) {
                    (Some(a), Some(b)) if a.abs() <= MAX_EXPONENT && b.abs() <= MAX_EXPONENT => (a, b),
                    _ => return Err(format!("exponent {t} out of range")),
                };
                let p = |n: i64| {
                    let m = num_traits::pow(base.clone(), n.unsigned_abs() as usize);
                    if n < 0 {
                        m.recip()
                    } else {
                        m
                    }
                };
                let (a, b) = (p(lo), p(hi));
                if a <= b {
                    Interval::new(a, b)
                } else {
                    Interval::new(b, a)
                }
            }
        })
    }

    fn uses_x(&self) -> bool {
        match self {
            Expr::X => true,
            Expr::Const(_) | Expr::Index(_) => false,
            Expr::Neg(e) | Expr::Abs(e) | Expr::Pow(_, e) | Expr::Dist(e, _) => e.uses_x(),
            Expr::Bin(_, a, b) => a.uses_x() || b.uses_x(),
            Expr::Min(es) | Expr::Max(es) => es.iter().any(Expr::uses_x),
        }
    }
}

fn fold(
    es: &[Expr],
    x: &Interval,
    env: &[u64],
    f: fn(&Interval, &Interval) -> Interval,
) -> Result<Interval, String> {
    let mut acc = es[0].eval(x, env)?;
    for e in &es[1..] {
        acc = f(&acc, &e.eval(x, env)?);
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(&'static str),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ExprError> {
    let mut out = Vec::new();
    for (li, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (l, col) = (li + 1, i + 1);
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: l, col });
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                push(&mut out, Tok::Int(s.parse().expect("digits")));
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                push(&mut out, Tok::Ident(chars[start..i].iter().collect()));
                continue;
            }
            let sym = match c {
                '-' if chars.get(i + 1) == Some(&'>') => {
                    i += 1;
                    "->"
                }
                '↦' => "->",
                '−' | '-' => "-",
                '+' => "+",
                '*' | '·' => "*",
                '/' => "/",
                '^' => "^",
                '(' => "(",
                ')' => ")",
                '|' => "|",
                ',' => ",",
                ';' => ";",
                _ => return Err(ExprError { line: l, col, msg: format!("unexpected character `{c}`") }),
            };
            i += 1;
            push(&mut out, Tok::Sym(sym));
        }
    }
    let (line, col) = match src.lines().enumerate().last() {
        Some((i, l)) => (i + 1, l.chars().count() + 1),
        None => (1, 1),
    };
    out.push(Token { tok: Tok::End, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    vars: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        let t = &self.toks[self.pos];
        Err(ExprError { line: t.line, col: t.col, msg: msg.into() })
    }

    fn eat(&mut self, s: &'static str) -> bool {
        if self.peek() == &Tok::Sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &'static str) -> Result<(), ExprError> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn ident(&mut self) -> Result<String, ExprError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected an identifier"),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
            && self.toks.get(self.pos + 1).map(|t| &t.tok) == Some(&Tok::Sym("("))
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat("+") {
                Op::Add
            } else if self.eat("-") {
                Op::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat("*") {
                Op::Mul
            } else if self.eat("/") {
                Op::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = fold_const(Expr::Bin(op, Box::new(lhs), Box::new(rhs)));
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat("-") {
            return Ok(fold_const(Expr::Neg(Box::new(self.unary()?))));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if !self.eat("^") {
            return Ok(base);
        }
        let b = match &base {
            Expr::Const(c) if c.is_positive() => c.clone(),
            _ => return self.err("the base of `^` must be a positive constant"),
        };
        let exp = if self.eat("-") {
            Expr::Neg(Box::new(self.atom()?))
        } else {
            self.atom()?
        };
        Ok(Expr::Pow(b, Box::new(exp)))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.pos += 1;
                Ok(Expr::Const(Rational::from_integer(n)))
            }
            Tok::Sym("(") => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Sym("|") => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect("|")?;
                Ok(Expr::Abs(Box::new(e)))
            }
            Tok::Ident(name) => {
                if self.at_keyword("min") || self.at_keyword("max") {
                    self.pos += 2;
                    let mut args = vec![self.expr()?];
                    while self.eat(",") {
                        args.push(self.expr()?);
                    }
                    self.expect(")")?;
                    return Ok(if name == "min" { Expr::Min(args) } else { Expr::Max(args) });
                }
                if self.at_keyword("dist") {
                    self.pos += 2;
                    let e = self.expr()?;
                    self.expect(";")?;
                    let mut qs = vec![self.rational()?];
                    while self.eat(",") {
                        qs.push(self.rational()?);
                    }
                    self.expect(")")?;
                    return Ok(Expr::Dist(Box::new(e), qs));
                }
                if name == "x" {
                    self.pos += 1;
                    return Ok(Expr::X);
                }
                if let Some(i) = self.vars.iter().rposition(|v| *v == name) {
                    self.pos += 1;
                    return Ok(Expr::Index(i));
                }
                self.err(format!("unknown name `{name}`"))
            }
            Tok::End => self.err("unexpected end of input"),
            t => self.err(format!("unexpected token {t:?}")),
        }
    }

    fn rational(&mut self) -> Result<Rational, ExprError> {
        let e = self.expr()?;
        match fold_const(e) {
            Expr::Const(c) => Ok(c),
            _ => self.err("expected a rational constant"),
        }
    }

    fn arrow(&mut self) -> Result<(), ExprError> {
        self.expect("->")
    }

    fn lambda_body<T>(
        &mut self,
        body: impl FnOnce(&mut Self) -> Result<T, ExprError>,
    ) -> Result<(T, Option<Expr>), ExprError> {
        self.expect("(")?;
        let v = self.ident()?;
        self.arrow()?;
        self.vars.push(v);
        let b = body(self)?;
        self.vars.pop();
        let modulus = if self.eat(";") {
            match self.ident()? {
                m if m == "modulus" => {}
                _ => return self.err("expected `modulus`"),
            }
            let j = self.ident()?;
            self.arrow()?;
            let saved = std::mem::replace(&mut self.vars, vec![j]);
            let m = self.expr()?;
            self.vars = saved;
            if m.uses_x() {
                return self.err("a modulus cannot depend on x");
            }
            Some(m)
        } else {
            None
        };
        self.expect(")")?;
        Ok((b, modulus))
    }

    fn baire1(&mut self) -> Result<(Expr, Option<Expr>), ExprError> {
        self.pos += 1;
        self.lambda_body(|p| p.expr())
    }
}

fn fold_const(e: Expr) -> Expr {
    match &e {
        Expr::Bin(op, a, b) => {
            if let (Expr::Const(a), Expr::Const(b)) = (a.as_ref(), b.as_ref()) {
                return match op {
                    Op::Add => Expr::Const(a + b),
                    Op::Sub => Expr::Const(a - b),
                    Op::Mul => Expr::Const(a * b),
                    Op::Div if !b.is_zero() => Expr::Const(a / b),
                    Op::Div => e,
                };
            }
            e
        }
        Expr::Neg(a) => match a.as_ref() {
            Expr::Const(c) => Expr::Const(-c),
            _ => e,
        },
        _ => e,
    }
}

fn region_value(r: &Region) -> Interval {
    match r {
        Region::Unit(i) => i.clone(),
        Region::Cantor(c) => phi_cylinder(c.bits()),
    }
}

fn eval_region(e: &Expr, r: &Region, env: &[u64]) -> Result<Interval, GaugeError> {
    e.eval(&region_value(r), env).map_err(GaugeError::Eval)
}

fn modulus_fn(m: Expr, tok: &Token) -> Result<impl Fn(u32) -> u64 + Send + Sync, ExprError> {
    let at = move |j: u32| -> Option<u64> {
        let v = m.eval(&Interval::zero(), &[j as u64]).ok()?;
        if !v.is_point() || !v.lo().is_integer() || v.lo().is_negative() {
            return None;
        }
        v.lo().to_integer().to_u64()
    };
    for j in 0..16 {
        if at(j).is_none() {
            return Err(ExprError {
                line: tok.line,
                col: tok.col,
                msg: format!("modulus is not a natural number at {j}"),
            });
        }
    }
    Ok(move |j| at(j).unwrap_or(u64::MAX))
}

/// Parse a gauge specification for the given space.
pub fn parse_gauge(src: &str, space: Space, builtins: &dyn Builtins) -> Result<GaugeCode, ExprError> {
    let stripped: String = src
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n");
    let trimmed = stripped.trim();
    if let Some(rest) = trimmed.strip_prefix("const:") {
        let c = parse_rational(rest.trim()).map_err(|e| ExprError {
            line: 1,
            col: 7,
            msg: e.to_string(),
        })?;
        return Ok(GaugeCode::constant(space, c));
    }
    for name in ["heine-borel", "cauchy-gap", "oracle-pin"] {
        if let Some(rest) = trimmed.strip_prefix(name) {
            let rest = rest.trim_start();
            let arg = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| ExprError { line: 1, col: name.len() + 1, msg: format!("expected `{name}(…)`") })?;
            return match builtins.resolve(name, arg.trim()) {
                Some(Ok(g)) => Ok(g),
                Some(Err(msg)) => Err(ExprError { line: 1, col: 1, msg }),
                None => Err(ExprError { line: 1, col: 1, msg: format!("built-in `{name}` unavailable") }),
            };
        }
    }

    let mut p = Parser { toks: lex(src)?, pos: 0, vars: Vec::new() };
    let start = p.toks[0].clone();
    let code = if p.at_keyword("baire1") {
        let (body, modulus) = p.baire1()?;
        let mut code = Baire1Code::new(space, move |n, r, _| eval_region(&body, r, &[n]));
        if let Some(m) = modulus {
            code = code.with_modulus(modulus_fn(m, &start)?);
        }
        GaugeCode::Baire1(code)
    } else if p.at_keyword("baire2") {
        p.pos += 1;
        let ((inner, inner_mod), modulus) = p.lambda_body(|p| {
            if !p.at_keyword("baire1") {
                return p.err("expected `baire1(…)` inside `baire2`");
            }
            p.baire1()
        })?;
        let inner_mod = match inner_mod {
            Some(m) => Some(std::sync::Arc::new(modulus_fn(m, &start)?)),
            None => None,
        };
        let mut code = Baire2Code::new(space, move |m| {
            let body = inner.clone();
            let b = Baire1Code::new(space, move |n, r, _| eval_region(&body, r, &[m, n]));
            match &inner_mod {
                Some(f) => {
                    let f = f.clone();
                    b.with_modulus(move |j| f(j))
                }
                None => b,
            }
        });
        if let Some(m) = modulus {
            code = code.with_modulus(modulus_fn(m, &start)?);
        }
        GaugeCode::Baire2(code)
    } else {
        let e = p.expr()?;
        GaugeCode::Continuous(ContinuousCode::new(space, move |r, _| eval_region(&e, r, &[])))
    };
    if p.peek() != &Tok::End {
        return p.err("trailing input");
    }
    Ok(code)
}

/// A rational-valued rule `n ↦ value` in the expression grammar.
#[derive(Clone, Debug)]
pub struct IndexRule {
    expr: Expr,
}

impl IndexRule {
    pub fn at(&self, n: u64) -> Result<Rational, String> {
        let v = self.expr.eval(&Interval::zero(), &[n])?;
        if v.is_point() {
            Ok(v.lo().clone())
        } else {
            Err(format!("rule value {v} is not exact"))
        }
    }
}

/// Parses `count` consecutive rules in the index variable `var`, optionally
/// separated by `;`.
pub fn parse_index_rules(src: &str, var: &str, count: usize) -> Result<Vec<IndexRule>, ExprError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, vars: vec![var.to_string()] };
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        if i > 0 {
            p.eat(";");
        }
        let e = p.expr()?;
        if e.uses_x() {
            return p.err(format!("a rule in `{var}` cannot use x"));
        }
        out.push(IndexRule { expr: e });
    }
    if p.peek() != &Tok::End {
        return p.err("trailing input");
    }
    Ok(out)
}
