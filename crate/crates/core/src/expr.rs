//! Expression DSL: scalar fields and 1-form components are given as text,
//! compiled once, and evaluated directly into jets.
//!
//! Grammar (EBNF):
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := unary ('^' unary)?          -- exponent must be a real literal
//! unary  := '-'? atom
//! atom   := number | 'i' | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//! Chart variables are always real; `conj` evaluates its subtree with `i`
//! replaced by `-i`.

use crate::jet::{JetError, JetScalar};
use crate::scalar::{cr, Real, C};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Tan,
    Conj,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "conj" => Func::Conj,
            _ => return None,
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Conj => "conj",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    ImUnit,
    Ident(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("parse error at offset {offset}: {message} (expected one of {expected:?})")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
    pub expected: Vec<String>,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("unbound identifier '{0}'")]
    Unbound(String),
    #[error("denominator guard tripped: |{value:.3e}| < {guard:.3e}")]
    DenominatorGuard { value: f64, guard: f64 },
    #[error(transparent)]
    Jet(#[from] JetError),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek_offset(&mut self) -> usize {
        self.skip_ws();
        self.pos
    }

    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::Eof, start));
        }
        let b = self.src[self.pos];
        let tok = match b {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' | b'.' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_digit() || self.src[end] == b'.')
                {
                    end += 1;
                }
                // exponent part
                if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                    let mut e = end + 1;
                    if e < self.src.len() && (self.src[e] == b'+' || self.src[e] == b'-') {
                        e += 1;
                    }
                    if e < self.src.len() && self.src[e].is_ascii_digit() {
                        while e < self.src.len() && self.src[e].is_ascii_digit() {
                            e += 1;
                        }
                        end = e;
                    }
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                let v: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    message: format!("malformed number '{text}'"),
                    expected: vec!["number".into()],
                })?;
                self.pos = end;
                Tok::Num(v)
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let name = std::str::from_utf8(&self.src[self.pos..end])
                    .unwrap()
                    .to_string();
                self.pos = end;
                Tok::Ident(name)
            }
            other => {
                return Err(ParseError {
                    offset: start,
                    message: format!("unexpected character '{}'", other as char),
                    expected: vec!["expression".into()],
                });
            }
        };
        Ok((tok, start))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    lookahead: Option<(Tok, usize)>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            lexer: Lexer::new(src),
            lookahead: None,
        }
    }

    fn peek(&mut self) -> Result<&(Tok, usize), ParseError> {
        if self.lookahead.is_none() {
            self.lookahead = Some(self.lexer.next()?);
        }
        Ok(self.lookahead.as_ref().unwrap())
    }

    fn bump(&mut self) -> Result<(Tok, usize), ParseError> {
        match self.lookahead.take() {
            Some(t) => Ok(t),
            None => self.lexer.next(),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let (tok, off) = self.bump()?;
        if tok == Tok::RParen {
            Ok(())
        } else {
            Err(ParseError {
                offset: off,
                message: format!("expected ')', found {tok:?}"),
                expected: vec![")".into()],
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek()?.0 {
                Tok::Plus => {
                    self.bump()?;
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Tok::Minus => {
                    self.bump()?;
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek()?.0 {
                Tok::Star => {
                    self.bump()?;
                    let rhs = self.factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Tok::Slash => {
                    self.bump()?;
                    let rhs = self.factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.unary()?;
        if self.peek()?.0 == Tok::Caret {
            self.bump()?;
            let off = self.lexer.peek_offset();
            let exp = self.unary()?;
            let r = match exp {
                Expr::Num(v) => v,
                Expr::Neg(inner) => match *inner {
                    Expr::Num(v) => -v,
                    _ => {
                        return Err(ParseError {
                            offset: off,
                            message: "exponent must be a real literal".into(),
                            expected: vec!["number".into()],
                        });
                    }
                },
                _ => {
                    return Err(ParseError {
                        offset: off,
                        message: "exponent must be a real literal".into(),
                        expected: vec!["number".into()],
                    });
                }
            };
            return Ok(Expr::Pow(Box::new(base), r));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek()?.0 == Tok::Minus {
            self.bump()?;
            let inner = self.atom()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, off) = self.bump()?;
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Ident(name) => {
                if name == "i" {
                    return Ok(Expr::ImUnit);
                }
                if self.peek()?.0 == Tok::LParen {
                    self.bump()?;
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    match Func::from_name(&name) {
                        Some(f) => Ok(Expr::Call(f, Box::new(arg))),
                        None => Err(ParseError {
                            offset: off,
                            message: format!("unknown function '{name}'"),
                            expected: vec![
                                "exp".into(),
                                "log".into(),
                                "sqrt".into(),
                                "sin".into(),
                                "cos".into(),
                                "tan".into(),
                                "conj".into(),
                            ],
                        }),
                    }
                } else {
                    Ok(Expr::Ident(name))
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            other => Err(ParseError {
                offset: off,
                message: format!("expected an atom, found {other:?}"),
                expected: vec!["number".into(), "identifier".into(), "(".into(), "i".into()],
            }),
        }
    }
}

/// Parse a single expression; trailing input is an error.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text);
    let e = p.expr()?;
    let (tok, off) = p.bump()?;
    if tok != Tok::Eof {
        return Err(ParseError {
            offset: off,
            message: format!("trailing input {tok:?}"),
            expected: vec![")".into(), "operator".into(), "end of input".into()],
        });
    }
    Ok(e)
}

/// One evaluation environment: chart variable names (in order), real
/// parameter bindings, and an optional denominator guard used by the chart
/// samplers to skip points near poles.
pub struct EvalCtx<'a, T: Real> {
    pub vars: &'a [String],
    pub params: &'a BTreeMap<String, T>,
    pub guard: Option<T>,
}

impl<'a, T: Real> EvalCtx<'a, T> {
    pub fn new(vars: &'a [String], params: &'a BTreeMap<String, T>) -> Self {
        EvalCtx {
            vars,
            params,
            guard: None,
        }
    }

    pub fn with_guard(mut self, g: f64) -> Self {
        self.guard = Some(T::of(g));
        self
    }
}

fn eval_rec<T: Real>(
    e: &Expr,
    ctx: &EvalCtx<T>,
    point: &[T],
    dim: usize,
    order: usize,
    conj: bool,
) -> Result<JetScalar<T>, EvalError> {
    let guard_ok = |j: &JetScalar<T>| -> Result<(), EvalError> {
        if let Some(g) = ctx.guard {
            let v = j.value().norm();
            if v < g {
                return Err(EvalError::DenominatorGuard {
                    value: v.to_f64().unwrap_or(0.0),
                    guard: g.to_f64().unwrap_or(0.0),
                });
            }
        }
        Ok(())
    };
    Ok(match e {
        Expr::Num(v) => JetScalar::constant(cr(*v), dim, order),
        Expr::ImUnit => {
            let unit = if conj { cr::<T>(-1.0) } else { cr::<T>(1.0) };
            JetScalar::constant(unit * C::new(T::zero(), T::one()), dim, order)
        }
        Expr::Ident(name) => {
            if let Some(ix) = ctx.vars.iter().position(|v| v == name) {
                JetScalar::variable(ix, C::new(point[ix], T::zero()), dim, order)?
            } else if let Some(v) = ctx.params.get(name) {
                JetScalar::constant(C::new(*v, T::zero()), dim, order)
            } else {
                return Err(EvalError::Unbound(name.clone()));
            }
        }
        Expr::Neg(a) => -&eval_rec(a, ctx, point, dim, order, conj)?,
        Expr::Add(a, b) => {
            &eval_rec(a, ctx, point, dim, order, conj)?
                + &eval_rec(b, ctx, point, dim, order, conj)?
        }
        Expr::Sub(a, b) => {
            &eval_rec(a, ctx, point, dim, order, conj)?
                - &eval_rec(b, ctx, point, dim, order, conj)?
        }
        Expr::Mul(a, b) => eval_rec(a, ctx, point, dim, order, conj)?
            .mul(&eval_rec(b, ctx, point, dim, order, conj)?),
        Expr::Div(a, b) => {
            let den = eval_rec(b, ctx, point, dim, order, conj)?;
            guard_ok(&den)?;
            eval_rec(a, ctx, point, dim, order, conj)?.div(&den)?
        }
        Expr::Pow(a, r) => {
            let base = eval_rec(a, ctx, point, dim, order, conj)?;
            let integral = (*r - r.round()).abs() < 1e-12;
            if !integral || *r < 0.0 {
                guard_ok(&base)?;
            }
            base.powf(T::of(*r))?
        }
        Expr::Call(f, a) => match f {
            Func::Conj => eval_rec(a, ctx, point, dim, order, !conj)?,
            _ => {
                let arg = eval_rec(a, ctx, point, dim, order, conj)?;
                match f {
                    Func::Exp => arg.exp(),
                    Func::Log => {
                        guard_ok(&arg)?;
                        arg.log()?
                    }
                    Func::Sqrt => {
                        guard_ok(&arg)?;
                        arg.sqrt()?
                    }
                    Func::Sin => arg.sin(),
                    Func::Cos => arg.cos(),
                    Func::Tan => {
                        let c = arg.cos();
                        guard_ok(&c)?;
                        arg.sin().div(&c)?
                    }
                    Func::Conj => unreachable!(),
                }
            }
        },
    })
}

/// Evaluate an expression into a jet at a chart point.
pub fn eval_jet<T: Real>(
    e: &Expr,
    ctx: &EvalCtx<T>,
    point: &[T],
    order: usize,
) -> Result<JetScalar<T>, EvalError> {
    assert_eq!(point.len(), ctx.vars.len());
    eval_rec(e, ctx, point, ctx.vars.len().max(1), order, false)
}

/// Evaluate to a plain complex number (order-0 jet).
pub fn eval_complex<T: Real>(e: &Expr, ctx: &EvalCtx<T>, point: &[T]) -> Result<C<T>, EvalError> {
    Ok(eval_jet(e, ctx, point, 0)?.value())
}

/// Evaluate an expression that depends only on parameters.
pub fn eval_const<T: Real>(e: &Expr, params: &BTreeMap<String, T>) -> Result<C<T>, EvalError> {
    let vars: [String; 0] = [];
    let ctx = EvalCtx {
        vars: &vars,
        params,
        guard: None,
    };
    Ok(eval_rec(e, &ctx, &[], 1, 0, false)?.value())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn prec(e: &Expr) -> u8 {
            match e {
                Expr::Add(..) | Expr::Sub(..) => 1,
                Expr::Mul(..) | Expr::Div(..) => 2,
                Expr::Neg(..) => 3,
                Expr::Pow(..) => 4,
                _ => 5,
            }
        }
        fn write_sub(e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if prec(e) < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Num(v) => {
                if *v == v.trunc() && v.abs() < 1e15 {
                    write!(f, "{}", *v as i64)
                } else {
                    write!(f, "{v:?}")
                }
            }
            Expr::ImUnit => write!(f, "i"),
            Expr::Ident(n) => write!(f, "{n}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                write_sub(a, 4, f)
            }
            Expr::Add(a, b) => {
                write_sub(a, 1, f)?;
                write!(f, " + ")?;
                write_sub(b, 2, f)
            }
            Expr::Sub(a, b) => {
                write_sub(a, 1, f)?;
                write!(f, " - ")?;
                write_sub(b, 2, f)
            }
            Expr::Mul(a, b) => {
                write_sub(a, 2, f)?;
                write!(f, "*")?;
                write_sub(b, 3, f)
            }
            Expr::Div(a, b) => {
                write_sub(a, 2, f)?;
                write!(f, "/")?;
                write_sub(b, 4, f)
            }
            Expr::Pow(a, r) => {
                write_sub(a, 5, f)?;
                if *r < 0.0 || *r != r.trunc() {
                    write!(f, "^({r})")
                } else {
                    write!(f, "^{}", *r as i64)
                }
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// Comparison operators usable in chart domain predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Gt,
    Le,
    Ge,
    Ne,
}

/// Conjunction of comparisons between real-valued expressions, e.g.
/// `"y > 0 & x^2 + y^2 < 2"`.
#[derive(Debug, Clone)]
pub struct Predicate {
    pub clauses: Vec<(Expr, CmpOp, Expr)>,
}

impl Predicate {
    pub fn always() -> Self {
        Predicate { clauses: vec![] }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Ok(Self::always());
        }
        let mut clauses = Vec::new();
        for part in trimmed.split('&') {
            let (op, op_at) = ["<=", ">=", "!=", "<", ">"]
                .iter()
                .find_map(|op| part.find(op).map(|at| (*op, at)))
                .ok_or_else(|| ParseError {
                    offset: 0,
                    message: format!("predicate clause '{part}' has no comparison"),
                    expected: vec![
                        "<".into(),
                        ">".into(),
                        "<=".into(),
                        ">=".into(),
                        "!=".into(),
                    ],
                })?;
            let lhs = parse(&part[..op_at])?;
            let rhs = parse(&part[op_at + op.len()..])?;
            let cmp = match op {
                "<" => CmpOp::Lt,
                ">" => CmpOp::Gt,
                "<=" => CmpOp::Le,
                ">=" => CmpOp::Ge,
                _ => CmpOp::Ne,
            };
            clauses.push((lhs, cmp, rhs));
        }
        Ok(Predicate { clauses })
    }

    pub fn holds<T: Real>(&self, ctx: &EvalCtx<T>, point: &[T]) -> bool {
        self.clauses.iter().all(|(l, op, r)| {
            let (Ok(lv), Ok(rv)) = (eval_complex(l, ctx, point), eval_complex(r, ctx, point))
            else {
                return false;
            };
            let (a, b) = (lv.re, rv.re);
            match op {
                CmpOp::Lt => a < b,
                CmpOp::Gt => a > b,
                CmpOp::Le => a <= b,
                CmpOp::Ge => a >= b,
                CmpOp::Ne => a != b,
            }
        })
    }
}

/// Catalog-level shorthand: replaces the identifiers `z` and `zb` with
/// `(x + i*y)` and `(x - i*y)`. Purely syntactic, applied before parsing.
pub fn expand_z_shorthand(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 16);
    let bytes = text.as_bytes();
    let mut idx = 0;
    while idx < bytes.len() {
        let b = bytes[idx];
        if b.is_ascii_alphabetic() || b == b'_' {
            let mut end = idx;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            let word = &text[idx..end];
            match word {
                "z" => out.push_str("(x + i*y)"),
                "zb" => out.push_str("(x - i*y)"),
                _ => out.push_str(word),
            }
            idx = end;
        } else {
            out.push(b as char);
            idx += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx<'a>(vars: &'a [String], params: &'a BTreeMap<String, f64>) -> EvalCtx<'a, f64> {
        EvalCtx::new(vars, params)
    }

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parse_basic_shapes() {
        let e = parse("x + i*y").unwrap();
        assert_eq!(
            e,
            Expr::Add(
                Box::new(Expr::Ident("x".into())),
                Box::new(Expr::Mul(
                    Box::new(Expr::ImUnit),
                    Box::new(Expr::Ident("y".into()))
                ))
            )
        );
        let e = parse("exp(2*x)").unwrap();
        assert_eq!(
            e,
            Expr::Call(
                Func::Exp,
                Box::new(Expr::Mul(
                    Box::new(Expr::Num(2.0)),
                    Box::new(Expr::Ident("x".into()))
                ))
            )
        );
    }

    #[test]
    fn parse_error_position() {
        let err = parse("x + (y").unwrap_err();
        assert_eq!(err.offset, 6);
        assert!(err.expected.contains(&")".to_string()));
    }

    #[test]
    fn pow_requires_real_literal() {
        assert!(parse("x^2").is_ok());
        assert!(parse("x^-0.5").is_ok());
        assert!(parse("x^y").is_err());
        assert_eq!(
            parse("x^(2)").unwrap(),
            Expr::Pow(Box::new(Expr::Ident("x".into())), 2.0)
        );
    }

    #[test]
    fn eval_square_jet() {
        let vars = names(&["x"]);
        let params = BTreeMap::new();
        let e = parse("x*x").unwrap();
        let j = eval_jet(&e, &ctx(&vars, &params), &[3.0], 2).unwrap();
        assert_eq!(j.value().re, 9.0);
        assert_eq!(
            j.extract(&crate::jet::MultiIndex::from_slice(&[1]))
                .unwrap()
                .re,
            6.0
        );
        assert_eq!(
            j.extract(&crate::jet::MultiIndex::from_slice(&[2]))
                .unwrap()
                .re,
            2.0
        );
    }

    #[test]
    fn conj_negates_i() {
        let vars = names(&["x", "y"]);
        let params = BTreeMap::new();
        let e = parse("conj(x + i*y)").unwrap();
        let v = eval_complex(&e, &ctx(&vars, &params), &[1.0, 2.0]).unwrap();
        assert_eq!(v, C::new(1.0, -2.0));

        // involution
        let e2 = parse("conj(conj(x + i*y))").unwrap();
        let v2 = eval_complex(&e2, &ctx(&vars, &params), &[1.0, 2.0]).unwrap();
        assert_eq!(v2, C::new(1.0, 2.0));
    }

    #[test]
    fn unbound_identifier_rejected() {
        let vars = names(&["x"]);
        let params = BTreeMap::new();
        let e = parse("x + q").unwrap();
        assert!(matches!(
            eval_jet(&e, &ctx(&vars, &params), &[0.0], 1),
            Err(EvalError::Unbound(n)) if n == "q"
        ));
    }

    #[test]
    fn mixed_partial_matches_finite_difference() {
        let vars = names(&["x", "y"]);
        let params = BTreeMap::new();
        let e = parse("exp(x*y)").unwrap();
        let c = ctx(&vars, &params);
        let j = eval_jet(&e, &c, &[0.3, 0.7], 3).unwrap();
        let dxy = j
            .extract(&crate::jet::MultiIndex::from_slice(&[1, 1]))
            .unwrap()
            .re;
        // nested central differences
        let f = |x: f64, y: f64| (x * y).exp();
        let h = 1e-4;
        let fd = (f(0.3 + h, 0.7 + h) - f(0.3 + h, 0.7 - h) - f(0.3 - h, 0.7 + h)
            + f(0.3 - h, 0.7 - h))
            / (4.0 * h * h);
        assert!((dxy - fd).abs() / dxy.abs() < 1e-7);
    }

    #[test]
    fn display_roundtrip() {
        for src in [
            "x + i*y",
            "exp(2*x) - sqrt(y)/3",
            "-(x + y)^2*conj(x - i*y)",
            "1/(x^2 + y^2)",
            "tan(x)*cos(y) + 0.25",
            "x^(-1.5) + 2e3*y",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_string();
            let re = parse(&printed).unwrap_or_else(|err| {
                panic!("reparse of '{printed}' failed: {err}");
            });
            assert_eq!(e, re, "round trip through '{printed}'");
        }
    }

    #[test]
    fn real_expression_has_no_imaginary_part() {
        let vars = names(&["x", "y"]);
        let params = BTreeMap::new();
        let e = parse("exp(x)*sin(y) + x^3/(1 + y^2)").unwrap();
        let c = ctx(&vars, &params);
        let j = eval_jet(&e, &c, &[0.4, -0.9], 4).unwrap();
        assert!(j.imag_part().norm_inf() < 1e-14);
    }

    #[test]
    fn predicate_parsing_and_evaluation() {
        let vars = names(&["x", "y"]);
        let params = BTreeMap::new();
        let p = Predicate::parse("y > 0 & x^2 + y^2 < 2").unwrap();
        let c = ctx(&vars, &params);
        assert!(p.holds(&c, &[0.5, 0.5]));
        assert!(!p.holds(&c, &[0.5, -0.5]));
        assert!(!p.holds(&c, &[1.4, 0.5]));
        assert!(Predicate::parse("").unwrap().holds(&c, &[9.0, 9.0]));
    }

    #[test]
    fn z_shorthand_expansion() {
        assert_eq!(expand_z_shorthand("z*zb"), "(x + i*y)*(x - i*y)");
        assert_eq!(expand_z_shorthand("tz + z2"), "tz + z2");
        assert_eq!(expand_z_shorthand("exp(i*z)"), "exp(i*(x + i*y))");
    }

    #[test]
    fn denominator_guard_trips() {
        let vars = names(&["x"]);
        let params = BTreeMap::new();
        let e = parse("1/x").unwrap();
        let c = EvalCtx::new(&vars, &params).with_guard(1e-6);
        assert!(matches!(
            eval_jet(&e, &c, &[1e-9], 2),
            Err(EvalError::DenominatorGuard { .. })
        ));
        assert!(eval_jet(&e, &c, &[0.5], 2).is_ok());
    }
}
