//! Arithmetic expressions over numeric fluents, with an infix parser.

use std::fmt;
use std::iter::Peekable;
use std::str::CharIndices;

use serde::{Deserialize, Serialize};

use super::{Cmp, Fluents};
use crate::error::{ModelError, Result};

/// Expression tree evaluated under 64-bit float semantics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    Const(f64),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(l: Expr, r: Expr) -> Self {
        Expr::Add(Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(l: Expr, r: Expr) -> Self {
        Expr::Sub(Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(l: Expr, r: Expr) -> Self {
        Expr::Mul(Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(l: Expr, r: Expr) -> Self {
        Expr::Div(Box::new(l), Box::new(r))
    }

    /// Evaluates the expression against a fluent assignment.
    pub fn eval(&self, fluents: &Fluents) -> Result<f64> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var(name) => fluents
                .get(name)
                .map(|v| v.as_real())
                .ok_or_else(|| ModelError::UnboundVariable(name.clone()))?,
            Expr::Add(l, r) => l.eval(fluents)? + r.eval(fluents)?,
            Expr::Sub(l, r) => l.eval(fluents)? - r.eval(fluents)?,
            Expr::Mul(l, r) => l.eval(fluents)? * r.eval(fluents)?,
            Expr::Div(l, r) => {
                let num = l.eval(fluents)?;
                let den = r.eval(fluents)?;
                if den == 0.0 {
                    return Err(ModelError::DivisionByZero);
                }
                num / den
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ModelError::NonFinite)
        }
    }

    /// Collapses every subtree whose operands are all constants.
    pub fn fold_constants(self) -> Expr {
        fn bin(
            l: Expr,
            r: Expr,
            rebuild: fn(Box<Expr>, Box<Expr>) -> Expr,
            op: fn(f64, f64) -> Option<f64>,
        ) -> Expr {
            let (l, r) = (l.fold_constants(), r.fold_constants());
            if let (Expr::Const(a), Expr::Const(b)) = (&l, &r) {
                if let Some(v) = op(*a, *b).filter(|v| v.is_finite()) {
                    return Expr::Const(v);
                }
            }
            rebuild(Box::new(l), Box::new(r))
        }
        match self {
            Expr::Add(l, r) => bin(*l, *r, Expr::Add, |a, b| Some(a + b)),
            Expr::Sub(l, r) => {
                let folded = bin(*l, *r, Expr::Sub, |a, b| Some(a - b));
                // x - 0 is x
                match folded {
                    Expr::Sub(l, r) if *r == Expr::Const(0.0) => *l,
                    other => other,
                }
            }
            Expr::Mul(l, r) => bin(*l, *r, Expr::Mul, |a, b| Some(a * b)),
            Expr::Div(l, r) => bin(*l, *r, Expr::Div, |a, b| (b != 0.0).then(|| a / b)),
            leaf => leaf,
        }
    }

    /// All variable names referenced by the expression, in first-use order.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) | Expr::Div(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, op, r) = match self {
            Expr::Const(c) => return write!(f, "{c}"),
            Expr::Var(v) => return f.write_str(v),
            Expr::Add(l, r) => (l, "+", r),
            Expr::Sub(l, r) => (l, "-", r),
            Expr::Mul(l, r) => (l, "*", r),
            Expr::Div(l, r) => (l, "/", r),
        };
        let p = self.precedence();
        if l.precedence() < p {
            write!(f, "({l})")?;
        } else {
            write!(f, "{l}")?;
        }
        write!(f, " {op} ")?;
        // left-associative: equal precedence on the right needs parentheses
        if r.precedence() <= p && r.precedence() < 3 {
            write!(f, "({r})")
        } else {
            write!(f, "{r}")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Cmp(Cmp),
}

fn tokenize(src: &str) -> std::result::Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let mut chars: Peekable<CharIndices> = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '0'..='9' | '.' => {
                let mut end = i;
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_ascii_digit() || d == '.' {
                        end = j + d.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                let lit = &src[i..end];
                let v: f64 = lit
                    .parse()
                    .map_err(|_| format!("bad numeric literal `{lit}`"))?;
                out.push(Token::Num(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = i;
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        end = j + d.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Ident(src[i..end].to_string()));
            }
            '+' | '-' | '*' | '/' => {
                chars.next();
                out.push(Token::Op(c));
            }
            '(' => {
                chars.next();
                out.push(Token::LParen);
            }
            ')' => {
                chars.next();
                out.push(Token::RParen);
            }
            '<' | '>' | '=' => {
                chars.next();
                let eq = matches!(chars.peek(), Some(&(_, '=')));
                if eq {
                    chars.next();
                }
                let cmp = match (c, eq) {
                    ('<', false) => Cmp::Lt,
                    ('<', true) => Cmp::Le,
                    ('>', false) => Cmp::Gt,
                    ('>', true) => Cmp::Ge,
                    _ => Cmp::Eq,
                };
                out.push(Token::Cmp(cmp));
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> std::result::Result<Expr, String> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::add(lhs, rhs)
            } else {
                Expr::sub(lhs, rhs)
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> std::result::Result<Expr, String> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::mul(lhs, rhs)
            } else {
                Expr::div(lhs, rhs)
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> std::result::Result<Expr, String> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(Expr::sub(Expr::Const(0.0), self.unary()?))
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> std::result::Result<Expr, String> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Expr::Const(v)),
            Some(Token::Ident(name)) => Ok(Expr::Var(name)),
            Some(Token::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(e),
                    _ => Err("missing `)`".into()),
                }
            }
            Some(t) => Err(format!("unexpected token {t:?}")),
            None => Err("unexpected end of expression".into()),
        }
    }
}

/// Parses an infix arithmetic expression such as `c0 + 1 - c1 * 2`.
pub fn parse_expr(src: &str) -> std::result::Result<Expr, String> {
    let mut p = Parser {
        tokens: tokenize(src)?,
        pos: 0,
    };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(t) => Err(format!("trailing input at {t:?}")),
    }
}

/// Parses either `expr` alone or `lhs <cmp> rhs`. Returns the comparator when
/// one is present in the text.
pub fn parse_relation(src: &str) -> std::result::Result<(Expr, Option<(Cmp, Expr)>), String> {
    let tokens = tokenize(src)?;
    let split = tokens.iter().position(|t| matches!(t, Token::Cmp(_)));
    let Some(at) = split else {
        return parse_expr(src).map(|e| (e, None));
    };
    let cmp = match &tokens[at] {
        Token::Cmp(c) => *c,
        _ => unreachable!(),
    };
    let side = |toks: Vec<Token>| -> std::result::Result<Expr, String> {
        if toks.iter().any(|t| matches!(t, Token::Cmp(_))) {
            return Err("more than one comparison operator".into());
        }
        let mut p = Parser { tokens: toks, pos: 0 };
        let e = p.expr()?;
        match p.peek() {
            None => Ok(e),
            Some(t) => Err(format!("trailing input at {t:?}")),
        }
    };
    let lhs = side(tokens[..at].to_vec())?;
    let rhs = side(tokens[at + 1..].to_vec())?;
    Ok((lhs, Some((cmp, rhs))))
}
