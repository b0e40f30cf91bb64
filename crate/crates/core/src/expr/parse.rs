//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?          (right associative, integer exponent)
//! atom    := number | ident | func "(" expr ")" | "(" expr ")"
//! func    := "ln" | "exp" | "sin" | "cos"
//! number  := digits ("." digits)? (("e" | "E") ("+" | "-")? digits)?
//! ident   := [a-zA-Z][a-zA-Z0-9]*
//! ```
//!
//! Decimal literals are converted to exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Expr, Func, Node, Symbol};
use crate::error::{Error, Result};

/// Maps identifiers to symbols.
pub trait Resolver {
    fn resolve(&self, ident: &str) -> Result<Symbol>;
}

/// Resolver that accepts no identifiers (constant expressions only).
impl Resolver for () {
    fn resolve(&self, ident: &str) -> Result<Symbol> {
        Err(Error::UnknownIdentifier(ident.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit())) {
            let mut mant = String::new();
            let mut frac_digits = 0usize;
            let mut seen_dot = false;
            while i < bytes.len() {
                let d = bytes[i] as char;
                if d.is_ascii_digit() {
                    mant.push(d);
                    if seen_dot {
                        frac_digits += 1;
                    }
                } else if d == '.' && !seen_dot {
                    seen_dot = true;
                } else {
                    break;
                }
                i += 1;
            }
            let mut exp10: i64 = 0;
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                let mut sign = 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    if bytes[j] == b'-' {
                        sign = -1;
                    }
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    let ds = j;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    exp10 = sign
                        * text[ds..j]
                            .parse::<i64>()
                            .map_err(|_| Error::Syntax { pos: ds, msg: "exponent too large".into() })?;
                    i = j;
                }
            }
            let m: BigInt = mant.parse().map_err(|_| Error::Syntax { pos: start, msg: "bad number".into() })?;
            let shift = exp10 - frac_digits as i64;
            let ten = BigRational::from_integer(BigInt::from(10));
            let r = BigRational::from_integer(m) * super::rational_pow(&ten, shift);
            out.push((Tok::Num(r), start));
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i] as char).is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return Err(Error::Syntax { pos: i, msg: format!("unexpected character `{c}`") }),
        };
        out.push((tok, i));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    resolver: &'a dyn Resolver,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.offset(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    acc = acc + self.term()?;
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    acc = acc * self.unary()?;
                }
                Tok::Op('/') => {
                    self.bump();
                    let at = self.offset();
                    let d = self.unary()?;
                    if d.is_zero_const() {
                        return Err(Error::Syntax { pos: at, msg: "division by zero".into() });
                    }
                    acc = acc / d;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Tok::Op('-') = self.peek() {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Tok::Op('^') = self.peek() {
            self.bump();
            let at = self.offset();
            let e = self.unary()?;
            let n = match e.as_num() {
                Some(r) if r.is_integer() => i64::try_from(r.to_integer())
                    .map_err(|_| Error::Syntax { pos: at, msg: "exponent too large".into() })?,
                _ => return Err(Error::Syntax { pos: at, msg: "exponent must be an integer constant".into() }),
            };
            if n < 0 && base.is_zero_const() {
                return Err(Error::Syntax { pos: at, msg: "division by zero".into() });
            }
            return Ok(Expr::pow(base, n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(r) => Ok(Expr::num(r)),
            Tok::LParen => {
                let e = self.expr()?;
                if self.bump() != Tok::RParen {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(f) = Func::from_name(&name) {
                    if self.bump() != Tok::LParen {
                        return Err(Error::Syntax { pos: at, msg: format!("`{name}` must be applied to an argument") });
                    }
                    let a = self.expr()?;
                    if self.bump() != Tok::RParen {
                        return self.err("expected `)`");
                    }
                    return Ok(Expr::apply(f, a));
                }
                Ok(Expr::sym(self.resolver.resolve(&name)?))
            }
            Tok::End => Err(Error::Syntax { pos: at, msg: "unexpected end of input".into() }),
            t => Err(Error::Syntax { pos: at, msg: format!("unexpected token {t:?}") }),
        }
    }
}

/// Parses `text` into a canonical expression, resolving identifiers through
/// `resolver` (normally a [`crate::jet::JetContext`]).
pub fn parse(text: &str, resolver: &dyn Resolver) -> Result<Expr> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, resolver };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    if contains_zero_division(&e) {
        return Err(Error::Syntax { pos: 0, msg: "division by zero".into() });
    }
    Ok(e)
}

fn contains_zero_division(e: &Expr) -> bool {
    match e.node() {
        Node::Pow(b, n) if *n < 0 && b.is_zero_const() => true,
        _ => e.children().into_iter().any(contains_zero_division),
    }
}
