//! Tokenizer and recursive-descent parser for rational-function expressions.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

use super::{ParseError, ParseErrorKind};
use crate::ratfunc::{DiffContext, RatFunc};
use crate::scalar::{QuadScalar, Rat};

/// Largest accepted exponent magnitude.
pub const MAX_EXPONENT: i64 = 512;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigUint),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of expression".into(),
        }
    }
}

fn tokenize(src: &str, base: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'.' || bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
                    return Err(ParseError::new(
                        ParseErrorKind::MalformedLiteral,
                        base + start,
                        "malformed numeric literal (only integers and p/q are allowed)",
                    ));
                }
                out.push((Tok::Int(src[start..i].parse().expect("digits")), base + start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), base + start));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError::new(ParseErrorKind::Syntax, base + start, format!("unexpected character `{ch}`")));
            }
        };
        out.push((tok, base + start));
        i += 1;
    }
    out.push((Tok::End, base + src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    ctx: &'a DiffContext,
}

impl<'a> Parser<'a> {
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

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let mut e = ParseError::new(
            ParseErrorKind::Syntax,
            self.offset(),
            format!("unexpected {}", self.peek().describe()),
        );
        e.expected = expected.iter().map(|s| s.to_string()).collect();
        e
    }

    fn expr(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    self.bump();
                    let at = self.offset();
                    let rhs = self.unary()?;
                    if rhs.is_zero() {
                        return Err(ParseError::new(ParseErrorKind::DivisionByZero, at, "division by zero"));
                    }
                    acc = &acc / &rhs;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let mut exps = Vec::new();
        while *self.peek() == Tok::Caret {
            self.bump();
            exps.push(self.exponent()?);
        }
        // right-associative: a^b^c = a^(b^c)
        let at = self.offset();
        let mut e = exps.pop().expect("at least one exponent");
        while let Some(b) = exps.pop() {
            e = int_pow(b, e).ok_or_else(|| too_large(at))?;
        }
        if e.abs() > MAX_EXPONENT {
            return Err(too_large(at));
        }
        if e < 0 && base.is_zero() {
            return Err(ParseError::new(ParseErrorKind::DivisionByZero, at, "negative power of zero"));
        }
        Ok(base.pow(e as i32))
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let at = self.offset();
        let paren = *self.peek() == Tok::LParen;
        if paren {
            self.bump();
        }
        let neg = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let v = match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                n.to_i64().filter(|v| *v <= MAX_EXPONENT).ok_or_else(|| too_large(at))?
            }
            _ => {
                let mut e = ParseError::new(
                    ParseErrorKind::NonIntegerExponent,
                    self.offset(),
                    "exponents must be integer literals",
                );
                e.expected = vec!["integer".into()];
                return Err(e);
            }
        };
        if paren {
            if *self.peek() != Tok::RParen {
                return Err(self.unexpected(&["`)`"]));
            }
            self.bump();
        }
        Ok(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<RatFunc, ParseError> {
        let n = self.ctx.nvars();
        let at = self.offset();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(RatFunc::constant(n, QuadScalar::from_rat(Rat::from_integer(BigInt::from(v)))))
            }
            Tok::Ident(name) if name == "sqrt" => {
                self.bump();
                if *self.peek() != Tok::LParen {
                    return Err(self.unexpected(&["`(`"]));
                }
                self.bump();
                let arg_at = self.offset();
                let v = match self.bump() {
                    Tok::Int(v) => v,
                    _ => {
                        self.pos -= 1;
                        let mut e = ParseError::new(
                            ParseErrorKind::MalformedLiteral,
                            arg_at,
                            "sqrt takes a non-negative integer literal",
                        );
                        e.expected = vec!["integer".into()];
                        return Err(e);
                    }
                };
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected(&["`)`"]));
                }
                self.bump();
                let root = QuadScalar::sqrt_int(&v);
                if let Some(d) = root.radicand() {
                    if self.ctx.radicand() != Some(d) {
                        return Err(ParseError::new(
                            ParseErrorKind::UnknownRadicand,
                            at,
                            format!("sqrt({d}) needs `sqrt: {d}` in the document header"),
                        ));
                    }
                }
                Ok(RatFunc::constant(n, root))
            }
            Tok::Ident(name) => {
                self.bump();
                self.ctx.var(&name).ok_or_else(|| {
                    let mut e = ParseError::new(ParseErrorKind::UnknownIdentifier, at, format!("unknown identifier `{name}`"));
                    e.expected = self.ctx.vars().iter().map(|v| format!("`{v}`")).collect();
                    e
                })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected(&["`)`", "operator"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.unexpected(&["integer", "identifier", "`sqrt(`", "`(`", "`-`"])),
        }
    }
}

fn too_large(at: usize) -> ParseError {
    ParseError::new(ParseErrorKind::NonIntegerExponent, at, format!("exponent magnitude exceeds {MAX_EXPONENT}"))
}

fn int_pow(b: i64, e: i64) -> Option<i64> {
    if e < 0 {
        return None;
    }
    let mut acc: i64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(b)?;
        if acc.abs() > MAX_EXPONENT {
            return None;
        }
    }
    Some(acc)
}

/// Parses `src`, reporting offsets shifted by `base` (its position inside a
/// larger document).
pub(crate) fn parse_at(src: &str, base: usize, ctx: &DiffContext) -> Result<RatFunc, ParseError> {
    let toks = tokenize(src, base)?;
    let mut p = Parser { toks, pos: 0, ctx };
    if *p.peek() == Tok::End {
        return Err(p.unexpected(&["expression"]));
    }
    let v = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected(&["operator", "end of expression"]));
    }
    Ok(v)
}

/// Parses an expression over the variables of `ctx`.
pub fn parse_expr(text: &str, ctx: &DiffContext) -> Result<RatFunc, ParseError> {
    parse_at(text, 0, ctx).map_err(|e| e.locate(text))
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && s != "sqrt"
}
