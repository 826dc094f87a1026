//! Recursive-descent parser for the identity DSL:
//!
//! ```text
//! identity := expr '=' expr
//! expr     := ['+'|'-'] term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := atom ('^' uint)?
//! atom     := 'F[' affine ']' | 'L[' affine ']' | '(-1)^(' affine ')'
//!           | rational | '(' expr ')'
//! affine   := signed sum of `int? var` and `int`, e.g. `2m+2n+1`
//! rational := int ('/' uint)?
//! ```
//!
//! Whitespace is ignored everywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{AffineIndex, FibExpr, Identity};
use crate::error::{Error, Result};
use crate::seq::SeqKind;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&(_, d)) = it.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                s.push(d);
                it.next();
            }
            out.push(Token {
                tok: Tok::Int(s.parse().expect("digits")),
                pos,
            });
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&(_, d)) = it.peek() {
                if !(d.is_alphanumeric() || d == '_') {
                    break;
                }
                s.push(d);
                it.next();
            }
            out.push(Token {
                tok: Tok::Ident(s),
                pos,
            });
        } else if "+-*/^()[]=".contains(c) {
            out.push(Token { tok: Tok::Sym(c), pos });
            it.next();
        } else {
            return Err(Error::Parse {
                pos,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    end: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Self {
            toks: lex(text)?,
            at: 0,
            end: text.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.at + k).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.pos)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = v.clone();
                self.at += 1;
                Ok(v)
            }
            _ => self.err("expected an unsigned integer"),
        }
    }

    fn small(&self, v: &BigInt) -> Result<i64> {
        v.to_i64().map_or_else(|| self.err("integer out of range"), Ok)
    }

    fn expr(&mut self) -> Result<FibExpr> {
        let negate = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let first = self.term()?;
        let mut acc = if negate { -first } else { first };
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<FibExpr> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<FibExpr> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.uint()?;
            let e = e
                .to_u32()
                .filter(|&e| e <= 64)
                .map_or_else(|| self.err("exponent too large"), Ok)?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn is_sign_atom(&self) -> bool {
        matches!(
            (self.peek(), self.peek_at(1), self.peek_at(2), self.peek_at(3), self.peek_at(4), self.peek_at(5)),
            (Some(Tok::Sym('(')), Some(Tok::Sym('-')), Some(Tok::Int(one)), Some(Tok::Sym(')')), Some(Tok::Sym('^')), Some(Tok::Sym('(')))
                if *one == BigInt::from(1)
        )
    }

    fn atom(&mut self) -> Result<FibExpr> {
        if self.is_sign_atom() {
            self.at += 6;
            let exp = self.affine()?;
            self.expect(')')?;
            return Ok(FibExpr::sign(exp));
        }
        match self.peek().cloned() {
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(Tok::Int(n)) => {
                self.at += 1;
                let mut q = BigRational::from_integer(n);
                if self.eat('/') {
                    let pos = self.pos();
                    let d = self.uint()?;
                    if d.is_zero() {
                        return Err(Error::Parse {
                            pos,
                            msg: "zero denominator".into(),
                        });
                    }
                    q /= BigRational::from_integer(d);
                }
                Ok(FibExpr::constant(q))
            }
            Some(Tok::Ident(name)) if (name == "F" || name == "L") && self.peek_at(1) == Some(&Tok::Sym('[')) => {
                let kind = if name == "F" { SeqKind::F } else { SeqKind::L };
                self.at += 2;
                let index = self.affine()?;
                self.expect(']')?;
                Ok(FibExpr::seq(kind, index))
            }
            Some(Tok::Ident(name)) => self.err(format!("unexpected identifier `{name}` outside an index")),
            Some(Tok::Sym(c)) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }

    fn affine(&mut self) -> Result<AffineIndex> {
        let mut acc = AffineIndex::default();
        let mut sign = if self.eat('-') {
            -1
        } else {
            self.eat('+');
            1
        };
        loop {
            let item = match self.peek().cloned() {
                Some(Tok::Int(v)) => {
                    self.at += 1;
                    let k = self.small(&v)?;
                    let had_star = self.eat('*');
                    match self.peek().cloned() {
                        Some(Tok::Ident(name)) => {
                            self.at += 1;
                            AffineIndex::term(&name, k)
                        }
                        _ if had_star => return self.err("expected a variable after `*`"),
                        _ => AffineIndex::constant(k),
                    }
                }
                Some(Tok::Ident(name)) => {
                    self.at += 1;
                    AffineIndex::var(&name)
                }
                _ => return self.err("expected an index term"),
            };
            acc = acc.add(&item.scale(sign));
            match self.peek() {
                Some(Tok::Sym('+')) => {
                    self.at += 1;
                    sign = 1;
                }
                Some(Tok::Sym('-')) => {
                    self.at += 1;
                    sign = -1;
                }
                Some(Tok::Sym('*')) | Some(Tok::Sym('^')) | Some(Tok::Ident(_)) | Some(Tok::Sym('(')) => {
                    return self.err("indices must be affine in the variables");
                }
                _ => return Ok(acc),
            }
        }
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(_) => self.err("unexpected trailing input"),
        }
    }
}

/// Result of [`parse`]: a bare expression or an equation.
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Expr(FibExpr),
    Identity(Identity),
}

pub fn parse_expr(text: &str) -> Result<FibExpr> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_affine(text: &str) -> Result<AffineIndex> {
    let mut p = Parser::new(text)?;
    let a = p.affine()?;
    p.finish()?;
    Ok(a)
}

/// Parses `lhs = rhs`; variables are inferred from use.
pub fn parse_identity(text: &str) -> Result<Identity> {
    let (lhs, rhs) = parse_sides(text)?;
    Ok(Identity::new("", lhs, rhs))
}

pub(crate) fn parse_sides(text: &str) -> Result<(FibExpr, FibExpr)> {
    let mut p = Parser::new(text)?;
    let lhs = p.expr()?;
    p.expect('=')?;
    let rhs = p.expr()?;
    p.finish()?;
    Ok((lhs, rhs))
}

/// Expression or identity, depending on whether a top-level `=` is present.
pub fn parse(text: &str) -> Result<Parsed> {
    let mut p = Parser::new(text)?;
    let lhs = p.expr()?;
    if p.eat('=') {
        let rhs = p.expr()?;
        p.finish()?;
        Ok(Parsed::Identity(Identity::new("", lhs, rhs)))
    } else {
        p.finish()?;
        Ok(Parsed::Expr(lhs))
    }
}
