//! Recursive-descent parser for polynomial text.
//!
//! Accepts sums of products of integer/rational literals, variables, powers
//! and parenthesised subexpressions, e.g. `3/2*z^2*w - (z + 1)^2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{Exponent, PolyError, SparsePoly};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((start, Tok::Num(n)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => {
                return Err(PolyError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((start, tok));
        i += c.len_utf8();
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<SparsePoly, PolyError> {
        let n = self.vars.len();
        let mut acc = SparsePoly::zero(n);
        let mut sign = match self.peek() {
            Some(Tok::Plus) => {
                self.bump();
                1
            }
            Some(Tok::Minus) => {
                self.bump();
                -1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign > 0 { &acc + &t } else { &acc - &t };
            sign = match self.peek() {
                Some(Tok::Plus) => 1,
                Some(Tok::Minus) => -1,
                _ => break,
            };
            self.bump();
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<SparsePoly, PolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let f = self.factor()?;
                    acc = &acc * &f;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let at = self.here();
                    match self.bump() {
                        Some(Tok::Num(d)) => {
                            if d.is_zero() {
                                return Err(PolyError::DivisionByZero { pos: at });
                            }
                            acc = acc.scale(&BigRational::new(BigInt::one(), d));
                        }
                        _ => {
                            self.pos -= 1;
                            return self.err("expected an integer denominator after `/`");
                        }
                    }
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SparsePoly, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let at = self.here();
            match self.bump() {
                Some(Tok::Num(k)) => {
                    let k = k.to_u32().ok_or(PolyError::Syntax {
                        pos: at,
                        msg: "exponent too large".into(),
                    })?;
                    return Ok(base.pow(k));
                }
                Some(Tok::Minus) => return Err(PolyError::NegativeExponent { pos: at }),
                _ => {
                    self.pos -= 1;
                    return self.err("expected a nonnegative integer exponent");
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SparsePoly, PolyError> {
        let n = self.vars.len();
        let at = self.here();
        match self.bump() {
            Some(Tok::Num(c)) => Ok(SparsePoly::constant(n, BigRational::from_integer(c))),
            Some(Tok::Ident(name)) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => Ok(SparsePoly::monomial(Exponent::unit(n, i), BigRational::one())),
                None => Err(PolyError::UnknownVariable { name, pos: at }),
            },
            Some(Tok::LParen) => {
                let e = self.expr()?;
                if self.bump() != Some(Tok::RParen) {
                    self.pos -= 1;
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(_) => {
                self.pos -= 1;
                self.err("expected a number, variable or `(`")
            }
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses polynomial text over the ordered variable list `vars`.
pub fn parse(text: &str, vars: &[String]) -> Result<SparsePoly, PolyError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        vars,
    };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}
