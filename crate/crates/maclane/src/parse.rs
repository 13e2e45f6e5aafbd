//! Polynomial expressions in x over K: integer and rational literals, x,
//! theta (theta2, … for deeper tower levels), + − * / ^ and parentheses.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arith::{KPoly, K, Q};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = vec![];
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|c| c.1).collect();
            out.push((pos, Tok::Num(s.parse().unwrap())));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((pos, Tok::Ident(chars[start..i].iter().map(|c| c.1).collect())));
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Syntax { pos, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    k: &'a K,
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser<'_> {
    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn peek_op(&self, c: char) -> bool {
        matches!(self.toks.get(self.at), Some((_, Tok::Op(o))) if *o == c)
    }

    fn expr(&mut self) -> Result<KPoly> {
        let mut acc = self.term()?;
        loop {
            if self.peek_op('+') {
                self.at += 1;
                acc = self.k.padd(&acc, &self.term()?);
            } else if self.peek_op('-') {
                self.at += 1;
                acc = self.k.psub(&acc, &self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<KPoly> {
        let mut acc = self.unary()?;
        loop {
            if self.peek_op('*') {
                self.at += 1;
                acc = self.k.pmul(&acc, &self.unary()?);
            } else if self.peek_op('/') {
                self.at += 1;
                let pos = self.pos();
                let d = self.unary()?;
                if d.len() != 1 {
                    return Err(Error::Syntax { pos, msg: "division by a non-constant or zero".into() });
                }
                acc = self.k.pscale(&acc, &self.k.inv(&d[0]));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<KPoly> {
        if self.peek_op('-') {
            self.at += 1;
            let v = self.unary()?;
            return Ok(self.k.pscale(&v, &self.k.from_i64(-1)));
        }
        if self.peek_op('+') {
            self.at += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<KPoly> {
        let base = self.primary()?;
        if !self.peek_op('^') {
            return Ok(base);
        }
        self.at += 1;
        match self.toks.get(self.at) {
            Some((_, Tok::Num(n))) => {
                let e = n.to_usize().filter(|&e| e <= 10_000);
                let Some(e) = e else { return self.err("exponent too large") };
                self.at += 1;
                Ok(self.k.ppow(&base, e))
            }
            _ => self.err("expected a nonnegative integer exponent"),
        }
    }

    fn primary(&mut self) -> Result<KPoly> {
        let Some((pos, tok)) = self.toks.get(self.at).cloned() else {
            return self.err("unexpected end of input");
        };
        self.at += 1;
        match tok {
            Tok::Num(n) => Ok(self.k.pconst(self.k.from_q(Q::from_integer(n)))),
            Tok::Ident(name) if name == "x" => Ok(self.k.x()),
            Tok::Ident(name) if name.starts_with("theta") => {
                let level = match &name[5..] {
                    "" => 1,
                    s => s.parse::<usize>().ok().filter(|&j| j >= 2).unwrap_or(0),
                };
                if level == 0 || level > self.k.tower_degrees().len() {
                    return Err(Error::Syntax { pos, msg: format!("'{name}' is not a generator of the base field") });
                }
                Ok(self.k.pconst(self.k.theta(level)))
            }
            Tok::Ident(name) => Err(Error::Syntax { pos, msg: format!("unknown symbol '{name}'") }),
            Tok::Op('(') => {
                let v = self.expr()?;
                if !self.peek_op(')') {
                    return self.err("expected ')'");
                }
                self.at += 1;
                Ok(v)
            }
            Tok::Op(c) => Err(Error::Syntax { pos, msg: format!("unexpected '{c}'") }),
        }
    }
}

/// Parses a polynomial in x with coefficients in K.
pub fn parse_poly(k: &K, text: &str) -> Result<KPoly> {
    let toks = lex(text)?;
    let mut p = Parser { k, toks, at: 0, end: text.len() };
    let v = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(v)
}

/// Parses "c0,c1,…" (constant term first) with rational entries.
pub fn parse_coeffs(k: &K, text: &str) -> Result<KPoly> {
    let mut out = vec![];
    let mut offset = 0;
    for part in text.split(',') {
        let c = parse_poly(k, part).map_err(|e| match e {
            Error::Syntax { pos, msg } => Error::Syntax { pos: pos + offset, msg },
            other => other,
        })?;
        if c.len() > 1 {
            return Err(Error::Syntax { pos: offset, msg: "coefficient depends on x".into() });
        }
        out.push(c.into_iter().next().unwrap_or_else(|| k.zero()));
        offset += part.len() + 1;
    }
    k.trim(&mut out);
    Ok(out)
}

/// The printed form, which `parse_poly` reads back to the same polynomial.
pub fn print_poly(k: &K, f: &KPoly) -> String {
    k.fmt_poly(f, "x")
}
