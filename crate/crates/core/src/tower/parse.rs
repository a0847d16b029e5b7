//! ASCII syntax for rational functions in `x` with coefficients in F_q.
//!
//! Grammar: sums and differences of products and quotients of powers;
//! atoms are integers, `x`, the field generator `g`, or parenthesised
//! expressions. Juxtaposition multiplies (`3x^2`, `g x`). Exponents are
//! integers and may be negative.

use crate::error::ModelError;
use crate::field::{FieldDesc, Fq};
use crate::poly::Poly;
use crate::ratfunc::{Place, RatFunc};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(u64),
    X,
    G,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => {}
            '0'..='9' => {
                let start = i;
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..=i].iter().collect();
                out.push(Tok::Num(text.parse().map_err(|_| "number too large".to_string())?));
            }
            'x' | 'X' => out.push(Tok::X),
            'g' => out.push(Tok::G),
            '+' => out.push(Tok::Plus),
            '-' => out.push(Tok::Minus),
            '*' => out.push(Tok::Star),
            '/' => out.push(Tok::Slash),
            '^' => out.push(Tok::Caret),
            '(' => out.push(Tok::LParen),
            ')' => out.push(Tok::RParen),
            other => return Err(format!("unexpected character `{other}`")),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    f: &'a FieldDesc,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<RatFunc, String> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            match t {
                Tok::Plus => {
                    self.pos += 1;
                    acc = acc.add(self.f, &self.term()?);
                }
                Tok::Minus => {
                    self.pos += 1;
                    acc = acc.sub(self.f, &self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc, String> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(self.f, &self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let d = self.unary()?;
                    acc = acc.div(self.f, &d).ok_or("division by zero")?;
                }
                Some(Tok::Num(_)) | Some(Tok::X) | Some(Tok::G) | Some(Tok::LParen) => {
                    acc = acc.mul(self.f, &self.power()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFunc, String> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(self.unary()?.neg(self.f));
        }
        if self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc, String> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let e = match self.next() {
            Some(Tok::Num(n)) => n as i64,
            _ => return Err("exponent must be an integer".into()),
        };
        let e = if neg { -e } else { e };
        if e < 0 && base.is_zero() {
            return Err("negative power of zero".into());
        }
        Ok(base.pow(self.f, e))
    }

    fn atom(&mut self) -> Result<RatFunc, String> {
        match self.next() {
            Some(Tok::Num(n)) => {
                Ok(RatFunc::constant(self.f.from_int((n % self.f.p() as u64) as i64)))
            }
            Some(Tok::X) => Ok(RatFunc::from_poly(Poly::x())),
            Some(Tok::G) => Ok(RatFunc::constant(self.f.generator())),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                if self.next() != Some(Tok::RParen) {
                    return Err("missing `)`".into());
                }
                Ok(e)
            }
            Some(t) => Err(format!("unexpected token {t:?}")),
            None => Err("unexpected end of input".into()),
        }
    }
}

pub fn parse_ratfunc(f: &FieldDesc, s: &str) -> Result<RatFunc, ModelError> {
    let err = |reason: String| ModelError::Parse { input: s.to_string(), reason };
    let toks = lex(s).map_err(err)?;
    if toks.is_empty() {
        return Err(err("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0, f };
    let v = p.expr().map_err(err)?;
    if p.pos != p.toks.len() {
        return Err(err(format!("trailing input at token {}", p.pos)));
    }
    Ok(v)
}

/// A closed point: `inf` or a monic irreducible polynomial.
pub fn parse_place(f: &FieldDesc, s: &str) -> Result<Place, ModelError> {
    let t = s.trim();
    if matches!(t, "inf" | "infinity" | "oo") {
        return Ok(Place::Infinity);
    }
    let r = parse_ratfunc(f, t)?;
    let err = |reason: &str| ModelError::Parse { input: s.to_string(), reason: reason.into() };
    if !r.is_poly() {
        return Err(err("a point must be a polynomial"));
    }
    let p = r.num().clone();
    if p.lc() != Fq::ONE {
        return Err(err("a point must be monic"));
    }
    if !p.is_irreducible(f) {
        return Err(err("a point must be irreducible"));
    }
    Ok(Place::Finite(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::field_make;

    #[test]
    fn parses_laurent_and_quotients() {
        let f = field_make(2, 1, None).unwrap();
        let a = parse_ratfunc(&f, "x^3 + x^-3").unwrap();
        assert_eq!(a.valuation(&f, &Place::Infinity), Some(-3));
        assert_eq!(a.valuation(&f, &Place::zero()), Some(-3));
        let b = parse_ratfunc(&f, "(x^2+1)/(x+1)").unwrap();
        assert_eq!(b, parse_ratfunc(&f, "x+1").unwrap());
        let c = parse_ratfunc(&f, "3x^2 - x").unwrap();
        assert_eq!(c, parse_ratfunc(&f, "x^2+x").unwrap());
        assert!(parse_ratfunc(&f, "x^").is_err());
        assert!(parse_ratfunc(&f, "y").is_err());
    }

    #[test]
    fn parses_generator_and_points() {
        let f = field_make(2, 2, None).unwrap();
        let a = parse_ratfunc(&f, "g*x + g^2").unwrap();
        let g = f.generator();
        assert_eq!(a.num().coeff(1), g);
        assert_eq!(a.num().coeff(0), f.mul(g, g));
        assert_eq!(parse_place(&f, "inf").unwrap(), Place::Infinity);
        assert!(parse_place(&f, "x^2+x+1").is_err());
        assert!(parse_place(&f, "x+g").is_ok());
    }
}
