//! Recursive-descent parser for scalar literals.
//!
//! Grammar:
//!   expr    := term (('+' | '-') term)*
//!   term    := unary (('*' | '/') unary)*
//!   unary   := ('-' | '+')* primary
//!   primary := INT | DECIMAL | 'i' | 'zeta' '(' INT ')' ('^' ['-'] INT)?
//!            | '(' expr ')'
//!
//! Decimal literals (including scientific notation) are approx-mode only.

use super::{Scalar, ScalarField};
use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Zero};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Decimal(BigRational),
    Zeta,
    ImagUnit,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<Tok>> {
    let mut toks = vec![];
    let bytes: Vec<char> = text.chars().collect();
    let mut p = 0;
    while p < bytes.len() {
        let c = bytes[p];
        match c {
            ' ' | '\t' | '\n' | '\r' => p += 1,
            '+' => {
                toks.push(Tok::Plus);
                p += 1;
            }
            '-' => {
                toks.push(Tok::Minus);
                p += 1;
            }
            '*' => {
                toks.push(Tok::Star);
                p += 1;
            }
            '/' => {
                toks.push(Tok::Slash);
                p += 1;
            }
            '^' => {
                toks.push(Tok::Caret);
                p += 1;
            }
            '(' => {
                toks.push(Tok::LParen);
                p += 1;
            }
            ')' => {
                toks.push(Tok::RParen);
                p += 1;
            }
            '0'..='9' => {
                let start = p;
                while p < bytes.len() && bytes[p].is_ascii_digit() {
                    p += 1;
                }
                let mut is_decimal = false;
                if p < bytes.len() && bytes[p] == '.' {
                    is_decimal = true;
                    p += 1;
                    while p < bytes.len() && bytes[p].is_ascii_digit() {
                        p += 1;
                    }
                }
                // scientific exponent
                if p < bytes.len() && (bytes[p] == 'e' || bytes[p] == 'E') {
                    let mut q = p + 1;
                    if q < bytes.len() && (bytes[q] == '+' || bytes[q] == '-') {
                        q += 1;
                    }
                    if q < bytes.len() && bytes[q].is_ascii_digit() {
                        is_decimal = true;
                        p = q;
                        while p < bytes.len() && bytes[p].is_ascii_digit() {
                            p += 1;
                        }
                    }
                }
                let s: String = bytes[start..p].iter().collect();
                if is_decimal {
                    toks.push(Tok::Decimal(parse_decimal(&s)?));
                } else {
                    let v = s
                        .parse::<BigInt>()
                        .map_err(|_| Error::Parse(format!("bad integer `{s}`")))?;
                    toks.push(Tok::Int(v));
                }
            }
            'a'..='z' | 'A'..='Z' => {
                let start = p;
                while p < bytes.len() && bytes[p].is_ascii_alphabetic() {
                    p += 1;
                }
                let s: String = bytes[start..p].iter().collect();
                match s.as_str() {
                    "zeta" => toks.push(Tok::Zeta),
                    "i" => toks.push(Tok::ImagUnit),
                    _ => return Err(Error::Parse(format!("unknown symbol `{s}`"))),
                }
            }
            _ => return Err(Error::Parse(format!("unexpected character `{c}`"))),
        }
    }
    Ok(toks)
}

/// "12.5", "3e-4", "2.5e3" as an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    let digits = format!(
        "{}{}",
        if int_part.is_empty() { "0" } else { int_part },
        frac_part
    );
    let n = digits
        .parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("bad number `{s}`")))?;
    let shift = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(n);
    if shift >= 0 {
        r *= BigRational::from_integer(num::pow::pow(ten, shift as usize));
    } else {
        r /= BigRational::from_integer(num::pow::pow(ten, (-shift) as usize));
    }
    Ok(r)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    field: &'a ScalarField,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        match self.next() {
            Some(x) if x == t => Ok(()),
            other => Err(Error::Parse(format!("expected {t:?}, found {other:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Scalar> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Scalar> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = acc.div(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar> {
        let mut neg = false;
        loop {
            match self.peek() {
                Some(Tok::Minus) => {
                    neg = !neg;
                    self.pos += 1;
                }
                Some(Tok::Plus) => {
                    self.pos += 1;
                }
                _ => break,
            }
        }
        let v = self.primary()?;
        Ok(if neg { -v } else { v })
    }

    fn signed_int(&mut self) -> Result<BigInt> {
        let mut neg = false;
        while let Some(Tok::Minus) = self.peek() {
            neg = !neg;
            self.pos += 1;
        }
        match self.next() {
            Some(Tok::Int(v)) => Ok(if neg { -v } else { v }),
            other => Err(Error::Parse(format!("expected integer, found {other:?}"))),
        }
    }

    fn primary(&mut self) -> Result<Scalar> {
        match self.next() {
            Some(Tok::Int(v)) => {
                Ok(self
                    .field
                    .from_rational(BigRational::from_integer(v)))
            }
            Some(Tok::Decimal(r)) => {
                if self.field.is_exact() {
                    return Err(Error::DecimalInExactMode);
                }
                Ok(self.field.from_rational(r))
            }
            Some(Tok::ImagUnit) => self.field.imaginary_unit().map_err(|e| match e {
                Error::ConductorMismatch { conductor, .. } => Error::ConductorMismatch {
                    order: 4,
                    conductor,
                },
                e => e,
            }),
            Some(Tok::Zeta) => {
                self.expect(Tok::LParen)?;
                let ord = self.signed_int()?;
                self.expect(Tok::RParen)?;
                let order: u64 = ord
                    .try_into()
                    .ok()
                    .filter(|&v: &u64| v >= 1)
                    .ok_or_else(|| Error::Parse("zeta order must be a positive integer".into()))?;
                let mut power = BigInt::one();
                if let Some(Tok::Caret) = self.peek() {
                    self.pos += 1;
                    power = self.signed_int()?;
                }
                let p = num::Integer::mod_floor(&power, &BigInt::from(order)) ;
                let p: i64 = p.try_into().unwrap();
                self.field.root_of_unity(order, p)
            }
            Some(Tok::LParen) => {
                let v = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(v)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

pub fn parse_scalar(field: &ScalarField, text: &str) -> Result<Scalar> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty literal".into()));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        field,
    };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!(
            "trailing input after position {}",
            p.pos
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn basic_literals() {
        let f = ScalarField::exact(5).unwrap();
        let z2 = f.parse("zeta(5)^2").unwrap();
        assert_eq!(z2, f.root_of_unity(5, 2).unwrap());
        assert_eq!(f.parse("-1").unwrap(), f.integer(-1));
        assert_eq!(f.parse("3/6").unwrap(), f.rational(1, 2).unwrap());
        assert_eq!(
            f.parse("(1 + zeta(5)) * (1 - zeta(5))").unwrap(),
            &f.one() - &f.root_of_unity(5, 2).unwrap()
        );
    }

    #[test]
    fn conductor_mismatch_literal() {
        let f = ScalarField::exact(5).unwrap();
        match f.parse("1/2 + 3*zeta(12)") {
            Err(Error::ConductorMismatch { order: 12, conductor: 5 }) => {}
            other => panic!("expected conductor mismatch, got {other:?}"),
        }
    }

    #[test]
    fn decimals_only_in_approx() {
        let f = ScalarField::exact(5).unwrap();
        assert!(matches!(f.parse("0.5"), Err(Error::DecimalInExactMode)));
        let g = ScalarField::approx(64, None).unwrap();
        assert_eq!(g.parse("0.5").unwrap(), g.rational(1, 2).unwrap());
        assert_eq!(g.parse("2.5e2").unwrap(), g.integer(250));
        assert_eq!(g.parse("1e-2 * 100").unwrap(), g.one());
    }

    #[test]
    fn imaginary_unit_needs_four() {
        let f = ScalarField::exact(5).unwrap();
        assert!(f.parse("i").is_err());
        let g = ScalarField::exact(12).unwrap();
        let i = g.parse("i").unwrap();
        assert_eq!(&i * &i, g.integer(-1));
    }

    #[test]
    fn negative_zeta_power() {
        let f = ScalarField::exact(7).unwrap();
        let a = f.parse("zeta(7)^-2").unwrap();
        let b = f.root_of_unity(7, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn division_by_zero_literal() {
        let f = ScalarField::exact(3).unwrap();
        assert!(matches!(f.parse("1/0"), Err(Error::DivisionByZero)));
    }
}
