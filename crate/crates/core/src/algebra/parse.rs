//! Infix parser for rational expressions: `+ - * / ^`, parentheses, integer
//! literals and variable names.

use std::str::FromStr;

use super::rational::RationalExpression;
use super::var::Var;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RationalExpression, ParseError> {
        let mut acc = if self.eat(b'-') {
            -self.term()?
        } else {
            self.eat(b'+');
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalExpression, ParseError> {
        let mut acc = self.power()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.power()?;
            } else if self.eat(b'/') {
                let pos = self.pos;
                let d = self.power()?;
                acc = acc.checked_div(&d).map_err(|e| ParseError {
                    pos,
                    msg: e.to_string(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<RationalExpression, ParseError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let neg = self.eat(b'-');
        let pos = self.pos;
        let e = self.integer()?;
        let e: i32 = e.parse().map_err(|_| ParseError {
            pos,
            msg: "exponent too large".into(),
        })?;
        base.pow(if neg { -e } else { e }).map_err(|err| ParseError {
            pos,
            msg: err.to_string(),
        })
    }

    fn integer(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Result<RationalExpression, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.power()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let digits = self.integer()?;
                let n: num_bigint::BigInt = digits.parse().expect("digits");
                Ok(RationalExpression::constant(num_rational::BigRational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c >= 0x80 => {
                let start = self.pos;
                while self.pos < self.src.len() {
                    let b = self.src[self.pos];
                    if b.is_ascii_alphanumeric() || b == b'_' || b >= 0x80 {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match name.parse::<Var>() {
                    Ok(v) => Ok(RationalExpression::var(v)),
                    Err(_) => {
                        self.pos = start;
                        self.err(format!("unknown variable `{name}`"))
                    }
                }
            }
            _ => self.err("unexpected input"),
        }
    }
}

pub fn parse_expression(src: &str) -> Result<RationalExpression, ParseError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

impl FromStr for RationalExpression {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expression(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{c, v};

    #[test]
    fn precedence_and_powers() {
        let e: RationalExpression = "2*x^2*y - x^2/t + 1".parse().unwrap();
        let x = v(Var::X);
        let expected = &(&(&(&RationalExpression::int(2) * &(&x * &x)) * &v(Var::Y)) - &(&(&x * &x) / &v(Var::T)))
            + &RationalExpression::one();
        assert!(e.equals(&expected));
        let inv: RationalExpression = "z^-2".parse().unwrap();
        assert!(inv.equals(&(&RationalExpression::one() / &(&v(Var::Z) * &v(Var::Z)))));
        assert!("-(1/2)".parse::<RationalExpression>().unwrap().equals(&c(-1, 2)));
        assert!("alpha0 - -alpha1".parse::<RationalExpression>().unwrap().equals(&(&v(Var::alpha(0)) + &v(Var::alpha(1)))));
    }

    #[test]
    fn errors() {
        assert!("x +".parse::<RationalExpression>().is_err());
        assert!("foo".parse::<RationalExpression>().is_err());
        assert!("1/(x-x)".parse::<RationalExpression>().is_err());
        assert!("(x".parse::<RationalExpression>().is_err());
    }
}
