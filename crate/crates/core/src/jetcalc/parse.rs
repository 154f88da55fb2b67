//! A small text syntax for differential polynomials.
//!
//! Accepted tokens: rationals (`3`, `1/2` via division), `w[α,n]` / `v[α,n]`
//! jets, `v[α]` / `w[α]` for order 0, the shorthands `v`, `w` (color 1,
//! order 0) and `v1`, `v2`, ... (order-0 jets of colors 1, 2, ...), and the
//! operators `+ - * / ^` with parentheses. Division is by constants only;
//! negative powers are allowed on single jet monomials of order >= 1.

use num_traits::{One, Zero};

use super::monomial::{Jet, Monomial};
use super::poly::JetPoly;
use crate::error::JetError;
use crate::Rational;

pub fn parse_poly(src: &str) -> Result<JetPoly, JetError> {
    let mut p = Parser {
        chars: src.chars().collect(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err(&self, msg: &str) -> JetError {
        JetError::Parse(format!("{msg} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), JetError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<JetPoly, JetError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc += self.term()?;
            } else if self.eat('-') {
                acc -= &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<JetPoly, JetError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                let c = d
                    .as_constant()
                    .filter(|c| !c.is_zero())
                    .ok_or_else(|| self.err("division by a non-constant or zero"))?;
                acc = acc.scale(&c.recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<JetPoly, JetError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<JetPoly, JetError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        let e = self.integer()?;
        let e = i32::try_from(e).map_err(|_| self.err("exponent too large"))?;
        if !neg {
            return Ok(base.pow(e as u32));
        }
        invert_power(&base, e).ok_or_else(|| self.err("negative power of a non-monomial or order-0 jet"))
    }

    fn integer(&mut self) -> Result<u64, JetError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("integer overflow"))
    }

    fn atom(&mut self) -> Result<JetPoly, JetError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                self.skip_ws();
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                let n: num_bigint::BigInt = s.parse().map_err(|_| self.err("bad number"))?;
                Ok(JetPoly::constant(Rational::from_integer(n)))
            }
            Some('v') | Some('w') => {
                self.pos += 1;
                let (color, order) = if self.eat('[') {
                    let a = self.integer()? as usize;
                    let n = if self.eat(',') { self.integer()? as usize } else { 0 };
                    self.expect(']')?;
                    (a, n)
                } else if self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
                    (self.integer()? as usize, 0)
                } else {
                    (1, 0)
                };
                if color == 0 {
                    return Err(self.err("colors are 1-based"));
                }
                Ok(JetPoly::var(color, order))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

fn invert_power(base: &JetPoly, e: i32) -> Option<JetPoly> {
    let mut it = base.terms();
    let (m, c) = it.next()?;
    if it.next().is_some() || m.is_one() {
        return None;
    }
    if m.jets().any(|j: Jet| j.order == 0) {
        return None;
    }
    let inv = Monomial::from_factors(m.factors().map(|(j, k)| (j, -k * e)));
    let mut coeff = Rational::one();
    let cinv = c.recip();
    for _ in 0..e {
        coeff *= &cinv;
    }
    Some(JetPoly::term(coeff, inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_kdv_hessian_style() {
        let p = parse_poly("v^2/2 + 1/12*w[1,2]").unwrap();
        assert_eq!(p.to_string(), "1/2*w[1,0]^2 + 1/12*w[1,2]");
        let q = parse_poly("v1*v2 - (v[2])^3").unwrap();
        assert_eq!(q.to_string(), "w[1,0]*w[2,0] - w[2,0]^3");
    }

    #[test]
    fn roundtrips_display() {
        let p = parse_poly("w[1,3]*w[1,1]^-1 - w[1,2]^2*w[1,1]^-2 + 7/3").unwrap();
        assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_poly("v^-1").is_err());
        assert!(parse_poly("1/v").is_err());
        assert!(parse_poly("w[0,1]").is_err());
        assert!(parse_poly("v +").is_err());
    }
}
