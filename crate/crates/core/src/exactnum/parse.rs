//! Coefficient strings: `coeff := term (('+'|'-') term)*`,
//! `term := rational ('*' 'z^' uint)? | 'z^' uint | 'z'`,
//! `rational := ['-'] uint ('/' uint)?`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{CycloContext, CycloNum, Rational};
use crate::error::{Error, Result};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    src: &'a str,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn fail(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in {:?}", self.pos, self.src))
    }

    fn uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.fail("expected digits"));
        }
        Ok(self.src[start..self.pos]
            .parse()
            .expect("digits parse as an integer"))
    }

    fn power(&mut self) -> Result<usize> {
        if !self.eat(b'z') {
            return Err(self.fail("expected 'z'"));
        }
        if self.eat(b'^') {
            let p = self.uint()?;
            usize::try_from(p).map_err(|_| self.fail("exponent too large"))
        } else {
            Ok(1)
        }
    }

    fn rational(&mut self) -> Result<Rational> {
        let neg = self.eat(b'-');
        let num = self.uint()?;
        let den = if self.eat(b'/') {
            self.uint()?
        } else {
            BigInt::one()
        };
        if den.is_zero() {
            return Err(self.fail("zero denominator"));
        }
        let num = if neg { -num } else { num };
        Ok(Rational::new(num, den))
    }

    fn term(&mut self) -> Result<(Rational, usize)> {
        if self.peek() == Some(b'z') {
            return Ok((Rational::one(), self.power()?));
        }
        let r = self.rational()?;
        if self.eat(b'*') {
            let p = self.power()?;
            Ok((r, p))
        } else {
            Ok((r, 0))
        }
    }
}

/// Parse a rational of the form `[-]p[/q]`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut cur = Cursor {
        bytes: compact.as_bytes(),
        pos: 0,
        src: &compact,
    };
    let r = cur.rational()?;
    if cur.pos != compact.len() {
        return Err(cur.fail("trailing input"));
    }
    Ok(r)
}

/// Parse a coefficient string into an element of the given field; powers of
/// `z` at or above φ(L) are reduced modulo Φ_L.
pub fn parse_coeff(ctx: &Arc<CycloContext>, s: &str) -> Result<CycloNum> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut cur = Cursor {
        bytes: compact.as_bytes(),
        pos: 0,
        src: &compact,
    };
    let mut coeffs: Vec<Rational> = Vec::new();
    let add = |coeffs: &mut Vec<Rational>, (r, p): (Rational, usize), neg: bool| {
        if coeffs.len() <= p {
            coeffs.resize(p + 1, Rational::zero());
        }
        if neg {
            coeffs[p] -= r;
        } else {
            coeffs[p] += r;
        }
    };
    let first = cur.term()?;
    add(&mut coeffs, first, false);
    while let Some(b) = cur.peek() {
        let neg = match b {
            b'+' => false,
            b'-' => true,
            _ => return Err(cur.fail("expected '+' or '-'")),
        };
        cur.pos += 1;
        let t = cur.term()?;
        add(&mut coeffs, t, neg);
    }
    Ok(CycloNum::from_coeffs(ctx, &coeffs))
}
