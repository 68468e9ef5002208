//! Text notation for baskets and exact rationals.
//!
//! Basket grammar (whitespace-insensitive):
//!
//! ```text
//! basket   := "{" entry ("," entry)* "}" | "{}"
//! entry    := [ count ("*" | "x") ] "(" b "," r ")"
//! rational := int | int "/" int
//! ```
//!
//! `5*(1,2)` and `5x(1,2)` are both accepted on input; the printer always
//! emits `*`.  Printing a parsed basket reproduces the canonical text
//! exactly (round-trip identity on canonical form).

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::basket::{Basket, BasketError, BasketPoint};
use crate::Rat;

/// Parse errors with byte positions into the input.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("at byte {pos}: expected {expected}")]
    Expected { pos: usize, expected: String },
    #[error("at byte {pos}: {source}")]
    Invalid {
        pos: usize,
        #[source]
        source: BasketError,
    },
    #[error("at byte {pos}: trailing input")]
    Trailing { pos: usize },
}

struct Cursor<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { text: text.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::Expected {
                pos: self.pos,
                expected: format!("'{}'", c as char),
            })
        }
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(ParseError::Expected { pos: start, expected: "integer".into() })
    }

    fn done(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        if self.pos == self.text.len() {
            Ok(())
        } else {
            Err(ParseError::Trailing { pos: self.pos })
        }
    }
}

/// Parses basket notation into canonical form.
pub fn parse_basket(text: &str) -> Result<Basket, ParseError> {
    let mut cur = Cursor::new(text);
    let basket = parse_basket_at(&mut cur)?;
    cur.done()?;
    Ok(basket)
}

fn parse_basket_at(cur: &mut Cursor) -> Result<Basket, ParseError> {
    cur.eat(b'{')?;
    let mut points: Vec<BasketPoint> = Vec::new();
    if cur.peek() == Some(b'}') {
        cur.pos += 1;
        return Ok(Basket::empty());
    }
    loop {
        let (count, b, r) = parse_entry(cur)?;
        let pos = cur.pos;
        let point = BasketPoint::normalize(b, r)
            .map_err(|source| ParseError::Invalid { pos, source })?;
        for _ in 0..count {
            points.push(point);
        }
        match cur.peek() {
            Some(b',') => {
                cur.pos += 1;
            }
            Some(b'}') => {
                cur.pos += 1;
                break;
            }
            _ => {
                return Err(ParseError::Expected { pos: cur.pos, expected: "',' or '}'".into() })
            }
        }
    }
    Ok(Basket::from_points(points))
}

fn parse_entry(cur: &mut Cursor) -> Result<(u32, i64, i64), ParseError> {
    let count = if cur.peek().is_some_and(|c| c.is_ascii_digit()) {
        let n = cur.integer()?;
        // multiplicity prefix: `n*` or `nx`
        match cur.peek() {
            Some(b'*') | Some(b'x') => {
                cur.pos += 1;
                if n < 1 {
                    return Err(ParseError::Expected {
                        pos: cur.pos,
                        expected: "positive multiplicity".into(),
                    });
                }
                n as u32
            }
            _ => {
                return Err(ParseError::Expected {
                    pos: cur.pos,
                    expected: "'*' or 'x' after multiplicity".into(),
                })
            }
        }
    } else {
        1
    };
    cur.eat(b'(')?;
    let b = cur.integer()?;
    cur.eat(b',')?;
    let r = cur.integer()?;
    cur.eat(b')')?;
    Ok((count, b, r))
}

/// Prints a basket in canonical notation (inverse of [`parse_basket`] on
/// canonical text).
pub fn format_basket(b: &Basket) -> String {
    b.to_string()
}

/// Parses an exact rational `p` or `p/q`.
pub fn parse_rational(text: &str) -> Result<Rat, ParseError> {
    let mut cur = Cursor::new(text);
    let r = parse_rational_at(&mut cur)?;
    cur.done()?;
    Ok(r)
}

fn parse_rational_at(cur: &mut Cursor) -> Result<Rat, ParseError> {
    let p = cur.integer()?;
    let q = if cur.peek() == Some(b'/') {
        cur.pos += 1;
        cur.integer()?
    } else {
        1
    };
    if q == 0 {
        return Err(ParseError::Expected { pos: cur.pos, expected: "nonzero denominator".into() });
    }
    Ok(Rat::new(BigInt::from(p), BigInt::from(q)))
}

/// Prints a rational as `p/q` (or `p` when integral), `q > 0`, lowest terms.
pub fn format_rational(r: &Rat) -> String {
    // BigRational normalizes to a positive denominator in lowest terms.
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
