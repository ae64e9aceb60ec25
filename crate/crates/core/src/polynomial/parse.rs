//! Recursive-descent parser for the polynomial expression grammar:
//!
//! ```text
//! poly   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor (('*'? factor) | ('/' UINT))*
//! factor := atom ('^' UINT)?
//! atom   := UINT | 'n' | 'binom' '(' poly ',' UINT ')' | '(' poly ')'
//! ```
//!
//! Juxtaposition (`2n`, `3n^2`) multiplies. Division by an integer literal
//! (`1/2`, `n(n-1)/2`) is accepted as long as the final polynomial is
//! integer valued.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{IntegralPolynomial, IntegralityError, RationalPolynomial};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error(transparent)]
    NotIntegral(#[from] IntegralityError),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self { src: text.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
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

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn uint(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("ascii digits parse"))
    }

    fn small_uint(&mut self, what: &str) -> Result<usize, ParseError> {
        let pos = self.pos;
        let v = self.uint()?;
        v.to_usize().filter(|&k| k <= 4096).ok_or(ParseError::Syntax {
            pos,
            message: format!("{what} too large"),
        })
    }

    fn poly(&mut self) -> Result<RationalPolynomial, ParseError> {
        let negate_first = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let mut acc = self.term()?;
        if negate_first {
            acc = -&acc;
        }
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

    fn starts_factor(&mut self) -> bool {
        match self.peek() {
            Some(c) => c.is_ascii_digit() || c == b'n' || c == b'b' || c == b'(',
            None => false,
        }
    }

    fn term(&mut self) -> Result<RationalPolynomial, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'/') {
                let den_pos = self.pos;
                let den = self.uint()?;
                if den.is_zero() {
                    self.pos = den_pos;
                    return self.err("division by zero");
                }
                acc = acc.scale(&BigRational::new(BigInt::from(1), den));
            } else if self.eat(b'*') || self.starts_factor() {
                acc = &acc * &self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<RationalPolynomial, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.small_uint("exponent")?;
            return Ok(base.pow(exp as u32));
        }
        Ok(base)
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(word.as_bytes()) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn atom(&mut self) -> Result<RationalPolynomial, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                Ok(RationalPolynomial::constant(BigRational::from_integer(self.uint()?)))
            }
            Some(b'n') => {
                self.pos += 1;
                Ok(RationalPolynomial::identity())
            }
            Some(b'b') => {
                if !self.keyword("binom") {
                    return self.err("unknown identifier");
                }
                self.expect(b'(')?;
                let inner = self.poly()?;
                self.expect(b',')?;
                let k = self.small_uint("binomial index")?;
                self.expect(b')')?;
                Ok(inner.binomial(k))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.poly()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses an expression into an exact rational polynomial without the
/// integrality check.
pub fn parse_rational_poly(text: &str) -> Result<RationalPolynomial, ParseError> {
    let mut parser = Parser::new(text);
    let p = parser.poly()?;
    if parser.peek().is_some() {
        return parser.err("trailing input");
    }
    Ok(p)
}

pub fn parse_poly(text: &str) -> Result<IntegralPolynomial, ParseError> {
    let p = parse_rational_poly(text)?;
    Ok(IntegralPolynomial::from_monomial(&p)?)
}

/// Comma-separated list of polynomials (`"n, 2n, n^2"`); commas inside
/// `binom(…, k)` are not separators.
pub fn parse_family(text: &str) -> Result<Vec<IntegralPolynomial>, ParseError> {
    let mut parser = Parser::new(text);
    let mut out = Vec::new();
    loop {
        let p = parser.poly()?;
        out.push(IntegralPolynomial::from_monomial(&p)?);
        if parser.eat(b',') {
            continue;
        }
        if parser.peek().is_some() {
            return parser.err("expected ',' or end of input");
        }
        return Ok(out);
    }
}
