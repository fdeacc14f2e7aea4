//! Text syntax for polynomials and rational functions in `y1, ..., yl`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary | atom)*      juxtaposition multiplies
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' '-'? integer)?
//! atom   := integer | 'y' index | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;

use super::poly::MultiPoly;
use super::rational::RationalFunction;
use super::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

pub fn parse_rational(input: &str, nvars: usize) -> Result<RationalFunction, ParseError> {
    let mut p = Parser { src: input.as_bytes(), pos: 0, nvars };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(value)
}

/// Parses a polynomial; division is allowed only by nonzero constants.
pub fn parse_poly(input: &str, nvars: usize) -> Result<MultiPoly, ParseError> {
    let r = parse_rational(input, nvars)?;
    if !r.denominator().is_one() {
        return Err(ParseError { position: 0, message: "expression is not a polynomial".into() });
    }
    Ok(r.numerator().clone())
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError { position: self.pos, message: message.to_string() }
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

    fn constant(&self, c: BigRational) -> RationalFunction {
        RationalFunction::constant(self.nvars, c)
    }

    fn expr(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalFunction, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc * self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let rhs = self.unary()?;
                    acc = acc
                        .try_div(&rhs)
                        .map_err(|_| ParseError { position: at, message: "division by zero".into() })?;
                }
                Some(c) if c == b'(' || c == b'y' || c.is_ascii_digit() => {
                    acc = acc * self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFunction, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let negative = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let at = self.pos;
        let e = self.integer()?;
        let e: i32 = e.try_into().map_err(|_| ParseError { position: at, message: "exponent too large".into() })?;
        let e = if negative { -e } else { e };
        base.try_powi(e).map_err(|_| ParseError { position: at, message: "zero raised to a negative power".into() })
    }

    fn atom(&mut self) -> Result<RationalFunction, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'y') => {
                self.pos += 1;
                let at = self.pos;
                let idx = self.integer()?;
                let idx: usize = idx
                    .try_into()
                    .ok()
                    .filter(|&i: &usize| i >= 1 && i <= self.nvars)
                    .ok_or_else(|| ParseError {
                        position: at,
                        message: format!("variable index must be in 1..={}", self.nvars),
                    })?;
                Ok(RationalFunction::var(self.nvars, idx - 1).expect("index checked"))
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(self.constant(BigRational::from_integer(v)))
            }
            Some(_) => Err(self.error("expected a number, a variable or '('")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("nonempty digit string"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_display() {
        for s in ["y1^2*y3 - 3/2*y2 + 1", "y3^2*y6*y8 + y3*y8 + 2*y3 + 1", "-y1 - 7"] {
            assert_eq!(parse_poly(s, 8).unwrap().to_string(), s);
        }
    }

    #[test]
    fn implicit_multiplication_and_negative_powers() {
        let a = parse_rational("2y1(y2+1)y3^-1", 3).unwrap();
        let b = parse_rational("(2*y1*y2 + 2*y1)/y3", 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(parse_poly("-y1^2", 1).unwrap().to_string(), "-y1^2");
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_poly("y9", 8).unwrap_err().position, 1);
        assert!(parse_poly("y1 +", 1).is_err());
        assert!(parse_poly("1/y1", 1).is_err());
        assert!(parse_rational("1/(y1-y1)", 1).is_err());
        assert!(parse_rational("(y1", 1).is_err());
    }
}
