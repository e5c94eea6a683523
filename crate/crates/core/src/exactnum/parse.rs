//! Parser for exact rational-function text such as `1/z^3 + (2/3)/(z - 1)`.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | variable | '(' expr ')'
//! ```
//!
//! Only integer literals are accepted; fractions are written as divisions.
//! The variable may be any identifier, but one text uses a single name.

use num_bigint::BigInt;

use super::{Poly, Rational, RationalFunction};
use crate::error::{Error, Result};

pub fn parse_rational_function(text: &str) -> Result<RationalFunction> {
    let mut p = Parser {
        chars: text.char_indices().collect(),
        pos: 0,
        var: None,
        text,
    };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    var: Option<String>,
    text: &'a str,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        let byte = self.chars.get(self.pos).map_or(self.text.len(), |c| c.0);
        let before = &self.text[..byte];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().unwrap_or("").chars().count() + 1;
        Error::Parse {
            line,
            column,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.1.is_whitespace())
        {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let at = self.pos;
            let rhs = self.unary()?;
            acc = if c == '*' {
                &acc * &rhs
            } else {
                acc.checked_div(&rhs).map_err(|_| {
                    self.pos = at;
                    self.error("division by zero")
                })?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let digits = self.take_while(|c| c.is_ascii_digit());
            if digits.is_empty() {
                self.pos = start;
                return Err(self.error("expected a non-negative integer exponent"));
            }
            let e: u32 = digits
                .parse()
                .map_err(|_| self.error("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let digits = self.take_while(|c| c.is_ascii_digit());
                let n: BigInt = digits.parse().unwrap();
                Ok(RationalFunction::constant(Rational::from(n)))
            }
            Some(c) if c.is_alphabetic() => {
                let start = self.pos;
                let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
                match &self.var {
                    Some(v) if *v != name => {
                        self.pos = start;
                        Err(self.error(&format!(
                            "variable {name:?} differs from earlier variable {v:?}"
                        )))
                    }
                    _ => {
                        self.var = Some(name);
                        Ok(RationalFunction::from_poly(Poly::x()))
                    }
                }
            }
            Some('.') => Err(self.error("decimal literals are not exact; write a fraction")),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(&(_, c)) = self.chars.get(self.pos) {
            if !f(c) {
                break;
            }
            s.push(c);
            self.pos += 1;
        }
        s
    }
}
