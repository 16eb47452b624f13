//! Plain-text polynomial format: `x1*y1*x2*y2 - x2*y1*x1*y2`, `3/2*z*x1`, `1`.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Domain, Scalar};

use super::poly::Poly;
use super::word::{Var, Word};

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let one = Scalar::one(self.domain());
        for (i, (w, c)) in self.terms().enumerate() {
            // Signed printing only makes sense over Q; residues print as-is.
            let negative = self.domain() == Domain::Rational && crate::scalar::sign(c) < 0;
            let mag = if negative { -c } else { c.clone() };
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if w.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == one {
                write!(f, "{w}")?;
            } else {
                write!(f, "{mag}*{w}")?;
            }
        }
        Ok(())
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    /// A coefficient `n` or `n/m` (no sign).
    fn coefficient(&mut self, domain: Domain) -> Result<Scalar> {
        let start = self.pos;
        let num = self.digits();
        if num.is_empty() {
            return Err(self.err("expected a number"));
        }
        let text = if self.eat('/') {
            self.skip_ws();
            let den = self.digits();
            if den.is_empty() {
                return Err(self.err("expected a denominator"));
            }
            format!("{num}/{den}")
        } else {
            num.to_string()
        };
        Scalar::parse(&text, domain).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                offset: start,
                message,
            },
            other => other,
        })
    }

    fn var(&mut self) -> Result<Var> {
        self.skip_ws();
        let c = self.peek().ok_or_else(|| self.err("expected a variable"))?;
        if c == 'z' {
            self.pos += 1;
            if matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                return Err(self.err("`z` carries no index"));
            }
            return Ok(Var::z());
        }
        let make: fn(u32) -> Var = match c {
            'x' => Var::x,
            'y' => Var::y,
            't' => Var::t,
            _ => return Err(self.err(format!("unexpected character `{c}`"))),
        };
        self.pos += 1;
        let idx = self.digits();
        if idx.is_empty() {
            return Err(self.err("variable needs an index"));
        }
        let i: u32 = idx.parse().map_err(|_| self.err("variable index too large"))?;
        if i >= 1 << 28 {
            return Err(self.err("variable index too large"));
        }
        Ok(make(i))
    }
}

/// Parses the text format. `0` and the empty string both denote zero.
pub fn parse_poly(src: &str, domain: Domain) -> Result<Poly> {
    let mut lx = Lexer { src, pos: 0 };
    let mut out = Poly::zero(domain);
    lx.skip_ws();
    if lx.peek().is_none() {
        return Ok(out);
    }
    let mut first = true;
    loop {
        lx.skip_ws();
        let mut negative = false;
        if lx.eat('-') {
            negative = true;
        } else if lx.eat('+') {
        } else if !first {
            return Err(lx.err("expected `+` or `-`"));
        }
        first = false;
        lx.skip_ws();

        let mut coeff = Scalar::one(domain);
        let mut word = Word::empty();
        let mut need_factor = true;
        if matches!(lx.peek(), Some(c) if c.is_ascii_digit()) {
            coeff = lx.coefficient(domain)?;
            need_factor = false;
            if lx.eat('*') {
                need_factor = true;
            }
        }
        if need_factor {
            word.push(lx.var()?);
            while lx.eat('*') {
                word.push(lx.var()?);
            }
        }
        if negative {
            coeff = -coeff;
        }
        out.add_term(word, coeff);

        lx.skip_ws();
        if lx.peek().is_none() {
            break;
        }
    }
    Ok(out)
}
