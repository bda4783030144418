//! Recursive-descent parser for coordinate expressions.
//!
//! Grammar:
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | atom ('^' factor)?
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! parses as `-(x^2)`. Numbers are decimal with an optional exponent.
//! The identifier `pi` is a reserved constant.

use super::ast::{BinOp, CoordExpr, Func, NamedConst};
use crate::error::{Error, Result};

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    chart: &'a [String],
}

/// Parse `text` against the coordinate names of `chart`.
pub fn parse_expr(text: &str, chart: &[String]) -> Result<CoordExpr> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        chart,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<CoordExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                lhs = CoordExpr::bin(BinOp::Add, lhs, rhs);
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                lhs = CoordExpr::bin(BinOp::Sub, lhs, rhs);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<CoordExpr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.factor()?;
                lhs = CoordExpr::bin(BinOp::Mul, lhs, rhs);
            } else if self.eat(b'/') {
                let rhs = self.factor()?;
                lhs = CoordExpr::bin(BinOp::Div, lhs, rhs);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<CoordExpr> {
        if self.eat(b'-') {
            let inner = self.factor()?;
            return Ok(CoordExpr::Neg(Box::new(inner)));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let exponent = self.factor()?;
            return Ok(CoordExpr::bin(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<CoordExpr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(_) => Err(self.err("expected a number, identifier or `(`")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<CoordExpr> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
                return Err(self.err("expected digits after decimal point"));
            }
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                // not an exponent after all (e.g. `2*exp(x)` split oddly)
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii slice");
        let value: f64 = text.parse().map_err(|_| Error::Parse {
            offset: start,
            message: format!("invalid number literal `{text}`"),
        })?;
        self.skip_ws();
        Ok(CoordExpr::Num(value))
    }

    fn ident(&mut self) -> Result<CoordExpr> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("ascii slice")
            .to_string();
        self.skip_ws();
        if self.peek() == Some(b'(') {
            let Some(func) = Func::from_name(&name) else {
                return Err(Error::UnknownIdentifier {
                    name,
                    offset: start,
                });
            };
            self.pos += 1;
            self.skip_ws();
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)` closing function call"));
            }
            return Ok(CoordExpr::Call(func, Box::new(arg)));
        }
        if name == "pi" {
            return Ok(CoordExpr::Const(NamedConst::Pi));
        }
        if let Some(i) = self.chart.iter().position(|n| n == &name) {
            return Ok(CoordExpr::Coord(i));
        }
        if Func::from_name(&name).is_some() {
            return Err(Error::ArityMismatch {
                name,
                offset: start,
                expected: 1,
            });
        }
        Err(Error::UnknownIdentifier {
            name,
            offset: start,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn precedence_and_associativity() {
        let c = chart(&["x", "y"]);
        let e = parse_expr("x + y * x ^ 2 ^ 3", &c).unwrap();
        // x + (y * (x ^ (2 ^ 3)))
        let expected = CoordExpr::bin(
            BinOp::Add,
            CoordExpr::coord(0),
            CoordExpr::bin(
                BinOp::Mul,
                CoordExpr::coord(1),
                CoordExpr::bin(
                    BinOp::Pow,
                    CoordExpr::coord(0),
                    CoordExpr::bin(BinOp::Pow, CoordExpr::num(2.0), CoordExpr::num(3.0)),
                ),
            ),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn unary_minus_binds_looser_than_pow() {
        let c = chart(&["x"]);
        let e = parse_expr("-x^2", &c).unwrap();
        assert_eq!(
            e,
            CoordExpr::Neg(Box::new(CoordExpr::bin(
                BinOp::Pow,
                CoordExpr::coord(0),
                CoordExpr::num(2.0)
            )))
        );
    }

    #[test]
    fn unbalanced_paren_offset() {
        let c = chart(&["x", "y"]);
        let err = parse_expr("x*(y", &c).unwrap_err();
        match err {
            Error::Parse { offset, .. } => assert_eq!(offset, 4),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn stray_operator_offset() {
        let c = chart(&["x", "y"]);
        let err = parse_expr("x +* y", &c).unwrap_err();
        match err {
            Error::Parse { offset, .. } => assert_eq!(offset, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier() {
        let c = chart(&["x"]);
        match parse_expr("x + w", &c).unwrap_err() {
            Error::UnknownIdentifier { name, offset } => {
                assert_eq!(name, "w");
                assert_eq!(offset, 4);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn function_without_call_is_arity_error() {
        let c = chart(&["x"]);
        match parse_expr("sin + x", &c).unwrap_err() {
            Error::ArityMismatch { name, .. } => assert_eq!(name, "sin"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn pi_constant() {
        let e = parse_expr("pi/2", &[]).unwrap();
        assert_eq!(
            e,
            CoordExpr::bin(
                BinOp::Div,
                CoordExpr::Const(NamedConst::Pi),
                CoordExpr::num(2.0)
            )
        );
    }

    #[test]
    fn render_round_trip() {
        let c = chart(&["x", "y", "z"]);
        for src in [
            "x + y*z - 2",
            "-x^2 + (x - y)^(z + 1)",
            "sin(x)^2 + cos(y)*exp(-z)",
            "x/(y/z)/2",
            "--x - -y",
            "1.5e-3*x + 2E+2",
            "sqrt(x^2 + 1) - log(exp(y))",
        ] {
            let ast = parse_expr(src, &c).unwrap();
            let rendered = ast.render(&c);
            let reparsed = parse_expr(&rendered, &c).unwrap();
            assert_eq!(ast, reparsed, "round trip failed for `{src}` -> `{rendered}`");
        }
    }
}
