//! Recursive-descent parser for the function DSL:
//!
//! ```text
//! expr   := term { "+" term } ;
//! term   := [ coeff "*" ] atom ;
//! atom   := "sin2" | "cos2" | "pow(" number ")" ;
//! ```

use super::decimal::Decimal;
use super::expr::FunctionExpr;
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<Decimal> {
        self.skip_ws();
        let start = self.pos;
        let len = self.src[start..]
            .find(|c: char| !(c.is_ascii_digit() || c == '.'))
            .unwrap_or(self.src.len() - start);
        if len == 0 {
            return self.err("expected a number");
        }
        self.pos += len;
        self.src[start..self.pos].parse().or_else(|e: String| {
            self.pos = start;
            self.err(e)
        })
    }

    fn atom(&mut self) -> Result<FunctionExpr> {
        if self.eat("sin2") {
            Ok(FunctionExpr::Sin2)
        } else if self.eat("cos2") {
            Ok(FunctionExpr::Cos2)
        } else if self.eat("pow(") {
            let d = self.number()?;
            if !self.eat(")") {
                return self.err("expected ')'");
            }
            Ok(FunctionExpr::Pow(d))
        } else {
            self.skip_ws();
            self.err("expected sin2, cos2 or pow(...)")
        }
    }

    fn term(&mut self) -> Result<FunctionExpr> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            let c = self.number()?;
            if !self.eat("*") {
                return self.err("expected '*' after coefficient");
            }
            let a = self.atom()?;
            Ok(FunctionExpr::Scale(c, Box::new(a)))
        } else {
            self.atom()
        }
    }

    fn expr(&mut self) -> Result<FunctionExpr> {
        let mut terms = vec![self.term()?];
        while self.eat("+") {
            terms.push(self.term()?);
        }
        self.skip_ws();
        if self.pos != self.src.len() {
            return self.err("unexpected trailing input");
        }
        Ok(if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            FunctionExpr::Sum(terms)
        })
    }
}

/// Parses and validates a DSL expression.
pub fn parse_function(text: &str) -> Result<FunctionExpr> {
    let f = Parser { src: text, pos: 0 }.expr()?;
    f.validate()?;
    Ok(f)
}
