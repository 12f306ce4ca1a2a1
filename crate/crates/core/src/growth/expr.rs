//! A tiny recursive-descent parser for growth-function expressions in `r`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' base)?
//! base   := number | 'r' | '(' expr ')' | func '(' expr ')'
//! func   := 'exp' | 'log' | 'sqrt'
//! ```

use std::fmt;

use thiserror::Error;

use crate::numerics::log_add_exp;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at position {position}: found {found}, expected one of {}", expected.join(", "))]
pub struct ParseError {
    pub position: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(x) => write!(f, "number {x}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Sym(c) => write!(f, "'{c}'"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let value = text.parse::<f64>().map_err(|_| ParseError {
                position: start,
                found: format!("'{text}'"),
                expected: vec!["number"],
            })?;
            out.push((start, Tok::Num(value)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(ParseError {
                position: i,
                found: format!("'{c}'"),
                expected: vec!["number", "'r'", "'('", "operator"],
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

const BASE_START: &[&str] = &["number", "'r'", "'('", "'exp'", "'log'", "'sqrt'"];

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        match self.toks.get(self.pos) {
            Some((p, t)) => ParseError { position: *p, found: t.to_string(), expected },
            // end of input is reported at the last token consumed
            None => ParseError {
                position: self.toks.last().map_or(0, |(p, _)| *p),
                found: "end of input".to_string(),
                expected,
            },
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.eat('^') {
            let exponent = self.base()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(x)) => {
                self.pos += 1;
                Ok(Expr::Num(x))
            }
            Some(Tok::Ident(name)) => {
                let func = match name.as_str() {
                    "r" => {
                        self.pos += 1;
                        return Ok(Expr::Var);
                    }
                    "exp" => Func::Exp,
                    "log" => Func::Log,
                    "sqrt" => Func::Sqrt,
                    _ => return Err(self.error(BASE_START.to_vec())),
                };
                self.pos += 1;
                if !self.eat('(') {
                    return Err(self.error(vec!["'('"]));
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error(vec!["')'", "operator"]));
                }
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error(vec!["')'", "operator"]));
                }
                Ok(inner)
            }
            _ => Err(self.error(BASE_START.to_vec())),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.error(vec!["operator", "end of input"]));
    }
    Ok(e)
}

impl Expr {
    /// Plain evaluation.
    pub fn value(&self, r: f64) -> f64 {
        match self {
            Expr::Num(x) => *x,
            Expr::Var => r,
            Expr::Add(a, b) => a.value(r) + b.value(r),
            Expr::Sub(a, b) => a.value(r) - b.value(r),
            Expr::Mul(a, b) => a.value(r) * b.value(r),
            Expr::Div(a, b) => a.value(r) / b.value(r),
            Expr::Pow(a, b) => a.value(r).powf(b.value(r)),
            Expr::Call(Func::Exp, a) => a.value(r).exp(),
            Expr::Call(Func::Log, a) => a.value(r).ln(),
            Expr::Call(Func::Sqrt, a) => a.value(r).sqrt(),
        }
    }

    /// Natural log of the value, computed without forming the value where the
    /// structure allows it. `None` when the value is not positive.
    pub fn ln_value(&self, r: f64) -> Option<f64> {
        let direct = match self {
            Expr::Call(Func::Exp, a) => Some(a.value(r)),
            Expr::Call(Func::Sqrt, a) => a.ln_value(r).map(|l| 0.5 * l),
            Expr::Mul(a, b) => a.ln_value(r).zip(b.ln_value(r)).map(|(x, y)| x + y),
            Expr::Div(a, b) => a.ln_value(r).zip(b.ln_value(r)).map(|(x, y)| x - y),
            Expr::Add(a, b) => a.ln_value(r).zip(b.ln_value(r)).map(|(x, y)| log_add_exp(x, y)),
            Expr::Pow(a, b) => a.ln_value(r).map(|l| l * b.value(r)),
            _ => None,
        };
        match direct {
            Some(l) if !l.is_nan() => Some(l),
            _ => {
                let v = self.value(r);
                (v > 0.0).then(|| v.ln())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_precedence() {
        let e = parse("1 + 2*r^2").unwrap();
        assert_eq!(e.value(3.0), 19.0);
        let e = parse("2^3^1").unwrap_err();
        assert_eq!(e.position, 3);
        let e = parse("(1+r)*(1+r)").unwrap();
        assert_eq!(e.value(2.0), 9.0);
        let e = parse("exp(1.5*r^(2/3))").unwrap();
        assert!((e.value(8.0) - 6f64.exp()).abs() < 1e-12);
        assert!((e.ln_value(8.0).unwrap() - 6.0).abs() < 1e-14);
    }

    #[test]
    fn numbers_with_exponents() {
        assert_eq!(parse("1.5e2").unwrap().value(0.0), 150.0);
        assert_eq!(parse("2E-1*r").unwrap().value(10.0), 2.0);
    }

    #[test]
    fn unterminated_group_position() {
        let e = parse("exp(r)+ (").unwrap_err();
        assert_eq!(e.position, 8);
        assert_eq!(e.found, "end of input");
        assert!(e.expected.contains(&"'r'"));
    }

    #[test]
    fn unknown_identifier_and_character() {
        let e = parse("sin(r)").unwrap_err();
        assert_eq!(e.position, 0);
        let e = parse("r % 2").unwrap_err();
        assert_eq!(e.position, 2);
        let e = parse("r r").unwrap_err();
        assert_eq!(e.position, 2);
    }

    #[test]
    fn log_path_avoids_overflow() {
        let e = parse("exp(r)*exp(r)+exp(2*r)").unwrap();
        let l = e.ln_value(1000.0).unwrap();
        assert!((l - (2000.0 + 2f64.ln())).abs() < 1e-9);
        let e = parse("r^2 - 100").unwrap();
        assert_eq!(e.ln_value(1.0), None);
    }
}
