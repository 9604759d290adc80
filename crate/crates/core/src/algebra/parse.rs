//! Recursive-descent parser for the polynomial grammar:
//! identifiers, integer and `a/b` literals, `+ - * ^`, parentheses.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::poly::{Chart, Coeff, Polynomial};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(Coeff),
    Int(u32),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |t: Tok| {
            out.push(Token {
                tok: t,
                line: l0,
                column: c0,
            })
        };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
                continue;
            }
            '+' => push(Tok::Plus),
            '-' => push(Tok::Minus),
            '*' => push(Tok::Star),
            '^' => push(Tok::Caret),
            '(' => push(Tok::LParen),
            ')' => push(Tok::RParen),
            ',' => push(Tok::Comma),
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let num: String = chars[start..i].iter().collect();
                let mut value = BigRational::from_integer(num.parse::<BigInt>().unwrap());
                let mut small = num.parse::<u32>().ok();
                if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                    let s2 = i + 1;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let den: String = chars[s2..i].iter().collect();
                    let den = den.parse::<BigInt>().unwrap();
                    if den == BigInt::from(0) {
                        return Err(Error::Parse {
                            line,
                            column: col,
                            message: "zero denominator".into(),
                        });
                    }
                    value /= BigRational::from_integer(den);
                    small = None;
                }
                col += i - start;
                out.push(Token {
                    tok: match small {
                        Some(k) => Tok::Int(k),
                        None => Tok::Num(value),
                    },
                    line: l0,
                    column: c0,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Token {
                    tok: Tok::Ident(name),
                    line: l0,
                    column: c0,
                });
                continue;
            }
            other => {
                return Err(Error::Parse {
                    line,
                    column: col,
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
        i += 1;
        col += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    chart: &'a Chart,
    end: (usize, usize),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|t| (t.line, t.column))
            .unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.here();
        Err(Error::Parse {
            line,
            column,
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.peek() {
                Some(Tok::Int(k)) => {
                    let k = *k;
                    self.pos += 1;
                    if k > 1024 {
                        return self.err("exponent too large");
                    }
                    Ok(base.pow(k))
                }
                _ => self.err("expected a non-negative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek().cloned() {
            Some(Tok::Int(k)) => {
                self.pos += 1;
                Ok(Polynomial::constant(self.chart, Coeff::from_integer(k.into())))
            }
            Some(Tok::Num(c)) => {
                self.pos += 1;
                Ok(Polynomial::constant(self.chart, c))
            }
            Some(Tok::Ident(name)) => match self.chart.index(&name) {
                Some(i) => {
                    self.pos += 1;
                    Ok(Polynomial::var(self.chart, i))
                }
                None => self.err(format!("unknown coordinate {name:?}")),
            },
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => self.err("expected ')'"),
                }
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

fn end_position(text: &str) -> (usize, usize) {
    let line = text.matches('\n').count() + 1;
    let col = text.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    (line, col)
}

pub fn parse_polynomial(chart: &Chart, text: &str) -> Result<Polynomial> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        chart,
        end: end_position(text),
    };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// Comma-separated list of polynomials.
pub fn parse_polynomial_list(chart: &Chart, text: &str) -> Result<Vec<Polynomial>> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        chart,
        end: end_position(text),
    };
    let mut out = vec![p.expr()?];
    while let Some(Tok::Comma) = p.peek() {
        p.pos += 1;
        out.push(p.expr()?);
    }
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(out)
}

/// Identifiers in order of first appearance (for inferring a chart).
pub fn identifiers(text: &str) -> Result<Vec<String>> {
    let mut out: Vec<String> = Vec::new();
    for t in lex(text)? {
        if let Tok::Ident(s) = t.tok {
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Chart {
        Chart::new(&["x1", "x2", "y", "z"]).unwrap()
    }

    #[test]
    fn precedence() {
        let f = parse_polynomial(&chart(), "-x1^2 + 2*x2*(y - z)").unwrap();
        assert_eq!(f.to_string(), "-x1^2 + 2*x2*y - 2*x2*z");
    }

    #[test]
    fn rational_literals() {
        let f = parse_polynomial(&chart(), "3/6*y + 1/2").unwrap();
        assert_eq!(f.to_string(), "1/2*y + 1/2");
    }

    #[test]
    fn error_positions() {
        match parse_polynomial(&chart(), "x1 +\n  w") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        match parse_polynomial(&chart(), "x1 + ") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 6)),
            other => panic!("{other:?}"),
        }
        assert!(parse_polynomial(&chart(), "x1 $ y").is_err());
        assert!(parse_polynomial(&chart(), "x1^y").is_err());
    }

    #[test]
    fn lists() {
        let v = parse_polynomial_list(&chart(), "x1*x2, x2*y, x1 + y*z").unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(identifiers("x1*x2, y").unwrap(), vec!["x1", "x2", "y"]);
    }

    #[test]
    fn roundtrip_canonical() {
        let s = "-1/3*x1^2*y + x2^3 - 4*z + 5";
        let f = parse_polynomial(&chart(), s).unwrap();
        assert_eq!(f.to_string(), s);
    }
}
