use std::fmt;

use thiserror::Error;

use super::Formula;
use crate::time::{parse_rational, Interval, TimeBound};

/// A syntax error with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub position: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at position {}: expected {}, found {}", self.position, self.expected.join(" or "), self.found)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    LBrack,
    RBrack,
    LParen,
    RParen,
    Comma,
    Bang,
    Amp,
    Pipe,
    Arrow,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Num(s) => write!(f, "`{s}`"),
            Tok::LBrack => f.write_str("`[`"),
            Tok::RBrack => f.write_str("`]`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

const KEYWORDS: [&str; 7] = ["U", "R", "F", "G", "N", "true", "false"];

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'[' => Some(Tok::LBrack),
            b']' => Some(Tok::RBrack),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            b'!' => Some(Tok::Bang),
            b'&' => Some(Tok::Amp),
            b'|' => Some(Tok::Pipe),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((start, tok));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'-' && bytes.get(i + 1) == Some(&b'>') {
            out.push((start, Tok::Arrow));
            i += 2;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if c.is_ascii_digit() || c == b'.' || c == b'-' {
            i += 1;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.' || bytes[i] == b'/') {
                i += 1;
            }
            out.push((start, Tok::Num(text[start..i].to_string())));
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(ParseError {
                position: start,
                expected: vec!["a formula token".into()],
                found: format!("`{ch}`"),
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(&[name])
        }
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::or(Formula::not(lhs), rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.temporal()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            f = Formula::and(f, self.temporal()?);
        }
        Ok(f)
    }

    fn temporal(&mut self) -> Result<Formula, ParseError> {
        if self.is_keyword("F") || self.is_keyword("G") {
            let finally = self.is_keyword("F");
            self.bump();
            let i = self.decoration()?;
            let body = self.temporal()?;
            return Ok(if finally { Formula::eventually(i, body) } else { Formula::always(i, body) });
        }
        let lhs = self.unary()?;
        if self.is_keyword("U") || self.is_keyword("R") {
            let until = self.is_keyword("U");
            self.bump();
            let i = self.decoration()?;
            let rhs = self.temporal()?;
            return Ok(if until { Formula::until(lhs, rhs, i) } else { Formula::release(lhs, rhs, i) });
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_keyword("N") {
            self.bump();
            return Ok(Formula::next(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.implication()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(name) if name == "true" => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(name) if name == "false" => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                self.bump();
                Ok(Formula::Atom(name))
            }
            _ => self.fail(&["atom", "`true`", "`false`", "`!`", "`N`", "`(`"]),
        }
    }

    /// An optional interval right after a temporal keyword. A `(` starts an
    /// interval only when followed by an endpoint and a comma.
    fn decoration(&mut self) -> Result<Interval, ParseError> {
        let endpoint_like = |t: &Tok| matches!(t, Tok::Num(_)) || matches!(t, Tok::Ident(s) if s == "inf");
        let starts = match self.peek() {
            Tok::LBrack => true,
            Tok::LParen => endpoint_like(self.peek_at(1)) && *self.peek_at(2) == Tok::Comma,
            _ => false,
        };
        if !starts {
            return Ok(Interval::positive());
        }
        let start = self.pos();
        let lo_closed = self.bump() == Tok::LBrack;
        let lo = self.endpoint()?;
        self.expect(Tok::Comma, "`,`")?;
        let hi = self.endpoint()?;
        let hi_closed = match self.peek() {
            Tok::RBrack => true,
            Tok::RParen => false,
            _ => return self.fail(&["`]`", "`)`"]),
        };
        self.bump();
        let i = Interval::new(lo, lo_closed, hi, hi_closed);
        if !i.is_empty() && i.inf() < TimeBound::zero() {
            return Err(ParseError {
                position: start,
                expected: vec!["a non-negative interval".into()],
                found: i.to_string(),
            });
        }
        Ok(i)
    }

    fn endpoint(&mut self) -> Result<TimeBound, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "inf" => {
                self.bump();
                Ok(TimeBound::PosInf)
            }
            Tok::Num(text) => match parse_rational(&text) {
                Ok(r) => {
                    self.bump();
                    Ok(TimeBound::Finite(r))
                }
                Err(_) => self.fail(&["a rational endpoint"]),
            },
            _ => self.fail(&["a rational endpoint", "`inf`"]),
        }
    }
}

/// Parses the ASCII formula syntax. `a -> b` is accepted as `!a | b`.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser { toks: lex(text)?, at: 0 };
    let f = parser.implication()?;
    if *parser.peek() != Tok::End {
        return parser.fail(&["`&`", "`|`", "`U`", "`R`", "`->`", "end of input"]);
    }
    Ok(f)
}
