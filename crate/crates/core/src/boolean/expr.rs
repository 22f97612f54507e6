//! Boolean expressions over variables `X1..Xn`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! or   := and (("OR" | "|" | "||" | "∨") and)*
//! and  := not (("AND" | "&" | "&&" | "∧") not)*
//! not  := ("NOT" | "!" | "¬" | "~") not | atom
//! atom := "X" digits | "0" | "1" | "(" or ")"
//! ```
//!
//! Keywords and the variable prefix are case-insensitive. Binary operators
//! are left-associative.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolExpr {
    /// 1-based variable index.
    Var(usize),
    Const(bool),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn var(i: usize) -> Self {
        BoolExpr::Var(i)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(e))
    }

    pub fn and(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: BoolExpr, b: BoolExpr) -> Self {
        BoolExpr::Or(Box::new(a), Box::new(b))
    }

    /// Largest variable index used, 0 for a constant expression.
    pub fn max_var(&self) -> usize {
        match self {
            BoolExpr::Var(i) => *i,
            BoolExpr::Const(_) => 0,
            BoolExpr::Not(e) => e.max_var(),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// Evaluates with `assignment[i - 1]` as the value of `Xi`.
    ///
    /// Panics if a variable is out of range of `assignment`.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        match self {
            BoolExpr::Var(i) => assignment[i - 1],
            BoolExpr::Const(c) => *c,
            BoolExpr::Not(e) => !e.eval(assignment),
            BoolExpr::And(a, b) => a.eval(assignment) && b.eval(assignment),
            BoolExpr::Or(a, b) => a.eval(assignment) || b.eval(assignment),
        }
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolExpr::Var(i) => write!(f, "X{i}"),
            BoolExpr::Const(c) => write!(f, "{}", u8::from(*c)),
            BoolExpr::Not(e) => match **e {
                BoolExpr::Var(_) | BoolExpr::Const(_) | BoolExpr::Not(_) => write!(f, "!{e}"),
                _ => write!(f, "!({e})"),
            },
            BoolExpr::And(a, b) => {
                let wrap = |e: &BoolExpr| matches!(e, BoolExpr::Or(..));
                if wrap(a) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                f.write_str(" & ")?;
                if wrap(b) || matches!(**b, BoolExpr::And(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            BoolExpr::Or(a, b) => {
                write!(f, "{a} | ")?;
                if matches!(**b, BoolExpr::Or(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Var(usize),
    Const(bool),
    Not,
    And,
    Or,
    LParen,
    RParen,
}

fn parse_error(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut toks = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(off, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '!' | '¬' | '~' => Some(Tok::Not),
            '∧' => Some(Tok::And),
            '∨' => Some(Tok::Or),
            '0' => Some(Tok::Const(false)),
            '1' => Some(Tok::Const(true)),
            _ => None,
        };
        if let Some(t) = single {
            chars.next();
            toks.push((off, t));
            continue;
        }
        if c == '&' || c == '|' {
            chars.next();
            if chars.peek().map(|&(_, d)| d) == Some(c) {
                chars.next();
            }
            toks.push((off, if c == '&' { Tok::And } else { Tok::Or }));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut end = off;
            while let Some(&(i, d)) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    end = i + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let word = &text[off..end];
            let upper = word.to_ascii_uppercase();
            let tok = match upper.as_str() {
                "NOT" => Tok::Not,
                "AND" => Tok::And,
                "OR" => Tok::Or,
                _ => {
                    let digits = upper
                        .strip_prefix('X')
                        .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                        .ok_or_else(|| parse_error(off, format!("unknown token '{word}'")))?;
                    let index: usize = digits
                        .parse()
                        .map_err(|_| parse_error(off, format!("variable index too large in '{word}'")))?;
                    if index == 0 {
                        return Err(parse_error(off, "variable indices start at X1"));
                    }
                    Tok::Var(index)
                }
            };
            toks.push((off, tok));
            continue;
        }
        return Err(parse_error(off, format!("unknown token '{c}'")));
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|&(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |&(o, _)| o)
    }

    fn or(&mut self) -> Result<BoolExpr> {
        let mut lhs = self.and()?;
        while self.peek() == Some(Tok::Or) {
            self.pos += 1;
            lhs = BoolExpr::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<BoolExpr> {
        let mut lhs = self.not()?;
        while self.peek() == Some(Tok::And) {
            self.pos += 1;
            lhs = BoolExpr::and(lhs, self.not()?);
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<BoolExpr> {
        if self.peek() == Some(Tok::Not) {
            self.pos += 1;
            return Ok(BoolExpr::not(self.not()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<BoolExpr> {
        let off = self.offset();
        match self.peek() {
            Some(Tok::Var(i)) => {
                self.pos += 1;
                Ok(BoolExpr::Var(i))
            }
            Some(Tok::Const(c)) => {
                self.pos += 1;
                Ok(BoolExpr::Const(c))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.or()?;
                if self.peek() != Some(Tok::RParen) {
                    return Err(parse_error(self.offset(), "expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(t) => Err(parse_error(off, format!("unexpected {t:?}"))),
            None => Err(parse_error(off, "unexpected end of expression")),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<BoolExpr> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: text.len(),
    };
    let e = p.or()?;
    if p.pos != toks.len() {
        return Err(parse_error(p.offset(), "trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.bytes().map(|b| b == b'1').collect()
    }

    #[test]
    fn simple_semantics() {
        let e = parse_expr("X1 & !X2").unwrap();
        assert!(e.eval(&bits("10")));
        assert!(!e.eval(&bits("11")));
        assert!(!e.eval(&bits("00")));
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("X1 | X2 & X3").unwrap();
        assert_eq!(
            e,
            BoolExpr::or(BoolExpr::var(1), BoolExpr::and(BoolExpr::var(2), BoolExpr::var(3)))
        );
        let e = parse_expr("NOT X1 AND X2").unwrap();
        assert_eq!(e, BoolExpr::and(BoolExpr::not(BoolExpr::var(1)), BoolExpr::var(2)));
        let e = parse_expr("X1 | X2 | X3").unwrap();
        assert_eq!(
            e,
            BoolExpr::or(BoolExpr::or(BoolExpr::var(1), BoolExpr::var(2)), BoolExpr::var(3))
        );
    }

    #[test]
    fn alternative_spellings() {
        let a = parse_expr("¬x1 ∧ (X2 ∨ X3)").unwrap();
        let b = parse_expr("not X1 and (x2 or X3)").unwrap();
        let c = parse_expr("!X1 && (X2 || X3)").unwrap();
        assert_eq!(a, b);
        assert_eq!(b, c);
    }

    #[test]
    fn errors_carry_byte_offsets() {
        match parse_expr("X1 & X0") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        match parse_expr("X1 & Y2") {
            Err(Error::Parse { offset, message }) => {
                assert_eq!(offset, 5);
                assert!(message.contains("unknown token"));
            }
            other => panic!("{other:?}"),
        }
        match parse_expr("(X1 | X2") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 8),
            other => panic!("{other:?}"),
        }
        match parse_expr("¬ X1 #") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("{other:?}"),
        }
        assert!(parse_expr("").is_err());
        assert!(parse_expr("X1 X2").is_err());
        assert!(parse_expr("X1 &").is_err());
    }

    #[test]
    fn display_round_trips() {
        for src in ["X1 & !X2", "(X1 | X2) & X3", "!(X1 & X2) | X3 | 0", "X1 & (X2 & X3)"] {
            let e = parse_expr(src).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{src}");
        }
    }

    #[test]
    fn max_var() {
        assert_eq!(parse_expr("X3 | X12").unwrap().max_var(), 12);
        assert_eq!(parse_expr("1").unwrap().max_var(), 0);
    }
}
