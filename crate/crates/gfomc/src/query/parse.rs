use std::collections::BTreeSet;

use super::{Clause, Query, R, T};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Bar,
    Amp,
    Comma,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, Error> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, k) = (line, col);
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '|' => Some(Tok::Bar),
            '&' => Some(Tok::Amp),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            col += 1;
            out.push(Spanned { tok, line: l, col: k });
        } else if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    s.push(d);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Spanned { tok: Tok::Ident(s), line: l, col: k });
        } else {
            return Err(Error::Syntax { line, col, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Flat,
    Nested,
}

impl Parser {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, Error> {
        let (line, col) = self.toks.get(self.pos).map_or(self.end, |s| (s.line, s.col));
        Err(Error::Syntax { line, col, msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|s| &s.tok)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), Error> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), Error> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{kw}`")),
        }
    }

    fn is_keyword(&self, k: usize, kw: &str) -> bool {
        matches!(self.peek_at(k), Some(Tok::Ident(s)) if s == kw)
    }

    fn ident(&mut self) -> Result<String, Error> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn query(&mut self) -> Result<Query, Error> {
        if self.toks.len() == 1 {
            if self.is_keyword(0, "true") {
                return Ok(Query::constant(true));
            }
            if self.is_keyword(0, "false") {
                return Ok(Query::constant(false));
            }
        }
        let mut clauses = vec![self.clause()?];
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            clauses.push(self.clause()?);
        }
        if self.pos != self.toks.len() {
            return self.err("expected `&` or end of input");
        }
        Ok(Query::new(clauses))
    }

    fn clause(&mut self) -> Result<Clause, Error> {
        self.keyword("forall")?;
        let var = self.ident()?;
        match var.as_str() {
            "x" if self.is_keyword(0, "forall") => {
                self.keyword("forall")?;
                self.keyword("y")?;
                self.expect(Tok::LParen, "`(`")?;
                let (r, t, binary) = self.disj(Ctx::Flat)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Clause::flat(r, t, binary))
            }
            "x" => {
                let subs = self.subs("y")?;
                Ok(Clause::left_ii(subs))
            }
            "y" => {
                let subs = self.subs("x")?;
                Ok(Clause::right_ii(subs))
            }
            _ => {
                self.pos -= 1;
                self.err("expected `x` or `y` after `forall`")
            }
        }
    }

    fn subs(&mut self, inner: &str) -> Result<Vec<BTreeSet<String>>, Error> {
        self.expect(Tok::LParen, "`(`")?;
        let mut subs = Vec::new();
        loop {
            self.keyword("forall")?;
            self.keyword(inner)?;
            self.expect(Tok::LParen, "`(`")?;
            let (_, _, binary) = self.disj(Ctx::Nested)?;
            self.expect(Tok::RParen, "`)`")?;
            subs.push(binary);
            if self.peek() == Some(&Tok::Bar) {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(subs)
    }

    fn disj(&mut self, ctx: Ctx) -> Result<(bool, bool, BTreeSet<String>), Error> {
        let (mut r, mut t) = (false, false);
        let mut binary = BTreeSet::new();
        loop {
            let start = self.pos;
            let name = self.ident()?;
            self.expect(Tok::LParen, "`(`")?;
            let a = self.ident()?;
            let b = if self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                Some(self.ident()?)
            } else {
                None
            };
            self.expect(Tok::RParen, "`)`")?;
            let bad = |p: &mut Parser, msg: String| {
                p.pos = start;
                p.err::<()>(msg)
            };
            match (name.as_str(), a.as_str(), b.as_deref()) {
                (n, "x", None) if n == R => {
                    if ctx == Ctx::Nested {
                        bad(self, "R(x) may not appear inside a nested subclause".into())?;
                    }
                    r = true;
                }
                (n, "y", None) if n == T => {
                    if ctx == Ctx::Nested {
                        bad(self, "T(y) may not appear inside a nested subclause".into())?;
                    }
                    t = true;
                }
                (n, _, _) if n == R || n == T => {
                    bad(self, format!("{n} must be used as {n}({})", if n == R { "x" } else { "y" }))?;
                }
                (n, "x", Some("y")) => {
                    binary.insert(n.to_string());
                }
                (n, _, _) => {
                    bad(self, format!("binary symbol {n} must be applied to (x,y)"))?;
                }
            }
            if self.peek() == Some(&Tok::Bar) && !self.is_keyword(1, "forall") {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((r, t, binary))
    }
}

/// Parses the query text format. See the crate README for the grammar.
pub fn parse_query(text: &str) -> Result<Query, Error> {
    let toks = lex(text)?;
    let end = text.lines().enumerate().last().map_or((1, 1), |(i, l)| (i + 1, l.len() + 1));
    if toks.is_empty() {
        return Err(Error::Syntax { line: 1, col: 1, msg: "empty query".into() });
    }
    Parser { toks, pos: 0, end }.query()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::ClauseKind;

    #[test]
    fn type_one_query() {
        let q = parse_query("forall x forall y (R(x)|S(x,y)) & forall x forall y (S(x,y)|T(y))").unwrap();
        assert_eq!(q.clauses.len(), 2);
        assert_eq!(q.clauses[0].kind, ClauseKind::LeftI);
        assert_eq!(q.clauses[1].kind, ClauseKind::RightI);
    }

    #[test]
    fn left_type_two() {
        let q = parse_query("forall x (forall y (S1(x,y)) | forall y (S2(x,y)))").unwrap();
        assert_eq!(q.clauses.len(), 1);
        assert_eq!(q.clauses[0].kind, ClauseKind::LeftII);
        assert_eq!(q.clauses[0].subs.len(), 2);
    }

    #[test]
    fn rejects_misused_atoms() {
        let e = parse_query("forall x forall y (R(y))").unwrap_err();
        assert!(matches!(e, Error::Syntax { line: 1, col: 20, .. }), "{e}");
        assert!(parse_query("forall x forall y (S(y,x))").is_err());
        assert!(parse_query("forall x forall y (R(x,y))").is_err());
        assert!(parse_query("forall x (forall y (R(x) | S(x,y)) | forall y (S2(x,y)))").is_err());
        assert!(parse_query("forall x forall y (S(x,y)) &").is_err());
    }

    #[test]
    fn display_round_trip() {
        let text = "forall x (forall y (S1(x,y) | U(x,y)) | forall y (S2(x,y) | U(x,y))) & forall x forall y (S1(x,y) | S2(x,y)) & forall y (forall x (S3(x,y) | V(x,y)) | forall x (S4(x,y) | V(x,y)))";
        let q = parse_query(text).unwrap();
        assert_eq!(q.to_string(), text);
        assert_eq!(parse_query(&q.to_string()).unwrap(), q);
    }
}
