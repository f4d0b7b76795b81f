use std::collections::BTreeSet;

use thiserror::Error;

use super::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown label `{name}` at {line}:{col}")]
    UnknownLabel { name: String, line: usize, col: usize },
    #[error("variable `{var}` is bound twice on one path at {line}:{col}")]
    Rebound { var: String, line: usize, col: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Equals,
    Bang,
    Amp,
    Bar,
    Arrow,
    DoubleArrow,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let bump = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => bump(1, &mut i, &mut col),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' | ')' | ',' | '.' | '=' | '!' | '&' | '|' => {
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    '=' => Tok::Equals,
                    '!' => Tok::Bang,
                    '&' => Tok::Amp,
                    _ => Tok::Bar,
                };
                out.push(Spanned { tok, line: l0, col: c0 });
                bump(1, &mut i, &mut col);
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Spanned { tok: Tok::Arrow, line: l0, col: c0 });
                bump(2, &mut i, &mut col);
            }
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                out.push(Spanned { tok: Tok::DoubleArrow, line: l0, col: c0 });
                bump(3, &mut i, &mut col);
            }
            c if c.is_alphanumeric() || c == '_' || c == '@' => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                let s: String = chars[start..i].iter().collect();
                out.push(Spanned { tok: Tok::Ident(s), line: l0, col: c0 });
            }
            other => {
                return Err(ParseError::Syntax {
                    line: l0,
                    col: c0,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "ex" | "all" | "EX" | "ALL" | "true" | "false" | "E")
}

fn is_individual_var(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_lowercase() || c == '_') && !is_keyword(s)
}

fn is_set_var(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_uppercase()) && !is_keyword(s)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    vocab: &'a BTreeSet<String>,
    free_sets: &'a BTreeSet<String>,
    bound_ind: Vec<String>,
    bound_set: Vec<String>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax { line, col, msg: msg.into() })
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn expr(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::DoubleArrow {
            self.next();
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.next();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.next();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.next();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.next();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.next();
                let f = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(s) if matches!(s.as_str(), "ex" | "all" | "EX" | "ALL") => {
                self.quantifier(&s)
            }
            Tok::Ident(_) => self.atom(),
            other => self.err(format!("expected a formula, found {}", describe(&other))),
        }
    }

    fn quantifier(&mut self, kw: &str) -> Result<Formula, ParseError> {
        self.next();
        let (line, col) = self.here();
        let var = match self.next() {
            Tok::Ident(v) => v,
            other => {
                self.pos -= 1;
                return self.err(format!("expected a variable, found {}", describe(&other)));
            }
        };
        let set = kw == "EX" || kw == "ALL";
        if set && !is_set_var(&var) {
            return Err(ParseError::Syntax {
                line,
                col,
                msg: format!("set variable `{var}` must start with an uppercase letter"),
            });
        }
        if !set && !is_individual_var(&var) {
            return Err(ParseError::Syntax {
                line,
                col,
                msg: format!("individual variable `{var}` must be a lowercase identifier"),
            });
        }
        if self.bound_ind.contains(&var) || self.bound_set.contains(&var) {
            return Err(ParseError::Rebound { var, line, col });
        }
        if set && self.vocab.contains(&var) {
            return Err(ParseError::Syntax {
                line,
                col,
                msg: format!("set variable `{var}` clashes with a label"),
            });
        }
        self.expect(Tok::Dot, "`.`")?;
        if set {
            self.bound_set.push(var.clone());
        } else {
            self.bound_ind.push(var.clone());
        }
        let body = self.expr();
        if set {
            self.bound_set.pop();
        } else {
            self.bound_ind.pop();
        }
        let body = body?;
        Ok(match kw {
            "ex" => Formula::exists(&var, body),
            "all" => Formula::forall(&var, body),
            "EX" => Formula::exists_set(&var, body),
            _ => Formula::forall_set(&var, body),
        })
    }

    fn term(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(v) if is_individual_var(&v) => {
                self.next();
                Ok(v)
            }
            other => self.err(format!("expected an individual variable, found {}", describe(&other))),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let (line, col) = self.here();
        let name = match self.peek().clone() {
            Tok::Ident(s) => s,
            _ => unreachable!(),
        };
        match name.as_str() {
            "true" => {
                self.next();
                return Ok(Formula::True);
            }
            "false" => {
                self.next();
                return Ok(Formula::False);
            }
            _ => {}
        }
        if *self.peek_at(1) == Tok::LParen {
            self.next();
            self.next();
            if name == "E" {
                let a = self.term()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(Formula::Edge(a, b));
            }
            let t = self.term()?;
            self.expect(Tok::RParen, "`)`")?;
            if self.bound_set.contains(&name) {
                return Ok(Formula::Member(name, t));
            }
            if self.vocab.contains(&name) {
                return Ok(Formula::Label(name, t));
            }
            if self.free_sets.contains(&name) {
                return Ok(Formula::Member(name, t));
            }
            return Err(ParseError::UnknownLabel { name, line, col });
        }
        let a = self.term()?;
        self.expect(Tok::Equals, "`=` or `(`")?;
        let b = self.term()?;
        Ok(Formula::Eq(a, b))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Dot => "`.`".into(),
        Tok::Equals => "`=`".into(),
        Tok::Bang => "`!`".into(),
        Tok::Amp => "`&`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::DoubleArrow => "`<->`".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses a formula over the label vocabulary `vocab`. Unbound individual
/// variables are free; `Name(t)` must name a label or a bound set variable.
pub fn parse_formula(text: &str, vocab: &BTreeSet<String>) -> Result<Formula, ParseError> {
    parse_formula_with_sets(text, vocab, &BTreeSet::new())
}

/// Like [`parse_formula`], additionally accepting the listed free set variables.
pub fn parse_formula_with_sets(
    text: &str,
    vocab: &BTreeSet<String>,
    free_sets: &BTreeSet<String>,
) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vocab,
        free_sets,
        bound_ind: Vec::new(),
        bound_set: Vec::new(),
    };
    let f = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected trailing {}", describe(p.peek())));
    }
    Ok(f)
}
