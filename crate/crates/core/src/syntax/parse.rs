//! Surface syntax: a named front end for the de Bruijn calculus.
//!
//! ```text
//! formula := sum ("->" formula)?
//! sum     := fatom ("+" fatom)*
//! fatom   := "bot" | ident | "(" formula ")"
//!
//! term    := "\" ident ":" formula "." term
//!          | "S" ident "." term
//!          | "case" term "of" "inl" ident "." term "|" "inr" ident "." term
//!          | app
//! app     := item item*
//! item    := "inl" atom | "inr" atom | atom
//! atom    := ident | "<" term ">" | "(" term ")" | "(" term ":" formula ")"
//! ```

use std::fmt;
use std::sync::Arc;

use super::Formula;

const TERM_KEYWORDS: &[&str] = &["inl", "inr", "case", "of", "S"];

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    fn join(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

/// Named surface term with its source span.
#[derive(Clone, Debug)]
pub struct Surface {
    pub kind: SurfaceKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum SurfaceKind {
    Var(Arc<str>),
    Lam(Arc<str>, Formula, Box<Surface>),
    App(Box<Surface>, Box<Surface>),
    Inl(Box<Surface>),
    Inr(Box<Surface>),
    Case {
        scrutinee: Box<Surface>,
        lname: Arc<str>,
        lbranch: Box<Surface>,
        rname: Arc<str>,
        rbranch: Box<Surface>,
    },
    Shift(Arc<str>, Box<Surface>),
    Reset(Box<Surface>),
    Ascribe(Box<Surface>, Formula),
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("syntax error at {line}:{column}: {message}")]
pub struct SyntaxError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(Arc<str>),
    Backslash,
    Colon,
    Dot,
    Comma,
    LParen,
    RParen,
    LAngle,
    RAngle,
    Bar,
    Arrow,
    Plus,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Backslash => write!(f, "`\\`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LAngle => write!(f, "`<`"),
            Tok::RAngle => write!(f, "`>`"),
            Tok::Bar => write!(f, "`|`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn error_at(src: &str, offset: usize, message: impl Into<String>) -> SyntaxError {
    let (line, column) = line_col(src, offset);
    SyntaxError {
        message: message.into(),
        line,
        column,
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, SyntaxError> {
    let mut toks = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if d.is_alphanumeric() || d == '_' || d == '\'' {
                    end = j + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            toks.push((Tok::Ident(src[i..end].into()), Span { start: i, end }));
            continue;
        }
        chars.next();
        let single = |t| (t, Span { start: i, end: i + c.len_utf8() });
        let tok = match c {
            '\\' | 'λ' => single(Tok::Backslash),
            ':' => single(Tok::Colon),
            '.' => single(Tok::Dot),
            ',' => single(Tok::Comma),
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            '<' | '⟨' => single(Tok::LAngle),
            '>' | '⟩' => single(Tok::RAngle),
            '|' => single(Tok::Bar),
            '+' => single(Tok::Plus),
            '-' => match chars.peek() {
                Some(&(_, '>')) => {
                    chars.next();
                    (Tok::Arrow, Span { start: i, end: i + 2 })
                }
                _ => return Err(error_at(src, i, "expected `->`")),
            },
            '→' => single(Tok::Arrow),
            _ => return Err(error_at(src, i, format!("unexpected character `{c}`"))),
        };
        toks.push(tok);
    }
    toks.push((Tok::Eof, Span { start: src.len(), end: src.len() }));
    Ok(toks)
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Parser<'a>, SyntaxError> {
        Ok(Parser {
            src,
            toks: lex(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(error_at(self.src, self.span().start, message))
    }

    fn expect(&mut self, tok: Tok) -> Result<Span, SyntaxError> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            self.err(format!("expected {tok}, found {}", self.peek()))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if &**s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), SyntaxError> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{kw}`, found {}", self.peek()))
        }
    }

    fn binder(&mut self) -> Result<Arc<str>, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(name) if !TERM_KEYWORDS.contains(&&*name) => {
                self.bump();
                Ok(name)
            }
            other => self.err(format!("expected a variable name, found {other}")),
        }
    }

    fn finish(&self) -> Result<(), SyntaxError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            other => self.err(format!("unexpected {other} after end of expression")),
        }
    }

    // ---- formulas ----

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.formula_sum()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            Ok(Formula::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn formula_sum(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.formula_atom()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            let rhs = self.formula_atom()?;
            acc = Formula::sum(acc, rhs);
        }
        Ok(acc)
    }

    fn formula_atom(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(name) if &*name == "bot" => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Atom(name))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            other => self.err(format!("expected a formula, found {other}")),
        }
    }

    // ---- terms ----

    fn term(&mut self) -> Result<Surface, SyntaxError> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Backslash => {
                self.bump();
                let name = self.binder()?;
                if *self.peek() != Tok::Colon {
                    return self.err(format!("missing type annotation on binder `{name}`"));
                }
                self.bump();
                let ann = self.formula()?;
                self.expect(Tok::Dot)?;
                let body = self.term()?;
                let span = start.join(body.span);
                Ok(Surface {
                    kind: SurfaceKind::Lam(name, ann, Box::new(body)),
                    span,
                })
            }
            Tok::Ident(kw) if &*kw == "S" => {
                self.bump();
                let k = self.binder()?;
                self.expect(Tok::Dot)?;
                let body = self.term()?;
                let span = start.join(body.span);
                Ok(Surface {
                    kind: SurfaceKind::Shift(k, Box::new(body)),
                    span,
                })
            }
            Tok::Ident(kw) if &*kw == "case" => {
                self.bump();
                let scrutinee = self.term()?;
                self.expect_keyword("of")?;
                self.expect_keyword("inl")?;
                let lname = self.binder()?;
                self.expect(Tok::Dot)?;
                let lbranch = self.term()?;
                self.expect(Tok::Bar)?;
                self.expect_keyword("inr")?;
                let rname = self.binder()?;
                self.expect(Tok::Dot)?;
                let rbranch = self.term()?;
                let span = start.join(rbranch.span);
                Ok(Surface {
                    kind: SurfaceKind::Case {
                        scrutinee: Box::new(scrutinee),
                        lname,
                        lbranch: Box::new(lbranch),
                        rname,
                        rbranch: Box::new(rbranch),
                    },
                    span,
                })
            }
            _ => self.app(),
        }
    }

    fn starts_item(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !matches!(&**s, "case" | "of" | "S"),
            Tok::LParen | Tok::LAngle => true,
            _ => false,
        }
    }

    fn app(&mut self) -> Result<Surface, SyntaxError> {
        if !self.starts_item() {
            return self.err(format!("expected a term, found {}", self.peek()));
        }
        let mut acc = self.item()?;
        while self.starts_item() {
            let arg = self.item()?;
            let span = acc.span.join(arg.span);
            acc = Surface {
                kind: SurfaceKind::App(Box::new(acc), Box::new(arg)),
                span,
            };
        }
        Ok(acc)
    }

    fn item(&mut self) -> Result<Surface, SyntaxError> {
        let start = self.span();
        if self.is_keyword("inl") || self.is_keyword("inr") {
            let left = self.is_keyword("inl");
            self.bump();
            let inner = self.atom()?;
            let span = start.join(inner.span);
            let kind = if left {
                SurfaceKind::Inl(Box::new(inner))
            } else {
                SurfaceKind::Inr(Box::new(inner))
            };
            return Ok(Surface { kind, span });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Surface, SyntaxError> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Ident(name) if !TERM_KEYWORDS.contains(&&*name) => {
                self.bump();
                Ok(Surface {
                    kind: SurfaceKind::Var(name),
                    span: start,
                })
            }
            Tok::LAngle => {
                self.bump();
                let body = self.term()?;
                let end = self.expect(Tok::RAngle)?;
                Ok(Surface {
                    kind: SurfaceKind::Reset(Box::new(body)),
                    span: start.join(end),
                })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.term()?;
                if *self.peek() == Tok::Colon {
                    self.bump();
                    let ty = self.formula()?;
                    let end = self.expect(Tok::RParen)?;
                    Ok(Surface {
                        kind: SurfaceKind::Ascribe(Box::new(inner), ty),
                        span: start.join(end),
                    })
                } else {
                    self.expect(Tok::RParen)?;
                    let span = start.join(self.prev_span());
                    Ok(Surface { span, ..inner })
                }
            }
            other => self.err(format!("expected a term, found {other}")),
        }
    }
}

/// Parse a term.
pub fn parse_term(src: &str) -> Result<Surface, SyntaxError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parse a formula.
pub fn parse_formula(src: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser::new(src)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parse a comma-separated context, outermost hypothesis first.
///
/// Each entry is either `name : formula` or a bare formula; unnamed entries
/// get the canonical name `x<i>` of their position.
pub fn parse_context(src: &str) -> Result<Vec<(Arc<str>, Formula)>, SyntaxError> {
    let mut p = Parser::new(src)?;
    let mut entries = Vec::new();
    if *p.peek() == Tok::Eof {
        return Ok(entries);
    }
    loop {
        let named = matches!(p.peek(), Tok::Ident(s) if &**s != "bot")
            && matches!(p.toks.get(p.pos + 1), Some((Tok::Colon, _)));
        let entry = if named {
            let name = p.binder()?;
            p.expect(Tok::Colon)?;
            (name, p.formula()?)
        } else {
            let f = p.formula()?;
            (format!("x{}", entries.len()).into(), f)
        };
        entries.push(entry);
        if *p.peek() == Tok::Comma {
            p.bump();
        } else {
            break;
        }
    }
    p.finish()?;
    Ok(entries)
}
