//! Canonical printing.
//!
//! Names are generated from binding depth: in a context of length `n` the
//! outermost hypothesis is `x0` and the head is `x{n-1}`; a binder at depth
//! `d` is called `x{d}`. Parentheses are the minimum the parser needs.

use std::fmt::{self, Write};

use super::{Term, TermRef};

const EXPR: u8 = 0;
const APP: u8 = 1;
const ATOM: u8 = 2;

/// Print `t` as a closed term.
pub fn print_term(t: &Term) -> String {
    print_term_in(t, 0)
}

/// Print `t` under a context of `ctx_len` hypotheses.
pub fn print_term_in(t: &Term, ctx_len: usize) -> String {
    let mut out = String::new();
    write_term(&mut out, t, ctx_len, EXPR).expect("writing to a String cannot fail");
    out
}

/// `Display` adapter for a term under a context of the given length.
pub struct TermDisplay<'a>(pub &'a TermRef, pub usize);

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self.0, self.1, EXPR)
    }
}

fn name(depth: usize) -> String {
    format!("x{depth}")
}

// Binder names come from the absolute binding depth, which weakening does
// not decrease, so a weakened term prints exactly like its expansion.
struct Printer {
    scope: Vec<String>,
    depth: usize,
}

fn level(t: &Term) -> u8 {
    match t {
        Term::Lam(..) | Term::Shift(_) | Term::Case(..) => EXPR,
        Term::App(..) | Term::Inl(_) | Term::Inr(_) => APP,
        Term::Hyp | Term::Reset(_) | Term::Ann(..) => ATOM,
        Term::Wkn(inner) => level(inner),
    }
}

fn write_term<W: Write>(out: &mut W, t: &Term, ctx_len: usize, prec: u8) -> fmt::Result {
    let mut p = Printer {
        scope: (0..ctx_len).map(name).collect(),
        depth: ctx_len,
    };
    p.write(out, t, prec)
}

impl Printer {
    fn bind<W: Write>(&mut self, out: &mut W, body: &Term) -> fmt::Result {
        let n = name(self.depth);
        self.scope.push(n);
        self.depth += 1;
        let r = self.write(out, body, EXPR);
        self.depth -= 1;
        self.scope.pop();
        r
    }

    fn write<W: Write>(&mut self, out: &mut W, t: &Term, prec: u8) -> fmt::Result {
        match t {
            Term::Hyp => {
                return match self.scope.last() {
                    Some(n) => out.write_str(n),
                    None => out.write_str("?"),
                };
            }
            Term::Wkn(inner) => {
                return match self.scope.pop() {
                    Some(hidden) => {
                        let r = self.write(out, inner, prec);
                        self.scope.push(hidden);
                        r
                    }
                    None => {
                        out.write_str("?wkn ")?;
                        self.write(out, inner, ATOM)
                    }
                };
            }
            _ => {}
        }
        let parens = level(t) < prec;
        if parens {
            out.write_char('(')?;
        }
        match t {
            Term::Lam(ann, body) => {
                write!(out, "\\{}:{}. ", name(self.depth), ann)?;
                self.bind(out, body)?;
            }
            Term::Shift(body) => {
                write!(out, "S {}. ", name(self.depth))?;
                self.bind(out, body)?;
            }
            Term::Case(s, l, r) => {
                out.write_str("case ")?;
                self.write(out, s, EXPR)?;
                write!(out, " of inl {}. ", name(self.depth))?;
                self.bind(out, l)?;
                write!(out, " | inr {}. ", name(self.depth))?;
                self.bind(out, r)?;
            }
            Term::App(f, a) => {
                self.write(out, f, APP)?;
                out.write_char(' ')?;
                self.write(out, a, ATOM)?;
            }
            Term::Inl(x) => {
                out.write_str("inl ")?;
                self.write(out, x, ATOM)?;
            }
            Term::Inr(x) => {
                out.write_str("inr ")?;
                self.write(out, x, ATOM)?;
            }
            Term::Reset(x) => {
                out.write_char('<')?;
                self.write(out, x, EXPR)?;
                out.write_char('>')?;
            }
            Term::Ann(x, ty) => {
                // The ascription brackets itself.
                out.write_char('(')?;
                self.write(out, x, EXPR)?;
                write!(out, " : {ty})")?;
            }
            Term::Hyp | Term::Wkn(_) => unreachable!("handled above"),
        }
        if parens {
            out.write_char(')')?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Formula;

    #[test]
    fn canonical_names() {
        let t = Term::lam(Formula::Bot, Term::hyp());
        assert_eq!(print_term(&t), r"\x0:bot. x0");
        let rr = Term::reset(Term::reset(Term::hyp()));
        assert_eq!(print_term_in(&rr, 1), "<<x0>>");
    }

    #[test]
    fn minimal_parentheses() {
        let a = Formula::atom("a");
        let id = Term::lam(a.clone(), Term::hyp());
        let t = Term::app(
            Term::app(Term::var(0), Term::app(Term::var(1), Term::var(0))),
            id.clone(),
        );
        assert_eq!(print_term_in(&t, 2), r"x1 (x0 x1) (\x2:a. x2)");
        let inj = Term::app(Term::var(0), Term::inl(Term::reset(Term::var(0))));
        assert_eq!(print_term_in(&inj, 1), "x0 (inl <x0>)");
        let ann = Term::ann(Term::inl(id), Formula::sum(Formula::arrow(a.clone(), a), Formula::Bot));
        assert_eq!(print_term(&ann), r"(inl (\x0:a. x0) : (a -> a)+bot)");
    }

    #[test]
    fn weakened_compound_terms_print_like_their_expansion() {
        let t = Term::wkn(Term::app(Term::hyp(), Term::hyp()));
        assert_eq!(print_term_in(&t, 2), "x0 x0");
        let l = Term::wkn(Term::lam(Formula::Bot, Term::app(Term::var(1), Term::hyp())));
        assert_eq!(print_term_in(&l, 2), r"\x2:bot. x0 x2");
        assert_eq!(print_term_in(&l, 2), print_term_in(&crate::syntax::expand_weakenings(&l), 2));
    }
}
