//! Object-language formulas, de Bruijn terms, contexts and the
//! normal/neutral grammar.
//!
//! Variables are de Bruijn indices built from two constructors: [`Term::Hyp`]
//! is index zero and [`Term::Wkn`] is the successor. `Wkn` is a genuine term
//! former here: it may wrap any term, not just a variable chain, and it is
//! kept explicit in normal forms.

mod debruijn;
mod parse;
mod print;

use std::fmt;
use std::sync::Arc;

pub use debruijn::{to_debruijn, ScopeError};
pub use parse::{parse_context, parse_formula, parse_term, Span, Surface, SurfaceKind, SyntaxError};
pub use print::{print_term, print_term_in, TermDisplay};

/// Object-language type.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Arc<str>),
    /// The atomic type resets are set on. Not the empty type.
    Bot,
    Arrow(Arc<Formula>, Arc<Formula>),
    Sum(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    /// Atomic formula. `bot` is reserved for [`Formula::Bot`].
    pub fn atom(name: impl Into<Arc<str>>) -> Formula {
        let name = name.into();
        assert!(&*name != "bot", "`bot` is reserved for the distinguished atom");
        Formula::Atom(name)
    }

    pub fn arrow(dom: Formula, cod: Formula) -> Formula {
        Formula::Arrow(Arc::new(dom), Arc::new(cod))
    }

    pub fn sum(left: Formula, right: Formula) -> Formula {
        Formula::Sum(Arc::new(left), Arc::new(right))
    }

    /// `A -> bot`, the type of a captured continuation.
    pub fn negate(self) -> Formula {
        Formula::arrow(self, Formula::Bot)
    }

    /// Atoms and `bot`.
    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(_) | Formula::Bot)
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bot => 1,
            Formula::Arrow(a, b) | Formula::Sum(a, b) => 1 + a.size() + b.size(),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: arrow, 1: sum, 2: atom
        match self {
            Formula::Atom(name) => write!(f, "{name}"),
            Formula::Bot => write!(f, "bot"),
            Formula::Arrow(a, b) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 0)?;
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Formula::Sum(a, b) => {
                if prec > 1 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, "+")?;
                b.fmt_prec(f, 2)?;
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Shared pointer to a de Bruijn term.
pub type TermRef = Arc<Term>;

/// De Bruijn term.
///
/// `Ann` is a transparent type ascription carried over from the surface
/// syntax; it never occurs in normal forms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Hyp,
    Wkn(TermRef),
    Lam(Formula, TermRef),
    App(TermRef, TermRef),
    Inl(TermRef),
    Inr(TermRef),
    Case(TermRef, TermRef, TermRef),
    Shift(TermRef),
    Reset(TermRef),
    Ann(TermRef, Formula),
}

impl Term {
    pub fn hyp() -> TermRef {
        Arc::new(Term::Hyp)
    }

    /// Variable with de Bruijn index `index`.
    pub fn var(index: usize) -> TermRef {
        weaken(&Term::hyp(), index)
    }

    pub fn wkn(t: TermRef) -> TermRef {
        Arc::new(Term::Wkn(t))
    }

    pub fn lam(ann: Formula, body: TermRef) -> TermRef {
        Arc::new(Term::Lam(ann, body))
    }

    pub fn app(fun: TermRef, arg: TermRef) -> TermRef {
        Arc::new(Term::App(fun, arg))
    }

    pub fn inl(t: TermRef) -> TermRef {
        Arc::new(Term::Inl(t))
    }

    pub fn inr(t: TermRef) -> TermRef {
        Arc::new(Term::Inr(t))
    }

    pub fn case(scrutinee: TermRef, left: TermRef, right: TermRef) -> TermRef {
        Arc::new(Term::Case(scrutinee, left, right))
    }

    pub fn shift(body: TermRef) -> TermRef {
        Arc::new(Term::Shift(body))
    }

    pub fn reset(body: TermRef) -> TermRef {
        Arc::new(Term::Reset(body))
    }

    pub fn ann(t: TermRef, ty: Formula) -> TermRef {
        Arc::new(Term::Ann(t, ty))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Hyp => 1,
            Term::Wkn(t) | Term::Lam(_, t) | Term::Inl(t) | Term::Inr(t) => 1 + t.size(),
            Term::Shift(t) | Term::Reset(t) | Term::Ann(t, _) => 1 + t.size(),
            Term::App(a, b) => 1 + a.size() + b.size(),
            Term::Case(s, l, r) => 1 + s.size() + l.size() + r.size(),
        }
    }

    /// Length of the shortest context the term can live in.
    pub fn scope_len(&self) -> usize {
        match self {
            Term::Hyp => 1,
            Term::Wkn(t) => t.scope_len() + 1,
            Term::Lam(_, t) | Term::Shift(t) => t.scope_len().saturating_sub(1),
            Term::Inl(t) | Term::Inr(t) | Term::Reset(t) | Term::Ann(t, _) => t.scope_len(),
            Term::App(a, b) => a.scope_len().max(b.scope_len()),
            Term::Case(s, l, r) => s
                .scope_len()
                .max(l.scope_len().saturating_sub(1))
                .max(r.scope_len().saturating_sub(1)),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.scope_len() == 0
    }

    /// True if some `Shift` is not enclosed by a `Reset`.
    pub fn has_undelimited_shift(&self) -> bool {
        match self {
            Term::Hyp => false,
            Term::Shift(_) => true,
            Term::Reset(_) => false,
            Term::Wkn(t) | Term::Lam(_, t) | Term::Inl(t) | Term::Inr(t) | Term::Ann(t, _) => {
                t.has_undelimited_shift()
            }
            Term::App(a, b) => a.has_undelimited_shift() || b.has_undelimited_shift(),
            Term::Case(s, l, r) => {
                s.has_undelimited_shift() || l.has_undelimited_shift() || r.has_undelimited_shift()
            }
        }
    }

    pub fn contains_control(&self) -> bool {
        match self {
            Term::Hyp => false,
            Term::Shift(_) | Term::Reset(_) => true,
            Term::Wkn(t) | Term::Lam(_, t) | Term::Inl(t) | Term::Inr(t) | Term::Ann(t, _) => {
                t.contains_control()
            }
            Term::App(a, b) => a.contains_control() || b.contains_control(),
            Term::Case(s, l, r) => s.contains_control() || l.contains_control() || r.contains_control(),
        }
    }
}

/// Wrap `t` in `n` weakenings.
pub fn weaken(t: &TermRef, n: usize) -> TermRef {
    (0..n).fold(t.clone(), |acc, _| Term::wkn(acc))
}

/// Rewrite so that `Wkn` only occurs in variable chains `Wkn(..Wkn(Hyp))`.
///
/// Two terms denote the same program iff their expansions are equal; the
/// canonical printer already identifies them.
pub fn expand_weakenings(t: &TermRef) -> TermRef {
    lift(t, 0, 0)
}

// Shift free indices >= cutoff up by `by`, pushing explicit weakenings inward.
fn lift(t: &TermRef, by: usize, cutoff: usize) -> TermRef {
    match &**t {
        Term::Hyp => {
            if cutoff == 0 {
                Term::var(by)
            } else {
                t.clone()
            }
        }
        Term::Wkn(inner) => {
            // A term under one weakening sees the context with its head dropped.
            if cutoff == 0 {
                lift(inner, by + 1, 0)
            } else {
                let lifted = lift(inner, by, cutoff - 1);
                lift(&lifted, 1, 0)
            }
        }
        Term::Lam(a, b) => Term::lam(a.clone(), lift(b, by, cutoff + 1)),
        Term::App(f, a) => Term::app(lift(f, by, cutoff), lift(a, by, cutoff)),
        Term::Inl(x) => Term::inl(lift(x, by, cutoff)),
        Term::Inr(x) => Term::inr(lift(x, by, cutoff)),
        Term::Case(s, l, r) => Term::case(
            lift(s, by, cutoff),
            lift(l, by, cutoff + 1),
            lift(r, by, cutoff + 1),
        ),
        Term::Shift(b) => Term::shift(lift(b, by, cutoff + 1)),
        Term::Reset(b) => Term::reset(lift(b, by, cutoff)),
        Term::Ann(x, a) => Term::ann(lift(x, by, cutoff), a.clone()),
    }
}

/// Strongest grammar class a term belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NfClass {
    Normal,
    Neutral,
    NotInGrammar,
}

impl NfClass {
    /// Accepted by the normal-form grammar (neutral terms are normal too).
    pub fn is_normal(self) -> bool {
        matches!(self, NfClass::Normal | NfClass::Neutral)
    }
}

/// Classify against
/// `r ::= λr | inl r | inr r | S r | e` and
/// `e ::= e r | case(e, r, r) | ⟨e⟩ | hyp | wkn r`.
pub fn classify(t: &Term) -> NfClass {
    if is_neutral(t) {
        NfClass::Neutral
    } else if is_normal(t) {
        NfClass::Normal
    } else {
        NfClass::NotInGrammar
    }
}

fn is_normal(t: &Term) -> bool {
    match t {
        Term::Lam(_, r) | Term::Inl(r) | Term::Inr(r) | Term::Shift(r) => is_normal(r),
        _ => is_neutral(t),
    }
}

fn is_neutral(t: &Term) -> bool {
    match t {
        Term::Hyp => true,
        Term::Wkn(r) => is_normal(r),
        Term::App(e, r) => is_neutral(e) && is_normal(r),
        Term::Case(e, l, r) => is_neutral(e) && is_normal(l) && is_normal(r),
        Term::Reset(e) => is_neutral(e),
        _ => false,
    }
}

/// Typing context. The head is the most recently bound hypothesis
/// (de Bruijn index 0); extension adds at the front, so `g <= g'` iff `g` is
/// a suffix of `g'`.
#[derive(Clone, Default)]
pub struct Context(Option<Arc<ContextNode>>);

struct ContextNode {
    head: Formula,
    tail: Context,
    len: usize,
}

impl Context {
    pub fn empty() -> Context {
        Context(None)
    }

    /// Build from formulas listed outermost first (binding order).
    pub fn from_outermost<I: IntoIterator<Item = Formula>>(formulas: I) -> Context {
        formulas
            .into_iter()
            .fold(Context::empty(), |ctx, a| ctx.extend(a))
    }

    pub fn extend(&self, a: Formula) -> Context {
        Context(Some(Arc::new(ContextNode {
            head: a,
            tail: self.clone(),
            len: self.len() + 1,
        })))
    }

    pub fn len(&self) -> usize {
        self.0.as_ref().map_or(0, |n| n.len)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn head(&self) -> Option<&Formula> {
        self.0.as_ref().map(|n| &n.head)
    }

    /// Context with the head dropped; empty stays empty.
    pub fn tail(&self) -> Context {
        self.0.as_ref().map_or_else(Context::empty, |n| n.tail.clone())
    }

    /// Drop the `n` most recent hypotheses.
    pub fn drop_front(&self, n: usize) -> Context {
        (0..n).fold(self.clone(), |c, _| c.tail())
    }

    /// Formula of de Bruijn index `index`.
    pub fn get(&self, index: usize) -> Option<&Formula> {
        self.iter().nth(index)
    }

    /// Iterate head first.
    pub fn iter(&self) -> ContextIter<'_> {
        ContextIter(self.0.as_deref())
    }

    /// `self <= other` in the world preorder.
    pub fn is_suffix_of(&self, other: &Context) -> bool {
        match other.len().checked_sub(self.len()) {
            Some(d) => other.drop_front(d) == *self,
            None => false,
        }
    }
}

pub struct ContextIter<'a>(Option<&'a ContextNode>);

impl<'a> Iterator for ContextIter<'a> {
    type Item = &'a Formula;

    fn next(&mut self) -> Option<&'a Formula> {
        let node = self.0?;
        self.0 = node.tail.0.as_deref();
        Some(&node.head)
    }
}

impl PartialEq for Context {
    fn eq(&self, other: &Context) -> bool {
        if let (Some(a), Some(b)) = (&self.0, &other.0) {
            if Arc::ptr_eq(a, b) {
                return true;
            }
        }
        self.len() == other.len() && self.iter().eq(other.iter())
    }
}

impl Eq for Context {}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

impl fmt::Display for Context {
    /// Outermost first, matching the `--ctx` syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<_> = self.iter().collect();
        items.reverse();
        for (i, a) in items.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Turnstile annotation: `One` once a reset has been set above.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Annot {
    Zero,
    One,
}

impl Annot {
    pub fn from_bit(bit: u8) -> Option<Annot> {
        match bit {
            0 => Some(Annot::Zero),
            1 => Some(Annot::One),
            _ => None,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Annot::Zero => 0,
            Annot::One => 1,
        }
    }
}

impl fmt::Display for Annot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

/// Remove every ascription.
pub fn strip_annotations(t: &TermRef) -> TermRef {
    match &**t {
        Term::Hyp => t.clone(),
        Term::Ann(x, _) => strip_annotations(x),
        Term::Wkn(x) => Term::wkn(strip_annotations(x)),
        Term::Lam(a, x) => Term::lam(a.clone(), strip_annotations(x)),
        Term::App(f, a) => Term::app(strip_annotations(f), strip_annotations(a)),
        Term::Inl(x) => Term::inl(strip_annotations(x)),
        Term::Inr(x) => Term::inr(strip_annotations(x)),
        Term::Case(c, l, r) => Term::case(strip_annotations(c), strip_annotations(l), strip_annotations(r)),
        Term::Shift(x) => Term::shift(strip_annotations(x)),
        Term::Reset(x) => Term::reset(strip_annotations(x)),
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum ElabError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Scope(#[from] ScopeError),
}

/// Parse and resolve names. `names` lists the context outermost first.
pub fn elaborate(src: &str, names: &[Arc<str>]) -> Result<TermRef, ElabError> {
    let surface = parse_term(src)?;
    let innermost_first: Vec<Arc<str>> = names.iter().rev().cloned().collect();
    Ok(to_debruijn(&surface, &innermost_first)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Formula {
        Formula::atom("a")
    }

    #[test]
    fn weaken_examples() {
        assert_eq!(weaken(&Term::hyp(), 0), Term::hyp());
        assert_eq!(weaken(&Term::hyp(), 2), Term::wkn(Term::wkn(Term::hyp())));
        let lam = Term::lam(Formula::Bot, Term::hyp());
        assert_eq!(classify(&weaken(&lam, 1)), NfClass::Neutral);
    }

    #[test]
    fn classify_examples() {
        let id = Term::lam(Formula::Bot, Term::hyp());
        assert_eq!(classify(&Term::App(id.clone(), Term::hyp())), NfClass::NotInGrammar);
        assert_eq!(classify(&Term::Reset(Term::hyp())), NfClass::Neutral);
        assert_eq!(classify(&Term::Inl(id.clone())), NfClass::Normal);
        assert_eq!(classify(&Term::Reset(Term::shift(Term::hyp()))), NfClass::NotInGrammar);
        assert_eq!(classify(&Term::Ann(Term::hyp(), a())), NfClass::NotInGrammar);
        let case = Term::Case(Term::hyp(), Term::inl(Term::hyp()), Term::inr(Term::hyp()));
        assert_eq!(classify(&case), NfClass::Neutral);
    }

    #[test]
    fn context_order() {
        let ctx = Context::from_outermost([a(), Formula::Bot]);
        assert_eq!(ctx.head(), Some(&Formula::Bot));
        assert_eq!(ctx.get(1), Some(&a()));
        assert!(ctx.tail().is_suffix_of(&ctx));
        assert!(!ctx.is_suffix_of(&ctx.tail()));
        assert!(Context::empty().is_suffix_of(&ctx));
        assert_eq!(ctx.to_string(), "a, bot");
    }

    #[test]
    fn formula_display_is_minimal() {
        let f = Formula::arrow(
            Formula::arrow(a(), Formula::Bot),
            Formula::sum(Formula::sum(a(), a()), Formula::arrow(a(), a())),
        );
        assert_eq!(f.to_string(), "(a -> bot) -> a+a+(a -> a)");
    }

    #[test]
    fn expand_pushes_weakenings_to_variables() {
        let t = Term::wkn(Term::lam(a(), Term::app(Term::hyp(), Term::var(1))));
        let expected = Term::lam(a(), Term::app(Term::hyp(), Term::var(2)));
        assert_eq!(expand_weakenings(&t), expected);
        let nested = Term::wkn(Term::app(Term::hyp(), Term::wkn(Term::hyp())));
        assert_eq!(
            expand_weakenings(&nested),
            Term::app(Term::var(1), Term::var(2))
        );
    }

    #[test]
    fn undelimited_shift() {
        let s = Term::shift(Term::hyp());
        assert!(s.has_undelimited_shift());
        assert!(!Term::reset(s.clone()).has_undelimited_shift());
        assert!(Term::lam(a(), s).has_undelimited_shift());
    }
}
