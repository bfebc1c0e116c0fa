//! Equational theories for shift and reset, oriented left to right.
//!
//! Terms use names rather than indices so rewrite results read naturally.
//! Every binder and every injection carries its type, and every shift the
//! type of the shift expression, so each node has a known type and
//! KApp-free terms convert back to checkable de Bruijn terms.

mod rules;
mod search;
mod subst;

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::semantics::StrategyKind;
use crate::syntax::{elaborate, Annot, Context, ElabError, Formula, Term, TermRef};
use crate::typing::{check, Derivation, Rule, TypeError};

pub use rules::{classify_value, rewrite_step, RuleId, Step};
pub use search::{rewrite_search, SearchConfig, SearchNode, SearchResult, TraceStep};
pub use subst::{free_vars, ksubstitute, substitute, KCtx};

/// Which equational theory.
pub type Theory = StrategyKind;

pub type Name = Arc<str>;
pub type EqRef = Arc<EqTerm>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum EqTerm {
    Var(Name),
    Lam(Name, Formula, EqRef),
    App(EqRef, EqRef),
    /// Injection annotated with the full sum type.
    Inl(Formula, EqRef),
    Inr(Formula, EqRef),
    Case {
        scrutinee: EqRef,
        lname: Name,
        lty: Formula,
        lbody: EqRef,
        rname: Name,
        rty: Formula,
        rbody: EqRef,
    },
    /// `S k. p`, annotated with the type of the whole expression.
    Shift(Name, Formula, EqRef),
    Reset(EqRef),
    /// `k ↩ p`, call-by-name application of a continuation variable.
    KApp(Name, EqRef),
}

impl EqTerm {
    pub fn var(n: &str) -> EqRef {
        Arc::new(EqTerm::Var(Arc::from(n)))
    }

    pub fn lam(n: Name, ty: Formula, body: EqRef) -> EqRef {
        Arc::new(EqTerm::Lam(n, ty, body))
    }

    pub fn app(f: EqRef, a: EqRef) -> EqRef {
        Arc::new(EqTerm::App(f, a))
    }

    pub fn reset(p: EqRef) -> EqRef {
        Arc::new(EqTerm::Reset(p))
    }

    pub fn shift(k: Name, ty: Formula, body: EqRef) -> EqRef {
        Arc::new(EqTerm::Shift(k, ty, body))
    }

    pub fn kapp(k: Name, p: EqRef) -> EqRef {
        Arc::new(EqTerm::KApp(k, p))
    }

    /// Immediate subterms, in position order.
    pub fn children(&self) -> Vec<&EqRef> {
        match self {
            EqTerm::Var(_) => vec![],
            EqTerm::Lam(_, _, b) | EqTerm::Shift(_, _, b) | EqTerm::Reset(b) | EqTerm::KApp(_, b) => vec![b],
            EqTerm::Inl(_, x) | EqTerm::Inr(_, x) => vec![x],
            EqTerm::App(f, a) => vec![f, a],
            EqTerm::Case {
                scrutinee,
                lbody,
                rbody,
                ..
            } => vec![scrutinee, lbody, rbody],
        }
    }

    /// Rebuild with child `i` replaced.
    pub fn with_child(&self, i: usize, c: EqRef) -> EqRef {
        let mut t = self.clone();
        match (&mut t, i) {
            (EqTerm::Lam(_, _, b) | EqTerm::Shift(_, _, b) | EqTerm::Reset(b) | EqTerm::KApp(_, b), 0) => *b = c,
            (EqTerm::Inl(_, x) | EqTerm::Inr(_, x), 0) => *x = c,
            (EqTerm::App(f, _), 0) => *f = c,
            (EqTerm::App(_, a), 1) => *a = c,
            (EqTerm::Case { scrutinee, .. }, 0) => *scrutinee = c,
            (EqTerm::Case { lbody, .. }, 1) => *lbody = c,
            (EqTerm::Case { rbody, .. }, 2) => *rbody = c,
            _ => panic!("no child {i}"),
        }
        Arc::new(t)
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn has_kapp(&self) -> bool {
        matches!(self, EqTerm::KApp(..)) || self.children().iter().any(|c| c.has_kapp())
    }

    /// Every name occurring in the term, bound or free.
    pub fn all_names(&self, out: &mut HashSet<Name>) {
        match self {
            EqTerm::Var(n) | EqTerm::Lam(n, ..) | EqTerm::Shift(n, ..) | EqTerm::KApp(n, _) => {
                out.insert(n.clone());
            }
            EqTerm::Case { lname, rname, .. } => {
                out.insert(lname.clone());
                out.insert(rname.clone());
            }
            _ => {}
        }
        for c in self.children() {
            c.all_names(out);
        }
    }

    /// Alpha-invariant key: bound names are replaced by binding depth.
    pub fn alpha_key(&self) -> String {
        let mut out = String::new();
        key(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn alpha_eq(&self, other: &EqTerm) -> bool {
        self.alpha_key() == other.alpha_key()
    }
}

fn key(t: &EqTerm, scope: &mut Vec<Name>, out: &mut String) {
    use std::fmt::Write;
    let var = |n: &Name, scope: &Vec<Name>| match scope.iter().rposition(|m| m == n) {
        Some(i) => format!("#{i}"),
        None => format!("${n}"),
    };
    let under = |n: &Name, body: &EqTerm, scope: &mut Vec<Name>, out: &mut String| {
        scope.push(n.clone());
        key(body, scope, out);
        scope.pop();
    };
    match t {
        EqTerm::Var(n) => out.push_str(&var(n, scope)),
        EqTerm::Lam(n, ty, b) => {
            write!(out, "(L{ty}.").unwrap();
            under(n, b, scope, out);
            out.push(')');
        }
        EqTerm::App(f, a) => {
            out.push_str("(@");
            key(f, scope, out);
            out.push(' ');
            key(a, scope, out);
            out.push(')');
        }
        EqTerm::Inl(ty, x) | EqTerm::Inr(ty, x) => {
            let tag = if matches!(t, EqTerm::Inl(..)) { "l" } else { "r" };
            write!(out, "({tag}{ty} ").unwrap();
            key(x, scope, out);
            out.push(')');
        }
        EqTerm::Case {
            scrutinee,
            lname,
            lty,
            lbody,
            rname,
            rty,
            rbody,
        } => {
            out.push_str("(C");
            key(scrutinee, scope, out);
            write!(out, " {lty}.").unwrap();
            under(lname, lbody, scope, out);
            write!(out, " {rty}.").unwrap();
            under(rname, rbody, scope, out);
            out.push(')');
        }
        EqTerm::Shift(k, ty, b) => {
            write!(out, "(S{ty}.").unwrap();
            under(k, b, scope, out);
            out.push(')');
        }
        EqTerm::Reset(b) => {
            out.push('<');
            key(b, scope, out);
            out.push('>');
        }
        EqTerm::KApp(k, p) => {
            write!(out, "(K{} ", var(k, scope)).unwrap();
            key(p, scope, out);
            out.push(')');
        }
    }
}

const EXPR: u8 = 0;
const APP: u8 = 1;
const ATOM: u8 = 2;

fn level(t: &EqTerm) -> u8 {
    match t {
        EqTerm::Lam(..) | EqTerm::Shift(..) | EqTerm::Case { .. } => EXPR,
        EqTerm::App(..) | EqTerm::Inl(..) | EqTerm::Inr(..) | EqTerm::KApp(..) => APP,
        EqTerm::Var(_) | EqTerm::Reset(_) => ATOM,
    }
}

fn write_eq(f: &mut fmt::Formatter<'_>, t: &EqTerm, prec: u8) -> fmt::Result {
    let parens = level(t) < prec;
    if parens {
        f.write_str("(")?;
    }
    match t {
        EqTerm::Var(n) => f.write_str(n)?,
        EqTerm::Lam(n, ty, b) => {
            write!(f, "\\{n}:{ty}. ")?;
            write_eq(f, b, EXPR)?;
        }
        EqTerm::App(g, a) => {
            write_eq(f, g, APP)?;
            f.write_str(" ")?;
            write_eq(f, a, ATOM)?;
        }
        EqTerm::Inl(_, x) => {
            f.write_str("inl ")?;
            write_eq(f, x, ATOM)?;
        }
        EqTerm::Inr(_, x) => {
            f.write_str("inr ")?;
            write_eq(f, x, ATOM)?;
        }
        EqTerm::Case {
            scrutinee,
            lname,
            lbody,
            rname,
            rbody,
            ..
        } => {
            f.write_str("case ")?;
            write_eq(f, scrutinee, EXPR)?;
            write!(f, " of inl {lname}. ")?;
            write_eq(f, lbody, EXPR)?;
            write!(f, " | inr {rname}. ")?;
            write_eq(f, rbody, EXPR)?;
        }
        EqTerm::Shift(k, _, b) => {
            write!(f, "S {k}. ")?;
            write_eq(f, b, EXPR)?;
        }
        EqTerm::Reset(b) => {
            f.write_str("<")?;
            write_eq(f, b, EXPR)?;
            f.write_str(">")?;
        }
        EqTerm::KApp(k, p) => {
            write!(f, "{k} ↩ ")?;
            write_eq(f, p, ATOM)?;
        }
    }
    if parens {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for EqTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_eq(f, self, EXPR)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum EqError {
    #[error(transparent)]
    Elab(#[from] ElabError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("context has {expected} hypotheses but {found} names were given")]
    NameCount { expected: usize, found: usize },
}

/// Named term from a checked derivation. `names` names the context,
/// outermost first. Under call-by-name, an application whose function is a
/// shift-bound variable becomes `KApp`.
pub fn from_derivation(d: &Derivation, names: &[Name], theory: Theory) -> Result<EqRef, EqError> {
    let n = d.judgment.ctx.len();
    if names.len() != n {
        return Err(EqError::NameCount {
            expected: n,
            found: names.len(),
        });
    }
    let mut scope: Vec<(Name, bool)> = names.iter().map(|n| (n.clone(), false)).collect();
    Ok(convert(d, &mut scope, 0, theory))
}

// `scope` holds (name, bound by a shift), outermost first; `drop` counts
// pending weakenings that hide the innermost entries.
fn convert(d: &Derivation, scope: &mut Vec<(Name, bool)>, drop: usize, theory: Theory) -> EqRef {
    let visible = |scope: &Vec<(Name, bool)>| scope.len() - drop;
    let fresh_binder = |prefix: &str, scope: &Vec<(Name, bool)>| -> Name {
        let taken: HashSet<&str> = scope.iter().map(|(n, _)| &**n).collect();
        let mut i = scope.len();
        loop {
            let cand = format!("{prefix}{i}");
            if !taken.contains(cand.as_str()) {
                return Arc::from(cand);
            }
            i += 1;
        }
    };
    let bind = |name: Name, is_k: bool, body: &Derivation, scope: &mut Vec<(Name, bool)>| {
        // Binding under pending weakenings: the hidden entries must stay
        // invisible, so rebuild the visible scope explicitly.
        let hidden: Vec<(Name, bool)> = scope.split_off(visible(scope));
        scope.push((name, is_k));
        let r = convert(body, scope, 0, theory);
        scope.pop();
        scope.extend(hidden);
        r
    };
    match d.rule {
        Rule::Hyp => Arc::new(EqTerm::Var(scope[visible(scope) - 1].0.clone())),
        Rule::Wkn => convert(&d.premises[0], scope, drop + 1, theory),
        Rule::Ann => convert(&d.premises[0], scope, drop, theory),
        Rule::Lam => {
            let Term::Lam(ty, _) = &*d.term else { unreachable!() };
            let name = fresh_binder("x", scope);
            let body = bind(name.clone(), false, &d.premises[0], scope);
            EqTerm::lam(name, ty.clone(), body)
        }
        Rule::Shift => {
            let name = fresh_binder("k", scope);
            let body = bind(name.clone(), true, &d.premises[0], scope);
            EqTerm::shift(name, d.judgment.ty.clone(), body)
        }
        Rule::Reset => EqTerm::reset(convert(&d.premises[0], scope, drop, theory)),
        Rule::Inl => Arc::new(EqTerm::Inl(
            d.judgment.ty.clone(),
            convert(&d.premises[0], scope, drop, theory),
        )),
        Rule::Inr => Arc::new(EqTerm::Inr(
            d.judgment.ty.clone(),
            convert(&d.premises[0], scope, drop, theory),
        )),
        Rule::App => {
            let f = convert(&d.premises[0], scope, drop, theory);
            let a = convert(&d.premises[1], scope, drop, theory);
            if theory == StrategyKind::Cbn {
                if let EqTerm::Var(k) = &*f {
                    let v = visible(scope);
                    let is_k = scope[..v].iter().rev().find(|(n, _)| n == k).is_some_and(|(_, s)| *s);
                    if is_k {
                        return EqTerm::kapp(k.clone(), a);
                    }
                }
            }
            EqTerm::app(f, a)
        }
        Rule::Case => {
            let s = convert(&d.premises[0], scope, drop, theory);
            let Formula::Sum(lty, rty) = &d.premises[0].judgment.ty else { unreachable!() };
            let lname = fresh_binder("x", scope);
            let lbody = bind(lname.clone(), false, &d.premises[1], scope);
            let rname = fresh_binder("x", scope);
            let rbody = bind(rname.clone(), false, &d.premises[2], scope);
            Arc::new(EqTerm::Case {
                scrutinee: s,
                lname,
                lty: (**lty).clone(),
                lbody,
                rname,
                rty: (**rty).clone(),
                rbody,
            })
        }
    }
}

/// Parse, check at `ctx ⊢_b ty` and convert. `names` names `ctx`
/// outermost first.
pub fn parse_eq(
    src: &str,
    names: &[Name],
    ctx: &Context,
    b: Annot,
    ty: &Formula,
    theory: Theory,
) -> Result<EqRef, EqError> {
    let t = elaborate(src, names)?;
    let d = check(ctx, b, &t, ty)?;
    from_derivation(&d, names, theory)
}

/// The type of `t`, given types for its free names.
pub fn type_of(t: &EqTerm, env: &mut Vec<(Name, Formula)>) -> Formula {
    let lookup = |n: &Name, env: &Vec<(Name, Formula)>| {
        env.iter()
            .rev()
            .find(|(m, _)| m == n)
            .map(|(_, ty)| ty.clone())
            .unwrap_or_else(|| panic!("free name `{n}` has no type"))
    };
    match t {
        EqTerm::Var(n) => lookup(n, env),
        EqTerm::Lam(n, ty, b) => {
            env.push((n.clone(), ty.clone()));
            let cod = type_of(b, env);
            env.pop();
            Formula::arrow(ty.clone(), cod)
        }
        EqTerm::App(f, _) => match type_of(f, env) {
            Formula::Arrow(_, cod) => (*cod).clone(),
            other => panic!("application of a term of type {other}"),
        },
        EqTerm::Inl(ty, _) | EqTerm::Inr(ty, _) | EqTerm::Shift(_, ty, _) => ty.clone(),
        EqTerm::Case { lname, lty, lbody, .. } => {
            env.push((lname.clone(), lty.clone()));
            let ty = type_of(lbody, env);
            env.pop();
            ty
        }
        EqTerm::Reset(_) | EqTerm::KApp(..) => Formula::Bot,
    }
}

/// De Bruijn term for `t`, with ascriptions wherever the checker needs
/// them. `KApp` becomes ordinary application. `names` and `ctx` describe
/// the free names, outermost first.
pub fn to_debruijn_term(t: &EqTerm, names: &[Name], ctx: &Context) -> TermRef {
    let mut env: Vec<(Name, Formula)> = names
        .iter()
        .cloned()
        .zip(ctx.iter().collect::<Vec<_>>().into_iter().rev().cloned())
        .collect();
    to_db(t, &mut env)
}

fn synthesizes(t: &EqTerm) -> bool {
    matches!(t, EqTerm::Var(_) | EqTerm::App(..) | EqTerm::Reset(_) | EqTerm::KApp(..))
}

fn to_db(t: &EqTerm, env: &mut Vec<(Name, Formula)>) -> TermRef {
    let var = |n: &Name, env: &Vec<(Name, Formula)>| {
        let i = env
            .iter()
            .rev()
            .position(|(m, _)| m == n)
            .unwrap_or_else(|| panic!("free name `{n}` not in context"));
        Term::var(i)
    };
    let synth_pos = |u: &EqTerm, env: &mut Vec<(Name, Formula)>| {
        let db = to_db(u, env);
        if synthesizes(u) {
            db
        } else {
            Term::ann(db, type_of(u, env))
        }
    };
    match t {
        EqTerm::Var(n) => var(n, env),
        EqTerm::Lam(n, ty, b) => {
            env.push((n.clone(), ty.clone()));
            let body = to_db(b, env);
            env.pop();
            Term::lam(ty.clone(), body)
        }
        EqTerm::App(f, a) => Term::app(synth_pos(f, env), to_db(a, env)),
        EqTerm::KApp(k, p) => Term::app(var(k, env), to_db(p, env)),
        EqTerm::Inl(_, x) => Term::inl(to_db(x, env)),
        EqTerm::Inr(_, x) => Term::inr(to_db(x, env)),
        EqTerm::Case {
            scrutinee,
            lname,
            lty,
            lbody,
            rname,
            rty,
            rbody,
        } => {
            let s = synth_pos(scrutinee, env);
            env.push((lname.clone(), lty.clone()));
            let l = to_db(lbody, env);
            env.pop();
            env.push((rname.clone(), rty.clone()));
            let r = to_db(rbody, env);
            env.pop();
            Term::case(s, l, r)
        }
        EqTerm::Shift(k, ty, b) => {
            env.push((k.clone(), ty.clone().negate()));
            let body = to_db(b, env);
            env.pop();
            Term::ann(Term::shift(body), ty.clone())
        }
        EqTerm::Reset(b) => Term::reset(to_db(b, env)),
    }
}
