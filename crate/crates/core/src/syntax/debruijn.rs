use std::sync::Arc;

use super::parse::{Surface, SurfaceKind};
use super::{Term, TermRef};

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("unbound variable `{name}`")]
pub struct ScopeError {
    pub name: Arc<str>,
}

/// Replace names by `Hyp`/`Wkn` chains.
///
/// `ctx` lists the free variables most recent first, so `ctx[0]` becomes
/// `Hyp`. Index `n` is encoded as `n` weakenings of `Hyp`.
pub fn to_debruijn(t: &Surface, ctx: &[Arc<str>]) -> Result<TermRef, ScopeError> {
    let mut scope: Vec<Arc<str>> = ctx.iter().rev().cloned().collect();
    convert(t, &mut scope)
}

// `scope` is stored outermost first so binding is a push.
fn convert(t: &Surface, scope: &mut Vec<Arc<str>>) -> Result<TermRef, ScopeError> {
    let under = |scope: &mut Vec<Arc<str>>, name: &Arc<str>, body: &Surface| {
        scope.push(name.clone());
        let r = convert(body, scope);
        scope.pop();
        r
    };
    Ok(match &t.kind {
        SurfaceKind::Var(name) => {
            let index = scope
                .iter()
                .rev()
                .position(|n| n == name)
                .ok_or_else(|| ScopeError { name: name.clone() })?;
            Term::var(index)
        }
        SurfaceKind::Lam(name, ann, body) => Term::lam(ann.clone(), under(scope, name, body)?),
        SurfaceKind::App(f, a) => Term::app(convert(f, scope)?, convert(a, scope)?),
        SurfaceKind::Inl(x) => Term::inl(convert(x, scope)?),
        SurfaceKind::Inr(x) => Term::inr(convert(x, scope)?),
        SurfaceKind::Case {
            scrutinee,
            lname,
            lbranch,
            rname,
            rbranch,
        } => Term::case(
            convert(scrutinee, scope)?,
            under(scope, lname, lbranch)?,
            under(scope, rname, rbranch)?,
        ),
        SurfaceKind::Shift(k, body) => Term::shift(under(scope, k, body)?),
        SurfaceKind::Reset(body) => Term::reset(convert(body, scope)?),
        SurfaceKind::Ascribe(x, ty) => Term::ann(convert(x, scope)?, ty.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, Formula};

    fn db(src: &str, ctx: &[&str]) -> Result<TermRef, ScopeError> {
        let ctx: Vec<Arc<str>> = ctx.iter().map(|s| Arc::from(*s)).collect();
        to_debruijn(&parse_term(src).unwrap(), &ctx)
    }

    #[test]
    fn indices() {
        assert_eq!(db(r"\x:bot. x", &[]).unwrap(), Term::lam(Formula::Bot, Term::hyp()));
        let a = Formula::atom("a");
        let b = Formula::atom("b");
        assert_eq!(
            db(r"\x:a. \y:b. x", &[]).unwrap(),
            Term::lam(a, Term::lam(b, Term::wkn(Term::hyp())))
        );
        assert_eq!(
            db("S k. k x", &["x"]).unwrap(),
            Term::shift(Term::app(Term::hyp(), Term::wkn(Term::hyp())))
        );
    }

    #[test]
    fn shadowing_and_unbound() {
        assert_eq!(
            db(r"\x:a. \x:a. x", &[]).unwrap(),
            Term::lam(Formula::atom("a"), Term::lam(Formula::atom("a"), Term::hyp()))
        );
        let err = db("y", &["x"]).unwrap_err();
        assert_eq!(&*err.name, "y");
        assert_eq!(err.to_string(), "unbound variable `y`");
    }

    #[test]
    fn renaming_is_invisible() {
        let a = db(r"\p:bot. case z of inl q. <p> | inr r. S k. k r", &["z"]).unwrap();
        let b = db(r"\u:bot. case w of inl v. <u> | inr s. S j. j s", &["w"]).unwrap();
        assert_eq!(a, b);
    }
}
