//! The oriented equations.
//!
//! Call-by-value, with `V ::= x | λx.p` and `F ::= [] | F p | V F`:
//!
//! ```text
//!  1  (λx.p) V            → p{V/x}
//!  2  λx. V x             → V                       x ∉ FV(V)
//!  3  (λx. F[x]) p        → F[p]                    x ∉ FV(F)
//!  4  <V>                 → V
//!  5  <(λx.p) <q>>        → (λx.<p>) <q>
//!  6  S k. <p>            → S k. p
//!  7  S k. k <p>          → <p>                     k ∉ FV(p)
//!  8  S k. k p            → p                       k ∉ FV(p)
//!  9  <F[S k. p]>         → <p{(λx.<F[x]>)/k}>      x ∉ FV(F) ∪ {k}
//! ```
//!
//! Call-by-name, with `U ::= λx.p` and `E ::= [] | E p`:
//!
//! ```text
//! 10  (λx.p) q            → p{q/x}
//! 11  <U>                 → U
//! 12  k' ↩ E[S k. p]      → <p{k ⇒ k' ↩ E}>
//! 13  S k. <p>            → S k. p
//! 14  S k. k ↩ p          → p                       k ∉ FV(p)
//! 15  <E[S k. p]>         → <p{k ⇒ E}>
//! ```
//!
//! Rules 12 and 15 apply only when `k` occurs in `p` solely as the head of
//! `↩`, since `{k ⇒ E}` is defined on those occurrences alone.

use std::collections::HashSet;
use std::fmt;

use super::subst::{ctx_free_vars, decompositions, fresh, free_vars, ksubstitute, occurs_as_value, plug, substitute, KCtx};
use super::{EqRef, EqTerm, Theory};
use crate::semantics::StrategyKind;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct RuleId(pub u8);

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0)
    }
}

/// One rewrite: the rule, the path of child indices to the redex, and the
/// whole term afterwards.
#[derive(Clone, Debug)]
pub struct Step {
    pub rule: RuleId,
    pub path: Vec<usize>,
    pub term: EqRef,
}

pub fn classify_value(theory: Theory, t: &EqTerm) -> bool {
    match theory {
        StrategyKind::Cbv => matches!(t, EqTerm::Var(_) | EqTerm::Lam(..)),
        StrategyKind::Cbn => matches!(t, EqTerm::Lam(..)),
    }
}

/// All single-step rewrites, leftmost-outermost positions first and rules
/// ascending within a position.
pub fn rewrite_step(theory: Theory, t: &EqRef) -> Vec<Step> {
    let mut out = Vec::new();
    collect(theory, t, &mut Vec::new(), &mut |rule, path, term| {
        out.push(Step {
            rule,
            path: path.to_vec(),
            term,
        })
    });
    out
}

// `emit` receives the rewritten subterm; `rebuild` lifts it to the root.
fn collect(theory: Theory, t: &EqRef, path: &mut Vec<usize>, emit: &mut dyn FnMut(RuleId, &[usize], EqRef)) {
    let mut seen = HashSet::new();
    for (rule, r) in root_rules(theory, t) {
        if seen.insert((rule, r.alpha_key())) {
            emit(rule, path, r);
        }
    }
    for (i, c) in t.children().into_iter().enumerate() {
        path.push(i);
        collect(theory, c, path, &mut |rule, p, r| emit(rule, p, t.with_child(i, r)));
        path.pop();
    }
}

fn root_rules(theory: Theory, t: &EqRef) -> Vec<(RuleId, EqRef)> {
    match theory {
        StrategyKind::Cbv => cbv_root(t),
        StrategyKind::Cbn => cbn_root(t),
    }
}

fn is_var(t: &EqTerm, x: &str) -> bool {
    matches!(t, EqTerm::Var(n) if &**n == x)
}

fn cbv_root(t: &EqRef) -> Vec<(RuleId, EqRef)> {
    let value = |u: &EqTerm| classify_value(StrategyKind::Cbv, u);
    let mut out = Vec::new();
    match &**t {
        EqTerm::App(f, a) => {
            if let EqTerm::Lam(x, _, p) = &**f {
                if value(a) {
                    out.push((RuleId(1), substitute(p, x, a)));
                }
                for (ctx, h) in decompositions(p, true) {
                    if is_var(&h, x) && !ctx_free_vars(&ctx).contains(x) {
                        out.push((RuleId(3), plug(&ctx, a.clone())));
                    }
                }
            }
        }
        EqTerm::Lam(x, _, body) => {
            if let EqTerm::App(v, arg) = &**body {
                if value(v) && is_var(arg, x) && !free_vars(v).contains(x) {
                    out.push((RuleId(2), v.clone()));
                }
            }
        }
        EqTerm::Reset(body) => {
            if value(body) {
                out.push((RuleId(4), body.clone()));
            }
            if let EqTerm::App(f, q) = &**body {
                if let (EqTerm::Lam(x, ty, p), EqTerm::Reset(_)) = (&**f, &**q) {
                    let lam = EqTerm::lam(x.clone(), ty.clone(), EqTerm::reset(p.clone()));
                    out.push((RuleId(5), EqTerm::app(lam, q.clone())));
                }
            }
            for (ctx, h) in decompositions(body, true) {
                if let EqTerm::Shift(k, ty, p) = &*h {
                    let mut avoid = ctx_free_vars(&ctx);
                    avoid.insert(k.clone());
                    t.all_names(&mut avoid);
                    let x = fresh("x", &avoid);
                    let kont = EqTerm::lam(
                        x.clone(),
                        ty.clone(),
                        EqTerm::reset(plug(&ctx, EqTerm::var(&x))),
                    );
                    out.push((RuleId(9), EqTerm::reset(substitute(p, k, &kont))));
                }
            }
        }
        EqTerm::Shift(k, ty, body) => {
            if let EqTerm::Reset(p) = &**body {
                out.push((RuleId(6), EqTerm::shift(k.clone(), ty.clone(), p.clone())));
            }
            if let EqTerm::App(f, p) = &**body {
                if is_var(f, k) && !free_vars(p).contains(k) {
                    if matches!(&**p, EqTerm::Reset(_)) {
                        out.push((RuleId(7), p.clone()));
                    }
                    out.push((RuleId(8), p.clone()));
                }
            }
        }
        _ => {}
    }
    out.sort_by_key(|(r, _)| *r);
    out
}

fn cbn_root(t: &EqRef) -> Vec<(RuleId, EqRef)> {
    let mut out = Vec::new();
    match &**t {
        EqTerm::App(f, q) => {
            if let EqTerm::Lam(x, _, p) = &**f {
                out.push((RuleId(10), substitute(p, x, q)));
            }
        }
        EqTerm::Reset(body) => {
            if classify_value(StrategyKind::Cbn, body) {
                out.push((RuleId(11), body.clone()));
            }
            for (ctx, h) in decompositions(body, false) {
                if let EqTerm::Shift(k, _, p) = &*h {
                    if !occurs_as_value(p, k) {
                        let kc = KCtx { head: None, frames: ctx };
                        out.push((RuleId(15), EqTerm::reset(ksubstitute(p, k, &kc))));
                    }
                }
            }
        }
        EqTerm::KApp(k2, body) => {
            for (ctx, h) in decompositions(body, false) {
                if let EqTerm::Shift(k, _, p) = &*h {
                    if !occurs_as_value(p, k) {
                        let kc = KCtx {
                            head: Some(k2.clone()),
                            frames: ctx,
                        };
                        out.push((RuleId(12), EqTerm::reset(ksubstitute(p, k, &kc))));
                    }
                }
            }
        }
        EqTerm::Shift(k, ty, body) => {
            if let EqTerm::Reset(p) = &**body {
                out.push((RuleId(13), EqTerm::shift(k.clone(), ty.clone(), p.clone())));
            }
            if let EqTerm::KApp(k2, p) = &**body {
                if k2 == k && !free_vars(p).contains(k) {
                    out.push((RuleId(14), p.clone()));
                }
            }
        }
        _ => {}
    }
    out.sort_by_key(|(r, _)| *r);
    out
}
