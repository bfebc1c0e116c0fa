//! Bidirectional checker for `p : Γ ⊢_b A`.
//!
//! `Hyp`, `Wkn`, `App`, `Reset` and ascriptions synthesize, and so does a
//! lambda whose body does; `Inl`, `Inr`, `Case` and `Shift` are checked.
//! An application whose function cannot synthesize is checked against its
//! lambda annotation, or failing that by synthesizing the argument.

use std::fmt;

use crate::syntax::{print_term_in, Annot, Context, Formula, Term, TermRef};

/// `Γ ⊢_b A`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Judgment {
    pub ctx: Context,
    pub annot: Annot,
    pub ty: Formula,
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.ctx.is_empty() {
            write!(f, "{} ", self.ctx)?;
        }
        write!(f, "⊢{} {}", self.annot, self.ty)
    }
}

/// Typing rule applied at a derivation node.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rule {
    Hyp,
    Wkn,
    Lam,
    App,
    Inl,
    Inr,
    Case,
    Shift,
    Reset,
    Ann,
}

/// A term decorated at every node with its judgment.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub term: TermRef,
    pub judgment: Judgment,
    pub rule: Rule,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Derivation::height).max().unwrap_or(0)
    }

    /// Visit every node, root first.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Derivation)) {
        f(self);
        for p in &self.premises {
            p.walk(f);
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum TypeError {
    #[error("type mismatch: expected {expected}, found {found} for `{term}`")]
    Mismatch {
        expected: Formula,
        found: Formula,
        term: String,
    },
    #[error("shift outside a delimiter: `{term}` is checked at annotation 0")]
    ShiftOutsideReset { term: String },
    #[error("reset at non-bot type {ty}")]
    ResetAtNonBot { ty: Formula },
    #[error("unbound de Bruijn index in a context of length {ctx_len}")]
    UnboundIndex { ctx_len: usize },
    #[error("cannot synthesize a type for `{term}`; add an ascription")]
    CannotSynthesize { term: String },
    #[error("`{term}` does not have an arrow type; found {found}")]
    NotAFunction { term: String, found: Formula },
    #[error("case scrutinee `{term}` does not have a sum type; found {found}")]
    NotASum { term: String, found: Formula },
    #[error("{form} cannot have type {ty}")]
    WrongIntroduction { form: &'static str, ty: Formula },
}

fn show(ctx: &Context, t: &Term) -> String {
    print_term_in(t, ctx.len())
}

/// Check `t : ctx ⊢_b ty` and return its derivation.
pub fn check(ctx: &Context, b: Annot, t: &TermRef, ty: &Formula) -> Result<Derivation, TypeError> {
    let judgment = Judgment {
        ctx: ctx.clone(),
        annot: b,
        ty: ty.clone(),
    };
    let node = |rule, premises| Derivation {
        term: t.clone(),
        judgment: judgment.clone(),
        rule,
        premises,
    };
    match (&**t, ty) {
        (Term::Wkn(inner), _) => {
            if ctx.is_empty() {
                return Err(TypeError::UnboundIndex { ctx_len: 0 });
            }
            let p = check(&ctx.tail(), b, inner, ty)?;
            Ok(node(Rule::Wkn, vec![p]))
        }
        (Term::Lam(ann, body), Formula::Arrow(dom, cod)) => {
            if ann != &**dom {
                return Err(TypeError::Mismatch {
                    expected: (**dom).clone(),
                    found: ann.clone(),
                    term: show(ctx, t),
                });
            }
            let p = check(&ctx.extend(ann.clone()), b, body, cod)?;
            Ok(node(Rule::Lam, vec![p]))
        }
        (Term::Lam(..), _) => Err(TypeError::WrongIntroduction {
            form: "a lambda",
            ty: ty.clone(),
        }),
        (Term::Inl(x), Formula::Sum(l, _)) => Ok(node(Rule::Inl, vec![check(ctx, b, x, l)?])),
        (Term::Inr(x), Formula::Sum(_, r)) => Ok(node(Rule::Inr, vec![check(ctx, b, x, r)?])),
        (Term::Inl(_) | Term::Inr(_), _) => Err(TypeError::WrongIntroduction {
            form: "an injection",
            ty: ty.clone(),
        }),
        (Term::Case(s, l, r), _) => {
            let ds = synth(ctx, b, s)?;
            let (lt, rt) = match &ds.judgment.ty {
                Formula::Sum(lt, rt) => ((**lt).clone(), (**rt).clone()),
                other => {
                    return Err(TypeError::NotASum {
                        term: show(ctx, s),
                        found: other.clone(),
                    })
                }
            };
            let dl = check(&ctx.extend(lt), b, l, ty)?;
            let dr = check(&ctx.extend(rt), b, r, ty)?;
            Ok(node(Rule::Case, vec![ds, dl, dr]))
        }
        (Term::Shift(body), _) => {
            if b != Annot::One {
                return Err(TypeError::ShiftOutsideReset { term: show(ctx, t) });
            }
            let k = ty.clone().negate();
            let p = check(&ctx.extend(k), Annot::One, body, &Formula::Bot)?;
            Ok(node(Rule::Shift, vec![p]))
        }
        (Term::Reset(body), _) => {
            if *ty != Formula::Bot {
                return Err(TypeError::ResetAtNonBot { ty: ty.clone() });
            }
            let p = check(ctx, Annot::One, body, &Formula::Bot)?;
            Ok(node(Rule::Reset, vec![p]))
        }
        (Term::App(f, a), _) => match synth(ctx, b, f) {
            Ok(df) => {
                let (dom, cod) = arrow_parts(ctx, f, &df.judgment.ty)?;
                if cod != *ty {
                    return Err(TypeError::Mismatch {
                        expected: ty.clone(),
                        found: cod,
                        term: show(ctx, t),
                    });
                }
                let da = check(ctx, b, a, &dom)?;
                Ok(node(Rule::App, vec![df, da]))
            }
            Err(TypeError::CannotSynthesize { .. }) if lam_domain(f).is_some() => {
                let dom = lam_domain(f).expect("guarded").clone();
                let df = check(ctx, b, f, &Formula::arrow(dom.clone(), ty.clone()))?;
                let da = check(ctx, b, a, &dom)?;
                Ok(node(Rule::App, vec![df, da]))
            }
            Err(TypeError::CannotSynthesize { .. }) => {
                let da = synth(ctx, b, a).map_err(|e| match e {
                    TypeError::CannotSynthesize { .. } => TypeError::CannotSynthesize {
                        term: show(ctx, t),
                    },
                    e => e,
                })?;
                let fty = Formula::arrow(da.judgment.ty.clone(), ty.clone());
                let df = check(ctx, b, f, &fty)?;
                Ok(node(Rule::App, vec![df, da]))
            }
            Err(e) => Err(e),
        },
        (Term::Hyp | Term::Ann(..), _) => {
            let d = synth(ctx, b, t)?;
            if d.judgment.ty != *ty {
                return Err(TypeError::Mismatch {
                    expected: ty.clone(),
                    found: d.judgment.ty,
                    term: show(ctx, t),
                });
            }
            Ok(d)
        }
    }
}

fn lam_domain(f: &Term) -> Option<&Formula> {
    match f {
        Term::Lam(ann, _) => Some(ann),
        Term::Wkn(inner) => lam_domain(inner),
        _ => None,
    }
}

fn arrow_parts(ctx: &Context, f: &Term, ty: &Formula) -> Result<(Formula, Formula), TypeError> {
    match ty {
        Formula::Arrow(d, c) => Ok(((**d).clone(), (**c).clone())),
        other => Err(TypeError::NotAFunction {
            term: show(ctx, f),
            found: other.clone(),
        }),
    }
}

/// Synthesize a type for `t` under `ctx ⊢_b`.
pub fn synth(ctx: &Context, b: Annot, t: &TermRef) -> Result<Derivation, TypeError> {
    let node = |ty: Formula, rule, premises| Derivation {
        term: t.clone(),
        judgment: Judgment {
            ctx: ctx.clone(),
            annot: b,
            ty,
        },
        rule,
        premises,
    };
    match &**t {
        Term::Hyp => match ctx.head() {
            Some(a) => Ok(node(a.clone(), Rule::Hyp, vec![])),
            None => Err(TypeError::UnboundIndex { ctx_len: 0 }),
        },
        Term::Wkn(inner) => {
            if ctx.is_empty() {
                return Err(TypeError::UnboundIndex { ctx_len: 0 });
            }
            let p = synth(&ctx.tail(), b, inner)?;
            Ok(node(p.judgment.ty.clone(), Rule::Wkn, vec![p]))
        }
        Term::App(f, a) => {
            let df = synth(ctx, b, f)?;
            let (dom, cod) = arrow_parts(ctx, f, &df.judgment.ty)?;
            let da = check(ctx, b, a, &dom)?;
            Ok(node(cod, Rule::App, vec![df, da]))
        }
        Term::Ann(x, ty) => {
            let p = check(ctx, b, x, ty)?;
            Ok(node(ty.clone(), Rule::Ann, vec![p]))
        }
        Term::Reset(body) => {
            let p = check(ctx, Annot::One, body, &Formula::Bot)?;
            Ok(node(Formula::Bot, Rule::Reset, vec![p]))
        }
        Term::Lam(ann, body) => {
            let p = synth(&ctx.extend(ann.clone()), b, body).map_err(|e| match e {
                TypeError::CannotSynthesize { .. } => TypeError::CannotSynthesize { term: show(ctx, t) },
                e => e,
            })?;
            let ty = Formula::arrow(ann.clone(), p.judgment.ty.clone());
            Ok(node(ty, Rule::Lam, vec![p]))
        }
        _ => Err(TypeError::CannotSynthesize { term: show(ctx, t) }),
    }
}

/// Re-check a derivation concluding `Γ ⊢_0 A` at `Γ ⊢_1 A`.
///
/// No rule requires annotation 0, so this is total on valid input.
pub fn annot_weaken(d: &Derivation) -> Derivation {
    let j = &d.judgment;
    check(&j.ctx, Annot::One, &d.term, &j.ty)
        .expect("a derivation at annotation 0 is valid at annotation 1")
}
