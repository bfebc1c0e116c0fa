//! Reification, reflection and the normalizers built from them.
//!
//! `tdpe_cbn` and `tdpe_cbv` check the input, evaluate it, reify at the
//! given type, and check that the output is well typed and in the normal
//! grammar.

use std::sync::Arc;

use crate::eval::eval;
use crate::semantics::{
    cont, ret, run, Cbn, Cbv, Env, Forcing, Neutral, SemFun, Strategy, StrategyKind, Strong,
};
use crate::syntax::{
    classify, expand_weakenings, print_term_in, weaken, Annot, Context, Formula, NfClass, Term,
    TermRef,
};
use crate::typing::{check, TypeError};

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum NormalizeError {
    #[error("input is ill-typed: {0}")]
    IllTyped(#[from] TypeError),
    #[error("call-by-value normalization needs a closed term, but the context has length {ctx_len}")]
    OpenTerm { ctx_len: usize },
    #[error("normal form `{term}` fails to check: {error}")]
    OutputIllTyped { term: String, error: TypeError },
    #[error("normal form `{term}` is outside the normal grammar")]
    OutputNotNormal { term: String },
    #[error("`{term}` has type {ty}, which is not a disjunction")]
    NotADisjunction { term: String, ty: Formula },
    #[error("normal form `{term}` is not an injection")]
    NoDisjunct { term: String },
}

/// Outcome of a normalization run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TdpeResult {
    pub term: TermRef,
    pub ctx: Context,
    pub annot: Annot,
    pub ty: Formula,
    pub class: NfClass,
    pub strategy: StrategyKind,
}

impl TdpeResult {
    pub fn printed(&self) -> String {
        print_term_in(&self.term, self.ctx.len())
    }
}

/// `↓^b_A`: read a computation back as a normal term at `world`.
pub fn reify<S: Strategy>(world: &Context, b: Annot, ty: &Formula, alpha: Forcing<S>) -> TermRef {
    match (ty, b) {
        (Formula::Bot, _) | (Formula::Atom(_), Annot::Zero) => run(world, b, &alpha).term,
        (Formula::Atom(_), Annot::One) => {
            let g1 = world.extend(ty.clone().negate());
            let k_len = g1.len();
            Term::shift(alpha.call(
                &g1,
                cont(move |w2, chi: Strong<S>| {
                    Term::app(weaken(&Term::hyp(), w2.len() - k_len), chi.expect_atom().at(w2))
                }),
            ))
        }
        (Formula::Arrow(a, bty), _) => {
            let inner = world.extend((**a).clone());
            let (a2, inner2) = ((**a).clone(), inner.clone());
            let beta = Forcing::new(&inner, move |w1, k| {
                let alpha = alpha.clone();
                reflect::<S>(&inner2, b, &a2, Term::hyp()).call(
                    w1,
                    cont(move |w2, a1: Strong<S>| {
                        let k = k.clone();
                        alpha.call(
                            w2,
                            cont(move |w3, phi: Strong<S>| {
                                phi.expect_fun().call(w3, b, S::inject(a1.clone())).call(w3, k.clone())
                            }),
                        )
                    }),
                )
            });
            Term::lam((**a).clone(), reify(&inner, b, bty, beta))
        }
        (Formula::Sum(l, r), Annot::Zero) => {
            let (l, r) = ((**l).clone(), (**r).clone());
            alpha.call(
                world,
                cont(move |w2, g: Strong<S>| match g {
                    Strong::Inl(x) => Term::inl(reify(w2, b, &l, S::force(w2, (*x).clone()))),
                    Strong::Inr(x) => Term::inr(reify(w2, b, &r, S::force(w2, (*x).clone()))),
                    _ => panic!("non-injection at a sum type"),
                }),
            )
        }
        (Formula::Sum(l, r), Annot::One) => {
            let g1 = world.extend(ty.clone().negate());
            let k_len = g1.len();
            let (l, r) = ((**l).clone(), (**r).clone());
            Term::shift(alpha.call(
                &g1,
                cont(move |w2, g: Strong<S>| {
                    let k = weaken(&Term::hyp(), w2.len() - k_len);
                    let payload = match g {
                        Strong::Inl(x) => Term::inl(reify(w2, b, &l, S::force(w2, (*x).clone()))),
                        Strong::Inr(x) => Term::inr(reify(w2, b, &r, S::force(w2, (*x).clone()))),
                        _ => panic!("non-injection at a sum type"),
                    };
                    Term::app(k, payload)
                }),
            ))
        }
    }
}

/// `↑^b_A`: turn a neutral term at `world` into a computation.
pub fn reflect<S: Strategy>(world: &Context, b: Annot, ty: &Formula, e: TermRef) -> Forcing<S> {
    let e = Neutral::new(e, world);
    match ty {
        Formula::Atom(_) | Formula::Bot => ret(world, Strong::Atom(e)),
        Formula::Arrow(a, bty) => {
            let (a, bty) = ((**a).clone(), (**bty).clone());
            ret(
                world,
                Strong::Fun(SemFun::new(world, move |w1, b1, slot| {
                    let arg = reify(w1, b1, &a, S::force(w1, slot));
                    reflect(w1, b1, &bty, Term::app(e.at(w1), arg))
                })),
            )
        }
        Formula::Sum(l, r) => {
            let (l, r) = ((**l).clone(), (**r).clone());
            Forcing::new(world, move |w1, k| {
                let wl = w1.extend(l.clone());
                let wr = w1.extend(r.clone());
                let kl = k.clone();
                let left = reflect::<S>(&wl, b, &l, Term::hyp()).call(
                    &wl,
                    cont(move |w2, x| kl(w2, Strong::Inl(Arc::new(S::inject(x))))),
                );
                let right = reflect::<S>(&wr, b, &r, Term::hyp()).call(
                    &wr,
                    cont(move |w2, x| k(w2, Strong::Inr(Arc::new(S::inject(x))))),
                );
                Term::case(e.at(w1), left, right)
            })
        }
    }
}

/// The reflected environment for an open call-by-name term: entry `i`
/// reflects hypothesis `i` in the context that ends with it.
pub fn gamma_reflect(ctx: &Context, b: Annot) -> Env<Cbn> {
    (0..ctx.len()).rev().fold(Env::unit(), |env, i| {
        let at = ctx.drop_front(i);
        let ty = at.head().expect("index within context").clone();
        env.push(reflect::<Cbn>(&at, b, &ty, Term::hyp()))
    })
}

fn finish(
    raw: TermRef,
    ctx: &Context,
    b: Annot,
    ty: &Formula,
    strategy: StrategyKind,
) -> Result<TdpeResult, NormalizeError> {
    let term = expand_weakenings(&raw);
    let printed = || print_term_in(&term, ctx.len());
    check(ctx, b, &term, ty).map_err(|error| NormalizeError::OutputIllTyped {
        term: printed(),
        error,
    })?;
    let class = classify(&term);
    if !class.is_normal() {
        return Err(NormalizeError::OutputNotNormal { term: printed() });
    }
    Ok(TdpeResult {
        term,
        ctx: ctx.clone(),
        annot: b,
        ty: ty.clone(),
        class,
        strategy,
    })
}

/// Call-by-name normalization of `t : ctx ⊢_b ty`.
pub fn tdpe_cbn(ctx: &Context, b: Annot, t: &TermRef, ty: &Formula) -> Result<TdpeResult, NormalizeError> {
    check(ctx, b, t, ty)?;
    let env = gamma_reflect(ctx, b);
    let raw = reify(ctx, b, ty, eval::<Cbn>(t, ctx, &env, b));
    finish(raw, ctx, b, ty, StrategyKind::Cbn)
}

/// Call-by-value normalization of a closed `t : ⊢_b ty`.
pub fn tdpe_cbv(t: &TermRef, b: Annot, ty: &Formula) -> Result<TdpeResult, NormalizeError> {
    let ctx = Context::empty();
    check(&ctx, b, t, ty)?;
    let raw = reify(&ctx, b, ty, eval::<Cbv>(t, &ctx, &Env::unit(), b));
    finish(raw, &ctx, b, ty, StrategyKind::Cbv)
}

/// Normalize with either strategy. Call-by-value rejects open terms.
pub fn tdpe(
    strategy: StrategyKind,
    ctx: &Context,
    b: Annot,
    t: &TermRef,
    ty: &Formula,
) -> Result<TdpeResult, NormalizeError> {
    match strategy {
        StrategyKind::Cbn => tdpe_cbn(ctx, b, t, ty),
        StrategyKind::Cbv if ctx.is_empty() => tdpe_cbv(t, b, ty),
        StrategyKind::Cbv => Err(NormalizeError::OpenTerm { ctx_len: ctx.len() }),
    }
}

/// Which side of a closed proof of `A ∨ B` holds, with its normal form.
pub fn extract_disjunct(
    strategy: StrategyKind,
    t: &TermRef,
    ty: &Formula,
) -> Result<(Side, TdpeResult), NormalizeError> {
    if !matches!(ty, Formula::Sum(..)) {
        return Err(NormalizeError::NotADisjunction {
            term: print_term_in(t, 0),
            ty: ty.clone(),
        });
    }
    let res = tdpe(strategy, &Context::empty(), Annot::Zero, t, ty)?;
    let side = match &*res.term {
        Term::Inl(_) => Side::Left,
        Term::Inr(_) => Side::Right,
        _ => return Err(NormalizeError::NoDisjunct { term: res.printed() }),
    };
    Ok((side, res))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "inl",
            Side::Right => "inr",
        })
    }
}
