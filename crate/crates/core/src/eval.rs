//! Evaluation of typed terms into the continuation-passing model.

use std::sync::Arc;

use crate::semantics::{bind, ret, run, Env, Forcing, Neutral, SemFun, Strategy, Strong};
use crate::syntax::{Annot, Context, Term, TermRef};

/// Evaluate `t` at `world` under `env`, where `t` is well typed at
/// annotation `b` in a context of the same length as `env`.
///
/// Panics on ill-typed input.
pub fn eval<S: Strategy>(t: &TermRef, world: &Context, env: &Env<S>, b: Annot) -> Forcing<S> {
    match &**t {
        Term::Hyp => S::force(world, env.head().clone()),
        Term::Wkn(inner) => eval(inner, world, &env.tail(), b),
        Term::Ann(inner, _) => eval(inner, world, env, b),
        Term::Lam(_, body) => {
            let (body, env) = (body.clone(), env.clone());
            ret(
                world,
                Strong::Fun(SemFun::new(world, move |w1, b1, a| eval(&body, w1, &env.push(a), b1))),
            )
        }
        Term::App(p, q) => {
            let (q, env2) = (q.clone(), env.clone());
            bind(
                world,
                move |w2, phi| S::sequence(w2, b, eval(&q, w2, &env2, b), phi.expect_fun().clone()),
                eval(p, world, env, b),
            )
        }
        Term::Inl(p) => S::sequence(
            world,
            b,
            eval(p, world, env, b),
            SemFun::new(world, |w2, _, a| ret(w2, Strong::Inl(Arc::new(a)))),
        ),
        Term::Inr(p) => S::sequence(
            world,
            b,
            eval(p, world, env, b),
            SemFun::new(world, |w2, _, a| ret(w2, Strong::Inr(Arc::new(a)))),
        ),
        Term::Case(s, l, r) => {
            let (l, r, env2) = (l.clone(), r.clone(), env.clone());
            bind(
                world,
                move |w2, v| match v {
                    Strong::Inl(x) => eval(&l, w2, &env2.push((*x).clone()), b),
                    Strong::Inr(x) => eval(&r, w2, &env2.push((*x).clone()), b),
                    _ => panic!("case on a non-sum value"),
                },
                eval(s, world, env, b),
            )
        }
        Term::Shift(body) => {
            debug_assert_eq!(b, Annot::One, "shift evaluated at annotation 0");
            let (body, env) = (body.clone(), env.clone());
            Forcing::new(world, move |w1, k| {
                let k_fun = SemFun::new(w1, move |w2, _, alpha| {
                    let answer = S::force(w2, alpha).call(w2, k.clone());
                    ret(w2, Strong::Atom(Neutral::new(answer, w2)))
                });
                let env = env.push(S::inject(Strong::Fun(k_fun)));
                run(w1, Annot::One, &eval(&body, w1, &env, Annot::One)).term
            })
        }
        Term::Reset(body) => {
            let body = body.clone();
            let inner_env = match b {
                Annot::One => env.clone(),
                Annot::Zero => env.coerce_up(),
            };
            Forcing::new(world, move |w1, k| {
                let answer = run(w1, Annot::One, &eval(&body, w1, &inner_env, Annot::One)).term;
                let answer = match b {
                    Annot::One => answer,
                    Annot::Zero => Term::reset(answer),
                };
                k(w1, Strong::Atom(Neutral::new(answer, w1)))
            })
        }
    }
}
