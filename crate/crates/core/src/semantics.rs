//! Continuation-passing semantic domain over the universal model.
//!
//! Worlds are typing contexts ordered by suffix extension. A [`Forcing`]
//! value is a computation: given a future world and a continuation it
//! produces an answer term at that world. A [`Strong`] value is what a
//! continuation receives. Answers are normal or neutral de Bruijn terms.
//!
//! Dependent indices are erased: the answer formula of an annotation-0
//! computation has no runtime representation, and worlds are checked only by
//! debug assertions. Weakening of atomic values is lazy: a [`Neutral`]
//! remembers the world its term lives in and is weakened when read at a
//! larger one.

use std::fmt;
use std::sync::Arc;

use crate::syntax::{weaken, Annot, Context, Term, TermRef};

/// Evaluation strategy. The two strategies differ only in what an
/// environment entry, a sum payload and a function argument hold.
pub trait Strategy: Sized + Send + Sync + 'static {
    /// Environment entries, sum payloads and function arguments: a
    /// [`Forcing`] value under call-by-name, a [`Strong`] value under
    /// call-by-value.
    type Slot: Clone + Send + Sync + 'static;

    const KIND: StrategyKind;

    /// Turn a delivered value into a slot.
    fn inject(sv: Strong<Self>) -> Self::Slot;

    /// View a slot at `world` as a computation.
    fn force(world: &Context, slot: Self::Slot) -> Forcing<Self>;

    /// Feed the computation `arg` to `f` at `world`: passed unevaluated under
    /// call-by-name, evaluated first under call-by-value.
    fn sequence(world: &Context, b: Annot, arg: Forcing<Self>, f: SemFun<Self>) -> Forcing<Self>;

    /// Annotation coercion 0 ⊑ 1 on environment entries.
    fn coerce_up(slot: Self::Slot) -> Self::Slot;

    /// Rebase a slot to a larger world.
    fn weaken_slot(slot: &Self::Slot, world: &Context) -> Self::Slot;
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum StrategyKind {
    Cbn,
    Cbv,
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyKind::Cbn => "cbn",
            StrategyKind::Cbv => "cbv",
        })
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<StrategyKind, String> {
        match s {
            "cbn" => Ok(StrategyKind::Cbn),
            "cbv" => Ok(StrategyKind::Cbv),
            other => Err(format!("unknown strategy `{other}` (expected cbn or cbv)")),
        }
    }
}

/// Call-by-name.
pub struct Cbn;

/// Call-by-value.
pub struct Cbv;

/// A neutral term together with the world it is typed in.
#[derive(Clone)]
pub struct Neutral {
    term: TermRef,
    world: Context,
}

impl Neutral {
    pub fn new(term: TermRef, world: &Context) -> Neutral {
        Neutral {
            term,
            world: world.clone(),
        }
    }

    pub fn term(&self) -> &TermRef {
        &self.term
    }

    pub fn world(&self) -> &Context {
        &self.world
    }

    /// The term weakened into `world`.
    pub fn at(&self, world: &Context) -> TermRef {
        debug_assert!(
            self.world.is_suffix_of(world),
            "neutral read at a world that does not extend its own"
        );
        weaken(&self.term, world.len() - self.world.len())
    }
}

/// Answer: a term at a world and annotation.
#[derive(Clone, Debug)]
pub struct Answer {
    pub term: TermRef,
    pub world: Context,
    pub annot: Annot,
}

/// Continuation: accepts a strong value at a future world.
pub type Cont<S> = Arc<dyn Fn(&Context, Strong<S>) -> TermRef + Send + Sync>;

/// World-polymorphic semantic function.
pub struct SemFun<S: Strategy> {
    world: Context,
    f: Arc<dyn Fn(&Context, Annot, S::Slot) -> Forcing<S> + Send + Sync>,
}

impl<S: Strategy> Clone for SemFun<S> {
    fn clone(&self) -> Self {
        SemFun {
            world: self.world.clone(),
            f: self.f.clone(),
        }
    }
}

impl<S: Strategy> SemFun<S> {
    pub fn new(
        world: &Context,
        f: impl Fn(&Context, Annot, S::Slot) -> Forcing<S> + Send + Sync + 'static,
    ) -> SemFun<S> {
        SemFun {
            world: world.clone(),
            f: Arc::new(f),
        }
    }

    /// Apply at `world`; `b` is the annotation of the call site, which may
    /// exceed the one the function was built at.
    pub fn call(&self, world: &Context, b: Annot, arg: S::Slot) -> Forcing<S> {
        debug_assert!(self.world.is_suffix_of(world));
        (self.f)(world, b, arg)
    }

    pub fn world(&self) -> &Context {
        &self.world
    }

    fn retarget(&self, world: &Context) -> SemFun<S> {
        SemFun {
            world: world.clone(),
            f: self.f.clone(),
        }
    }
}

/// Strong value. The constructor is determined by the type: `Atom` at atoms
/// and `bot`, `Inl`/`Inr` at sums, `Fun` at arrows.
pub enum Strong<S: Strategy> {
    Atom(Neutral),
    Inl(Arc<S::Slot>),
    Inr(Arc<S::Slot>),
    Fun(SemFun<S>),
}

impl<S: Strategy> Clone for Strong<S> {
    fn clone(&self) -> Self {
        match self {
            Strong::Atom(n) => Strong::Atom(n.clone()),
            Strong::Inl(x) => Strong::Inl(x.clone()),
            Strong::Inr(x) => Strong::Inr(x.clone()),
            Strong::Fun(f) => Strong::Fun(f.clone()),
        }
    }
}

impl<S: Strategy> Strong<S> {
    /// The neutral term of an atomic value.
    ///
    /// Panics on a non-atomic value; a well-typed evaluation never asks.
    pub fn expect_atom(&self) -> &Neutral {
        match self {
            Strong::Atom(n) => n,
            _ => panic!("expected an atomic value"),
        }
    }

    pub fn expect_fun(&self) -> &SemFun<S> {
        match self {
            Strong::Fun(f) => f,
            _ => panic!("expected a function value"),
        }
    }
}

/// Forcing value: a computation created at `world`.
pub struct Forcing<S: Strategy> {
    world: Context,
    run: Arc<dyn Fn(&Context, Cont<S>) -> TermRef + Send + Sync>,
}

impl<S: Strategy> Clone for Forcing<S> {
    fn clone(&self) -> Self {
        Forcing {
            world: self.world.clone(),
            run: self.run.clone(),
        }
    }
}

impl<S: Strategy> Forcing<S> {
    pub fn new(
        world: &Context,
        f: impl Fn(&Context, Cont<S>) -> TermRef + Send + Sync + 'static,
    ) -> Forcing<S> {
        Forcing {
            world: world.clone(),
            run: Arc::new(f),
        }
    }

    /// Invoke at a future world with a continuation.
    pub fn call(&self, world: &Context, k: Cont<S>) -> TermRef {
        debug_assert!(
            self.world.is_suffix_of(world),
            "computation invoked at a world that does not extend its own"
        );
        (self.run)(world, k)
    }

    pub fn world(&self) -> &Context {
        &self.world
    }
}

/// Wrap a closure as a continuation.
pub fn cont<S: Strategy>(f: impl Fn(&Context, Strong<S>) -> TermRef + Send + Sync + 'static) -> Cont<S> {
    Arc::new(f)
}

/// `ret α := κ ↦ κ·α`.
pub fn ret<S: Strategy>(world: &Context, sv: Strong<S>) -> Forcing<S> {
    Forcing::new(world, move |w1, k| k(w1, sv.clone()))
}

/// `bind φ α := κ ↦ α·(α' ↦ φ·α'·κ)`. `f` runs at the world where the
/// intermediate value is delivered.
pub fn bind<S: Strategy>(
    world: &Context,
    f: impl Fn(&Context, Strong<S>) -> Forcing<S> + Send + Sync + 'static,
    alpha: Forcing<S>,
) -> Forcing<S> {
    let f = Arc::new(f);
    Forcing::new(world, move |w1, k| {
        let f = f.clone();
        alpha.call(w1, cont(move |w2, v| f(w2, v).call(w2, k.clone())))
    })
}

/// The identity continuation at `bot`.
pub fn identity_cont<S: Strategy>() -> Cont<S> {
    cont(|w2, v: Strong<S>| v.expect_atom().at(w2))
}

/// `run α := α·(χ ↦ χ)` at `world`.
pub fn run<S: Strategy>(world: &Context, annot: Annot, alpha: &Forcing<S>) -> Answer {
    Answer {
        term: alpha.call(world, identity_cont()),
        world: world.clone(),
        annot,
    }
}

/// `X w 1 ⊥ → X w 0 ⊥`: wrap the answer in a syntactic reset.
pub fn meta_reset(a: Answer) -> Answer {
    debug_assert_eq!(a.annot, Annot::One);
    Answer {
        term: Term::reset(a.term),
        world: a.world,
        annot: Annot::Zero,
    }
}

/// Monotonicity of annotation-0 call-by-name computations into annotation 1.
///
/// The erased answer formula is instantiated at `bot`, and every answer the
/// continuation returns is closed off with a reset. Sum payloads are coerced
/// recursively; atoms and functions pass through unchanged.
pub fn coerce01_cbn(alpha: Forcing<Cbn>) -> Forcing<Cbn> {
    let world = alpha.world.clone();
    Forcing::new(&world, move |w1, k| {
        alpha.call(
            w1,
            cont(move |w2, sv| Term::reset(k(w2, coerce01_cbn_strong(sv)))),
        )
    })
}

fn coerce01_cbn_strong(sv: Strong<Cbn>) -> Strong<Cbn> {
    match sv {
        Strong::Inl(x) => Strong::Inl(Arc::new(coerce01_cbn((*x).clone()))),
        Strong::Inr(x) => Strong::Inr(Arc::new(coerce01_cbn((*x).clone()))),
        atom_or_fun => atom_or_fun,
    }
}

/// Rebase a strong value to a larger world.
pub fn weaken_strong<S: Strategy>(sv: &Strong<S>, world: &Context) -> Strong<S> {
    match sv {
        Strong::Atom(n) => Strong::Atom(Neutral::new(n.at(world), world)),
        Strong::Inl(x) => Strong::Inl(Arc::new(S::weaken_slot(x, world))),
        Strong::Inr(x) => Strong::Inr(Arc::new(S::weaken_slot(x, world))),
        Strong::Fun(f) => {
            debug_assert!(f.world.is_suffix_of(world));
            Strong::Fun(f.retarget(world))
        }
    }
}

/// Rebase a computation to a larger world; only the bookkeeping changes.
pub fn weaken_forcing<S: Strategy>(alpha: &Forcing<S>, world: &Context) -> Forcing<S> {
    debug_assert!(alpha.world.is_suffix_of(world));
    Forcing {
        world: world.clone(),
        run: alpha.run.clone(),
    }
}

/// Environment: one slot per hypothesis, head first.
pub struct Env<S: Strategy>(Option<Arc<EnvNode<S>>>);

struct EnvNode<S: Strategy> {
    head: S::Slot,
    tail: Env<S>,
    len: usize,
}

impl<S: Strategy> Clone for Env<S> {
    fn clone(&self) -> Self {
        Env(self.0.clone())
    }
}

impl<S: Strategy> Default for Env<S> {
    fn default() -> Self {
        Env(None)
    }
}

impl<S: Strategy> Env<S> {
    /// The unit environment.
    pub fn unit() -> Env<S> {
        Env(None)
    }

    pub fn push(&self, slot: S::Slot) -> Env<S> {
        Env(Some(Arc::new(EnvNode {
            head: slot,
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

    /// `Fst`. Panics on the unit environment.
    pub fn head(&self) -> &S::Slot {
        &self.0.as_ref().expect("environment shorter than its context").head
    }

    /// `Snd`.
    pub fn tail(&self) -> Env<S> {
        self.0
            .as_ref()
            .expect("environment shorter than its context")
            .tail
            .clone()
    }

    pub fn iter(&self) -> impl Iterator<Item = &S::Slot> {
        let mut cur = self.0.as_deref();
        std::iter::from_fn(move || {
            let node = cur?;
            cur = node.tail.0.as_deref();
            Some(&node.head)
        })
    }

    /// Apply `f` to every entry, keeping the order.
    pub fn map(&self, f: &impl Fn(&S::Slot) -> S::Slot) -> Env<S> {
        let entries: Vec<S::Slot> = self.iter().map(f).collect();
        entries
            .into_iter()
            .rev()
            .fold(Env::unit(), |env, slot| env.push(slot))
    }

    /// Coerce every entry from annotation 0 to 1.
    pub fn coerce_up(&self) -> Env<S> {
        self.map(&|s| S::coerce_up(s.clone()))
    }

    /// Pointwise weakening.
    pub fn weaken(&self, world: &Context) -> Env<S> {
        self.map(&|s| S::weaken_slot(s, world))
    }
}

impl Strategy for Cbn {
    type Slot = Forcing<Cbn>;

    const KIND: StrategyKind = StrategyKind::Cbn;

    fn inject(sv: Strong<Cbn>) -> Forcing<Cbn> {
        let world = match &sv {
            Strong::Atom(n) => n.world.clone(),
            Strong::Inl(x) | Strong::Inr(x) => x.world.clone(),
            Strong::Fun(f) => f.world.clone(),
        };
        ret(&world, sv)
    }

    fn force(_world: &Context, slot: Forcing<Cbn>) -> Forcing<Cbn> {
        slot
    }

    fn sequence(world: &Context, b: Annot, arg: Forcing<Cbn>, f: SemFun<Cbn>) -> Forcing<Cbn> {
        f.call(world, b, arg)
    }

    fn coerce_up(slot: Forcing<Cbn>) -> Forcing<Cbn> {
        coerce01_cbn(slot)
    }

    fn weaken_slot(slot: &Forcing<Cbn>, world: &Context) -> Forcing<Cbn> {
        weaken_forcing(slot, world)
    }
}

impl Strategy for Cbv {
    type Slot = Strong<Cbv>;

    const KIND: StrategyKind = StrategyKind::Cbv;

    fn inject(sv: Strong<Cbv>) -> Strong<Cbv> {
        sv
    }

    fn force(world: &Context, slot: Strong<Cbv>) -> Forcing<Cbv> {
        ret(world, slot)
    }

    fn sequence(world: &Context, b: Annot, arg: Forcing<Cbv>, f: SemFun<Cbv>) -> Forcing<Cbv> {
        bind(world, move |w, v| f.call(w, b, v), arg)
    }

    // Strong values carry no annotation at runtime.
    fn coerce_up(slot: Strong<Cbv>) -> Strong<Cbv> {
        slot
    }

    fn weaken_slot(slot: &Strong<Cbv>, world: &Context) -> Strong<Cbv> {
        weaken_strong(slot, world)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{print_term_in, Formula};

    fn bot_world(n: usize) -> Context {
        Context::from_outermost(std::iter::repeat(Formula::Bot).take(n))
    }

    #[test]
    fn run_of_ret_is_identity() {
        let w = bot_world(1);
        let v: Forcing<Cbv> = ret(&w, Strong::Atom(Neutral::new(Term::hyp(), &w)));
        assert_eq!(run(&w, Annot::Zero, &v).term, Term::hyp());
    }

    #[test]
    fn ret_of_injection_feeds_the_branch() {
        let w = bot_world(1);
        let inj: Forcing<Cbv> = ret(&w, Strong::Inl(Arc::new(Strong::Atom(Neutral::new(Term::hyp(), &w)))));
        let k = cont(|w2, v: Strong<Cbv>| match v {
            Strong::Inl(x) => Term::inl(x.expect_atom().at(w2)),
            Strong::Inr(x) => Term::inr(x.expect_atom().at(w2)),
            _ => unreachable!(),
        });
        assert_eq!(inj.call(&w, k), Term::inl(Term::hyp()));
    }

    #[test]
    fn ret_weakens_into_the_continuation_world() {
        let w = bot_world(1);
        let w2 = w.extend(Formula::Bot);
        let v: Forcing<Cbn> = ret(&w, Strong::Atom(Neutral::new(Term::hyp(), &w)));
        assert_eq!(run(&w2, Annot::Zero, &v).term, Term::wkn(Term::hyp()));
    }

    #[test]
    fn meta_reset_wraps() {
        let w = bot_world(1);
        let a = Answer {
            term: Term::hyp(),
            world: w.clone(),
            annot: Annot::One,
        };
        let r = meta_reset(a);
        assert_eq!(r.term, Term::reset(Term::hyp()));
        assert_eq!(r.annot, Annot::Zero);
        let rr = meta_reset(Answer { annot: Annot::One, ..r });
        assert_eq!(print_term_in(&rr.term, 1), "<<x0>>");
    }

    #[test]
    fn coercion_inserts_a_reset() {
        let w = bot_world(1);
        let v: Forcing<Cbn> = ret(&w, Strong::Atom(Neutral::new(Term::hyp(), &w)));
        assert_eq!(run(&w, Annot::One, &coerce01_cbn(v)).term, Term::reset(Term::hyp()));
    }

    #[test]
    fn coercion_of_unit_environment() {
        let env: Env<Cbn> = Env::unit();
        assert!(env.coerce_up().is_empty());
    }

    #[test]
    fn strong_weakening() {
        let w = bot_world(1);
        let w2 = w.extend(Formula::Bot);
        let sv: Strong<Cbv> = Strong::Atom(Neutral::new(Term::hyp(), &w));
        let weakened = weaken_strong(&sv, &w2);
        assert_eq!(weakened.expect_atom().term(), &Term::wkn(Term::hyp()));
        let same = weaken_strong(&sv, &w);
        assert_eq!(same.expect_atom().term(), &Term::hyp());
        let w3 = w2.extend(Formula::Bot);
        let twice = weaken_strong(&weaken_strong(&sv, &w2), &w3);
        assert_eq!(twice.expect_atom().term(), weaken_strong(&sv, &w3).expect_atom().term());
    }

    #[test]
    fn bind_laws_on_atoms() {
        let w = bot_world(2);
        let sv: Strong<Cbv> = Strong::Atom(Neutral::new(Term::wkn(Term::hyp()), &w));
        let f = |w: &Context, v: Strong<Cbv>| {
            let t = Term::reset(v.expect_atom().at(w));
            ret(w, Strong::Atom(Neutral::new(t, w)))
        };
        let lhs = bind(&w, f, ret(&w, sv.clone()));
        let rhs = f(&w, sv.clone());
        assert_eq!(run(&w, Annot::Zero, &lhs).term, run(&w, Annot::Zero, &rhs).term);
        let v = ret(&w, sv);
        let right = bind(&w, |w, x| ret(w, x), v.clone());
        assert_eq!(run(&w, Annot::Zero, &right).term, run(&w, Annot::Zero, &v).term);
    }
}
