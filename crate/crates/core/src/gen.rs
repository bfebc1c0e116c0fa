//! Seeded random generation of well-typed terms.
//!
//! Generation is type-directed: at each node the candidate rules whose
//! conclusion matches the goal are shuffled and tried in turn, backtracking
//! on failure. A node budget bounds the search.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Annot, Context, Formula, Term, TermRef};

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub seed: u64,
    pub max_depth: usize,
    pub target_type: Formula,
    pub allow_control: bool,
    pub annot: Annot,
    /// Emit resets (at `bot`).
    pub allow_reset: bool,
    /// Emit injections and case analyses.
    pub allow_sums: bool,
}

impl GenConfig {
    pub fn new(seed: u64, max_depth: usize, target_type: Formula) -> GenConfig {
        GenConfig {
            seed,
            max_depth,
            target_type,
            allow_control: false,
            annot: Annot::Zero,
            allow_reset: true,
            allow_sums: true,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("no term of type {ty} found within {attempts} attempts")]
pub struct GenError {
    pub ty: Formula,
    pub attempts: usize,
}

const ATTEMPTS: usize = 3;
const NODE_BUDGET: usize = 400;

/// A term `t` with `check(ctx, cfg.annot, t, cfg.target_type)`.
pub fn gen_typed_term(cfg: &GenConfig, ctx: &Context) -> Result<TermRef, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..ATTEMPTS {
        let mut g = Gen {
            cfg,
            rng: &mut rng,
            budget: NODE_BUDGET,
        };
        if let Some(t) = g.term(ctx, cfg.annot, &cfg.target_type, cfg.max_depth) {
            return Ok(t);
        }
    }
    Err(GenError {
        ty: cfg.target_type.clone(),
        attempts: ATTEMPTS,
    })
}

/// A random formula over atoms `a`, `b` and `bot` of at most `depth`
/// connectives deep.
pub fn gen_formula<R: Rng>(rng: &mut R, depth: usize, allow_sums: bool) -> Formula {
    let leaf = |rng: &mut R| match rng.gen_range(0..3) {
        0 => Formula::Bot,
        1 => Formula::atom("a"),
        _ => Formula::atom("b"),
    };
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng);
    }
    let l = gen_formula(rng, depth - 1, allow_sums);
    let r = gen_formula(rng, depth - 1, allow_sums);
    if allow_sums && rng.gen_bool(0.3) {
        Formula::sum(l, r)
    } else {
        Formula::arrow(l, r)
    }
}

#[derive(Clone, Copy)]
enum Move {
    Var(usize),
    Lam,
    Inl,
    Inr,
    AppVar(usize),
    Beta,
    CaseVar(usize),
    CaseAnn,
    AppAnn,
    Reset,
    Shift,
}

struct Gen<'a> {
    cfg: &'a GenConfig,
    rng: &'a mut ChaCha8Rng,
    budget: usize,
}

impl Gen<'_> {
    fn aux_type(&mut self, ctx: &Context, goal: &Formula) -> Formula {
        match self.rng.gen_range(0..4) {
            0 => goal.clone(),
            1 if !ctx.is_empty() => {
                let i = self.rng.gen_range(0..ctx.len());
                ctx.get(i).expect("in range").clone()
            }
            _ => gen_formula(self.rng, 1, self.cfg.allow_sums),
        }
    }

    fn moves(&self, ctx: &Context, b: Annot, ty: &Formula, depth: usize) -> Vec<Move> {
        let mut out: Vec<Move> = ctx
            .iter()
            .enumerate()
            .filter(|(_, a)| *a == ty)
            .map(|(i, _)| Move::Var(i))
            .collect();
        if depth == 0 {
            return out;
        }
        match ty {
            Formula::Arrow(..) => out.push(Move::Lam),
            Formula::Sum(..) if self.cfg.allow_sums => out.extend([Move::Inl, Move::Inr]),
            _ => {}
        }
        for (i, a) in ctx.iter().enumerate() {
            match a {
                Formula::Arrow(_, cod) if **cod == *ty => out.push(Move::AppVar(i)),
                Formula::Sum(..) if self.cfg.allow_sums => out.push(Move::CaseVar(i)),
                _ => {}
            }
        }
        out.extend([Move::Beta, Move::AppAnn]);
        if self.cfg.allow_sums {
            out.push(Move::CaseAnn);
        }
        if self.cfg.allow_reset && *ty == Formula::Bot {
            out.push(Move::Reset);
        }
        if self.cfg.allow_control && b == Annot::One {
            out.push(Move::Shift);
        }
        out
    }

    fn term(&mut self, ctx: &Context, b: Annot, ty: &Formula, depth: usize) -> Option<TermRef> {
        let mut moves = self.moves(ctx, b, ty, depth);
        moves.shuffle(self.rng);
        for m in moves {
            if self.budget == 0 {
                return None;
            }
            self.budget -= 1;
            if let Some(t) = self.apply(m, ctx, b, ty, depth) {
                return Some(t);
            }
        }
        None
    }

    fn apply(&mut self, m: Move, ctx: &Context, b: Annot, ty: &Formula, depth: usize) -> Option<TermRef> {
        let d = depth.saturating_sub(1);
        Some(match m {
            Move::Var(i) => Term::var(i),
            Move::Lam => {
                let Formula::Arrow(a, cod) = ty else { unreachable!() };
                let body = self.term(&ctx.extend((**a).clone()), b, cod, d)?;
                Term::lam((**a).clone(), body)
            }
            Move::Inl | Move::Inr => {
                let Formula::Sum(l, r) = ty else { unreachable!() };
                if matches!(m, Move::Inl) {
                    Term::inl(self.term(ctx, b, l, d)?)
                } else {
                    Term::inr(self.term(ctx, b, r, d)?)
                }
            }
            Move::AppVar(i) => {
                let Some(Formula::Arrow(a, _)) = ctx.get(i) else { unreachable!() };
                let a = (**a).clone();
                Term::app(Term::var(i), self.term(ctx, b, &a, d)?)
            }
            Move::Beta => {
                let a = self.aux_type(ctx, ty);
                let body = self.term(&ctx.extend(a.clone()), b, ty, d)?;
                let arg = self.term(ctx, b, &a, d)?;
                Term::app(Term::lam(a, body), arg)
            }
            Move::CaseVar(i) => {
                let Some(Formula::Sum(l, r)) = ctx.get(i) else { unreachable!() };
                let (l, r) = ((**l).clone(), (**r).clone());
                let lb = self.term(&ctx.extend(l), b, ty, d)?;
                let rb = self.term(&ctx.extend(r), b, ty, d)?;
                Term::case(Term::var(i), lb, rb)
            }
            Move::CaseAnn => {
                let (l, r) = (self.aux_type(ctx, ty), self.aux_type(ctx, ty));
                let sum = Formula::sum(l.clone(), r.clone());
                let s = self.term(ctx, b, &sum, d)?;
                let lb = self.term(&ctx.extend(l), b, ty, d)?;
                let rb = self.term(&ctx.extend(r), b, ty, d)?;
                Term::case(Term::ann(s, sum), lb, rb)
            }
            Move::AppAnn => {
                let a = self.aux_type(ctx, ty);
                let fty = Formula::arrow(a.clone(), ty.clone());
                let f = self.term(ctx, b, &fty, d)?;
                let arg = self.term(ctx, b, &a, d)?;
                Term::app(Term::ann(f, fty), arg)
            }
            Move::Reset => Term::reset(self.term(ctx, Annot::One, &Formula::Bot, d)?),
            Move::Shift => {
                let k = ty.clone().negate();
                Term::shift(self.term(&ctx.extend(k), Annot::One, &Formula::Bot, d)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typing::check;

    #[test]
    fn depth_zero_is_a_variable() {
        let a = Formula::atom("a");
        let ctx = Context::empty().extend(a.clone());
        let t = gen_typed_term(&GenConfig::new(7, 0, a), &ctx).unwrap();
        assert_eq!(t, Term::hyp());
    }

    #[test]
    fn uninhabited_goal_fails() {
        let err = gen_typed_term(&GenConfig::new(1, 0, Formula::atom("a")), &Context::empty()).unwrap_err();
        assert_eq!(err.attempts, ATTEMPTS);
    }

    #[test]
    fn closed_disjunction() {
        let a = Formula::atom("a");
        let ty = Formula::sum(Formula::arrow(a.clone(), a.clone()), a);
        let t = gen_typed_term(&GenConfig::new(3, 4, ty.clone()), &Context::empty()).unwrap();
        assert!(check(&Context::empty(), Annot::Zero, &t, &ty).is_ok());
    }

    #[test]
    fn control_can_appear() {
        let ctx = Context::empty().extend(Formula::Bot);
        let found = (0..200).any(|seed| {
            let mut cfg = GenConfig::new(seed, 3, Formula::Bot);
            cfg.allow_control = true;
            cfg.annot = Annot::One;
            gen_typed_term(&cfg, &ctx).is_ok_and(|t| t.contains_control() && t.has_undelimited_shift())
        });
        assert!(found);
    }

    #[test]
    fn seeds_reproduce() {
        let ty = Formula::arrow(Formula::atom("a"), Formula::atom("a"));
        let cfg = GenConfig::new(42, 4, ty);
        assert_eq!(
            gen_typed_term(&cfg, &Context::empty()),
            gen_typed_term(&cfg, &Context::empty())
        );
    }
}
