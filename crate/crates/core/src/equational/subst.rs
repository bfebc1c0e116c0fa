//! Capture-avoiding substitution, continuation substitution and pure
//! evaluation contexts.

use std::collections::HashSet;
use std::sync::Arc;

use super::{EqRef, EqTerm, Name};

/// Free names, including continuation variables in `KApp` heads.
pub fn free_vars(t: &EqTerm) -> HashSet<Name> {
    let mut out = HashSet::new();
    fv(t, &mut Vec::new(), &mut out);
    out
}

fn fv(t: &EqTerm, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
    let under = |n: &Name, b: &EqTerm, bound: &mut Vec<Name>, out: &mut HashSet<Name>| {
        bound.push(n.clone());
        fv(b, bound, out);
        bound.pop();
    };
    match t {
        EqTerm::Var(n) => {
            if !bound.contains(n) {
                out.insert(n.clone());
            }
        }
        EqTerm::KApp(k, p) => {
            if !bound.contains(k) {
                out.insert(k.clone());
            }
            fv(p, bound, out);
        }
        EqTerm::Lam(n, _, b) | EqTerm::Shift(n, _, b) => under(n, b, bound, out),
        EqTerm::Case {
            scrutinee,
            lname,
            lbody,
            rname,
            rbody,
            ..
        } => {
            fv(scrutinee, bound, out);
            under(lname, lbody, bound, out);
            under(rname, rbody, bound, out);
        }
        EqTerm::App(..) | EqTerm::Inl(..) | EqTerm::Inr(..) | EqTerm::Reset(_) => {
            for c in t.children() {
                fv(c, bound, out);
            }
        }
    }
}

/// Free occurrences of `x` outside `KApp` heads.
pub fn occurs_as_value(t: &EqTerm, x: &Name) -> bool {
    match t {
        EqTerm::Var(n) => n == x,
        EqTerm::Lam(n, _, b) | EqTerm::Shift(n, _, b) => n != x && occurs_as_value(b, x),
        EqTerm::Case {
            scrutinee,
            lname,
            lbody,
            rname,
            rbody,
            ..
        } => {
            occurs_as_value(scrutinee, x)
                || (lname != x && occurs_as_value(lbody, x))
                || (rname != x && occurs_as_value(rbody, x))
        }
        _ => t.children().iter().any(|c| occurs_as_value(c, x)),
    }
}

/// A name based on `base` outside `avoid`.
pub fn fresh(base: &str, avoid: &HashSet<Name>) -> Name {
    let mut cand = base.to_string();
    while avoid.contains(cand.as_str()) {
        cand.push('\'');
    }
    Arc::from(cand)
}

/// Rename free occurrences of `from` to `to`, which must be fresh.
pub fn rename(t: &EqRef, from: &Name, to: &Name) -> EqRef {
    let sw = |n: &Name| if n == from { to.clone() } else { n.clone() };
    match &**t {
        EqTerm::Var(n) => Arc::new(EqTerm::Var(sw(n))),
        EqTerm::KApp(k, p) => EqTerm::kapp(sw(k), rename(p, from, to)),
        EqTerm::Lam(n, _, _) | EqTerm::Shift(n, _, _) if n == from => t.clone(),
        EqTerm::Case {
            scrutinee,
            lname,
            lty,
            lbody,
            rname,
            rty,
            rbody,
        } => Arc::new(EqTerm::Case {
            scrutinee: rename(scrutinee, from, to),
            lname: lname.clone(),
            lty: lty.clone(),
            lbody: if lname == from { lbody.clone() } else { rename(lbody, from, to) },
            rname: rname.clone(),
            rty: rty.clone(),
            rbody: if rname == from { rbody.clone() } else { rename(rbody, from, to) },
        }),
        _ => map_children(t, |c| rename(c, from, to)),
    }
}

fn map_children(t: &EqRef, mut f: impl FnMut(&EqRef) -> EqRef) -> EqRef {
    let mut out = t.clone();
    for (i, c) in t.children().into_iter().enumerate() {
        out = out.with_child(i, f(c));
    }
    out
}

// Make binder `n` safe to push over a body in which names from `danger`
// must stay free: rename it if it would capture one.
fn safe_binder(n: &Name, body: &EqRef, danger: &HashSet<Name>, extra: &EqTerm) -> (Name, EqRef) {
    if !danger.contains(n) {
        return (n.clone(), body.clone());
    }
    let mut avoid = danger.clone();
    body.all_names(&mut avoid);
    extra.all_names(&mut avoid);
    let m = fresh(n, &avoid);
    let body = rename(body, n, &m);
    (m, body)
}

/// `t{s/x}`, renaming binders that would capture free names of `s`.
pub fn substitute(t: &EqRef, x: &Name, s: &EqRef) -> EqRef {
    let danger = free_vars(s);
    subst(t, x, s, &danger)
}

fn subst(t: &EqRef, x: &Name, s: &EqRef, danger: &HashSet<Name>) -> EqRef {
    match &**t {
        EqTerm::Var(n) if n == x => s.clone(),
        EqTerm::Var(_) => t.clone(),
        // A continuation variable is never the target of an ordinary
        // substitution; if it were, the result is an ordinary application.
        EqTerm::KApp(k, p) if k == x => EqTerm::app(s.clone(), subst(p, x, s, danger)),
        EqTerm::KApp(k, p) => EqTerm::kapp(k.clone(), subst(p, x, s, danger)),
        EqTerm::Lam(n, _, _) | EqTerm::Shift(n, _, _) if n == x => t.clone(),
        EqTerm::Lam(n, ty, b) => {
            let (n, b) = safe_binder(n, b, danger, s);
            EqTerm::lam(n, ty.clone(), subst(&b, x, s, danger))
        }
        EqTerm::Shift(n, ty, b) => {
            let (n, b) = safe_binder(n, b, danger, s);
            EqTerm::shift(n, ty.clone(), subst(&b, x, s, danger))
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
            let branch = |n: &Name, b: &EqRef| -> (Name, EqRef) {
                if n == x {
                    return (n.clone(), b.clone());
                }
                let (n, b) = safe_binder(n, b, danger, s);
                let b = subst(&b, x, s, danger);
                (n, b)
            };
            let (lname, lbody) = branch(lname, lbody);
            let (rname, rbody) = branch(rname, rbody);
            Arc::new(EqTerm::Case {
                scrutinee: subst(scrutinee, x, s, danger),
                lname,
                lty: lty.clone(),
                lbody,
                rname,
                rty: rty.clone(),
                rbody,
            })
        }
        EqTerm::App(..) | EqTerm::Inl(..) | EqTerm::Inr(..) | EqTerm::Reset(_) => {
            map_children(t, |c| subst(c, x, s, danger))
        }
    }
}

/// One frame of an evaluation context.
#[derive(Clone, Debug)]
pub enum Frame {
    /// `[] p`
    Arg(EqRef),
    /// `V []`
    Fun(EqRef),
}

/// Evaluation context, frames listed innermost first.
pub type PureCtx = Vec<Frame>;

pub fn plug(ctx: &[Frame], hole: EqRef) -> EqRef {
    ctx.iter().fold(hole, |acc, fr| match fr {
        Frame::Arg(p) => EqTerm::app(acc, p.clone()),
        Frame::Fun(v) => EqTerm::app(v.clone(), acc),
    })
}

pub fn ctx_free_vars(ctx: &[Frame]) -> HashSet<Name> {
    let mut out = HashSet::new();
    for fr in ctx {
        let (Frame::Arg(p) | Frame::Fun(p)) = fr;
        out.extend(free_vars(p));
    }
    out
}

/// Every split `t = F[h]` with `F` a pure context: `F ::= [] | F p | V F`
/// when `value_frames`, otherwise `E ::= [] | E p`.
pub fn decompositions(t: &EqRef, value_frames: bool) -> Vec<(PureCtx, EqRef)> {
    let mut out = vec![(Vec::new(), t.clone())];
    if let EqTerm::App(f, a) = &**t {
        for (mut ctx, h) in decompositions(f, value_frames) {
            ctx.push(Frame::Arg(a.clone()));
            out.push((ctx, h));
        }
        if value_frames && matches!(&**f, EqTerm::Var(_) | EqTerm::Lam(..)) {
            for (mut ctx, h) in decompositions(a, value_frames) {
                ctx.push(Frame::Fun(f.clone()));
                out.push((ctx, h));
            }
        }
    }
    out
}

/// The continuation a `KApp` is replaced by: `E` or `k' ↩ E`.
#[derive(Clone, Debug)]
pub struct KCtx {
    pub head: Option<Name>,
    pub frames: PureCtx,
}

impl KCtx {
    pub fn plug(&self, p: EqRef) -> EqRef {
        let inner = plug(&self.frames, p);
        match &self.head {
            Some(k) => EqTerm::kapp(k.clone(), inner),
            None => inner,
        }
    }

    fn free_vars(&self) -> HashSet<Name> {
        let mut out = ctx_free_vars(&self.frames);
        out.extend(self.head.clone());
        out
    }

    fn as_term(&self) -> EqRef {
        self.plug(EqTerm::var("_"))
    }
}

/// `t{k ⇒ K}`: `(k ↩ p)` becomes `<K[p{k ⇒ K}]>`; other nodes are
/// traversed, renaming binders that would capture free names of `K`.
pub fn ksubstitute(t: &EqRef, k: &Name, kc: &KCtx) -> EqRef {
    let danger = kc.free_vars();
    let witness = kc.as_term();
    ksub(t, k, kc, &danger, &witness)
}

fn ksub(t: &EqRef, k: &Name, kc: &KCtx, danger: &HashSet<Name>, witness: &EqRef) -> EqRef {
    let go = |u: &EqRef| ksub(u, k, kc, danger, witness);
    match &**t {
        EqTerm::Var(_) => t.clone(),
        EqTerm::KApp(k2, p) if k2 == k => EqTerm::reset(kc.plug(go(p))),
        EqTerm::KApp(k2, p) => EqTerm::kapp(k2.clone(), go(p)),
        EqTerm::Lam(n, _, _) | EqTerm::Shift(n, _, _) if n == k => t.clone(),
        EqTerm::Lam(n, ty, b) => {
            let (n, b) = safe_binder(n, b, danger, witness);
            EqTerm::lam(n, ty.clone(), go(&b))
        }
        EqTerm::Shift(n, ty, b) => {
            let (n, b) = safe_binder(n, b, danger, witness);
            EqTerm::shift(n, ty.clone(), go(&b))
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
            let branch = |n: &Name, b: &EqRef| -> (Name, EqRef) {
                if n == k {
                    return (n.clone(), b.clone());
                }
                let (n, b) = safe_binder(n, b, danger, witness);
                let b = go(&b);
                (n, b)
            };
            let (lname, lbody) = branch(lname, lbody);
            let (rname, rbody) = branch(rname, rbody);
            Arc::new(EqTerm::Case {
                scrutinee: go(scrutinee),
                lname,
                lty: lty.clone(),
                lbody,
                rname,
                rty: rty.clone(),
                rbody,
            })
        }
        EqTerm::App(..) | EqTerm::Inl(..) | EqTerm::Inr(..) | EqTerm::Reset(_) => map_children(t, go),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Formula;

    fn n(s: &str) -> Name {
        Arc::from(s)
    }

    #[test]
    fn substitution_replaces_free_occurrences() {
        let id = EqTerm::lam(n("y"), Formula::Bot, EqTerm::var("y"));
        assert_eq!(substitute(&EqTerm::var("x"), &n("x"), &id), id);
        let shadow = EqTerm::lam(n("x"), Formula::Bot, EqTerm::var("x"));
        assert_eq!(substitute(&shadow, &n("x"), &EqTerm::var("z")), shadow);
    }

    #[test]
    fn substitution_avoids_capture() {
        let t = EqTerm::lam(n("y"), Formula::Bot, EqTerm::var("x"));
        let r = substitute(&t, &n("x"), &EqTerm::var("y"));
        match &*r {
            EqTerm::Lam(b, _, body) => {
                assert_ne!(&**b, "y");
                assert_eq!(**body, EqTerm::Var(n("y")));
            }
            _ => panic!("expected a lambda"),
        }
        assert_eq!(r.to_string(), r"\y':bot. y");
    }

    #[test]
    fn ksubstitution_clauses() {
        let empty = KCtx {
            head: None,
            frames: vec![],
        };
        let t = EqTerm::kapp(n("k"), EqTerm::var("y"));
        assert_eq!(ksubstitute(&t, &n("k"), &empty).to_string(), "<y>");
        let other = EqTerm::kapp(n("k'"), EqTerm::var("y"));
        assert_eq!(ksubstitute(&other, &n("k"), &empty), other);
        let nested = EqTerm::kapp(n("k"), EqTerm::kapp(n("k"), EqTerm::var("y")));
        assert_eq!(ksubstitute(&nested, &n("k"), &empty).to_string(), "<<y>>");
        let app_x = KCtx {
            head: Some(n("j")),
            frames: vec![Frame::Arg(EqTerm::var("x"))],
        };
        assert_eq!(ksubstitute(&t, &n("k"), &app_x).to_string(), "<j ↩ (y x)>");
    }

    #[test]
    fn ksubstitution_avoids_capture() {
        let kc = KCtx {
            head: None,
            frames: vec![Frame::Arg(EqTerm::var("y"))],
        };
        let t = EqTerm::lam(n("y"), Formula::Bot, EqTerm::kapp(n("k"), EqTerm::var("y")));
        assert_eq!(ksubstitute(&t, &n("k"), &kc).to_string(), r"\y':bot. <y' y>");
    }

    #[test]
    fn cbv_and_cbn_contexts() {
        // (x (S k. k)) z: CBV reaches the shift through the value x.
        let s = EqTerm::shift(n("k"), Formula::Bot, EqTerm::var("k"));
        let t = EqTerm::app(EqTerm::app(EqTerm::var("x"), s), EqTerm::var("z"));
        let hits = |vf| {
            decompositions(&t, vf)
                .into_iter()
                .filter(|(_, h)| matches!(&**h, EqTerm::Shift(..)))
                .count()
        };
        assert_eq!(hits(true), 1);
        assert_eq!(hits(false), 0);
        let (ctx, h) = decompositions(&t, true)
            .into_iter()
            .find(|(_, h)| matches!(&**h, EqTerm::Shift(..)))
            .unwrap();
        assert_eq!(plug(&ctx, h), t);
    }
}
