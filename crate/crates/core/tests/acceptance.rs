//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tdpe::corpus::{builtin_corpus, run_entries, CorpusEntry, Outcome};
use tdpe::equational::{from_derivation, parse_eq, rewrite_search, to_debruijn_term, SearchConfig};
use tdpe::eval::eval;
use tdpe::gen::{gen_formula, gen_typed_term, GenConfig};
use tdpe::normalize::gamma_reflect;
use tdpe::semantics::{bind, cont, ret, run, Cbn, Cont, Forcing, Neutral, Strong};
use tdpe::syntax::{
    classify, elaborate, print_term_in, weaken, Annot, Context, Formula, NfClass, Term, TermRef,
};
use tdpe::typing::check;
use tdpe::{extract_disjunct, tdpe, tdpe_cbn, tdpe_cbv, StrategyKind};

const PER_EXAMPLE_LIMIT: Duration = Duration::from_secs(1);
const PROPERTY_SAMPLES: usize = 1000;
const PROPERTY_TIME_LIMIT: Duration = Duration::from_secs(60);
const PROPERTY_MAX_DEPTH: usize = 5;
const DISJUNCTION_SAMPLES: usize = 200;
const MONAD_SAMPLES: usize = 100;
const REWRITE_STEPS: usize = 10;
const PURE_SAMPLES: usize = 200;

struct Verdict {
    ok: bool,
    summary: String,
    details: Vec<String>,
}

impl Verdict {
    fn new(ok: bool, summary: impl Into<String>, details: Vec<String>) -> Verdict {
        Verdict {
            ok,
            summary: summary.into(),
            details,
        }
    }
}

fn closed(src: &str) -> TermRef {
    elaborate(src, &[]).expect("fixture parses")
}

fn entry(id: &str) -> CorpusEntry {
    builtin_corpus().into_iter().find(|e| e.id == id).expect("corpus entry")
}

fn golden_corpus() -> Verdict {
    let report = run_entries(&builtin_corpus());
    let mut details = Vec::new();
    for r in &report.results {
        if r.outcome != Outcome::Pass {
            details.push(format!("{} {}: {:?}", r.id, r.strategy, r.outcome));
        }
        if r.elapsed >= PER_EXAMPLE_LIMIT {
            details.push(format!("{} {}: took {:?}", r.id, r.strategy, r.elapsed));
        }
    }
    let slowest = report.results.iter().map(|r| r.elapsed).max().unwrap_or_default();
    let passed = report.results.iter().filter(|r| r.outcome == Outcome::Pass).count();
    Verdict::new(
        details.is_empty() && report.results.len() == 16,
        format!("{passed}/16 golden outputs match, slowest {slowest:?} (limit 1 s each)"),
        details,
    )
}

fn identification() -> Verdict {
    let s_cbv = StrategyKind::Cbv;
    let s_cbn = StrategyKind::Cbn;
    // (strategy, corpus id, intermediate)
    let pairs = [
        (s_cbv, "ex4", r"\x:bot -> bot. \y:bot. <(\a:bot. <x a>) ((\a:bot. <x a>) y)>"),
        (s_cbv, "ex4", r"\x:bot -> bot. \y:bot. <(\a:bot. <x a>) <x y>>"),
        (s_cbv, "ex6", r"\x:bot. \y:bot -> bot. <<y x>>"),
        (s_cbn, "ex6", r"\x:bot. \y:bot -> bot. <y x>"),
        (s_cbv, "ex7", r"\x:bot. \y:bot -> bot. \z:bot -> bot. <y <z <z x>>>"),
        (s_cbn, "ex7", r"\x:bot. \y:bot -> bot. \z:bot -> bot. <y <z (S k'. z (k' x))>>"),
        (s_cbn, "ex1", r"\x:bot. <x>"),
    ];
    let mut details = Vec::new();
    for (s, id, src) in pairs {
        let e = entry(id);
        let want = e.expected(s);
        match tdpe(s, &Context::empty(), Annot::Zero, &closed(src), &e.ty) {
            Ok(r) if r.printed() == want => {}
            Ok(r) => details.push(format!("{s} {id} `{src}`: got `{}`, want `{want}`", r.printed())),
            Err(err) => details.push(format!("{s} {id} `{src}`: {err}")),
        }
    }
    let n = pairs.len();
    Verdict::new(
        details.is_empty(),
        format!("{}/{n} intermediates normalize like their source", n - details.len()),
        details,
    )
}

// Check (a) re-typing, (b) normal grammar, (c) no undelimited shift at 0.
fn output_properties(ctx: &Context, b: Annot, ty: &Formula, out: &TermRef) -> Result<(), String> {
    check(ctx, b, out, ty).map_err(|e| format!("re-check: {e}"))?;
    if !classify(out).is_normal() {
        return Err("not in the normal grammar".into());
    }
    if b == Annot::Zero && out.has_undelimited_shift() {
        return Err("shift outside a reset at annotation 0".into());
    }
    Ok(())
}

fn property_suite() -> Verdict {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut terms = 0usize;
    let mut with_control = 0usize;
    let mut seed = 0u64;
    while terms < PROPERTY_SAMPLES && seed < 50 * PROPERTY_SAMPLES as u64 {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target = gen_formula(&mut rng, 2, true);
        let ctx_len = rng.gen_range(0..3);
        let ctx = Context::from_outermost((0..ctx_len).map(|_| gen_formula(&mut rng, 2, true)));
        let mut cfg = GenConfig::new(seed, rng.gen_range(1..=PROPERTY_MAX_DEPTH), target.clone());
        match seed % 3 {
            0 => {}
            1 => {
                cfg.annot = Annot::One;
                cfg.allow_control = true;
            }
            _ => cfg.annot = Annot::One,
        }
        let Ok(t) = gen_typed_term(&cfg, &ctx) else { continue };
        terms += 1;
        with_control += usize::from(t.has_undelimited_shift() || matches!(&*t, Term::Shift(_)));
        let mut runs = vec![(StrategyKind::Cbn, tdpe_cbn(&ctx, cfg.annot, &t, &target))];
        if ctx.is_empty() {
            runs.push((StrategyKind::Cbv, tdpe_cbv(&t, cfg.annot, &target)));
        }
        for (s, res) in runs {
            let outcome = res
                .map_err(|e| e.to_string())
                .and_then(|r| output_properties(&ctx, cfg.annot, &target, &r.term));
            if let Err(e) = outcome {
                details.push(format!("seed {seed} {s} `{}`: {e}", print_term_in(&t, ctx.len())));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= PROPERTY_TIME_LIMIT {
        details.push(format!("took {elapsed:?}"));
    }
    Verdict::new(
        details.is_empty() && terms >= PROPERTY_SAMPLES,
        format!(
            "{terms} generated terms ({with_control} with control), {} failures, {elapsed:?} (limit 60 s)",
            details.len()
        ),
        details,
    )
}

fn disjunction_property() -> Verdict {
    let mut details = Vec::new();
    let mut terms = 0usize;
    let mut seed = 0u64;
    while terms < DISJUNCTION_SAMPLES && seed < 100 * DISJUNCTION_SAMPLES as u64 {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xD15);
        let (l, r) = (gen_formula(&mut rng, 2, true), gen_formula(&mut rng, 2, true));
        let sum = Formula::sum(l.clone(), r.clone());
        let cfg = GenConfig::new(seed, 4, sum.clone());
        let Ok(t) = gen_typed_term(&cfg, &Context::empty()) else { continue };
        terms += 1;
        for s in [StrategyKind::Cbv, StrategyKind::Cbn] {
            match extract_disjunct(s, &t, &sum) {
                Ok((_, res)) => {
                    let (side_ty, payload) = match &*res.term {
                        Term::Inl(p) => (&l, p),
                        Term::Inr(p) => (&r, p),
                        _ => unreachable!(),
                    };
                    if let Err(e) = check(&Context::empty(), Annot::Zero, payload, side_ty) {
                        details.push(format!("seed {seed} {s}: component fails to check: {e}"));
                    }
                }
                Err(e) => details.push(format!("seed {seed} {s} `{}`: {e}", print_term_in(&t, 0))),
            }
        }
    }
    Verdict::new(
        details.is_empty() && terms >= DISJUNCTION_SAMPLES,
        format!("{terms} closed disjunction proofs, {} failures", details.len()),
        details,
    )
}

// A world with ⊥, two unary ⊥-functions and a binary sum to draw from.
fn monad_world() -> Context {
    let bb = Formula::arrow(Formula::Bot, Formula::Bot);
    Context::from_outermost([
        Formula::Bot,
        bb.clone(),
        Formula::sum(Formula::Bot, Formula::Bot),
        Formula::arrow(bb.clone(), Formula::Bot),
        Formula::Bot,
    ])
}

fn sample_neutral(rng: &mut ChaCha8Rng, w: &Context) -> Option<TermRef> {
    let mut cfg = GenConfig::new(rng.gen(), 3, Formula::Bot);
    cfg.allow_reset = rng.gen_bool(0.5);
    let t = gen_typed_term(&cfg, w).ok()?;
    let nf = tdpe_cbn(w, Annot::Zero, &t, &Formula::Bot).ok()?.term;
    (classify(&nf) == NfClass::Neutral).then_some(nf)
}

fn sample_cont(rng: &mut ChaCha8Rng, w: &Context) -> Cont<Cbn> {
    let base = w.len();
    match rng.gen_range(0..3) {
        0 => cont(|w2, v: Strong<Cbn>| v.expect_atom().at(w2)),
        1 => cont(|w2, v: Strong<Cbn>| Term::reset(v.expect_atom().at(w2))),
        _ => cont(move |w2, v: Strong<Cbn>| {
            // The unary function at index 3 of the base world.
            let f = weaken(&Term::var(3), w2.len() - base);
            Term::app(f, v.expect_atom().at(w2))
        }),
    }
}

fn sample_fun(rng: &mut ChaCha8Rng) -> Arc<dyn Fn(&Context, Strong<Cbn>) -> Forcing<Cbn> + Send + Sync> {
    let wrap = rng.gen_bool(0.5);
    Arc::new(move |w: &Context, v: Strong<Cbn>| {
        let e = v.expect_atom().at(w);
        let e = if wrap { Term::reset(e) } else { e };
        ret(w, Strong::Atom(Neutral::new(e, w)))
    })
}

fn monad_laws() -> Verdict {
    let w = monad_world();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6A0);
    let mut details = Vec::new();
    let mut neutrals = Vec::new();
    while neutrals.len() < MONAD_SAMPLES {
        if let Some(e) = sample_neutral(&mut rng, &w) {
            neutrals.push(e);
        }
    }
    for e in &neutrals {
        let v: Forcing<Cbn> = ret(&w, Strong::Atom(Neutral::new(e.clone(), &w)));
        let got = run(&w, Annot::Zero, &v).term;
        if &got != e {
            details.push(format!("run(ret e) = `{}` for e = `{}`", print_term_in(&got, w.len()), print_term_in(e, w.len())));
        }
    }
    let env = gamma_reflect(&w, Annot::Zero);
    let mut pairs = 0;
    while pairs < MONAD_SAMPLES {
        let e = &neutrals[pairs];
        let k = sample_cont(&mut rng, &w);
        let f = sample_fun(&mut rng);
        let a = Strong::Atom(Neutral::new(e.clone(), &w));
        // Left identity: bind f (ret a) = f a.
        let f2 = f.clone();
        let lhs = bind(&w, move |w2, x| f2(w2, x), ret(&w, a.clone())).call(&w, k.clone());
        let rhs = f(&w, a).call(&w, k.clone());
        if lhs != rhs {
            details.push(format!("left identity differs at sample {pairs}"));
        }
        // Right identity: bind ret α = α, with α the meaning of a term.
        let mut cfg = GenConfig::new(rng.gen(), 3, Formula::Bot);
        cfg.allow_reset = true;
        let Ok(t) = gen_typed_term(&cfg, &w) else { continue };
        let alpha = eval::<Cbn>(&t, &w, &env, Annot::Zero);
        let lhs = bind(&w, |w2, x| ret(w2, x), alpha.clone()).call(&w, k.clone());
        let rhs = alpha.call(&w, k);
        if lhs != rhs {
            details.push(format!("right identity differs for `{}`", print_term_in(&t, w.len())));
        }
        pairs += 1;
    }
    Verdict::new(
        details.is_empty(),
        format!(
            "run∘ret on {} neutrals, left/right identity on {pairs} pairs, {} failures",
            neutrals.len(),
            details.len()
        ),
        details,
    )
}

fn named_intermediates() -> Verdict {
    let cbv = StrategyKind::Cbv;
    let cbn = StrategyKind::Cbn;
    let cases = [
        (cbv, "ex1", r"\x:bot. <x>"),
        (cbv, "ex4", r"\x:bot -> bot. \y:bot. <(\a:bot. <x a>) ((\a:bot. <x a>) y)>"),
        (cbv, "ex4", r"\x:bot -> bot. \y:bot. <(\a:bot. <x a>) <x y>>"),
        (cbv, "ex6", r"\x:bot. \y:bot -> bot. <<y x>>"),
        (cbn, "ex6", r"\x:bot. \y:bot -> bot. <y x>"),
        (cbv, "ex7", r"\x:bot. \y:bot -> bot. \z:bot -> bot. <y <z <z x>>>"),
        (cbn, "ex7", r"\x:bot. \y:bot -> bot. \z:bot -> bot. <y <z (S k'. z (k' x))>>"),
    ];
    let mut details = Vec::new();
    for (th, id, src) in cases {
        let e = entry(id);
        let d = check(&Context::empty(), Annot::Zero, &e.input, &e.ty).expect("corpus checks");
        let source = from_derivation(&d, &[], th).expect("closed");
        let target = parse_eq(src, &[], &Context::empty(), Annot::Zero, &e.ty, th).expect("fixture checks");
        let result = rewrite_search(th, &source, SearchConfig::steps(REWRITE_STEPS));
        if result.find(&target).is_none() {
            details.push(format!("{th} {id}: `{src}` not reachable"));
        }
    }
    // The CBN theory takes exactly one step on ex7.
    let e = entry("ex7");
    let d = check(&Context::empty(), Annot::Zero, &e.input, &e.ty).expect("corpus checks");
    let source = from_derivation(&d, &[], cbn).expect("closed");
    let one = rewrite_search(cbn, &source, SearchConfig::steps(REWRITE_STEPS));
    if one.nodes.len() != 2 || !one.nodes[1].is_normal || one.nodes[1].depth != 1 {
        details.push(format!("cbn ex7: expected a single one-step normal result, found {} terms", one.nodes.len()));
    }
    let n = cases.len() + 1;
    Verdict::new(
        details.is_empty(),
        format!("{}/{n} named rewrite results reproduced", n - details.len()),
        details,
    )
}

fn closure_identification() -> Verdict {
    let mut details = Vec::new();
    let mut compared = 0usize;
    for e in builtin_corpus() {
        let d = check(&Context::empty(), Annot::Zero, &e.input, &e.ty).expect("corpus checks");
        for th in [StrategyKind::Cbv, StrategyKind::Cbn] {
            let want = tdpe(th, &Context::empty(), Annot::Zero, &e.input, &e.ty)
                .expect("corpus normalizes")
                .printed();
            let source = from_derivation(&d, &[], th).expect("closed");
            let result = rewrite_search(th, &source, SearchConfig::steps(REWRITE_STEPS));
            for (i, node) in result.nodes.iter().enumerate() {
                if node.term.has_kapp() {
                    continue;
                }
                compared += 1;
                let db = to_debruijn_term(&node.term, &[], &Context::empty());
                let got = tdpe(th, &Context::empty(), Annot::Zero, &db, &e.ty).map(|r| r.printed());
                match got {
                    Ok(g) if g == want => {}
                    other => {
                        let rules: Vec<String> = result.trace(i).iter().map(|s| s.rule.to_string()).collect();
                        details.push(format!(
                            "{} {th}: `{}` via {} normalizes to {:?}, source to `{want}`",
                            e.id,
                            node.term,
                            rules.join(""),
                            other
                        ));
                    }
                }
            }
        }
    }
    Verdict::new(
        details.is_empty(),
        format!(
            "{compared} KApp-free terms within {REWRITE_STEPS} steps compared, {} not identified",
            details.len()
        ),
        details,
    )
}

fn pure_fragment() -> Verdict {
    let mut details = Vec::new();
    let mut terms = 0usize;
    let mut seed = 0u64;
    while terms < PURE_SAMPLES && seed < 100 * PURE_SAMPLES as u64 {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E7);
        let target = gen_formula(&mut rng, 3, false);
        let mut cfg = GenConfig::new(seed, 5, target.clone());
        cfg.allow_reset = false;
        cfg.allow_sums = false;
        let Ok(t) = gen_typed_term(&cfg, &Context::empty()) else { continue };
        terms += 1;
        let n = tdpe_cbn(&Context::empty(), Annot::Zero, &t, &target).map(|r| r.printed());
        let v = tdpe_cbv(&t, Annot::Zero, &target).map(|r| r.printed());
        if n != v {
            details.push(format!("`{}`: cbn {n:?}, cbv {v:?}", print_term_in(&t, 0)));
        }
    }
    Verdict::new(
        details.is_empty() && terms >= PURE_SAMPLES,
        format!("{terms} pure terms, {} strategy disagreements", details.len()),
        details,
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("1  golden corpus", golden_corpus),
        ("2  identification", identification),
        ("3  property suite", property_suite),
        ("4  disjunction property", disjunction_property),
        ("5  monad laws", monad_laws),
        ("6a equational: named intermediates", named_intermediates),
        ("6b equational: closure within 10 steps", closure_identification),
        ("7  pure-fragment cross-check", pure_fragment),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let v = run();
        let status = if v.ok { "PASS" } else { "FAIL" };
        println!("{status} criterion {name}: {}", v.summary);
        for d in v.details.iter().take(10) {
            println!("       {d}");
        }
        failed += usize::from(!v.ok);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
