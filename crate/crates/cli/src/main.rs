use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use tdpe::corpus::{builtin_corpus, run_corpus, run_entries, Report};
use tdpe::equational::{from_derivation, rewrite_search, SearchConfig, Theory};
use tdpe::gen::{gen_typed_term, GenConfig};
use tdpe::syntax::{elaborate, parse_context, parse_formula, print_term_in, Annot, Context, Formula, TermRef};
use tdpe::typing::{check, synth};
use tdpe::{extract_disjunct, tdpe, StrategyKind};

#[derive(Parser)]
#[command(name = "tdpe", version, about = "Normalize lambda terms with sums and shift/reset")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check a term.
    Check {
        #[command(flatten)]
        judgment: JudgmentArgs,
        #[arg(long = "type", value_name = "A")]
        ty: String,
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        json: bool,
    },
    /// Print the normal form of a term.
    Normalize {
        #[arg(long, default_value = "cbv")]
        strategy: StrategyKind,
        #[command(flatten)]
        judgment: JudgmentArgs,
        #[arg(long = "type", value_name = "A")]
        ty: String,
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        json: bool,
    },
    /// Extract the injection from a closed proof of a disjunction.
    Disjunct {
        #[arg(long, default_value = "cbv")]
        strategy: StrategyKind,
        #[arg(long = "type", value_name = "A+B")]
        ty: String,
        #[command(flatten)]
        input: Input,
    },
    /// List the terms reachable by the equational theory.
    Rewrite {
        #[arg(long, default_value = "cbv")]
        theory: StrategyKind,
        #[arg(long, default_value_t = 10)]
        max_steps: usize,
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        judgment: JudgmentArgs,
        /// Needed when the term does not synthesize a type.
        #[arg(long = "type", value_name = "A")]
        ty: Option<String>,
        #[command(flatten)]
        input: Input,
    },
    /// Run a golden corpus.
    #[command(subcommand)]
    Corpus(CorpusCommand),
    /// Generate a random well-typed term.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long = "type", value_name = "A")]
        ty: String,
        /// Allow shift; implies annotation 1.
        #[arg(long)]
        control: bool,
        #[arg(long, default_value = "")]
        ctx: String,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Run the corpus file at PATH.
    Run { path: PathBuf },
    /// Run the built-in examples.
    #[command(alias = "paper")]
    Builtin,
}

#[derive(Args)]
struct JudgmentArgs {
    /// Hypotheses, outermost first: `x : A, y : B`.
    #[arg(long, default_value = "")]
    ctx: String,
    #[arg(long, default_value = "0", value_parser = parse_annot)]
    annot: Annot,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// File holding the term.
    file: Option<PathBuf>,
    #[arg(long)]
    expr: Option<String>,
}

fn parse_annot(s: &str) -> Result<Annot, String> {
    s.parse::<u8>()
        .ok()
        .and_then(Annot::from_bit)
        .ok_or_else(|| format!("annotation must be 0 or 1, not `{s}`"))
}

enum Failure {
    /// Ill-typed input or a failed comparison.
    Check(String),
    /// Unreadable or unparsable input.
    Usage(String),
}

type Outcome = Result<(), Failure>;

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

struct Loaded {
    names: Vec<Arc<str>>,
    ctx: Context,
    term: TermRef,
}

fn load(input: &Input, ctx_src: &str) -> Result<Loaded, Failure> {
    let src = match (&input.expr, &input.file) {
        (Some(e), _) => e.clone(),
        (None, Some(path)) => std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        (None, None) => unreachable!("clap requires an input"),
    };
    let entries = parse_context(ctx_src).map_err(|e| usage(format!("--ctx: {e}")))?;
    let names: Vec<Arc<str>> = entries.iter().map(|(n, _)| n.clone()).collect();
    let ctx = Context::from_outermost(entries.into_iter().map(|(_, f)| f));
    let term = elaborate(src.trim(), &names).map_err(usage)?;
    Ok(Loaded { names, ctx, term })
}

fn formula(src: &str) -> Result<Formula, Failure> {
    parse_formula(src).map_err(|e| usage(format!("--type: {e}")))
}

fn cmd_check(judgment: &JudgmentArgs, ty: &str, input: &Input, as_json: bool) -> Outcome {
    let ty = formula(ty)?;
    let l = load(input, &judgment.ctx)?;
    let res = check(&l.ctx, judgment.annot, &l.term, &ty);
    if as_json {
        let report = match &res {
            Ok(d) => json!({
                "ok": true,
                "judgment": d.judgment.to_string(),
                "term": print_term_in(&l.term, l.ctx.len()),
                "height": d.height(),
            }),
            Err(e) => json!({"ok": false, "error": e.to_string()}),
        };
        println!("{report}");
    }
    match res {
        Ok(d) => {
            if !as_json {
                println!("ok: {}", d.judgment);
            }
            Ok(())
        }
        Err(e) => Err(Failure::Check(e.to_string())),
    }
}

fn cmd_normalize(strategy: StrategyKind, judgment: &JudgmentArgs, ty: &str, input: &Input, as_json: bool) -> Outcome {
    let ty = formula(ty)?;
    let l = load(input, &judgment.ctx)?;
    let r = tdpe(strategy, &l.ctx, judgment.annot, &l.term, &ty).map_err(|e| Failure::Check(e.to_string()))?;
    if as_json {
        let report = json!({
            "strategy": strategy.to_string(),
            "input": print_term_in(&l.term, l.ctx.len()),
            "output": r.printed(),
            "class": format!("{:?}", r.class),
        });
        println!("{report}");
    } else {
        println!("{}", r.printed());
    }
    Ok(())
}

fn cmd_disjunct(strategy: StrategyKind, ty: &str, input: &Input) -> Outcome {
    let ty = formula(ty)?;
    let l = load(input, "")?;
    let (side, r) = extract_disjunct(strategy, &l.term, &ty).map_err(|e| Failure::Check(e.to_string()))?;
    let (tdpe::syntax::Term::Inl(payload) | tdpe::syntax::Term::Inr(payload)) = &*r.term else {
        unreachable!("extract_disjunct returns an injection")
    };
    println!("{side} {}", print_term_in(payload, 0));
    Ok(())
}

fn cmd_rewrite(
    theory: Theory,
    max_steps: usize,
    trace: bool,
    judgment: &JudgmentArgs,
    ty: Option<&str>,
    input: &Input,
) -> Outcome {
    let l = load(input, &judgment.ctx)?;
    let d = match ty {
        Some(ty) => check(&l.ctx, judgment.annot, &l.term, &formula(ty)?),
        None => synth(&l.ctx, judgment.annot, &l.term),
    }
    .map_err(|e| Failure::Check(e.to_string()))?;
    let source = from_derivation(&d, &l.names, theory).map_err(|e| Failure::Check(e.to_string()))?;
    let result = rewrite_search(theory, &source, SearchConfig::steps(max_steps));
    for (i, node) in result.nodes.iter().enumerate() {
        let mark = if node.is_normal { " [normal]" } else { "" };
        println!("#{i} depth {}{mark}: {}", node.depth, node.term);
        if trace {
            for step in result.trace(i) {
                let path: Vec<String> = step.path.iter().map(usize::to_string).collect();
                println!("    {} at [{}]: {}", step.rule, path.join("."), step.term);
            }
        }
    }
    println!(
        "{} terms; normal form reached: {}; budget exhausted: {}",
        result.nodes.len(),
        result.normal_form_reached,
        result.budget_exhausted
    );
    Ok(())
}

fn report_outcome(report: &Report) -> Outcome {
    print!("{report}");
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Check("corpus mismatches".into()))
    }
}

fn cmd_gen(seed: u64, depth: usize, ty: &str, control: bool, ctx_src: &str) -> Outcome {
    let ty = formula(ty)?;
    let entries = parse_context(ctx_src).map_err(|e| usage(format!("--ctx: {e}")))?;
    let ctx = Context::from_outermost(entries.into_iter().map(|(_, f)| f));
    let mut cfg = GenConfig::new(seed, depth, ty);
    if control {
        cfg.allow_control = true;
        cfg.annot = Annot::One;
    }
    let t = gen_typed_term(&cfg, &ctx).map_err(|e| Failure::Check(e.to_string()))?;
    println!("{}", print_term_in(&t, ctx.len()));
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Check {
            judgment,
            ty,
            input,
            json,
        } => cmd_check(&judgment, &ty, &input, json),
        Command::Normalize {
            strategy,
            judgment,
            ty,
            input,
            json,
        } => cmd_normalize(strategy, &judgment, &ty, &input, json),
        Command::Disjunct { strategy, ty, input } => cmd_disjunct(strategy, &ty, &input),
        Command::Rewrite {
            theory,
            max_steps,
            trace,
            judgment,
            ty,
            input,
        } => cmd_rewrite(theory, max_steps, trace, &judgment, ty.as_deref(), &input),
        Command::Corpus(CorpusCommand::Run { path }) => report_outcome(&run_corpus(&path).map_err(usage)?),
        Command::Corpus(CorpusCommand::Builtin) => report_outcome(&run_entries(&builtin_corpus())),
        Command::Gen {
            seed,
            depth,
            ty,
            control,
            ctx,
        } => cmd_gen(seed, depth, &ty, control, &ctx),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
