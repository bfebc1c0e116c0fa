//! Golden corpus files.
//!
//! One record per line, `id | type | input | cbv | cbn`, with `#` starting a
//! comment line. A `|` that closes the left branch of a pending `case` belongs
//! to the term, not to the record.

use std::fmt;
use std::time::{Duration, Instant};

use crate::normalize::tdpe;
use crate::semantics::StrategyKind;
use crate::syntax::{elaborate, parse_formula, print_term, Annot, Context, ElabError, Formula, SyntaxError, TermRef};
use crate::typing::{check, TypeError};

/// The worked examples, with types chosen by the checker.
pub const BUILTIN_CORPUS: &str = include_str!("../corpus/builtin.tdpe");

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub id: String,
    pub line: usize,
    pub ty: Formula,
    pub input: TermRef,
    pub expected_cbv: String,
    pub expected_cbn: String,
}

impl CorpusEntry {
    pub fn expected(&self, strategy: StrategyKind) -> &str {
        match strategy {
            StrategyKind::Cbv => &self.expected_cbv,
            StrategyKind::Cbn => &self.expected_cbn,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("line {line}: expected 5 fields separated by `|`, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}, {field}: {source}")]
    Syntax {
        line: usize,
        field: &'static str,
        source: SyntaxError,
    },
    #[error("line {line}, {field}: {source}")]
    Elab {
        line: usize,
        field: &'static str,
        source: ElabError,
    },
    #[error("line {line}, {field}: {source}")]
    Type {
        line: usize,
        field: &'static str,
        source: TypeError,
    },
    #[error("line {line}, {field}: `{text}` is not canonical; expected `{canonical}`")]
    NotCanonical {
        line: usize,
        field: &'static str,
        text: String,
        canonical: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Split a record on `|`, keeping the ones that separate case branches.
pub fn split_fields(line: &str) -> Vec<&str> {
    let mut fields = Vec::new();
    let mut pending_cases = 0usize;
    let mut start = 0;
    let mut word_start: Option<usize> = None;
    for (i, c) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        if is_ident_char(c) {
            word_start.get_or_insert(i);
            continue;
        }
        if let Some(ws) = word_start.take() {
            if &line[ws..i] == "case" {
                pending_cases += 1;
            }
        }
        if c == '|' {
            if pending_cases > 0 {
                pending_cases -= 1;
            } else {
                fields.push(line[start..i].trim());
                start = i + 1;
            }
        }
    }
    fields.push(line[start..].trim());
    fields
}

/// Parse a corpus and check every field.
pub fn parse_corpus(src: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut entries = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields = split_fields(text);
        if fields.len() != 5 {
            return Err(CorpusError::FieldCount {
                line,
                found: fields.len(),
            });
        }
        let ty = parse_formula(fields[1]).map_err(|source| CorpusError::Syntax {
            line,
            field: "type",
            source,
        })?;
        let term = |field: &'static str, text: &str| -> Result<TermRef, CorpusError> {
            let t = elaborate(text, &[]).map_err(|source| CorpusError::Elab { line, field, source })?;
            check(&Context::empty(), Annot::Zero, &t, &ty)
                .map_err(|source| CorpusError::Type { line, field, source })?;
            Ok(t)
        };
        let input = term("input", fields[2])?;
        for (field, text) in [("cbv", fields[3]), ("cbn", fields[4])] {
            let canonical = print_term(&*term(field, text)?);
            if canonical != text {
                return Err(CorpusError::NotCanonical {
                    line,
                    field,
                    text: text.to_string(),
                    canonical,
                });
            }
        }
        entries.push(CorpusEntry {
            id: fields[0].to_string(),
            line,
            ty,
            input,
            expected_cbv: fields[3].to_string(),
            expected_cbn: fields[4].to_string(),
        });
    }
    Ok(entries)
}

pub fn builtin_corpus() -> Vec<CorpusEntry> {
    parse_corpus(BUILTIN_CORPUS).expect("built-in corpus is well formed")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Mismatch { got: String },
    Error(String),
}

#[derive(Clone, Debug)]
pub struct CaseResult {
    pub id: String,
    pub strategy: StrategyKind,
    pub outcome: Outcome,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub results: Vec<CaseResult>,
}

impl Report {
    pub fn passed(&self, strategy: StrategyKind) -> usize {
        self.results
            .iter()
            .filter(|r| r.strategy == strategy && r.outcome == Outcome::Pass)
            .count()
    }

    pub fn total(&self, strategy: StrategyKind) -> usize {
        self.results.iter().filter(|r| r.strategy == strategy).count()
    }

    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.outcome == Outcome::Pass)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            let ms = r.elapsed.as_secs_f64() * 1e3;
            match &r.outcome {
                Outcome::Pass => writeln!(f, "PASS {} {} ({ms:.2} ms)", r.id, r.strategy)?,
                Outcome::Mismatch { got } => writeln!(f, "FAIL {} {}: got `{got}`", r.id, r.strategy)?,
                Outcome::Error(e) => writeln!(f, "FAIL {} {}: {e}", r.id, r.strategy)?,
            }
        }
        for s in [StrategyKind::Cbv, StrategyKind::Cbn] {
            writeln!(f, "{s}: {}/{} passed", self.passed(s), self.total(s))?;
        }
        Ok(())
    }
}

/// Normalize every entry under both strategies and compare prints.
pub fn run_entries(entries: &[CorpusEntry]) -> Report {
    let mut results = Vec::new();
    for e in entries {
        for strategy in [StrategyKind::Cbv, StrategyKind::Cbn] {
            let start = Instant::now();
            let res = tdpe(strategy, &Context::empty(), Annot::Zero, &e.input, &e.ty);
            let elapsed = start.elapsed();
            let outcome = match res {
                Ok(r) if r.printed() == e.expected(strategy) => Outcome::Pass,
                Ok(r) => Outcome::Mismatch { got: r.printed() },
                Err(err) => Outcome::Error(err.to_string()),
            };
            results.push(CaseResult {
                id: e.id.clone(),
                strategy,
                outcome,
                elapsed,
            });
        }
    }
    Report { results }
}

pub fn run_corpus(path: &std::path::Path) -> Result<Report, CorpusError> {
    let src = std::fs::read_to_string(path)?;
    Ok(run_entries(&parse_corpus(&src)?))
}
