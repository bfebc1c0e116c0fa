//! Breadth-first closure of the rewrite relation.

use std::collections::HashMap;

use super::rules::{rewrite_step, RuleId};
use super::{EqRef, Theory};

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    /// Maximum number of rewrite steps from the source.
    pub max_steps: usize,
    /// Maximum number of distinct terms kept.
    pub max_terms: usize,
}

impl SearchConfig {
    pub fn steps(max_steps: usize) -> SearchConfig {
        SearchConfig {
            max_steps,
            max_terms: 5000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchNode {
    pub term: EqRef,
    pub depth: usize,
    /// Predecessor index and the step that produced this term.
    pub parent: Option<(usize, RuleId, Vec<usize>)>,
    /// No rule applies.
    pub is_normal: bool,
}

#[derive(Clone, Debug)]
pub struct TraceStep {
    pub rule: RuleId,
    pub path: Vec<usize>,
    pub term: EqRef,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    /// Reachable terms up to alpha-equivalence, in discovery order; the
    /// source is first.
    pub nodes: Vec<SearchNode>,
    pub normal_form_reached: bool,
    /// Some term had unexplored rewrites when a limit was hit.
    pub budget_exhausted: bool,
}

impl SearchResult {
    /// Steps from the source to node `i`.
    pub fn trace(&self, i: usize) -> Vec<TraceStep> {
        let mut steps = Vec::new();
        let mut cur = i;
        while let Some((p, rule, path)) = &self.nodes[cur].parent {
            steps.push(TraceStep {
                rule: *rule,
                path: path.clone(),
                term: self.nodes[cur].term.clone(),
            });
            cur = *p;
        }
        steps.reverse();
        steps
    }

    pub fn find(&self, t: &EqRef) -> Option<usize> {
        let k = t.alpha_key();
        self.nodes.iter().position(|n| n.term.alpha_key() == k)
    }
}

pub fn rewrite_search(theory: Theory, source: &EqRef, cfg: SearchConfig) -> SearchResult {
    let mut index: HashMap<String, usize> = HashMap::new();
    index.insert(source.alpha_key(), 0);
    let mut nodes = vec![SearchNode {
        term: source.clone(),
        depth: 0,
        parent: None,
        is_normal: false,
    }];
    let mut budget_exhausted = false;
    let mut next = 0;
    while next < nodes.len() {
        let steps = rewrite_step(theory, &nodes[next].term);
        nodes[next].is_normal = steps.is_empty();
        if nodes[next].depth >= cfg.max_steps {
            budget_exhausted |= !steps.is_empty();
            next += 1;
            continue;
        }
        for s in steps {
            let key = s.term.alpha_key();
            if index.contains_key(&key) {
                continue;
            }
            if nodes.len() >= cfg.max_terms {
                budget_exhausted = true;
                break;
            }
            index.insert(key, nodes.len());
            nodes.push(SearchNode {
                term: s.term,
                depth: nodes[next].depth + 1,
                parent: Some((next, s.rule, s.path)),
                is_normal: false,
            });
        }
        next += 1;
    }
    let normal_form_reached = nodes.iter().any(|n| n.is_normal);
    SearchResult {
        nodes,
        normal_form_reached,
        budget_exhausted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equational::parse_eq;
    use crate::semantics::StrategyKind;
    use crate::syntax::{parse_formula, Annot, Context};

    #[test]
    fn zero_steps_is_the_source() {
        let ty = parse_formula("bot -> bot").unwrap();
        let t = parse_eq(r"\x:bot. <(\y:bot. y) (S k. x)>", &[], &Context::empty(), Annot::Zero, &ty, StrategyKind::Cbv)
            .unwrap();
        let r = rewrite_search(StrategyKind::Cbv, &t, SearchConfig::steps(0));
        assert_eq!(r.nodes.len(), 1);
        assert!(r.budget_exhausted);
        assert!(!r.normal_form_reached);
    }

    #[test]
    fn traces_replay() {
        let ty = parse_formula("bot -> bot").unwrap();
        let t = parse_eq(r"\x:bot. <(\y:bot. y) (S k. x)>", &[], &Context::empty(), Annot::Zero, &ty, StrategyKind::Cbv)
            .unwrap();
        let r = rewrite_search(StrategyKind::Cbv, &t, SearchConfig::steps(10));
        assert!(r.normal_form_reached);
        for i in 0..r.nodes.len() {
            let mut cur = t.clone();
            for step in r.trace(i) {
                let next = rewrite_step(StrategyKind::Cbv, &cur)
                    .into_iter()
                    .find(|s| s.rule == step.rule && s.path == step.path && s.term.alpha_eq(&step.term));
                cur = next.expect("trace step replays").term;
            }
            assert!(cur.alpha_eq(&r.nodes[i].term));
        }
    }
}
