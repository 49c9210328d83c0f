use std::sync::atomic::{AtomicUsize, Ordering};

use serde::Serialize;

use super::branch::{Branch, Choices, Closure, ClosureVerdict, Fact};
use super::trace::{ProofTrace, RuleStep, TraceNode, TraceOutcome};
use super::{LabeledFormula, RuleClass};
use crate::error::DplError;
use crate::syntax::{Formula, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableauVerdict {
    /// Every branch closed: the root formula is unsatisfiable.
    Closed,
    /// Some branch saturated without closing.
    Open,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TableauStats {
    /// Branch segments explored (the root segment plus one per alternative tried).
    pub branches: usize,
    /// Largest number of labeled formulae held by the branch under
    /// construction at any time.
    pub peak_live_formulas: usize,
    pub rule_applications: usize,
}

#[derive(Debug, Clone)]
pub struct TableauResult {
    pub verdict: TableauVerdict,
    /// The leftmost open saturated branch, when there is one.
    pub open_branch: Option<Branch>,
    pub stats: TableauStats,
    pub trace: Option<ProofTrace>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProverOptions {
    pub record_trace: bool,
    /// Explore sibling alternatives near the root concurrently. Without the
    /// `parallel` feature this is ignored.
    pub parallel: bool,
}

/// Depth (in branching points) below which siblings run in parallel.
const PARALLEL_DEPTH: usize = 3;

struct Ctx {
    options: ProverOptions,
    branches: AtomicUsize,
    peak: AtomicUsize,
    rules: AtomicUsize,
}

impl Ctx {
    fn next_branch(&self) -> usize {
        self.branches.fetch_add(1, Ordering::Relaxed)
    }

    fn note(&self, b: &Branch, steps: usize) {
        self.peak.fetch_max(b.live_formula_count(), Ordering::Relaxed);
        self.rules.fetch_add(steps, Ordering::Relaxed);
    }
}

/// Runs the tableau for `f` over `vocab`, starting from `<> : f`.
pub fn prove_tableau(f: &Formula, vocab: &Vocabulary) -> Result<TableauResult, DplError> {
    prove_tableau_with(f, vocab, ProverOptions::default())
}

pub fn prove_tableau_with(
    f: &Formula,
    vocab: &Vocabulary,
    options: ProverOptions,
) -> Result<TableauResult, DplError> {
    f.check_vocab(vocab)?;
    let ctx = Ctx {
        options,
        branches: AtomicUsize::new(0),
        peak: AtomicUsize::new(0),
        rules: AtomicUsize::new(0),
    };
    let mut branch = Branch::new(vocab);
    let mut node = TraceNode::new(ctx.next_branch());
    branch.add_formula(LabeledFormula::root(f.clone()))?;
    let open = explore(&mut branch, &ctx, 0, &mut node, None)?;
    let stats = TableauStats {
        branches: ctx.branches.load(Ordering::Relaxed),
        peak_live_formulas: ctx.peak.load(Ordering::Relaxed),
        rule_applications: ctx.rules.load(Ordering::Relaxed),
    };
    Ok(TableauResult {
        verdict: if open.is_some() {
            TableauVerdict::Open
        } else {
            TableauVerdict::Closed
        },
        open_branch: open,
        stats,
        trace: options.record_trace.then(|| ProofTrace {
            vocabulary: vocab.actions().to_vec(),
            root: node,
        }),
    })
}

/// Where a subtree sits among parallel siblings. Once a lower sibling at
/// any enclosing level finds an open branch, the subtree's result can no
/// longer be chosen and its search stops early.
#[derive(Clone, Copy)]
struct Cancel<'a> {
    parent: Option<&'a Cancel<'a>>,
    first_open: &'a AtomicUsize,
    index: usize,
}

impl Cancel<'_> {
    fn superseded(cancel: Option<&Self>) -> bool {
        let mut at = cancel;
        while let Some(c) = at {
            if c.first_open.load(Ordering::Relaxed) < c.index {
                return true;
            }
            at = c.parent;
        }
        false
    }
}

fn closed(node: &mut TraceNode, c: Closure) {
    node.outcome = TraceOutcome::Closed {
        verdict: c.verdict,
        reason: c.reason,
    };
}

fn explore(
    b: &mut Branch,
    ctx: &Ctx,
    depth: usize,
    node: &mut TraceNode,
    cancel: Option<&Cancel>,
) -> Result<Option<Branch>, DplError> {
    if Cancel::superseded(cancel) {
        node.outcome = TraceOutcome::Pruned;
        return Ok(None);
    }
    let mut steps = Vec::new();
    let closure = b.saturate(&mut steps)?;
    ctx.note(b, steps.len());
    if ctx.options.record_trace {
        node.steps = steps;
    }
    if let Some(c) = closure {
        closed(node, c);
        return Ok(None);
    }
    let Some(idx) = b.next_branching() else {
        node.outcome = TraceOutcome::Open;
        return Ok(Some(b.clone()));
    };
    let choices = b.choices(idx)?;
    b.mark_expanded(idx);
    ctx.rules.fetch_add(1, Ordering::Relaxed);
    let rule = b.class_of(idx);
    let premise = b.entry(idx).render(b.vocabulary());
    node.outcome = TraceOutcome::Branched;

    // Alternatives are produced lazily so that a wide vocabulary does not
    // materialize every atom before the first one is explored.
    let mut alternatives: Box<dyn Iterator<Item = Vec<Fact>> + '_> = match &choices {
        Choices::Listed(alts) => Box::new(alts.iter().cloned()),
        Choices::Atoms(exp) => Box::new(exp.atoms()?.map(|atom| exp.facts(atom))),
    };
    let traced = ctx.options.record_trace;
    let parallel = cfg!(feature = "parallel") && ctx.options.parallel && depth < PARALLEL_DEPTH;
    if traced || parallel {
        let listed: Vec<Vec<Fact>> = alternatives.collect();
        if traced {
            let rendered = listed.iter().map(|a| b.render_alternative(a)).collect();
            node.steps
                .push(RuleStep::branching(&rule.to_string(), premise.clone(), rendered));
        }
        #[cfg(feature = "parallel")]
        if parallel && listed.len() > 1 {
            return explore_parallel(b, ctx, depth, node, &listed, cancel);
        }
        alternatives = Box::new(listed.into_iter());
    }

    let mut found = None;
    let mut tried = 0;
    for facts in alternatives {
        tried += 1;
        if found.is_some() {
            if !traced {
                break;
            }
            let mut pruned = TraceNode::new(0);
            pruned.outcome = TraceOutcome::Pruned;
            node.children.push(pruned);
            continue;
        }
        let mut child_node = TraceNode::new(ctx.next_branch());
        let snap = b.snapshot();
        for fact in &facts {
            b.apply_fact(fact)?;
        }
        found = explore(b, ctx, depth + 1, &mut child_node, cancel)?;
        b.restore(snap)?;
        if traced {
            node.children.push(child_node);
        }
    }
    if tried == 0 {
        debug_assert!(matches!(rule, RuleClass::P | RuleClass::PD));
        closed(
            node,
            Closure {
                verdict: ClosureVerdict::ClosedBoolean,
                reason: format!("no atom lies below the action of {premise}"),
            },
        );
    }
    Ok(found)
}

#[cfg(feature = "parallel")]
fn explore_parallel(
    b: &Branch,
    ctx: &Ctx,
    depth: usize,
    node: &mut TraceNode,
    alternatives: &[Vec<Fact>],
    parent: Option<&Cancel>,
) -> Result<Option<Branch>, DplError> {
    use rayon::prelude::*;
    let first_open = AtomicUsize::new(usize::MAX);
    let results: Vec<(Result<Option<Branch>, DplError>, TraceNode)> = alternatives
        .par_iter()
        .enumerate()
        .map(|(index, facts)| {
            let cancel = Cancel { parent, first_open: &first_open, index };
            let mut child = b.clone();
            let mut child_node = TraceNode::new(ctx.next_branch());
            let res = facts
                .iter()
                .try_for_each(|fact| child.apply_fact(fact).map(|_| ()))
                .and_then(|_| explore(&mut child, ctx, depth + 1, &mut child_node, Some(&cancel)));
            if matches!(res, Ok(Some(_))) {
                first_open.fetch_min(index, Ordering::Relaxed);
            }
            (res, child_node)
        })
        .collect();
    let mut found = None;
    for (res, mut child_node) in results {
        if found.is_some() {
            child_node.steps.clear();
            child_node.children.clear();
            child_node.outcome = TraceOutcome::Pruned;
        } else if let Some(open) = res? {
            found = Some(open);
        }
        if ctx.options.record_trace {
            node.children.push(child_node);
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn run(text: &str, actions: &[&str]) -> TableauResult {
        let v = Vocabulary::new(actions.iter().copied(), ["p", "q"]).unwrap();
        let f = parse_formula(text, &v).unwrap();
        prove_tableau_with(
            &f,
            &v,
            ProverOptions {
                record_trace: true,
                parallel: false,
            },
        )
        .unwrap()
    }

    #[test]
    fn closes_on_contradictions() {
        assert_eq!(run("p && ~p", &["a"]).verdict, TableauVerdict::Closed);
        assert_eq!(run("<a>p && [a]~p", &["a", "b"]).verdict, TableauVerdict::Closed);
        assert_eq!(run("P(a) && ~Pw(a)", &["a"]).verdict, TableauVerdict::Closed);
        assert_eq!(run("<0>p", &["a"]).verdict, TableauVerdict::Closed);
    }

    #[test]
    fn opens_on_satisfiable_formulas() {
        assert_eq!(run("P(a) && ~Pw(a)", &["a", "b"]).verdict, TableauVerdict::Open);
        let r = run("<a>p && <a>~p", &["a", "b"]);
        assert_eq!(r.verdict, TableauVerdict::Open);
        let b = r.open_branch.unwrap();
        assert!(b.is_saturated().unwrap());
        assert_eq!(b.labels().len(), 3);
    }

    #[test]
    fn single_action_determinism() {
        // Over one action every execution is the same event.
        assert_eq!(run("<a>p && <a>~p", &["a"]).verdict, TableauVerdict::Closed);
    }

    #[test]
    fn trace_records_every_branch() {
        let r = run("(p || q) && ~p && ~q", &["a"]);
        let trace = r.trace.unwrap();
        assert_eq!(trace.node_count(), 3);
        assert_eq!(r.stats.branches, 3);
        let text = trace.to_text();
        assert!(text.contains("[B]"), "{text}");
        assert!(trace.to_json().contains("ClosedProp"));
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_agrees_with_sequential() {
        let v = Vocabulary::new(["a", "b"], ["p", "q"]).unwrap();
        for text in [
            "<a>p && <b>~p && [a + b](p || q)",
            "(<a>p || <b>q) && [U]~p && [U]~q",
            "Pw(a) && ~P(a + b) && [a]P(b)",
        ] {
            let f = parse_formula(text, &v).unwrap();
            let seq = prove_tableau(&f, &v).unwrap();
            let par = prove_tableau_with(
                &f,
                &v,
                ProverOptions {
                    record_trace: false,
                    parallel: true,
                },
            )
            .unwrap();
            assert_eq!(seq.verdict, par.verdict, "{text}");
            assert_eq!(
                seq.open_branch.map(|b| b.formulas().to_vec()),
                par.open_branch.map(|b| b.formulas().to_vec()),
                "{text}"
            );
        }
    }
}
