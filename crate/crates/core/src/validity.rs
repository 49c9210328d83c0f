//! Local and global validity and satisfiability.
//!
//! Validity is decided by refutation: `f` is valid when the tableau for
//! `nnf(¬f)` closes. Global validity (validity over every vocabulary that
//! contains the actions of `f`) needs only as many fresh actions as the
//! existential degree of the refuted formula, so it reduces to one local
//! check over an extended vocabulary.

use std::collections::BTreeSet;

use crate::error::DplError;
use crate::semantics::{extract_countermodel, VStructure};
use crate::syntax::{
    existential_degree, fresh_action, nnf, primitive_actions, propositions, Formula, Vocabulary,
};
use crate::tableau::{prove_tableau_with, ProofTrace, ProverOptions, TableauStats, TableauVerdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// The refutation closed; the trace is present when requested.
    Valid(Option<ProofTrace>),
    /// A countermodel falsifying the formula at world 0.
    Invalid(VStructure),
    /// A model satisfying the formula at world 0.
    Sat(VStructure),
    Unsat(Option<ProofTrace>),
}

impl Verdict {
    /// `VALID`, `INVALID`, `SAT` or `UNSAT`.
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Valid(_) => "VALID",
            Verdict::Invalid(_) => "INVALID",
            Verdict::Sat(_) => "SAT",
            Verdict::Unsat(_) => "UNSAT",
        }
    }

    /// Valid or satisfiable.
    pub fn is_positive(&self) -> bool {
        matches!(self, Verdict::Valid(_) | Verdict::Sat(_))
    }

    pub fn model(&self) -> Option<&VStructure> {
        match self {
            Verdict::Invalid(m) | Verdict::Sat(m) => Some(m),
            _ => None,
        }
    }

    pub fn trace(&self) -> Option<&ProofTrace> {
        match self {
            Verdict::Valid(t) | Verdict::Unsat(t) => t.as_ref(),
            _ => None,
        }
    }
}

/// A verdict together with the vocabulary it was reached over.
#[derive(Debug, Clone)]
pub struct Report {
    pub verdict: Verdict,
    pub vocabulary: Vocabulary,
    /// Fresh actions added for a global query.
    pub fresh_actions: usize,
    pub stats: TableauStats,
    /// Trace of the run when requested, whatever the verdict.
    pub trace: Option<ProofTrace>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    pub record_trace: bool,
    pub parallel: bool,
    /// Upper bound on fresh actions in global mode.
    pub max_fresh: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Local(Vocabulary),
    Global,
}

fn has_equation(f: &Formula) -> bool {
    match f {
        Formula::Eq(..) | Formula::Neq(..) => true,
        Formula::Not(g) | Formula::Box(_, g) | Formula::Diamond(_, g) => has_equation(g),
        Formula::Implies(l, r) | Formula::And(l, r) | Formula::Or(l, r) | Formula::Iff(l, r) => {
            has_equation(l) || has_equation(r)
        }
        _ => false,
    }
}

/// The vocabulary for a global query: the actions of `f` plus `k` fresh
/// ones.
///
/// At least one fresh action is used when `f` has no actions or mentions an
/// equation. Over its own actions alone `a + b = U` always holds; an
/// extension can have events outside every action of `f`, and one fresh
/// action is enough to supply them.
pub fn global_vocabulary(
    f: &Formula,
    k: usize,
    max_fresh: Option<usize>,
) -> Result<(Vocabulary, usize), DplError> {
    let actions = primitive_actions(f);
    let k = if actions.is_empty() || has_equation(f) { k.max(1) } else { k };
    if let Some(limit) = max_fresh {
        if k > limit {
            return Err(DplError::FreshLimit { needed: k, limit });
        }
    }
    let all: BTreeSet<String> = actions.into_iter().chain((1..=k).map(fresh_action)).collect();
    Ok((Vocabulary::new(all, propositions(f))?, k))
}

fn run(
    root: &Formula,
    vocab: Vocabulary,
    fresh_actions: usize,
    options: &CheckOptions,
    validity: bool,
) -> Result<Report, DplError> {
    let result = prove_tableau_with(
        root,
        &vocab,
        ProverOptions {
            record_trace: options.record_trace,
            parallel: options.parallel,
        },
    )?;
    let verdict = match (result.verdict, validity) {
        (TableauVerdict::Closed, true) => Verdict::Valid(result.trace.clone()),
        (TableauVerdict::Closed, false) => Verdict::Unsat(result.trace.clone()),
        (TableauVerdict::Open, _) => {
            let branch = result.open_branch.as_ref().expect("open verdict has a branch");
            let model = extract_countermodel(branch)?;
            if validity {
                Verdict::Invalid(model)
            } else {
                Verdict::Sat(model)
            }
        }
    };
    Ok(Report {
        verdict,
        vocabulary: vocab,
        fresh_actions,
        stats: result.stats,
        trace: result.trace,
    })
}

/// `vocab` with the propositions of `f` added; every action of `f` must
/// already be declared.
fn local_vocabulary(f: &Formula, vocab: &Vocabulary) -> Result<Vocabulary, DplError> {
    if let Some(a) = primitive_actions(f).into_iter().find(|a| !vocab.has_action(a)) {
        return Err(DplError::UndeclaredAction(a));
    }
    vocab.with_propositions(propositions(f))
}

/// Validity of `f` in every model over `vocab`.
pub fn check_local(f: &Formula, vocab: &Vocabulary) -> Result<Report, DplError> {
    check_local_with(f, vocab, &CheckOptions::default())
}

pub fn check_local_with(
    f: &Formula,
    vocab: &Vocabulary,
    options: &CheckOptions,
) -> Result<Report, DplError> {
    let vocab = local_vocabulary(f, vocab)?;
    let root = nnf(&f.clone().not()).into_formula();
    run(&root, vocab, 0, options, true)
}

/// Validity of `f` over every vocabulary extending its actions.
pub fn check_global(f: &Formula) -> Result<Report, DplError> {
    check_global_with(f, &CheckOptions::default())
}

pub fn check_global_with(f: &Formula, options: &CheckOptions) -> Result<Report, DplError> {
    let root = nnf(&f.clone().not()).into_formula();
    let (vocab, k) = global_vocabulary(f, existential_degree(&root), options.max_fresh)?;
    run(&root, vocab, k, options, true)
}

/// Satisfiability of `f`, over a fixed vocabulary or some vocabulary
/// extending its actions.
pub fn check_sat(f: &Formula, mode: &Mode) -> Result<Report, DplError> {
    check_sat_with(f, mode, &CheckOptions::default())
}

pub fn check_sat_with(f: &Formula, mode: &Mode, options: &CheckOptions) -> Result<Report, DplError> {
    let root = nnf(f).into_formula();
    match mode {
        Mode::Local(vocab) => run(&root, local_vocabulary(f, vocab)?, 0, options, false),
        Mode::Global => {
            let (vocab, k) = global_vocabulary(f, existential_degree(&root), options.max_fresh)?;
            run(&root, vocab, k, options, false)
        }
    }
}
