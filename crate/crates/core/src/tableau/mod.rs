//! The labeled tableau calculus.
//!
//! A labeled formula `σ : φ` states that `φ` holds at the world named by
//! the label `σ`, a sequence of atoms read as the events leading there from
//! the root `<>`. Branches collect labeled formulae together with the
//! action equations and inequations met so far; the search explores one
//! branch at a time, backtracking over the alternatives of branching rules.

mod branch;
mod search;
mod trace;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::AtomId;
use crate::syntax::{ActionTerm, Formula, Vocabulary};

pub use branch::{apply_per, apply_rule, closure_verdict, eq_star, Branch, Closure, ClosureVerdict};
pub use search::{
    prove_tableau, prove_tableau_with, ProverOptions, TableauResult, TableauStats,
    TableauVerdict,
};
pub use trace::{ProofTrace, RuleStep, TraceNode, TraceOutcome};

/// A world name: the sequence of atoms executed from the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Vec<AtomId>);

impl Label {
    pub fn root() -> Self {
        Label(Vec::new())
    }

    pub fn from_atoms(atoms: Vec<AtomId>) -> Self {
        Label(atoms)
    }

    pub fn child(&self, atom: AtomId) -> Label {
        let mut atoms = self.0.clone();
        atoms.push(atom);
        Label(atoms)
    }

    pub fn parent(&self) -> Option<Label> {
        let (_, init) = self.0.split_last()?;
        Some(Label(init.to_vec()))
    }

    pub fn last(&self) -> Option<AtomId> {
        self.0.last().copied()
    }

    pub fn atoms(&self) -> &[AtomId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_root()
    }

    /// `true` when `self` is `parent · γ` for some atom `γ`.
    pub fn is_child_of(&self, parent: &Label) -> bool {
        self.0.len() == parent.0.len() + 1 && self.0.starts_with(&parent.0)
    }

    /// `<>` for the root, otherwise `<a & !b . a & b>`.
    pub fn render(&self, vocab: &Vocabulary) -> String {
        let parts: Vec<String> = self.0.iter().map(|a| a.render(vocab)).collect();
        format!("<{}>", parts.join(" . "))
    }
}

/// `σ : φ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledFormula {
    pub label: Label,
    pub formula: Formula,
}

impl LabeledFormula {
    pub fn new(label: Label, formula: Formula) -> Self {
        LabeledFormula { label, formula }
    }

    pub fn root(formula: Formula) -> Self {
        LabeledFormula::new(Label::root(), formula)
    }

    pub fn render(&self, vocab: &Vocabulary) -> String {
        format!("{} : {}", self.label.render(vocab), self.formula)
    }
}

/// Classification of formulae driving rule selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleClass {
    /// Conjunctive: `∧`, `¬∨`, `¬→`, `¬¬`.
    A,
    /// Disjunctive: `∨`, `→`, `¬∧`, `↔`, `¬↔`.
    B,
    /// Modal possibility: `<α>φ`, `¬[α]φ`.
    P,
    /// Modal necessity: `[α]φ`, `¬<α>φ`.
    N,
    /// Deontic possibility: `Pw(α)`, `¬P(α)`.
    PD,
    /// Deontic necessity: `P(α)`, `¬Pw(α)`.
    ND,
    /// Propositional literals and constants.
    Lit,
    /// Action equations and inequations.
    Eql,
}

impl fmt::Display for RuleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleClass::A => "A",
            RuleClass::B => "B",
            RuleClass::P => "P",
            RuleClass::N => "N",
            RuleClass::PD => "PD",
            RuleClass::ND => "ND",
            RuleClass::Lit => "LIT",
            RuleClass::Eql => "EQL",
        })
    }
}

/// Assigns each formula its rule class.
pub fn classify(f: &Formula) -> RuleClass {
    match f {
        Formula::Prop(_) | Formula::True | Formula::False => RuleClass::Lit,
        Formula::Eq(..) | Formula::Neq(..) => RuleClass::Eql,
        Formula::And(..) => RuleClass::A,
        Formula::Or(..) | Formula::Implies(..) | Formula::Iff(..) => RuleClass::B,
        Formula::Diamond(..) => RuleClass::P,
        Formula::Box(..) => RuleClass::N,
        Formula::PermW(_) => RuleClass::PD,
        Formula::PermS(_) => RuleClass::ND,
        Formula::Not(g) => match &**g {
            Formula::Prop(_) | Formula::True | Formula::False => RuleClass::Lit,
            Formula::Eq(..) | Formula::Neq(..) => RuleClass::Eql,
            Formula::Not(_) | Formula::Or(..) | Formula::Implies(..) => RuleClass::A,
            Formula::And(..) | Formula::Iff(..) => RuleClass::B,
            Formula::Box(..) => RuleClass::P,
            Formula::Diamond(..) => RuleClass::N,
            Formula::PermS(_) => RuleClass::PD,
            Formula::PermW(_) => RuleClass::ND,
        },
    }
}

/// The action nearest the root of a modal or deontic formula.
pub fn front_action(f: &Formula) -> Option<&ActionTerm> {
    match f {
        Formula::Box(a, _) | Formula::Diamond(a, _) | Formula::PermS(a) | Formula::PermW(a) => {
            Some(a)
        }
        Formula::Not(g) => match &**g {
            Formula::Box(a, _)
            | Formula::Diamond(a, _)
            | Formula::PermS(a)
            | Formula::PermW(a) => Some(a),
            _ => None,
        },
        _ => None,
    }
}

fn alpha_components(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::And(l, r) => vec![(**l).clone(), (**r).clone()],
        Formula::Not(g) => match &**g {
            Formula::Not(h) => vec![(**h).clone()],
            Formula::Or(l, r) => vec![l.negated(), r.negated()],
            Formula::Implies(l, r) => vec![(**l).clone(), r.negated()],
            _ => Vec::new(),
        },
        _ => Vec::new(),
    }
}

fn beta_components(f: &Formula) -> Vec<Vec<Formula>> {
    match f {
        Formula::Or(l, r) => vec![vec![(**l).clone()], vec![(**r).clone()]],
        Formula::Implies(l, r) => vec![vec![l.negated()], vec![(**r).clone()]],
        Formula::Iff(l, r) => vec![
            vec![(**l).clone(), (**r).clone()],
            vec![l.negated(), r.negated()],
        ],
        Formula::Not(g) => match &**g {
            Formula::And(l, r) => vec![vec![l.negated()], vec![r.negated()]],
            Formula::Iff(l, r) => vec![
                vec![(**l).clone(), r.negated()],
                vec![l.negated(), (**r).clone()],
            ],
            _ => Vec::new(),
        },
        _ => Vec::new(),
    }
}

/// `(α, φ)` such that the formula requires or constrains `α`-successors
/// to satisfy `φ`; covers both P and N forms.
fn modal_parts(f: &Formula) -> Option<(&ActionTerm, Formula)> {
    match f {
        Formula::Diamond(a, body) | Formula::Box(a, body) => Some((a, (**body).clone())),
        Formula::Not(g) => match &**g {
            Formula::Diamond(a, body) | Formula::Box(a, body) => Some((a, body.negated())),
            _ => None,
        },
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PermKind {
    Strong,
    Weak,
}

/// A possibly negated permission predicate.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DeonticLit<'f> {
    pub kind: PermKind,
    pub positive: bool,
    pub term: &'f ActionTerm,
}

impl DeonticLit<'_> {
    pub fn of(f: &Formula) -> Option<DeonticLit<'_>> {
        let (inner, positive) = match f {
            Formula::Not(g) => (&**g, false),
            other => (other, true),
        };
        let (kind, term) = match inner {
            Formula::PermS(t) => (PermKind::Strong, t),
            Formula::PermW(t) => (PermKind::Weak, t),
            _ => return None,
        };
        Some(DeonticLit {
            kind,
            positive,
            term,
        })
    }

    pub fn with_term(&self, term: ActionTerm) -> Formula {
        let base = match self.kind {
            PermKind::Strong => Formula::perm(term),
            PermKind::Weak => Formula::weak_perm(term),
        };
        if self.positive {
            base
        } else {
            base.not()
        }
    }

    /// `Pw(α)` or `¬P(α)`.
    pub fn is_possibility(&self) -> bool {
        (self.kind == PermKind::Weak) == self.positive
    }
}
