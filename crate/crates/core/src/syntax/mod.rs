//! Action terms, formulae, vocabularies and the surface syntax.
//!
//! Action terms form a boolean algebra over a finite set of primitive
//! actions; formulae combine propositions, the action modalities `[α]` and
//! `<α>`, strong and weak permission, and action equations.

mod metrics;
mod normal;
mod parser;
mod printer;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::ops::{BitAnd, BitOr, Not};

use serde::{Deserialize, Serialize};

use crate::error::DplError;

pub use metrics::{
    degree, existential_counts, existential_degree, is_existential, primitive_actions,
    propositions, subformulae_at_level, subformulae_at_level_list,
};
pub use normal::{is_nnf, nnf, NnfFormula};
pub use parser::{parse_action, parse_formula, parse_formula_open, parse_formula_with_actions};
pub use printer::pretty_print;

/// Maximum number of primitive actions (original plus fresh) an atom can encode.
pub const MAX_ACTIONS: usize = 24;

/// Name of the `i`-th fresh action (1-based).
pub fn fresh_action(i: usize) -> String {
    format!("_b{i}")
}

fn fresh_index(name: &str) -> Option<usize> {
    name.strip_prefix("_b").and_then(|n| n.parse().ok())
}

/// Ordering used for vocabularies: user actions lexicographically, then
/// reserved names, with fresh actions `_b1, _b2, ...` in numeric order.
pub fn action_order(a: &str, b: &str) -> Ordering {
    let key = |s: &str| (s.starts_with('_'), fresh_index(s).unwrap_or(usize::MAX));
    key(a).cmp(&key(b)).then_with(|| a.cmp(b))
}

/// A vocabulary: an ordered, nonempty set of primitive actions and a set
/// of proposition names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vocabulary {
    actions: Vec<String>,
    propositions: BTreeSet<String>,
}

impl Vocabulary {
    pub fn new<A, P>(actions: A, propositions: P) -> Result<Self, DplError>
    where
        A: IntoIterator,
        A::Item: Into<String>,
        P: IntoIterator,
        P::Item: Into<String>,
    {
        let mut actions: Vec<String> = actions.into_iter().map(Into::into).collect();
        actions.sort_by(|a, b| action_order(a, b));
        if let Some(w) = actions.windows(2).find(|w| w[0] == w[1]) {
            return Err(DplError::DuplicateAction(w[0].clone()));
        }
        if actions.is_empty() {
            return Err(DplError::EmptyVocabulary);
        }
        if actions.len() > MAX_ACTIONS {
            return Err(DplError::VocabularyTooWide {
                width: actions.len(),
                max: MAX_ACTIONS,
            });
        }
        let propositions: BTreeSet<String> = propositions.into_iter().map(Into::into).collect();
        if let Some(clash) = actions.iter().find(|a| propositions.contains(*a)) {
            return Err(DplError::NameClash(clash.clone()));
        }
        Ok(Vocabulary {
            actions,
            propositions,
        })
    }

    /// The vocabulary of a formula: its primitive actions and propositions.
    pub fn of_formula(f: &Formula) -> Result<Self, DplError> {
        Vocabulary::new(primitive_actions(f), propositions(f))
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn propositions(&self) -> &BTreeSet<String> {
        &self.propositions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn index_of(&self, action: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == action)
    }

    pub fn has_action(&self, action: &str) -> bool {
        self.index_of(action).is_some()
    }

    pub fn has_proposition(&self, prop: &str) -> bool {
        self.propositions.contains(prop)
    }

    /// Adds propositions, keeping the action list.
    pub fn with_propositions<P>(&self, props: P) -> Result<Self, DplError>
    where
        P: IntoIterator,
        P::Item: Into<String>,
    {
        let mut all = self.propositions.clone();
        all.extend(props.into_iter().map(Into::into));
        Vocabulary::new(self.actions.clone(), all)
    }

    /// Extends the vocabulary with `k` fresh actions `_b1 .. _bk`.
    pub fn with_fresh(&self, k: usize) -> Result<Self, DplError> {
        let mut actions = self.actions.clone();
        let mut next = 1;
        let mut added = 0;
        while added < k {
            let name = fresh_action(next);
            next += 1;
            if !actions.contains(&name) {
                actions.push(name);
                added += 1;
            }
        }
        Vocabulary::new(actions, self.propositions.clone())
    }
}

/// Boolean action terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActionTerm {
    Prim(String),
    Meet(Box<ActionTerm>, Box<ActionTerm>),
    Join(Box<ActionTerm>, Box<ActionTerm>),
    Compl(Box<ActionTerm>),
    Empty,
    Univ,
}

impl ActionTerm {
    pub fn prim(name: impl Into<String>) -> Self {
        ActionTerm::Prim(name.into())
    }

    pub fn meet(self, other: ActionTerm) -> Self {
        ActionTerm::Meet(Box::new(self), Box::new(other))
    }

    pub fn join(self, other: ActionTerm) -> Self {
        ActionTerm::Join(Box::new(self), Box::new(other))
    }

    pub fn compl(self) -> Self {
        ActionTerm::Compl(Box::new(self))
    }

    pub fn size(&self) -> usize {
        match self {
            ActionTerm::Prim(_) | ActionTerm::Empty | ActionTerm::Univ => 1,
            ActionTerm::Compl(t) => 1 + t.size(),
            ActionTerm::Meet(l, r) | ActionTerm::Join(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn collect_actions(&self, out: &mut BTreeSet<String>) {
        match self {
            ActionTerm::Prim(n) => {
                out.insert(n.clone());
            }
            ActionTerm::Compl(t) => t.collect_actions(out),
            ActionTerm::Meet(l, r) | ActionTerm::Join(l, r) => {
                l.collect_actions(out);
                r.collect_actions(out);
            }
            ActionTerm::Empty | ActionTerm::Univ => {}
        }
    }

    /// Checks that every primitive of the term is declared in `vocab`.
    pub fn check_vocab(&self, vocab: &Vocabulary) -> Result<(), DplError> {
        let mut names = BTreeSet::new();
        self.collect_actions(&mut names);
        match names.into_iter().find(|n| !vocab.has_action(n)) {
            Some(n) => Err(DplError::UndeclaredAction(n)),
            None => Ok(()),
        }
    }
}

impl BitAnd for ActionTerm {
    type Output = ActionTerm;
    fn bitand(self, rhs: ActionTerm) -> ActionTerm {
        self.meet(rhs)
    }
}

impl BitOr for ActionTerm {
    type Output = ActionTerm;
    fn bitor(self, rhs: ActionTerm) -> ActionTerm {
        self.join(rhs)
    }
}

impl Not for ActionTerm {
    type Output = ActionTerm;
    fn not(self) -> ActionTerm {
        self.compl()
    }
}

/// Formulae of the logic. `Diamond`, `And`, `Or`, `Iff`, `True` and `False`
/// are kept as first-class nodes so proofs print what was written.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    Prop(String),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Box(ActionTerm, Box<Formula>),
    Diamond(ActionTerm, Box<Formula>),
    PermS(ActionTerm),
    PermW(ActionTerm),
    Eq(ActionTerm, ActionTerm),
    Neq(ActionTerm, ActionTerm),
    True,
    False,
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Self {
        Formula::Prop(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn implies(self, other: Formula) -> Self {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn iff(self, other: Formula) -> Self {
        Formula::Iff(Box::new(self), Box::new(other))
    }

    pub fn boxed(action: ActionTerm, body: Formula) -> Self {
        Formula::Box(action, Box::new(body))
    }

    pub fn diamond(action: ActionTerm, body: Formula) -> Self {
        Formula::Diamond(action, Box::new(body))
    }

    pub fn perm(action: ActionTerm) -> Self {
        Formula::PermS(action)
    }

    pub fn weak_perm(action: ActionTerm) -> Self {
        Formula::PermW(action)
    }

    pub fn eq(lhs: ActionTerm, rhs: ActionTerm) -> Self {
        Formula::Eq(lhs, rhs)
    }

    pub fn neq(lhs: ActionTerm, rhs: ActionTerm) -> Self {
        Formula::Neq(lhs, rhs)
    }

    /// Conjunction of a list; `true` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Negation that strips an existing outer `¬` instead of stacking one.
    pub fn negated(&self) -> Formula {
        match self {
            Formula::Not(inner) => (**inner).clone(),
            other => other.clone().not(),
        }
    }

    /// Number of AST nodes, counting action-term nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Prop(_) | Formula::True | Formula::False => 1,
            Formula::Not(f) => 1 + f.size(),
            Formula::Implies(l, r) | Formula::And(l, r) | Formula::Or(l, r) | Formula::Iff(l, r) => {
                1 + l.size() + r.size()
            }
            Formula::Box(a, f) | Formula::Diamond(a, f) => 1 + a.size() + f.size(),
            Formula::PermS(a) | Formula::PermW(a) => 1 + a.size(),
            Formula::Eq(l, r) | Formula::Neq(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// True when an equation or inequation occurs inside a modal scope.
    pub fn has_equation_under_modality(&self) -> bool {
        fn walk(f: &Formula, under: bool) -> bool {
            match f {
                Formula::Eq(..) | Formula::Neq(..) => under,
                Formula::Prop(_)
                | Formula::True
                | Formula::False
                | Formula::PermS(_)
                | Formula::PermW(_) => false,
                Formula::Not(g) => walk(g, under),
                Formula::Implies(l, r)
                | Formula::And(l, r)
                | Formula::Or(l, r)
                | Formula::Iff(l, r) => walk(l, under) || walk(r, under),
                Formula::Box(_, g) | Formula::Diamond(_, g) => walk(g, true),
            }
        }
        walk(self, false)
    }

    /// Checks actions and propositions against a vocabulary.
    pub fn check_vocab(&self, vocab: &Vocabulary) -> Result<(), DplError> {
        if let Some(a) = primitive_actions(self)
            .into_iter()
            .find(|a| !vocab.has_action(a))
        {
            return Err(DplError::UndeclaredAction(a));
        }
        if let Some(p) = propositions(self)
            .into_iter()
            .find(|p| !vocab.has_proposition(p))
        {
            return Err(DplError::UndeclaredProposition(p));
        }
        Ok(())
    }
}
