use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::trace::RuleStep;
use super::{
    alpha_components, beta_components, classify, modal_parts, DeonticLit, Label,
    LabeledFormula, PermKind, RuleClass,
};
use crate::algebra::{atom_term, denote, AtomId, AtomSet, AtomsBelow, BooleanTheory};
use crate::error::DplError;
use crate::syntax::{ActionTerm, Formula, Vocabulary};

/// Result of the closure test on a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ClosureVerdict {
    OpenSoFar,
    ClosedProp,
    ClosedDeontic,
    ClosedBoolean,
}

/// Why a branch closed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Closure {
    pub verdict: ClosureVerdict,
    pub reason: String,
}

impl Closure {
    fn new(verdict: ClosureVerdict, reason: String) -> Self {
        Closure { verdict, reason }
    }
}

/// Bookkeeping key: each (rule, premise, target) fires at most once.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum FireKey {
    Once(usize),
    Label(usize, Label),
    Fact(usize, usize),
    Per(usize),
}

/// Something a rule adds to a branch.
#[derive(Debug, Clone)]
pub(crate) enum Fact {
    Formula(LabeledFormula),
    /// A formula that is already fully decomposed (atom-level deontic facts).
    Expanded(LabeledFormula),
    Label(Label),
    Inequation(ActionTerm, ActionTerm),
}

impl Fact {
    fn render(&self, vocab: &Vocabulary) -> String {
        match self {
            Fact::Formula(lf) | Fact::Expanded(lf) => lf.render(vocab),
            Fact::Label(l) => format!("label {}", l.render(vocab)),
            Fact::Inequation(l, r) => format!("{l} != {r}"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum AtomRule {
    /// The body to place at the new label.
    Modal(Formula),
    Deontic { kind: PermKind, positive: bool },
}

/// A P or PD rule application: one alternative per live atom below `term`.
#[derive(Debug, Clone)]
pub(crate) struct AtomExpansion {
    label: Label,
    rule: AtomRule,
    term: ActionTerm,
    theory: BooleanTheory,
}

impl AtomExpansion {
    pub fn atoms(&self) -> Result<AtomsBelow<'_>, DplError> {
        self.theory.atoms_below(&self.term)
    }

    pub fn facts(&self, atom: AtomId) -> Vec<Fact> {
        let vocab = self.theory.vocabulary();
        let term = atom_term(atom, vocab);
        match &self.rule {
            AtomRule::Modal(body) => {
                let child = self.label.child(atom);
                vec![
                    Fact::Label(child.clone()),
                    Fact::Formula(LabeledFormula::new(child, body.clone())),
                    Fact::Inequation(term, ActionTerm::Empty),
                ]
            }
            &AtomRule::Deontic { kind, positive } => {
                let lit = DeonticLit {
                    kind,
                    positive,
                    term: &term,
                };
                vec![
                    Fact::Expanded(LabeledFormula::new(
                        self.label.clone(),
                        lit.with_term(term.clone()),
                    )),
                    Fact::Inequation(term.clone(), ActionTerm::Empty),
                ]
            }
        }
    }
}

pub(crate) enum Choices {
    Listed(Vec<Vec<Fact>>),
    Atoms(AtomExpansion),
}

#[derive(Debug, Clone)]
pub(crate) struct Snapshot {
    entries: usize,
    labels: usize,
    equations: usize,
    star: usize,
    inequations: usize,
    fired: usize,
    forced_closure: Option<Closure>,
}

/// A tableau branch: labeled formulae, labels, the equations `EQ(B)`, the
/// equations derived from strong/negated-weak permission pairs, and the
/// recorded inequations.
#[derive(Debug, Clone)]
pub struct Branch {
    vocab: Vocabulary,
    entries: Vec<LabeledFormula>,
    classes: Vec<RuleClass>,
    index: HashMap<LabeledFormula, usize>,
    by_label: HashMap<Label, Vec<usize>>,
    labels: Vec<Label>,
    label_set: HashSet<Label>,
    equations: Vec<(ActionTerm, ActionTerm)>,
    star: Vec<(ActionTerm, ActionTerm)>,
    inequations: Vec<(ActionTerm, ActionTerm)>,
    forced: AtomSet,
    fired: HashSet<FireKey>,
    fired_log: Vec<FireKey>,
    forced_closure: Option<Closure>,
}

impl Branch {
    /// An empty branch holding only the root label.
    pub fn new(vocab: &Vocabulary) -> Self {
        let root = Label::root();
        Branch {
            vocab: vocab.clone(),
            entries: Vec::new(),
            classes: Vec::new(),
            index: HashMap::new(),
            by_label: HashMap::new(),
            labels: vec![root.clone()],
            label_set: HashSet::from([root]),
            equations: Vec::new(),
            star: Vec::new(),
            inequations: Vec::new(),
            forced: AtomSet::empty(vocab.len()),
            fired: HashSet::new(),
            fired_log: Vec::new(),
            forced_closure: None,
        }
    }

    /// A branch containing `<> : f`.
    pub fn with_root(vocab: &Vocabulary, f: Formula) -> Result<Self, DplError> {
        let mut b = Branch::new(vocab);
        b.add_formula(LabeledFormula::root(f))?;
        Ok(b)
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn formulas(&self) -> &[LabeledFormula] {
        &self.entries
    }

    pub fn contains(&self, lf: &LabeledFormula) -> bool {
        self.index.contains_key(lf)
    }

    pub fn formulas_at<'b>(&'b self, label: &Label) -> impl Iterator<Item = &'b Formula> + 'b {
        self.by_label
            .get(label)
            .into_iter()
            .flatten()
            .map(|&i| &self.entries[i].formula)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn has_label(&self, label: &Label) -> bool {
        self.label_set.contains(label)
    }

    /// `EQ(B)`: equations collected from the branch.
    pub fn equations(&self) -> &[(ActionTerm, ActionTerm)] {
        &self.equations
    }

    /// Equations `α ⊓ β = ∅` induced by `σ:P(α)`, `σ:¬Pw(β)` pairs.
    pub fn permission_equations(&self) -> &[(ActionTerm, ActionTerm)] {
        &self.star
    }

    pub fn inequations(&self) -> &[(ActionTerm, ActionTerm)] {
        &self.inequations
    }

    /// Atoms forced empty by `EQ*(B)`.
    pub fn forced_empty(&self) -> &AtomSet {
        &self.forced
    }

    pub fn live_formula_count(&self) -> usize {
        self.entries.len()
    }

    fn live(&self, t: &ActionTerm) -> Result<AtomSet, DplError> {
        Ok(denote(t, &self.vocab)?.difference(&self.forced))
    }

    /// The live atom a term denotes, if it denotes exactly one.
    pub(crate) fn atom_of(&self, t: &ActionTerm) -> Result<Option<AtomId>, DplError> {
        Ok(self.live(t)?.single())
    }

    fn record_equation(&mut self, l: ActionTerm, r: ActionTerm, star: bool) -> Result<(), DplError> {
        let diff = denote(&l, &self.vocab)?.symmetric_difference(&denote(&r, &self.vocab)?);
        self.forced.union_with(&diff);
        if star {
            self.star.push((l, r));
        } else {
            self.equations.push((l, r));
        }
        Ok(())
    }

    fn recompute_forced(&mut self) -> Result<(), DplError> {
        let mut forced = AtomSet::empty(self.vocab.len());
        for (l, r) in self.equations.iter().chain(&self.star) {
            forced.union_with(&denote(l, &self.vocab)?.symmetric_difference(&denote(r, &self.vocab)?));
        }
        self.forced = forced;
        Ok(())
    }

    fn mark(&mut self, key: FireKey) -> bool {
        if self.fired.insert(key.clone()) {
            self.fired_log.push(key);
            true
        } else {
            false
        }
    }

    fn is_fired(&self, key: &FireKey) -> bool {
        self.fired.contains(key)
    }

    /// Adds a label; its parent must already be present.
    pub fn add_label(&mut self, label: Label) -> Result<bool, DplError> {
        if self.label_set.contains(&label) {
            return Ok(false);
        }
        match label.parent() {
            Some(parent) if self.label_set.contains(&parent) => {}
            _ => {
                return Err(DplError::Precondition(format!(
                    "label {} does not extend a label of the branch",
                    label.render(&self.vocab)
                )))
            }
        }
        self.labels.push(label.clone());
        self.label_set.insert(label);
        Ok(true)
    }

    pub fn add_inequation(&mut self, l: ActionTerm, r: ActionTerm) -> Result<bool, DplError> {
        l.check_vocab(&self.vocab)?;
        r.check_vocab(&self.vocab)?;
        if self.inequations.iter().any(|(x, y)| *x == l && *y == r) {
            return Ok(false);
        }
        self.inequations.push((l, r));
        Ok(true)
    }

    /// Inserts a labeled formula. Equations and inequations are recorded
    /// immediately, as are permission pairs contributing to `EQ*`.
    pub fn add_formula(&mut self, lf: LabeledFormula) -> Result<bool, DplError> {
        if self.index.contains_key(&lf) {
            return Ok(false);
        }
        if !self.label_set.contains(&lf.label) {
            return Err(DplError::Precondition(format!(
                "label {} is not in the branch",
                lf.label.render(&self.vocab)
            )));
        }
        for a in crate::syntax::primitive_actions(&lf.formula) {
            if !self.vocab.has_action(&a) {
                return Err(DplError::UndeclaredAction(a));
            }
        }
        let class = classify(&lf.formula);
        let idx = self.entries.len();

        match class {
            RuleClass::Eql => {
                let (positive, l, r) = match &lf.formula {
                    Formula::Eq(l, r) => (true, l, r),
                    Formula::Neq(l, r) => (false, l, r),
                    Formula::Not(g) => match &**g {
                        Formula::Eq(l, r) => (false, l, r),
                        Formula::Neq(l, r) => (true, l, r),
                        _ => unreachable!("classified as equation"),
                    },
                    _ => unreachable!("classified as equation"),
                };
                if positive {
                    self.record_equation(l.clone(), r.clone(), false)?;
                } else {
                    self.add_inequation(l.clone(), r.clone())?;
                }
                self.mark(FireKey::Once(idx));
            }
            RuleClass::Lit => {
                self.mark(FireKey::Once(idx));
            }
            RuleClass::ND => {
                // P(α) pairs with every ¬Pw(β) at the same label, and vice versa.
                let lit = DeonticLit::of(&lf.formula).expect("deontic necessity");
                let partners: Vec<ActionTerm> = self
                    .formulas_at(&lf.label)
                    .filter_map(DeonticLit::of)
                    .filter(|other| {
                        !other.is_possibility() && other.kind != lit.kind
                    })
                    .map(|other| other.term.clone())
                    .collect();
                for partner in partners {
                    let (strong, weak) = match lit.kind {
                        PermKind::Strong => (lit.term.clone(), partner),
                        PermKind::Weak => (partner, lit.term.clone()),
                    };
                    self.record_equation(strong.meet(weak), ActionTerm::Empty, true)?;
                }
            }
            _ => {}
        }

        self.by_label.entry(lf.label.clone()).or_default().push(idx);
        self.index.insert(lf.clone(), idx);
        self.entries.push(lf);
        self.classes.push(class);
        Ok(true)
    }

    pub(crate) fn snapshot(&self) -> Snapshot {
        Snapshot {
            entries: self.entries.len(),
            labels: self.labels.len(),
            equations: self.equations.len(),
            star: self.star.len(),
            inequations: self.inequations.len(),
            fired: self.fired_log.len(),
            forced_closure: self.forced_closure.clone(),
        }
    }

    pub(crate) fn restore(&mut self, snap: Snapshot) -> Result<(), DplError> {
        while self.entries.len() > snap.entries {
            let lf = self.entries.pop().expect("nonempty");
            self.classes.pop();
            self.index.remove(&lf);
            if let Some(list) = self.by_label.get_mut(&lf.label) {
                list.pop();
                if list.is_empty() {
                    self.by_label.remove(&lf.label);
                }
            }
        }
        while self.labels.len() > snap.labels {
            let l = self.labels.pop().expect("nonempty");
            self.label_set.remove(&l);
        }
        while self.fired_log.len() > snap.fired {
            let k = self.fired_log.pop().expect("nonempty");
            self.fired.remove(&k);
        }
        let equations_changed =
            self.equations.len() != snap.equations || self.star.len() != snap.star;
        self.equations.truncate(snap.equations);
        self.star.truncate(snap.star);
        self.inequations.truncate(snap.inequations);
        if equations_changed {
            self.recompute_forced()?;
        }
        self.forced_closure = snap.forced_closure;
        Ok(())
    }

    pub(crate) fn apply_fact(&mut self, fact: &Fact) -> Result<bool, DplError> {
        match fact {
            Fact::Formula(lf) => self.add_formula(lf.clone()),
            Fact::Expanded(lf) => {
                let added = self.add_formula(lf.clone())?;
                if added {
                    let idx = self.entries.len() - 1;
                    self.mark(FireKey::Once(idx));
                }
                Ok(added)
            }
            Fact::Label(l) => self.add_label(l.clone()),
            Fact::Inequation(l, r) => self.add_inequation(l.clone(), r.clone()),
        }
    }

    /// `EQ*(B)` as a boolean theory.
    pub fn eq_star(&self) -> Result<BooleanTheory, DplError> {
        BooleanTheory::from_equations(
            &self.vocab,
            self.equations.iter().chain(&self.star).cloned(),
        )
    }

    /// The closure test: propositional, deontic, then boolean.
    pub fn closure(&self) -> Result<Option<Closure>, DplError> {
        if let Some(c) = &self.forced_closure {
            return Ok(Some(c.clone()));
        }
        for label in &self.labels {
            if let Some(c) = self.label_closure(label)? {
                return Ok(Some(c));
            }
        }
        if self.forced.complement().is_empty() {
            return Ok(Some(Closure::new(
                ClosureVerdict::ClosedBoolean,
                "EQ* proves 0 = U".into(),
            )));
        }
        for (l, r) in &self.inequations {
            if self.live(l)? == self.live(r)? {
                return Ok(Some(Closure::new(
                    ClosureVerdict::ClosedBoolean,
                    format!("EQ* proves {l} = {r}, contradicting {l} != {r}"),
                )));
            }
        }
        Ok(None)
    }

    fn label_closure(&self, label: &Label) -> Result<Option<Closure>, DplError> {
        let at = |f: &Formula| format!("{} : {f}", label.render(&self.vocab));
        let mut positive = HashSet::new();
        let mut negative = HashSet::new();
        let mut deontic = Vec::new();
        for f in self.formulas_at(label) {
            match f {
                Formula::False => {
                    return Ok(Some(Closure::new(ClosureVerdict::ClosedProp, at(f))));
                }
                Formula::Prop(p) => {
                    positive.insert(p);
                }
                Formula::Not(g) => match &**g {
                    Formula::True => {
                        return Ok(Some(Closure::new(ClosureVerdict::ClosedProp, at(f))));
                    }
                    Formula::Prop(p) => {
                        negative.insert(p);
                    }
                    _ => {}
                },
                _ => {}
            }
            // `<0>φ`, `Pw(0)` and `¬P(0)` have no witness. Checking this here
            // keeps closure monotone: an atom seen by (iii) below can later be
            // forced empty, and then this test takes over.
            let witness_term = match f {
                Formula::Diamond(a, _) => Some(a),
                _ => DeonticLit::of(f)
                    .filter(|lit| lit.is_possibility())
                    .map(|lit| lit.term),
            };
            if let Some(a) = witness_term {
                if self.live(a)?.is_empty() {
                    return Ok(Some(Closure::new(
                        ClosureVerdict::ClosedBoolean,
                        format!("EQ* proves {a} = 0, so {} has no witness", at(f)),
                    )));
                }
            }
            if let Some(lit) = DeonticLit::of(f) {
                deontic.push(lit);
            }
        }
        let mut clash: Vec<&&String> = positive.intersection(&negative).collect();
        clash.sort();
        if let Some(p) = clash.first() {
            return Ok(Some(Closure::new(
                ClosureVerdict::ClosedProp,
                format!("{} and ~{p}", at(&Formula::prop(p.as_str()))),
            )));
        }
        for (i, x) in deontic.iter().enumerate() {
            for y in &deontic[i + 1..] {
                let (pos, neg) = match (x.positive, y.positive) {
                    (true, false) => (x, y),
                    (false, true) => (y, x),
                    _ => continue,
                };
                let contradicts = if pos.kind == neg.kind {
                    // (i) P(α), ¬P(α) and (ii) Pw(α), ¬Pw(α).
                    pos.term == neg.term
                } else if pos.kind == PermKind::Weak {
                    // (iii) Pw(γ), ¬P(γ) for an atom γ.
                    match (self.atom_of(pos.term)?, self.atom_of(neg.term)?) {
                        (Some(g1), Some(g2)) => g1 == g2,
                        _ => false,
                    }
                } else {
                    false
                };
                if contradicts {
                    return Ok(Some(Closure::new(
                        ClosureVerdict::ClosedDeontic,
                        format!(
                            "{} and {}",
                            at(&pos.with_term(pos.term.clone())),
                            at(&neg.with_term(neg.term.clone()))
                        ),
                    )));
                }
            }
        }
        Ok(None)
    }

    // ---- rule application -------------------------------------------------

    pub(crate) fn class_of(&self, idx: usize) -> RuleClass {
        self.classes[idx]
    }

    pub(crate) fn entry(&self, idx: usize) -> &LabeledFormula {
        &self.entries[idx]
    }

    pub(crate) fn index_of(&self, lf: &LabeledFormula) -> Option<usize> {
        self.index.get(lf).copied()
    }

    pub(crate) fn mark_expanded(&mut self, idx: usize) -> bool {
        self.mark(FireKey::Once(idx))
    }

    pub(crate) fn is_expanded(&self, idx: usize) -> bool {
        self.is_fired(&FireKey::Once(idx))
    }

    pub(crate) fn force_close(&mut self, closure: Closure) {
        self.forced_closure = Some(closure);
    }

    /// Applies every pending A rule, recording each application.
    pub(crate) fn apply_alpha_rules(&mut self, steps: &mut Vec<RuleStep>) -> Result<bool, DplError> {
        let mut progress = false;
        let mut idx = 0;
        while idx < self.entries.len() {
            if self.classes[idx] == RuleClass::A && !self.is_expanded(idx) {
                self.mark(FireKey::Once(idx));
                let lf = self.entries[idx].clone();
                let mut produced = Vec::new();
                for part in alpha_components(&lf.formula) {
                    let new = LabeledFormula::new(lf.label.clone(), part);
                    if self.add_formula(new.clone())? {
                        produced.push(new.render(&self.vocab));
                    }
                }
                steps.push(RuleStep::linear("A", lf.render(&self.vocab), produced));
                progress = true;
            }
            idx += 1;
        }
        Ok(progress)
    }

    /// Pending applications of the generative rules N, ND and Per.
    fn pending_generative(&self) -> Result<Vec<(FireKey, &'static str, usize, LabeledFormula)>, DplError> {
        let mut out = Vec::new();
        for (idx, lf) in self.entries.iter().enumerate() {
            match self.classes[idx] {
                RuleClass::N => {
                    let (action, body) = modal_parts(&lf.formula).expect("necessity form");
                    let live = self.live(action)?;
                    for child in self.labels.iter().filter(|l| l.is_child_of(&lf.label)) {
                        let key = FireKey::Label(idx, child.clone());
                        let atom = child.last().expect("child label");
                        if !self.is_fired(&key) && live.contains(atom) {
                            out.push((key, "N", idx, LabeledFormula::new(child.clone(), body.clone())));
                        }
                    }
                }
                RuleClass::ND => {
                    let lit = DeonticLit::of(&lf.formula).expect("deontic necessity");
                    let live = self.live(lit.term)?;
                    for &j in self.by_label.get(&lf.label).into_iter().flatten() {
                        let Some(fact) = DeonticLit::of(&self.entries[j].formula) else {
                            continue;
                        };
                        if !fact.is_possibility() {
                            continue;
                        }
                        let key = FireKey::Fact(idx, j);
                        if self.is_fired(&key) {
                            continue;
                        }
                        if let Some(atom) = self.atom_of(fact.term)? {
                            if live.contains(atom) {
                                let produced = lit.with_term(fact.term.clone());
                                out.push((key, "ND", idx, LabeledFormula::new(lf.label.clone(), produced)));
                            }
                        }
                    }
                }
                RuleClass::PD => {
                    let lit = DeonticLit::of(&lf.formula).expect("deontic possibility");
                    let key = FireKey::Per(idx);
                    if lit.kind == PermKind::Weak && !self.is_fired(&key) && self.atom_of(lit.term)?.is_some() {
                        let produced = Formula::perm(lit.term.clone());
                        out.push((key, "Per", idx, LabeledFormula::new(lf.label.clone(), produced)));
                    }
                }
                _ => {}
            }
        }
        Ok(out)
    }

    /// One round of the generative rules; returns whether a formula was added.
    pub(crate) fn apply_generative_rules(&mut self, steps: &mut Vec<RuleStep>) -> Result<bool, DplError> {
        let pending = self.pending_generative()?;
        let mut progress = false;
        let mut grouped: Vec<(&'static str, usize, Vec<String>)> = Vec::new();
        for (key, rule, premise, lf) in pending {
            self.mark(key);
            if self.add_formula(lf.clone())? {
                progress = true;
                let rendered = lf.render(&self.vocab);
                match grouped.last_mut() {
                    Some((r, p, produced)) if *r == rule && *p == premise => produced.push(rendered),
                    _ => grouped.push((rule, premise, vec![rendered])),
                }
            }
        }
        for (rule, premise, produced) in grouped {
            steps.push(RuleStep::linear(rule, self.entries[premise].render(&self.vocab), produced));
        }
        Ok(progress)
    }

    /// Runs the deterministic rules to a fixpoint, checking closure along
    /// the way.
    pub(crate) fn saturate(&mut self, steps: &mut Vec<RuleStep>) -> Result<Option<Closure>, DplError> {
        loop {
            let alpha = self.apply_alpha_rules(steps)?;
            if let Some(c) = self.closure()? {
                return Ok(Some(c));
            }
            let generative = self.apply_generative_rules(steps)?;
            if generative {
                if let Some(c) = self.closure()? {
                    return Ok(Some(c));
                }
            }
            if !alpha && !generative {
                return Ok(None);
            }
        }
    }

    /// Next branching rule to apply: B first, then PD, then P.
    pub(crate) fn next_branching(&self) -> Option<usize> {
        [RuleClass::B, RuleClass::PD, RuleClass::P]
            .into_iter()
            .find_map(|class| {
                (0..self.entries.len())
                    .find(|&i| self.classes[i] == class && !self.is_expanded(i))
            })
    }

    /// The alternatives of a branching rule. P and PD rules range over
    /// atoms and are returned unexpanded so callers can iterate lazily.
    pub(crate) fn choices(&self, idx: usize) -> Result<Choices, DplError> {
        let lf = &self.entries[idx];
        let at = |f: Formula| LabeledFormula::new(lf.label.clone(), f);
        let atoms = |term: &ActionTerm, rule: AtomRule| -> Result<Choices, DplError> {
            Ok(Choices::Atoms(AtomExpansion {
                label: lf.label.clone(),
                rule,
                term: term.clone(),
                theory: self.eq_star()?,
            }))
        };
        match self.classes[idx] {
            RuleClass::A => Ok(Choices::Listed(vec![alpha_components(&lf.formula)
                .into_iter()
                .map(|f| Fact::Formula(at(f)))
                .collect()])),
            RuleClass::B => Ok(Choices::Listed(
                beta_components(&lf.formula)
                    .into_iter()
                    .map(|parts| parts.into_iter().map(|f| Fact::Formula(at(f))).collect())
                    .collect(),
            )),
            RuleClass::P => {
                let (action, body) = modal_parts(&lf.formula).expect("possibility form");
                atoms(action, AtomRule::Modal(body))
            }
            RuleClass::PD => {
                let lit = DeonticLit::of(&lf.formula).expect("deontic possibility");
                atoms(
                    lit.term,
                    AtomRule::Deontic {
                        kind: lit.kind,
                        positive: lit.positive,
                    },
                )
            }
            _ => Ok(Choices::Listed(Vec::new())),
        }
    }

    /// Every alternative of a branching rule, expanded.
    pub(crate) fn alternatives(&self, idx: usize) -> Result<Vec<Vec<Fact>>, DplError> {
        match self.choices(idx)? {
            Choices::Listed(alts) => Ok(alts),
            Choices::Atoms(exp) => Ok(exp.atoms()?.map(|atom| exp.facts(atom)).collect()),
        }
    }

    pub(crate) fn render_alternative(&self, facts: &[Fact]) -> Vec<String> {
        facts.iter().map(|f| f.render(&self.vocab)).collect()
    }

    /// No rule has pending work.
    pub fn is_saturated(&self) -> Result<bool, DplError> {
        let one_shot_pending = (0..self.entries.len()).any(|i| {
            matches!(
                self.classes[i],
                RuleClass::A | RuleClass::B | RuleClass::P | RuleClass::PD
            ) && !self.is_expanded(i)
        });
        if one_shot_pending {
            return Ok(false);
        }
        Ok(self
            .pending_generative()?
            .iter()
            .all(|(_, _, _, lf)| self.contains(lf)))
    }
}

/// `EQ*(B)`.
pub fn eq_star(b: &Branch) -> Result<BooleanTheory, DplError> {
    b.eq_star()
}

/// Closure status of a branch.
pub fn closure_verdict(b: &Branch) -> Result<ClosureVerdict, DplError> {
    Ok(b.closure()?.map_or(ClosureVerdict::OpenSoFar, |c| c.verdict))
}

/// Applies the rule of `lf`'s class to a copy of `b`, one result per
/// alternative. Generative rules (N, ND) add every currently applicable
/// conclusion; literals and equations are recorded on insertion and leave
/// the branch unchanged.
pub fn apply_rule(b: &Branch, lf: &LabeledFormula) -> Result<Vec<Branch>, DplError> {
    let idx = b
        .index_of(lf)
        .ok_or_else(|| DplError::Precondition(format!("`{}` is not in the branch", lf.render(b.vocabulary()))))?;
    match b.class_of(idx) {
        RuleClass::A | RuleClass::B | RuleClass::P | RuleClass::PD => {
            if b.is_expanded(idx) {
                return Err(DplError::AlreadyExpanded(lf.render(b.vocabulary())));
            }
            let alternatives = b.alternatives(idx)?;
            if alternatives.is_empty() {
                let mut closed = b.clone();
                closed.mark_expanded(idx);
                closed.force_close(Closure::new(
                    ClosureVerdict::ClosedBoolean,
                    format!("no possible execution for {}", lf.render(b.vocabulary())),
                ));
                return Ok(vec![closed]);
            }
            alternatives
                .iter()
                .map(|facts| {
                    let mut next = b.clone();
                    next.mark_expanded(idx);
                    for fact in facts {
                        next.apply_fact(fact)?;
                    }
                    Ok(next)
                })
                .collect()
        }
        RuleClass::N | RuleClass::ND => {
            let mut next = b.clone();
            let pending: Vec<_> = next
                .pending_generative()?
                .into_iter()
                .filter(|(_, rule, premise, _)| *premise == idx && *rule != "Per")
                .collect();
            for (key, _, _, produced) in pending {
                next.mark(key);
                next.add_formula(produced)?;
            }
            Ok(vec![next])
        }
        RuleClass::Lit | RuleClass::Eql => Ok(vec![b.clone()]),
    }
}

/// The Per rule: a weakly permitted atom is strongly permitted.
pub fn apply_per(b: &Branch, lf: &LabeledFormula) -> Result<Branch, DplError> {
    let idx = b
        .index_of(lf)
        .ok_or_else(|| DplError::Precondition(format!("`{}` is not in the branch", lf.render(b.vocabulary()))))?;
    let mut next = b.clone();
    let pending: Vec<_> = next
        .pending_generative()?
        .into_iter()
        .filter(|(_, rule, premise, _)| *premise == idx && *rule == "Per")
        .collect();
    if pending.is_empty() {
        return Err(DplError::Precondition(format!(
            "Per does not apply to `{}`",
            lf.render(b.vocabulary())
        )));
    }
    for (key, _, _, produced) in pending {
        next.mark(key);
        next.add_formula(produced)?;
    }
    Ok(next)
}
