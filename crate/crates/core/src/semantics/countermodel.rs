use std::collections::{BTreeMap, BTreeSet};

use super::VStructure;
use crate::algebra::{denote, AtomId};
use crate::error::DplError;
use crate::syntax::Formula;
use crate::tableau::{Branch, DeonticLit, Label, PermKind};

/// Builds a structure from an open saturated branch: one world per label,
/// one event per atom the branch mentions, `σ -γ-> σ·γ` for every label,
/// and the permissions and propositions the branch asserts.
///
/// Besides the atoms of labels and of atom-level deontic facts, one live
/// atom is added for each recorded inequation not already witnessed, and
/// one fallback atom when nothing else supplies an event.
pub fn extract_countermodel(b: &Branch) -> Result<VStructure, DplError> {
    if b.closure()?.is_some() || !b.is_saturated()? {
        return Err(DplError::BranchNotOpen);
    }
    let vocab = b.vocabulary();
    let forced = b.forced_empty();
    let live = forced.complement();

    let mut atoms: BTreeSet<AtomId> = BTreeSet::new();
    atoms.extend(b.labels().iter().filter_map(Label::last));
    for lf in b.formulas() {
        if let Some(lit) = DeonticLit::of(&lf.formula) {
            atoms.extend(b.atom_of(lit.term)?);
        }
    }
    for (l, r) in b.inequations() {
        let diff = denote(l, vocab)?
            .symmetric_difference(&denote(r, vocab)?)
            .difference(forced);
        if !diff.iter().any(|a| atoms.contains(&a)) {
            atoms.extend(diff.first());
        }
    }
    if atoms.is_empty() {
        atoms.extend(live.first());
    }
    debug_assert!(atoms.iter().all(|&a| live.contains(a)));

    let mut m = VStructure::new();
    let event_of: BTreeMap<AtomId, usize> = atoms
        .iter()
        .map(|&a| (a, m.add_event(a.render(vocab))))
        .collect();
    for (i, action) in vocab.actions().iter().enumerate() {
        let events = atoms
            .iter()
            .filter(|a| a.has_action(i))
            .map(|a| event_of[a])
            .collect();
        m.actions.insert(action.clone(), events);
    }

    let world_of: BTreeMap<&Label, usize> = b
        .labels()
        .iter()
        .map(|l| (l, m.add_world(l.render(vocab))))
        .collect();
    for (label, &w) in &world_of {
        if let (Some(parent), Some(atom)) = (label.parent(), label.last()) {
            m.transitions.insert((world_of[&parent], event_of[&atom], w));
        }
    }

    for p in vocab.propositions() {
        m.propositions.insert(p.clone(), BTreeSet::new());
    }
    for lf in b.formulas() {
        let w = world_of[&lf.label];
        match &lf.formula {
            Formula::Prop(p) => {
                m.propositions.entry(p.clone()).or_default().insert(w);
            }
            other => {
                let Some(lit) = DeonticLit::of(other) else {
                    continue;
                };
                if !lit.positive {
                    continue;
                }
                match lit.kind {
                    PermKind::Strong => {
                        let below = denote(lit.term, vocab)?;
                        for (&atom, &e) in &event_of {
                            if below.contains(atom) {
                                m.permitted.insert((w, e));
                            }
                        }
                    }
                    PermKind::Weak => {
                        if let Some(atom) = b.atom_of(lit.term)? {
                            m.permitted.insert((w, event_of[&atom]));
                        }
                    }
                }
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::atom_term;
    use crate::semantics::{satisfies, validate_structure};
    use crate::syntax::{parse_formula, ActionTerm, Vocabulary};
    use crate::tableau::{apply_rule, prove_tableau, LabeledFormula};

    #[test]
    fn literal_branch() {
        let v = Vocabulary::new(["a"], ["p"]).unwrap();
        let b = Branch::with_root(&v, Formula::prop("p")).unwrap();
        let m = extract_countermodel(&b).unwrap();
        assert_eq!(m.worlds, vec!["<>"]);
        assert_eq!(m.events, vec!["a"]);
        assert!(m.transitions.is_empty());
        assert_eq!(m.propositions["p"], [0].into());
        assert_eq!(validate_structure(&m), Ok(()));
    }

    #[test]
    fn weak_and_strong_permission_on_an_atom() {
        let v = Vocabulary::new(["a", "b"], ["p"]).unwrap();
        let g = AtomId::from_actions(&v, ["a"]).unwrap();
        let t = atom_term(g, &v);
        let mut b = Branch::with_root(&v, Formula::weak_perm(t.clone())).unwrap();
        b.add_formula(LabeledFormula::root(Formula::perm(t.clone())))
            .unwrap();
        let b = apply_rule(&b, &LabeledFormula::root(Formula::weak_perm(t.clone())))
            .unwrap()
            .remove(0);
        assert_eq!(b.inequations(), &[(t, ActionTerm::Empty)]);
        let m = extract_countermodel(&b).unwrap();
        let e = m.event_index("a & !b").unwrap();
        assert_eq!(m.permitted, [(0, e)].into());
        assert_eq!(validate_structure(&m), Ok(()));
    }

    #[test]
    fn refuses_closed_branches() {
        let v = Vocabulary::new(["a"], ["p"]).unwrap();
        let f = parse_formula("p && ~p", &v).unwrap();
        let b = Branch::with_root(&v, f).unwrap();
        assert_eq!(extract_countermodel(&b), Err(DplError::BranchNotOpen));
    }

    #[test]
    fn open_branches_yield_models() {
        let v = Vocabulary::new(["a", "b"], ["p", "q"]).unwrap();
        for text in [
            "<a>p && <a>~p",
            "P(a) && ~Pw(a)",
            "~P(a + b) && Pw(b) && [U]q",
            "a != b && <a & b>(p -> q)",
            "a = b && <a>p && ~P(b)",
        ] {
            let f = parse_formula(text, &v).unwrap();
            let r = prove_tableau(&f, &v).unwrap();
            let m = extract_countermodel(&r.open_branch.expect(text)).unwrap();
            assert_eq!(validate_structure(&m), Ok(()), "{text}");
            assert!(satisfies(&m, 0, &f).unwrap(), "{text}");
        }
    }
}
