mod common;

use std::collections::BTreeSet;

use common::{
    nf_formula_true_at, random_formula, random_structure, random_term, random_tree_model, rng,
    vocab, FormulaShape,
};
use dpl::algebra::{atom_term, AtomId};
use dpl::semantics::{
    bounded_sat_oracle, from_json, interpret_term, satisfies, shrink_model, to_json, unravel,
    validate_structure, VStructure,
};
use dpl::syntax::{existential_degree, nnf, Formula, Vocabulary};
use proptest::prelude::*;

/// Every single-world structure over `vocab` with up to `max_events`
/// events, each action given every possible subset of the events.
fn small_structures(vocab: &Vocabulary, max_events: usize) -> Vec<VStructure> {
    let n = vocab.len();
    let mut out = Vec::new();
    for events in 1..=max_events {
        // Bit `i * events + e`: event `e` lies in action `i`.
        for code in 0u32..1 << (n * events) {
            let mut m = VStructure::new();
            m.add_world("w");
            for e in 0..events {
                m.add_event(format!("e{e}"));
            }
            for (i, name) in vocab.actions().iter().enumerate() {
                let set: BTreeSet<usize> =
                    (0..events).filter(|e| code & 1 << (i * events + e) != 0).collect();
                m.actions.insert(name.clone(), set);
            }
            out.push(m);
        }
    }
    out
}

#[test]
fn atoms_denote_at_most_one_event() {
    for actions in [&["a"][..], &["a", "b"], &["a", "b", "c"]] {
        let v = vocab(actions);
        let max_events = if actions.len() == 3 { 3 } else { 4 };
        let mut valid = 0;
        for m in small_structures(&v, max_events) {
            if validate_structure(&m).is_err() {
                continue;
            }
            valid += 1;
            for bits in 1u32..1 << v.len() {
                let g = atom_term(AtomId::new(bits).unwrap(), &v);
                let events = interpret_term(&m, &g).unwrap();
                assert!(events.len() <= 1, "{g} denotes {events:?}");
                // With one event below the atom, strong and weak permission agree.
                if let Some(&e) = events.iter().next() {
                    for permitted in [false, true] {
                        let mut m = m.clone();
                        if permitted {
                            m.permitted.insert((0, e));
                        }
                        assert_eq!(
                            satisfies(&m, 0, &Formula::perm(g.clone())).unwrap(),
                            satisfies(&m, 0, &Formula::weak_perm(g.clone())).unwrap()
                        );
                    }
                }
            }
        }
        assert!(valid > 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn oracle_agrees_with_itself_after_nnf(seed in any::<u64>()) {
        let v = Vocabulary::new(["a", "b"], ["p", "q"]).unwrap();
        let f = random_formula(&mut rng(seed), &FormulaShape::small());
        let n = nnf(&f).into_formula();
        let direct = bounded_sat_oracle(&f, &v).unwrap();
        prop_assert_eq!(direct.is_satisfiable(), bounded_sat_oracle(&n, &v).unwrap().is_satisfiable());
        if let dpl::semantics::OracleOutcome::Satisfiable(m) = direct {
            prop_assert_eq!(validate_structure(&m), Ok(()));
            prop_assert!(satisfies(&m, 0, &f).unwrap());
        }
    }

    #[test]
    fn equations_hold_everywhere_or_nowhere(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = vocab(&["a", "b"]);
        let m = random_structure(&mut r, &v, &["p"], 4);
        let actions = v.actions().to_vec();
        let eq = Formula::eq(random_term(&mut r, &actions, 2), random_term(&mut r, &actions, 2));
        let truth: BTreeSet<bool> = (0..m.worlds.len()).map(|w| satisfies(&m, w, &eq).unwrap()).collect();
        prop_assert_eq!(truth.len(), 1);
    }

    #[test]
    fn shrinking_keeps_the_formula_true(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = vocab(&["a", "b"]);
        let m = random_tree_model(&mut r, &v, &["p", "q"], 2, 3);
        let f = nf_formula_true_at(&mut r, &m, &v, 0, 2);
        let small = shrink_model(&m, 0, &f).unwrap();
        prop_assert_eq!(validate_structure(&small), Ok(()));
        prop_assert!(satisfies(&small, 0, &f).unwrap(), "{}", f);
        prop_assert!(small.max_out_degree() <= existential_degree(&f));
    }

    #[test]
    fn unravelling_preserves_truth(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = vocab(&["a", "b"]);
        let m = random_structure(&mut r, &v, &["p", "q"], 3);
        let f = random_formula(&mut r, &FormulaShape::small());
        let tree = unravel(&m, 0, 2).unwrap();
        prop_assert_eq!(validate_structure(&tree), Ok(()));
        prop_assert_eq!(satisfies(&tree, 0, &f).unwrap(), satisfies(&m, 0, &f).unwrap(), "{}", f);
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let v = vocab(&["a", "b"]);
        let m = random_structure(&mut rng(seed), &v, &["p", "q"], 4);
        prop_assert_eq!(from_json(&to_json(&m)).unwrap(), m);
    }
}
