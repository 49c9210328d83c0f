mod common;

use common::{random_formula, random_structure, rng, vocab, FormulaShape};
use dpl::semantics::{satisfies, validate_structure};
use dpl::syntax::{
    degree, existential_counts, existential_degree, is_existential, is_nnf, nnf, parse_formula_open, pretty_print,
    primitive_actions, subformulae_at_level, subformulae_at_level_list, Formula,
};
use proptest::prelude::*;

fn shape(max_degree: usize, max_size: usize) -> FormulaShape {
    FormulaShape {
        max_degree,
        max_size,
        ..FormulaShape::small()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let f = random_formula(&mut rng(seed), &shape(3, 20));
        let text = pretty_print(&f);
        prop_assert_eq!(parse_formula_open(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn nnf_preserves_degree_and_actions(seed in any::<u64>()) {
        let f = random_formula(&mut rng(seed), &shape(3, 20));
        let n = nnf(&f).into_formula();
        prop_assert_eq!(degree(&n), degree(&f));
        prop_assert_eq!(primitive_actions(&n), primitive_actions(&f));
        prop_assert!(is_nnf(&n));
    }

    #[test]
    fn nnf_preserves_truth(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = vocab(&["a", "b"]);
        let f = random_formula(&mut r, &shape(2, 12));
        let m = random_structure(&mut r, &v, &["p", "q"], 4);
        prop_assert_eq!(validate_structure(&m), Ok(()));
        let n = nnf(&f).into_formula();
        for w in 0..m.worlds.len() {
            prop_assert_eq!(satisfies(&m, w, &f).unwrap(), satisfies(&m, w, &n).unwrap(), "{} at {}", f, w);
        }
    }

    #[test]
    fn existential_degree_is_the_largest_level_count(seed in any::<u64>()) {
        let f = random_formula(&mut rng(seed), &shape(3, 20));
        let counts = existential_counts(&f);
        prop_assert_eq!(counts.iter().copied().max().unwrap_or(0), existential_degree(&f));
        prop_assert!(counts.len() <= degree(&f) + 1);
    }

    #[test]
    fn level_zero_counts_add_over_conjunction(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_formula(&mut r, &shape(2, 10));
        let g = random_formula(&mut r, &shape(2, 10));
        let level0 = |h: &Formula| existential_counts(h)[0];
        prop_assert_eq!(level0(&f.clone().and(g.clone())), level0(&f) + level0(&g));
    }
}

/// Normal-form formulae built from random tree models: at every level the
/// existential members (counted with multiplicity) never outnumber the
/// existential degree, and the maximum is reached at some level.
#[test]
fn sf_existential_members_are_bounded_by_the_degree() {
    let v = vocab(&["a", "b"]);
    for seed in 0..300 {
        let mut r = rng(seed);
        let m = common::random_tree_model(&mut r, &v, &["p", "q"], 2, 3);
        let f = common::nf_formula_true_at(&mut r, &m, &v, 0, 2);
        let d = existential_degree(&f);
        let existential = |k| {
            subformulae_at_level_list(&f, k)
                .unwrap()
                .iter()
                .filter(|g| is_existential(g))
                .count()
        };
        let counts: Vec<usize> = (0..=degree(&f)).map(existential).collect();
        assert_eq!(counts.iter().copied().max(), Some(d), "seed {seed}: {f} {counts:?}");
        for k in 0..=degree(&f) {
            let set = subformulae_at_level(&f, k).unwrap();
            assert!(set.iter().filter(|g| is_existential(g)).count() <= d, "seed {seed}: {f}");
        }
    }
}
