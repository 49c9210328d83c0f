//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

pub mod boolean;

use std::collections::BTreeSet;

use dpl::algebra::{atom_term, AtomId};
use dpl::semantics::{interpret_term, satisfies, VStructure};
use dpl::syntax::{ActionTerm, Formula, Vocabulary};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vocab(actions: &[&str]) -> Vocabulary {
    Vocabulary::new(actions.iter().copied(), Vec::<String>::new()).unwrap()
}

/// Shape limits for [`random_formula`].
#[derive(Debug, Clone)]
pub struct FormulaShape {
    pub actions: Vec<String>,
    pub props: Vec<String>,
    pub max_degree: usize,
    pub max_size: usize,
    pub deontic: bool,
    /// Allow one top-level equation or inequation.
    pub equation: bool,
}

impl FormulaShape {
    /// Vocabulary {a,b}, propositions p and q, degree at most 2, size at most 12.
    pub fn small() -> Self {
        FormulaShape {
            actions: vec!["a".into(), "b".into()],
            props: vec!["p".into(), "q".into()],
            max_degree: 2,
            max_size: 12,
            deontic: true,
            equation: true,
        }
    }
}

pub fn random_term<R: Rng>(rng: &mut R, actions: &[String], depth: usize) -> ActionTerm {
    let roll = rng.gen_range(0..100);
    if depth == 0 || roll < 50 {
        return match rng.gen_range(0..20) {
            0 => ActionTerm::Univ,
            1 => ActionTerm::Empty,
            _ => ActionTerm::prim(actions.choose(rng).unwrap().clone()),
        };
    }
    match roll {
        50..=64 => random_term(rng, actions, depth - 1).compl(),
        65..=82 => random_term(rng, actions, depth - 1).meet(random_term(rng, actions, depth - 1)),
        _ => random_term(rng, actions, depth - 1).join(random_term(rng, actions, depth - 1)),
    }
}

fn leaf<R: Rng>(rng: &mut R, s: &FormulaShape) -> Formula {
    let roll = rng.gen_range(0..100);
    match roll {
        0..=3 => Formula::True,
        4..=6 => Formula::False,
        7..=29 if s.deontic => {
            let t = random_term(rng, &s.actions, 1);
            if rng.gen_bool(0.5) {
                Formula::perm(t)
            } else {
                Formula::weak_perm(t)
            }
        }
        _ => Formula::prop(s.props.choose(rng).unwrap().clone()),
    }
}

fn node<R: Rng>(rng: &mut R, s: &FormulaShape, degree: usize, budget: usize) -> Formula {
    if budget <= 2 {
        return leaf(rng, s);
    }
    let modal = degree > 0;
    match rng.gen_range(0..if modal { 10 } else { 6 }) {
        0 => node(rng, s, degree, budget - 1).not(),
        1 | 2 => {
            let l = rng.gen_range(1..budget - 1);
            node(rng, s, degree, l).and(node(rng, s, degree, budget - 1 - l))
        }
        3 => {
            let l = rng.gen_range(1..budget - 1);
            node(rng, s, degree, l).or(node(rng, s, degree, budget - 1 - l))
        }
        4 => {
            let l = rng.gen_range(1..budget - 1);
            node(rng, s, degree, l).implies(node(rng, s, degree, budget - 1 - l))
        }
        5 => {
            let l = rng.gen_range(1..budget - 1);
            node(rng, s, degree, l).iff(node(rng, s, degree, budget - 1 - l))
        }
        6 | 7 => Formula::boxed(
            random_term(rng, &s.actions, 1),
            node(rng, s, degree - 1, budget - 2),
        ),
        _ => Formula::diamond(
            random_term(rng, &s.actions, 1),
            node(rng, s, degree - 1, budget - 2),
        ),
    }
}

/// A random formula within `shape`; equations only appear outside modal scope.
pub fn random_formula<R: Rng>(rng: &mut R, shape: &FormulaShape) -> Formula {
    loop {
        let budget = rng.gen_range(1..=shape.max_size);
        let mut f = node(rng, shape, shape.max_degree, budget);
        if shape.equation && rng.gen_bool(0.25) {
            let l = random_term(rng, &shape.actions, 1);
            let r = random_term(rng, &shape.actions, 1);
            let eq = if rng.gen_bool(0.5) {
                Formula::eq(l, r)
            } else {
                Formula::neq(l, r)
            };
            f = match rng.gen_range(0..3) {
                0 => eq.and(f),
                1 => eq.implies(f),
                _ => f.or(eq),
            };
        }
        if f.size() <= shape.max_size {
            return f;
        }
    }
}

/// Events of the canonical structure: every atom over `vocab`.
fn add_atom_events(m: &mut VStructure, vocab: &Vocabulary) -> Vec<AtomId> {
    let atoms: Vec<AtomId> = (1u32..1 << vocab.len()).map(|b| AtomId::new(b).unwrap()).collect();
    for &a in &atoms {
        m.add_event(a.render(vocab));
    }
    for (i, name) in vocab.actions().iter().enumerate() {
        let events = atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| a.has_action(i))
            .map(|(e, _)| e)
            .collect();
        m.actions.insert(name.clone(), events);
    }
    atoms
}

/// A random tree of the given depth whose events are the atoms of `vocab`.
pub fn random_tree_model<R: Rng>(
    rng: &mut R,
    vocab: &Vocabulary,
    props: &[&str],
    depth: usize,
    max_branching: usize,
) -> VStructure {
    let mut m = VStructure::new();
    let events = add_atom_events(&mut m, vocab).len();
    for p in props {
        m.propositions.insert(p.to_string(), BTreeSet::new());
    }
    let mut frontier = vec![(m.add_world("w0"), 0)];
    while let Some((w, d)) = frontier.pop() {
        for p in props {
            if rng.gen_bool(0.5) {
                m.propositions.get_mut(*p).unwrap().insert(w);
            }
        }
        for e in 0..events {
            if rng.gen_bool(0.35) {
                m.permitted.insert((w, e));
            }
        }
        if d == depth {
            continue;
        }
        // Distinct events per world keep the transition relation functional.
        let n = rng.gen_range(0..=max_branching.min(events));
        let chosen: Vec<usize> = (0..events).collect::<Vec<_>>().choose_multiple(rng, n).copied().collect();
        for e in chosen {
            let v = m.add_world(format!("w{}", m.worlds.len()));
            m.transitions.insert((w, e, v));
            frontier.push((v, d + 1));
        }
    }
    m
}

fn true_literal<R: Rng>(rng: &mut R, m: &VStructure, vocab: &Vocabulary, w: usize) -> Formula {
    let actions = vocab.actions();
    let f = match rng.gen_range(0..3) {
        0 => Formula::prop(*m.propositions.keys().collect::<Vec<_>>().choose(rng).unwrap()),
        1 => Formula::perm(random_term(rng, actions, 1)),
        _ => Formula::weak_perm(random_term(rng, actions, 1)),
    };
    if satisfies(m, w, &f).unwrap() {
        f
    } else {
        f.not()
    }
}

/// A random normal-form formula (conjunctions of literals, deontic
/// literals, `<α>ψ` and `¬<α>ψ`) true at `w`, with modal depth at most
/// `depth`.
pub fn nf_formula_true_at<R: Rng>(
    rng: &mut R,
    m: &VStructure,
    vocab: &Vocabulary,
    w: usize,
    depth: usize,
) -> Formula {
    let mut parts = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let succ: Vec<(usize, usize)> = m.successors(w).collect();
        match rng.gen_range(0..4) {
            0 | 1 if depth > 0 && !succ.is_empty() => {
                let &(e, u) = succ.choose(rng).unwrap();
                let mut t = random_term(rng, vocab.actions(), 1);
                if !interpret_term(m, &t).unwrap().contains(&e) {
                    let name = &m.events[e];
                    let atom = (1u32..1 << vocab.len())
                        .map(|b| AtomId::new(b).unwrap())
                        .find(|a| &a.render(vocab) == name)
                        .unwrap();
                    t = t.join(atom_term(atom, vocab));
                }
                parts.push(Formula::diamond(t, nf_formula_true_at(rng, m, vocab, u, depth - 1)));
            }
            2 if depth > 0 => {
                let t = random_term(rng, vocab.actions(), 1);
                let body = true_literal(rng, m, vocab, w);
                let g = Formula::diamond(t, body).not();
                if satisfies(m, w, &g).unwrap() {
                    parts.push(g);
                }
            }
            _ => parts.push(true_literal(rng, m, vocab, w)),
        }
    }
    if parts.is_empty() {
        Formula::True
    } else {
        Formula::conjunction(parts)
    }
}

/// A random structure (not necessarily a tree) with at most `max_worlds`
/// worlds whose events are a random nonempty set of atoms of `vocab`.
/// Always passes `validate_structure`.
pub fn random_structure<R: Rng>(
    rng: &mut R,
    vocab: &Vocabulary,
    props: &[&str],
    max_worlds: usize,
) -> VStructure {
    let all: Vec<AtomId> = (1u32..1 << vocab.len()).map(|b| AtomId::new(b).unwrap()).collect();
    let mut atoms: Vec<AtomId> = all.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
    if atoms.is_empty() {
        atoms.push(*all.choose(rng).unwrap());
    }
    let mut m = VStructure::new();
    for &a in &atoms {
        m.add_event(a.render(vocab));
    }
    for (i, name) in vocab.actions().iter().enumerate() {
        let events = (0..atoms.len()).filter(|&e| atoms[e].has_action(i)).collect();
        m.actions.insert(name.clone(), events);
    }
    let n = rng.gen_range(1..=max_worlds);
    for i in 0..n {
        m.add_world(format!("w{i}"));
    }
    for p in props {
        let ws = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        m.propositions.insert(p.to_string(), ws);
    }
    for w in 0..n {
        for e in 0..atoms.len() {
            if rng.gen_bool(0.35) {
                m.permitted.insert((w, e));
            }
            // Functional: at most one successor per (world, event).
            if rng.gen_bool(0.5) {
                m.transitions.insert((w, e, rng.gen_range(0..n)));
            }
        }
    }
    m
}
