//! Exhaustive search for small tree models.
//!
//! A formula of degree `d` that has a model has a tree model of depth at
//! most `d` whose out-degree is bounded by the existential degree of its
//! negation normal form. Events can be taken to be atoms of the action
//! algebra; since equations between terms constrain which atoms are
//! realized, every nonempty set of atoms is tried as the event set.
//!
//! Per event set, worlds are summarized bottom-up by their "profile": the
//! truth values of the subformulae occurring at their depth. Only the
//! profiles are enumerated, never the trees themselves, and one witness
//! tree is rebuilt at the end.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};

use super::VStructure;
use crate::algebra::{denote, AtomId};
use crate::error::DplError;
use crate::syntax::{degree, existential_degree, nnf, propositions, ActionTerm, Formula, Vocabulary};

pub const MAX_ORACLE_ACTIONS: usize = 3;
pub const MAX_ORACLE_PROPOSITIONS: usize = 3;
pub const MAX_ORACLE_DEGREE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Satisfiable(VStructure),
    Unsatisfiable,
}

impl OracleOutcome {
    pub fn is_satisfiable(&self) -> bool {
        matches!(self, OracleOutcome::Satisfiable(_))
    }
}

#[derive(Debug, Clone, Copy)]
enum Node {
    Prop(usize),
    True,
    False,
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
    Box(usize),
    Diamond(usize),
    PermS(u32),
    PermW(u32),
    Eq(u32, u32),
    Neq(u32, u32),
}

#[derive(Debug, Default)]
struct Level {
    nodes: Vec<Node>,
    /// `(term mask, body bit at the next level)` per modal node.
    modals: Vec<(u32, usize)>,
    props: Vec<String>,
    /// Atoms below the action of some permission at this level.
    deontic: u32,
    /// Bits the level above inspects.
    projection: u128,
}

struct Compiled {
    levels: Vec<Level>,
    root: usize,
}

fn mask(t: &ActionTerm, vocab: &Vocabulary) -> Result<u32, DplError> {
    Ok(denote(t, vocab)?.iter().fold(0, |m, a| m | 1 << a.bits()))
}

fn compile(f: &Formula, vocab: &Vocabulary) -> Result<Compiled, DplError> {
    fn go(f: &Formula, k: usize, levels: &mut Vec<Level>, vocab: &Vocabulary) -> Result<usize, DplError> {
        if levels.len() <= k {
            levels.resize_with(k + 1, Level::default);
        }
        let node = match f {
            Formula::Prop(p) => {
                let props = &mut levels[k].props;
                let pos = props.iter().position(|q| q == p).unwrap_or_else(|| {
                    props.push(p.clone());
                    props.len() - 1
                });
                Node::Prop(pos)
            }
            Formula::True => Node::True,
            Formula::False => Node::False,
            Formula::Not(g) => Node::Not(go(g, k, levels, vocab)?),
            Formula::And(l, r) => Node::And(go(l, k, levels, vocab)?, go(r, k, levels, vocab)?),
            Formula::Or(l, r) => Node::Or(go(l, k, levels, vocab)?, go(r, k, levels, vocab)?),
            Formula::Implies(l, r) => {
                Node::Implies(go(l, k, levels, vocab)?, go(r, k, levels, vocab)?)
            }
            Formula::Iff(l, r) => Node::Iff(go(l, k, levels, vocab)?, go(r, k, levels, vocab)?),
            Formula::Box(a, g) | Formula::Diamond(a, g) => {
                let body = go(g, k + 1, levels, vocab)?;
                levels[k + 1].projection |= 1 << body;
                let j = levels[k].modals.len();
                levels[k].modals.push((mask(a, vocab)?, body));
                if matches!(f, Formula::Box(..)) {
                    Node::Box(j)
                } else {
                    Node::Diamond(j)
                }
            }
            Formula::PermS(a) | Formula::PermW(a) => {
                let m = mask(a, vocab)?;
                levels[k].deontic |= m;
                if matches!(f, Formula::PermS(_)) {
                    Node::PermS(m)
                } else {
                    Node::PermW(m)
                }
            }
            Formula::Eq(l, r) => Node::Eq(mask(l, vocab)?, mask(r, vocab)?),
            Formula::Neq(l, r) => Node::Neq(mask(l, vocab)?, mask(r, vocab)?),
        };
        let level = &mut levels[k];
        if level.nodes.len() == 128 || level.modals.len() > 64 {
            return Err(DplError::OracleGuard(
                "more than 128 subformulae at one depth".into(),
            ));
        }
        level.nodes.push(node);
        Ok(level.nodes.len() - 1)
    }
    let mut levels = Vec::new();
    let root = go(f, 0, &mut levels, vocab)?;
    Ok(Compiled { levels, root })
}

fn eval(level: &Level, val: u32, perms: u32, summary: u128, events: u32) -> u128 {
    let mut bits = 0u128;
    let bit = |bits: u128, i: usize| bits >> i & 1 == 1;
    for (i, node) in level.nodes.iter().enumerate() {
        let v = match *node {
            Node::Prop(p) => val >> p & 1 == 1,
            Node::True => true,
            Node::False => false,
            Node::Not(a) => !bit(bits, a),
            Node::And(a, b) => bit(bits, a) && bit(bits, b),
            Node::Or(a, b) => bit(bits, a) || bit(bits, b),
            Node::Implies(a, b) => !bit(bits, a) || bit(bits, b),
            Node::Iff(a, b) => bit(bits, a) == bit(bits, b),
            Node::Box(j) => !bit(summary, 2 * j + 1),
            Node::Diamond(j) => bit(summary, 2 * j),
            Node::PermS(m) => m & events & !perms == 0,
            Node::PermW(m) => m & events & perms != 0,
            Node::Eq(l, r) => l & events == r & events,
            Node::Neq(l, r) => l & events != r & events,
        };
        if v {
            bits |= 1 << i;
        }
    }
    bits
}

/// How a world of a given profile is built: valuation, permitted events,
/// and `(event, child profile)` pairs.
#[derive(Debug, Clone)]
struct Recipe {
    val: u32,
    perms: u32,
    children: Vec<(u32, usize)>,
}

fn bits_of(mask: u32) -> impl Iterator<Item = u32> {
    (0..32).filter(move |i| mask >> i & 1 == 1)
}

/// Achievable child summaries: bit `2j` records an `α_j`-successor
/// satisfying the body of modal `j`, bit `2j+1` one falsifying it.
fn summaries(
    level: &Level,
    children: &[u128],
    events: u32,
    max_out: usize,
) -> Vec<(u128, Vec<(u32, usize)>)> {
    let reach = level.modals.iter().fold(0, |m, &(t, _)| m | t) & events;
    let contribution = |e: u32, c: u128| -> u128 {
        let mut s = 0u128;
        for (j, &(t, body)) in level.modals.iter().enumerate() {
            if t >> e & 1 == 1 {
                s |= 1 << (2 * j + usize::from(c >> body & 1 == 0));
            }
        }
        s
    };
    let mut states: BTreeMap<(u32, u128), Vec<(u32, usize)>> = BTreeMap::new();
    states.insert((0, 0), Vec::new());
    let mut frontier = vec![(0u32, 0u128)];
    for _ in 0..max_out {
        let mut next = Vec::new();
        for (used, sum) in frontier {
            let kids = states[&(used, sum)].clone();
            let floor = 32 - used.leading_zeros();
            for e in bits_of(reach).filter(|&e| e >= floor) {
                for (ci, &c) in children.iter().enumerate() {
                    let key = (used | 1 << e, sum | contribution(e, c));
                    if let Entry::Vacant(slot) = states.entry(key) {
                        let mut k = kids.clone();
                        k.push((e, ci));
                        slot.insert(k);
                        next.push(key);
                    }
                }
            }
        }
        frontier = next;
    }
    let mut by_summary: BTreeMap<u128, Vec<(u32, usize)>> = BTreeMap::new();
    for ((_, sum), kids) in states {
        by_summary
            .entry(sum)
            .and_modify(|best| {
                if kids.len() < best.len() {
                    *best = kids.clone();
                }
            })
            .or_insert(kids);
    }
    by_summary.into_iter().collect()
}

fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut sub = Some(mask);
    std::iter::from_fn(move || {
        let cur = sub?;
        sub = (cur != 0).then(|| (cur - 1) & mask);
        Some(cur)
    })
}

/// Profiles per level with their recipes; `Some` when the root bit is
/// reachable.
fn solve(c: &Compiled, events: u32, max_out: usize) -> Option<Vec<Vec<Recipe>>> {
    let depth = c.levels.len();
    let mut recipes: Vec<Vec<Recipe>> = vec![Vec::new(); depth];
    let mut profiles: Vec<Vec<u128>> = vec![Vec::new(); depth];
    for k in (0..depth).rev() {
        let level = &c.levels[k];
        let sums = if level.modals.is_empty() {
            vec![(0, Vec::new())]
        } else {
            summaries(level, &profiles[k + 1], events, max_out)
        };
        let keep = if k == 0 { 1 << c.root } else { level.projection };
        let mut seen: HashMap<u128, usize> = HashMap::new();
        for val in 0..1u32 << level.props.len() {
            for perms in submasks(level.deontic & events) {
                for (sum, kids) in &sums {
                    let key = eval(level, val, perms, *sum, events) & keep;
                    if seen.contains_key(&key) {
                        continue;
                    }
                    seen.insert(key, recipes[k].len());
                    profiles[k].push(key);
                    recipes[k].push(Recipe {
                        val,
                        perms,
                        children: kids.clone(),
                    });
                    if k == 0 && key != 0 {
                        let root = recipes[0].pop().expect("just pushed");
                        recipes[0] = vec![root];
                        return Some(recipes);
                    }
                }
            }
        }
    }
    None
}

fn build(
    m: &mut VStructure,
    c: &Compiled,
    recipes: &[Vec<Recipe>],
    k: usize,
    idx: usize,
    event_of: &BTreeMap<u32, usize>,
) -> usize {
    let w = m.add_world(format!("w{}", m.worlds.len()));
    let r = &recipes[k][idx];
    for (pos, p) in c.levels[k].props.iter().enumerate() {
        if r.val >> pos & 1 == 1 {
            m.propositions.entry(p.clone()).or_default().insert(w);
        }
    }
    for e in bits_of(r.perms) {
        m.permitted.insert((w, event_of[&e]));
    }
    for &(e, child) in &r.children {
        let v = build(m, c, recipes, k + 1, child, event_of);
        m.transitions.insert((w, event_of[&e], v));
    }
    w
}

fn witness(f: &Formula, vocab: &Vocabulary, c: &Compiled, events: u32, recipes: &[Vec<Recipe>]) -> VStructure {
    let mut m = VStructure::new();
    let mut event_of = BTreeMap::new();
    for e in bits_of(events) {
        let atom = AtomId::new(e).expect("nonzero pattern");
        event_of.insert(e, m.add_event(atom.render(vocab)));
    }
    for (i, a) in vocab.actions().iter().enumerate() {
        let set = event_of
            .iter()
            .filter(|(&e, _)| e >> i & 1 == 1)
            .map(|(_, &idx)| idx)
            .collect();
        m.actions.insert(a.clone(), set);
    }
    for p in propositions(f) {
        m.propositions.insert(p, Default::default());
    }
    build(&mut m, c, recipes, 0, 0, &event_of);
    m
}

/// Decides satisfiability of `f` over `vocab` by exhaustive enumeration of
/// bounded tree models; a found model is returned. Small inputs only.
pub fn bounded_sat_oracle(f: &Formula, vocab: &Vocabulary) -> Result<OracleOutcome, DplError> {
    bounded_sat_oracle_with(f, vocab, cfg!(feature = "parallel"))
}

/// As [`bounded_sat_oracle`]; `parallel` spreads the event sets over the
/// thread pool when the `parallel` feature is enabled. The verdict and the
/// returned model do not depend on it.
pub fn bounded_sat_oracle_with(
    f: &Formula,
    vocab: &Vocabulary,
    parallel: bool,
) -> Result<OracleOutcome, DplError> {
    f.check_vocab(vocab)?;
    if vocab.len() > MAX_ORACLE_ACTIONS {
        return Err(DplError::OracleGuard(format!(
            "{} actions (at most {MAX_ORACLE_ACTIONS})",
            vocab.len()
        )));
    }
    let props = propositions(f).len();
    if props > MAX_ORACLE_PROPOSITIONS {
        return Err(DplError::OracleGuard(format!(
            "{props} propositions (at most {MAX_ORACLE_PROPOSITIONS})"
        )));
    }
    if degree(f) > MAX_ORACLE_DEGREE {
        return Err(DplError::OracleGuard(format!(
            "degree {} (at most {MAX_ORACLE_DEGREE})",
            degree(f)
        )));
    }
    let c = compile(f, vocab)?;
    let atoms = (1u32 << vocab.len()) - 1;
    let branching = existential_degree(&nnf(f)).max(1);
    let attempt = |s: u32| {
        let max_out = branching.min(s.count_ones() as usize);
        solve(&c, s << 1, max_out).map(|recipes| (s << 1, recipes))
    };
    let event_sets = 1u32..1 << atoms;

    #[cfg(feature = "parallel")]
    let found = if parallel {
        use rayon::prelude::*;
        event_sets.into_par_iter().find_map_first(attempt)
    } else {
        event_sets.into_iter().find_map(attempt)
    };
    #[cfg(not(feature = "parallel"))]
    let found = {
        let _ = parallel;
        event_sets.into_iter().find_map(attempt)
    };

    Ok(match found {
        Some((events, recipes)) => OracleOutcome::Satisfiable(witness(f, vocab, &c, events, &recipes)),
        None => OracleOutcome::Unsatisfiable,
    })
}
