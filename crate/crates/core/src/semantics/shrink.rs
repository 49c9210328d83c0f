use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{interpret_term, satisfies, VStructure};
use crate::error::DplError;
use crate::syntax::{degree, subformulae_at_level, Formula};

/// For each world reachable from the start in `k ≤ degree(f)` steps, the
/// members of the level-`k` subformulae of `f` true there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachLabeling {
    pub labels: BTreeMap<usize, BTreeSet<Formula>>,
    /// Distance of each labeled world from the start.
    pub levels: BTreeMap<usize, usize>,
}

/// Worlds within `depth` steps of `w`, with their distance. Fails when a
/// world is reached twice.
fn tree_levels(m: &VStructure, w: usize, depth: usize) -> Result<BTreeMap<usize, usize>, DplError> {
    let mut levels = BTreeMap::from([(w, 0)]);
    let mut queue = VecDeque::from([(w, 0)]);
    while let Some((v, k)) = queue.pop_front() {
        if k == depth {
            continue;
        }
        for (_, u) in m.successors(v) {
            if levels.insert(u, k + 1).is_some() {
                return Err(DplError::NotTree(format!(
                    "{} is reached more than once",
                    m.worlds[u]
                )));
            }
            queue.push_back((u, k + 1));
        }
    }
    Ok(levels)
}

pub fn reach_labeling(m: &VStructure, w: usize, f: &Formula) -> Result<ReachLabeling, DplError> {
    if w >= m.worlds.len() {
        return Err(DplError::Precondition(format!("world {w} does not exist")));
    }
    let n = degree(f);
    let sf = (0..=n)
        .map(|k| subformulae_at_level(f, k))
        .collect::<Result<Vec<_>, _>>()?;
    let levels = tree_levels(m, w, n)?;
    let mut labels = BTreeMap::new();
    for (&v, &k) in &levels {
        let mut set = BTreeSet::new();
        for g in &sf[k] {
            if satisfies(m, v, g)? {
                set.insert(g.clone());
            }
        }
        labels.insert(v, set);
    }
    Ok(ReachLabeling { labels, levels })
}

/// Keeps, level by level, one witnessing transition per diamond in the
/// labeling of each kept world, in transition order. The start world
/// becomes world 0 of the result; events and action interpretations are
/// unchanged.
pub fn shrink_model(m: &VStructure, w: usize, f: &Formula) -> Result<VStructure, DplError> {
    let labeling = reach_labeling(m, w, f)?;
    if !satisfies(m, w, f)? {
        return Err(DplError::Precondition(format!(
            "{} does not satisfy {f}",
            m.worlds[w]
        )));
    }
    let n = degree(f);
    let mut kept = vec![w];
    let mut edges = BTreeSet::new();
    let mut queue = VecDeque::from([w]);
    while let Some(v) = queue.pop_front() {
        if labeling.levels[&v] == n {
            continue;
        }
        for g in &labeling.labels[&v] {
            let Formula::Diamond(a, body) = g else {
                continue;
            };
            let events = interpret_term(m, a)?;
            let mut chosen = None;
            for (e, u) in m.successors(v) {
                if events.contains(&e) && satisfies(m, u, body)? {
                    chosen = Some((e, u));
                    break;
                }
            }
            let (e, u) = chosen.ok_or_else(|| {
                DplError::Precondition(format!("no witness for {g} at {}", m.worlds[v]))
            })?;
            if edges.insert((v, e, u)) {
                kept.push(u);
                queue.push_back(u);
            }
        }
    }

    let index: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut out = VStructure {
        worlds: kept.iter().map(|&v| m.worlds[v].clone()).collect(),
        events: m.events.clone(),
        actions: m.actions.clone(),
        ..VStructure::default()
    };
    out.transitions = edges.iter().map(|&(v, e, u)| (index[&v], e, index[&u])).collect();
    out.permitted = m
        .permitted
        .iter()
        .filter_map(|&(v, e)| index.get(&v).map(|&i| (i, e)))
        .collect();
    out.propositions = m
        .propositions
        .iter()
        .map(|(p, ws)| (p.clone(), ws.iter().filter_map(|v| index.get(v).copied()).collect()))
        .collect();
    Ok(out)
}

/// The tree of paths of length at most `depth` from `w`. World `0` is the
/// copy of `w`; copies are named `name#i`.
pub fn unravel(m: &VStructure, w: usize, depth: usize) -> Result<VStructure, DplError> {
    if w >= m.worlds.len() {
        return Err(DplError::Precondition(format!("world {w} does not exist")));
    }
    let mut out = VStructure {
        events: m.events.clone(),
        actions: m.actions.clone(),
        ..VStructure::default()
    };
    for p in m.propositions.keys() {
        out.propositions.insert(p.clone(), BTreeSet::new());
    }
    let mut queue = VecDeque::new();
    let copy = |out: &mut VStructure, v: usize| {
        let i = out.add_world(format!("{}#{}", m.worlds[v], out.worlds.len()));
        for (p, ws) in &m.propositions {
            if ws.contains(&v) {
                out.propositions.get_mut(p).expect("declared").insert(i);
            }
        }
        for &(pw, e) in &m.permitted {
            if pw == v {
                out.permitted.insert((i, e));
            }
        }
        i
    };
    let root = copy(&mut out, w);
    queue.push_back((w, root, 0));
    while let Some((v, i, k)) = queue.pop_front() {
        if k == depth {
            continue;
        }
        for (e, u) in m.successors(v) {
            let j = copy(&mut out, u);
            out.transitions.insert((i, e, j));
            queue.push_back((u, j, k + 1));
        }
    }
    Ok(out)
}
