//! Structures, the satisfaction relation, and the model utilities used to
//! check the prover: countermodel extraction, a bounded-model oracle, and
//! small-model shrinking.

mod countermodel;
mod export;
mod oracle;
mod shrink;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::DplError;
use crate::syntax::{ActionTerm, Formula};

pub use countermodel::extract_countermodel;
pub use export::{from_json, to_dot, to_json};
pub use oracle::{bounded_sat_oracle, bounded_sat_oracle_with, OracleOutcome};
pub use shrink::{reach_labeling, shrink_model, unravel, ReachLabeling};

/// A finite structure. Worlds and events are referred to by index; the
/// names are used for rendering and serialization only.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VStructure {
    pub worlds: Vec<String>,
    pub events: Vec<String>,
    /// `(from, event, to)`.
    pub transitions: BTreeSet<(usize, usize, usize)>,
    /// `(world, event)`.
    pub permitted: BTreeSet<(usize, usize)>,
    pub actions: BTreeMap<String, BTreeSet<usize>>,
    pub propositions: BTreeMap<String, BTreeSet<usize>>,
}

impl VStructure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_world(&mut self, name: impl Into<String>) -> usize {
        self.worlds.push(name.into());
        self.worlds.len() - 1
    }

    pub fn add_event(&mut self, name: impl Into<String>) -> usize {
        self.events.push(name.into());
        self.events.len() - 1
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn event_index(&self, name: &str) -> Option<usize> {
        self.events.iter().position(|e| e == name)
    }

    /// Successors of `w` with the connecting event, in index order.
    pub fn successors(&self, w: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.transitions
            .range((w, 0, 0)..=(w, usize::MAX, usize::MAX))
            .map(|&(_, e, v)| (e, v))
    }

    pub fn out_degree(&self, w: usize) -> usize {
        self.successors(w).count()
    }

    pub fn max_out_degree(&self) -> usize {
        (0..self.worlds.len()).map(|w| self.out_degree(w)).max().unwrap_or(0)
    }

    /// Actions whose interpretation contains `e`.
    pub fn actions_of_event(&self, e: usize) -> BTreeSet<&str> {
        self.actions
            .iter()
            .filter(|(_, set)| set.contains(&e))
            .map(|(a, _)| a.as_str())
            .collect()
    }
}

/// A failed structural condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyEvents,
    IndexOutOfRange(String),
    /// Two successors of one world along one event.
    NotFunctional { world: String, event: String, targets: Vec<String> },
    /// More than one event lies in this action and in no other (I.1).
    ExclusiveRegion { action: String, events: Vec<String> },
    /// Distinct events are shared by exactly the same actions (I.2).
    SharedEvents { actions: Vec<String>, events: Vec<String> },
    /// An event lies in no action (I.3).
    UncoveredEvent(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyEvents => write!(f, "the event set is empty"),
            Violation::IndexOutOfRange(what) => write!(f, "index out of range: {what}"),
            Violation::NotFunctional { world, event, targets } => write!(
                f,
                "functionality: {world} has several {event}-successors ({})",
                targets.join(", ")
            ),
            Violation::ExclusiveRegion { action, events } => write!(
                f,
                "I.1: events {} lie only in {action}",
                events.join(", ")
            ),
            Violation::SharedEvents { actions, events } => write!(
                f,
                "I.2: events {} lie exactly in {}",
                events.join(", "),
                actions.join(", ")
            ),
            Violation::UncoveredEvent(e) => write!(f, "I.3: event {e} lies in no action"),
        }
    }
}

/// Checks functionality of the transition relation and the interpretation
/// conditions. I.1 and I.2 are read together as "no two events are
/// contained in exactly the same primitive actions", so that every atom of
/// the action algebra denotes at most one event.
pub fn validate_structure(m: &VStructure) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let (nw, ne) = (m.worlds.len(), m.events.len());
    if ne == 0 {
        out.push(Violation::EmptyEvents);
    }
    for &(w, e, v) in &m.transitions {
        if w >= nw || v >= nw || e >= ne {
            out.push(Violation::IndexOutOfRange(format!("transition ({w}, {e}, {v})")));
        }
    }
    for &(w, e) in &m.permitted {
        if w >= nw || e >= ne {
            out.push(Violation::IndexOutOfRange(format!("permission ({w}, {e})")));
        }
    }
    for (a, set) in &m.actions {
        if set.iter().any(|&e| e >= ne) {
            out.push(Violation::IndexOutOfRange(format!("interpretation of {a}")));
        }
    }
    for (p, set) in &m.propositions {
        if set.iter().any(|&w| w >= nw) {
            out.push(Violation::IndexOutOfRange(format!("interpretation of {p}")));
        }
    }
    if !out.is_empty() {
        return Err(out);
    }

    let mut by_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for &(w, e, v) in &m.transitions {
        by_edge.entry((w, e)).or_default().push(v);
    }
    for ((w, e), targets) in by_edge {
        if targets.len() > 1 {
            out.push(Violation::NotFunctional {
                world: m.worlds[w].clone(),
                event: m.events[e].clone(),
                targets: targets.iter().map(|&v| m.worlds[v].clone()).collect(),
            });
        }
    }

    let mut by_profile: BTreeMap<BTreeSet<&str>, Vec<usize>> = BTreeMap::new();
    for e in 0..ne {
        by_profile.entry(m.actions_of_event(e)).or_default().push(e);
    }
    for (profile, events) in by_profile {
        let names = || events.iter().map(|&e| m.events[e].clone()).collect::<Vec<_>>();
        match profile.len() {
            0 => out.extend(names().into_iter().map(Violation::UncoveredEvent)),
            1 if events.len() > 1 => out.push(Violation::ExclusiveRegion {
                action: profile.first().expect("one action").to_string(),
                events: names(),
            }),
            _ if events.len() > 1 => out.push(Violation::SharedEvents {
                actions: profile.iter().map(|a| a.to_string()).collect(),
                events: names(),
            }),
            _ => {}
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// The event set denoted by an action term.
pub fn interpret_term(m: &VStructure, t: &ActionTerm) -> Result<BTreeSet<usize>, DplError> {
    Ok(match t {
        ActionTerm::Prim(a) => m
            .actions
            .get(a)
            .cloned()
            .ok_or_else(|| DplError::UndeclaredAction(a.clone()))?,
        ActionTerm::Meet(l, r) => &interpret_term(m, l)? & &interpret_term(m, r)?,
        ActionTerm::Join(l, r) => &interpret_term(m, l)? | &interpret_term(m, r)?,
        ActionTerm::Compl(g) => {
            let inner = interpret_term(m, g)?;
            (0..m.events.len()).filter(|e| !inner.contains(e)).collect()
        }
        ActionTerm::Empty => BTreeSet::new(),
        ActionTerm::Univ => (0..m.events.len()).collect(),
    })
}

/// `w ⊨ f`. Propositions missing from the structure are false everywhere;
/// undeclared actions are an error.
pub fn satisfies(m: &VStructure, w: usize, f: &Formula) -> Result<bool, DplError> {
    if w >= m.worlds.len() {
        return Err(DplError::Precondition(format!("world {w} does not exist")));
    }
    Ok(match f {
        Formula::Prop(p) => m.propositions.get(p).is_some_and(|ws| ws.contains(&w)),
        Formula::True => true,
        Formula::False => false,
        Formula::Not(g) => !satisfies(m, w, g)?,
        Formula::Implies(l, r) => !satisfies(m, w, l)? || satisfies(m, w, r)?,
        Formula::And(l, r) => satisfies(m, w, l)? && satisfies(m, w, r)?,
        Formula::Or(l, r) => satisfies(m, w, l)? || satisfies(m, w, r)?,
        Formula::Iff(l, r) => satisfies(m, w, l)? == satisfies(m, w, r)?,
        Formula::Box(a, g) => {
            let events = interpret_term(m, a)?;
            for (e, v) in m.successors(w) {
                if events.contains(&e) && !satisfies(m, v, g)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Diamond(a, g) => {
            let events = interpret_term(m, a)?;
            for (e, v) in m.successors(w) {
                if events.contains(&e) && satisfies(m, v, g)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::PermS(a) => interpret_term(m, a)?
            .iter()
            .all(|&e| m.permitted.contains(&(w, e))),
        Formula::PermW(a) => interpret_term(m, a)?
            .iter()
            .any(|&e| m.permitted.contains(&(w, e))),
        Formula::Eq(l, r) => interpret_term(m, l)? == interpret_term(m, r)?,
        Formula::Neq(l, r) => interpret_term(m, l)? != interpret_term(m, r)?,
    })
}
