use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::VStructure;
use crate::error::DplError;

#[derive(Debug, Serialize, Deserialize)]
struct Transition {
    from: String,
    event: String,
    to: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct Permission {
    world: String,
    event: String,
}

/// The serialized form: every reference is by name.
#[derive(Debug, Serialize, Deserialize)]
struct Document {
    worlds: Vec<String>,
    events: Vec<String>,
    transitions: Vec<Transition>,
    permitted: Vec<Permission>,
    actions: BTreeMap<String, Vec<String>>,
    propositions: BTreeMap<String, Vec<String>>,
}

pub fn to_json(m: &VStructure) -> String {
    let names = |set: &BTreeSet<usize>, of: &[String]| set.iter().map(|&i| of[i].clone()).collect();
    let doc = Document {
        worlds: m.worlds.clone(),
        events: m.events.clone(),
        transitions: m
            .transitions
            .iter()
            .map(|&(w, e, v)| Transition {
                from: m.worlds[w].clone(),
                event: m.events[e].clone(),
                to: m.worlds[v].clone(),
            })
            .collect(),
        permitted: m
            .permitted
            .iter()
            .map(|&(w, e)| Permission {
                world: m.worlds[w].clone(),
                event: m.events[e].clone(),
            })
            .collect(),
        actions: m
            .actions
            .iter()
            .map(|(a, set)| (a.clone(), names(set, &m.events)))
            .collect(),
        propositions: m
            .propositions
            .iter()
            .map(|(p, set)| (p.clone(), names(set, &m.worlds)))
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("structure serializes")
}

pub fn from_json(text: &str) -> Result<VStructure, DplError> {
    let doc: Document =
        serde_json::from_str(text).map_err(|e| DplError::Document(e.to_string()))?;
    let index = |names: &[String], kind: &str| -> Result<BTreeMap<String, usize>, DplError> {
        let mut out = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            if out.insert(n.clone(), i).is_some() {
                return Err(DplError::Document(format!("duplicate {kind} `{n}`")));
            }
        }
        Ok(out)
    };
    let worlds = index(&doc.worlds, "world")?;
    let events = index(&doc.events, "event")?;
    let lookup = |map: &BTreeMap<String, usize>, name: &str, kind: &str| {
        map.get(name)
            .copied()
            .ok_or_else(|| DplError::Document(format!("unknown {kind} `{name}`")))
    };
    let mut m = VStructure {
        worlds: doc.worlds.clone(),
        events: doc.events.clone(),
        ..VStructure::default()
    };
    for t in &doc.transitions {
        m.transitions.insert((
            lookup(&worlds, &t.from, "world")?,
            lookup(&events, &t.event, "event")?,
            lookup(&worlds, &t.to, "world")?,
        ));
    }
    for p in &doc.permitted {
        m.permitted.insert((
            lookup(&worlds, &p.world, "world")?,
            lookup(&events, &p.event, "event")?,
        ));
    }
    for (a, names) in &doc.actions {
        let set = names
            .iter()
            .map(|n| lookup(&events, n, "event"))
            .collect::<Result<_, _>>()?;
        m.actions.insert(a.clone(), set);
    }
    for (p, names) in &doc.propositions {
        let set = names
            .iter()
            .map(|n| lookup(&worlds, n, "world"))
            .collect::<Result<_, _>>()?;
        m.propositions.insert(p.clone(), set);
    }
    Ok(m)
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz rendering. Node `w<i>` carries the world name, the
/// propositions true there (`props`) and the permitted events
/// (`permitted`, separated by `; `); edges are labeled with event names.
pub fn to_dot(m: &VStructure) -> String {
    let mut out = String::from("digraph model {\n  node [shape=box];\n");
    for (w, name) in m.worlds.iter().enumerate() {
        let props: Vec<&str> = m
            .propositions
            .iter()
            .filter(|(_, ws)| ws.contains(&w))
            .map(|(p, _)| p.as_str())
            .collect();
        let permitted: Vec<&str> = m
            .permitted
            .iter()
            .filter(|&&(pw, _)| pw == w)
            .map(|&(_, e)| m.events[e].as_str())
            .collect();
        let mut label = name.clone();
        if !props.is_empty() {
            let _ = write!(label, "\n{}", props.join(", "));
        }
        if !permitted.is_empty() {
            let _ = write!(label, "\nP: {}", permitted.join("; "));
        }
        let _ = writeln!(
            out,
            "  w{w} [label={}, world={}, props={}, permitted={}];",
            quote(&label),
            quote(name),
            quote(&props.join(", ")),
            quote(&permitted.join("; "))
        );
    }
    for &(w, e, v) in &m.transitions {
        let _ = writeln!(out, "  w{w} -> w{v} [label={}];", quote(&m.events[e]));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> VStructure {
        let mut m = VStructure::new();
        let w = m.add_world("<>");
        let v = m.add_world("<a & b>");
        let e = m.add_event("a & b");
        m.actions.insert("a".into(), [e].into());
        m.actions.insert("b".into(), [e].into());
        m.transitions.insert((w, e, v));
        m.permitted.insert((w, e));
        m.propositions.insert("p".into(), [v].into());
        m.propositions.insert("q".into(), BTreeSet::new());
        m
    }

    #[test]
    fn json_round_trip() {
        let m = model();
        assert_eq!(from_json(&to_json(&m)).unwrap(), m);
    }

    #[test]
    fn json_rejects_unknown_names() {
        let text = to_json(&model()).replace("\"to\": \"<a & b>\"", "\"to\": \"nowhere\"");
        assert!(matches!(from_json(&text), Err(DplError::Document(_))));
        assert!(from_json("{").is_err());
    }

    #[test]
    fn dot_shape() {
        let dot = to_dot(&model());
        assert!(dot.starts_with("digraph model {"));
        assert!(dot.contains("w0 -> w1 [label=\"a & b\"];"));
        assert!(dot.contains("permitted=\"a & b\""));
        assert!(dot.contains("label=\"<a & b>\\np\""));
    }
}
