use std::collections::BTreeSet;

use super::normal::nnf;
use super::Formula;
use crate::error::DplError;

/// Modal nesting depth. Permissions and equations have degree 0.
pub fn degree(f: &Formula) -> usize {
    match f {
        Formula::Prop(_)
        | Formula::True
        | Formula::False
        | Formula::PermS(_)
        | Formula::PermW(_)
        | Formula::Eq(..)
        | Formula::Neq(..) => 0,
        Formula::Not(g) => degree(g),
        Formula::Implies(l, r) | Formula::And(l, r) | Formula::Or(l, r) | Formula::Iff(l, r) => {
            degree(l).max(degree(r))
        }
        Formula::Box(_, g) | Formula::Diamond(_, g) => 1 + degree(g),
    }
}

/// Every primitive action name occurring in `f`.
pub fn primitive_actions(f: &Formula) -> BTreeSet<String> {
    fn walk(f: &Formula, out: &mut BTreeSet<String>) {
        match f {
            Formula::Prop(_) | Formula::True | Formula::False => {}
            Formula::Not(g) => walk(g, out),
            Formula::Implies(l, r)
            | Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Iff(l, r) => {
                walk(l, out);
                walk(r, out);
            }
            Formula::Box(a, g) | Formula::Diamond(a, g) => {
                a.collect_actions(out);
                walk(g, out);
            }
            Formula::PermS(a) | Formula::PermW(a) => a.collect_actions(out),
            Formula::Eq(l, r) | Formula::Neq(l, r) => {
                l.collect_actions(out);
                r.collect_actions(out);
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(f, &mut out);
    out
}

/// Every proposition name occurring in `f`.
pub fn propositions(f: &Formula) -> BTreeSet<String> {
    fn walk(f: &Formula, out: &mut BTreeSet<String>) {
        match f {
            Formula::Prop(p) => {
                out.insert(p.clone());
            }
            Formula::Not(g) | Formula::Box(_, g) | Formula::Diamond(_, g) => walk(g, out),
            Formula::Implies(l, r)
            | Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Iff(l, r) => {
                walk(l, out);
                walk(r, out);
            }
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    walk(f, &mut out);
    out
}

/// `<α>φ`, `Pw(α)` and `¬P(α)`: the formulae whose truth needs a witness.
pub fn is_existential(f: &Formula) -> bool {
    match f {
        Formula::Diamond(..) | Formula::PermW(_) => true,
        Formula::Not(g) => matches!(**g, Formula::PermS(_)),
        _ => false,
    }
}

/// Number of existential nodes of `nnf(f)` at each modal depth.
pub fn existential_counts(f: &Formula) -> Vec<usize> {
    fn walk(f: &Formula, depth: usize, counts: &mut Vec<usize>) {
        if counts.len() <= depth {
            counts.resize(depth + 1, 0);
        }
        if is_existential(f) {
            counts[depth] += 1;
        }
        // In negation normal form `¬` only guards literals.
        match f {
            Formula::Implies(l, r)
            | Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Iff(l, r) => {
                walk(l, depth, counts);
                walk(r, depth, counts);
            }
            Formula::Box(_, g) | Formula::Diamond(_, g) => walk(g, depth + 1, counts),
            _ => {}
        }
    }
    let n = nnf(f);
    let mut counts = Vec::new();
    walk(&n, 0, &mut counts);
    counts
}

/// Largest number of existential subformulae found at one modal depth of
/// the syntax tree of `nnf(f)`.
pub fn existential_degree(f: &Formula) -> usize {
    existential_counts(f).into_iter().max().unwrap_or(0)
}

fn flatten_and<'f>(f: &'f Formula, out: &mut Vec<&'f Formula>) {
    match f {
        Formula::And(l, r) => {
            flatten_and(l, out);
            flatten_and(r, out);
        }
        _ => out.push(f),
    }
}

/// Splits a normal-form formula into its conjuncts, checking the shape:
/// literals, deontic literals, `<α>ψ` and `¬<α>ψ` with `ψ` again in normal form.
pub(crate) fn nf_conjuncts(f: &Formula) -> Result<Vec<&Formula>, DplError> {
    let mut parts = Vec::new();
    flatten_and(f, &mut parts);
    for part in &parts {
        let ok = match part {
            Formula::Prop(_) | Formula::True | Formula::PermS(_) | Formula::PermW(_) => true,
            Formula::Diamond(_, body) => nf_conjuncts(body).is_ok(),
            Formula::Not(g) => match &**g {
                Formula::Prop(_) | Formula::PermS(_) | Formula::PermW(_) => true,
                Formula::Diamond(_, body) => nf_conjuncts(body).is_ok(),
                _ => false,
            },
            _ => false,
        };
        if !ok {
            return Err(DplError::NotNormalForm(part.to_string()));
        }
    }
    Ok(parts)
}

fn sf_into(f: &Formula, k: usize, out: &mut Vec<Formula>) -> Result<(), DplError> {
    let parts = nf_conjuncts(f)?;
    if k == 0 {
        out.extend(parts.into_iter().cloned());
        return Ok(());
    }
    for part in parts {
        match part {
            Formula::Diamond(_, body) => sf_into(body, k - 1, out)?,
            Formula::Not(g) => {
                if let Formula::Diamond(_, body) = &**g {
                    let mut inner = Vec::new();
                    sf_into(body, k - 1, &mut inner)?;
                    out.extend(inner.iter().map(|m| nnf(&m.clone().not()).into_formula()));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// Subformulae of a normal-form formula at level `k`, with duplicates.
pub fn subformulae_at_level_list(f: &Formula, k: usize) -> Result<Vec<Formula>, DplError> {
    let mut out = Vec::new();
    sf_into(f, k, &mut out)?;
    Ok(out)
}

/// The set of subformulae that must hold at worlds `k` steps from the root
/// of a model of the normal-form formula `f`. Negated members are
/// normalized (`¬¬p` becomes `p`, `¬<α>ψ` becomes `[α]¬ψ`).
pub fn subformulae_at_level(f: &Formula, k: usize) -> Result<BTreeSet<Formula>, DplError> {
    Ok(subformulae_at_level_list(f, k)?.into_iter().collect())
}
