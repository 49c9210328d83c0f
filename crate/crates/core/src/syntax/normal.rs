use std::ops::Deref;

use serde::Serialize;

use super::Formula;

/// A formula in negation normal form: `¬` occurs only in front of
/// propositions and permission predicates, and `->`/`<->` are expanded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NnfFormula(Formula);

impl NnfFormula {
    pub fn as_formula(&self) -> &Formula {
        &self.0
    }

    pub fn into_formula(self) -> Formula {
        self.0
    }
}

impl Deref for NnfFormula {
    type Target = Formula;
    fn deref(&self) -> &Formula {
        &self.0
    }
}

impl From<NnfFormula> for Formula {
    fn from(f: NnfFormula) -> Formula {
        f.0
    }
}

/// Converts a formula to negation normal form.
pub fn nnf(f: &Formula) -> NnfFormula {
    NnfFormula(pos(f))
}

fn pos(f: &Formula) -> Formula {
    match f {
        Formula::Prop(_)
        | Formula::True
        | Formula::False
        | Formula::PermS(_)
        | Formula::PermW(_)
        | Formula::Eq(..)
        | Formula::Neq(..) => f.clone(),
        Formula::Not(g) => neg(g),
        Formula::And(l, r) => pos(l).and(pos(r)),
        Formula::Or(l, r) => pos(l).or(pos(r)),
        Formula::Implies(l, r) => neg(l).or(pos(r)),
        Formula::Iff(l, r) => pos(l).and(pos(r)).or(neg(l).and(neg(r))),
        Formula::Box(a, g) => Formula::boxed(a.clone(), pos(g)),
        Formula::Diamond(a, g) => Formula::diamond(a.clone(), pos(g)),
    }
}

/// NNF of `¬f`.
fn neg(f: &Formula) -> Formula {
    match f {
        Formula::Prop(_) | Formula::PermS(_) | Formula::PermW(_) => f.clone().not(),
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Eq(l, r) => Formula::neq(l.clone(), r.clone()),
        Formula::Neq(l, r) => Formula::eq(l.clone(), r.clone()),
        Formula::Not(g) => pos(g),
        Formula::And(l, r) => neg(l).or(neg(r)),
        Formula::Or(l, r) => neg(l).and(neg(r)),
        Formula::Implies(l, r) => pos(l).and(neg(r)),
        Formula::Iff(l, r) => pos(l).and(neg(r)).or(neg(l).and(pos(r))),
        Formula::Box(a, g) => Formula::diamond(a.clone(), neg(g)),
        Formula::Diamond(a, g) => Formula::boxed(a.clone(), neg(g)),
    }
}

/// True when `f` is in negation normal form.
pub fn is_nnf(f: &Formula) -> bool {
    match f {
        Formula::Not(g) => matches!(
            **g,
            Formula::Prop(_) | Formula::PermS(_) | Formula::PermW(_)
        ),
        Formula::Implies(..) | Formula::Iff(..) => false,
        Formula::And(l, r) | Formula::Or(l, r) => is_nnf(l) && is_nnf(r),
        Formula::Box(_, g) | Formula::Diamond(_, g) => is_nnf(g),
        _ => true,
    }
}
