use std::fmt;

use super::{ActionTerm, Formula};

fn action_prec(t: &ActionTerm) -> u8 {
    match t {
        ActionTerm::Join(..) => 1,
        ActionTerm::Meet(..) => 2,
        ActionTerm::Compl(_) => 3,
        _ => 4,
    }
}

fn write_action(f: &mut fmt::Formatter<'_>, t: &ActionTerm, min_prec: u8) -> fmt::Result {
    let paren = action_prec(t) < min_prec;
    if paren {
        f.write_str("(")?;
    }
    match t {
        ActionTerm::Prim(n) => f.write_str(n)?,
        ActionTerm::Empty => f.write_str("0")?,
        ActionTerm::Univ => f.write_str("U")?,
        ActionTerm::Compl(inner) => {
            f.write_str("!")?;
            write_action(f, inner, 3)?;
        }
        ActionTerm::Meet(l, r) => {
            write_action(f, l, 2)?;
            f.write_str(" & ")?;
            write_action(f, r, 3)?;
        }
        ActionTerm::Join(l, r) => {
            write_action(f, l, 1)?;
            f.write_str(" + ")?;
            write_action(f, r, 2)?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for ActionTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_action(f, self, 0)
    }
}

fn formula_prec(g: &Formula) -> u8 {
    match g {
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Not(_) | Formula::Box(..) | Formula::Diamond(..) => 5,
        _ => 6,
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, g: &Formula, min_prec: u8) -> fmt::Result {
    let paren = formula_prec(g) < min_prec;
    if paren {
        f.write_str("(")?;
    }
    match g {
        Formula::Prop(n) => f.write_str(n)?,
        Formula::True => f.write_str("true")?,
        Formula::False => f.write_str("false")?,
        Formula::Not(inner) => {
            f.write_str("~")?;
            write_formula(f, inner, 5)?;
        }
        Formula::Box(a, body) => {
            write!(f, "[{a}]")?;
            write_formula(f, body, 5)?;
        }
        Formula::Diamond(a, body) => {
            write!(f, "<{a}>")?;
            write_formula(f, body, 5)?;
        }
        Formula::PermS(a) => write!(f, "P({a})")?,
        Formula::PermW(a) => write!(f, "Pw({a})")?,
        Formula::Eq(l, r) => write!(f, "{l} = {r}")?,
        Formula::Neq(l, r) => write!(f, "{l} != {r}")?,
        Formula::And(l, r) => {
            write_formula(f, l, 4)?;
            f.write_str(" && ")?;
            write_formula(f, r, 5)?;
        }
        Formula::Or(l, r) => {
            write_formula(f, l, 3)?;
            f.write_str(" || ")?;
            write_formula(f, r, 4)?;
        }
        Formula::Implies(l, r) => {
            write_formula(f, l, 3)?;
            f.write_str(" -> ")?;
            write_formula(f, r, 2)?;
        }
        Formula::Iff(l, r) => {
            write_formula(f, l, 1)?;
            f.write_str(" <-> ")?;
            write_formula(f, r, 2)?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 0)
    }
}

/// Renders a formula in the surface syntax accepted by the parser.
pub fn pretty_print(f: &Formula) -> String {
    f.to_string()
}
