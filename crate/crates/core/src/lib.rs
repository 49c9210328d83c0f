//! A labeled tableau prover for a deontic action logic: modal action logic
//! over a finite boolean algebra of actions, with strong and weak
//! permission predicates.
//!
//! Local validity is decided over a fixed action vocabulary; global
//! validity (validity in every extension of the vocabulary) is reduced to a
//! local check over the formula's actions plus a bounded number of fresh
//! ones. Open tableaux yield explicit countermodels.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod syntax;
pub mod semantics;
pub mod tableau;
pub mod validity;

pub use error::{DplError, ParseError, ParseErrorKind};
