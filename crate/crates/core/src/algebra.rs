//! The finite boolean algebra of action terms.
//!
//! With `n` primitive actions the algebra has `2^n − 1` atoms: every
//! nonempty subset of the actions, encoded as a bit pattern. The empty
//! pattern is excluded, which builds `a1 ⊔ … ⊔ an = U` into the
//! representation. A term denotes a set of atoms, and a theory (a list of
//! equations) is summarized by the atoms it forces to be empty: `t1 = t2`
//! holds exactly when the symmetric difference of the two denotations is
//! empty.

use std::fmt;

use crate::error::DplError;
use crate::syntax::{ActionTerm, Vocabulary, MAX_ACTIONS};

/// An atom: a nonempty set of participating actions, as a bit pattern over
/// the vocabulary order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId(u32);

impl AtomId {
    pub fn new(bits: u32) -> Option<Self> {
        (bits != 0).then_some(AtomId(bits))
    }

    /// Atom from action names; `None` if empty or an action is undeclared.
    pub fn from_actions<'a>(
        vocab: &Vocabulary,
        actions: impl IntoIterator<Item = &'a str>,
    ) -> Option<Self> {
        let mut bits = 0u32;
        for a in actions {
            bits |= 1 << vocab.index_of(a)?;
        }
        AtomId::new(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn has_action(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    /// Canonical meet rendering, e.g. `a & !b`.
    pub fn render(self, vocab: &Vocabulary) -> String {
        atom_term(self, vocab).to_string()
    }
}

/// A set of atoms, stored as a bitset indexed by atom pattern.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AtomSet {
    width: usize,
    words: Vec<u64>,
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.iter().map(|a| format!("{:0w$b}", a.bits(), w = self.width)))
            .finish()
    }
}

fn word_count(width: usize) -> usize {
    (1usize << width).div_ceil(64)
}

impl AtomSet {
    pub fn empty(width: usize) -> Self {
        assert!(width <= MAX_ACTIONS, "vocabulary wider than {MAX_ACTIONS}");
        AtomSet {
            width,
            words: vec![0; word_count(width)],
        }
    }

    /// All `2^width − 1` atoms.
    pub fn universe(width: usize) -> Self {
        let mut s = AtomSet::empty(width);
        let total = 1usize << width;
        for (i, w) in s.words.iter_mut().enumerate() {
            let lo = i * 64;
            let valid = (total - lo).min(64);
            *w = if valid == 64 { u64::MAX } else { (1u64 << valid) - 1 };
        }
        s.words[0] &= !1;
        s
    }

    /// Atoms in which action `index` participates.
    pub fn with_action(width: usize, index: usize) -> Self {
        let mut s = AtomSet::universe(width);
        if index < 6 {
            let mut mask = 0u64;
            for bit in 0..64u64 {
                if bit & (1 << index) != 0 {
                    mask |= 1 << bit;
                }
            }
            s.words.iter_mut().for_each(|w| *w &= mask);
        } else {
            let shift = index - 6;
            for (i, w) in s.words.iter_mut().enumerate() {
                if (i >> shift) & 1 == 0 {
                    *w = 0;
                }
            }
        }
        s
    }

    pub fn singleton(width: usize, atom: AtomId) -> Self {
        let mut s = AtomSet::empty(width);
        s.insert(atom);
        s
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn contains(&self, atom: AtomId) -> bool {
        let b = atom.bits() as usize;
        b < (1 << self.width) && self.words[b / 64] & (1 << (b % 64)) != 0
    }

    pub fn insert(&mut self, atom: AtomId) {
        let b = atom.bits() as usize;
        assert!(b < (1 << self.width), "atom outside the vocabulary");
        self.words[b / 64] |= 1 << (b % 64);
    }

    fn zip(&self, other: &AtomSet, op: impl Fn(u64, u64) -> u64) -> AtomSet {
        assert_eq!(self.width, other.width, "atom sets of different vocabularies");
        AtomSet {
            width: self.width,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| op(*a, *b))
                .collect(),
        }
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &AtomSet) -> AtomSet {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &AtomSet) -> AtomSet {
        self.zip(other, |a, b| a & !b)
    }

    pub fn symmetric_difference(&self, other: &AtomSet) -> AtomSet {
        self.zip(other, |a, b| a ^ b)
    }

    /// Complement relative to all atoms of the vocabulary.
    pub fn complement(&self) -> AtomSet {
        AtomSet::universe(self.width).difference(self)
    }

    pub fn union_with(&mut self, other: &AtomSet) {
        assert_eq!(self.width, other.width, "atom sets of different vocabularies");
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a |= *b);
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Atoms in ascending bit-pattern order.
    pub fn iter(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                AtomId::new((i * 64 + bit) as u32)
            })
        })
    }

    /// The single member, if there is exactly one.
    pub fn single(&self) -> Option<AtomId> {
        let mut it = self.iter();
        match (it.next(), it.next()) {
            (Some(a), None) => Some(a),
            _ => None,
        }
    }

    pub fn first(&self) -> Option<AtomId> {
        self.iter().next()
    }
}

/// Denotation of a term as a set of atoms.
pub fn denote(t: &ActionTerm, vocab: &Vocabulary) -> Result<AtomSet, DplError> {
    let width = vocab.len();
    Ok(match t {
        ActionTerm::Prim(name) => {
            let i = vocab
                .index_of(name)
                .ok_or_else(|| DplError::UndeclaredAction(name.clone()))?;
            AtomSet::with_action(width, i)
        }
        ActionTerm::Meet(l, r) => denote(l, vocab)?.intersection(&denote(r, vocab)?),
        ActionTerm::Join(l, r) => denote(l, vocab)?.union(&denote(r, vocab)?),
        ActionTerm::Compl(x) => denote(x, vocab)?.complement(),
        ActionTerm::Empty => AtomSet::empty(width),
        ActionTerm::Univ => AtomSet::universe(width),
    })
}

/// A term with names replaced by vocabulary indices, evaluable one atom at
/// a time.
#[derive(Debug, Clone)]
enum Compiled {
    Prim(usize),
    Meet(Box<Compiled>, Box<Compiled>),
    Join(Box<Compiled>, Box<Compiled>),
    Compl(Box<Compiled>),
    Const(bool),
}

impl Compiled {
    fn new(t: &ActionTerm, vocab: &Vocabulary) -> Result<Self, DplError> {
        Ok(match t {
            ActionTerm::Prim(name) => Compiled::Prim(
                vocab
                    .index_of(name)
                    .ok_or_else(|| DplError::UndeclaredAction(name.clone()))?,
            ),
            ActionTerm::Meet(l, r) => Compiled::Meet(
                Box::new(Compiled::new(l, vocab)?),
                Box::new(Compiled::new(r, vocab)?),
            ),
            ActionTerm::Join(l, r) => Compiled::Join(
                Box::new(Compiled::new(l, vocab)?),
                Box::new(Compiled::new(r, vocab)?),
            ),
            ActionTerm::Compl(x) => Compiled::Compl(Box::new(Compiled::new(x, vocab)?)),
            ActionTerm::Empty => Compiled::Const(false),
            ActionTerm::Univ => Compiled::Const(true),
        })
    }

    fn holds_at(&self, atom: AtomId) -> bool {
        match self {
            Compiled::Prim(i) => atom.has_action(*i),
            Compiled::Meet(l, r) => l.holds_at(atom) && r.holds_at(atom),
            Compiled::Join(l, r) => l.holds_at(atom) || r.holds_at(atom),
            Compiled::Compl(x) => !x.holds_at(atom),
            Compiled::Const(b) => *b,
        }
    }
}

/// Whether `atom` lies below `t`, evaluated pointwise.
pub fn atom_below(t: &ActionTerm, vocab: &Vocabulary, atom: AtomId) -> Result<bool, DplError> {
    Ok(Compiled::new(t, vocab)?.holds_at(atom))
}

/// The canonical term of an atom: positive literals for its actions,
/// complemented literals for the others, in vocabulary order.
pub fn atom_term(atom: AtomId, vocab: &Vocabulary) -> ActionTerm {
    vocab
        .actions()
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let lit = ActionTerm::prim(name.clone());
            if atom.has_action(i) {
                lit
            } else {
                lit.compl()
            }
        })
        .reduce(ActionTerm::meet)
        .unwrap_or(ActionTerm::Univ)
}

/// An equational theory over a vocabulary, kept together with the set of
/// atoms its equations force to be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanTheory {
    vocab: Vocabulary,
    equations: Vec<(ActionTerm, ActionTerm)>,
    forced_empty: AtomSet,
}

impl BooleanTheory {
    pub fn new(vocab: &Vocabulary) -> Self {
        BooleanTheory {
            vocab: vocab.clone(),
            equations: Vec::new(),
            forced_empty: AtomSet::empty(vocab.len()),
        }
    }

    pub fn from_equations<I>(vocab: &Vocabulary, equations: I) -> Result<Self, DplError>
    where
        I: IntoIterator<Item = (ActionTerm, ActionTerm)>,
    {
        let mut theory = BooleanTheory::new(vocab);
        for (l, r) in equations {
            theory.push_equation(l, r)?;
        }
        Ok(theory)
    }

    fn push_equation(&mut self, t1: ActionTerm, t2: ActionTerm) -> Result<(), DplError> {
        let diff = denote(&t1, &self.vocab)?.symmetric_difference(&denote(&t2, &self.vocab)?);
        self.forced_empty.union_with(&diff);
        self.equations.push((t1, t2));
        Ok(())
    }

    /// The theory extended with `t1 = t2`.
    pub fn add_equation(&self, t1: ActionTerm, t2: ActionTerm) -> Result<Self, DplError> {
        let mut next = self.clone();
        next.push_equation(t1, t2)?;
        Ok(next)
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn equations(&self) -> &[(ActionTerm, ActionTerm)] {
        &self.equations
    }

    pub fn forced_empty(&self) -> &AtomSet {
        &self.forced_empty
    }

    /// Atoms not forced empty.
    pub fn live_atoms(&self) -> AtomSet {
        self.forced_empty.complement()
    }

    /// Denotation of `t` in the quotient algebra.
    pub fn denote(&self, t: &ActionTerm) -> Result<AtomSet, DplError> {
        Ok(denote(t, &self.vocab)?.difference(&self.forced_empty))
    }

    /// Decides `Γ ⊢ t1 = t2`.
    pub fn proves_equal(&self, t1: &ActionTerm, t2: &ActionTerm) -> Result<bool, DplError> {
        Ok(self.denote(t1)? == self.denote(t2)?)
    }

    /// The theory proves `∅ = U`: every atom is forced empty.
    pub fn is_inconsistent(&self) -> bool {
        self.live_atoms().is_empty()
    }

    /// The single live atom below `t`, when `t` is an atom of the quotient.
    pub fn atom_of(&self, t: &ActionTerm) -> Result<Option<AtomId>, DplError> {
        Ok(self.denote(t)?.single())
    }

    /// Live atoms below `t` in ascending pattern order, produced lazily.
    pub fn atoms_below(&self, t: &ActionTerm) -> Result<AtomsBelow<'_>, DplError> {
        Ok(AtomsBelow {
            term: Compiled::new(t, &self.vocab)?,
            forced_empty: &self.forced_empty,
            next: 1,
            end: 1u64 << self.vocab.len(),
        })
    }
}

/// Iterator over the live atoms below a term; see [`BooleanTheory::atoms_below`].
pub struct AtomsBelow<'t> {
    term: Compiled,
    forced_empty: &'t AtomSet,
    next: u64,
    end: u64,
}

impl Iterator for AtomsBelow<'_> {
    type Item = AtomId;

    fn next(&mut self) -> Option<AtomId> {
        while self.next < self.end {
            let atom = AtomId(self.next as u32);
            self.next += 1;
            if self.term.holds_at(atom) && !self.forced_empty.contains(atom) {
                return Some(atom);
            }
        }
        None
    }
}
