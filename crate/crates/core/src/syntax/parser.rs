use std::collections::BTreeSet;

use super::{ActionTerm, Formula, Vocabulary};
use crate::error::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Zero,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Lt,
    Gt,
    Iff,
    Implies,
    AndAnd,
    OrOr,
    Amp,
    Plus,
    Bang,
    BangEq,
    Equals,
    Tilde,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Ident(s) => s.clone(),
            Tok::Zero => "0".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::LBrack => "[".into(),
            Tok::RBrack => "]".into(),
            Tok::Lt => "<".into(),
            Tok::Gt => ">".into(),
            Tok::Iff => "<->".into(),
            Tok::Implies => "->".into(),
            Tok::AndAnd => "&&".into(),
            Tok::OrOr => "||".into(),
            Tok::Amp => "&".into(),
            Tok::Plus => "+".into(),
            Tok::Bang => "!".into(),
            Tok::BangEq => "!=".into(),
            Tok::Equals => "=".into(),
            Tok::Tilde => "~".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let rest = &text[i..];
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Implies, 2)
        } else if rest.starts_with("&&") {
            (Tok::AndAnd, 2)
        } else if rest.starts_with("||") {
            (Tok::OrOr, 2)
        } else if rest.starts_with("!=") {
            (Tok::BangEq, 2)
        } else {
            match c {
                b'(' => (Tok::LParen, 1),
                b')' => (Tok::RParen, 1),
                b'[' => (Tok::LBrack, 1),
                b']' => (Tok::RBrack, 1),
                b'<' => (Tok::Lt, 1),
                b'>' => (Tok::Gt, 1),
                b'&' => (Tok::Amp, 1),
                b'+' => (Tok::Plus, 1),
                b'!' => (Tok::Bang, 1),
                b'=' => (Tok::Equals, 1),
                b'~' => (Tok::Tilde, 1),
                b'0' if !bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphanumeric()) => {
                    (Tok::Zero, 1)
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let len = rest
                        .bytes()
                        .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                        .count();
                    (Tok::Ident(rest[..len].to_string()), len)
                }
                _ => {
                    let ch = rest.chars().next().unwrap_or('?');
                    return Err(ParseError::at(text, i, ParseErrorKind::UnexpectedChar(ch)));
                }
            }
        };
        out.push((tok, i));
        i += len;
    }
    Ok(out)
}

const KEYWORDS: [&str; 5] = ["U", "P", "Pw", "true", "false"];

/// How identifiers are sorted into actions and propositions.
enum Names<'v> {
    /// Both sorts must be declared in the vocabulary.
    Declared(&'v Vocabulary),
    /// Actions are the given set; every other identifier is a proposition.
    Actions(&'v BTreeSet<String>),
    /// The position of an identifier decides its sort.
    Positional,
}

struct Parser<'t, 'v> {
    text: &'t str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    names: Names<'v>,
    modal_depth: usize,
    used_actions: BTreeSet<String>,
    used_props: BTreeSet<String>,
}

type PResult<T> = Result<T, ParseError>;

impl<'t, 'v> Parser<'t, 'v> {
    fn new(text: &'t str, names: Names<'v>) -> PResult<Self> {
        Ok(Parser {
            text,
            toks: lex(text)?,
            pos: 0,
            names,
            modal_depth: 0,
            used_actions: BTreeSet::new(),
            used_props: BTreeSet::new(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks
            .get(self.pos)
            .map_or(self.text.len(), |(_, off)| *off)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError::at(self.text, self.offset(), kind)
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Some(t) => self.error(ParseErrorKind::UnexpectedToken(t.text())),
            None => self.error(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &'static str) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else if self.peek().is_none() {
            Err(self.error(ParseErrorKind::UnexpectedEnd))
        } else {
            Err(self.error(ParseErrorKind::Expected(what)))
        }
    }

    fn finish(&self) -> PResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.unexpected()),
        }
    }

    fn reserved_ok(&self, name: &str) -> bool {
        if !name.starts_with('_') {
            return true;
        }
        match &self.names {
            Names::Declared(v) => v.has_action(name),
            Names::Actions(set) => set.contains(name),
            Names::Positional => false,
        }
    }

    fn resolve_action(&mut self, name: &str) -> PResult<()> {
        if !self.reserved_ok(name) {
            return Err(self.error(ParseErrorKind::ReservedIdentifier(name.into())));
        }
        let declared = match &self.names {
            Names::Declared(v) => v.has_action(name),
            Names::Actions(set) => set.contains(name),
            Names::Positional => {
                if self.used_props.contains(name) {
                    return Err(self.error(ParseErrorKind::NameClash(name.into())));
                }
                true
            }
        };
        if !declared {
            return Err(self.error(ParseErrorKind::UndeclaredAction(name.into())));
        }
        self.used_actions.insert(name.to_string());
        Ok(())
    }

    fn resolve_prop(&mut self, name: &str) -> PResult<()> {
        if !self.reserved_ok(name) {
            return Err(self.error(ParseErrorKind::ReservedIdentifier(name.into())));
        }
        match &self.names {
            Names::Declared(v) => {
                if v.has_action(name) {
                    return Err(self.error(ParseErrorKind::NotAProposition(name.into())));
                }
                if !v.has_proposition(name) {
                    return Err(self.error(ParseErrorKind::UndeclaredProposition(name.into())));
                }
            }
            Names::Actions(set) => {
                if set.contains(name) {
                    return Err(self.error(ParseErrorKind::NotAProposition(name.into())));
                }
            }
            Names::Positional => {
                if self.used_actions.contains(name) {
                    return Err(self.error(ParseErrorKind::NameClash(name.into())));
                }
            }
        }
        self.used_props.insert(name.to_string());
        Ok(())
    }

    // action := meet ("+" meet)*
    fn action(&mut self) -> PResult<ActionTerm> {
        let mut t = self.action_meet()?;
        while self.eat(&Tok::Plus) {
            t = t.join(self.action_meet()?);
        }
        Ok(t)
    }

    fn action_meet(&mut self) -> PResult<ActionTerm> {
        let mut t = self.action_unary()?;
        while self.eat(&Tok::Amp) {
            t = t.meet(self.action_unary()?);
        }
        Ok(t)
    }

    fn action_unary(&mut self) -> PResult<ActionTerm> {
        match self.peek().cloned() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(self.action_unary()?.compl())
            }
            Some(Tok::Zero) => {
                self.pos += 1;
                Ok(ActionTerm::Empty)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.action()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Some(Tok::Ident(name)) if name == "U" => {
                self.pos += 1;
                Ok(ActionTerm::Univ)
            }
            Some(Tok::Ident(name)) if !KEYWORDS.contains(&name.as_str()) => {
                self.resolve_action(&name)?;
                self.pos += 1;
                Ok(ActionTerm::Prim(name))
            }
            Some(_) => Err(self.error(ParseErrorKind::Expected("an action term"))),
            None => Err(self.error(ParseErrorKind::UnexpectedEnd)),
        }
    }

    // formula := imp ("<->" imp)*
    fn formula(&mut self) -> PResult<Formula> {
        let mut f = self.implication()?;
        while self.eat(&Tok::Iff) {
            f = f.iff(self.implication()?);
        }
        Ok(f)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            Ok(lhs.implies(self.implication()?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut f = self.conjunction()?;
        while self.eat(&Tok::OrOr) {
            f = f.or(self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut f = self.unary()?;
        while self.eat(&Tok::AndAnd) {
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(self.unary()?.not())
            }
            Some(Tok::LBrack) => {
                self.pos += 1;
                let a = self.action()?;
                self.expect(Tok::RBrack, "`]`")?;
                let body = self.modal_body()?;
                Ok(Formula::boxed(a, body))
            }
            Some(Tok::Lt) => {
                self.pos += 1;
                let a = self.action()?;
                self.expect(Tok::Gt, "`>`")?;
                let body = self.modal_body()?;
                Ok(Formula::diamond(a, body))
            }
            _ => self.atom(),
        }
    }

    fn modal_body(&mut self) -> PResult<Formula> {
        self.modal_depth += 1;
        let body = self.unary();
        self.modal_depth -= 1;
        body
    }

    fn atom(&mut self) -> PResult<Formula> {
        // An atom that starts like an action term may be an equation.
        let start = self.pos;
        let saved = (self.used_actions.clone(), self.used_props.clone());
        let eq_offset = self.offset();
        if let Ok(lhs) = self.action() {
            let op = self.peek().cloned();
            if matches!(op, Some(Tok::Equals) | Some(Tok::BangEq)) {
                if self.modal_depth > 0 {
                    return Err(ParseError::at(
                        self.text,
                        eq_offset,
                        ParseErrorKind::EquationUnderModality,
                    ));
                }
                self.pos += 1;
                let rhs = self.action()?;
                return Ok(if op == Some(Tok::Equals) {
                    Formula::eq(lhs, rhs)
                } else {
                    Formula::neq(lhs, rhs)
                });
            }
        }
        self.pos = start;
        (self.used_actions, self.used_props) = saved;

        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "true" => {
                    self.pos += 1;
                    Ok(Formula::True)
                }
                "false" => {
                    self.pos += 1;
                    Ok(Formula::False)
                }
                "P" | "Pw" => {
                    self.pos += 1;
                    self.expect(Tok::LParen, "`(` after permission")?;
                    let a = self.action()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(if name == "P" {
                        Formula::perm(a)
                    } else {
                        Formula::weak_perm(a)
                    })
                }
                "U" => Err(self.error(ParseErrorKind::Expected("`=` or `!=` after action term"))),
                _ => {
                    self.resolve_prop(&name)?;
                    self.pos += 1;
                    Ok(Formula::Prop(name))
                }
            },
            Some(Tok::Zero) | Some(Tok::Bang) => {
                Err(self.error(ParseErrorKind::Expected("`=` or `!=` after action term")))
            }
            Some(_) => Err(self.error(ParseErrorKind::Expected("a formula"))),
            None => Err(self.error(ParseErrorKind::UnexpectedEnd)),
        }
    }
}

fn parse_with(text: &str, names: Names<'_>) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, names)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses a formula whose actions and propositions are all declared in `vocab`.
pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Formula, ParseError> {
    parse_with(text, Names::Declared(vocab))
}

/// Parses a formula with a fixed set of action names; any other identifier
/// is taken to be a proposition.
pub fn parse_formula_with_actions(
    text: &str,
    actions: &BTreeSet<String>,
) -> Result<Formula, ParseError> {
    parse_with(text, Names::Actions(actions))
}

/// Parses a formula without a declared vocabulary. Identifiers inside
/// modalities, permissions and equations are actions; all others are
/// propositions.
pub fn parse_formula_open(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, Names::Positional)
}

/// Parses a standalone action term. With `vocab` set, names must be declared.
pub fn parse_action(text: &str, vocab: Option<&Vocabulary>) -> Result<ActionTerm, ParseError> {
    let names = match vocab {
        Some(v) => Names::Declared(v),
        None => Names::Positional,
    };
    let mut p = Parser::new(text, names)?;
    let t = p.action()?;
    p.finish()?;
    Ok(t)
}
