//! Terms and identities over a single implicit binary operation.
//!
//! The formula grammar: juxtaposition is a product and binds tighter than
//! `*`; juxtaposition and `*` are both left-associative; parentheses group.
//! So `xx*yz` parses as `(xx)(yz)` and `x(xy*z)` as `x((xy)z)`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Letters used by [`Identity::normalize_variables`], in assignment order.
const NORMAL_LETTERS: &[u8] = b"xyzuvwabcdefghijklmnopqrst";

/// A binary tree over named variables; one side of an identity.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    /// A variable leaf, named by a single lowercase letter.
    Var(char),
    /// The product of two subterms under the implicit operation.
    Prod(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: char) -> Self {
        Term::Var(name)
    }

    pub fn prod(left: Term, right: Term) -> Self {
        Term::Prod(Box::new(left), Box::new(right))
    }

    fn is_prod(&self) -> bool {
        matches!(self, Term::Prod(..))
    }

    /// Distinct variables in order of first occurrence, left to right.
    pub fn free_variables(&self) -> Vec<char> {
        let mut out = Vec::new();
        self.push_vars(&mut out);
        out
    }

    fn push_vars(&self, out: &mut Vec<char>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Term::Prod(l, r) => {
                l.push_vars(out);
                r.push_vars(out);
            }
        }
    }

    /// Occurrence count per variable.
    pub fn occurrences(&self) -> BTreeMap<char, usize> {
        let mut counts = BTreeMap::new();
        self.count_into(&mut counts);
        counts
    }

    fn count_into(&self, counts: &mut BTreeMap<char, usize>) {
        match self {
            Term::Var(v) => *counts.entry(*v).or_insert(0) += 1,
            Term::Prod(l, r) => {
                l.count_into(counts);
                r.count_into(counts);
            }
        }
    }

    /// Recursively swaps the operands of every product.
    pub fn mirror(&self) -> Term {
        match self {
            Term::Var(v) => Term::Var(*v),
            Term::Prod(l, r) => Term::prod(r.mirror(), l.mirror()),
        }
    }

    fn rename(&self, map: &BTreeMap<char, char>) -> Term {
        match self {
            Term::Var(v) => Term::Var(map[v]),
            Term::Prod(l, r) => Term::prod(l.rename(map), r.rename(map)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_plain(self))
    }
}

/// A named pair of terms over the same variable set.
///
/// Equality and hashing compare the two terms only; the name and
/// abbreviation are display labels.
#[derive(Clone, Debug)]
pub struct Identity {
    name: Option<String>,
    abbrev: Option<String>,
    lhs: Term,
    rhs: Term,
}

impl PartialEq for Identity {
    fn eq(&self, other: &Self) -> bool {
        self.lhs == other.lhs && self.rhs == other.rhs
    }
}

impl Eq for Identity {}

impl std::hash::Hash for Identity {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.lhs.hash(state);
        self.rhs.hash(state);
    }
}

impl Identity {
    /// Builds an identity, rejecting sides with different variable sets.
    pub fn new(lhs: Term, rhs: Term) -> Result<Self, ParseError> {
        let mut lv = lhs.free_variables();
        let mut rv = rhs.free_variables();
        lv.sort_unstable();
        rv.sort_unstable();
        if lv != rv {
            return Err(ParseError::VariableMismatch { lhs: lv, rhs: rv });
        }
        Ok(Identity {
            name: None,
            abbrev: None,
            lhs,
            rhs,
        })
    }

    pub fn with_labels(
        mut self,
        name: impl Into<String>,
        abbrev: impl Into<String>,
    ) -> Self {
        self.name = Some(name.into());
        self.abbrev = Some(abbrev.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn abbrev(&self) -> Option<&str> {
        self.abbrev.as_deref()
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    /// Distinct variables in order of first occurrence in the left side.
    pub fn free_variables(&self) -> Vec<char> {
        self.lhs.free_variables()
    }

    /// The dual identity: every product reversed on both sides.
    /// An involution; labels are kept.
    pub fn mirror(&self) -> Identity {
        Identity {
            name: self.name.clone(),
            abbrev: self.abbrev.clone(),
            lhs: self.lhs.mirror(),
            rhs: self.rhs.mirror(),
        }
    }

    /// Renames variables so first-occurrence order in the left side
    /// becomes x, y, z, ... Two identities are equal up to renaming iff
    /// their normalizations are equal.
    pub fn normalize_variables(&self) -> Identity {
        let vars = self.lhs.free_variables();
        let map: BTreeMap<char, char> = vars
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, NORMAL_LETTERS[i] as char))
            .collect();
        Identity {
            name: self.name.clone(),
            abbrev: self.abbrev.clone(),
            lhs: self.lhs.rename(&map),
            rhs: self.rhs.rename(&map),
        }
    }

    /// True iff the identity involves exactly three variables, one of
    /// which occurs exactly twice on each side while the other two occur
    /// exactly once on each side.
    pub fn is_bol_moufang_type(&self) -> bool {
        let lc = self.lhs.occurrences();
        let rc = self.rhs.occurrences();
        if lc.len() != 3 || rc.len() != 3 {
            return false;
        }
        let mut doubled = 0;
        for (v, &n) in &lc {
            let m = rc.get(v).copied().unwrap_or(0);
            match (n, m) {
                (1, 1) => {}
                (2, 2) => doubled += 1,
                _ => return false,
            }
        }
        doubled == 1
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", fmt_side(&self.lhs), fmt_side(&self.rhs))
    }
}

/// Renders an identity as a formula that reparses to it.
pub fn format_identity(id: &Identity) -> String {
    id.to_string()
}

// A side prints as a juxtaposition chain with parenthesized product
// operands, except that a top-level product of two products prints with
// `*` instead of the outer parentheses ("xx*yz" rather than "(xx)(yz)").
fn fmt_side(t: &Term) -> String {
    match t {
        Term::Prod(l, r) if l.is_prod() && r.is_prod() => {
            format!("{}*{}", fmt_plain(l), fmt_plain(r))
        }
        _ => fmt_plain(t),
    }
}

fn fmt_plain(t: &Term) -> String {
    match t {
        Term::Var(v) => v.to_string(),
        Term::Prod(l, r) => format!("{}{}", fmt_atom(l), fmt_atom(r)),
    }
}

fn fmt_atom(t: &Term) -> String {
    match t {
        Term::Var(v) => v.to_string(),
        Term::Prod(..) => format!("({})", fmt_plain(t)),
    }
}

/// Formula parsing failures.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("expected exactly one `=`, found {0}")]
    EqualsCount(usize),
    #[error("empty side of identity")]
    EmptySide,
    #[error("unbalanced parentheses")]
    UnbalancedParens,
    #[error("illegal character `{0}`")]
    IllegalChar(char),
    #[error("unexpected `{0}`")]
    Unexpected(char),
    #[error("sides use different variables: {lhs:?} vs {rhs:?}")]
    VariableMismatch { lhs: Vec<char>, rhs: Vec<char> },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Token {
    Var(char),
    Star,
    Open,
    Close,
}

// `\ast`, `·`, `∗`, and `⋅` are accepted as synonyms of `*`.
fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            c if c.is_whitespace() => {}
            '*' | '\u{b7}' | '\u{2217}' | '\u{22c5}' => tokens.push(Token::Star),
            '(' => tokens.push(Token::Open),
            ')' => tokens.push(Token::Close),
            '\\' => {
                for expected in ['a', 's', 't'] {
                    if chars.next() != Some(expected) {
                        return Err(ParseError::IllegalChar('\\'));
                    }
                }
                tokens.push(Token::Star);
            }
            c if c.is_ascii_lowercase() => tokens.push(Token::Var(c)),
            c => return Err(ParseError::IllegalChar(c)),
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    // term := factor ('*' factor)*
    fn term(&mut self) -> Result<Term, ParseError> {
        let mut left = self.factor()?;
        while self.peek() == Some(Token::Star) {
            self.bump();
            let right = self.factor()?;
            left = Term::prod(left, right);
        }
        Ok(left)
    }

    // factor := primary+
    fn factor(&mut self) -> Result<Term, ParseError> {
        let mut left = self.primary()?;
        while matches!(self.peek(), Some(Token::Var(_)) | Some(Token::Open)) {
            let right = self.primary()?;
            left = Term::prod(left, right);
        }
        Ok(left)
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        match self.bump() {
            Some(Token::Var(v)) => Ok(Term::Var(v)),
            Some(Token::Open) => {
                let inner = self.term()?;
                match self.bump() {
                    Some(Token::Close) => Ok(inner),
                    _ => Err(ParseError::UnbalancedParens),
                }
            }
            Some(Token::Star) => Err(ParseError::Unexpected('*')),
            Some(Token::Close) => Err(ParseError::UnbalancedParens),
            None => Err(ParseError::EmptySide),
        }
    }
}

/// Parses one side of an identity.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
    };
    let term = parser.term()?;
    match parser.peek() {
        None => Ok(term),
        Some(Token::Close) => Err(ParseError::UnbalancedParens),
        Some(_) => Err(ParseError::Unexpected('?')),
    }
}

/// Parses a full `lhs = rhs` formula.
pub fn parse_identity(text: &str) -> Result<Identity, ParseError> {
    let sides: Vec<&str> = text.split('=').collect();
    if sides.len() != 2 {
        return Err(ParseError::EqualsCount(sides.len() - 1));
    }
    Identity::new(parse_term(sides[0])?, parse_term(sides[1])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: char) -> Term {
        Term::var(c)
    }

    fn p(l: Term, r: Term) -> Term {
        Term::prod(l, r)
    }

    #[test]
    fn parses_associativity() {
        let id = parse_identity("x(yz) = (xy)z").unwrap();
        assert_eq!(*id.lhs(), p(v('x'), p(v('y'), v('z'))));
        assert_eq!(*id.rhs(), p(p(v('x'), v('y')), v('z')));
    }

    #[test]
    fn parses_reflexive() {
        let id = parse_identity("x=x").unwrap();
        assert_eq!(*id.lhs(), v('x'));
        assert_eq!(*id.rhs(), v('x'));
    }

    #[test]
    fn star_binds_looser_than_juxtaposition() {
        let id = parse_identity("xx*yz=xy*xz").unwrap();
        assert_eq!(*id.lhs(), p(p(v('x'), v('x')), p(v('y'), v('z'))));
        assert_eq!(*id.rhs(), p(p(v('x'), v('y')), p(v('x'), v('z'))));
        // juxtaposition groups before `*` inside parentheses too
        let cote = parse_identity("x(xy*z) = (z*xx)y").unwrap();
        assert_eq!(*cote.lhs(), p(v('x'), p(p(v('x'), v('y')), v('z'))));
        assert_eq!(*cote.rhs(), p(p(v('z'), p(v('x'), v('x'))), v('y')));
    }

    #[test]
    fn star_synonyms() {
        let plain = parse_identity("xx*yz = xy*xz").unwrap();
        for alt in [
            "xx\\ast yz = xy\\ast xz",
            "xx\u{b7}yz = xy\u{b7}xz",
            "xx\u{2217}yz = xy\u{2217}xz",
        ] {
            assert_eq!(parse_identity(alt).unwrap(), plain);
        }
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse_identity("x(yz = (xy)z").unwrap_err(),
            ParseError::UnbalancedParens
        );
        assert_eq!(
            parse_identity("x(yz)) = (xy)z").unwrap_err(),
            ParseError::UnbalancedParens
        );
        assert_eq!(parse_identity(" = x").unwrap_err(), ParseError::EmptySide);
        assert_eq!(parse_identity("x").unwrap_err(), ParseError::EqualsCount(0));
        assert_eq!(
            parse_identity("x = x = x").unwrap_err(),
            ParseError::EqualsCount(2)
        );
        assert_eq!(
            parse_identity("xY = Yx").unwrap_err(),
            ParseError::IllegalChar('Y')
        );
        assert_eq!(
            parse_identity("x* = x").unwrap_err(),
            ParseError::EmptySide
        );
        assert!(matches!(
            parse_identity("xy = yz").unwrap_err(),
            ParseError::VariableMismatch { .. }
        ));
    }

    #[test]
    fn formats_with_minimal_grouping() {
        let assoc = parse_identity("x(yz) = (xy)z").unwrap();
        assert_eq!(format_identity(&assoc), "x(yz) = (xy)z");
        let lsm = parse_identity("xx*yz=xy*xz").unwrap();
        assert_eq!(format_identity(&lsm), "xx*yz = xy*xz");
        let extra = parse_identity("x(y(zx)) = ((xy)z)x").unwrap();
        assert_eq!(format_identity(&extra), "x(y(zx)) = ((xy)z)x");
    }

    #[test]
    fn free_variables_first_occurrence() {
        assert_eq!(
            parse_term("x(y(zx))").unwrap().free_variables(),
            vec!['x', 'y', 'z']
        );
        assert_eq!(parse_term("x").unwrap().free_variables(), vec!['x']);
        assert_eq!(
            parse_term("(zx)(yx)").unwrap().free_variables(),
            vec!['z', 'x', 'y']
        );
    }

    #[test]
    fn bol_moufang_classifier() {
        assert!(parse_identity("x(y(zx)) = ((xy)z)x")
            .unwrap()
            .is_bol_moufang_type());
        assert!(!parse_identity("x(yz) = (xy)z")
            .unwrap()
            .is_bol_moufang_type());
        assert!(!parse_identity("x=x").unwrap().is_bol_moufang_type());
        // the doubled variable must be the same on both sides
        assert!(!parse_identity("xx(yz) = xy(zz)")
            .unwrap()
            .is_bol_moufang_type());
        // variable order may differ between sides
        assert!(parse_identity("xx*yz = xy*zx")
            .unwrap()
            .is_bol_moufang_type());
    }

    #[test]
    fn mirror_examples() {
        let lsm = parse_identity("xx*yz = xy*xz").unwrap();
        let mirrored = lsm.mirror();
        assert_eq!(mirrored, parse_identity("(zy)(xx) = (zx)(yx)").unwrap());
        assert_eq!(mirrored.mirror(), lsm);
        let leaf = parse_identity("x = x").unwrap();
        assert_eq!(leaf.mirror(), leaf);
    }

    #[test]
    fn normalization() {
        let dual = parse_identity("(zy)(xx) = (zx)(yx)").unwrap();
        let rsm = parse_identity("xy*zz = xz*yz").unwrap();
        assert_eq!(dual.normalize_variables(), rsm);
        let assoc = parse_identity("x(yz) = (xy)z").unwrap();
        assert_eq!(assoc.normalize_variables(), assoc);
    }

    #[test]
    fn labels_do_not_affect_equality() {
        let a = parse_identity("x(yz) = (xy)z").unwrap();
        let b = a.clone().with_labels("Semigroups", "SGR");
        assert_eq!(a, b);
        assert_eq!(b.name(), Some("Semigroups"));
        assert_eq!(b.abbrev(), Some("SGR"));
    }
}
