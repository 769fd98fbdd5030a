//! Propositional formulas, their concrete syntax, and classical consequence
//! decided by exhaustive valuation.
//!
//! Valuations over `n` atoms are numbered `0..2^n`; atom `i` (in sorted name
//! order) is true in valuation `v` iff bit `i` of `v` is set. A [`ModelSet`]
//! is the bitset of valuations satisfying a formula, computed word-parallel.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use indexmap::IndexSet;

use crate::error::{CapKind, Error, Result};

/// Hard ceiling on the number of distinct atoms a decision may range over.
pub const MAX_ATOMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Top,
    Bottom,
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Parses the ASCII concrete syntax (`!`, `&`, `|`, `->`, `<->`, `true`, `false`).
    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text)?.parse_all()
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(name) => {
                out.insert(name.clone());
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Formula::Top | Formula::Bottom => {}
        }
    }

    /// Evaluates under a valuation given as a predicate on atom names.
    pub fn eval(&self, valuation: &dyn Fn(&str) -> bool) -> bool {
        match self {
            Formula::Atom(name) => valuation(name),
            Formula::Not(f) => !f.eval(valuation),
            Formula::And(a, b) => a.eval(valuation) && b.eval(valuation),
            Formula::Or(a, b) => a.eval(valuation) || b.eval(valuation),
            Formula::Implies(a, b) => !a.eval(valuation) || b.eval(valuation),
            Formula::Iff(a, b) => a.eval(valuation) == b.eval(valuation),
            Formula::Top => true,
            Formula::Bottom => false,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(_) => 5,
            Formula::Atom(_) | Formula::Top | Formula::Bottom => 6,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, child: &Formula, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

/// Canonical printer: ASCII connectives, minimal parentheses.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = self.precedence();
        match self {
            Formula::Atom(name) => f.write_str(name),
            Formula::Top => f.write_str("true"),
            Formula::Bottom => f.write_str("false"),
            Formula::Not(inner) => {
                f.write_str("!")?;
                write_operand(f, inner, inner.precedence() < prec)
            }
            // left-associative
            Formula::And(a, b) | Formula::Or(a, b) => {
                let op = if matches!(self, Formula::And(..)) { " & " } else { " | " };
                write_operand(f, a, a.precedence() < prec)?;
                f.write_str(op)?;
                write_operand(f, b, b.precedence() <= prec)
            }
            // right-associative
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                let op = if matches!(self, Formula::Implies(..)) { " -> " } else { " <-> " };
                write_operand(f, a, a.precedence() <= prec)?;
                f.write_str(op)?;
                write_operand(f, b, b.precedence() < prec)
            }
        }
    }
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Formula::parse(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    True,
    False,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("identifier `{name}`"),
            Token::Not => "`!`".into(),
            Token::And => "`&`".into(),
            Token::Or => "`|`".into(),
            Token::Implies => "`->`".into(),
            Token::Iff => "`<->`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::True => "`true`".into(),
            Token::False => "`false`".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'!' => {
                i += 1;
                Token::Not
            }
            b'&' => {
                i += 1;
                Token::And
            }
            b'|' => {
                i += 1;
                Token::Or
            }
            b'(' => {
                i += 1;
                Token::LParen
            }
            b')' => {
                i += 1;
                Token::RParen
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                Token::Implies
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 3;
                Token::Iff
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                match &text[start..i] {
                    "true" => Token::True,
                    "false" => Token::False,
                    name => Token::Ident(name.to_string()),
                }
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        tokens.push((tok, start));
    }
    tokens.push((Token::End, text.len()));
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            tokens: tokenize(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].0.clone();
        if tok != Token::End {
            self.pos += 1;
        }
        tok
    }

    fn unexpected(&self, expected: &str) -> Error {
        Error::Syntax {
            offset: self.offset(),
            message: format!("expected {expected}, found {}", self.peek().describe()),
        }
    }

    fn parse_all(mut self) -> Result<Formula> {
        let f = self.parse_iff()?;
        if *self.peek() != Token::End {
            return Err(self.unexpected("a connective or end of input"));
        }
        Ok(f)
    }

    fn parse_iff(&mut self) -> Result<Formula> {
        let mut operands = vec![self.parse_imp()?];
        while *self.peek() == Token::Iff {
            self.bump();
            operands.push(self.parse_imp()?);
        }
        let mut acc = operands.pop().expect("at least one operand");
        while let Some(left) = operands.pop() {
            acc = Formula::iff(left, acc);
        }
        Ok(acc)
    }

    fn parse_imp(&mut self) -> Result<Formula> {
        let left = self.parse_or()?;
        if *self.peek() == Token::Implies {
            self.bump();
            let right = self.parse_imp()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn parse_or(&mut self) -> Result<Formula> {
        let mut acc = self.parse_and()?;
        while *self.peek() == Token::Or {
            self.bump();
            acc = Formula::or(acc, self.parse_and()?);
        }
        Ok(acc)
    }

    fn parse_and(&mut self) -> Result<Formula> {
        let mut acc = self.parse_unary()?;
        while *self.peek() == Token::And {
            self.bump();
            acc = Formula::and(acc, self.parse_unary()?);
        }
        Ok(acc)
    }

    fn parse_unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Token::Not => {
                self.bump();
                Ok(Formula::not(self.parse_unary()?))
            }
            Token::LParen => {
                self.bump();
                let inner = self.parse_iff()?;
                if *self.peek() != Token::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            Token::True => {
                self.bump();
                Ok(Formula::Top)
            }
            Token::False => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Token::Ident(name) => {
                self.bump();
                Ok(Formula::Atom(name))
            }
            _ => Err(self.unexpected("a formula (`!`, `(`, `true`, `false` or an identifier)")),
        }
    }
}

/// Finite set of formulas; duplicates collapse, iteration keeps first-insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FormulaSet(IndexSet<Formula>);

impl FormulaSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses each item and collects them.
    pub fn parse<'a>(items: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        items.into_iter().map(Formula::parse).collect()
    }

    pub fn insert(&mut self, f: Formula) -> bool {
        self.0.insert(f)
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.0.contains(f)
    }

    pub fn position(&self, f: &Formula) -> Option<usize> {
        self.0.get_index_of(f)
    }

    pub fn get(&self, index: usize) -> Option<&Formula> {
        self.0.get_index(index)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Formula> + '_ {
        self.0.iter()
    }

    pub fn union(&self, other: &FormulaSet) -> FormulaSet {
        self.iter().chain(other.iter()).cloned().collect()
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for f in self.iter() {
            f.collect_atoms(&mut out);
        }
        out
    }
}

impl FromIterator<Formula> for FormulaSet {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Self {
        FormulaSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a FormulaSet {
    type Item = &'a Formula;
    type IntoIter = indexmap::set::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for FormulaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, formula) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{formula}")?;
        }
        f.write_str("}")
    }
}

/// Union of atom names over all formulas.
pub fn atoms(fs: &FormulaSet) -> BTreeSet<String> {
    fs.atoms()
}

/// Set of satisfying valuations over a fixed atom universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSet {
    words: Vec<u64>,
    last_mask: u64,
}

const LOW_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

impl ModelSet {
    fn shape(atom_count: usize) -> (usize, u64) {
        if atom_count >= 6 {
            (1 << (atom_count - 6), u64::MAX)
        } else {
            (1, (1u64 << (1 << atom_count)) - 1)
        }
    }

    pub fn full(atom_count: usize) -> Self {
        let (len, last_mask) = Self::shape(atom_count);
        let mut words = vec![u64::MAX; len];
        words[len - 1] &= last_mask;
        ModelSet { words, last_mask }
    }

    fn of_atom(atom_count: usize, index: usize) -> Self {
        let (len, last_mask) = Self::shape(atom_count);
        let words = (0..len)
            .map(|w| {
                let word = if index < 6 {
                    LOW_PATTERNS[index]
                } else if (w >> (index - 6)) & 1 == 1 {
                    u64::MAX
                } else {
                    0
                };
                if w == len - 1 {
                    word & last_mask
                } else {
                    word
                }
            })
            .collect();
        ModelSet { words, last_mask }
    }

    pub fn empty(atom_count: usize) -> Self {
        let (len, last_mask) = Self::shape(atom_count);
        ModelSet {
            words: vec![0; len],
            last_mask,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn is_subset(&self, other: &ModelSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &ModelSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn and_assign(&mut self, other: &ModelSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn and(&self, other: &ModelSet) -> ModelSet {
        let mut out = self.clone();
        out.and_assign(other);
        out
    }

    pub fn or(&self, other: &ModelSet) -> ModelSet {
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        out
    }

    pub fn complement(&self) -> ModelSet {
        let mut out = self.clone();
        for w in out.words.iter_mut() {
            *w = !*w;
        }
        let last = out.words.len() - 1;
        out.words[last] &= self.last_mask;
        out
    }
}

/// Valuation universe over a sorted list of atoms.
#[derive(Debug, Clone)]
pub struct TruthTable {
    atoms: Vec<String>,
    index: HashMap<String, usize>,
}

impl TruthTable {
    pub fn new(atoms: BTreeSet<String>, cap: usize) -> Result<Self> {
        let cap = cap.min(MAX_ATOMS);
        if atoms.len() > cap {
            return Err(Error::cap(CapKind::Atoms, cap, atoms.len()));
        }
        let atoms: Vec<String> = atoms.into_iter().collect();
        let index = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Ok(TruthTable { atoms, index })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn full(&self) -> ModelSet {
        ModelSet::full(self.atoms.len())
    }

    /// Models of `f`.
    ///
    /// Panics if `f` mentions an atom outside the table.
    pub fn models(&self, f: &Formula) -> ModelSet {
        let n = self.atoms.len();
        match f {
            Formula::Atom(name) => {
                let i = *self
                    .index
                    .get(name)
                    .unwrap_or_else(|| panic!("atom `{name}` not in truth table"));
                ModelSet::of_atom(n, i)
            }
            Formula::Top => ModelSet::full(n),
            Formula::Bottom => ModelSet::empty(n),
            Formula::Not(g) => self.models(g).complement(),
            Formula::And(a, b) => self.models(a).and(&self.models(b)),
            Formula::Or(a, b) => self.models(a).or(&self.models(b)),
            Formula::Implies(a, b) => self.models(a).complement().or(&self.models(b)),
            Formula::Iff(a, b) => {
                let (ma, mb) = (self.models(a), self.models(b));
                ma.and(&mb).or(&ma.complement().and(&mb.complement()))
            }
        }
    }

    pub fn models_of_set<'a>(&self, fs: impl IntoIterator<Item = &'a Formula>) -> ModelSet {
        let mut acc = self.full();
        for f in fs {
            acc.and_assign(&self.models(f));
        }
        acc
    }
}

/// True iff some valuation satisfies every formula in `fs`.
pub fn is_consistent(fs: &FormulaSet) -> Result<bool> {
    let table = TruthTable::new(fs.atoms(), MAX_ATOMS)?;
    Ok(!table.models_of_set(fs).is_empty())
}

/// Classical consequence; an inconsistent premise set entails everything.
pub fn entails(fs: &FormulaSet, goal: &Formula) -> Result<bool> {
    let mut atoms = fs.atoms();
    atoms.extend(goal.atoms());
    let table = TruthTable::new(atoms, MAX_ATOMS)?;
    Ok(table.models_of_set(fs).is_subset(&table.models(goal)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        Formula::parse(s).unwrap()
    }

    fn set(items: &[&str]) -> FormulaSet {
        FormulaSet::parse(items.iter().copied()).unwrap()
    }

    #[test]
    fn parses_grammar_examples() {
        assert_eq!(
            p("p -> !r"),
            Formula::implies(Formula::atom("p"), Formula::not(Formula::atom("r")))
        );
        assert_eq!(p("!r"), Formula::not(Formula::atom("r")));
        assert_eq!(
            p("p & q | r"),
            Formula::or(
                Formula::and(Formula::atom("p"), Formula::atom("q")),
                Formula::atom("r")
            )
        );
    }

    #[test]
    fn implication_and_iff_associate_right() {
        assert_eq!(p("a -> b -> c"), p("a -> (b -> c)"));
        assert_eq!(p("a <-> b <-> c"), p("a <-> (b <-> c)"));
        assert_ne!(p("a -> b -> c"), p("(a -> b) -> c"));
        assert_eq!(p("a | b -> c <-> d"), p("((a | b) -> c) <-> d"));
    }

    #[test]
    fn printer_uses_minimal_parentheses() {
        assert_eq!(p("(p -> q) -> r").to_string(), "(p -> q) -> r");
        assert_eq!(p("p -> (q -> r)").to_string(), "p -> q -> r");
        assert_eq!(p("p | (q | r)").to_string(), "p | (q | r)");
        assert_eq!(p("(p | q) | r").to_string(), "p | q | r");
        assert_eq!(p("!(p & q)").to_string(), "!(p & q)");
        assert_eq!(p("!!true").to_string(), "!!true");
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match Formula::parse("p & ") {
            Err(Error::Syntax { offset, message }) => {
                assert_eq!(offset, 4);
                assert!(message.contains("expected a formula"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        match Formula::parse("(p | q") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("unexpected {other:?}"),
        }
        match Formula::parse("p $ q") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Formula::parse("p q").is_err());
        assert!(Formula::parse("").is_err());
    }

    #[test]
    fn atoms_of_sets() {
        let expected: BTreeSet<String> = ["p", "q", "r"].iter().map(|s| s.to_string()).collect();
        assert_eq!(atoms(&set(&["p -> !r", "q -> r"])), expected);
        assert!(atoms(&FormulaSet::new()).is_empty());
        assert!(atoms(&set(&["true"])).is_empty());
    }

    #[test]
    fn consistency_examples() {
        assert!(!is_consistent(&set(&["p", "!p"])).unwrap());
        assert!(is_consistent(&FormulaSet::new()).unwrap());
        assert!(!is_consistent(&set(&["p -> !r", "q -> r", "!r", "q"])).unwrap());
    }

    #[test]
    fn entailment_examples() {
        assert!(entails(&set(&["p -> !r", "p"]), &p("!r")).unwrap());
        assert!(!entails(&FormulaSet::new(), &p("p")).unwrap());
        assert!(entails(&set(&["!r", "q -> r", "p"]), &p("!r")).unwrap());
        assert!(entails(&FormulaSet::new(), &Formula::Top).unwrap());
        assert!(entails(&set(&["false"]), &p("anything")).unwrap());
    }

    #[test]
    fn duplicates_collapse() {
        let fs = set(&["p", "q", "p"]);
        assert_eq!(fs.len(), 2);
        assert_eq!(fs.to_string(), "{p, q}");
    }

    #[test]
    fn atom_cap_is_enforced() {
        let names: Vec<String> = (0..21).map(|i| format!("x{i}")).collect();
        let fs = FormulaSet::parse(names.iter().map(String::as_str)).unwrap();
        assert!(matches!(
            is_consistent(&fs),
            Err(Error::CapExceeded {
                kind: CapKind::Atoms,
                limit: 20,
                actual: 21
            })
        ));
        let fs20 = FormulaSet::parse(names[..20].iter().map(String::as_str)).unwrap();
        assert!(is_consistent(&fs20).unwrap());
    }

    #[test]
    fn model_sets_over_many_atoms() {
        let names: BTreeSet<String> = (0..8).map(|i| format!("x{i}")).collect();
        let table = TruthTable::new(names, MAX_ATOMS).unwrap();
        assert_eq!(table.models(&p("x7")).count(), 128);
        assert_eq!(table.models(&p("x0 & x7")).count(), 64);
        assert_eq!(table.models(&p("x3 <-> x6")).count(), 128);
        assert_eq!(table.models(&p("!x2")).complement(), table.models(&p("x2")));
    }
}
