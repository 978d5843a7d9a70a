//! Set expressions, atoms, boolean constraint formulas, and signatures.
//!
//! A [`SetExpr`] denotes a subset of the Herbrand universe over a
//! [`Signature`]; an [`Atom`] is one inclusion between two expressions, and a
//! [`Formula`] is an arbitrary boolean combination of atoms. Projections are
//! compiled away by [`eliminate_projections`] before any backend sees the
//! formula, and [`PredicateIndex`] assigns the bit positions used by the
//! encodings downstream.

mod parse;
mod print;
mod project;

pub use parse::{parse_constraint_file, ParseError};
pub use print::{print_constraint_file, print_expr, print_formula};
pub use project::eliminate_projections;

use std::collections::HashMap;
use std::fmt;

/// A function symbol: a name plus a fixed arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuncSym {
    pub name: String,
    pub arity: usize,
}

impl FuncSym {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        FuncSym { name: name.into(), arity }
    }
}

impl fmt::Display for FuncSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// An ordered collection of function symbols.
///
/// Symbol order is declaration order and is significant: every enumeration
/// downstream (axiom emission, script layout, oracle search) follows it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<FuncSym>,
}

impl Signature {
    pub fn new(symbols: Vec<FuncSym>) -> Self {
        Signature { symbols }
    }

    /// Appends a symbol; replaces nothing. Names must be unique.
    pub fn push(&mut self, sym: FuncSym) {
        debug_assert!(self.lookup(&sym.name).is_none(), "duplicate symbol {}", sym.name);
        self.symbols.push(sym);
    }

    pub fn symbols(&self) -> &[FuncSym] {
        &self.symbols
    }

    pub fn lookup(&self, name: &str) -> Option<&FuncSym> {
        self.symbols.iter().find(|s| s.name == name)
    }

    /// True iff some symbol has arity 0, i.e. the Herbrand universe is
    /// nonempty.
    pub fn has_ground_term(&self) -> bool {
        self.symbols.iter().any(|s| s.arity == 0)
    }
}

/// A set expression over a signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SetExpr {
    /// A set variable.
    Var(String),
    /// The whole Herbrand universe.
    Top,
    /// The empty set.
    Bot,
    Union(Box<SetExpr>, Box<SetExpr>),
    Inter(Box<SetExpr>, Box<SetExpr>),
    /// Complement with respect to the universe.
    Neg(Box<SetExpr>),
    /// Constructor application; argument count equals the symbol arity.
    App(FuncSym, Vec<SetExpr>),
    /// The j-th projection (1-based) out of an application of the symbol.
    Proj(FuncSym, usize, Box<SetExpr>),
}

impl SetExpr {
    pub fn var(name: impl Into<String>) -> Self {
        SetExpr::Var(name.into())
    }

    pub fn union(a: SetExpr, b: SetExpr) -> Self {
        SetExpr::Union(Box::new(a), Box::new(b))
    }

    pub fn inter(a: SetExpr, b: SetExpr) -> Self {
        SetExpr::Inter(Box::new(a), Box::new(b))
    }

    pub fn neg(a: SetExpr) -> Self {
        SetExpr::Neg(Box::new(a))
    }

    pub fn app(sym: FuncSym, args: Vec<SetExpr>) -> Self {
        debug_assert_eq!(sym.arity, args.len(), "arity mismatch on {}", sym.name);
        SetExpr::App(sym, args)
    }

    pub fn proj(sym: FuncSym, index: usize, arg: SetExpr) -> Self {
        debug_assert!(index >= 1 && index <= sym.arity, "projection index out of range");
        SetExpr::Proj(sym, index, Box::new(arg))
    }

    /// An application of `sym` with every argument ⊤.
    pub fn app_top(sym: &FuncSym) -> Self {
        SetExpr::App(sym.clone(), vec![SetExpr::Top; sym.arity])
    }

    pub fn contains_proj(&self) -> bool {
        match self {
            SetExpr::Var(_) | SetExpr::Top | SetExpr::Bot => false,
            SetExpr::Union(a, b) | SetExpr::Inter(a, b) => a.contains_proj() || b.contains_proj(),
            SetExpr::Neg(a) => a.contains_proj(),
            SetExpr::App(_, args) => args.iter().any(|a| a.contains_proj()),
            SetExpr::Proj(..) => true,
        }
    }

    /// Free set variables in first-occurrence order.
    pub fn free_set_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            SetExpr::Var(v) => {
                if !out.iter().any(|x| x == v) {
                    out.push(v.clone());
                }
            }
            SetExpr::Top | SetExpr::Bot => {}
            SetExpr::Union(a, b) | SetExpr::Inter(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            SetExpr::Neg(a) => a.collect_vars(out),
            SetExpr::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
            SetExpr::Proj(_, _, a) => a.collect_vars(out),
        }
    }

    /// Replaces every occurrence of the variable `name` by `to`.
    pub fn subst_var(&self, name: &str, to: &SetExpr) -> SetExpr {
        match self {
            SetExpr::Var(v) if v == name => to.clone(),
            SetExpr::Var(_) | SetExpr::Top | SetExpr::Bot => self.clone(),
            SetExpr::Union(a, b) => {
                SetExpr::union(a.subst_var(name, to), b.subst_var(name, to))
            }
            SetExpr::Inter(a, b) => {
                SetExpr::inter(a.subst_var(name, to), b.subst_var(name, to))
            }
            SetExpr::Neg(a) => SetExpr::neg(a.subst_var(name, to)),
            SetExpr::App(f, args) => SetExpr::App(
                f.clone(),
                args.iter().map(|a| a.subst_var(name, to)).collect(),
            ),
            SetExpr::Proj(f, j, a) => {
                SetExpr::Proj(f.clone(), *j, Box::new(a.subst_var(name, to)))
            }
        }
    }
}

/// One inclusion `lhs ⊆ rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub lhs: SetExpr,
    pub rhs: SetExpr,
}

impl Atom {
    pub fn subset(lhs: SetExpr, rhs: SetExpr) -> Self {
        Atom { lhs, rhs }
    }
}

/// A boolean combination of atoms.
///
/// Negative literals E1 ⊄ E2 are `Not(Atom(..))`; implication, equivalence,
/// set equality, and the true/false constants are surface sugar only and
/// never appear as node kinds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
}

impl Formula {
    pub fn atom(lhs: SetExpr, rhs: SetExpr) -> Self {
        Formula::Atom(Atom::subset(lhs, rhs))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }

    /// `a ⇒ b`, desugared.
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::or(Formula::not(a), b)
    }

    /// `a ⇔ b`, desugared.
    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(
            Formula::or(Formula::not(a.clone()), b.clone()),
            Formula::or(Formula::not(b), a),
        )
    }

    /// `e1 = e2` as mutual inclusion.
    pub fn set_eq(e1: SetExpr, e2: SetExpr) -> Self {
        Formula::and(
            Formula::atom(e1.clone(), e2.clone()),
            Formula::atom(e2, e1),
        )
    }

    /// The ⊥ ⊆ ⊤ atom: true under every interpretation.
    pub fn truth() -> Self {
        Formula::atom(SetExpr::Bot, SetExpr::Top)
    }

    /// The ⊤ ⊆ ⊥ atom: false whenever the universe is nonempty, true over
    /// the empty universe.
    pub fn falsity() -> Self {
        Formula::atom(SetExpr::Top, SetExpr::Bot)
    }

    /// Conjunction of a list, `truth()` when empty.
    pub fn conjoin(fs: Vec<Formula>) -> Self {
        let mut it = fs.into_iter();
        match it.next() {
            None => Formula::truth(),
            Some(first) => it.fold(first, Formula::and),
        }
    }

    pub fn contains_proj(&self) -> bool {
        match self {
            Formula::Atom(a) => a.lhs.contains_proj() || a.rhs.contains_proj(),
            Formula::And(a, b) | Formula::Or(a, b) => a.contains_proj() || b.contains_proj(),
            Formula::Not(a) => a.contains_proj(),
        }
    }

    /// Free set variables in first-occurrence order.
    pub fn free_set_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Formula::Atom(a) => {
                a.lhs.collect_vars(out);
                a.rhs.collect_vars(out);
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Not(a) => a.collect_vars(out),
        }
    }

    pub fn subst_var(&self, name: &str, to: &SetExpr) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(Atom {
                lhs: a.lhs.subst_var(name, to),
                rhs: a.rhs.subst_var(name, to),
            }),
            Formula::And(a, b) => {
                Formula::and(a.subst_var(name, to), b.subst_var(name, to))
            }
            Formula::Or(a, b) => Formula::or(a.subst_var(name, to), b.subst_var(name, to)),
            Formula::Not(a) => Formula::not(a.subst_var(name, to)),
        }
    }

    /// The top-level conjuncts, left to right.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        self.collect_conjuncts(&mut out);
        out
    }

    fn collect_conjuncts<'a>(&'a self, out: &mut Vec<&'a Formula>) {
        match self {
            Formula::And(a, b) => {
                a.collect_conjuncts(out);
                b.collect_conjuncts(out);
            }
            other => out.push(other),
        }
    }

    /// Every atom in the formula, left to right, duplicates included.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Formula::Atom(a) => out.push(a),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Formula::Not(a) => a.collect_atoms(out),
        }
    }

    /// When the formula is a pure conjunction of literals, the literal list
    /// `(atom, positive)` in order; `None` as soon as any conjunct is not an
    /// atom or a negated atom.
    pub fn as_literal_conjunction(&self) -> Option<Vec<(&Atom, bool)>> {
        let mut out = Vec::new();
        for c in self.conjuncts() {
            match c {
                Formula::Atom(a) => out.push((a, true)),
                Formula::Not(inner) => match inner.as_ref() {
                    Formula::Atom(a) => out.push((a, false)),
                    _ => return None,
                },
                _ => return None,
            }
        }
        Some(out)
    }
}

/// Bit positions for the variable and application subexpressions of a
/// formula.
///
/// Each distinct Var or App node appears exactly once; position order is
/// first occurrence in a left-to-right post-order walk (arguments before the
/// application that contains them).
#[derive(Debug, Clone, Default)]
pub struct PredicateIndex {
    bases: Vec<SetExpr>,
    pos: HashMap<SetExpr, usize>,
    allow_proj: bool,
}

impl PredicateIndex {
    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn bases(&self) -> &[SetExpr] {
        &self.bases
    }

    pub fn position(&self, e: &SetExpr) -> Option<usize> {
        self.pos.get(e).copied()
    }

    /// The variable bases as `(position, name)` pairs, in position order.
    pub fn var_positions(&self) -> Vec<(usize, &str)> {
        self.bases
            .iter()
            .enumerate()
            .filter_map(|(i, e)| match e {
                SetExpr::Var(v) => Some((i, v.as_str())),
                _ => None,
            })
            .collect()
    }

    /// The application bases as `(position, symbol, args)` triples.
    pub fn app_positions(&self) -> Vec<(usize, &FuncSym, &[SetExpr])> {
        self.bases
            .iter()
            .enumerate()
            .filter_map(|(i, e)| match e {
                SetExpr::App(f, args) => Some((i, f, args.as_slice())),
                _ => None,
            })
            .collect()
    }

    fn insert(&mut self, e: &SetExpr) {
        if !self.pos.contains_key(e) {
            self.pos.insert(e.clone(), self.bases.len());
            self.bases.push(e.clone());
        }
    }

    fn visit_expr(&mut self, e: &SetExpr) {
        match e {
            SetExpr::Var(_) => self.insert(e),
            SetExpr::Top | SetExpr::Bot => {}
            SetExpr::Union(a, b) | SetExpr::Inter(a, b) => {
                self.visit_expr(a);
                self.visit_expr(b);
            }
            SetExpr::Neg(a) => self.visit_expr(a),
            SetExpr::App(_, args) => {
                for a in args {
                    self.visit_expr(a);
                }
                self.insert(e);
            }
            SetExpr::Proj(_, _, a) if self.allow_proj => self.visit_expr(a),
            SetExpr::Proj(..) => {
                unreachable!("projections must be eliminated before indexing")
            }
        }
    }

    fn visit_formula(&mut self, c: &Formula) {
        match c {
            Formula::Atom(a) => {
                self.visit_expr(&a.lhs);
                self.visit_expr(&a.rhs);
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                self.visit_formula(a);
                self.visit_formula(b);
            }
            Formula::Not(a) => self.visit_formula(a),
        }
    }
}

/// Collects the base predicates of a projection-free formula.
pub fn index_base_predicates(c: &Formula) -> PredicateIndex {
    let mut idx = PredicateIndex::default();
    idx.visit_formula(c);
    idx
}

/// Like [`index_base_predicates`], but tolerates projection nodes by
/// descending into their arguments. The projection itself is composite, not a
/// base; evaluators that use this index must interpret projections directly.
pub fn index_base_predicates_with_proj(c: &Formula) -> PredicateIndex {
    let mut idx = PredicateIndex {
        allow_proj: true,
        ..PredicateIndex::default()
    };
    idx.visit_formula(c);
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(name: &str, arity: usize) -> FuncSym {
        FuncSym::new(name, arity)
    }

    #[test]
    fn ground_term_flag() {
        let has = Signature::new(vec![sym("a", 0), sym("f", 2)]);
        let hasnt = Signature::new(vec![sym("f", 2), sym("g", 1)]);
        assert!(has.has_ground_term());
        assert!(!hasnt.has_ground_term());
        assert!(!Signature::default().has_ground_term());
    }

    #[test]
    fn index_var_and_constant() {
        // X ⊆ a()
        let a = sym("a", 0);
        let c = Formula::atom(SetExpr::var("X"), SetExpr::app(a.clone(), vec![]));
        let idx = index_base_predicates(&c);
        assert_eq!(idx.len(), 2);
        assert_eq!(idx.bases()[0], SetExpr::var("X"));
        assert_eq!(idx.bases()[1], SetExpr::app(a, vec![]));
    }

    #[test]
    fn index_dedups_and_skips_composites() {
        // (X ∩ Y) ⊆ f(X ∪ Y): bases are X, Y, f(X ∪ Y)
        let f = sym("f", 1);
        let x = SetExpr::var("X");
        let y = SetExpr::var("Y");
        let app = SetExpr::app(f, vec![SetExpr::union(x.clone(), y.clone())]);
        let c = Formula::atom(SetExpr::inter(x.clone(), y.clone()), app.clone());
        let idx = index_base_predicates(&c);
        assert_eq!(idx.bases(), &[x, y, app]);
    }

    #[test]
    fn index_constant_only_formula_is_empty() {
        let c = Formula::atom(SetExpr::Top, SetExpr::Bot);
        assert_eq!(index_base_predicates(&c).len(), 0);
    }

    #[test]
    fn free_vars_first_occurrence_order() {
        let f = sym("f", 2);
        let e = SetExpr::app(
            f,
            vec![
                SetExpr::union(SetExpr::var("B"), SetExpr::var("A")),
                SetExpr::var("B"),
            ],
        );
        assert_eq!(e.free_set_vars(), vec!["B".to_string(), "A".to_string()]);
    }

    #[test]
    fn literal_conjunction_extraction() {
        let x = SetExpr::var("X");
        let y = SetExpr::var("Y");
        let pos = Formula::atom(x.clone(), y.clone());
        let neg = Formula::not(Formula::atom(y.clone(), x.clone()));
        let c = Formula::and(pos.clone(), neg.clone());
        let lits = c.as_literal_conjunction().unwrap();
        assert_eq!(lits.len(), 2);
        assert!(lits[0].1);
        assert!(!lits[1].1);

        let skel = Formula::or(pos, neg);
        assert!(skel.as_literal_conjunction().is_none());
        let nested = Formula::not(Formula::not(Formula::atom(x, y)));
        assert!(nested.as_literal_conjunction().is_none());
    }
}
