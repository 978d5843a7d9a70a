//! A small functional language with datatypes and pattern matching, plus the
//! match analysis that compiles each definition into a set-constraint
//! satisfiability question.
//!
//! Programs are a sequence of datatype declarations followed by top-level
//! definitions. Definitions desugar into nested `let`s, so the analysis only
//! ever sees a single term. Each `let` gets its own verdict: the constraint
//! gathered from its right-hand side is checked for satisfiability, and an
//! unsatisfiable constraint means some match arm can receive a value none of
//! its patterns cover.

mod analyze;
mod parse;
mod types;

pub use analyze::{
    analyze_program, bind_pattern, data_signature, equate, is_exhaustive, not_yet_covered,
    pattern_set, AnalyzeConfig, AnalysisReport, DefReport, DefVerdict,
};
pub use parse::{parse_program, LangError, Program};
pub use types::{typecheck, Typing};

use crate::constraints::{Formula, SetExpr};
use std::fmt;

/// Source position of a syntax node (1-based line and column).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Expression node. `id` indexes the per-node type table built by `typecheck`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub id: usize,
    pub span: Span,
    pub kind: TermKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermKind {
    Var(String),
    Lam(String, Box<Term>),
    App(Box<Term>, Box<Term>),
    /// Saturated constructor application: constructor name, owning datatype,
    /// arguments (arity checked at parse time).
    Ctor(String, String, Vec<Term>),
    Match(Box<Term>, Vec<(Pattern, Term)>),
    Let(String, Box<Term>, Box<Term>),
    /// Numeric literal; the flag is true for floating literals (`Double`).
    Lit(String, bool),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub span: Span,
    pub kind: PatKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatKind {
    Var(String),
    /// Constructor pattern: constructor name, owning datatype, sub-patterns.
    Ctor(String, String, Vec<Pattern>),
}

impl Pattern {
    pub fn is_var(&self) -> bool {
        matches!(self.kind, PatKind::Var(_))
    }
}

/// Underlying (annotation-free) type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UType {
    /// Inference variable or generalized type variable.
    TVar(String),
    /// Declared datatype or one of the builtin opaque types `Int`, `Double`.
    Data(String),
    Arrow(Box<UType>, Box<UType>),
}

impl UType {
    pub fn arrow(dom: UType, cod: UType) -> UType {
        UType::Arrow(Box::new(dom), Box::new(cod))
    }
}

impl fmt::Display for UType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UType::TVar(v) => write!(f, "{v}"),
            UType::Data(d) => write!(f, "{d}"),
            UType::Arrow(a, b) => {
                if matches!(**a, UType::Arrow(_, _)) {
                    write!(f, "({a}) -> {b}")
                } else {
                    write!(f, "{a} -> {b}")
                }
            }
        }
    }
}

/// Underlying type scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UScheme {
    pub vars: Vec<String>,
    pub body: UType,
}

/// Datatype environment: declarations in source order, plus the builtin
/// opaque types `Int` and `Double` (no constructors, matched only by
/// variable patterns).
#[derive(Debug, Clone, Default)]
pub struct DataEnv {
    decls: Vec<(String, Vec<(String, Vec<UType>)>)>,
}

impl DataEnv {
    pub fn new() -> DataEnv {
        DataEnv::default()
    }

    pub fn push(&mut self, name: String, ctors: Vec<(String, Vec<UType>)>) {
        self.decls.push((name, ctors));
    }

    pub fn has_type(&self, name: &str) -> bool {
        name == "Int" || name == "Double" || self.decls.iter().any(|(d, _)| d == name)
    }

    /// Constructors of a datatype, declaration order. Empty for the builtins.
    pub fn ctors_of(&self, name: &str) -> &[(String, Vec<UType>)] {
        self.decls
            .iter()
            .find(|(d, _)| d == name)
            .map(|(_, cs)| cs.as_slice())
            .unwrap_or(&[])
    }

    /// Look a constructor up by name: owning datatype and argument types.
    pub fn ctor(&self, name: &str) -> Option<(&str, &[UType])> {
        for (d, cs) in &self.decls {
            for (k, args) in cs {
                if k == name {
                    return Some((d.as_str(), args.as_slice()));
                }
            }
        }
        None
    }

    /// All constructors in declaration order, as (datatype, name, args).
    pub fn all_ctors(&self) -> impl Iterator<Item = (&str, &str, &[UType])> {
        self.decls.iter().flat_map(|(d, cs)| {
            cs.iter()
                .map(move |(k, args)| (d.as_str(), k.as_str(), args.as_slice()))
        })
    }

    pub fn decls(&self) -> &[(String, Vec<(String, Vec<UType>)>)] {
        &self.decls
    }
}

/// Type annotated with set expressions: one annotation per type node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnnType {
    TVar(String, SetExpr),
    Data(String, SetExpr),
    Arrow(Box<AnnType>, Box<AnnType>, SetExpr),
}

impl AnnType {
    /// The top-level annotation.
    pub fn ann(&self) -> &SetExpr {
        match self {
            AnnType::TVar(_, e) | AnnType::Data(_, e) | AnnType::Arrow(_, _, e) => e,
        }
    }

    /// Same type with the top-level annotation replaced.
    pub fn with_ann(&self, e: SetExpr) -> AnnType {
        match self {
            AnnType::TVar(v, _) => AnnType::TVar(v.clone(), e),
            AnnType::Data(d, _) => AnnType::Data(d.clone(), e),
            AnnType::Arrow(a, b, _) => AnnType::Arrow(a.clone(), b.clone(), e),
        }
    }

    /// Forget the annotations.
    pub fn erase(&self) -> UType {
        match self {
            AnnType::TVar(v, _) => UType::TVar(v.clone()),
            AnnType::Data(d, _) => UType::Data(d.clone()),
            AnnType::Arrow(a, b, _) => UType::arrow(a.erase(), b.erase()),
        }
    }
}

impl fmt::Display for AnnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::constraints::print_expr;
        match self {
            AnnType::TVar(v, e) => write!(f, "{v}^{}", print_expr(e)),
            AnnType::Data(d, e) => write!(f, "{d}^{}", print_expr(e)),
            AnnType::Arrow(a, b, e) => write!(f, "({a} -> {b})^{}", print_expr(e)),
        }
    }
}

/// Annotated type scheme: generalized type variables, generalized set
/// variables, a constraint instantiated at every use, and the body type.
/// `safety_spans` records the source locations of the match safety
/// constraints embedded (transitively) in `constraint`; instantiating a
/// scheme with a nonempty list makes the enclosing definition's check
/// non-elidable.
#[derive(Debug, Clone)]
pub struct AnnScheme {
    pub type_vars: Vec<String>,
    pub set_vars: Vec<String>,
    pub constraint: Formula,
    pub body: AnnType,
    pub safety_spans: Vec<Span>,
}

impl AnnScheme {
    /// Scheme with nothing generalized and nothing to prove.
    pub fn monomorphic(body: AnnType) -> AnnScheme {
        AnnScheme {
            type_vars: Vec::new(),
            set_vars: Vec::new(),
            constraint: Formula::truth(),
            body,
            safety_spans: Vec::new(),
        }
    }
}

/// Analysis-time binding environment, innermost binding last.
#[derive(Debug, Clone, Default)]
pub struct TypeEnv {
    binds: Vec<(String, AnnScheme)>,
}

impl TypeEnv {
    pub fn new() -> TypeEnv {
        TypeEnv::default()
    }

    pub fn lookup(&self, name: &str) -> Option<&AnnScheme> {
        self.binds.iter().rev().find(|(x, _)| x == name).map(|(_, s)| s)
    }

    pub fn push(&mut self, name: String, scheme: AnnScheme) {
        self.binds.push((name, scheme));
    }

    pub fn len(&self) -> usize {
        self.binds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.binds.is_empty()
    }

    /// Drop bindings back to a previous depth (scope exit).
    pub fn truncate(&mut self, depth: usize) {
        self.binds.truncate(depth);
    }

    pub fn schemes(&self) -> impl Iterator<Item = &AnnScheme> {
        self.binds.iter().map(|(_, s)| s)
    }
}
