//! Finite-model SMT encoding of projection-free constraint formulas.
//!
//! The domain is the set of N-bit vectors, one bit per base predicate
//! (variable or constructor-application subexpression). Membership of an
//! element in the denotation of a composite expression is a boolean
//! combination of its bits ([`compile_predicate`]); constructor functions
//! are encoded as one unknown bit-function per symbol and variable, with
//! application bits determined structurally. Scripts are emitted as SMT-LIB
//! 2 over fixed-width bit vectors with uninterpreted functions and
//! quantifiers.

mod backend;
mod encode;
pub mod eval;
mod solve;

pub use backend::{run_backend, run_backend_text, BackendConfig};
pub use encode::{encode_conjunction, encode_formula, EncodeError, EncodeOptions};
pub use solve::{prepare_formula, solve, solve_traced, Backend, SolveTrace, SolverConfig};

use crate::constraints::{PredicateIndex, SetExpr};
use std::fmt;

/// Outcome of a satisfiability query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Satisfiable; carries raw solver/model output when available.
    Sat(String),
    Unsat,
    /// Neither verdict; the reason distinguishes "gave up" modes.
    Unknown(UnknownReason),
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, Verdict::Unsat)
    }

    pub fn is_definite(&self) -> bool {
        !matches!(self, Verdict::Unknown(_))
    }

    /// "sat" / "unsat" / "unknown".
    pub fn word(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Unknown(r) => write!(f, "unknown ({r})"),
            other => f.write_str(other.word()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnknownReason {
    Timeout,
    SolverSaidUnknown,
    BackendError(String),
    /// Oracle budget exhausted (model bound or check count).
    Budget(String),
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::Timeout => f.write_str("timeout"),
            UnknownReason::SolverSaidUnknown => f.write_str("solver reported unknown"),
            UnknownReason::BackendError(e) => write!(f, "backend error: {e}"),
            UnknownReason::Budget(e) => write!(f, "budget: {e}"),
        }
    }
}

/// A term denoting an N-bit sequence inside a script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeqTerm {
    /// A declared constant or bound variable, by name.
    Name(String),
    /// An assembler application.
    Call(String, Vec<SeqTerm>),
}

impl SeqTerm {
    pub fn name(n: impl Into<String>) -> Self {
        SeqTerm::Name(n.into())
    }
}

/// A boolean term inside a script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolTerm {
    Lit(bool),
    /// Bit `position` of a sequence, read as `(= ((_ extract j j) b) #b1)`.
    BitOf(SeqTerm, usize),
    /// A declared boolean constant, by name.
    Ref(String),
    /// Application of a declared boolean function (inDomain or an unknown
    /// symbol-variable bit function).
    UFApp(String, Vec<SeqTerm>),
    /// Equality of two sequences.
    SeqEq(SeqTerm, SeqTerm),
    Not(Box<BoolTerm>),
    And(Vec<BoolTerm>),
    Or(Vec<BoolTerm>),
    Implies(Box<BoolTerm>, Box<BoolTerm>),
    Iff(Box<BoolTerm>, Box<BoolTerm>),
    /// Quantifier over N-bit sequences; binders are (name, width).
    Forall(Vec<(String, usize)>, Box<BoolTerm>),
    Exists(Vec<(String, usize)>, Box<BoolTerm>),
}

impl BoolTerm {
    pub fn not(t: BoolTerm) -> Self {
        BoolTerm::Not(Box::new(t))
    }

    pub fn implies(a: BoolTerm, b: BoolTerm) -> Self {
        BoolTerm::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: BoolTerm, b: BoolTerm) -> Self {
        BoolTerm::Iff(Box::new(a), Box::new(b))
    }
}

/// Membership test for `E` at the sequence `b`: true/false for ⊤/⊥, the
/// assigned bit for a variable or application base, and the matching boolean
/// connective for ∪/∩/¬.
pub fn compile_predicate(e: &SetExpr, idx: &PredicateIndex, b: &SeqTerm) -> BoolTerm {
    match e {
        SetExpr::Top => BoolTerm::Lit(true),
        SetExpr::Bot => BoolTerm::Lit(false),
        SetExpr::Var(_) | SetExpr::App(..) => {
            let pos = idx
                .position(e)
                .expect("base predicate missing from index");
            BoolTerm::BitOf(b.clone(), pos)
        }
        SetExpr::Union(x, y) => BoolTerm::Or(vec![
            compile_predicate(x, idx, b),
            compile_predicate(y, idx, b),
        ]),
        SetExpr::Inter(x, y) => BoolTerm::And(vec![
            compile_predicate(x, idx, b),
            compile_predicate(y, idx, b),
        ]),
        SetExpr::Neg(x) => BoolTerm::not(compile_predicate(x, idx, b)),
        SetExpr::Proj(..) => unreachable!("projections must be eliminated before encoding"),
    }
}

/// A declaration in an emitted script, in emission order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    /// `(declare-fun name ((_ BitVec N))^a Bool)`; `arity` counts sequence
    /// arguments.
    BoolFun { name: String, arity: usize, width: usize },
    /// `(declare-const name (_ BitVec N))`.
    SeqConst { name: String, width: usize },
    /// `(declare-const name Bool)`.
    BoolConst { name: String },
    /// `(define-fun name ((p1 (_ BitVec N)) …) (_ BitVec N) body)` where the
    /// body concatenates one `ite` per bit, highest position first.
    Assembler { name: String, params: Vec<String>, width: usize, bits: Vec<BoolTerm> },
}

/// An SMT-LIB script: logic, declarations, assertions, final commands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmtScript {
    pub bit_width: usize,
    pub logic: String,
    pub decls: Vec<Decl>,
    pub assertions: Vec<BoolTerm>,
    pub get_model: bool,
}

impl SmtScript {
    /// Serializes to SMT-LIB 2 text. Equal scripts yield byte-identical
    /// output.
    pub fn to_smtlib(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("(set-logic {})\n", self.logic));
        for d in &self.decls {
            match d {
                Decl::BoolFun { name, arity, width } => {
                    let args = vec![format!("(_ BitVec {width})"); *arity].join(" ");
                    s.push_str(&format!("(declare-fun {name} ({args}) Bool)\n"));
                }
                Decl::SeqConst { name, width } => {
                    s.push_str(&format!("(declare-const {name} (_ BitVec {width}))\n"));
                }
                Decl::BoolConst { name } => {
                    s.push_str(&format!("(declare-const {name} Bool)\n"));
                }
                Decl::Assembler { name, params, width, bits } => {
                    let plist = params
                        .iter()
                        .map(|p| format!("({p} (_ BitVec {width}))"))
                        .collect::<Vec<_>>()
                        .join(" ");
                    s.push_str(&format!(
                        "(define-fun {name} ({plist}) (_ BitVec {width}) {})\n",
                        assemble_bits(bits)
                    ));
                }
            }
        }
        for a in &self.assertions {
            s.push_str(&format!("(assert {})\n", print_bool(a)));
        }
        s.push_str("(check-sat)\n");
        if self.get_model {
            s.push_str("(get-model)\n");
        }
        s
    }
}

/// Bits as a nested binary concat, highest position first; each bit is
/// `(ite cond #b1 #b0)`.
fn assemble_bits(bits: &[BoolTerm]) -> String {
    assert!(!bits.is_empty(), "assembler needs at least one bit");
    let one = |b: &BoolTerm| format!("(ite {} #b1 #b0)", print_bool(b));
    let mut it = bits.iter().rev();
    let first = one(it.next().unwrap());
    it.fold(first, |acc, b| format!("(concat {acc} {})", one(b)))
}

fn print_seq(t: &SeqTerm) -> String {
    match t {
        SeqTerm::Name(n) => n.clone(),
        SeqTerm::Call(f, args) => {
            if args.is_empty() {
                f.clone()
            } else {
                let a = args.iter().map(print_seq).collect::<Vec<_>>().join(" ");
                format!("({f} {a})")
            }
        }
    }
}

fn print_bool(t: &BoolTerm) -> String {
    match t {
        BoolTerm::Lit(true) => "true".into(),
        BoolTerm::Lit(false) => "false".into(),
        BoolTerm::BitOf(b, j) => {
            format!("(= ((_ extract {j} {j}) {}) #b1)", print_seq(b))
        }
        BoolTerm::Ref(n) => n.clone(),
        BoolTerm::UFApp(f, args) => {
            if args.is_empty() {
                f.clone()
            } else {
                let a = args.iter().map(print_seq).collect::<Vec<_>>().join(" ");
                format!("({f} {a})")
            }
        }
        BoolTerm::SeqEq(a, b) => format!("(= {} {})", print_seq(a), print_seq(b)),
        BoolTerm::Not(a) => format!("(not {})", print_bool(a)),
        BoolTerm::And(parts) => match parts.len() {
            0 => "true".into(),
            1 => print_bool(&parts[0]),
            _ => format!(
                "(and {})",
                parts.iter().map(print_bool).collect::<Vec<_>>().join(" ")
            ),
        },
        BoolTerm::Or(parts) => match parts.len() {
            0 => "false".into(),
            1 => print_bool(&parts[0]),
            _ => format!(
                "(or {})",
                parts.iter().map(print_bool).collect::<Vec<_>>().join(" ")
            ),
        },
        BoolTerm::Implies(a, b) => {
            format!("(=> {} {})", print_bool(a), print_bool(b))
        }
        BoolTerm::Iff(a, b) => format!("(= {} {})", print_bool(a), print_bool(b)),
        BoolTerm::Forall(binders, body) => {
            format!("(forall ({}) {})", print_binders(binders), print_bool(body))
        }
        BoolTerm::Exists(binders, body) => {
            format!("(exists ({}) {})", print_binders(binders), print_bool(body))
        }
    }
}

fn print_binders(binders: &[(String, usize)]) -> String {
    binders
        .iter()
        .map(|(n, w)| format!("({n} (_ BitVec {w}))"))
        .collect::<Vec<_>>()
        .join(" ")
}
