//! End-to-end decision pipeline for constraint formulas.
//!
//! Stages: projection elimination, pre-solver simplification (optional),
//! short-circuit decisions that need no encoding, then the bit-vector
//! encoding dispatched to the chosen backend. A trace of the intermediate
//! formulas and the emitted script is available for diagnostics.

use super::backend::{run_backend, BackendConfig};
use super::encode::{encode_formula, EncodeOptions};
use super::{SmtScript, UnknownReason, Verdict};
use crate::constraints::{
    eliminate_projections, index_base_predicates, Atom, Formula, SetExpr, Signature,
};
use crate::oracle::{oracle_solve, Budget};
use crate::simplify::{
    inline_definitions, merge_variables, remove_trivial, simplify_formula_exprs,
};

/// Which decision procedure finishes the pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    /// Brute-force enumeration in-process.
    Oracle(Budget),
    /// External SMT solver subprocess.
    External(BackendConfig),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub backend: Backend,
    /// Apply the pre-solver reductions. On by default.
    pub simplify: bool,
    pub encode: EncodeOptions,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            backend: Backend::Oracle(Budget::default()),
            simplify: true,
            encode: EncodeOptions::default(),
        }
    }
}

/// What the pipeline did, for diagnostics and tests.
#[derive(Debug, Clone)]
pub struct SolveTrace {
    /// Formula after projection elimination.
    pub eliminated: Formula,
    /// Formula handed to the decision stage (simplified unless disabled).
    pub prepared: Formula,
    /// Base-predicate count of the prepared formula.
    pub n: usize,
    /// Set when the verdict needed no backend, with the reason.
    pub short_circuit: Option<String>,
    /// The emitted script when the external backend ran.
    pub script: Option<SmtScript>,
    /// True iff the external backend subprocess was invoked.
    pub backend_invoked: bool,
}

/// Decides `c` over `sig`; see [`solve_traced`] for the pipeline record.
pub fn solve(c: &Formula, sig: &Signature, cfg: &SolverConfig) -> Verdict {
    solve_traced(c, sig, cfg).0
}

/// The decision stages before any backend: projection elimination followed
/// by the verdict-preserving reductions (unless `simplify` is off).
pub fn prepare_formula(c: &Formula, sig: &Signature, simplify: bool) -> Formula {
    let eliminated = eliminate_projections(c, sig);
    if simplify {
        reduce(&eliminated)
    } else {
        eliminated
    }
}

fn reduce(eliminated: &Formula) -> Formula {
    let exprs = simplify_formula_exprs(eliminated);
    let trimmed = remove_trivial(&exprs);
    let (merged, _) = merge_variables(&trimmed);
    let inlined = inline_definitions(&merged);
    remove_trivial(&inlined)
}

pub fn solve_traced(c: &Formula, sig: &Signature, cfg: &SolverConfig) -> (Verdict, SolveTrace) {
    let eliminated = eliminate_projections(c, sig);
    let prepared = if cfg.simplify { reduce(&eliminated) } else { eliminated.clone() };
    let idx = index_base_predicates(&prepared);
    let n = idx.len();
    let mut trace = SolveTrace {
        eliminated,
        prepared: prepared.clone(),
        n,
        short_circuit: None,
        script: None,
        backend_invoked: false,
    };

    // Empty universe: every expression denotes the empty set, so every
    // inclusion holds. The formula reduces to its boolean structure with
    // all atoms true.
    if !sig.has_ground_term() {
        let verdict = if eval_with(&prepared, &mut |_| true) {
            Verdict::Sat("empty universe satisfies every inclusion".into())
        } else {
            Verdict::Unsat
        };
        trace.short_circuit = Some("no arity-0 symbol: empty universe".into());
        return (verdict, trace);
    }

    // No base predicates: each side of every atom denotes the empty set or
    // the whole (nonempty) universe; decide by direct evaluation.
    if n == 0 {
        let verdict = if eval_with(&prepared, &mut |a| {
            !denotes_universe(&a.lhs) || denotes_universe(&a.rhs)
        }) {
            Verdict::Sat("decided by constant evaluation".into())
        } else {
            Verdict::Unsat
        };
        trace.short_circuit = Some("no base predicates: constant formula".into());
        return (verdict, trace);
    }

    match &cfg.backend {
        Backend::Oracle(budget) => (oracle_solve(&prepared, sig, budget), trace),
        Backend::External(bcfg) => {
            let script = match encode_formula(&prepared, sig, &idx, &cfg.encode) {
                Ok(s) => s,
                Err(e) => {
                    return (
                        Verdict::Unknown(UnknownReason::BackendError(format!(
                            "encoding failed: {e}"
                        ))),
                        trace,
                    )
                }
            };
            trace.script = Some(script.clone());
            trace.backend_invoked = true;
            (run_backend(&script, bcfg), trace)
        }
    }
}

/// Evaluates the boolean structure with a given atom valuation.
fn eval_with(c: &Formula, atom_value: &mut impl FnMut(&Atom) -> bool) -> bool {
    match c {
        Formula::Atom(a) => atom_value(a),
        Formula::And(a, b) => eval_with(a, atom_value) && eval_with(b, atom_value),
        Formula::Or(a, b) => eval_with(a, atom_value) || eval_with(b, atom_value),
        Formula::Not(a) => !eval_with(a, atom_value),
    }
}

/// Whether a variable-free, application-free expression denotes the whole
/// universe (as opposed to the empty set). Sound only when the universe is
/// nonempty, which the caller has established.
fn denotes_universe(e: &SetExpr) -> bool {
    match e {
        SetExpr::Top => true,
        SetExpr::Bot => false,
        SetExpr::Union(a, b) => denotes_universe(a) || denotes_universe(b),
        SetExpr::Inter(a, b) => denotes_universe(a) && denotes_universe(b),
        SetExpr::Neg(a) => !denotes_universe(a),
        SetExpr::Var(_) | SetExpr::App(..) => {
            unreachable!("constant evaluation requires zero base predicates")
        }
        SetExpr::Proj(..) => unreachable!("projections eliminated earlier"),
    }
}
