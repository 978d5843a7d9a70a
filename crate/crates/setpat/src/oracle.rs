//! Brute-force reference decision procedure.
//!
//! Exhaustively enumerates finite models of the same translated problem the
//! SMT encoding targets: a domain D of N-bit vectors plus one total,
//! D-closed function table per symbol, where application bits of every
//! output are determined structurally and only variable bits are free. The
//! finite model property bounds the search at 2ᴺ elements, so within budget
//! the enumeration is complete and its verdicts are definitive for the
//! translated problem.
//!
//! Deliberately decides the translated problem, not the term-universe
//! semantics directly: quantifying over subsets of an infinite term universe
//! is not enumerable, and the finite-model substitution is exactly what the
//! encoding under test relies on.

use crate::constraints::{
    index_base_predicates, index_base_predicates_with_proj, Atom, Formula, FuncSym,
    PredicateIndex, SetExpr, Signature,
};
use crate::smt::{UnknownReason, Verdict};
use itertools::Itertools;
use std::collections::BTreeMap;

/// Search limits. Defaults: domains up to 2³ elements, 10⁷ elementary steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Maximum base-predicate count N the search will attempt.
    pub max_n: usize,
    /// Elementary-step limit across the whole search (domains visited,
    /// table slots tried, candidate models evaluated).
    pub max_checks: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_n: 3, max_checks: 10_000_000 }
    }
}

/// A found model of the translated problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteModel {
    /// Bit width N.
    pub n: usize,
    /// Domain elements, ascending.
    pub domain: Vec<u64>,
    /// Per symbol in signature order: total map from input tuples over the
    /// domain to domain elements. Arity-0 tables have the single key `[]`.
    pub func_tables: Vec<(FuncSym, BTreeMap<Vec<u64>, u64>)>,
    /// Per distinct atom in first-occurrence order: the atom's truth value
    /// as a ∀-statement, and when false, the least counterexample element.
    pub witness_choice: Vec<(Atom, bool, Option<u64>)>,
}

impl FiniteModel {
    /// Compact human-readable rendering, one line per component.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let fmt_el = |d: &u64| format!("{:0width$b}", d, width = self.n.max(1));
        s.push_str(&format!(
            "domain {{{}}}\n",
            self.domain.iter().map(fmt_el).join(", ")
        ));
        for (f, table) in &self.func_tables {
            for (inputs, out) in table {
                s.push_str(&format!(
                    "{}({}) = {}\n",
                    f.name,
                    inputs.iter().map(fmt_el).join(", "),
                    fmt_el(out)
                ));
            }
        }
        s
    }
}

/// `true` iff the element `bits` belongs to the denotation of `e`.
pub fn eval_expr(e: &SetExpr, idx: &PredicateIndex, bits: u64) -> bool {
    match e {
        SetExpr::Top => true,
        SetExpr::Bot => false,
        SetExpr::Var(_) | SetExpr::App(..) => {
            let pos = idx.position(e).expect("base predicate missing from index");
            (bits >> pos) & 1 == 1
        }
        SetExpr::Union(a, b) => eval_expr(a, idx, bits) || eval_expr(b, idx, bits),
        SetExpr::Inter(a, b) => eval_expr(a, idx, bits) && eval_expr(b, idx, bits),
        SetExpr::Neg(a) => !eval_expr(a, idx, bits),
        SetExpr::Proj(..) => unreachable!("projections must be eliminated before evaluation"),
    }
}

/// Truth of one atom over a domain: ∀d∈D. d∈⟦lhs⟧ ⇒ d∈⟦rhs⟧.
pub fn eval_atom(a: &Atom, idx: &PredicateIndex, domain: &[u64]) -> bool {
    domain
        .iter()
        .all(|&d| !eval_expr(&a.lhs, idx, d) || eval_expr(&a.rhs, idx, d))
}

/// Like [`eval_expr`], but interprets projections directly against the
/// candidate function tables: d ∈ ⟦projⱼ f E⟧ iff some input tuple t with
/// tⱼ = d has f(t) ∈ ⟦E⟧. `symbols` and `tables` are parallel slices.
pub fn eval_expr_direct(
    e: &SetExpr,
    idx: &PredicateIndex,
    bits: u64,
    symbols: &[FuncSym],
    tables: &[BTreeMap<Vec<u64>, u64>],
) -> bool {
    match e {
        SetExpr::Proj(f, j, arg) => match symbols.iter().position(|g| g == f) {
            Some(sym_i) => tables[sym_i].iter().any(|(inputs, out)| {
                inputs[j - 1] == bits && eval_expr_direct(arg, idx, *out, symbols, tables)
            }),
            None => false,
        },
        SetExpr::Union(a, b) => {
            eval_expr_direct(a, idx, bits, symbols, tables)
                || eval_expr_direct(b, idx, bits, symbols, tables)
        }
        SetExpr::Inter(a, b) => {
            eval_expr_direct(a, idx, bits, symbols, tables)
                && eval_expr_direct(b, idx, bits, symbols, tables)
        }
        SetExpr::Neg(a) => !eval_expr_direct(a, idx, bits, symbols, tables),
        other => eval_expr(other, idx, bits),
    }
}

/// [`eval_atom`] with direct projection semantics.
pub fn eval_atom_direct(
    a: &Atom,
    idx: &PredicateIndex,
    domain: &[u64],
    symbols: &[FuncSym],
    tables: &[BTreeMap<Vec<u64>, u64>],
) -> bool {
    domain.iter().all(|&d| {
        !eval_expr_direct(&a.lhs, idx, d, symbols, tables)
            || eval_expr_direct(&a.rhs, idx, d, symbols, tables)
    })
}

/// [`eval_formula`] with direct projection semantics.
pub fn eval_formula_direct(
    c: &Formula,
    idx: &PredicateIndex,
    domain: &[u64],
    symbols: &[FuncSym],
    tables: &[BTreeMap<Vec<u64>, u64>],
) -> bool {
    match c {
        Formula::Atom(a) => eval_atom_direct(a, idx, domain, symbols, tables),
        Formula::And(a, b) => {
            eval_formula_direct(a, idx, domain, symbols, tables)
                && eval_formula_direct(b, idx, domain, symbols, tables)
        }
        Formula::Or(a, b) => {
            eval_formula_direct(a, idx, domain, symbols, tables)
                || eval_formula_direct(b, idx, domain, symbols, tables)
        }
        Formula::Not(a) => !eval_formula_direct(a, idx, domain, symbols, tables),
    }
}

/// Truth of the whole formula over a domain, evaluating the boolean
/// structure directly.
pub fn eval_formula(c: &Formula, idx: &PredicateIndex, domain: &[u64]) -> bool {
    match c {
        Formula::Atom(a) => eval_atom(a, idx, domain),
        Formula::And(a, b) => {
            eval_formula(a, idx, domain) && eval_formula(b, idx, domain)
        }
        Formula::Or(a, b) => eval_formula(a, idx, domain) || eval_formula(b, idx, domain),
        Formula::Not(a) => !eval_formula(a, idx, domain),
    }
}

/// The application bits every output of `f` must carry at the given input
/// tuple, as a (mask, value) pair over the App positions of the index.
fn forced_bits(f: &FuncSym, inputs: &[u64], idx: &PredicateIndex) -> (u64, u64) {
    let mut mask = 0u64;
    let mut value = 0u64;
    for (pos, head, args) in idx.app_positions() {
        mask |= 1 << pos;
        if head == f
            && args
                .iter()
                .zip(inputs)
                .all(|(arg, &input)| eval_expr(arg, idx, input))
        {
            value |= 1 << pos;
        }
    }
    (mask, value)
}

struct Search<'a> {
    formula: &'a Formula,
    idx: &'a PredicateIndex,
    slots: Vec<(usize, Vec<u64>)>,
    symbols: &'a [FuncSym],
    domain: Vec<u64>,
    checks: u64,
    max_checks: u64,
    direct_proj: bool,
}

struct BudgetExceeded;

impl<'a> Search<'a> {
    fn tick(&mut self) -> Result<(), BudgetExceeded> {
        self.checks += 1;
        if self.checks > self.max_checks {
            Err(BudgetExceeded)
        } else {
            Ok(())
        }
    }

    /// Fills slots from `at` on; returns the first model found.
    fn fill(
        &mut self,
        at: usize,
        tables: &mut Vec<BTreeMap<Vec<u64>, u64>>,
    ) -> Result<Option<FiniteModel>, BudgetExceeded> {
        if at == self.slots.len() {
            self.tick()?;
            let holds = if self.direct_proj {
                eval_formula_direct(self.formula, self.idx, &self.domain, self.symbols, tables)
            } else {
                eval_formula(self.formula, self.idx, &self.domain)
            };
            if holds {
                return Ok(Some(self.build_model(tables)));
            }
            return Ok(None);
        }
        let (sym_i, inputs) = self.slots[at].clone();
        let (mask, value) = forced_bits(&self.symbols[sym_i], &inputs, self.idx);
        for di in 0..self.domain.len() {
            let d = self.domain[di];
            if d & mask != value {
                continue;
            }
            self.tick()?;
            tables[sym_i].insert(inputs.clone(), d);
            let found = self.fill(at + 1, tables)?;
            if found.is_some() {
                return Ok(found);
            }
            tables[sym_i].remove(&inputs);
        }
        Ok(None)
    }

    fn build_model(&self, tables: &[BTreeMap<Vec<u64>, u64>]) -> FiniteModel {
        let in_set = |e: &SetExpr, d: u64| {
            if self.direct_proj {
                eval_expr_direct(e, self.idx, d, self.symbols, tables)
            } else {
                eval_expr(e, self.idx, d)
            }
        };
        let witness_choice = distinct_atoms(self.formula)
            .into_iter()
            .map(|a| {
                let counterexample = self
                    .domain
                    .iter()
                    .copied()
                    .find(|&d| in_set(&a.lhs, d) && !in_set(&a.rhs, d));
                let truth = counterexample.is_none();
                (a, truth, counterexample)
            })
            .collect();
        FiniteModel {
            n: self.idx.len(),
            domain: self.domain.clone(),
            func_tables: self
                .symbols
                .iter()
                .cloned()
                .zip(tables.iter().cloned())
                .collect(),
            witness_choice,
        }
    }
}

/// Distinct atoms in first-occurrence order.
pub fn distinct_atoms(c: &Formula) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::new();
    for a in c.atoms() {
        if !out.iter().any(|x| x == a) {
            out.push(a.clone());
        }
    }
    out
}

/// Decides the translated problem by exhaustive search; [`oracle_solve`]
/// plus the model behind a Sat verdict.
///
/// Enumerates nonempty domains D ⊆ B^N by cardinality then lexicographic
/// element order; within a domain, table slots run per symbol in signature
/// order and per input tuple in lexicographic order, candidate outputs in
/// ascending element order. First satisfying model wins.
pub fn oracle_solve_model(
    c: &Formula,
    sig: &Signature,
    budget: &Budget,
) -> (Verdict, Option<FiniteModel>) {
    search_all(c, sig, budget, index_base_predicates(c), false)
}

fn search_all(
    c: &Formula,
    sig: &Signature,
    budget: &Budget,
    idx: PredicateIndex,
    direct_proj: bool,
) -> (Verdict, Option<FiniteModel>) {
    let n = idx.len();
    if n > budget.max_n {
        return (
            Verdict::Unknown(UnknownReason::Budget(format!(
                "N={n} exceeds oracle bound maxN={}",
                budget.max_n
            ))),
            None,
        );
    }
    let elements: Vec<u64> = (0..(1u64 << n)).collect();
    let mut checks = 0u64;
    for cardinality in 1..=elements.len() {
        for domain in elements.iter().copied().combinations(cardinality) {
            let mut search = Search {
                formula: c,
                idx: &idx,
                slots: make_slots(sig, &domain),
                symbols: sig.symbols(),
                domain,
                checks,
                max_checks: budget.max_checks,
                direct_proj,
            };
            let outcome = (|| {
                search.tick()?;
                let mut tables = vec![BTreeMap::new(); sig.symbols().len()];
                search.fill(0, &mut tables)
            })();
            checks = search.checks;
            match outcome {
                Ok(Some(model)) => return (Verdict::Sat(model.render()), Some(model)),
                Ok(None) => {}
                Err(BudgetExceeded) => {
                    return (
                        Verdict::Unknown(UnknownReason::Budget(format!(
                            "check budget {} exhausted",
                            budget.max_checks
                        ))),
                        None,
                    )
                }
            }
        }
    }
    (Verdict::Unsat, None)
}

/// One slot per symbol per input tuple over the domain.
fn make_slots(sig: &Signature, domain: &[u64]) -> Vec<(usize, Vec<u64>)> {
    let mut slots = Vec::new();
    for (sym_i, f) in sig.symbols().iter().enumerate() {
        if f.arity == 0 {
            slots.push((sym_i, Vec::new()));
            continue;
        }
        for t in (0..f.arity)
            .map(|_| domain.iter().copied())
            .multi_cartesian_product()
        {
            slots.push((sym_i, t));
        }
    }
    slots
}

/// Exhaustive decision of the translated problem within budget.
pub fn oracle_solve(c: &Formula, sig: &Signature, budget: &Budget) -> Verdict {
    oracle_solve_model(c, sig, budget).0
}

/// Exhaustive decision of a formula that may still contain projections,
/// interpreting each projection directly against the candidate tables
/// instead of requiring prior elimination. Used to cross-check the
/// elimination rewrite against the projection semantics it implements.
///
/// Projections nested inside application arguments are rejected: the bits an
/// output must carry would then depend on tables not yet filled.
pub fn oracle_solve_direct(c: &Formula, sig: &Signature, budget: &Budget) -> Verdict {
    let idx = index_base_predicates_with_proj(c);
    for (_, _, args) in idx.app_positions() {
        assert!(
            !args.iter().any(|a| a.contains_proj()),
            "projection nested inside an application argument"
        );
    }
    search_all(c, sig, budget, idx, true).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::parse_constraint_file;

    fn solve(src: &str) -> Verdict {
        let (sig, c) = parse_constraint_file(src).unwrap();
        oracle_solve(&c, &sig, &Budget::default())
    }

    #[test]
    fn nonempty_subset_of_constant_is_sat() {
        // X ⊆ a() ∧ X ⊄ ⊥
        let v = solve(
            "(declare-fun a 0)\
             (assert (subset (var X) (a)))\
             (assert (not (subset (var X) bot)))",
        );
        assert!(v.is_sat(), "{v}");
    }

    #[test]
    fn self_exclusion_is_unsat() {
        // X ⊄ X
        let v = solve("(assert (not (subset (var X) (var X))))");
        assert!(v.is_unsat(), "{v}");
    }

    #[test]
    fn over_budget_n_is_unknown() {
        let v = solve(
            "(assert (subset (var W) (var X)))(assert (subset (var Y) (var Z)))",
        );
        assert!(matches!(v, Verdict::Unknown(UnknownReason::Budget(_))), "{v}");
    }

    #[test]
    fn contradictory_literals_unsat() {
        let v = solve(
            "(assert (subset (var X) bot))(assert (not (subset (var X) bot)))",
        );
        assert!(v.is_unsat(), "{v}");
    }

    #[test]
    fn disjoint_heads_sat_in_translated_problem() {
        // X ⊆ a() ∧ X ⊆ f(⊤) ∧ X ⊄ ⊥. Unsatisfiable over actual terms (a
        // term has one head), but the translation does not force every
        // domain element into some symbol's image, so an element carrying
        // both head bits is admissible. The encoding under test has the
        // same gap; agreement, not term-universe truth, is what the oracle
        // certifies.
        let v = solve(
            "(declare-fun a 0)(declare-fun f 1)\
             (assert (subset (var X) (a)))\
             (assert (subset (var X) (f top)))\
             (assert (not (subset (var X) bot)))",
        );
        assert!(v.is_sat(), "{v}");
    }

    #[test]
    fn boolean_structure_sat() {
        // (X ⊆ Y ⇒ Y ⊆ X) ∧ Y ⊄ Z
        let v = solve(
            "(declare-fun a 0)\
             (assert (=> (subset (var X) (var Y)) (subset (var Y) (var X))))\
             (assert (not (subset (var Y) (var Z))))",
        );
        assert!(v.is_sat(), "{v}");
    }

    #[test]
    fn tiny_check_budget_is_unknown() {
        let (sig, c) = parse_constraint_file(
            "(declare-fun f 1)(assert (not (subset (f (var X)) bot)))",
        )
        .unwrap();
        let v = oracle_solve(&c, &sig, &Budget { max_n: 3, max_checks: 2 });
        assert!(matches!(v, Verdict::Unknown(UnknownReason::Budget(_))), "{v}");
    }

    #[test]
    fn model_is_total_closed_and_witnessed() {
        let (sig, c) = parse_constraint_file(
            "(declare-fun a 0)(declare-fun f 1)\
             (assert (subset (var X) (f top)))\
             (assert (not (subset (var X) bot)))",
        )
        .unwrap();
        let (v, model) = oracle_solve_model(&c, &sig, &Budget::default());
        assert!(v.is_sat(), "{v}");
        let m = model.unwrap();
        assert!(!m.domain.is_empty());
        for (f, table) in &m.func_tables {
            let expected = if f.arity == 0 {
                1
            } else {
                m.domain.len().pow(f.arity as u32)
            };
            assert_eq!(table.len(), expected, "table not total for {}", f.name);
            for out in table.values() {
                assert!(m.domain.contains(out), "output escapes domain");
            }
        }
        // The negated atom is false as a ∀-statement and carries a witness.
        let (_, truth, witness) = &m.witness_choice[1];
        assert!(!truth);
        assert!(witness.is_some());
    }

    #[test]
    fn budget_monotone_on_definite_verdicts() {
        let srcs = [
            "(declare-fun a 0)(assert (subset (var X) (a)))(assert (not (subset (var X) bot)))",
            "(assert (not (subset (var X) (var X))))",
        ];
        for src in srcs {
            let (sig, c) = parse_constraint_file(src).unwrap();
            let small = oracle_solve(&c, &sig, &Budget::default());
            let big = oracle_solve(
                &c,
                &sig,
                &Budget { max_n: 4, max_checks: 100_000_000 },
            );
            assert_eq!(small.word(), big.word());
        }
    }

    #[test]
    fn direct_projection_of_image_restriction_is_identity() {
        // Every output of f carries the f(⊤) bit, so the direct reading of
        // proj₁ f (f ⊤) is the whole domain and ⊤ ⊄ proj cannot hold.
        let (sig, c) = parse_constraint_file(
            "(declare-fun f 1)(assert (not (subset top (proj f 1 (f top)))))",
        )
        .unwrap();
        let v = oracle_solve_direct(&c, &sig, &Budget::default());
        assert!(v.is_unsat(), "{v}");
    }

    #[test]
    fn direct_projection_agrees_with_elimination_in_regime() {
        use crate::constraints::eliminate_projections;
        let srcs = [
            "(declare-fun f 1)(assert (subset (proj f 1 (f top)) bot))",
            "(declare-fun f 1)(assert (not (subset (proj f 1 (f top)) bot)))",
        ];
        for src in srcs {
            let (sig, c) = parse_constraint_file(src).unwrap();
            let before = oracle_solve_direct(&c, &sig, &Budget::default());
            let after =
                oracle_solve(&eliminate_projections(&c, &sig), &sig, &Budget::default());
            assert!(before.is_definite(), "{src}: {before}");
            assert_eq!(before.word(), after.word(), "{src}");
        }
    }

    #[test]
    fn elimination_can_differ_when_argument_misses_the_image() {
        // proj₁ f (¬f(⊤)) is empty under the direct reading (outputs always
        // carry the f(⊤) bit), so the first conjunct is free. The rewrite's
        // emptiness side condition instead demands ¬f(⊤) itself be empty,
        // which the second conjunct refutes. This is the known boundary of
        // the rewrite: sound when the projected argument stays inside the
        // symbol's image, not in general.
        use crate::constraints::eliminate_projections;
        let (sig, c) = parse_constraint_file(
            "(declare-fun f 1)\
             (assert (subset (proj f 1 (neg (f top))) bot))\
             (assert (not (subset top (f top))))",
        )
        .unwrap();
        let before = oracle_solve_direct(&c, &sig, &Budget::default());
        let after = oracle_solve(&eliminate_projections(&c, &sig), &sig, &Budget::default());
        assert!(before.is_sat(), "{before}");
        assert!(after.is_unsat(), "{after}");
    }

    #[test]
    fn unused_symbols_still_constrain_closure() {
        // b() must avoid the a()-bit, and X ⊆ a() ∧ a() ⊆ X ∧ X ⊄ ⊥ forces
        // the a()-bit on some element; both can hold in one domain.
        let v = solve(
            "(declare-fun a 0)(declare-fun b 0)\
             (assert (= (var X) (a)))\
             (assert (not (subset (var X) bot)))",
        );
        assert!(v.is_sat(), "{v}");
    }
}
