//! Pre-solver reductions: expression simplification, trivial-constraint
//! removal, and union-find merging of variables constrained equal.
//!
//! Each pass preserves satisfiability; none is required for correctness of
//! the encodings downstream, but they shrink the predicate count N and with
//! it the 2ᴺ model bound.

use crate::constraints::{Atom, Formula, SetExpr};
use std::collections::BTreeMap;

/// Applies the local rewrite set to fixpoint:
///
/// ```text
/// E∩⊤→E  E∩⊥→⊥  E∪⊥→E  E∪⊤→⊤  ¬¬E→E  ¬⊤→⊥  ¬⊥→⊤  E∩E→E  E∪E→E  f(…,⊥,…)→⊥
/// ```
///
/// Rules needing signature reasoning (e.g. Circle(⊤) ∩ ¬Square(⊤)) are
/// deliberately out of scope: every rewrite here is justified by the set
/// semantics alone. Commutative rules match both orientations.
pub fn simplify_expr(e: &SetExpr) -> SetExpr {
    match e {
        SetExpr::Var(_) | SetExpr::Top | SetExpr::Bot => e.clone(),
        SetExpr::Union(a, b) => {
            let a = simplify_expr(a);
            let b = simplify_expr(b);
            match (a, b) {
                (SetExpr::Bot, x) | (x, SetExpr::Bot) => x,
                (SetExpr::Top, _) | (_, SetExpr::Top) => SetExpr::Top,
                (x, y) if x == y => x,
                (x, y) => SetExpr::union(x, y),
            }
        }
        SetExpr::Inter(a, b) => {
            let a = simplify_expr(a);
            let b = simplify_expr(b);
            match (a, b) {
                (SetExpr::Top, x) | (x, SetExpr::Top) => x,
                (SetExpr::Bot, _) | (_, SetExpr::Bot) => SetExpr::Bot,
                (x, y) if x == y => x,
                (x, y) => SetExpr::inter(x, y),
            }
        }
        SetExpr::Neg(a) => match simplify_expr(a) {
            SetExpr::Top => SetExpr::Bot,
            SetExpr::Bot => SetExpr::Top,
            SetExpr::Neg(inner) => *inner,
            x => SetExpr::neg(x),
        },
        SetExpr::App(f, args) => {
            let args: Vec<SetExpr> = args.iter().map(simplify_expr).collect();
            if args.iter().any(|a| *a == SetExpr::Bot) {
                SetExpr::Bot
            } else {
                SetExpr::App(f.clone(), args)
            }
        }
        SetExpr::Proj(f, j, a) => SetExpr::Proj(f.clone(), *j, Box::new(simplify_expr(a))),
    }
}

/// [`simplify_expr`] applied to both sides of every atom.
pub fn simplify_formula_exprs(c: &Formula) -> Formula {
    match c {
        Formula::Atom(a) => Formula::atom(simplify_expr(&a.lhs), simplify_expr(&a.rhs)),
        Formula::And(a, b) => {
            Formula::and(simplify_formula_exprs(a), simplify_formula_exprs(b))
        }
        Formula::Or(a, b) => {
            Formula::or(simplify_formula_exprs(a), simplify_formula_exprs(b))
        }
        Formula::Not(a) => Formula::not(simplify_formula_exprs(a)),
    }
}

fn is_truth(c: &Formula) -> bool {
    *c == Formula::truth()
}

/// Canonical false: ¬(⊥ ⊆ ⊤). Note this is NOT the atom ⊤ ⊆ ⊥, which holds
/// over an empty universe and so cannot be folded.
fn is_falsity(c: &Formula) -> bool {
    match c {
        Formula::Not(a) => is_truth(a),
        _ => false,
    }
}

fn atom_is_trivial(a: &Atom) -> bool {
    a.rhs == SetExpr::Top || a.lhs == SetExpr::Bot || a.lhs == a.rhs
}

/// Replaces trivially satisfied atoms (E ⊆ ⊤, ⊥ ⊆ E, E ⊆ E structurally) by
/// the canonical true atom ⊥ ⊆ ⊤ and folds boolean constants.
///
/// Folding treats only ⊥ ⊆ ⊤ as "true" and only ¬(⊥ ⊆ ⊤) as "false". The
/// atom ⊤ ⊆ ⊥ is NOT folded to false: over an empty universe it holds, so
/// folding it would change verdicts. (⊥ ⊆ ⊤ itself is safe: it holds in
/// every interpretation, empty universe included.)
pub fn remove_trivial(c: &Formula) -> Formula {
    match c {
        Formula::Atom(a) => {
            if atom_is_trivial(a) {
                Formula::truth()
            } else {
                c.clone()
            }
        }
        Formula::And(a, b) => {
            let a = remove_trivial(a);
            let b = remove_trivial(b);
            if is_falsity(&a) || is_falsity(&b) {
                Formula::not(Formula::truth())
            } else if is_truth(&a) {
                b
            } else if is_truth(&b) {
                a
            } else {
                Formula::and(a, b)
            }
        }
        Formula::Or(a, b) => {
            let a = remove_trivial(a);
            let b = remove_trivial(b);
            if is_truth(&a) || is_truth(&b) {
                Formula::truth()
            } else if is_falsity(&a) {
                b
            } else if is_falsity(&b) {
                a
            } else {
                Formula::or(a, b)
            }
        }
        Formula::Not(a) => {
            let a = remove_trivial(a);
            if is_truth(&a) {
                Formula::not(Formula::truth())
            } else if is_falsity(&a) {
                Formula::truth()
            } else if let Formula::Not(inner) = &a {
                (**inner).clone()
            } else {
                Formula::not(a)
            }
        }
    }
}

/// Union-find over variable names. The representative of a class is its
/// lexicographically least member.
#[derive(Debug, Clone, Default)]
pub struct VarUnionFind {
    parent: BTreeMap<String, String>,
}

impl VarUnionFind {
    /// The representative of `name`, with path compression.
    pub fn find(&mut self, name: &str) -> String {
        match self.parent.get(name) {
            None => name.to_string(),
            Some(p) => {
                let p = p.clone();
                let root = self.find(&p);
                if root != p {
                    self.parent.insert(name.to_string(), root.clone());
                }
                root
            }
        }
    }

    /// Merges the classes of `a` and `b`; the lexicographically least root
    /// stays the representative.
    pub fn union(&mut self, a: &str, b: &str) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        if ra < rb {
            self.parent.insert(rb, ra);
        } else {
            self.parent.insert(ra, rb);
        }
    }

    /// All names mapped away from themselves, with their representative.
    pub fn mappings(&mut self) -> Vec<(String, String)> {
        let names: Vec<String> = self.parent.keys().cloned().collect();
        names
            .into_iter()
            .map(|n| {
                let r = self.find(&n);
                (n, r)
            })
            .filter(|(n, r)| n != r)
            .collect()
    }
}

/// Merges variables constrained equal by top-level conjuncts.
///
/// Scans the conjunction spine for pairs X ⊆ Y and Y ⊆ X (in any order, any
/// spine positions), unions the classes, drops the used inclusions, and
/// substitutes representatives throughout. Inclusions under `or`/`not` are
/// never used for merging. Returns the rewritten formula and the union-find
/// (so callers can translate solved variable names back).
pub fn merge_variables(c: &Formula) -> (Formula, VarUnionFind) {
    let mut uf = VarUnionFind::default();
    let conjuncts = c.conjuncts();

    // var-to-var inclusions as (lhs, rhs) index pairs
    let mut pairs: Vec<(String, String)> = Vec::new();
    for f in &conjuncts {
        if let Formula::Atom(Atom { lhs: SetExpr::Var(x), rhs: SetExpr::Var(y) }) = f {
            if x != y {
                pairs.push((x.clone(), y.clone()));
            }
        }
    }
    for (x, y) in &pairs {
        if pairs.iter().any(|(a, b)| a == y && b == x) {
            uf.union(x, y);
        }
    }

    // Drop conjuncts that became X ⊆ X under the merge; substitute the rest.
    let mut kept: Vec<Formula> = Vec::new();
    for f in conjuncts {
        if let Formula::Atom(Atom { lhs: SetExpr::Var(x), rhs: SetExpr::Var(y) }) = f {
            if uf.find(x) == uf.find(y) {
                continue;
            }
        }
        kept.push(apply_repr(f, &mut uf));
    }
    let out = Formula::conjoin(kept);
    (out, uf)
}

fn apply_repr(c: &Formula, uf: &mut VarUnionFind) -> Formula {
    let mut out = c.clone();
    for (name, repr) in uf.mappings() {
        out = out.subst_var(&name, &SetExpr::Var(repr));
    }
    out
}

/// Inlines intermediate definitions X = E arising from top-level conjuncts
/// when E is variable-free: a mutual-inclusion pair X ⊆ E ∧ E ⊆ X, a lone
/// ⊤ ⊆ X (the other direction is vacuous), or a lone X ⊆ ⊥. Every
/// occurrence of X is replaced by E and the defining conjuncts dropped.
/// Equisatisfiable both ways (a model of the result extends by assigning X
/// the value of E), and it never duplicates a variable, so repetition
/// cannot grow the base count.
pub fn inline_definitions(c: &Formula) -> Formula {
    let mut current = c.clone();
    loop {
        let conjuncts: Vec<Formula> = current.conjuncts().into_iter().cloned().collect();
        // (definition conjunct indices, variable, replacement)
        let mut choice: Option<(Vec<usize>, String, SetExpr)> = None;
        'scan: for (i, f) in conjuncts.iter().enumerate() {
            let Formula::Atom(a) = f else { continue };
            match a {
                Atom { lhs: SetExpr::Top, rhs: SetExpr::Var(x) } => {
                    choice = Some((vec![i], x.clone(), SetExpr::Top));
                    break 'scan;
                }
                Atom { lhs: SetExpr::Var(x), rhs: SetExpr::Bot } => {
                    choice = Some((vec![i], x.clone(), SetExpr::Bot));
                    break 'scan;
                }
                Atom { lhs: SetExpr::Var(x), rhs: e } => {
                    if matches!(e, SetExpr::Var(_)) || !e.free_set_vars().is_empty() {
                        continue;
                    }
                    for (k, g) in conjuncts.iter().enumerate() {
                        if k == i {
                            continue;
                        }
                        let Formula::Atom(Atom { lhs: e2, rhs: SetExpr::Var(x2) }) = g else {
                            continue;
                        };
                        if x2 == x && e2 == e {
                            choice = Some((vec![i, k], x.clone(), e.clone()));
                            break 'scan;
                        }
                    }
                }
                _ => {}
            }
        }
        let Some((drop, x, e)) = choice else { return current };
        let kept: Vec<Formula> = conjuncts
            .into_iter()
            .enumerate()
            .filter(|(m, _)| !drop.contains(m))
            .map(|(_, f)| f.subst_var(&x, &e))
            .collect();
        current = Formula::conjoin(kept);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{parse_constraint_file, FuncSym};

    fn expr(src: &str) -> SetExpr {
        let wrapped = format!("(declare-fun f 2)(declare-fun g 1)(declare-fun Circle 1)(declare-fun Square 1)(assert (subset {src} top))");
        let (_, c) = parse_constraint_file(&wrapped).unwrap();
        match c {
            Formula::Atom(a) => a.lhs,
            _ => unreachable!(),
        }
    }

    #[test]
    fn simplify_expr_rules() {
        assert_eq!(simplify_expr(&expr("(inter (var X) top)")), SetExpr::var("X"));
        assert_eq!(simplify_expr(&expr("(inter top (var X))")), SetExpr::var("X"));
        assert_eq!(simplify_expr(&expr("(inter (var X) bot)")), SetExpr::Bot);
        assert_eq!(simplify_expr(&expr("(union (var X) bot)")), SetExpr::var("X"));
        assert_eq!(simplify_expr(&expr("(union bot (var X))")), SetExpr::var("X"));
        assert_eq!(simplify_expr(&expr("(union (var X) top)")), SetExpr::Top);
        assert_eq!(simplify_expr(&expr("(neg (neg (var X)))")), SetExpr::var("X"));
        assert_eq!(simplify_expr(&expr("(neg top)")), SetExpr::Bot);
        assert_eq!(simplify_expr(&expr("(neg bot)")), SetExpr::Top);
        assert_eq!(simplify_expr(&expr("(inter (var X) (var X))")), SetExpr::var("X"));
        assert_eq!(simplify_expr(&expr("(union (var X) (var X))")), SetExpr::var("X"));
        assert_eq!(simplify_expr(&expr("(f (var X) bot)")), SetExpr::Bot);
    }

    #[test]
    fn simplify_expr_cascades_to_fixpoint() {
        // f(X ∩ ⊥, ⊤) → f(⊥, ⊤) → ⊥, then ¬⊥ → ⊤
        assert_eq!(
            simplify_expr(&expr("(neg (f (inter (var X) bot) top))")),
            SetExpr::Top
        );
        // ¬¬¬⊤ → ⊥
        assert_eq!(simplify_expr(&expr("(neg (neg (neg top)))")), SetExpr::Bot);
    }

    #[test]
    fn simplify_expr_leaves_signature_reasoning_alone() {
        let e = expr("(inter (Circle top) (neg (Square top)))");
        assert_eq!(simplify_expr(&e), e);
    }

    #[test]
    fn remove_trivial_atoms() {
        let c = Formula::atom(SetExpr::var("V1"), SetExpr::var("V1"));
        assert_eq!(remove_trivial(&c), Formula::truth());
        let c = Formula::atom(SetExpr::Bot, SetExpr::var("X"));
        assert_eq!(remove_trivial(&c), Formula::truth());
        let c = Formula::atom(SetExpr::var("X"), SetExpr::Top);
        assert_eq!(remove_trivial(&c), Formula::truth());
        // ⊤ ⊆ ⊥ must NOT fold to false: it is true over the empty universe.
        let c = Formula::falsity();
        assert_eq!(remove_trivial(&c), c);
    }

    #[test]
    fn remove_trivial_folds_connectives() {
        let live = Formula::atom(SetExpr::var("X"), SetExpr::var("Y"));
        let c = Formula::and(Formula::atom(SetExpr::Bot, SetExpr::var("X")), live.clone());
        assert_eq!(remove_trivial(&c), live);

        let c = Formula::or(live.clone(), Formula::atom(SetExpr::var("Z"), SetExpr::Top));
        assert_eq!(remove_trivial(&c), Formula::truth());

        let c = Formula::or(Formula::not(Formula::truth()), live.clone());
        assert_eq!(remove_trivial(&c), live);

        let c = Formula::not(Formula::not(live.clone()));
        assert_eq!(remove_trivial(&c), live);

        let c = Formula::not(Formula::atom(SetExpr::var("Q"), SetExpr::var("Q")));
        assert_eq!(remove_trivial(&c), Formula::not(Formula::truth()));
    }

    #[test]
    fn union_find_least_representative() {
        let mut uf = VarUnionFind::default();
        uf.union("Z", "B");
        uf.union("B", "A");
        uf.union("Q", "Z");
        assert_eq!(uf.find("Z"), "A");
        assert_eq!(uf.find("Q"), "A");
        assert_eq!(uf.find("B"), "A");
        assert_eq!(uf.find("A"), "A");
        assert_eq!(uf.find("unrelated"), "unrelated");
    }

    #[test]
    fn merge_variables_basic() {
        let (_, c) = parse_constraint_file(
            "(declare-fun f 1)\
             (assert (subset (var X) (var Y)))\
             (assert (subset (var Y) (var X)))\
             (assert (subset (f (var Y)) (var Z)))",
        )
        .unwrap();
        let (out, mut uf) = merge_variables(&c);
        assert_eq!(uf.find("Y"), "X");
        let f = FuncSym::new("f", 1);
        assert_eq!(
            out,
            Formula::atom(SetExpr::app(f, vec![SetExpr::var("X")]), SetExpr::var("Z"))
        );
    }

    #[test]
    fn merge_spans_spine_positions_and_chains() {
        let (_, c) = parse_constraint_file(
            "(assert (and (subset (var C) (var B)) (subset (var A) (var B))))\
             (assert (and (subset (var B) (var A)) (subset (var B) (var C))))",
        )
        .unwrap();
        let (out, mut uf) = merge_variables(&c);
        assert_eq!(uf.find("B"), "A");
        assert_eq!(uf.find("C"), "A");
        assert_eq!(out, Formula::truth());
    }

    #[test]
    fn merge_ignores_nested_inclusions() {
        let (_, c) = parse_constraint_file(
            "(assert (or (and (subset (var X) (var Y)) (subset (var Y) (var X))) true))",
        )
        .unwrap();
        let (out, mut uf) = merge_variables(&c);
        assert_eq!(uf.find("Y"), "Y");
        assert_eq!(out, c);
    }

    #[test]
    fn merge_one_direction_is_not_merged() {
        let (_, c) = parse_constraint_file("(assert (subset (var X) (var Y)))").unwrap();
        let (out, mut uf) = merge_variables(&c);
        assert_eq!(uf.find("Y"), "Y");
        assert_eq!(out, c);
    }

    #[test]
    fn inline_definition_removes_singleton_intermediate() {
        // X = a() used once elsewhere: X disappears.
        let (_, c) = parse_constraint_file(
            "(declare-fun a 0)\
             (assert (subset (var X) (a)))\
             (assert (subset (a) (var X)))\
             (assert (subset (var X) (var Y)))",
        )
        .unwrap();
        let out = inline_definitions(&c);
        assert_eq!(
            out,
            Formula::atom(
                SetExpr::app(FuncSym::new("a", 0), vec![]),
                SetExpr::var("Y")
            )
        );
    }

    #[test]
    fn inline_definition_substitutes_every_use() {
        let (_, c) = parse_constraint_file(
            "(declare-fun a 0)\
             (assert (subset (var X) (a)))\
             (assert (subset (a) (var X)))\
             (assert (subset (var X) (var Y)))\
             (assert (subset (var Z) (var X)))",
        )
        .unwrap();
        let a = SetExpr::app(FuncSym::new("a", 0), vec![]);
        let out = inline_definitions(&c);
        assert_eq!(
            out,
            Formula::and(
                Formula::atom(a.clone(), SetExpr::var("Y")),
                Formula::atom(SetExpr::var("Z"), a)
            )
        );
    }

    #[test]
    fn inline_definition_handles_one_sided_constant_bounds() {
        // ⊤ ⊆ X pins X to ⊤ even though X ⊆ ⊤ was removed as trivial;
        // Y ⊆ ⊥ pins Y to ⊥ likewise.
        let (_, c) = parse_constraint_file(
            "(declare-fun f 1)\
             (assert (subset top (var X)))\
             (assert (subset (var Y) bot))\
             (assert (subset (f (var X)) (var Z)))\
             (assert (not (subset (var Z) (var Y))))",
        )
        .unwrap();
        let out = inline_definitions(&c);
        let f_top = SetExpr::app(FuncSym::new("f", 1), vec![SetExpr::Top]);
        assert_eq!(
            out,
            Formula::and(
                Formula::atom(f_top, SetExpr::var("Z")),
                Formula::not(Formula::atom(SetExpr::var("Z"), SetExpr::Bot))
            )
        );
    }

    #[test]
    fn inline_definition_skips_open_rhs() {
        // X = f(Y): rhs has a free variable, not inlined.
        let (_, c) = parse_constraint_file(
            "(declare-fun f 1)\
             (assert (subset (var X) (f (var Y))))\
             (assert (subset (f (var Y)) (var X)))\
             (assert (subset (var X) (var Z)))",
        )
        .unwrap();
        assert_eq!(inline_definitions(&c), c);
    }
}
