//! Translation from set-constraint literals to monadic first-order logic.
//!
//! Every distinct subexpression E of the input gets a unary predicate P_E
//! stating membership in E, an axiom ties each P_E to the semantics of E's
//! head connective, and each literal becomes a quantified goal over the
//! predicates. A theory with N predicates has a model iff it has one of size
//! at most 2^N, which is what makes the translation a usable decision
//! intermediate.
//!
//! The solving pipeline encodes constraints to bit vectors directly and does
//! not pass through this module; it exists because the predicate form is
//! independently checkable and anchors the cross-checking tests.

use crate::constraints::{Atom, Formula, FuncSym, SetExpr, Signature};
use itertools::Itertools;
use thiserror::Error;

/// First-order terms: variables and signature-symbol applications.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    App(FuncSym, Vec<Term>),
}

/// Monadic formulas. Predicates are identified by the set expression they
/// stand for; quantifiers bind term-level variables only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonadicFormula {
    /// P_E(t): the term t lies in the denotation of E.
    Pred(Box<SetExpr>, Term),
    TrueF,
    FalseF,
    And(Vec<MonadicFormula>),
    Or(Vec<MonadicFormula>),
    Not(Box<MonadicFormula>),
    Implies(Box<MonadicFormula>, Box<MonadicFormula>),
    Iff(Box<MonadicFormula>, Box<MonadicFormula>),
    ForAll(Vec<String>, Box<MonadicFormula>),
    Exists(Vec<String>, Box<MonadicFormula>),
}

use MonadicFormula::*;

impl MonadicFormula {
    fn pred(e: &SetExpr, t: Term) -> MonadicFormula {
        Pred(Box::new(e.clone()), t)
    }
}

/// A quantifier with no binders is just its body.
fn forall(vars: Vec<String>, body: MonadicFormula) -> MonadicFormula {
    if vars.is_empty() {
        body
    } else {
        ForAll(vars, Box::new(body))
    }
}

fn conj(mut parts: Vec<MonadicFormula>) -> MonadicFormula {
    match parts.len() {
        0 => TrueF,
        1 => parts.pop().unwrap(),
        _ => And(parts),
    }
}

/// A translated theory: the predicate table, one semantic axiom per table
/// entry, and the per-literal goals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonadicTheory {
    /// One entry per distinct subexpression, in first-occurrence post-order.
    pub predicates: Vec<SetExpr>,
    pub axioms: Vec<MonadicFormula>,
    pub goals: Vec<MonadicFormula>,
}

/// The semantic axiom for P_E, by E's head.
///
/// Top is total, Bot is empty, a variable is unconstrained, the connectives
/// mirror their boolean meaning pointwise, and an application predicate
/// holds of f-images exactly when the argument predicates hold of the
/// arguments, and of no other symbol's image.
///
/// Panics if `e` contains a projection; eliminate projections first.
pub fn expr_predicate_axiom(e: &SetExpr, sig: &Signature) -> MonadicFormula {
    let x = Term::Var("x".to_string());
    let one = vec!["x".to_string()];
    match e {
        SetExpr::Top => forall(one, MonadicFormula::pred(e, x)),
        SetExpr::Bot => forall(one, Not(Box::new(MonadicFormula::pred(e, x)))),
        SetExpr::Var(_) => TrueF,
        SetExpr::Inter(a, b) => forall(
            one,
            Iff(
                Box::new(MonadicFormula::pred(e, x.clone())),
                Box::new(And(vec![
                    MonadicFormula::pred(a, x.clone()),
                    MonadicFormula::pred(b, x),
                ])),
            ),
        ),
        SetExpr::Union(a, b) => forall(
            one,
            Iff(
                Box::new(MonadicFormula::pred(e, x.clone())),
                Box::new(Or(vec![
                    MonadicFormula::pred(a, x.clone()),
                    MonadicFormula::pred(b, x),
                ])),
            ),
        ),
        SetExpr::Neg(a) => forall(
            one,
            Iff(
                Box::new(MonadicFormula::pred(e, x.clone())),
                Box::new(Not(Box::new(MonadicFormula::pred(a, x)))),
            ),
        ),
        SetExpr::App(f, args) => {
            let mut clauses = Vec::new();
            for g in sig.symbols() {
                let vars: Vec<String> =
                    (1..=g.arity).map(|i| format!("x{i}")).collect();
                let terms: Vec<Term> =
                    vars.iter().map(|v| Term::Var(v.clone())).collect();
                let image = Term::App(g.clone(), terms.clone());
                let rhs = if g == f {
                    conj(
                        args.iter()
                            .zip(&terms)
                            .map(|(arg, t)| MonadicFormula::pred(arg, t.clone()))
                            .collect(),
                    )
                } else {
                    FalseF
                };
                clauses.push(forall(
                    vars,
                    Iff(Box::new(MonadicFormula::pred(e, image)), Box::new(rhs)),
                ));
            }
            conj(clauses)
        }
        SetExpr::Proj(..) => {
            unreachable!("projections must be eliminated before translation")
        }
    }
}

/// All distinct subexpressions of the atoms, first occurrence in a
/// left-to-right post-order walk.
fn collect_subexprs(atoms: &[&Atom]) -> Vec<SetExpr> {
    let mut out: Vec<SetExpr> = Vec::new();
    fn visit(e: &SetExpr, out: &mut Vec<SetExpr>) {
        match e {
            SetExpr::Top | SetExpr::Bot | SetExpr::Var(_) => {}
            SetExpr::Union(a, b) | SetExpr::Inter(a, b) => {
                visit(a, out);
                visit(b, out);
            }
            SetExpr::Neg(a) => visit(a, out),
            SetExpr::App(_, args) => {
                for a in args {
                    visit(a, out);
                }
            }
            SetExpr::Proj(..) => {
                unreachable!("projections must be eliminated before translation")
            }
        }
        if !out.contains(e) {
            out.push(e.clone());
        }
    }
    for a in atoms {
        visit(&a.lhs, &mut out);
        visit(&a.rhs, &mut out);
    }
    out
}

fn positive_goal(a: &Atom) -> MonadicFormula {
    let x = Term::Var("x".to_string());
    ForAll(
        vec!["x".to_string()],
        Box::new(Implies(
            Box::new(MonadicFormula::pred(&a.lhs, x.clone())),
            Box::new(MonadicFormula::pred(&a.rhs, x)),
        )),
    )
}

fn negative_goal(a: &Atom) -> MonadicFormula {
    let y = Term::Var("y".to_string());
    Exists(
        vec!["y".to_string()],
        Box::new(And(vec![
            MonadicFormula::pred(&a.lhs, y.clone()),
            Not(Box::new(MonadicFormula::pred(&a.rhs, y))),
        ])),
    )
}

/// Translates a conjunction of literals. `true` polarity means the
/// inclusion holds, `false` that it fails.
///
/// The axiom list is aligned with the predicate table: `axioms[i]` is the
/// semantic axiom for `predicates[i]` (literally `true` for variables).
pub fn conjunction_to_monadic(
    literals: &[(Atom, bool)],
    sig: &Signature,
) -> MonadicTheory {
    let atoms: Vec<&Atom> = literals.iter().map(|(a, _)| a).collect();
    let predicates = collect_subexprs(&atoms);
    let axioms = predicates
        .iter()
        .map(|e| expr_predicate_axiom(e, sig))
        .collect();
    let goals = literals
        .iter()
        .map(|(a, pos)| if *pos { positive_goal(a) } else { negative_goal(a) })
        .collect();
    MonadicTheory { predicates, axioms, goals }
}

/// Translates an arbitrary constraint formula: the boolean structure is
/// carried into a single goal, with inclusion atoms becoming the quantified
/// predicate forms (a negated atom directly takes the witnessed form).
pub fn formula_to_monadic(c: &Formula, sig: &Signature) -> MonadicTheory {
    let atoms: Vec<&Atom> = c.atoms();
    let predicates = collect_subexprs(&atoms);
    let axioms = predicates
        .iter()
        .map(|e| expr_predicate_axiom(e, sig))
        .collect();
    fn goal(c: &Formula) -> MonadicFormula {
        match c {
            Formula::Atom(a) => positive_goal(a),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(a) => negative_goal(a),
                other => Not(Box::new(goal(other))),
            },
            Formula::And(a, b) => And(vec![goal(a), goal(b)]),
            Formula::Or(a, b) => Or(vec![goal(a), goal(b)]),
        }
    }
    MonadicTheory { predicates, axioms, goals: vec![goal(c)] }
}

/// Whether a predicate for this expression survives reduction.
fn is_atomic(e: &SetExpr) -> bool {
    matches!(e, SetExpr::Var(_) | SetExpr::App(..))
}

/// P_E(t) with E's connectives unfolded down to variable and application
/// predicates.
fn expand(e: &SetExpr, t: &Term) -> MonadicFormula {
    match e {
        SetExpr::Top => TrueF,
        SetExpr::Bot => FalseF,
        SetExpr::Var(_) | SetExpr::App(..) => MonadicFormula::pred(e, t.clone()),
        SetExpr::Inter(a, b) => And(vec![expand(a, t), expand(b, t)]),
        SetExpr::Union(a, b) => Or(vec![expand(a, t), expand(b, t)]),
        SetExpr::Neg(a) => Not(Box::new(expand(a, t))),
        SetExpr::Proj(..) => {
            unreachable!("projections must be eliminated before translation")
        }
    }
}

fn expand_in(m: &MonadicFormula) -> MonadicFormula {
    match m {
        Pred(e, t) => expand(e, t),
        TrueF => TrueF,
        FalseF => FalseF,
        And(xs) => And(xs.iter().map(expand_in).collect()),
        Or(xs) => Or(xs.iter().map(expand_in).collect()),
        Not(a) => Not(Box::new(expand_in(a))),
        Implies(a, b) => Implies(Box::new(expand_in(a)), Box::new(expand_in(b))),
        Iff(a, b) => Iff(Box::new(expand_in(a)), Box::new(expand_in(b))),
        ForAll(v, b) => ForAll(v.clone(), Box::new(expand_in(b))),
        Exists(v, b) => Exists(v.clone(), Box::new(expand_in(b))),
    }
}

/// Bottom-up constant folding and light resugaring: boolean units collapse,
/// double negation cancels, an equivalence with a constant side becomes the
/// other side or its negation, and a two-part disjunction led by a negation
/// reads back as an implication.
fn fold(m: &MonadicFormula) -> MonadicFormula {
    match m {
        Pred(..) | TrueF | FalseF => m.clone(),
        And(xs) => {
            let mut parts = Vec::new();
            for x in xs {
                match fold(x) {
                    TrueF => {}
                    FalseF => return FalseF,
                    And(inner) => parts.extend(inner),
                    other => parts.push(other),
                }
            }
            conj(parts)
        }
        Or(xs) => {
            let mut parts = Vec::new();
            for x in xs {
                match fold(x) {
                    FalseF => {}
                    TrueF => return TrueF,
                    Or(inner) => parts.extend(inner),
                    other => parts.push(other),
                }
            }
            match parts.len() {
                0 => FalseF,
                1 => parts.pop().unwrap(),
                2 => {
                    if let Not(a) = &parts[0] {
                        Implies(a.clone(), Box::new(parts[1].clone()))
                    } else {
                        Or(parts)
                    }
                }
                _ => Or(parts),
            }
        }
        Not(a) => match fold(a) {
            TrueF => FalseF,
            FalseF => TrueF,
            Not(inner) => *inner,
            other => Not(Box::new(other)),
        },
        Implies(a, b) => match (fold(a), fold(b)) {
            (TrueF, fb) => fb,
            (_, TrueF) => TrueF,
            (FalseF, _) => TrueF,
            (fa, FalseF) => fold(&Not(Box::new(fa))),
            (fa, fb) => Implies(Box::new(fa), Box::new(fb)),
        },
        Iff(a, b) => match (fold(a), fold(b)) {
            (TrueF, fb) => fb,
            (fa, TrueF) => fa,
            (FalseF, fb) => fold(&Not(Box::new(fb))),
            (fa, FalseF) => fold(&Not(Box::new(fa))),
            (fa, fb) => Iff(Box::new(fa), Box::new(fb)),
        },
        // Domains are nonempty, so a constant body absorbs the quantifier.
        ForAll(v, b) => match fold(b) {
            TrueF => TrueF,
            FalseF => FalseF,
            other => ForAll(v.clone(), Box::new(other)),
        },
        Exists(v, b) => match fold(b) {
            TrueF => TrueF,
            FalseF => FalseF,
            other => Exists(v.clone(), Box::new(other)),
        },
    }
}

/// Inlines the connective predicates into their definitions, keeping only
/// variable and application predicates.
///
/// The equivalence axioms define the dropped predicates uniquely in any
/// model, so satisfiability is preserved. What remains is the readable form:
/// per-application image clauses plus the goals over atomic predicates.
pub fn reduce_theory(t: &MonadicTheory, sig: &Signature) -> MonadicTheory {
    let predicates: Vec<SetExpr> =
        t.predicates.iter().filter(|e| is_atomic(e)).cloned().collect();
    let mut axioms = Vec::new();
    for e in &predicates {
        if let SetExpr::App(..) = e {
            // Re-derive the image clauses with argument predicates unfolded,
            // one clause per signature symbol.
            match fold(&expand_in(&expr_predicate_axiom(e, sig))) {
                TrueF => {}
                And(parts) => axioms.extend(parts),
                one => axioms.push(one),
            }
        }
    }
    let goals = t.goals.iter().map(|g| fold(&expand_in(g))).collect();
    MonadicTheory { predicates, axioms, goals }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("predicate count {0} exceeds the 62-bit model bound")]
pub struct BoundOverflow(pub usize);

/// The finite-model bound 2^N for a theory with N predicates.
pub fn model_bound(t: &MonadicTheory) -> Result<u64, BoundOverflow> {
    let n = t.predicates.len();
    if n > 62 {
        return Err(BoundOverflow(n));
    }
    Ok(1u64 << n)
}

/// Renders the theory in prefix notation: the predicate table with numbered
/// names, then one `(axiom ...)` per table entry, then one `(goal ...)` per
/// literal.
pub fn print_theory(t: &MonadicTheory) -> String {
    use crate::constraints::print_expr;
    let mut s = String::new();
    s.push_str("(predicates");
    if t.predicates.is_empty() {
        s.push(')');
    } else {
        for (i, e) in t.predicates.iter().enumerate() {
            s.push_str(&format!("\n  (P{i} {})", print_expr(e)));
        }
        s.push_str(")");
    }
    s.push('\n');
    for ax in &t.axioms {
        s.push_str(&format!("(axiom {})\n", print_monadic(ax, t)));
    }
    for g in &t.goals {
        s.push_str(&format!("(goal {})\n", print_monadic(g, t)));
    }
    s
}

fn print_term(t: &Term) -> String {
    match t {
        Term::Var(v) => v.clone(),
        Term::App(f, args) => {
            if args.is_empty() {
                format!("({})", f.name)
            } else {
                format!("({} {})", f.name, args.iter().map(print_term).join(" "))
            }
        }
    }
}

fn print_monadic(m: &MonadicFormula, t: &MonadicTheory) -> String {
    match m {
        Pred(e, term) => {
            let i = t
                .predicates
                .iter()
                .position(|p| p == e.as_ref())
                .expect("predicate missing from table");
            format!("(P{i} {})", print_term(term))
        }
        TrueF => "true".to_string(),
        FalseF => "false".to_string(),
        And(xs) => format!("(and {})", xs.iter().map(|x| print_monadic(x, t)).join(" ")),
        Or(xs) => format!("(or {})", xs.iter().map(|x| print_monadic(x, t)).join(" ")),
        Not(a) => format!("(not {})", print_monadic(a, t)),
        Implies(a, b) => {
            format!("(=> {} {})", print_monadic(a, t), print_monadic(b, t))
        }
        Iff(a, b) => format!("(iff {} {})", print_monadic(a, t), print_monadic(b, t)),
        ForAll(v, b) => {
            format!("(forall ({}) {})", v.join(" "), print_monadic(b, t))
        }
        Exists(v, b) => {
            format!("(exists ({}) {})", v.join(" "), print_monadic(b, t))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::parse_constraint_file;

    fn sig2() -> Signature {
        let mut sig = Signature::default();
        sig.push(FuncSym { name: "Circle".into(), arity: 1 });
        sig.push(FuncSym { name: "Square".into(), arity: 1 });
        sig
    }

    fn circle_top() -> SetExpr {
        SetExpr::app(
            FuncSym { name: "Circle".into(), arity: 1 },
            vec![SetExpr::Top],
        )
    }

    #[test]
    fn variable_axiom_is_trivial() {
        assert_eq!(
            expr_predicate_axiom(&SetExpr::var("X"), &sig2()),
            TrueF
        );
    }

    #[test]
    fn application_axiom_covers_every_symbol() {
        // P holds of Circle-images iff the argument is in ⊤, and of no
        // Square-image.
        let ax = expr_predicate_axiom(&circle_top(), &sig2());
        let x1 = || Term::Var("x1".to_string());
        let expected = And(vec![
            ForAll(
                vec!["x1".into()],
                Box::new(Iff(
                    Box::new(MonadicFormula::pred(
                        &circle_top(),
                        Term::App(
                            FuncSym { name: "Circle".into(), arity: 1 },
                            vec![x1()],
                        ),
                    )),
                    Box::new(MonadicFormula::pred(&SetExpr::Top, x1())),
                )),
            ),
            ForAll(
                vec!["x1".into()],
                Box::new(Iff(
                    Box::new(MonadicFormula::pred(
                        &circle_top(),
                        Term::App(
                            FuncSym { name: "Square".into(), arity: 1 },
                            vec![x1()],
                        ),
                    )),
                    Box::new(FalseF),
                )),
            ),
        ]);
        assert_eq!(ax, expected);
    }

    #[test]
    fn intersection_axiom_is_pointwise_conjunction() {
        let e = SetExpr::inter(SetExpr::var("A"), SetExpr::var("B"));
        let x = || Term::Var("x".to_string());
        assert_eq!(
            expr_predicate_axiom(&e, &sig2()),
            ForAll(
                vec!["x".into()],
                Box::new(Iff(
                    Box::new(MonadicFormula::pred(&e, x())),
                    Box::new(And(vec![
                        MonadicFormula::pred(&SetExpr::var("A"), x()),
                        MonadicFormula::pred(&SetExpr::var("B"), x()),
                    ])),
                )),
            )
        );
    }

    #[test]
    fn top_in_bot_theory_has_forcing_axioms() {
        let lit = (Atom { lhs: SetExpr::Top, rhs: SetExpr::Bot }, true);
        let t = conjunction_to_monadic(&[lit], &Signature::default());
        assert_eq!(t.predicates, vec![SetExpr::Top, SetExpr::Bot]);
        let x = || Term::Var("x".to_string());
        assert_eq!(
            t.axioms,
            vec![
                ForAll(
                    vec!["x".into()],
                    Box::new(MonadicFormula::pred(&SetExpr::Top, x()))
                ),
                ForAll(
                    vec!["x".into()],
                    Box::new(Not(Box::new(MonadicFormula::pred(&SetExpr::Bot, x()))))
                ),
            ]
        );
        assert_eq!(
            t.goals,
            vec![ForAll(
                vec!["x".into()],
                Box::new(Implies(
                    Box::new(MonadicFormula::pred(&SetExpr::Top, x())),
                    Box::new(MonadicFormula::pred(&SetExpr::Bot, x())),
                )),
            )]
        );
    }

    #[test]
    fn empty_conjunction_is_vacuous() {
        let t = conjunction_to_monadic(&[], &Signature::default());
        assert!(t.predicates.is_empty());
        assert!(t.goals.is_empty());
        assert_eq!(model_bound(&t), Ok(1));
    }

    #[test]
    fn subexpressions_are_deduplicated() {
        let e = SetExpr::inter(SetExpr::var("X"), SetExpr::var("Y"));
        let lit = (Atom { lhs: e.clone(), rhs: e }, true);
        let t = conjunction_to_monadic(&[lit], &Signature::default());
        assert_eq!(t.predicates.len(), 3);
        assert_eq!(model_bound(&t), Ok(8));
        // Axioms stay aligned with the table.
        assert_eq!(t.axioms.len(), t.predicates.len());
    }

    #[test]
    fn model_bound_overflows_past_62() {
        let lits: Vec<(Atom, bool)> = (0..63)
            .map(|i| {
                let v = SetExpr::var(&format!("X{i}"));
                (Atom { lhs: v.clone(), rhs: v }, true)
            })
            .collect();
        let t = conjunction_to_monadic(&lits, &Signature::default());
        assert_eq!(t.predicates.len(), 63);
        assert_eq!(model_bound(&t), Err(BoundOverflow(63)));
    }

    #[test]
    fn nullary_symbols_translate_without_binders() {
        let mut sig = Signature::default();
        sig.push(FuncSym { name: "a".into(), arity: 0 });
        sig.push(FuncSym { name: "b".into(), arity: 0 });
        let a_app = SetExpr::app(FuncSym { name: "a".into(), arity: 0 }, vec![]);
        let ax = expr_predicate_axiom(&a_app, &sig);
        let term_a = Term::App(FuncSym { name: "a".into(), arity: 0 }, vec![]);
        let term_b = Term::App(FuncSym { name: "b".into(), arity: 0 }, vec![]);
        assert_eq!(
            ax,
            And(vec![
                Iff(
                    Box::new(MonadicFormula::pred(&a_app, term_a)),
                    Box::new(TrueF)
                ),
                Iff(
                    Box::new(MonadicFormula::pred(&a_app, term_b)),
                    Box::new(FalseF)
                ),
            ])
        );
    }

    #[test]
    fn reduction_of_the_guarded_implication_example() {
        // (V1 ∩ Circle(⊤) ∩ ¬Square(⊤) ⊄ ⊥) ⇒ ⊤ ⊆ V2 reduces to the four
        // image clauses plus one implication goal over atomic predicates.
        let (sig, c) = parse_constraint_file(
            "(declare-fun Circle 1)(declare-fun Square 1)\
             (assert (=> (not (subset (inter (var V1) (Circle top) (neg (Square top))) bot)) \
                         (subset top (var V2))))",
        )
        .unwrap();
        let reduced = reduce_theory(&formula_to_monadic(&c, &sig), &sig);

        let square_top = SetExpr::app(
            FuncSym { name: "Square".into(), arity: 1 },
            vec![SetExpr::Top],
        );
        assert_eq!(
            reduced.predicates,
            vec![
                SetExpr::var("V1"),
                circle_top(),
                square_top.clone(),
                SetExpr::var("V2"),
            ]
        );

        let x1 = || Term::Var("x1".to_string());
        let circle_of = |t: Term| {
            Term::App(FuncSym { name: "Circle".into(), arity: 1 }, vec![t])
        };
        let square_of = |t: Term| {
            Term::App(FuncSym { name: "Square".into(), arity: 1 }, vec![t])
        };
        assert_eq!(
            reduced.axioms,
            vec![
                ForAll(
                    vec!["x1".into()],
                    Box::new(MonadicFormula::pred(&circle_top(), circle_of(x1())))
                ),
                ForAll(
                    vec!["x1".into()],
                    Box::new(Not(Box::new(MonadicFormula::pred(
                        &circle_top(),
                        square_of(x1())
                    ))))
                ),
                // Clauses follow signature order within each predicate, so
                // the foreign Circle clause precedes the Square image one.
                ForAll(
                    vec!["x1".into()],
                    Box::new(Not(Box::new(MonadicFormula::pred(
                        &square_top,
                        circle_of(x1())
                    ))))
                ),
                ForAll(
                    vec!["x1".into()],
                    Box::new(MonadicFormula::pred(&square_top, square_of(x1())))
                ),
            ]
        );

        let y = || Term::Var("y".to_string());
        let x = || Term::Var("x".to_string());
        assert_eq!(
            reduced.goals,
            vec![Implies(
                Box::new(Exists(
                    vec!["y".into()],
                    Box::new(And(vec![
                        MonadicFormula::pred(&SetExpr::var("V1"), y()),
                        MonadicFormula::pred(&circle_top(), y()),
                        Not(Box::new(MonadicFormula::pred(&square_top, y()))),
                    ])),
                )),
                Box::new(ForAll(
                    vec!["x".into()],
                    Box::new(MonadicFormula::pred(&SetExpr::var("V2"), x())),
                )),
            )]
        );
    }

    #[test]
    fn printing_is_stable() {
        let lit = (
            Atom { lhs: SetExpr::var("X"), rhs: SetExpr::Top },
            false,
        );
        let t = conjunction_to_monadic(&[lit], &Signature::default());
        assert_eq!(
            print_theory(&t),
            "(predicates\n  (P0 (var X))\n  (P1 top))\n\
             (axiom true)\n\
             (axiom (forall (x) (P1 x)))\n\
             (goal (exists (y) (and (P0 y) (not (P1 y)))))\n"
        );
    }
}
