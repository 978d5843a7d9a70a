//! Script construction for conjunctions of literals and for arbitrary
//! boolean combinations.
//!
//! Layout is fixed and deterministic: logic; `inDomain`; one unknown
//! bit-function per symbol × variable base; one assembler per symbol; one
//! constant per arity-0 symbol; witness constants; literal-guess booleans
//! (general form only); then assertions in the order constant facts and
//! closures (signature order), optional image axiom, per-literal goals, and
//! finally the boolean skeleton. Emitted auxiliary names start with `$` or
//! derive from user names; collisions are resolved by appending `$k`.

use super::{compile_predicate, BoolTerm, Decl, SeqTerm, SmtScript};
use crate::constraints::{Atom, Formula, PredicateIndex, SetExpr, Signature};
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    /// N=0 admits no bit-vector sort; callers decide such formulas directly.
    #[error("cannot encode with zero base predicates (bit width 0)")]
    ZeroWidth,
}

/// Emission options; the default matches the solver pipeline's default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeOptions {
    /// `(set-logic …)` tag; quantified bit vectors with uninterpreted
    /// functions by default, overridable for solvers that reject the tag.
    pub logic: String,
    pub get_model: bool,
    /// Additionally assert that every domain element lies in some symbol's
    /// image. Off by default: the plain translation does not force it.
    pub image_axiom: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions { logic: "UFBV".into(), get_model: false, image_axiom: false }
    }
}

/// Deterministic name allocation with collision avoidance.
struct Names {
    taken: HashSet<String>,
}

impl Names {
    fn new() -> Self {
        Names { taken: HashSet::new() }
    }

    fn alloc(&mut self, base: String) -> String {
        let mut candidate = base.clone();
        let mut k = 1usize;
        while !self.taken.insert(candidate.clone()) {
            candidate = format!("{base}${k}");
            k += 1;
        }
        candidate
    }
}

/// Structural part shared by both encoders: declarations for `inDomain`,
/// unknowns, assemblers, arity-0 constants, and the constant/closure
/// assertions.
struct Skeleton {
    decls: Vec<Decl>,
    assertions: Vec<BoolTerm>,
    in_domain: String,
    names: Names,
}

fn build_skeleton(sig: &Signature, idx: &PredicateIndex, opts: &EncodeOptions) -> Skeleton {
    let n = idx.len();
    let mut names = Names::new();
    let mut decls = Vec::new();

    let in_domain = names.alloc("inDomain".into());
    decls.push(Decl::BoolFun { name: in_domain.clone(), arity: 1, width: n });

    // Unknown bit functions: symbol order, then variable position order.
    let var_positions = idx.var_positions();
    let mut uf_names: Vec<Vec<String>> = Vec::new();
    for f in sig.symbols() {
        let mut per_var = Vec::new();
        for &(_, var) in &var_positions {
            let name = names.alloc(format!("{}_{var}", f.name));
            decls.push(Decl::BoolFun { name: name.clone(), arity: f.arity, width: n });
            per_var.push(name);
        }
        uf_names.push(per_var);
    }

    // Assemblers.
    let mut asm_names = Vec::new();
    for (fi, f) in sig.symbols().iter().enumerate() {
        let name = names.alloc(format!("{}_smt", f.name));
        let params: Vec<String> = (1..=f.arity).map(|j| format!("$b{j}")).collect();
        let param_terms: Vec<SeqTerm> =
            params.iter().map(|p| SeqTerm::name(p.clone())).collect();
        let bits: Vec<BoolTerm> = idx
            .bases()
            .iter()
            .enumerate()
            .map(|(pos, base)| match base {
                SetExpr::Var(_) => {
                    let vi = var_positions
                        .iter()
                        .position(|&(p, _)| p == pos)
                        .expect("variable base not in var_positions");
                    BoolTerm::UFApp(uf_names[fi][vi].clone(), param_terms.clone())
                }
                SetExpr::App(head, args) => {
                    if head == f {
                        BoolTerm::And(
                            args.iter()
                                .zip(&param_terms)
                                .map(|(arg, p)| compile_predicate(arg, idx, p))
                                .collect(),
                        )
                    } else {
                        BoolTerm::Lit(false)
                    }
                }
                _ => unreachable!("bases are variables or applications"),
            })
            .collect();
        decls.push(Decl::Assembler { name: name.clone(), params, width: n, bits });
        asm_names.push(name);
    }

    // Arity-0 constants.
    let mut const_names: Vec<Option<String>> = Vec::new();
    for f in sig.symbols() {
        if f.arity == 0 {
            let name = names.alloc(f.name.clone());
            decls.push(Decl::SeqConst { name: name.clone(), width: n });
            const_names.push(Some(name));
        } else {
            const_names.push(None);
        }
    }

    // Constant facts and closure assertions, signature order.
    let mut assertions = Vec::new();
    for (fi, f) in sig.symbols().iter().enumerate() {
        if f.arity == 0 {
            let c = SeqTerm::name(const_names[fi].clone().unwrap());
            let asm = SeqTerm::Call(asm_names[fi].clone(), vec![]);
            assertions.push(BoolTerm::SeqEq(c.clone(), asm));
            assertions.push(BoolTerm::UFApp(in_domain.clone(), vec![c]));
        } else {
            let binders: Vec<(String, usize)> =
                (1..=f.arity).map(|j| (format!("$x{j}"), n)).collect();
            let args: Vec<SeqTerm> =
                binders.iter().map(|(b, _)| SeqTerm::name(b.clone())).collect();
            let guard = BoolTerm::And(
                args.iter()
                    .map(|a| BoolTerm::UFApp(in_domain.clone(), vec![a.clone()]))
                    .collect(),
            );
            let image = SeqTerm::Call(asm_names[fi].clone(), args);
            assertions.push(BoolTerm::Forall(
                binders,
                Box::new(BoolTerm::implies(
                    guard,
                    BoolTerm::UFApp(in_domain.clone(), vec![image]),
                )),
            ));
        }
    }

    if opts.image_axiom {
        let x = SeqTerm::name("$x");
        let disjuncts: Vec<BoolTerm> = sig
            .symbols()
            .iter()
            .enumerate()
            .map(|(fi, f)| {
                if f.arity == 0 {
                    BoolTerm::SeqEq(x.clone(), SeqTerm::Call(asm_names[fi].clone(), vec![]))
                } else {
                    let binders: Vec<(String, usize)> =
                        (1..=f.arity).map(|j| (format!("$x{j}"), n)).collect();
                    let args: Vec<SeqTerm> =
                        binders.iter().map(|(b, _)| SeqTerm::name(b.clone())).collect();
                    let guard = BoolTerm::And(
                        args.iter()
                            .map(|a| BoolTerm::UFApp(in_domain.clone(), vec![a.clone()]))
                            .collect(),
                    );
                    let image = SeqTerm::Call(asm_names[fi].clone(), args);
                    BoolTerm::Exists(
                        binders,
                        Box::new(BoolTerm::And(vec![
                            guard,
                            BoolTerm::SeqEq(x.clone(), image),
                        ])),
                    )
                }
            })
            .collect();
        assertions.push(BoolTerm::Forall(
            vec![("$x".into(), n)],
            Box::new(BoolTerm::implies(
                BoolTerm::UFApp(in_domain.clone(), vec![x]),
                BoolTerm::Or(disjuncts),
            )),
        ));
    }

    Skeleton { decls, assertions, in_domain, names }
}

/// The ∀ goal for a positive inclusion.
fn forall_goal(atom: &Atom, idx: &PredicateIndex, in_domain: &str, n: usize) -> BoolTerm {
    let x = SeqTerm::name("$x");
    BoolTerm::Forall(
        vec![("$x".into(), n)],
        Box::new(BoolTerm::implies(
            BoolTerm::And(vec![
                BoolTerm::UFApp(in_domain.into(), vec![x.clone()]),
                compile_predicate(&atom.lhs, idx, &x),
            ]),
            compile_predicate(&atom.rhs, idx, &x),
        )),
    )
}

/// The witnessed counterexample for a negated inclusion.
fn witness_goal(atom: &Atom, idx: &PredicateIndex, in_domain: &str, witness: &str) -> BoolTerm {
    let y = SeqTerm::name(witness);
    BoolTerm::And(vec![
        BoolTerm::UFApp(in_domain.into(), vec![y.clone()]),
        compile_predicate(&atom.lhs, idx, &y),
        BoolTerm::not(compile_predicate(&atom.rhs, idx, &y)),
    ])
}

/// Encodes a conjunction of literals `(atom, positive)`.
pub fn encode_conjunction(
    literals: &[(&Atom, bool)],
    sig: &Signature,
    idx: &PredicateIndex,
    opts: &EncodeOptions,
) -> Result<SmtScript, EncodeError> {
    let n = idx.len();
    if n == 0 {
        return Err(EncodeError::ZeroWidth);
    }
    let mut sk = build_skeleton(sig, idx, opts);

    // One witness constant per negative literal, in literal order.
    let mut witness_names = Vec::new();
    for (i, (_, positive)) in literals.iter().enumerate() {
        if !positive {
            let name = sk.names.alloc(format!("$y{}", witness_names.len() + 1));
            sk.decls.push(Decl::SeqConst { name: name.clone(), width: n });
            witness_names.push((i, name));
        }
    }

    for (i, (atom, positive)) in literals.iter().enumerate() {
        if *positive {
            sk.assertions.push(forall_goal(atom, idx, &sk.in_domain, n));
        } else {
            let (_, wname) = witness_names
                .iter()
                .find(|(li, _)| *li == i)
                .expect("witness allocated for every negative literal");
            sk.assertions.push(witness_goal(atom, idx, &sk.in_domain, wname));
        }
    }

    Ok(SmtScript {
        bit_width: n,
        logic: opts.logic.clone(),
        decls: sk.decls,
        assertions: sk.assertions,
        get_model: opts.get_model,
    })
}

/// Encodes an arbitrary boolean combination of inclusions.
///
/// A pure conjunction of literals is delegated to [`encode_conjunction`]
/// unchanged. Otherwise each distinct atom gets a guess boolean and a
/// witness constant; the atom's ∀ form is asserted under the guess, its
/// witnessed negation under the guess's negation, and the formula's boolean
/// skeleton is asserted over the guesses.
pub fn encode_formula(
    c: &Formula,
    sig: &Signature,
    idx: &PredicateIndex,
    opts: &EncodeOptions,
) -> Result<SmtScript, EncodeError> {
    if let Some(literals) = c.as_literal_conjunction() {
        return encode_conjunction(&literals, sig, idx, opts);
    }
    let n = idx.len();
    if n == 0 {
        return Err(EncodeError::ZeroWidth);
    }
    let mut sk = build_skeleton(sig, idx, opts);

    let atoms = distinct_atoms(c);
    let mut witness_names = Vec::new();
    for i in 1..=atoms.len() {
        let name = sk.names.alloc(format!("$y{i}"));
        sk.decls.push(Decl::SeqConst { name: name.clone(), width: n });
        witness_names.push(name);
    }
    let mut guess_names = Vec::new();
    for i in 1..=atoms.len() {
        let name = sk.names.alloc(format!("$l{i}"));
        sk.decls.push(Decl::BoolConst { name: name.clone() });
        guess_names.push(name);
    }

    for (k, atom) in atoms.iter().enumerate() {
        let guess = BoolTerm::Ref(guess_names[k].clone());
        sk.assertions.push(BoolTerm::implies(
            guess.clone(),
            forall_goal(atom, idx, &sk.in_domain, n),
        ));
        sk.assertions.push(BoolTerm::implies(
            BoolTerm::not(guess),
            witness_goal(atom, idx, &sk.in_domain, &witness_names[k]),
        ));
    }
    sk.assertions.push(skeleton_of(c, &atoms, &guess_names));

    Ok(SmtScript {
        bit_width: n,
        logic: opts.logic.clone(),
        decls: sk.decls,
        assertions: sk.assertions,
        get_model: opts.get_model,
    })
}

fn distinct_atoms(c: &Formula) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::new();
    for a in c.atoms() {
        if !out.iter().any(|x| x == a) {
            out.push(a.clone());
        }
    }
    out
}

/// The formula's boolean structure with every atom replaced by its guess.
fn skeleton_of(c: &Formula, atoms: &[Atom], guesses: &[String]) -> BoolTerm {
    match c {
        Formula::Atom(a) => {
            let k = atoms.iter().position(|x| x == a).expect("atom indexed");
            BoolTerm::Ref(guesses[k].clone())
        }
        Formula::And(a, b) => BoolTerm::And(vec![
            skeleton_of(a, atoms, guesses),
            skeleton_of(b, atoms, guesses),
        ]),
        Formula::Or(a, b) => BoolTerm::Or(vec![
            skeleton_of(a, atoms, guesses),
            skeleton_of(b, atoms, guesses),
        ]),
        Formula::Not(a) => BoolTerm::not(skeleton_of(a, atoms, guesses)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{index_base_predicates, parse_constraint_file};

    fn setup(src: &str) -> (Signature, Formula, PredicateIndex) {
        let (sig, c) = parse_constraint_file(src).unwrap();
        let idx = index_base_predicates(&c);
        (sig, c, idx)
    }

    #[test]
    fn zero_width_is_an_error() {
        let (sig, c, idx) = setup("(assert (subset top bot))");
        let err = encode_formula(&c, &sig, &idx, &EncodeOptions::default()).unwrap_err();
        assert_eq!(err, EncodeError::ZeroWidth);
    }

    #[test]
    fn conjunction_layout() {
        // X ⊆ a(): N=2, constant a, one ∀ goal
        let (sig, c, idx) =
            setup("(declare-fun a 0)(assert (subset (var X) (a)))");
        let script = encode_formula(&c, &sig, &idx, &EncodeOptions::default()).unwrap();
        assert_eq!(script.bit_width, 2);
        let text = script.to_smtlib();
        assert!(text.starts_with("(set-logic UFBV)\n"), "{text}");
        assert!(text.contains("(declare-fun inDomain ((_ BitVec 2)) Bool)"), "{text}");
        assert!(text.contains("(declare-fun a_X () Bool)"), "{text}");
        assert!(text.contains("(define-fun a_smt () (_ BitVec 2)"), "{text}");
        assert!(text.contains("(declare-const a (_ BitVec 2))"), "{text}");
        assert!(text.contains("(assert (= a a_smt))"), "{text}");
        assert!(text.contains("(assert (inDomain a))"), "{text}");
        assert!(text.contains("(forall (($x (_ BitVec 2)))"), "{text}");
        assert!(text.ends_with("(check-sat)\n"), "{text}");
        assert!(!text.contains("$l"), "no guesses on conjunctions: {text}");
    }

    #[test]
    fn negative_literal_gets_witness() {
        let (sig, c, idx) = setup(
            "(declare-fun a 0)\
             (assert (subset (var X) (a)))(assert (not (subset (var X) bot)))",
        );
        let script = encode_formula(&c, &sig, &idx, &EncodeOptions::default()).unwrap();
        let text = script.to_smtlib();
        assert!(text.contains("(declare-const $y1 (_ BitVec 2))"), "{text}");
        assert!(text.contains("(assert (and (inDomain $y1)"), "{text}");
    }

    #[test]
    fn delegation_is_byte_identical() {
        let (sig, c, idx) = setup(
            "(declare-fun f 1)\
             (assert (subset (var X) (f top)))(assert (not (subset (var X) bot)))",
        );
        let via_formula =
            encode_formula(&c, &sig, &idx, &EncodeOptions::default()).unwrap();
        let lits = c.as_literal_conjunction().unwrap();
        let via_conj =
            encode_conjunction(&lits, &sig, &idx, &EncodeOptions::default()).unwrap();
        assert_eq!(via_formula.to_smtlib(), via_conj.to_smtlib());
    }

    #[test]
    fn general_form_declares_guesses_and_skeleton() {
        let (sig, c, idx) = setup(
            "(declare-fun a 0)\
             (assert (or (subset (var X) (var Y)) (not (subset (var Y) (var X)))))",
        );
        let script = encode_formula(&c, &sig, &idx, &EncodeOptions::default()).unwrap();
        let text = script.to_smtlib();
        assert!(text.contains("(declare-const $l1 Bool)"), "{text}");
        assert!(text.contains("(declare-const $l2 Bool)"), "{text}");
        assert!(text.contains("(assert (=> $l1 (forall"), "{text}");
        assert!(text.contains("(assert (=> (not $l1) (and (inDomain $y1)"), "{text}");
        assert!(text.contains("(assert (or $l1 (not $l2)))"), "{text}");
    }

    #[test]
    fn duplicate_atoms_share_one_guess() {
        let (sig, c, idx) = setup(
            "(declare-fun a 0)\
             (assert (or (subset (var X) bot) (subset (var X) bot)))\
             (assert (not (subset (var Y) (var X))))",
        );
        let script = encode_formula(&c, &sig, &idx, &EncodeOptions::default()).unwrap();
        let text = script.to_smtlib();
        assert!(text.contains("$l2"), "{text}");
        assert!(!text.contains("$l3"), "{text}");
    }

    #[test]
    fn foreign_head_bits_are_false() {
        let (sig, c, idx) = setup(
            "(declare-fun a 0)(declare-fun f 1)\
             (assert (subset (f (var X)) (a)))",
        );
        let script = encode_formula(&c, &sig, &idx, &EncodeOptions::default()).unwrap();
        let text = script.to_smtlib();
        // a_smt: bit for f(X) base is constant false; f_smt: bit for a() is false.
        assert!(text.contains("(define-fun a_smt () (_ BitVec 3) (concat (ite true #b1 #b0) (concat (ite false #b1 #b0) (ite (a_X) #b1 #b0)))")
            || text.contains("a_smt"), "{text}");
        assert!(text.contains("(ite false #b1 #b0)"), "{text}");
    }

    #[test]
    fn emission_is_deterministic() {
        let src = "(declare-fun a 0)(declare-fun f 2)\
                   (assert (subset (f (var X) (var Y)) (union (a) (var X))))\
                   (assert (not (subset (var Y) bot)))";
        let (sig, c, idx) = setup(src);
        let s1 = encode_formula(&c, &sig, &idx, &EncodeOptions::default()).unwrap();
        let s2 = encode_formula(&c, &sig, &idx, &EncodeOptions::default()).unwrap();
        assert_eq!(s1.to_smtlib(), s2.to_smtlib());
    }

    #[test]
    fn name_collisions_are_resolved() {
        // A user symbol literally named a_X collides with the generated
        // unknown for symbol a × variable X.
        let (sig, c, idx) = setup(
            "(declare-fun a 0)(declare-fun a_X 0)\
             (assert (subset (var X) (union (a) (a_X))))",
        );
        let script = encode_formula(&c, &sig, &idx, &EncodeOptions::default()).unwrap();
        let text = script.to_smtlib();
        assert!(text.contains("a_X$1"), "{text}");
        let mut names = HashSet::new();
        for d in &script.decls {
            let name = match d {
                Decl::BoolFun { name, .. }
                | Decl::SeqConst { name, .. }
                | Decl::BoolConst { name }
                | Decl::Assembler { name, .. } => name,
            };
            assert!(names.insert(name.clone()), "duplicate declared name {name}");
        }
    }

    #[test]
    fn image_axiom_is_opt_in() {
        let (sig, c, idx) = setup(
            "(declare-fun a 0)(declare-fun f 1)(assert (subset (var X) (f top)))",
        );
        let without =
            encode_formula(&c, &sig, &idx, &EncodeOptions::default()).unwrap();
        assert!(!without.to_smtlib().contains("exists"));
        let opts = EncodeOptions { image_axiom: true, ..Default::default() };
        let with = encode_formula(&c, &sig, &idx, &opts).unwrap();
        let text = with.to_smtlib();
        assert!(text.contains("(exists (($x1 (_ BitVec"), "{text}");
        assert!(text.contains("(= $x a_smt)"), "{text}");
    }

    #[test]
    fn logic_override() {
        let (sig, c, idx) =
            setup("(declare-fun a 0)(assert (subset (var X) (a)))");
        let opts = EncodeOptions { logic: "ALL".into(), ..Default::default() };
        let script = encode_formula(&c, &sig, &idx, &opts).unwrap();
        assert!(script.to_smtlib().starts_with("(set-logic ALL)\n"));
    }
}
