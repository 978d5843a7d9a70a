//! Model-checking evaluator for emitted scripts.
//!
//! Interprets every declared symbol of a script under a finite model found
//! by the brute-force search and evaluates each assertion, quantifiers
//! ranging over all bit vectors of the script width. Used by tests to prove
//! that search and encoding agree on what a model is: a Sat verdict from the
//! search must make every emitted assertion true.

use super::{BoolTerm, Decl, SeqTerm, SmtScript};
use crate::constraints::{PredicateIndex, Signature};
use crate::oracle::FiniteModel;
use std::collections::{BTreeMap, HashMap, HashSet};

/// An interpretation of a script's declared names.
pub struct Interp {
    domain: HashSet<u64>,
    in_domain: String,
    /// Unknown bit functions: tuple → bit; false off the recorded table.
    bool_funs: HashMap<String, BTreeMap<Vec<u64>, bool>>,
    seq_consts: HashMap<String, u64>,
    bool_consts: HashMap<String, bool>,
    assemblers: HashMap<String, (Vec<String>, Vec<BoolTerm>)>,
}

/// Builds the interpretation of `script` induced by `model`.
///
/// Declarations are matched to their semantic roles by emission order: the
/// first boolean function is the domain predicate, the following ones are
/// the symbol × variable unknowns in signature × position order, assemblers
/// follow signature order, sequence constants cover arity-0 symbols first
/// and witnesses after, and boolean constants are the atom guesses in atom
/// order. `guesses` supplies the guess values (atom truth in first-occurrence
/// order); witnesses are filled from the model's per-atom counterexamples in
/// the order `witness_values` lists them.
pub fn interp_from_model(
    script: &SmtScript,
    sig: &Signature,
    idx: &PredicateIndex,
    model: &FiniteModel,
    witness_values: &[u64],
    guesses: &[bool],
) -> Interp {
    let mut interp = Interp {
        domain: model.domain.iter().copied().collect(),
        in_domain: String::new(),
        bool_funs: HashMap::new(),
        seq_consts: HashMap::new(),
        bool_consts: HashMap::new(),
        assemblers: HashMap::new(),
    };

    let var_positions = idx.var_positions();
    let mut uf_roles: Vec<(String, usize, usize)> = Vec::new(); // name, sym_i, var_pos
    let mut seq_roles: Vec<String> = Vec::new();
    let mut bool_roles: Vec<String> = Vec::new();
    let mut saw_in_domain = false;
    let mut uf_i = 0usize;
    for d in &script.decls {
        match d {
            Decl::BoolFun { name, .. } => {
                if !saw_in_domain {
                    interp.in_domain = name.clone();
                    saw_in_domain = true;
                } else {
                    let sym_i = uf_i / var_positions.len();
                    let (pos, _) = var_positions[uf_i % var_positions.len()];
                    uf_roles.push((name.clone(), sym_i, pos));
                    uf_i += 1;
                }
            }
            Decl::SeqConst { name, .. } => seq_roles.push(name.clone()),
            Decl::BoolConst { name } => bool_roles.push(name.clone()),
            Decl::Assembler { name, params, bits, .. } => {
                interp
                    .assemblers
                    .insert(name.clone(), (params.clone(), bits.clone()));
            }
        }
    }

    for (name, sym_i, pos) in uf_roles {
        let (_, table) = &model.func_tables[sym_i];
        let bits: BTreeMap<Vec<u64>, bool> = table
            .iter()
            .map(|(inputs, out)| (inputs.clone(), (out >> pos) & 1 == 1))
            .collect();
        interp.bool_funs.insert(name, bits);
    }

    let mut seq_it = seq_roles.into_iter();
    for (sym_i, f) in sig.symbols().iter().enumerate() {
        if f.arity == 0 {
            let name = seq_it.next().expect("constant declared for arity-0 symbol");
            let value = model.func_tables[sym_i].1[&Vec::new()];
            interp.seq_consts.insert(name, value);
        }
    }
    for (name, &value) in seq_it.zip(witness_values) {
        interp.seq_consts.insert(name, value);
    }

    for (name, &value) in bool_roles.into_iter().zip(guesses) {
        interp.bool_consts.insert(name, value);
    }

    interp
}

/// Checks every assertion of `script` under `interp`; returns the rendered
/// text of the first failing assertion.
pub fn check_script(script: &SmtScript, interp: &Interp) -> Result<(), String> {
    for a in &script.assertions {
        let mut env = HashMap::new();
        if !eval_bool(a, interp, &mut env) {
            return Err(format!("assertion failed under model: {a:?}"));
        }
    }
    Ok(())
}

fn eval_seq(t: &SeqTerm, interp: &Interp, env: &mut HashMap<String, u64>) -> u64 {
    match t {
        SeqTerm::Name(n) => {
            if let Some(&v) = env.get(n) {
                v
            } else {
                *interp
                    .seq_consts
                    .get(n)
                    .unwrap_or_else(|| panic!("unbound sequence name {n}"))
            }
        }
        SeqTerm::Call(f, args) => {
            let vals: Vec<u64> = args.iter().map(|a| eval_seq(a, interp, env)).collect();
            let (params, bits) = interp
                .assemblers
                .get(f)
                .unwrap_or_else(|| panic!("unknown assembler {f}"));
            let mut inner: HashMap<String, u64> =
                params.iter().cloned().zip(vals).collect();
            let mut out = 0u64;
            for (pos, bit) in bits.iter().enumerate() {
                if eval_bool(bit, interp, &mut inner) {
                    out |= 1 << pos;
                }
            }
            out
        }
    }
}

fn eval_bool(t: &BoolTerm, interp: &Interp, env: &mut HashMap<String, u64>) -> bool {
    match t {
        BoolTerm::Lit(b) => *b,
        BoolTerm::BitOf(seq, j) => (eval_seq(seq, interp, env) >> j) & 1 == 1,
        BoolTerm::Ref(n) => *interp
            .bool_consts
            .get(n)
            .unwrap_or_else(|| panic!("unbound boolean name {n}")),
        BoolTerm::UFApp(f, args) => {
            let vals: Vec<u64> = args.iter().map(|a| eval_seq(a, interp, env)).collect();
            if *f == interp.in_domain {
                interp.domain.contains(&vals[0])
            } else {
                let table = interp
                    .bool_funs
                    .get(f)
                    .unwrap_or_else(|| panic!("unknown function {f}"));
                // Total in SMT; off-table tuples only occur under a false
                // domain guard, where any value is sound.
                table.get(&vals).copied().unwrap_or(false)
            }
        }
        BoolTerm::SeqEq(a, b) => eval_seq(a, interp, env) == eval_seq(b, interp, env),
        BoolTerm::Not(a) => !eval_bool(a, interp, env),
        BoolTerm::And(parts) => parts.iter().all(|p| eval_bool(p, interp, env)),
        BoolTerm::Or(parts) => parts.iter().any(|p| eval_bool(p, interp, env)),
        BoolTerm::Implies(a, b) => !eval_bool(a, interp, env) || eval_bool(b, interp, env),
        BoolTerm::Iff(a, b) => eval_bool(a, interp, env) == eval_bool(b, interp, env),
        BoolTerm::Forall(binders, body) => {
            quantify(binders, body, interp, env, true)
        }
        BoolTerm::Exists(binders, body) => {
            quantify(binders, body, interp, env, false)
        }
    }
}

fn quantify(
    binders: &[(String, usize)],
    body: &BoolTerm,
    interp: &Interp,
    env: &mut HashMap<String, u64>,
    universal: bool,
) -> bool {
    fn go(
        binders: &[(String, usize)],
        body: &BoolTerm,
        interp: &Interp,
        env: &mut HashMap<String, u64>,
        universal: bool,
    ) -> bool {
        let Some(((name, width), rest)) = binders.split_first() else {
            return eval_bool(body, interp, env);
        };
        let saved = env.get(name).copied();
        let mut result = universal;
        for v in 0..(1u64 << width) {
            env.insert(name.clone(), v);
            let r = go(rest, body, interp, env, universal);
            if r != universal {
                result = r;
                break;
            }
        }
        match saved {
            Some(v) => {
                env.insert(name.clone(), v);
            }
            None => {
                env.remove(name);
            }
        }
        result
    }
    go(binders, body, interp, env, universal)
}

/// Replays a Sat search result against the emitted script for the same
/// formula: builds witnesses and guesses from the model's atom verdicts and
/// checks every assertion.
pub fn replay_model(
    script: &SmtScript,
    c: &crate::constraints::Formula,
    sig: &Signature,
    idx: &PredicateIndex,
    model: &FiniteModel,
) -> Result<(), String> {
    let row_of = |atom: &crate::constraints::Atom| {
        model
            .witness_choice
            .iter()
            .find(|(a, _, _)| a == atom)
            .ok_or_else(|| format!("model has no row for atom {atom:?}"))
    };

    let mut witness_values = Vec::new();
    let mut guesses = Vec::new();
    if let Some(literals) = c.as_literal_conjunction() {
        // Conjunction path: one witness per negative literal, literal order.
        for (atom, positive) in literals {
            if !positive {
                let (_, _, witness) = row_of(atom)?;
                let w = witness
                    .ok_or("model satisfies a negative literal without a counterexample")?;
                witness_values.push(w);
            }
        }
    } else {
        // General path: one guess and one witness per distinct atom. When
        // the guess is true the witnessed branch is vacuous and any element
        // serves.
        for (_, truth, witness) in &model.witness_choice {
            guesses.push(*truth);
            witness_values.push(witness.unwrap_or(model.domain[0]));
        }
    }

    let seq_const_count = script
        .decls
        .iter()
        .filter(|d| matches!(d, Decl::SeqConst { .. }))
        .count();
    let const_count = sig.symbols().iter().filter(|f| f.arity == 0).count();
    let witness_count = seq_const_count - const_count;
    if witness_values.len() != witness_count {
        return Err(format!(
            "witness count mismatch: script declares {witness_count}, model provides {}",
            witness_values.len()
        ));
    }

    let interp = interp_from_model(script, sig, idx, model, &witness_values, &guesses);
    check_script(script, &interp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{index_base_predicates, parse_constraint_file};
    use crate::oracle::{oracle_solve_model, Budget};
    use crate::smt::{encode_formula, EncodeOptions};

    fn replay(src: &str) {
        let (sig, c) = parse_constraint_file(src).unwrap();
        let idx = index_base_predicates(&c);
        let (v, model) = oracle_solve_model(&c, &sig, &Budget::default());
        assert!(v.is_sat(), "expected sat for {src}, got {v}");
        let model = model.unwrap();
        let script = encode_formula(&c, &sig, &idx, &EncodeOptions::default()).unwrap();
        replay_model(&script, &c, &sig, &idx, &model).unwrap();
    }

    #[test]
    fn replay_conjunction_model() {
        replay(
            "(declare-fun a 0)\
             (assert (subset (var X) (a)))(assert (not (subset (var X) bot)))",
        );
    }

    #[test]
    fn replay_model_with_unary_symbol() {
        replay(
            "(declare-fun a 0)(declare-fun f 1)\
             (assert (subset (var X) (f top)))(assert (not (subset (var X) bot)))",
        );
    }

    #[test]
    fn replay_general_boolean_model() {
        replay(
            "(declare-fun a 0)\
             (assert (=> (subset (var X) (var Y)) (subset (var Y) (var X))))\
             (assert (not (subset (var Y) (var Z))))",
        );
    }

    #[test]
    fn replay_rejects_broken_model() {
        let (sig, c) = parse_constraint_file(
            "(declare-fun a 0)(assert (subset (var X) (a)))",
        )
        .unwrap();
        let idx = index_base_predicates(&c);
        let (v, model) = oracle_solve_model(&c, &sig, &Budget::default());
        assert!(v.is_sat());
        let mut model = model.unwrap();
        // Corrupt the model: march the constant out of the domain.
        let bogus = (1u64 << idx.len()) .min(63);
        model.func_tables[0].1.insert(Vec::new(), bogus);
        let script = encode_formula(&c, &sig, &idx, &EncodeOptions::default()).unwrap();
        assert!(replay_model(&script, &c, &sig, &idx, &model).is_err());
    }
}
