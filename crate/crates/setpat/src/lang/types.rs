//! Underlying type inference: plain Hindley-Milner over the declared
//! datatypes and the builtin opaque types, with generalization at `let` and
//! monomorphic recursion (a binding sees itself at a single type).
//!
//! The result records a type for every term node and the generalized type
//! variables of every `let`, which is what the match analysis consumes to
//! instantiate schemes at each occurrence.

use super::{DataEnv, LangError, PatKind, Pattern, Span, Term, TermKind, UScheme, UType};
use std::collections::{BTreeSet, HashMap};

/// Per-node typing produced by `typecheck`.
#[derive(Debug, Clone)]
pub struct Typing {
    node_types: Vec<UType>,
    let_binders: HashMap<usize, Vec<String>>,
}

impl Typing {
    /// The fully resolved type of the node with this id.
    pub fn node_type(&self, id: usize) -> &UType {
        &self.node_types[id]
    }

    /// Type variables generalized at a `let` node (empty when none).
    pub fn binders(&self, let_id: usize) -> &[String] {
        self.let_binders.get(&let_id).map(|v| v.as_slice()).unwrap_or(&[])
    }
}

struct Infer<'a> {
    denv: &'a DataEnv,
    subst: HashMap<String, UType>,
    fresh: usize,
    types: Vec<Option<UType>>,
    let_binders: HashMap<usize, Vec<String>>,
}

type Env = Vec<(String, UScheme)>;

impl<'a> Infer<'a> {
    fn fresh_var(&mut self) -> UType {
        let v = UType::TVar(format!("t{}", self.fresh));
        self.fresh += 1;
        v
    }

    /// Apply the substitution all the way down.
    fn resolve(&self, t: &UType) -> UType {
        match t {
            UType::TVar(v) => match self.subst.get(v) {
                Some(u) => self.resolve(u),
                None => t.clone(),
            },
            UType::Data(_) => t.clone(),
            UType::Arrow(a, b) => UType::arrow(self.resolve(a), self.resolve(b)),
        }
    }

    fn occurs(&self, v: &str, t: &UType) -> bool {
        match t {
            UType::TVar(w) => w == v,
            UType::Data(_) => false,
            UType::Arrow(a, b) => self.occurs(v, a) || self.occurs(v, b),
        }
    }

    fn unify(&mut self, a: &UType, b: &UType, span: Span) -> Result<(), LangError> {
        let a = self.resolve(a);
        let b = self.resolve(b);
        match (&a, &b) {
            (UType::TVar(v), UType::TVar(w)) if v == w => Ok(()),
            (UType::TVar(v), _) => {
                if self.occurs(v, &b) {
                    return Err(LangError {
                        span,
                        message: format!("infinite type: {v} occurs in {b}"),
                    });
                }
                self.subst.insert(v.clone(), b);
                Ok(())
            }
            (_, UType::TVar(_)) => self.unify(&b, &a, span),
            (UType::Data(d), UType::Data(e)) if d == e => Ok(()),
            (UType::Arrow(a1, a2), UType::Arrow(b1, b2)) => {
                self.unify(a1, b1, span)?;
                self.unify(a2, b2, span)
            }
            _ => Err(LangError {
                span,
                message: format!("type mismatch: expected {a}, found {b}"),
            }),
        }
    }

    fn free_vars(&self, t: &UType, out: &mut BTreeSet<String>) {
        match &self.resolve(t) {
            UType::TVar(v) => {
                out.insert(v.clone());
            }
            UType::Data(_) => {}
            UType::Arrow(a, b) => {
                self.free_vars(a, out);
                self.free_vars(b, out);
            }
        }
    }

    fn instantiate(&mut self, s: &UScheme) -> UType {
        let mut map = HashMap::new();
        for v in &s.vars {
            map.insert(v.clone(), self.fresh_var());
        }
        subst_tvars(&s.body, &map)
    }

    fn infer(&mut self, env: &mut Env, t: &Term) -> Result<UType, LangError> {
        let ty = match &t.kind {
            TermKind::Var(x) => {
                let scheme = env
                    .iter()
                    .rev()
                    .find(|(n, _)| n == x)
                    .map(|(_, s)| s.clone())
                    .ok_or_else(|| LangError {
                        span: t.span,
                        message: format!("unbound variable `{x}`"),
                    })?;
                self.instantiate(&scheme)
            }
            TermKind::Lit(_, is_double) => {
                UType::Data(if *is_double { "Double" } else { "Int" }.to_string())
            }
            TermKind::Lam(x, body) => {
                let a = self.fresh_var();
                env.push((x.clone(), mono(a.clone())));
                let b = self.infer(env, body)?;
                env.pop();
                UType::arrow(a, b)
            }
            TermKind::App(f, arg) => {
                let tf = self.infer(env, f)?;
                let ta = self.infer(env, arg)?;
                let r = self.fresh_var();
                self.unify(&tf, &UType::arrow(ta, r.clone()), t.span)?;
                r
            }
            TermKind::Ctor(k, d, args) => {
                let params: Vec<UType> = self
                    .denv
                    .ctor(k)
                    .map(|(_, ps)| ps.to_vec())
                    .expect("parser checked the constructor");
                for (a, p) in args.iter().zip(&params) {
                    let ta = self.infer(env, a)?;
                    self.unify(&ta, p, a.span)?;
                }
                UType::Data(d.clone())
            }
            TermKind::Match(scrut, branches) => {
                let ts = self.infer(env, scrut)?;
                let result = self.fresh_var();
                for (pat, body) in branches {
                    let depth = env.len();
                    self.bind_pattern(env, pat, &ts)?;
                    let tb = self.infer(env, body)?;
                    env.truncate(depth);
                    self.unify(&tb, &result, body.span)?;
                }
                result
            }
            TermKind::Let(x, bound, body) => {
                let a = self.fresh_var();
                env.push((x.clone(), mono(a.clone())));
                let tb = self.infer(env, bound)?;
                env.pop();
                self.unify(&a, &tb, t.span)?;

                let resolved = self.resolve(&tb);
                let mut env_free = BTreeSet::new();
                for (_, s) in env.iter() {
                    let mut vs = BTreeSet::new();
                    self.free_vars(&s.body, &mut vs);
                    for v in &s.vars {
                        vs.remove(v);
                    }
                    env_free.extend(vs);
                }
                let mut own = BTreeSet::new();
                self.free_vars(&resolved, &mut own);
                let gen: Vec<String> = own.difference(&env_free).cloned().collect();
                self.let_binders.insert(t.id, gen.clone());

                env.push((x.clone(), UScheme { vars: gen, body: resolved }));
                let t2 = self.infer(env, body)?;
                env.pop();
                t2
            }
        };
        self.types[t.id] = Some(ty.clone());
        Ok(ty)
    }

    /// Type a pattern against the scrutinee type, pushing one monomorphic
    /// binding per pattern variable.
    fn bind_pattern(&mut self, env: &mut Env, pat: &Pattern, scrut: &UType) -> Result<(), LangError> {
        match &pat.kind {
            PatKind::Var(x) => {
                env.push((x.clone(), mono(self.resolve(scrut))));
                Ok(())
            }
            PatKind::Ctor(k, d, subs) => {
                self.unify(scrut, &UType::Data(d.clone()), pat.span)?;
                let params: Vec<UType> = self
                    .denv
                    .ctor(k)
                    .map(|(_, ps)| ps.to_vec())
                    .expect("parser checked the constructor");
                for (s, p) in subs.iter().zip(&params) {
                    self.bind_pattern(env, s, p)?;
                }
                Ok(())
            }
        }
    }
}

fn mono(t: UType) -> UScheme {
    UScheme { vars: Vec::new(), body: t }
}

fn subst_tvars(t: &UType, map: &HashMap<String, UType>) -> UType {
    match t {
        UType::TVar(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        UType::Data(_) => t.clone(),
        UType::Arrow(a, b) => UType::arrow(subst_tvars(a, map), subst_tvars(b, map)),
    }
}

/// Infer a type for every node of the program term.
pub fn typecheck(denv: &DataEnv, term: &Term, nodes: usize) -> Result<Typing, LangError> {
    let mut inf = Infer {
        denv,
        subst: HashMap::new(),
        fresh: 0,
        types: vec![None; nodes],
        let_binders: HashMap::new(),
    };
    let mut env = Env::new();
    inf.infer(&mut env, term)?;
    let node_types = inf
        .types
        .iter()
        .map(|t| inf.resolve(t.as_ref().expect("every node is visited once")))
        .collect();
    Ok(Typing {
        node_types,
        let_binders: inf.let_binders,
    })
}
