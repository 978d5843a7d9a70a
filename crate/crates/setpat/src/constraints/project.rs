//! Projection elimination.
//!
//! Each projection f⁻ʲ(E) is compiled away by introducing fresh variables
//! X₁..Xₐ (one per argument position of f) and rewriting the surrounding
//! formula C[f⁻ʲ(E)] to
//!
//! ```text
//! C[Xⱼ] ∧ (E ∩ f(⊤,…,⊤)) = f(X₁,…,Xₐ) ∧ (E = ⊥ ⇔ Xⱼ = ⊥)
//! ```
//!
//! with `=` and `⇔` desugared to inclusions. Projections are processed
//! innermost first, leftmost first, and every structurally equal occurrence
//! of the chosen projection is replaced in the same step, so equal
//! projections share one set of fresh variables.

use super::{Formula, SetExpr, Signature};

/// Rewrites `c` to an equi-satisfiable projection-free formula.
///
/// Fresh variables are named `"$0"`, `"$1"`, … in introduction order; the
/// parser never accepts such names, so they cannot capture input variables.
/// A projection-free input is returned unchanged.
pub fn eliminate_projections(c: &Formula, sig: &Signature) -> Formula {
    let mut out = c.clone();
    let mut counter = 0usize;
    while let Some(proj) = first_proj_formula(&out) {
        let SetExpr::Proj(f, j, arg) = &proj else { unreachable!() };
        debug_assert!(sig.lookup(&f.name).is_some(), "projection over undeclared {}", f.name);
        debug_assert!(!arg.contains_proj(), "selected projection is not innermost");

        let fresh: Vec<SetExpr> = (0..f.arity)
            .map(|_| {
                let v = SetExpr::Var(format!("${counter}"));
                counter += 1;
                v
            })
            .collect();
        let xj = fresh[*j - 1].clone();

        let context = replace_in_formula(&out, &proj, &xj);
        let image_eq = Formula::set_eq(
            SetExpr::inter((**arg).clone(), SetExpr::app_top(f)),
            SetExpr::App(f.clone(), fresh),
        );
        let empty_iff = Formula::iff(
            Formula::set_eq((**arg).clone(), SetExpr::Bot),
            Formula::set_eq(xj, SetExpr::Bot),
        );
        out = Formula::and(Formula::and(context, image_eq), empty_iff);
    }
    out
}

/// The first projection node in a left-to-right post-order walk. Post-order
/// guarantees the result's argument is projection-free.
fn first_proj_formula(c: &Formula) -> Option<SetExpr> {
    match c {
        Formula::Atom(a) => first_proj_expr(&a.lhs).or_else(|| first_proj_expr(&a.rhs)),
        Formula::And(a, b) | Formula::Or(a, b) => {
            first_proj_formula(a).or_else(|| first_proj_formula(b))
        }
        Formula::Not(a) => first_proj_formula(a),
    }
}

fn first_proj_expr(e: &SetExpr) -> Option<SetExpr> {
    match e {
        SetExpr::Var(_) | SetExpr::Top | SetExpr::Bot => None,
        SetExpr::Union(a, b) | SetExpr::Inter(a, b) => {
            first_proj_expr(a).or_else(|| first_proj_expr(b))
        }
        SetExpr::Neg(a) => first_proj_expr(a),
        SetExpr::App(_, args) => args.iter().find_map(first_proj_expr),
        SetExpr::Proj(_, _, arg) => first_proj_expr(arg).or_else(|| Some(e.clone())),
    }
}

fn replace_in_formula(c: &Formula, target: &SetExpr, to: &SetExpr) -> Formula {
    match c {
        Formula::Atom(a) => Formula::atom(
            replace_in_expr(&a.lhs, target, to),
            replace_in_expr(&a.rhs, target, to),
        ),
        Formula::And(a, b) => Formula::and(
            replace_in_formula(a, target, to),
            replace_in_formula(b, target, to),
        ),
        Formula::Or(a, b) => Formula::or(
            replace_in_formula(a, target, to),
            replace_in_formula(b, target, to),
        ),
        Formula::Not(a) => Formula::not(replace_in_formula(a, target, to)),
    }
}

fn replace_in_expr(e: &SetExpr, target: &SetExpr, to: &SetExpr) -> SetExpr {
    if e == target {
        return to.clone();
    }
    match e {
        SetExpr::Var(_) | SetExpr::Top | SetExpr::Bot => e.clone(),
        SetExpr::Union(a, b) => SetExpr::union(
            replace_in_expr(a, target, to),
            replace_in_expr(b, target, to),
        ),
        SetExpr::Inter(a, b) => SetExpr::inter(
            replace_in_expr(a, target, to),
            replace_in_expr(b, target, to),
        ),
        SetExpr::Neg(a) => SetExpr::neg(replace_in_expr(a, target, to)),
        SetExpr::App(f, args) => SetExpr::App(
            f.clone(),
            args.iter().map(|a| replace_in_expr(a, target, to)).collect(),
        ),
        SetExpr::Proj(f, j, a) => {
            SetExpr::Proj(f.clone(), *j, Box::new(replace_in_expr(a, target, to)))
        }
    }
}
