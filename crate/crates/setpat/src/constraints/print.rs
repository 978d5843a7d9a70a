//! Printers emitting the core constraint syntax.
//!
//! Output uses only the core forms (no `=>`/`iff`/`=`/`true`/`false`), so
//! parsing a printed file yields a structurally identical formula as long as
//! no fresh `$` variables are present.

use super::{Formula, SetExpr, Signature};
use std::fmt::Write;

pub fn print_expr(e: &SetExpr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn write_expr(s: &mut String, e: &SetExpr) {
    match e {
        SetExpr::Var(v) => {
            let _ = write!(s, "(var {v})");
        }
        SetExpr::Top => s.push_str("top"),
        SetExpr::Bot => s.push_str("bot"),
        SetExpr::Union(a, b) => {
            s.push_str("(union ");
            write_expr(s, a);
            s.push(' ');
            write_expr(s, b);
            s.push(')');
        }
        SetExpr::Inter(a, b) => {
            s.push_str("(inter ");
            write_expr(s, a);
            s.push(' ');
            write_expr(s, b);
            s.push(')');
        }
        SetExpr::Neg(a) => {
            s.push_str("(neg ");
            write_expr(s, a);
            s.push(')');
        }
        SetExpr::App(f, args) => {
            s.push('(');
            s.push_str(&f.name);
            for a in args {
                s.push(' ');
                write_expr(s, a);
            }
            s.push(')');
        }
        SetExpr::Proj(f, j, a) => {
            let _ = write!(s, "(proj {} {} ", f.name, j);
            write_expr(s, a);
            s.push(')');
        }
    }
}

pub fn print_formula(c: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, c);
    s
}

fn write_formula(s: &mut String, c: &Formula) {
    match c {
        Formula::Atom(a) => {
            s.push_str("(subset ");
            write_expr(s, &a.lhs);
            s.push(' ');
            write_expr(s, &a.rhs);
            s.push(')');
        }
        Formula::And(a, b) => {
            s.push_str("(and ");
            write_formula(s, a);
            s.push(' ');
            write_formula(s, b);
            s.push(')');
        }
        Formula::Or(a, b) => {
            s.push_str("(or ");
            write_formula(s, a);
            s.push(' ');
            write_formula(s, b);
            s.push(')');
        }
        Formula::Not(a) => {
            s.push_str("(not ");
            write_formula(s, a);
            s.push(')');
        }
    }
}

/// A whole file: one `declare-fun` per symbol, then one assertion per
/// top-level conjunct.
pub fn print_constraint_file(sig: &Signature, c: &Formula) -> String {
    let mut s = String::new();
    for f in sig.symbols() {
        let _ = writeln!(s, "(declare-fun {} {})", f.name, f.arity);
    }
    for conj in c.conjuncts() {
        let _ = writeln!(s, "(assert {})", print_formula(conj));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::parse_constraint_file;

    #[test]
    fn round_trip_core_forms() {
        let src = "(declare-fun f 2)(declare-fun a 0)\n\
                   (assert (or (not (subset (f (var X) (a)) (inter top (neg bot)))) \
                   (subset (union (var X) (var Y)) top)))\n\
                   (assert (subset (proj f 1 (var X)) bot))";
        let (sig, c) = parse_constraint_file(src).unwrap();
        let printed = print_constraint_file(&sig, &c);
        let (sig2, c2) = parse_constraint_file(&printed).unwrap();
        assert_eq!(sig, sig2);
        assert_eq!(c, c2);
        let printed2 = print_constraint_file(&sig2, &c2);
        assert_eq!(printed, printed2);
    }

    #[test]
    fn one_assertion_per_conjunct() {
        let (sig, c) =
            parse_constraint_file("(assert true)(assert (and true true))").unwrap();
        let printed = print_constraint_file(&sig, &c);
        assert_eq!(printed.lines().count(), 3);
    }
}
