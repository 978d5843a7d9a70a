//! Parser for the s-expression constraint file format.
//!
//! ```text
//! file      := decl* assertion+
//! decl      := "(declare-fun" NAME NAT ")"
//! assertion := "(assert" c ")"            ; assertions are conjoined
//! c         := "(subset" e e ")" | "(and" c c+ ")" | "(or" c c+ ")"
//!            | "(not" c ")" | "(=>" c c ")" | "(iff" c c ")"
//!            | "(=" e e ")" | "true" | "false"
//! e         := "top" | "bot" | "(var" NAME ")" | "(union" e e+ ")"
//!            | "(inter" e e+ ")" | "(neg" e ")" | "(" NAME e* ")"
//!            | "(proj" NAME NAT e ")"
//! ```
//!
//! `;` starts a line comment. Implication, equivalence, the boolean
//! constants, and set equality are desugared while parsing, so the returned
//! [`Formula`] contains only inclusions under and/or/not.

use super::{Formula, FuncSym, SetExpr, Signature};
use std::fmt;

/// A parse or well-formedness error, with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

const RESERVED: &[&str] = &[
    "declare-fun", "assert", "subset", "and", "or", "not", "=>", "iff", "=",
    "true", "false", "top", "bot", "var", "union", "inter", "neg", "proj",
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Atom(String),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) -> u8 {
        let b = self.src[self.pos];
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        b
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let (line, col) = (self.line, self.col);
            match self.src[self.pos] {
                b';' => {
                    while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                        self.bump();
                    }
                }
                c if c.is_ascii_whitespace() => {
                    self.bump();
                }
                b'(' => {
                    self.bump();
                    out.push((Tok::LParen, line, col));
                }
                b')' => {
                    self.bump();
                    out.push((Tok::RParen, line, col));
                }
                _ => {
                    let start = self.pos;
                    while self.pos < self.src.len() {
                        let c = self.src[self.pos];
                        if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' {
                            break;
                        }
                        self.bump();
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos])
                        .map_err(|_| ParseError {
                            line,
                            col,
                            message: "invalid UTF-8 in token".into(),
                        })?
                        .to_string();
                    out.push((Tok::Atom(text), line, col));
                }
            }
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    i: usize,
    sig: Signature,
}

impl Parser {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self
            .toks
            .get(self.i)
            .map(|&(_, l, c)| (l, c))
            .or_else(|| self.toks.last().map(|&(_, l, c)| (l, c)))
            .unwrap_or((1, 1));
        Err(ParseError { line, col, message: message.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(t, _, _)| t)
    }

    fn next(&mut self, what: &str) -> Result<Tok, ParseError> {
        match self.toks.get(self.i) {
            Some((t, _, _)) => {
                let t = t.clone();
                self.i += 1;
                Ok(t)
            }
            None => self.err(format!("unexpected end of input, expected {what}")),
        }
    }

    fn expect_lparen(&mut self, what: &str) -> Result<(), ParseError> {
        match self.next(what)? {
            Tok::LParen => Ok(()),
            _ => {
                self.i -= 1;
                self.err(format!("expected {what}"))
            }
        }
    }

    fn expect_rparen(&mut self, what: &str) -> Result<(), ParseError> {
        match self.next(&format!("')' closing {what}"))? {
            Tok::RParen => Ok(()),
            _ => {
                self.i -= 1;
                self.err(format!("expected ')' closing {what}"))
            }
        }
    }

    fn atom(&mut self, what: &str) -> Result<String, ParseError> {
        match self.next(what)? {
            Tok::Atom(s) => Ok(s),
            _ => {
                self.i -= 1;
                self.err(format!("expected {what}"))
            }
        }
    }

    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        let s = self.atom(what)?;
        if s.starts_with('$') {
            self.i -= 1;
            return self.err(format!("names starting with '$' are reserved: {s}"));
        }
        Ok(s)
    }

    fn nat(&mut self, what: &str) -> Result<usize, ParseError> {
        let s = self.atom(what)?;
        match s.parse::<usize>() {
            Ok(n) => Ok(n),
            Err(_) => {
                self.i -= 1;
                self.err(format!("expected {what}, found `{s}`"))
            }
        }
    }

    fn symbol(&mut self, name: &str) -> Result<FuncSym, ParseError> {
        match self.sig.lookup(name) {
            Some(f) => Ok(f.clone()),
            None => self.err(format!("undeclared function symbol `{name}`")),
        }
    }

    fn decls(&mut self) -> Result<(), ParseError> {
        loop {
            // A decl starts "(declare-fun"; anything else ends the prefix.
            let is_decl = matches!(
                (self.toks.get(self.i), self.toks.get(self.i + 1)),
                (Some((Tok::LParen, _, _)), Some((Tok::Atom(head), _, _))) if head == "declare-fun"
            );
            if !is_decl {
                return Ok(());
            }
            self.i += 2;
            let name = self.name("function symbol name")?;
            if RESERVED.contains(&name.as_str()) {
                self.i -= 1;
                return self.err(format!("`{name}` is a reserved word"));
            }
            if self.sig.lookup(&name).is_some() {
                self.i -= 1;
                return self.err(format!("duplicate declaration of `{name}`"));
            }
            let arity = self.nat("arity (a natural number)")?;
            self.expect_rparen("declare-fun")?;
            self.sig.push(FuncSym::new(name, arity));
        }
    }

    fn assertion(&mut self) -> Result<Formula, ParseError> {
        self.expect_lparen("(assert ...)")?;
        let head = self.atom("assert")?;
        if head != "assert" {
            self.i -= 1;
            return self.err(format!("expected `assert`, found `{head}`"));
        }
        let c = self.formula()?;
        self.expect_rparen("assert")?;
        Ok(c)
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        match self.next("a constraint")? {
            Tok::Atom(s) => match s.as_str() {
                "true" => Ok(Formula::truth()),
                "false" => Ok(Formula::falsity()),
                other => {
                    self.i -= 1;
                    self.err(format!("expected a constraint, found `{other}`"))
                }
            },
            Tok::LParen => {
                let head = self.atom("a constraint head")?;
                let c = match head.as_str() {
                    "subset" => {
                        let a = self.expr()?;
                        let b = self.expr()?;
                        Formula::atom(a, b)
                    }
                    "=" => {
                        let a = self.expr()?;
                        let b = self.expr()?;
                        Formula::set_eq(a, b)
                    }
                    "and" | "or" => {
                        let mut parts = vec![self.formula()?, self.formula()?];
                        while self.peek() != Some(&Tok::RParen) {
                            parts.push(self.formula()?);
                        }
                        let mut it = parts.into_iter();
                        let first = it.next().unwrap();
                        if head == "and" {
                            it.fold(first, Formula::and)
                        } else {
                            it.fold(first, Formula::or)
                        }
                    }
                    "not" => Formula::not(self.formula()?),
                    "=>" => {
                        let a = self.formula()?;
                        let b = self.formula()?;
                        Formula::implies(a, b)
                    }
                    "iff" => {
                        let a = self.formula()?;
                        let b = self.formula()?;
                        Formula::iff(a, b)
                    }
                    other => {
                        self.i -= 1;
                        return self.err(format!("unknown constraint form `{other}`"));
                    }
                };
                self.expect_rparen(&head)?;
                Ok(c)
            }
            Tok::RParen => {
                self.i -= 1;
                self.err("expected a constraint")
            }
        }
    }

    fn expr(&mut self) -> Result<SetExpr, ParseError> {
        match self.next("a set expression")? {
            Tok::Atom(s) => match s.as_str() {
                "top" => Ok(SetExpr::Top),
                "bot" => Ok(SetExpr::Bot),
                other => {
                    self.i -= 1;
                    self.err(format!("expected a set expression, found `{other}`"))
                }
            },
            Tok::LParen => {
                let head = self.atom("a set expression head")?;
                let e = match head.as_str() {
                    "var" => SetExpr::Var(self.name("variable name")?),
                    "union" | "inter" => {
                        let mut parts = vec![self.expr()?, self.expr()?];
                        while self.peek() != Some(&Tok::RParen) {
                            parts.push(self.expr()?);
                        }
                        let mut it = parts.into_iter();
                        let first = it.next().unwrap();
                        if head == "union" {
                            it.fold(first, SetExpr::union)
                        } else {
                            it.fold(first, SetExpr::inter)
                        }
                    }
                    "neg" => SetExpr::neg(self.expr()?),
                    "proj" => {
                        let name = self.name("function symbol name")?;
                        let f = self.symbol(&name)?;
                        let j = self.nat("projection index")?;
                        if j < 1 || j > f.arity {
                            self.i -= 1;
                            return self.err(format!(
                                "projection index {j} out of range for `{}` of arity {}",
                                f.name, f.arity
                            ));
                        }
                        let arg = self.expr()?;
                        SetExpr::Proj(f, j, Box::new(arg))
                    }
                    name if RESERVED.contains(&name) => {
                        self.i -= 1;
                        return self.err(format!("unknown set expression form `{name}`"));
                    }
                    name => {
                        if name.starts_with('$') {
                            self.i -= 1;
                            return self.err(format!(
                                "names starting with '$' are reserved: {name}"
                            ));
                        }
                        let f = self.symbol(name)?;
                        let mut args = Vec::new();
                        while self.peek() != Some(&Tok::RParen) {
                            args.push(self.expr()?);
                        }
                        if args.len() != f.arity {
                            self.i -= 1;
                            return self.err(format!(
                                "`{}` expects {} arguments, found {}",
                                f.name,
                                f.arity,
                                args.len()
                            ));
                        }
                        SetExpr::App(f, args)
                    }
                };
                self.expect_rparen(&head)?;
                Ok(e)
            }
            Tok::RParen => {
                self.i -= 1;
                self.err("expected a set expression")
            }
        }
    }

    fn file(&mut self) -> Result<Formula, ParseError> {
        self.decls()?;
        if self.peek().is_none() {
            return self.err("expected at least one (assert ...)");
        }
        let mut c = self.assertion()?;
        while self.peek().is_some() {
            c = Formula::and(c, self.assertion()?);
        }
        Ok(c)
    }
}

/// Parses a full constraint file into its signature and conjoined formula.
pub fn parse_constraint_file(src: &str) -> Result<(Signature, Formula), ParseError> {
    let toks = Lexer::new(src).tokens()?;
    let mut p = Parser { toks, i: 0, sig: Signature::default() };
    let c = p.file()?;
    Ok((p.sig, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::Atom;

    fn parse(src: &str) -> (Signature, Formula) {
        parse_constraint_file(src).expect("parse failed")
    }

    #[test]
    fn minimal_file() {
        let (sig, c) = parse("(assert (subset top bot))");
        assert!(sig.symbols().is_empty());
        assert_eq!(c, Formula::atom(SetExpr::Top, SetExpr::Bot));
    }

    #[test]
    fn declarations_and_application() {
        let (sig, c) = parse(
            "(declare-fun f 2) (declare-fun a 0)\n(assert (subset (f (a) top) (var X)))",
        );
        assert_eq!(sig.symbols().len(), 2);
        let f = sig.lookup("f").unwrap().clone();
        let a = sig.lookup("a").unwrap().clone();
        assert_eq!(
            c,
            Formula::atom(
                SetExpr::app(f, vec![SetExpr::app(a, vec![]), SetExpr::Top]),
                SetExpr::var("X"),
            )
        );
    }

    #[test]
    fn nary_forms_left_fold() {
        let (_, c) = parse("(assert (subset (union top bot top) bot))");
        let expected = SetExpr::union(SetExpr::union(SetExpr::Top, SetExpr::Bot), SetExpr::Top);
        assert_eq!(c, Formula::atom(expected, SetExpr::Bot));

        let (_, c) = parse(
            "(assert (and (subset top top) (subset bot bot) (subset bot top)))",
        );
        assert_eq!(c.conjuncts().len(), 3);
    }

    #[test]
    fn sugar_desugars() {
        let (_, c) = parse("(assert (=> true false))");
        assert_eq!(c, Formula::implies(Formula::truth(), Formula::falsity()));

        let (_, c) = parse("(assert (iff (subset (var X) top) true))");
        assert_eq!(
            c,
            Formula::iff(Formula::atom(SetExpr::var("X"), SetExpr::Top), Formula::truth())
        );

        let (_, c) = parse("(assert (= (var X) (var Y)))");
        assert_eq!(c, Formula::set_eq(SetExpr::var("X"), SetExpr::var("Y")));
    }

    #[test]
    fn multiple_assertions_conjoin() {
        let (_, c) = parse("(assert true) (assert false) (assert true)");
        assert_eq!(
            c,
            Formula::and(
                Formula::and(Formula::truth(), Formula::falsity()),
                Formula::truth()
            )
        );
    }

    #[test]
    fn comments_and_whitespace() {
        let (_, c) = parse("; leading note\n(assert ; inline\n  (subset top ; mid\n top))\n");
        assert_eq!(c, Formula::atom(SetExpr::Top, SetExpr::Top));
    }

    #[test]
    fn projection_parses_with_bounds_check() {
        let (sig, c) = parse("(declare-fun f 2)(assert (subset (proj f 2 (var E)) bot))");
        let f = sig.lookup("f").unwrap().clone();
        assert_eq!(
            c,
            Formula::Atom(Atom::subset(
                SetExpr::Proj(f, 2, Box::new(SetExpr::var("E"))),
                SetExpr::Bot
            ))
        );

        let err = parse_constraint_file("(declare-fun f 2)(assert (subset (proj f 3 top) bot))")
            .unwrap_err();
        assert!(err.message.contains("out of range"), "{err}");
        let err = parse_constraint_file("(declare-fun f 2)(assert (subset (proj f 0 top) bot))")
            .unwrap_err();
        assert!(err.message.contains("out of range"), "{err}");
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_constraint_file("(assert (subset (g top) top))").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("undeclared"), "{err}");

        let err = parse_constraint_file("(declare-fun f 1)\n(assert (subset (f) top))")
            .unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("expects 1 arguments"), "{err}");
    }

    #[test]
    fn rejects_reserved_and_dollar_names() {
        assert!(parse_constraint_file("(declare-fun union 2)(assert true)").is_err());
        assert!(parse_constraint_file("(declare-fun $f 1)(assert true)").is_err());
        assert!(parse_constraint_file("(assert (subset (var $x) top))").is_err());
    }

    #[test]
    fn requires_an_assertion() {
        assert!(parse_constraint_file("(declare-fun f 1)").is_err());
        assert!(parse_constraint_file("").is_err());
    }

    #[test]
    fn decls_must_precede_assertions() {
        let err =
            parse_constraint_file("(assert true)(declare-fun f 1)(assert true)").unwrap_err();
        assert!(err.message.contains("expected `assert`"), "{err}");
    }
}
