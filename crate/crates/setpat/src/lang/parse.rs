//! Program parser.
//!
//! ```text
//! program  := datadecl* topdef+
//! datadecl := "data" D "=" ctor ("|" ctor)*
//! ctor     := K | K "(" type ("," type)* ")"
//! type     := tyatom ("->" type)?
//! tyatom   := D | "(" type ")"
//! topdef   := x "=" term
//! term     := "\" x+ "." term
//!           | "let" x "=" term "in" term
//!           | "match" term "with" "{" (pat "->" term ";")+ "}"
//!           | appterm
//! appterm  := atom+
//! atom     := x | K | K "(" term ("," term)* ")" | "(" term ")" | number
//! pat      := x | K | K "(" pat ("," pat)* ")"
//! ```
//!
//! Uppercase-initial names are constructors and type names, lowercase-initial
//! names are variables. `--` starts a line comment. Constructor applications
//! are saturated: the argument count must match the declaration. A top-level
//! definition ends where the next `name =` begins, so application stops
//! consuming atoms at that boundary.

use super::{DataEnv, PatKind, Pattern, Span, Term, TermKind, UType};
use std::fmt;

/// Parse failure with its source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LangError {
    pub span: Span,
    pub message: String,
}

impl fmt::Display for LangError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

impl std::error::Error for LangError {}

/// Parsed program: datatype environment, the definitions desugared into
/// nested `let`s, and the number of term nodes (for per-node type tables).
#[derive(Debug, Clone)]
pub struct Program {
    pub data: DataEnv,
    pub term: Term,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    CapIdent(String),
    Number(String, bool),
    KwData,
    KwLet,
    KwIn,
    KwMatch,
    KwWith,
    Lambda,
    Dot,
    Arrow,
    Equals,
    Pipe,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::CapIdent(s) => write!(f, "`{s}`"),
            Tok::Number(s, _) => write!(f, "`{s}`"),
            Tok::KwData => write!(f, "`data`"),
            Tok::KwLet => write!(f, "`let`"),
            Tok::KwIn => write!(f, "`in`"),
            Tok::KwMatch => write!(f, "`match`"),
            Tok::KwWith => write!(f, "`with`"),
            Tok::Lambda => write!(f, "`\\`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Equals => write!(f, "`=`"),
            Tok::Pipe => write!(f, "`|`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Comma => write!(f, "`,`"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Span)>, LangError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let span = Span { line, col };
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c == '-' {
            // Either a `--` comment or the `->` arrow.
            chars.next();
            col += 1;
            match chars.peek() {
                Some('-') => {
                    while let Some(&d) = chars.peek() {
                        if d == '\n' {
                            break;
                        }
                        chars.next();
                        col += 1;
                    }
                    continue;
                }
                Some('>') => {
                    chars.next();
                    col += 1;
                    out.push((Tok::Arrow, span));
                    continue;
                }
                _ => {
                    return Err(LangError {
                        span,
                        message: "stray `-` (expected `--` comment or `->`)".into(),
                    })
                }
            }
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            let mut float = false;
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() {
                    s.push(d);
                    chars.next();
                    col += 1;
                } else if d == '.' && !float {
                    // Only consume the dot when a digit follows; `1.` is
                    // an integer and then a stray dot.
                    let mut ahead = chars.clone();
                    ahead.next();
                    if ahead.peek().is_some_and(|e| e.is_ascii_digit()) {
                        float = true;
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                } else {
                    break;
                }
            }
            out.push((Tok::Number(s, float), span));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                    s.push(d);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            let tok = match s.as_str() {
                "data" => Tok::KwData,
                "let" => Tok::KwLet,
                "in" => Tok::KwIn,
                "match" => Tok::KwMatch,
                "with" => Tok::KwWith,
                _ if s.chars().next().unwrap().is_ascii_uppercase() => Tok::CapIdent(s),
                _ => Tok::Ident(s),
            };
            out.push((tok, span));
            continue;
        }
        let tok = match c {
            '\\' => Tok::Lambda,
            '.' => Tok::Dot,
            '=' => Tok::Equals,
            '|' => Tok::Pipe,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            _ => {
                return Err(LangError {
                    span,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        chars.next();
        col += 1;
        out.push((tok, span));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    data: DataEnv,
    next_id: usize,
    end: Span,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(t, _)| t)
    }

    fn here(&self) -> Span {
        self.toks.get(self.pos).map(|(_, s)| *s).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<(Tok, Span)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, span: Span, message: impl Into<String>) -> Result<T, LangError> {
        Err(LangError {
            span,
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<Span, LangError> {
        match self.next() {
            Some((t, s)) if t == want => Ok(s),
            Some((t, s)) => self.err(s, format!("expected {want}, found {t}")),
            None => self.err(self.end, format!("expected {want}, found end of input")),
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Span), LangError> {
        match self.next() {
            Some((Tok::Ident(s), sp)) => Ok((s, sp)),
            Some((t, sp)) => self.err(sp, format!("expected {what}, found {t}")),
            None => self.err(self.end, format!("expected {what}, found end of input")),
        }
    }

    fn cap_ident(&mut self, what: &str) -> Result<(String, Span), LangError> {
        match self.next() {
            Some((Tok::CapIdent(s), sp)) => Ok((s, sp)),
            Some((t, sp)) => self.err(sp, format!("expected {what}, found {t}")),
            None => self.err(self.end, format!("expected {what}, found end of input")),
        }
    }

    fn node(&mut self, span: Span, kind: TermKind) -> Term {
        let id = self.next_id;
        self.next_id += 1;
        Term { id, span, kind }
    }

    // -- declarations ------------------------------------------------------

    fn datadecl(&mut self) -> Result<(), LangError> {
        self.expect(Tok::KwData)?;
        let (name, nspan) = self.cap_ident("a type name")?;
        if self.data.has_type(&name) {
            return self.err(nspan, format!("type `{name}` is already defined"));
        }
        self.expect(Tok::Equals)?;
        let mut ctors: Vec<(String, Vec<UType>)> = Vec::new();
        loop {
            let cspan = self.here();
            let (cname, args) = self.ctor_decl()?;
            if ctors.iter().any(|(k, _)| k == &cname) {
                return self.err(cspan, format!("constructor `{cname}` is already defined"));
            }
            ctors.push((cname, args));
            if self.peek() == Some(&Tok::Pipe) {
                self.next();
            } else {
                break;
            }
        }
        self.data.push(name, ctors);
        Ok(())
    }

    fn ctor_decl(&mut self) -> Result<(String, Vec<UType>), LangError> {
        let (name, nspan) = self.cap_ident("a constructor name")?;
        if self.data.ctor(&name).is_some() {
            return self.err(nspan, format!("constructor `{name}` is already defined"));
        }
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.next();
            loop {
                args.push(self.ty()?);
                match self.next() {
                    Some((Tok::Comma, _)) => continue,
                    Some((Tok::RParen, _)) => break,
                    Some((t, s)) => return self.err(s, format!("expected `,` or `)`, found {t}")),
                    None => return self.err(self.end, "unterminated constructor argument list"),
                }
            }
        }
        Ok((name, args))
    }

    fn ty(&mut self) -> Result<UType, LangError> {
        let lhs = self.ty_atom()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.next();
            let rhs = self.ty()?;
            Ok(UType::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn ty_atom(&mut self) -> Result<UType, LangError> {
        match self.next() {
            Some((Tok::CapIdent(d), _)) => Ok(UType::Data(d)),
            Some((Tok::LParen, _)) => {
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some((t, s)) => self.err(s, format!("expected a type, found {t}")),
            None => self.err(self.end, "expected a type, found end of input"),
        }
    }

    /// Check every constructor argument type mentions only defined types.
    fn check_decl_types(&self) -> Result<(), LangError> {
        fn walk(env: &DataEnv, t: &UType) -> Result<(), String> {
            match t {
                UType::Data(d) => {
                    if env.has_type(d) {
                        Ok(())
                    } else {
                        Err(format!("unknown type `{d}`"))
                    }
                }
                UType::Arrow(a, b) => {
                    walk(env, a)?;
                    walk(env, b)
                }
                UType::TVar(_) => Ok(()),
            }
        }
        for (d, cs) in self.data.decls() {
            for (k, args) in cs {
                for a in args {
                    if let Err(m) = walk(&self.data, a) {
                        return Err(LangError {
                            span: Span { line: 1, col: 1 },
                            message: format!("in constructor `{k}` of `{d}`: {m}"),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    // -- terms -------------------------------------------------------------

    fn term(&mut self) -> Result<Term, LangError> {
        match self.peek() {
            Some(Tok::Lambda) => {
                let span = self.here();
                self.next();
                let mut params = vec![self.ident("a parameter name")?];
                while matches!(self.peek(), Some(Tok::Ident(_))) {
                    params.push(self.ident("a parameter name")?);
                }
                self.expect(Tok::Dot)?;
                let mut body = self.term()?;
                for (p, _) in params.into_iter().rev() {
                    body = self.node(span, TermKind::Lam(p, Box::new(body)));
                }
                Ok(body)
            }
            Some(Tok::KwLet) => {
                let span = self.here();
                self.next();
                let (x, _) = self.ident("a binding name")?;
                self.expect(Tok::Equals)?;
                let bound = self.term()?;
                self.expect(Tok::KwIn)?;
                let body = self.term()?;
                Ok(self.node(span, TermKind::Let(x, Box::new(bound), Box::new(body))))
            }
            Some(Tok::KwMatch) => {
                let span = self.here();
                self.next();
                let scrut = self.term()?;
                self.expect(Tok::KwWith)?;
                self.expect(Tok::LBrace)?;
                let mut branches = Vec::new();
                loop {
                    let pat = self.pattern()?;
                    self.expect(Tok::Arrow)?;
                    let body = self.term()?;
                    self.expect(Tok::Semi)?;
                    branches.push((pat, body));
                    if self.peek() == Some(&Tok::RBrace) {
                        self.next();
                        break;
                    }
                    if self.peek().is_none() {
                        return self.err(self.end, "unterminated match block");
                    }
                }
                Ok(self.node(span, TermKind::Match(Box::new(scrut), branches)))
            }
            _ => self.appterm(),
        }
    }

    /// True when the upcoming tokens start a new top-level definition
    /// (`name =`), which ends the current application.
    fn at_topdef_boundary(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_))) && self.peek2() == Some(&Tok::Equals)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_)) | Some(Tok::CapIdent(_)) | Some(Tok::LParen) | Some(Tok::Number(_, _))
        )
    }

    fn appterm(&mut self) -> Result<Term, LangError> {
        let mut f = self.atom()?;
        while self.starts_atom() && !self.at_topdef_boundary() {
            let arg = self.atom()?;
            let span = f.span;
            f = self.node(span, TermKind::App(Box::new(f), Box::new(arg)));
        }
        Ok(f)
    }

    fn atom(&mut self) -> Result<Term, LangError> {
        match self.next() {
            Some((Tok::Ident(x), span)) => Ok(self.node(span, TermKind::Var(x))),
            Some((Tok::Number(s, float), span)) => Ok(self.node(span, TermKind::Lit(s, float))),
            Some((Tok::CapIdent(k), span)) => {
                let mut args = Vec::new();
                if self.peek() == Some(&Tok::LParen) {
                    self.next();
                    loop {
                        args.push(self.term()?);
                        match self.next() {
                            Some((Tok::Comma, _)) => continue,
                            Some((Tok::RParen, _)) => break,
                            Some((t, s)) => {
                                return self.err(s, format!("expected `,` or `)`, found {t}"))
                            }
                            None => return self.err(self.end, "unterminated argument list"),
                        }
                    }
                }
                let (dty, arity) = match self.data.ctor(&k) {
                    Some((d, params)) => (d.to_string(), params.len()),
                    None => return self.err(span, format!("unknown constructor `{k}`")),
                };
                if args.len() != arity {
                    return self.err(
                        span,
                        format!(
                            "constructor `{k}` takes {arity} argument{} but got {}",
                            if arity == 1 { "" } else { "s" },
                            args.len()
                        ),
                    );
                }
                Ok(self.node(span, TermKind::Ctor(k, dty, args)))
            }
            Some((Tok::LParen, _)) => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some((t, s)) => self.err(s, format!("expected an expression, found {t}")),
            None => self.err(self.end, "expected an expression, found end of input"),
        }
    }

    fn pattern(&mut self) -> Result<Pattern, LangError> {
        match self.next() {
            Some((Tok::Ident(x), span)) => Ok(Pattern {
                span,
                kind: PatKind::Var(x),
            }),
            Some((Tok::CapIdent(k), span)) => {
                let mut subs = Vec::new();
                if self.peek() == Some(&Tok::LParen) {
                    self.next();
                    loop {
                        subs.push(self.pattern()?);
                        match self.next() {
                            Some((Tok::Comma, _)) => continue,
                            Some((Tok::RParen, _)) => break,
                            Some((t, s)) => {
                                return self.err(s, format!("expected `,` or `)`, found {t}"))
                            }
                            None => return self.err(self.end, "unterminated pattern list"),
                        }
                    }
                }
                let (dty, arity) = match self.data.ctor(&k) {
                    Some((d, params)) => (d.to_string(), params.len()),
                    None => return self.err(span, format!("unknown constructor `{k}`")),
                };
                if subs.len() != arity {
                    return self.err(
                        span,
                        format!(
                            "constructor `{k}` takes {arity} argument{} but the pattern has {}",
                            if arity == 1 { "" } else { "s" },
                            subs.len()
                        ),
                    );
                }
                Ok(Pattern {
                    span,
                    kind: PatKind::Ctor(k, dty, subs),
                })
            }
            Some((t, s)) => self.err(s, format!("expected a pattern, found {t}")),
            None => self.err(self.end, "expected a pattern, found end of input"),
        }
    }
}

/// Parse a whole program. Top-level definitions become nested `let`s whose
/// final body is a reference to the last definition.
pub fn parse_program(text: &str) -> Result<Program, LangError> {
    let toks = lex(text)?;
    let end = toks
        .last()
        .map(|(_, s)| Span {
            line: s.line,
            col: s.col + 1,
        })
        .unwrap_or(Span { line: 1, col: 1 });
    let mut p = Parser {
        toks,
        pos: 0,
        data: DataEnv::new(),
        next_id: 0,
        end,
    };
    while p.peek() == Some(&Tok::KwData) {
        p.datadecl()?;
    }
    p.check_decl_types()?;

    let mut defs: Vec<(String, Span, Term)> = Vec::new();
    while p.peek().is_some() {
        let (name, nspan) = p.ident("a definition name")?;
        if defs.iter().any(|(n, _, _)| n == &name) {
            return Err(LangError {
                span: nspan,
                message: format!("`{name}` is defined twice"),
            });
        }
        p.expect(Tok::Equals)?;
        let body = p.term()?;
        defs.push((name, nspan, body));
    }
    if defs.is_empty() {
        return Err(LangError {
            span: Span { line: 1, col: 1 },
            message: "a program needs at least one definition".into(),
        });
    }

    let (last_name, last_span, _) = defs.last().cloned().unwrap();
    let mut term = p.node(last_span, TermKind::Var(last_name));
    for (name, nspan, body) in defs.into_iter().rev() {
        term = p.node(nspan, TermKind::Let(name, Box::new(body), Box::new(term)));
    }
    Ok(Program {
        data: p.data,
        term,
        nodes: p.next_id,
    })
}
