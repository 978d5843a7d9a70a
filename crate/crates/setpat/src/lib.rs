//! Set-constraint satisfiability via SMT, plus a pattern-match safety
//! analysis for a small functional language built on top of it.
//!
//! The pipeline: parse a constraint file ([`constraints`]), compile away
//! projections, pre-simplify ([`simplify`]), translate to monadic
//! first-order logic over a finite universe ([`monadic`]), and decide with
//! either a bit-vector SMT encoding ([`smt`]) or a brute-force finite-model
//! enumerator ([`oracle`]). The [`lang`] module layers a tiny typed language
//! with datatypes and pattern matching on top, generating one satisfiability
//! query per definition to classify each `match` as safe or unsafe.

pub mod cli;
pub mod constraints;
pub mod lang;
pub mod monadic;
pub mod oracle;
pub mod simplify;
pub mod smt;
