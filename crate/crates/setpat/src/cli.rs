//! Command-line surface: `solve` for constraint files, `analyze` for
//! programs, `translate` for inspecting the monadic and SMT-LIB forms.
//!
//! Exit codes are a function of verdicts only. `solve`: 0 sat, 1 unsat,
//! 2 unknown. `analyze`: 0 all safe, 1 any unsafe, 2 any undecided.
//! Both use 3 for usage, input, or backend-configuration errors, as does
//! `translate`. The first token of every report line is machine-parseable;
//! diagnostics are indented continuations.

use crate::constraints::{
    eliminate_projections, index_base_predicates, parse_constraint_file, print_formula, Formula,
    Signature,
};
use crate::lang::{
    analyze_program, data_signature, parse_program, typecheck, AnalysisReport, AnalyzeConfig,
    DefVerdict,
};
use crate::monadic::{formula_to_monadic, print_theory, reduce_theory};
use crate::oracle::Budget;
use crate::smt::{
    encode_formula, prepare_formula, Backend, BackendConfig, EncodeOptions, SolverConfig, Verdict,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "setpat",
    version,
    about = "Set-constraint satisfiability and pattern-match safety analysis"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide satisfiability of a constraint file.
    Solve(SolveArgs),
    /// Check every definition of a program for match safety.
    Analyze(AnalyzeArgs),
    /// Print a constraint file's monadic or SMT-LIB translation.
    Translate(TranslateArgs),
}

#[derive(Args)]
struct BackendOpts {
    /// Decision procedure: `oracle`, `smt`, or a solver executable path.
    #[arg(long)]
    backend: Option<String>,
    /// Solver executable for the SMT backend (or set SETPAT_SMT).
    #[arg(long)]
    backend_path: Option<String>,
    /// Extra solver argument, before the script path. Repeatable.
    #[arg(long = "backend-arg")]
    backend_args: Vec<String>,
    /// Solver wall-clock limit in milliseconds.
    #[arg(long, default_value_t = 60_000)]
    timeout: u64,
    /// Largest base-predicate count the oracle will search.
    #[arg(long)]
    oracle_max_n: Option<usize>,
    /// Oracle elementary-step limit.
    #[arg(long)]
    oracle_max_checks: Option<u64>,
    /// Skip the pre-solver simplification passes.
    #[arg(long)]
    no_simplify: bool,
    /// Assert that every domain element lies in some symbol's image.
    #[arg(long)]
    image_axiom: bool,
    /// Request and print a model for satisfiable instances.
    #[arg(long)]
    get_model: bool,
    /// Override the emitted `(set-logic ...)` tag.
    #[arg(long)]
    logic: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    /// Constraint file to decide.
    file: PathBuf,
    #[command(flatten)]
    backend: BackendOpts,
    /// Also write the emitted SMT-LIB script to this path.
    #[arg(long, value_name = "PATH")]
    dump_smtlib: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Program to analyze.
    file: PathBuf,
    #[command(flatten)]
    backend: BackendOpts,
    /// Annotate pattern bindings with top instead of projections.
    #[arg(long)]
    approx_proj: bool,
    /// Write every definition's generated constraint to this path.
    #[arg(long, value_name = "PATH")]
    dump_constraints: Option<PathBuf>,
    /// Write one SMT-LIB script per definition into this directory.
    #[arg(long, value_name = "DIR")]
    dump_smtlib: Option<PathBuf>,
}

#[derive(Args)]
struct TranslateArgs {
    /// Constraint file to translate.
    file: PathBuf,
    /// Target form.
    #[arg(long, value_enum)]
    to: Target,
    /// Skip the pre-solver simplification passes (smtlib target).
    #[arg(long)]
    no_simplify: bool,
    /// Assert that every domain element lies in some symbol's image.
    #[arg(long)]
    image_axiom: bool,
    /// Emit a model request after check-sat.
    #[arg(long)]
    get_model: bool,
    /// Override the emitted `(set-logic ...)` tag.
    #[arg(long)]
    logic: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Monadic,
    Smtlib,
}

/// Anything that ends the run with exit 3.
struct CliError(String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

type CliResult = Result<i32, CliError>;

/// Runs the CLI and returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help and version are successful terminations, not usage errors.
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.cmd {
        Cmd::Solve(a) => cmd_solve(&a),
        Cmd::Analyze(a) => cmd_analyze(&a),
        Cmd::Translate(a) => cmd_translate(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError(msg)) => {
            eprintln!("setpat: {msg}");
            3
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError(format!("{}: {e}", path.display())))
}

/// Resolves the backend selection shared by `solve` and `analyze`.
///
/// Precedence: `--backend` (a literal `oracle`/`smt` or an executable
/// path), then `--backend-path`, then the SETPAT_SMT environment variable,
/// then the in-process oracle.
fn build_solver_config(opts: &BackendOpts, default_budget: Budget) -> Result<SolverConfig, CliError> {
    let budget = Budget {
        max_n: opts.oracle_max_n.unwrap_or(default_budget.max_n),
        max_checks: opts.oracle_max_checks.unwrap_or(default_budget.max_checks),
    };
    let external = |path: String| {
        let mut b = BackendConfig::new(path);
        b.args = opts.backend_args.clone();
        b.timeout_ms = opts.timeout;
        Backend::External(b)
    };
    let env_path = || std::env::var("SETPAT_SMT").ok().filter(|p| !p.is_empty());
    let configured_path =
        || opts.backend_path.clone().or_else(env_path);
    let backend = match opts.backend.as_deref() {
        Some("oracle") => Backend::Oracle(budget),
        Some("smt") => external(configured_path().ok_or(CliError(
            "--backend smt needs --backend-path or SETPAT_SMT".into(),
        ))?),
        Some(path) => external(path.to_string()),
        None => match configured_path() {
            Some(p) => external(p),
            None => Backend::Oracle(budget),
        },
    };
    Ok(SolverConfig {
        backend,
        simplify: !opts.no_simplify,
        encode: encode_options(opts.image_axiom, opts.get_model, opts.logic.as_deref()),
    })
}

fn encode_options(image_axiom: bool, get_model: bool, logic: Option<&str>) -> EncodeOptions {
    let mut enc = EncodeOptions::default();
    enc.image_axiom = image_axiom;
    enc.get_model = get_model;
    if let Some(l) = logic {
        enc.logic = l.to_string();
    }
    enc
}

/// The one SMT-LIB emitter behind `translate --to smtlib` and every
/// `--dump-smtlib` flag: same preparation, same script, byte for byte.
/// Formulas the pipeline decides without encoding yield a comment.
fn smtlib_text(c: &Formula, sig: &Signature, simplify: bool, enc: &EncodeOptions) -> String {
    let prepared = prepare_formula(c, sig, simplify);
    if !sig.has_ground_term() {
        return "; not encoded: no arity-0 symbol, the universe is empty\n".into();
    }
    let idx = index_base_predicates(&prepared);
    match encode_formula(&prepared, sig, &idx, enc) {
        Ok(script) => script.to_smtlib(),
        Err(e) => format!("; not encoded: {e}\n"),
    }
}

fn cmd_solve(a: &SolveArgs) -> CliResult {
    let text = read_input(&a.file)?;
    let (sig, formula) = parse_constraint_file(&text)
        .map_err(|e| CliError(format!("{}:{e}", a.file.display())))?;
    let cfg = build_solver_config(&a.backend, Budget::default())?;
    if let Some(path) = &a.dump_smtlib {
        let script = smtlib_text(&formula, &sig, cfg.simplify, &cfg.encode);
        std::fs::write(path, script)
            .map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    }
    let verdict = crate::smt::solve(&formula, &sig, &cfg);
    println!("{}", verdict.word());
    match &verdict {
        Verdict::Sat(detail) if a.backend.get_model => {
            // The payload's first token repeats the verdict when the
            // external solver produced it; print only what follows.
            let rest = detail.strip_prefix("sat").unwrap_or(detail).trim();
            if !rest.is_empty() {
                println!("{rest}");
            }
        }
        Verdict::Unknown(reason) => eprintln!("setpat: undecided: {reason}"),
        _ => {}
    }
    Ok(match verdict {
        Verdict::Sat(_) => 0,
        Verdict::Unsat => 1,
        Verdict::Unknown(_) => 2,
    })
}

fn verdict_word(v: &DefVerdict) -> &'static str {
    match v {
        DefVerdict::Safe => "Safe",
        DefVerdict::Unsafe(_) => "Unsafe",
        DefVerdict::Unknown(_) => "Unknown",
    }
}

fn print_report(report: &AnalysisReport) {
    for def in &report.defs {
        println!("{} {} {}", def.name, def.span, verdict_word(&def.verdict));
        match &def.verdict {
            DefVerdict::Unsafe(spans) => {
                for s in spans {
                    println!("  match at {s} can be reached by an uncovered constructor");
                }
            }
            DefVerdict::Unknown(reason) => println!("  undecided: {reason}"),
            DefVerdict::Safe => {}
        }
    }
}

fn dump_constraints(report: &AnalysisReport, path: &Path) -> Result<(), CliError> {
    let mut out = String::new();
    for def in &report.defs {
        out.push_str(&format!("-- {} {} {}\n", def.name, def.span, verdict_word(&def.verdict)));
        out.push_str(&print_formula(&def.constraint));
        out.push_str("\n\n");
    }
    std::fs::write(path, out).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn dump_scripts(
    report: &AnalysisReport,
    sig: &Signature,
    cfg: &SolverConfig,
    dir: &Path,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError(format!("{}: {e}", dir.display())))?;
    for def in &report.defs {
        let script = smtlib_text(&def.constraint, sig, cfg.simplify, &cfg.encode);
        let path = dir.join(format!("{}.smt2", def.name));
        std::fs::write(&path, script)
            .map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_analyze(a: &AnalyzeArgs) -> CliResult {
    let text = read_input(&a.file)?;
    let prefix = a.file.display();
    let program =
        parse_program(&text).map_err(|e| CliError(format!("{prefix}:{e}")))?;
    let typing = typecheck(&program.data, &program.term, program.nodes)
        .map_err(|e| CliError(format!("{prefix}:{e}")))?;
    let defaults = AnalyzeConfig::default();
    let default_budget = match defaults.solver.backend {
        Backend::Oracle(b) => b,
        Backend::External(_) => Budget::default(),
    };
    let cfg = AnalyzeConfig {
        solver: build_solver_config(&a.backend, default_budget)?,
        approx_proj: a.approx_proj,
    };
    let report = analyze_program(&program, &typing, &cfg);
    print_report(&report);
    if let Some(path) = &a.dump_constraints {
        dump_constraints(&report, path)?;
    }
    if let Some(dir) = &a.dump_smtlib {
        dump_scripts(&report, &data_signature(&program.data), &cfg.solver, dir)?;
    }
    Ok(if report.any_unsafe() {
        1
    } else if report.any_unknown() {
        2
    } else {
        0
    })
}

fn cmd_translate(a: &TranslateArgs) -> CliResult {
    let text = read_input(&a.file)?;
    let (sig, formula) = parse_constraint_file(&text)
        .map_err(|e| CliError(format!("{}:{e}", a.file.display())))?;
    match a.to {
        Target::Monadic => {
            let eliminated = eliminate_projections(&formula, &sig);
            let theory = reduce_theory(&formula_to_monadic(&eliminated, &sig), &sig);
            print!("{}", print_theory(&theory));
        }
        Target::Smtlib => {
            let enc = encode_options(a.image_axiom, a.get_model, a.logic.as_deref());
            print!("{}", smtlib_text(&formula, &sig, !a.no_simplify, &enc));
        }
    }
    Ok(0)
}
