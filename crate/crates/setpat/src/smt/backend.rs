//! External solver invocation.
//!
//! Serializes a script to a temporary file, runs the configured executable
//! on it with a wall-clock timeout, and maps the first output token to a
//! verdict. Output is captured through files rather than pipes so a large
//! model dump cannot deadlock the child.

use super::{SmtScript, UnknownReason, Verdict};
use std::io::Write;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

/// How to run the external solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendConfig {
    /// Executable path or name resolved via PATH.
    pub path: String,
    /// Extra arguments placed before the script file argument.
    pub args: Vec<String>,
    pub timeout_ms: u64,
}

impl BackendConfig {
    pub fn new(path: impl Into<String>) -> Self {
        BackendConfig { path: path.into(), args: Vec::new(), timeout_ms: 60_000 }
    }
}

fn backend_error(msg: impl Into<String>) -> Verdict {
    Verdict::Unknown(UnknownReason::BackendError(msg.into()))
}

/// Runs `cfg` on the serialized script and parses the verdict.
pub fn run_backend(script: &SmtScript, cfg: &BackendConfig) -> Verdict {
    run_backend_text(&script.to_smtlib(), cfg)
}

/// As [`run_backend`], for pre-serialized script text.
pub fn run_backend_text(text: &str, cfg: &BackendConfig) -> Verdict {
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return backend_error(format!("cannot create temp dir: {e}")),
    };
    let script_path = dir.path().join("query.smt2");
    let stdout_path = dir.path().join("stdout.txt");
    let stderr_path = dir.path().join("stderr.txt");
    if let Err(e) = std::fs::File::create(&script_path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
    {
        return backend_error(format!("cannot write script: {e}"));
    }
    let stdout_file = match std::fs::File::create(&stdout_path) {
        Ok(f) => f,
        Err(e) => return backend_error(format!("cannot create capture file: {e}")),
    };
    let stderr_file = match std::fs::File::create(&stderr_path) {
        Ok(f) => f,
        Err(e) => return backend_error(format!("cannot create capture file: {e}")),
    };

    let mut child = match Command::new(&cfg.path)
        .args(&cfg.args)
        .arg(&script_path)
        .stdin(Stdio::null())
        .stdout(stdout_file)
        .stderr(stderr_file)
        .spawn()
    {
        Ok(c) => c,
        Err(e) => return backend_error(format!("cannot run `{}`: {e}", cfg.path)),
    };

    let deadline = Instant::now() + Duration::from_millis(cfg.timeout_ms);
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) => {
                if Instant::now() >= deadline {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Verdict::Unknown(UnknownReason::Timeout);
                }
                std::thread::sleep(Duration::from_millis(5));
            }
            Err(e) => return backend_error(format!("wait failed: {e}")),
        }
    };

    let stdout = std::fs::read_to_string(&stdout_path).unwrap_or_default();
    if !status.success() {
        let stderr = std::fs::read_to_string(&stderr_path).unwrap_or_default();
        return backend_error(format!(
            "`{}` exited with {status}: {}",
            cfg.path,
            stderr.trim().lines().next().unwrap_or("")
        ));
    }
    match stdout.split_whitespace().next() {
        Some("sat") => Verdict::Sat(stdout),
        Some("unsat") => Verdict::Unsat,
        Some("unknown") => Verdict::Unknown(UnknownReason::SolverSaidUnknown),
        Some(other) => backend_error(format!("unrecognized solver output `{other}`")),
        None => backend_error("empty solver output"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::os::unix::fs::PermissionsExt;

    fn fake_backend(dir: &std::path::Path, body: &str) -> String {
        let path = dir.join("fake-solver");
        std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
        let mut perms = std::fs::metadata(&path).unwrap().permissions();
        perms.set_mode(0o755);
        std::fs::set_permissions(&path, perms).unwrap();
        path.to_string_lossy().into_owned()
    }

    fn cfg_for(body: &str, dir: &tempfile::TempDir) -> BackendConfig {
        BackendConfig::new(fake_backend(dir.path(), body))
    }

    #[test]
    fn parses_sat_with_model_text() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = cfg_for("echo sat; echo '(model)'", &dir);
        let v = run_backend_text("(check-sat)", &cfg);
        assert_eq!(v, Verdict::Sat("sat\n(model)\n".into()));
    }

    #[test]
    fn parses_unsat_and_unknown() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(
            run_backend_text("x", &cfg_for("echo unsat", &dir)),
            Verdict::Unsat
        );
        assert_eq!(
            run_backend_text("x", &cfg_for("echo unknown", &dir)),
            Verdict::Unknown(UnknownReason::SolverSaidUnknown)
        );
    }

    #[test]
    fn garbage_output_is_backend_error() {
        let dir = tempfile::tempdir().unwrap();
        let v = run_backend_text("x", &cfg_for("echo flurble", &dir));
        assert!(matches!(v, Verdict::Unknown(UnknownReason::BackendError(_))), "{v}");
    }

    #[test]
    fn nonzero_exit_is_backend_error() {
        let dir = tempfile::tempdir().unwrap();
        let v = run_backend_text("x", &cfg_for("echo sat; exit 3", &dir));
        assert!(matches!(v, Verdict::Unknown(UnknownReason::BackendError(_))), "{v}");
    }

    #[test]
    fn missing_executable_is_backend_error() {
        let cfg = BackendConfig::new("/nonexistent/solver-binary");
        let v = run_backend_text("x", &cfg);
        assert!(matches!(v, Verdict::Unknown(UnknownReason::BackendError(_))), "{v}");
    }

    #[test]
    fn slow_backend_times_out() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = cfg_for("sleep 5; echo sat", &dir);
        cfg.timeout_ms = 50;
        let start = Instant::now();
        let v = run_backend_text("x", &cfg);
        assert_eq!(v, Verdict::Unknown(UnknownReason::Timeout));
        assert!(start.elapsed() < Duration::from_secs(3));
    }

    #[test]
    fn backend_receives_the_script_file() {
        let dir = tempfile::tempdir().unwrap();
        // The harness passes the script path as the last argument.
        let cfg = cfg_for("grep -q check-sat \"$1\" && echo unsat || echo sat", &dir);
        assert_eq!(run_backend_text("(check-sat)\n", &cfg), Verdict::Unsat);
        assert!(run_backend_text("(nope)\n", &cfg).is_sat());
    }
}
