//! Export of the lemmas as SMT-LIB 2 scripts in quantifier-free linear
//! integer arithmetic, with an optional external solver run.

pub mod encode;
pub mod eval;
pub mod sexp;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::Instant;

use serde::Serialize;

use crate::error::{KrkError, Result};
use crate::formula::Trace;
use crate::lemma::{builtin_lemmas, LemmaSpec};
use crate::strategy::Strategy;

pub use encode::{decode_model, emit_smtlib, encode_lemma_lia, trace_assignment, LiaProblem};
pub use eval::{cross_validate, CrossValidation};
pub use sexp::{check_script, parse, Sexp};

/// Environment variable naming the solver command, e.g. `z3 -in`.
pub const SOLVER_ENV: &str = "KRK_SOLVER_CMD";

/// A counterexample read back from a `sat` answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolverModel {
    pub n: i32,
    pub trace: Trace,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "lowercase")]
pub enum SolverOutcome {
    /// The negated lemma is satisfiable: the lemma fails for some n. Carries
    /// the decoded model when the solver printed one.
    Sat(Option<SolverModel>),
    /// The lemma holds for every board size.
    Unsat,
    Unknown,
    /// No solver configured or it could not be started.
    Unavailable(String),
    Error(String),
}

/// Feeds `script` followed by `(get-model)` to `command` (split on
/// whitespace) on stdin and reads the answer. With `lemma` given, a model
/// is decoded into a trace.
pub fn run_solver(command: &str, script: &str, lemma: Option<&LemmaSpec>) -> SolverOutcome {
    let mut parts = command.split_whitespace();
    let Some(program) = parts.next() else {
        return SolverOutcome::Unavailable("empty solver command".into());
    };
    let child = Command::new(program)
        .args(parts)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn();
    let mut child = match child {
        Ok(c) => c,
        Err(e) => return SolverOutcome::Unavailable(format!("{program}: {e}")),
    };
    if let Some(mut stdin) = child.stdin.take() {
        let fed = stdin
            .write_all(script.as_bytes())
            .and_then(|_| stdin.write_all(b"\n(get-model)\n(exit)\n"));
        if let Err(e) = fed {
            return SolverOutcome::Error(e.to_string());
        }
    }
    let out = match child.wait_with_output() {
        Ok(o) => o,
        Err(e) => return SolverOutcome::Error(e.to_string()),
    };
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines().map(str::trim).skip_while(|l| l.is_empty());
    match lines.next() {
        Some("sat") => {
            let rest: Vec<&str> = lines.collect();
            let model = lemma.and_then(|l| {
                let parsed = parse(&rest.join("\n")).ok()?;
                let (n, trace) = encode::decode_model(l, &parsed).ok()?;
                Some(SolverModel { n, trace })
            });
            SolverOutcome::Sat(model)
        }
        Some("unsat") => SolverOutcome::Unsat,
        Some("unknown") => SolverOutcome::Unknown,
        other => SolverOutcome::Error(
            other
                .map(str::to_string)
                .unwrap_or_else(|| String::from_utf8_lossy(&out.stderr).trim().to_string()),
        ),
    }
}

/// The solver command from the environment, if set.
pub fn solver_from_env() -> Option<String> {
    std::env::var(SOLVER_ENV)
        .ok()
        .filter(|s| !s.trim().is_empty())
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExportedLemma {
    pub lemma: String,
    pub source: &'static str,
    pub path: PathBuf,
    pub commands: usize,
    pub bytes: usize,
    pub outcome: Option<SolverOutcome>,
    pub solver_ms: Option<u128>,
}

/// Writes one `<lemma>.smt2` per built-in lemma into `dir` and, when
/// `solver` is given, runs it on each.
pub fn export_lemmas(
    strategy: &Strategy,
    dir: &Path,
    only: Option<&str>,
    solver: Option<&str>,
) -> Result<Vec<ExportedLemma>> {
    std::fs::create_dir_all(dir).map_err(|e| KrkError::Io(e.to_string()))?;
    let mut out = Vec::new();
    for lemma in builtin_lemmas() {
        if only.is_some_and(|name| name != lemma.name) {
            continue;
        }
        let problem = encode_lemma_lia(&lemma, strategy)?;
        check_script(&problem.commands)?;
        let text = emit_smtlib(&problem);
        let path = dir.join(format!("{}.smt2", lemma.name));
        std::fs::write(&path, &text).map_err(|e| KrkError::Io(e.to_string()))?;
        let (outcome, solver_ms) = match solver {
            Some(cmd) => {
                let start = Instant::now();
                let o = run_solver(cmd, &text, Some(&lemma));
                (Some(o), Some(start.elapsed().as_millis()))
            }
            None => (None, None),
        };
        out.push(ExportedLemma {
            lemma: lemma.name,
            source: "smt",
            path,
            commands: problem.commands.len(),
            bytes: text.len(),
            outcome,
            solver_ms,
        });
    }
    if out.is_empty() {
        return Err(KrkError::InvalidLemma(format!(
            "no built-in lemma named `{}`",
            only.unwrap_or_default()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::BoardSpec;

    #[test]
    fn every_builtin_encodes_to_linear_arithmetic() {
        for st in [
            Strategy::new(BoardSpec::generalized(8).unwrap()),
            Strategy::new(BoardSpec::classic8()),
        ] {
            for lemma in builtin_lemmas() {
                let p = encode_lemma_lia(&lemma, &st).unwrap();
                let stats = check_script(&p.commands).unwrap();
                assert!(stats.assertions >= 3, "{}", lemma.name);
                let text = emit_smtlib(&p);
                let reparsed = parse(&text).unwrap();
                assert_eq!(reparsed, p.commands, "{}", lemma.name);
            }
        }
    }

    #[test]
    fn missing_solver_is_reported_as_unavailable() {
        let out = run_solver("definitely-not-a-solver-binary", "(check-sat)", None);
        assert!(matches!(out, SolverOutcome::Unavailable(_)));
    }

    /// `KRK_SOLVER_CMD`, or z3 when it is on the path.
    fn solver() -> Option<String> {
        solver_from_env().or_else(|| {
            let ok = Command::new("z3")
                .arg("-version")
                .output()
                .is_ok_and(|o| o.status.success());
            ok.then(|| "z3 -in".to_string())
        })
    }

    #[test]
    fn inverted_mate_lemma_yields_a_replayable_model() {
        let Some(cmd) = solver() else { return };
        let mut lemma = crate::lemma::builtin_lemma("immediate_mate").unwrap();
        lemma.post = crate::formula::Formula::not(lemma.post.clone());
        let st = Strategy::new(BoardSpec::generalized(8).unwrap());
        let text = emit_smtlib(&encode_lemma_lia(&lemma, &st).unwrap());
        let SolverOutcome::Sat(Some(model)) = run_solver(&cmd, &text, Some(&lemma)) else {
            panic!("expected a model");
        };
        let st = Strategy::new(BoardSpec::generalized(model.n).unwrap());
        assert!(
            eval::engine_violates(&lemma, &model.trace, &st),
            "{model:?}"
        );
        assert_eq!(
            run_solver(
                &cmd,
                &emit_smtlib(
                    &encode_lemma_lia(&crate::lemma::builtin_lemma("immediate_mate").unwrap(), &st)
                        .unwrap()
                ),
                None
            ),
            SolverOutcome::Unsat
        );
    }

    #[test]
    fn export_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let st = Strategy::new(BoardSpec::generalized(8).unwrap());
        let all = export_lemmas(&st, dir.path(), None, None).unwrap();
        assert_eq!(all.len(), builtin_lemmas().len());
        assert!(all.iter().all(|e| e.path.exists() && e.outcome.is_none()));
        assert!(export_lemmas(&st, dir.path(), Some("nope"), None).is_err());
    }

    #[test]
    fn encoding_agrees_with_the_engine_on_small_boards() {
        for n in [4, 5] {
            let st = Strategy::new(BoardSpec::generalized(n).unwrap());
            for lemma in builtin_lemmas() {
                let cv = cross_validate(&lemma, &st, 150, n as u64).unwrap();
                assert!(
                    cv.agrees(),
                    "{} n={n}: {:?}",
                    lemma.name,
                    cv.disagreements.first()
                );
            }
        }
    }
}
