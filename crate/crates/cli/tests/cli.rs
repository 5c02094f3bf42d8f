use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn krk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krk"))
        .args(args)
        .env("RUST_LOG", "warn")
        .env_remove("KRK_SOLVER_CMD")
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let out = krk(&all);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn count_and_classify() {
    assert_eq!(json(&["count", "--n", "8"])["withRook"], 399112);
    assert_eq!(
        json(&["count", "--n", "4", "--side", "w"])["withRook"],
        1312
    );
    let h = json(&["classify", "--n", "8", "--variant", "classic8"]);
    assert_eq!(h["total"], 175168);
    assert_eq!(h["counts"]["Squeeze"], 116504);
}

#[test]
fn retrograde_proves_small_boards_and_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("d5.bin");
    let r = json(&[
        "retrograde",
        "--n",
        "5",
        "--mode",
        "relation",
        "--dump",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(r["allWinning"], true);
    let bytes = std::fs::read(&dump).unwrap();
    assert_eq!(&bytes[..4], b"KRKD");
}

#[test]
fn lemma_failures_have_their_own_exit_code() {
    assert!(krk(&["lemma", "--n", "4"]).status.success());
    let out = krk(&[
        "lemma",
        "--n",
        "5",
        "--name",
        "endgame_mate",
        "--symmetry",
        "off",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAILS"));
    assert_eq!(
        krk(&["lemma", "--n", "5", "--name", "no_such_lemma"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(krk(&["retrograde", "--n", "3"]).status.code(), Some(1));
    assert_eq!(
        krk(&["retrograde", "--n", "6", "--variant", "classic8"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn equivalence_and_refinement_hold() {
    let eq = json(&["equiv", "--n", "5"]);
    assert!(eq.as_array().unwrap().iter().all(|r| r["holds"] == true));
    assert_eq!(json(&["refine", "--n", "6"])["holds"], true);
}

#[test]
fn export_smt_writes_every_lemma() {
    let dir = tempfile::tempdir().unwrap();
    let files = json(&["export-smt", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(files.as_array().unwrap().len(), 12);
    let text = std::fs::read_to_string(dir.path().join("progress.smt2")).unwrap();
    assert!(text.contains("(set-logic QF_LIA)") && text.trim_end().ends_with("(check-sat)"));
}

#[test]
fn terminal_game_accepts_moves_and_quits() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_krk"))
        .args(["play", "--n", "8", "--start", "wk=d3,bk=c7,wr=f5"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"help\nh1\nquit\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("white:") && text.contains("legal:") && text.contains("illegal move"),
        "{text}"
    );
}
