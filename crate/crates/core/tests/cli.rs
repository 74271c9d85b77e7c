mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::fixture;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frameaug"))
        .args(args)
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn demo(cmd: &str, out: &Path, extra: &[&str]) -> Output {
    let lex = fixture("demo/lexicon.jsonl");
    let corpus = fixture("demo/corpus.jsonl");
    let mut args = vec![cmd, "--lexicon", s(&lex), "--corpus", s(&corpus), "--out", s(out)];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn stats_census_of_demo() {
    let lex = fixture("demo/lexicon.jsonl");
    let corpus = fixture("demo/corpus.jsonl");
    let o = run(&["stats", "--lexicon", s(&lex), "--corpus", s(&corpus)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["frames"], 10);
    assert_eq!(v["lus"], 34);
    assert_eq!(v["empty"], 7);
    assert_eq!(v["empty_pct"], 20.6);
    assert_eq!(v["mwe"], 2);
}

#[test]
fn stats_of_empty_corpus_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let lex = fixture("demo/lexicon.jsonl");
    let o = run(&["stats", "--lexicon", s(&lex), "--corpus", s(&empty)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["annotated"].as_u64(), v["sets"].as_u64()), (Some(0), Some(0)));
    assert_eq!(v["empty_pct"], 100.0);
}

#[test]
fn augment_writes_files_matching_stats() {
    let dir = tempfile::tempdir().unwrap();
    let o = demo("augment", dir.path(), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stats: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("stats.json")).unwrap()).unwrap();
    let lines = |f: &str| std::fs::read_to_string(dir.path().join(f)).unwrap().lines().count() as u64;
    assert_eq!(stats["sentences_generated"].as_u64(), Some(lines("augmented.jsonl")));
    assert_eq!(lines("augmented.jsonl"), lines("provenance.jsonl"));
    assert_eq!(stats["empty_lu_count"], 7);
    assert!((stats["coverage_ratio"].as_f64().unwrap() - 5.0 / 7.0).abs() < 1e-12);
}

#[test]
fn augment_is_idempotent_and_thread_count_free() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(demo("augment", a.path(), &["--jobs", "1"]).status.success());
    assert!(demo("augment", b.path(), &["--jobs", "4"]).status.success());
    for f in ["augmented.jsonl", "provenance.jsonl", "stats.json"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn missing_lexicon_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture("demo/corpus.jsonl");
    let o = run(&["augment", "--lexicon", "/nonexistent/frames.jsonl", "--corpus", s(&corpus), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/frames.jsonl"));
}

#[test]
fn parse_error_names_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    let good = std::fs::read_to_string(fixture("demo/corpus.jsonl")).unwrap();
    let first = good.lines().next().unwrap();
    std::fs::write(&bad, format!("{first}\n{{not json\n")).unwrap();
    let lex = fixture("demo/lexicon.jsonl");
    let o = run(&["stats", "--lexicon", s(&lex), "--corpus", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.jsonl") && err.contains("line 2"), "{err}");
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(
        &bad,
        r#"{"id":"x","frame":"Wealthiness","lu":"poor.a","sentence":"a poor man","target":[2,6],"fes":[{"name":"Person","span":[6,10]}],"source":"lexicographic"}"#,
    )
    .unwrap();
    let lex = fixture("demo/lexicon.jsonl");
    let lenient = run(&["validate", "--lexicon", s(&lex), "--corpus", s(&bad)]);
    assert_eq!(lenient.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&lenient.stdout).unwrap();
    assert_eq!(report["valid"], false);
    assert_eq!(report["errors"][0]["rule"], "span_not_token_aligned");
    let strict = run(&["validate", "--lexicon", s(&lex), "--corpus", s(&bad), "--strict"]);
    assert_eq!(strict.status.code(), Some(1));
    let clean = run(&["validate", "--lexicon", s(&lex), "--corpus", s(&fixture("demo/corpus.jsonl")), "--strict"]);
    assert_eq!(clean.status.code(), Some(0));
}

#[test]
fn score_gold_against_itself() {
    let gold = fixture("demo/corpus.jsonl");
    let o = run(&["score", "--corpus", s(&gold), "--corpus", s(&gold)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["frame_id"]["f1"], 1.0);
    assert_eq!(v["arg_id"]["f1"], 1.0);
    assert_eq!(v["per_frame"].as_array().unwrap().len(), 10);
}

#[test]
fn score_with_empty_predictions_lists_missing() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("pred.jsonl");
    std::fs::write(&empty, "").unwrap();
    let gold = fixture("demo/corpus.jsonl");
    let o = run(&["score", "--corpus", s(&gold), "--corpus", s(&empty)]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("demo-001") && err.contains("demo-048"), "{err}");
}

#[test]
fn score_accepts_conll_predictions() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["convert", "--corpus", s(&fixture("demo/corpus.jsonl")), "--format", "conll", "--out", s(dir.path())])
        .status
        .success());
    let o = run(&["score", "--corpus", s(&fixture("demo/corpus.jsonl")), "--corpus", s(&dir.path().join("corpus.conll"))]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["arg_id"]["fp"], 0);
    assert_eq!(v["arg_id"]["f1"], 1.0);
}

#[test]
fn convert_luxml_to_jsonl_to_conll() {
    let a = tempfile::tempdir().unwrap();
    let o = run(&["convert", "--corpus", s(&fixture("luxml")), "--out", s(a.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let warnings = String::from_utf8_lossy(&o.stderr);
    assert!(warnings.contains("no Target"), "{warnings}");
    let b = tempfile::tempdir().unwrap();
    let o = run(&[
        "convert",
        "--lexicon",
        s(&a.path().join("lexicon.jsonl")),
        "--corpus",
        s(&a.path().join("corpus.jsonl")),
        "--format",
        "conll",
        "--out",
        s(b.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let gold = a.path().join("corpus.jsonl");
    let pred = b.path().join("corpus.conll");
    let o = run(&["score", "--corpus", s(&gold), "--corpus", s(&pred)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["arg_id"]["fp"], 0);
    assert_eq!(v["arg_id"]["fn"], 0);
}

#[test]
fn convert_rejects_luxml_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["convert", "--corpus", s(&fixture("demo/corpus.jsonl")), "--format", "luxml", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn split_plan_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    assert!(demo("split", a.path(), &["--seed", "42", "--holdout", "5"]).status.success());
    assert!(demo("split", b.path(), &["--seed", "42", "--holdout", "5"]).status.success());
    assert!(demo("split", c.path(), &["--seed", "43", "--holdout", "5"]).status.success());
    let plan = |d: &Path| std::fs::read(d.join("plan.json")).unwrap();
    assert_eq!(plan(a.path()), plan(b.path()));
    assert_ne!(plan(a.path()), plan(c.path()));
    for f in ["baseline.jsonl", "augmented.jsonl", "baseline.conll", "augmented.conll", "heldout_gold.jsonl"] {
        assert!(a.path().join(f).is_file(), "{f}");
    }
}

#[test]
fn diagnose_flags_regular_forms() {
    let dir = tempfile::tempdir().unwrap();
    let lex = fixture("appendix/lexicon.jsonl");
    let corpus = fixture("appendix/corpus.jsonl");
    let out = dir.path().join("aug");
    assert!(run(&["augment", "--lexicon", s(&lex), "--corpus", s(&corpus), "--out", s(&out), "--no-irregulars"])
        .status
        .success());
    let prov = out.join("provenance.jsonl");
    let o = run(&["diagnose", "--corpus", s(&prov)]);
    assert!(o.status.success());
    let flags: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let flags = flags.as_array().unwrap();
    assert_eq!(flags.len(), 1);
    assert_eq!(flags[0]["annotation_id"], "appendix-1::aug::bend.v");
    assert_eq!(flags[0]["category"], "word_form_mismatch");
    assert_eq!(run(&["diagnose", "--corpus", s(&prov), "--strict"]).status.code(), Some(1));
}

#[test]
fn irregulars_table_override() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("extra.jsonl");
    std::fs::write(&table, r#"{"lemma": "situate", "pos": "v", "forms": {"past": "situate-d", "past_participle": "situate-d"}}"#).unwrap();
    let out = dir.path().join("aug");
    let lex = fixture("appendix/lexicon.jsonl");
    let corpus = fixture("appendix/corpus.jsonl");
    let o = run(&["augment", "--lexicon", s(&lex), "--corpus", s(&corpus), "--out", s(&out), "--irregulars", s(&table)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("augmented.jsonl")).unwrap();
    assert!(text.contains("US banks situate-d in the US"));
    assert!(text.contains("He bent his foot"));
}

#[test]
fn help_mentions_every_flag() {
    let o = run(&["--help"]);
    let help = String::from_utf8_lossy(&o.stdout);
    for flag in ["--lexicon", "--corpus", "--out", "--seed", "--holdout", "--no-irregulars", "--format", "--strict", "--jobs", "--verbose"] {
        assert!(help.contains(flag), "{flag}");
    }
}
