use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use querylift_core::corpus::ingest_records;
use querylift_core::harness::reference::reference_report;
use querylift_core::harness::render_csv;
use querylift_core::{Index, PreprocessConfig, RefinementRecord, WeightingMode};
use serde_json::Value;

const Q1: &str = "How can I prepare for an interview?";

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus() -> PathBuf {
    root().join("fixtures/career/corpus.jsonl")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_querylift")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn ttest_on_reference_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("table.csv");
    std::fs::write(&csv, render_csv(&reference_report())).unwrap();
    let out = run(&["ttest", p(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let line = stdout(&out);
    let t: f64 = line.split_whitespace().next().unwrap().trim_start_matches("t=").parse().unwrap();
    assert!((t + 2.9444).abs() < 0.0005, "{line}");
    assert!(line.contains(" p=0.0422 "), "{line}");
    assert!(line.contains("df=4"));
}

#[test]
fn ttest_errors_are_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    std::fs::write(&csv, "baseline_top_sim,refined_top_sim\n0.1,0.2\n").unwrap();
    assert_eq!(run(&["ttest", p(&csv)]).status.code(), Some(2));
    std::fs::write(&csv, "a,b\n0.1,0.2\n0.3,0.1\n").unwrap();
    assert_eq!(run(&["ttest", p(&csv)]).status.code(), Some(2));
    let out = run(&["ttest", p(&csv), "--baseline-column", "a", "--refined-column", "b"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn search_scores_are_exact() {
    let out = run(&["search", Q1, "--corpus", p(&corpus())]);
    assert_eq!(out.status.code(), Some(0));
    let cfg = PreprocessConfig::default();
    let index = Index::build(&ingest_records(&corpus(), &cfg).unwrap(), WeightingMode::Paper).unwrap();
    let lib = index.retrieve_top_k(Q1, 5, &cfg).unwrap();
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    for (line, hit) in lines.iter().zip(&lib.hits) {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols[1].parse::<usize>().unwrap(), hit.doc_id);
        assert_eq!(cols[2].parse::<f64>().unwrap().to_bits(), hit.score.to_bits());
        assert_eq!(cols[3], index.doc(hit.doc_id).url);
    }

    let json: Value = serde_json::from_str(&stdout(&run(&["search", Q1, "--corpus", p(&corpus()), "--json"]))).unwrap();
    for (h, want) in json["hits"].as_array().unwrap().iter().zip(&lib.hits) {
        assert_eq!(h["score"].as_f64().unwrap().to_bits(), want.score.to_bits());
    }
}

#[test]
fn search_out_of_vocabulary_warns() {
    let out = run(&["search", "zzzqqq", "--corpus", p(&corpus())]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["search", Q1, "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["search", Q1, "--corpus", p(&corpus()), "--top-k", "0"]).status.code(), Some(1));
    assert_eq!(run(&["search", Q1, "--corpus", p(&corpus()), "--mode", "bm25"]).status.code(), Some(1));
    assert_eq!(run(&["search", Q1]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_two() {
    assert_eq!(run(&["search", Q1, "--corpus", "/nonexistent/corpus.jsonl"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"url\": \"u\", \"title\": \"t\"}\n").unwrap();
    let out = run(&["search", Q1, "--corpus", p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1: missing field text"));
    assert_eq!(run(&["experiment", "--config", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn index_then_search_matches_corpus_search() {
    let dir = tempfile::tempdir().unwrap();
    let index = dir.path().join("index.json");
    let out = run(&["index", "--corpus", p(&corpus()), "--output", p(&index)]);
    assert_eq!(out.status.code(), Some(0));
    let from_index = run(&["search", Q1, "--index", p(&index), "--top-k", "12"]);
    let from_corpus = run(&["search", Q1, "--corpus", p(&corpus()), "--top-k", "12"]);
    assert_eq!(stdout(&from_index), stdout(&from_corpus));
    assert_eq!(stdout(&from_index).lines().count(), 12);
    assert_eq!(run(&["search", Q1, "--index", p(&index), "--mode", "smoothed"]).status.code(), Some(1));
}

#[test]
fn modes_change_scores() {
    let paper = stdout(&run(&["search", Q1, "--corpus", p(&corpus())]));
    let smoothed = stdout(&run(&["search", Q1, "--corpus", p(&corpus()), "--mode", "smoothed"]));
    assert_ne!(paper, smoothed);
}

#[test]
fn refine_prints_record() {
    let out = run(&["refine", Q1, "--config", p(&root().join("fixtures/career/config.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let record: RefinementRecord = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(record.original_query, Q1);
    assert!(record.final_top_similarity() > record.baseline_top_similarity);
    assert!(record.final_query.starts_with(Q1));
}

#[test]
fn experiment_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = run(&[
        "experiment",
        "--config",
        p(&root().join("fixtures/career/config.json")),
        "--output-dir",
        p(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["report.json", "results.csv", "figure.svg"] {
        assert!(out_dir.join(f).is_file(), "{f}");
    }
    let csv = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert!(csv.starts_with("query_id,query_text,baseline_top_sim,refined_top_sim,refined_query_text\r\n"));
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn html_list_source() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.html"), "<title>A</title><p>Mock interview practice</p>").unwrap();
    std::fs::write(dir.path().join("b.html"), "<p>Resume review</p>").unwrap();
    let list = dir.path().join("pages.tsv");
    std::fs::write(
        &list,
        "# url\tpath\nhttps://x.test/mock-interview\ta.html\nhttps://x.test/resume-help\tb.html\n",
    )
    .unwrap();
    let out = run(&["search", "interview", "--html-list", p(&list)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().next().unwrap().ends_with("https://x.test/mock-interview"));
}
