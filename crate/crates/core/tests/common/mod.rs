#![allow(dead_code)]

use std::path::PathBuf;

use querylift_core::{Document, PreprocessConfig, WeightingMode};

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture(rel: &str) -> PathBuf {
    repo_root().join("fixtures").join(rel)
}

pub fn expected() -> serde_json::Value {
    let raw = std::fs::read_to_string(fixture("oracle/expected.json")).expect("expected.json");
    serde_json::from_str(&raw).expect("expected.json parses")
}

pub fn docs_from_tokens(token_lists: &[Vec<String>]) -> Vec<Document> {
    let cfg = PreprocessConfig::without_stopwords();
    token_lists
        .iter()
        .enumerate()
        .map(|(i, toks)| Document::new(i, format!("https://corpus.test/doc-{i}"), String::new(), toks.join(" "), &cfg))
        .collect()
}

/// Dense tf-idf and cosine with plain loops over a term list; shares nothing
/// with the sparse implementation beyond the formulas.
pub fn dense_scores(docs: &[Vec<String>], query: &[String], mode: WeightingMode) -> Vec<f64> {
    let n = docs.len() as f64;
    let mut terms: Vec<String> = Vec::new();
    for d in docs {
        for t in d {
            if !terms.contains(t) {
                terms.push(t.clone());
            }
        }
    }
    let idf: Vec<f64> = terms
        .iter()
        .map(|t| {
            let mut df = 0.0;
            for d in docs {
                if d.contains(t) {
                    df += 1.0;
                }
            }
            match mode {
                WeightingMode::Paper => (n / df).ln(),
                WeightingMode::Smoothed => ((1.0 + n) / (1.0 + df)).ln() + 1.0,
            }
        })
        .collect();
    let embed = |toks: &[String]| -> Vec<f64> {
        let mut v = vec![0.0; terms.len()];
        for (i, t) in terms.iter().enumerate() {
            let mut tf = 0.0;
            for tok in toks {
                if tok == t {
                    tf += 1.0;
                }
            }
            v[i] = tf * idf[i];
        }
        v
    };
    let q = embed(query);
    docs.iter()
        .map(|d| {
            let v = embed(d);
            let (mut dot, mut nq, mut nd) = (0.0, 0.0, 0.0);
            for i in 0..v.len() {
                dot += q[i] * v[i];
                nq += q[i] * q[i];
                nd += v[i] * v[i];
            }
            if nq == 0.0 || nd == 0.0 {
                0.0
            } else {
                dot / (nq.sqrt() * nd.sqrt())
            }
        })
        .collect()
}
