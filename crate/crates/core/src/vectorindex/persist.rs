//! Index dump format (JSON, one document):
//!
//! ```text
//! {
//!   "format": "querylift-index",
//!   "version": 1,
//!   "mode": "paper" | "smoothed",
//!   "n_docs": <int>,
//!   "terms": [ { "term": <string>, "df": <int> }, ... ],      // position = term id
//!   "docs":  [ { "url", "title", "text",
//!                "entries": [ [<term id>, <weight>], ... ] }, ... ]  // position = doc id
//! }
//! ```
//!
//! Weights are written with shortest round-trip formatting and parsed back
//! exactly, so a loaded index scores bit-for-bit like the one that was saved.
//! Norms are recomputed on load.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DocInfo, Index, IndexError, SparseVector, TermId, Vocabulary, WeightingMode};

pub const INDEX_FORMAT_VERSION: u32 = 1;
const FORMAT_TAG: &str = "querylift-index";

#[derive(Serialize, Deserialize)]
struct TermRecord {
    term: String,
    df: usize,
}

#[derive(Serialize, Deserialize)]
struct DocRecord {
    url: String,
    title: String,
    text: String,
    entries: Vec<(TermId, f64)>,
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    format: String,
    version: u32,
    mode: WeightingMode,
    n_docs: usize,
    terms: Vec<TermRecord>,
    docs: Vec<DocRecord>,
}

fn bad(msg: impl Into<String>) -> IndexError {
    IndexError::Format(msg.into())
}

impl Index {
    pub fn to_json(&self) -> String {
        let file = IndexFile {
            format: FORMAT_TAG.to_owned(),
            version: INDEX_FORMAT_VERSION,
            mode: self.mode,
            n_docs: self.vocabulary.n_docs,
            terms: self
                .vocabulary
                .terms
                .iter()
                .zip(&self.vocabulary.doc_freq)
                .map(|(term, &df)| TermRecord { term: term.clone(), df })
                .collect(),
            docs: self
                .docs
                .iter()
                .zip(&self.doc_vectors)
                .map(|(d, v)| DocRecord {
                    url: d.url.clone(),
                    title: d.title.clone(),
                    text: d.text.clone(),
                    entries: v.entries.clone(),
                })
                .collect(),
        };
        serde_json::to_string(&file).expect("index always serializes")
    }

    pub fn from_json(raw: &str) -> Result<Self, IndexError> {
        let file: IndexFile = serde_json::from_str(raw).map_err(|e| bad(e.to_string()))?;
        if file.format != FORMAT_TAG {
            return Err(bad(format!("unexpected format tag {:?}", file.format)));
        }
        if file.version != INDEX_FORMAT_VERSION {
            return Err(bad(format!("unsupported version {}", file.version)));
        }
        if file.docs.len() != file.n_docs || file.n_docs == 0 {
            return Err(bad("n_docs does not match the document list"));
        }
        let n_terms = file.terms.len();
        let mut terms = Vec::with_capacity(n_terms);
        let mut doc_freq = Vec::with_capacity(n_terms);
        for rec in file.terms {
            if rec.df == 0 || rec.df > file.n_docs {
                return Err(bad(format!("term {:?} has document frequency {}", rec.term, rec.df)));
            }
            terms.push(rec.term);
            doc_freq.push(rec.df);
        }
        if terms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("terms must be unique and sorted"));
        }
        let vocabulary = Vocabulary::from_parts(terms, doc_freq, file.n_docs);

        let mut docs = Vec::with_capacity(file.n_docs);
        let mut doc_vectors = Vec::with_capacity(file.n_docs);
        for (doc_id, rec) in file.docs.into_iter().enumerate() {
            let sorted = rec.entries.windows(2).all(|w| w[0].0 < w[1].0);
            let valid = rec
                .entries
                .iter()
                .all(|&(id, w)| (id as usize) < n_terms && w > 0.0 && w.is_finite());
            if !sorted || !valid {
                return Err(bad(format!("document {doc_id} has invalid entries")));
            }
            doc_vectors.push(SparseVector::from_sorted(rec.entries));
            docs.push(DocInfo {
                url: rec.url,
                title: rec.title,
                text: rec.text,
            });
        }
        Ok(Self {
            vocabulary,
            doc_vectors,
            docs,
            mode: file.mode,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), IndexError> {
        let io = |source| IndexError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut out = BufWriter::new(File::create(path).map_err(io)?);
        out.write_all(self.to_json().as_bytes()).map_err(io)?;
        out.write_all(b"\n").map_err(io)?;
        out.flush().map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self, IndexError> {
        let io = |source| IndexError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut raw = String::new();
        std::io::Read::read_to_string(&mut BufReader::new(File::open(path).map_err(io)?), &mut raw).map_err(io)?;
        Self::from_json(&raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, PreprocessConfig};

    fn corpus() -> Vec<Document> {
        let cfg = PreprocessConfig::default();
        [
            "Interview preparation and practice",
            "Resume writing with online tools",
            "Practice interview questions online",
        ]
        .iter()
        .enumerate()
        .map(|(i, t)| Document::new(i, format!("https://x.test/doc-{i}"), format!("T{i}"), t.to_string(), &cfg))
        .collect()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let cfg = PreprocessConfig::default();
        for mode in [WeightingMode::Paper, WeightingMode::Smoothed] {
            let index = Index::build(&corpus(), mode).unwrap();
            let loaded = Index::from_json(&index.to_json()).unwrap();
            assert_eq!(loaded, index);
            let a = index.retrieve_top_k("online interview practice", 3, &cfg).unwrap();
            let b = loaded.retrieve_top_k("online interview practice", 3, &cfg).unwrap();
            for (x, y) in a.hits.iter().zip(&b.hits) {
                assert_eq!(x.score.to_bits(), y.score.to_bits());
            }
        }
    }

    #[test]
    fn rejects_bad_files() {
        let good = Index::build(&corpus(), WeightingMode::Paper).unwrap().to_json();
        assert!(Index::from_json("{}").is_err());
        assert!(Index::from_json(&good.replace("\"version\":1", "\"version\":9")).is_err());
        assert!(Index::from_json(&good.replace("querylift-index", "other")).is_err());
        assert!(Index::from_json(&good.replace("\"n_docs\":3", "\"n_docs\":2")).is_err());
    }
}
