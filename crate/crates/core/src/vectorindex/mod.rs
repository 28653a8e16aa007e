//! TF-IDF vocabulary, sparse vectors, and exhaustive cosine retrieval.
//!
//! Weights are `tf(t, d) * idf(t)` with `tf` the raw count. In
//! [`WeightingMode::Paper`] the idf is `ln(|D| / df(t))`, so a term present in
//! every document weighs zero everywhere. A one-document corpus therefore has
//! an empty vector and can never be retrieved in that mode. The log base is
//! natural; any other base scales every weight by the same constant, which
//! cancels in cosine similarity.
//!
//! [`WeightingMode::Smoothed`] uses `ln((1 + |D|) / (1 + df(t))) + 1`, the
//! common toolkit default. Rows are not unit-normalized, since cosine is
//! scale invariant.

mod persist;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{preprocess, Document, PreprocessConfig};

pub use persist::INDEX_FORMAT_VERSION;

pub type TermId = u32;

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("unknown term {0:?}")]
    UnknownTerm(String),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("index file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightingMode {
    #[default]
    Paper,
    Smoothed,
}

impl WeightingMode {
    pub fn idf(self, n_docs: usize, doc_freq: usize) -> f64 {
        let n = n_docs as f64;
        let df = doc_freq as f64;
        match self {
            Self::Paper => (n / df).ln(),
            Self::Smoothed => ((1.0 + n) / (1.0 + df)).ln() + 1.0,
        }
    }
}

impl fmt::Display for WeightingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Paper => "paper",
            Self::Smoothed => "smoothed",
        })
    }
}

impl FromStr for WeightingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Self::Paper),
            "smoothed" => Ok(Self::Smoothed),
            other => Err(format!("unknown weighting mode {other:?} (expected paper or smoothed)")),
        }
    }
}

/// Term ids are assigned in lexicographic term order, so they are dense and
/// reproducible across builds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    ids: HashMap<String, TermId>,
    doc_freq: Vec<usize>,
    n_docs: usize,
}

impl Vocabulary {
    pub fn from_token_lists<'a, I>(docs: I) -> Self
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        let mut n_docs = 0;
        for tokens in docs {
            n_docs += 1;
            let mut distinct: Vec<&str> = tokens.iter().map(String::as_str).collect();
            distinct.sort_unstable();
            distinct.dedup();
            for t in distinct {
                *df.entry(t).or_default() += 1;
            }
        }
        let (terms, doc_freq): (Vec<String>, Vec<usize>) = df.into_iter().map(|(t, c)| (t.to_owned(), c)).unzip();
        Self::from_parts(terms, doc_freq, n_docs)
    }

    fn from_parts(terms: Vec<String>, doc_freq: Vec<usize>, n_docs: usize) -> Self {
        let ids = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as TermId))
            .collect();
        Self {
            terms,
            ids,
            doc_freq,
            n_docs,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn id(&self, term: &str) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> &str {
        &self.terms[id as usize]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_freq(&self, id: TermId) -> usize {
        self.doc_freq[id as usize]
    }

    pub fn idf(&self, term: &str, mode: WeightingMode) -> Result<f64, IndexError> {
        let id = self.id(term).ok_or_else(|| IndexError::UnknownTerm(term.to_owned()))?;
        Ok(self.idf_by_id(id, mode))
    }

    pub fn idf_by_id(&self, id: TermId, mode: WeightingMode) -> f64 {
        mode.idf(self.n_docs, self.doc_freq(id))
    }
}

/// Non-zero weights in strictly increasing term-id order, with the Euclidean
/// norm cached.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(TermId, f64)>,
    norm: f64,
}

impl SparseVector {
    /// Sorts by term id, sums duplicate ids, and drops entries whose weight is
    /// not strictly positive.
    pub fn new(mut entries: Vec<(TermId, f64)>) -> Self {
        entries.sort_by_key(|&(id, _)| id);
        let mut merged: Vec<(TermId, f64)> = Vec::with_capacity(entries.len());
        for (id, w) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == id => last.1 += w,
                _ => merged.push((id, w)),
            }
        }
        merged.retain(|&(_, w)| w > 0.0);
        Self::from_sorted(merged)
    }

    fn from_sorted(entries: Vec<(TermId, f64)>) -> Self {
        let norm = entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
        Self { entries, norm }
    }

    pub fn entries(&self) -> &[(TermId, f64)] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weight(&self, id: TermId) -> f64 {
        self.entries
            .binary_search_by_key(&id, |&(i, _)| i)
            .map_or(0.0, |pos| self.entries[pos].1)
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        let mut dot = 0.0;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    dot += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        dot
    }
}

pub fn term_frequency(tokens: &[String], term: &str) -> usize {
    tokens.iter().filter(|t| *t == term).count()
}

/// Embeds a token list; out-of-vocabulary tokens are ignored.
pub fn vectorize(tokens: &[String], vocab: &Vocabulary, mode: WeightingMode) -> SparseVector {
    let mut tf: BTreeMap<TermId, usize> = BTreeMap::new();
    for id in tokens.iter().filter_map(|t| vocab.id(t)) {
        *tf.entry(id).or_default() += 1;
    }
    let entries = tf
        .into_iter()
        .map(|(id, count)| (id, count as f64 * vocab.idf_by_id(id, mode)))
        .filter(|&(_, w)| w > 0.0)
        .collect();
    SparseVector::from_sorted(entries)
}

/// Cosine similarity; zero when either vector is empty.
pub fn cosine(a: &SparseVector, b: &SparseVector) -> f64 {
    if a.norm == 0.0 || b.norm == 0.0 {
        return 0.0;
    }
    (a.dot(b) / (a.norm * b.norm)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedHit {
    pub doc_id: usize,
    pub score: f64,
}

/// Score descending, then doc id ascending.
pub fn hit_order(a: &RankedHit, b: &RankedHit) -> Ordering {
    b.score.total_cmp(&a.score).then(a.doc_id.cmp(&b.doc_id))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Retrieval {
    pub hits: Vec<RankedHit>,
    /// No query token was in the vocabulary (or every match had zero idf).
    pub out_of_vocabulary: bool,
}

impl Retrieval {
    pub fn top_score(&self) -> f64 {
        self.hits.first().map_or(0.0, |h| h.score)
    }
}

/// Source fields kept alongside each vector for display and slug mining.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocInfo {
    pub url: String,
    pub title: String,
    pub text: String,
}

/// Immutable once built; safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Index {
    vocabulary: Vocabulary,
    doc_vectors: Vec<SparseVector>,
    docs: Vec<DocInfo>,
    mode: WeightingMode,
}

impl Index {
    pub fn build(docs: &[Document], mode: WeightingMode) -> Result<Self, IndexError> {
        if docs.is_empty() {
            return Err(IndexError::EmptyCorpus);
        }
        let vocabulary = Vocabulary::from_token_lists(docs.iter().map(|d| d.tokens.as_slice()));
        let doc_vectors = docs.iter().map(|d| vectorize(&d.tokens, &vocabulary, mode)).collect();
        let docs = docs
            .iter()
            .map(|d| DocInfo {
                url: d.url.clone(),
                title: d.title.clone(),
                text: d.text.clone(),
            })
            .collect();
        Ok(Self {
            vocabulary,
            doc_vectors,
            docs,
            mode,
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn doc_vectors(&self) -> &[SparseVector] {
        &self.doc_vectors
    }

    pub fn doc(&self, doc_id: usize) -> &DocInfo {
        &self.docs[doc_id]
    }

    pub fn docs(&self) -> &[DocInfo] {
        &self.docs
    }

    pub fn mode(&self) -> WeightingMode {
        self.mode
    }

    pub fn n_docs(&self) -> usize {
        self.doc_vectors.len()
    }

    pub fn embed_query(&self, query_text: &str, config: &PreprocessConfig) -> SparseVector {
        vectorize(&preprocess(query_text, config), &self.vocabulary, self.mode)
    }

    /// Scores `query` against every document and keeps the best `k`.
    pub fn rank(&self, query: &SparseVector, k: usize) -> Vec<RankedHit> {
        let mut hits: Vec<RankedHit> = self
            .doc_vectors
            .iter()
            .enumerate()
            .map(|(doc_id, v)| RankedHit {
                doc_id,
                score: cosine(query, v),
            })
            .collect();
        hits.sort_by(hit_order);
        hits.truncate(k);
        hits
    }

    pub fn retrieve_top_k(
        &self,
        query_text: &str,
        k: usize,
        config: &PreprocessConfig,
    ) -> Result<Retrieval, IndexError> {
        if k == 0 {
            return Err(IndexError::InvalidK);
        }
        let query = self.embed_query(query_text, config);
        if query.is_empty() {
            return Ok(Retrieval {
                hits: Vec::new(),
                out_of_vocabulary: true,
            });
        }
        Ok(Retrieval {
            hits: self.rank(&query, k),
            out_of_vocabulary: false,
        })
    }
}

pub fn build_index(docs: &[Document], mode: WeightingMode) -> Result<Index, IndexError> {
    Index::build(docs, mode)
}
