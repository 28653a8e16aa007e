//! Query refinement from the URLs of top-ranked documents.
//!
//! Each round retrieves the current query, mines hyphenated path segments
//! ("slugs") from the URLs of the best documents, picks descriptor phrases
//! that share a token with the query, and appends the new material. Slugs
//! are appended verbatim and as their split words: URLs carry the slug while
//! page bodies carry the words.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{parse_word_list, preprocess, CorpusError, PreprocessConfig};
use crate::vectorindex::{Index, IndexError, Retrieval};

/// Seed lexicon bundled with the crate.
pub const DEFAULT_DESCRIPTORS: &str = include_str!("../data/descriptors.txt");

#[derive(Debug, Error)]
pub enum RefineError {
    #[error("invalid refinement config: {0}")]
    InvalidConfig(String),
    #[error("invalid term {0:?}")]
    InvalidTerm(String),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

fn slug_pattern() -> &'static Regex {
    static PATTERN: OnceLock<Regex> = OnceLock::new();
    PATTERN.get_or_init(|| Regex::new(r"^[a-z0-9]+(?:-[a-z0-9]+)+$").expect("valid slug regex"))
}

fn extension_pattern() -> &'static Regex {
    static PATTERN: OnceLock<Regex> = OnceLock::new();
    PATTERN.get_or_init(|| Regex::new(r"^(.*)\.[A-Za-z0-9]{1,5}$").expect("valid extension regex"))
}

pub fn is_slug(s: &str) -> bool {
    slug_pattern().is_match(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainTerm {
    pub slug: String,
    pub frequency: usize,
}

impl DomainTerm {
    /// Validates `slug` against the slug pattern.
    pub fn new(slug: impl Into<String>, frequency: usize) -> Result<Self, RefineError> {
        let slug = slug.into();
        if !is_slug(&slug) || frequency == 0 {
            return Err(RefineError::InvalidTerm(slug));
        }
        Ok(Self { slug, frequency })
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.slug.split('-')
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SlugExtraction {
    /// At most `limit` terms, frequency descending then slug ascending.
    pub terms: Vec<DomainTerm>,
    /// URLs that had a scheme but failed to parse.
    pub unparseable_urls: usize,
    /// Segments that matched the slug pattern, before the limit was applied.
    pub matched_segments: usize,
}

// Path of a URL; inputs without "://" are taken as bare paths.
fn url_path(raw: &str) -> Option<String> {
    if raw.contains("://") {
        let parsed = url::Url::parse(raw).ok()?;
        Some(parsed.path().to_owned())
    } else {
        let end = raw.find(['?', '#']).unwrap_or(raw.len());
        Some(raw[..end].to_owned())
    }
}

fn normalize_segment(segment: &str) -> String {
    let stem = extension_pattern()
        .captures(segment)
        .and_then(|c| c.get(1))
        .map_or(segment, |m| m.as_str());
    stem.to_ascii_lowercase()
}

pub fn extract_domain_terms_detailed<S: AsRef<str>>(urls: &[S], limit: usize) -> SlugExtraction {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut out = SlugExtraction::default();
    for raw in urls {
        let Some(path) = url_path(raw.as_ref()) else {
            out.unparseable_urls += 1;
            continue;
        };
        for segment in path.split('/').map(normalize_segment) {
            if is_slug(&segment) {
                out.matched_segments += 1;
                *counts.entry(segment).or_default() += 1;
            }
        }
    }
    let mut terms: Vec<DomainTerm> = counts
        .into_iter()
        .map(|(slug, frequency)| DomainTerm { slug, frequency })
        .collect();
    // BTreeMap order is already slug-ascending; a stable sort keeps it for ties.
    terms.sort_by_key(|t| std::cmp::Reverse(t.frequency));
    terms.truncate(limit);
    out.terms = terms;
    out
}

/// Mines slugs from URL paths. Query strings and fragments are ignored, a
/// trailing extension of up to five alphanumerics is stripped, and segments
/// are lowercased before matching.
pub fn extract_domain_terms<S: AsRef<str>>(urls: &[S], limit: usize) -> Vec<DomainTerm> {
    extract_domain_terms_detailed(urls, limit).terms
}

/// Lexicon phrases sharing at least one token with `query`, lexicon order.
pub fn suggest_descriptors(query: &str, lexicon: &[String], config: &PreprocessConfig) -> Vec<String> {
    let query_tokens: HashSet<String> = preprocess(query, config).into_iter().collect();
    lexicon
        .iter()
        .filter(|phrase| preprocess(phrase, config).iter().any(|t| query_tokens.contains(t)))
        .cloned()
        .collect()
}

/// Appends slug material and descriptor words to `query`.
///
/// Only tokens not already produced by the query (or by earlier appended
/// material) are added, in their preprocessed form, so the refined text never
/// introduces a token twice. With nothing new to add the query is returned
/// unchanged.
pub fn refine_query(query: &str, terms: &[DomainTerm], descriptors: &[String], config: &PreprocessConfig) -> String {
    let mut seen: HashSet<String> = preprocess(query, config).into_iter().collect();
    let pieces = terms
        .iter()
        .flat_map(|t| std::iter::once(t.slug.as_str()).chain(t.words()))
        .chain(descriptors.iter().flat_map(|d| d.split_whitespace()));

    let mut refined = query.to_owned();
    for piece in pieces {
        for token in preprocess(piece, config) {
            if seen.insert(token.clone()) {
                refined.push(' ');
                refined.push_str(&token);
            }
        }
    }
    refined
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementConfig {
    pub k_top_docs: usize,
    pub m_terms: usize,
    pub max_iterations: usize,
    pub descriptor_lexicon: Vec<String>,
    pub accept_only_improving: bool,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        Self {
            k_top_docs: 5,
            m_terms: 2,
            max_iterations: 1,
            descriptor_lexicon: parse_word_list(DEFAULT_DESCRIPTORS),
            accept_only_improving: true,
        }
    }
}

impl RefinementConfig {
    pub fn validate(&self) -> Result<(), RefineError> {
        let bad = |m: &str| Err(RefineError::InvalidConfig(m.to_owned()));
        if self.k_top_docs == 0 {
            return bad("k_top_docs must be at least 1");
        }
        if self.m_terms == 0 {
            return bad("m_terms must be at least 1");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1");
        }
        if self.descriptor_lexicon.iter().any(|p| p.trim().is_empty()) {
            return bad("descriptor phrases must be non-empty");
        }
        Ok(())
    }
}

/// Reads a descriptor lexicon: one phrase per line, `#` comments ignored.
pub fn load_lexicon(path: &Path) -> Result<Vec<String>, RefineError> {
    let raw = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_word_list(&raw))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementIteration {
    pub domain_terms: Vec<DomainTerm>,
    pub descriptors: Vec<String>,
    pub refined_query: String,
    pub top_similarity: f64,
    pub top_doc_urls: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementRecord {
    pub original_query: String,
    pub baseline_top_similarity: f64,
    pub baseline_top_doc_urls: Vec<String>,
    pub iterations: Vec<RefinementIteration>,
    pub final_query: String,
}

impl RefinementRecord {
    pub fn final_top_similarity(&self) -> f64 {
        self.iterations
            .last()
            .map_or(self.baseline_top_similarity, |it| it.top_similarity)
    }

    pub fn final_top_doc_urls(&self) -> &[String] {
        self.iterations
            .last()
            .map_or(&self.baseline_top_doc_urls, |it| &it.top_doc_urls)
    }
}

// URLs of retrieved documents with a positive score; zero-score filler says
// nothing about the query.
fn matching_urls(index: &Index, retrieval: &Retrieval) -> Vec<String> {
    retrieval
        .hits
        .iter()
        .filter(|h| h.score > 0.0)
        .map(|h| index.doc(h.doc_id).url.clone())
        .collect()
}

/// Refines one query, iterating up to `config.max_iterations` rounds.
///
/// Slugs already present as query tokens are skipped before taking the best
/// `m_terms`, since re-adding them would be a no-op. When
/// `accept_only_improving` is set, a round that does not raise the top
/// similarity is discarded and the loop stops. A query that no longer
/// changes also ends the loop.
pub fn refine_one(
    query: &str,
    index: &Index,
    preprocess_config: &PreprocessConfig,
    config: &RefinementConfig,
) -> Result<RefinementRecord, RefineError> {
    config.validate()?;
    let k = config.k_top_docs;
    let baseline = index.retrieve_top_k(query, k, preprocess_config)?;
    let baseline_top = baseline.top_score();
    let baseline_urls = matching_urls(index, &baseline);

    let mut record = RefinementRecord {
        original_query: query.to_owned(),
        baseline_top_similarity: baseline_top,
        baseline_top_doc_urls: baseline_urls.clone(),
        iterations: Vec::new(),
        final_query: query.to_owned(),
    };
    let mut current_query = query.to_owned();
    let mut current_top = baseline_top;
    let mut current_urls = baseline_urls;

    for _ in 0..config.max_iterations {
        let present: HashSet<String> = preprocess(&current_query, preprocess_config).into_iter().collect();
        let terms: Vec<DomainTerm> = extract_domain_terms(&current_urls, usize::MAX)
            .into_iter()
            .filter(|t| !present.contains(&t.slug))
            .take(config.m_terms)
            .collect();
        let descriptors = suggest_descriptors(&current_query, &config.descriptor_lexicon, preprocess_config);
        let refined = refine_query(&current_query, &terms, &descriptors, preprocess_config);
        let unchanged = refined == current_query;

        let retrieval = index.retrieve_top_k(&refined, k, preprocess_config)?;
        let top = retrieval.top_score();
        if config.accept_only_improving && top <= current_top {
            break;
        }
        let urls = matching_urls(index, &retrieval);
        record.iterations.push(RefinementIteration {
            domain_terms: terms,
            descriptors,
            refined_query: refined.clone(),
            top_similarity: top,
            top_doc_urls: urls.clone(),
        });
        if unchanged {
            break;
        }
        current_query = refined;
        current_top = top;
        current_urls = urls;
    }
    record.final_query = current_query;
    Ok(record)
}

/// Runs [`refine_one`] over every query, preserving order.
pub fn refine_all<S: AsRef<str>>(
    queries: &[S],
    index: &Index,
    preprocess_config: &PreprocessConfig,
    config: &RefinementConfig,
) -> Result<Vec<RefinementRecord>, RefineError> {
    config.validate()?;
    if queries.is_empty() {
        return Err(RefineError::InvalidConfig("no queries given".to_owned()));
    }
    queries
        .iter()
        .map(|q| refine_one(q.as_ref(), index, preprocess_config, config))
        .collect()
}

/// Candidates offered to a person reviewing a query. Nothing is applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestions {
    pub retrieval: Retrieval,
    pub domain_terms: Vec<DomainTerm>,
    pub descriptors: Vec<String>,
}

/// One retrieval pass plus every slug from the top `k_top_docs` URLs and the
/// matching descriptors. Accepted items are applied with [`refine_query`].
pub fn interactive_suggest(
    query: &str,
    index: &Index,
    preprocess_config: &PreprocessConfig,
    config: &RefinementConfig,
) -> Result<Suggestions, RefineError> {
    config.validate()?;
    let retrieval = index.retrieve_top_k(query, config.k_top_docs, preprocess_config)?;
    let domain_terms = extract_domain_terms(&matching_urls(index, &retrieval), usize::MAX);
    let descriptors = suggest_descriptors(query, &config.descriptor_lexicon, preprocess_config);
    Ok(Suggestions {
        retrieval,
        domain_terms,
        descriptors,
    })
}
