//! Document ingestion and the token pipeline shared by indexing, querying and
//! refinement.
//!
//! Tokens are maximal runs of Unicode letters and digits, lowercased. When
//! [`PreprocessConfig::keep_intra_word_hyphens`] is set, a hyphen sitting
//! between two word characters stays inside the token, so URL slugs such as
//! `resources-online-learning` survive as a single term. Stopwords and tokens
//! shorter than `min_token_length` are dropped afterwards. There is no
//! stemming.

mod html;

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use html::{extract_html, HtmlText};

/// Bundled English stopword list (version 1).
pub const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: missing field {field}")]
    MissingField { line: usize, field: &'static str },
}

impl CorpusError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// One corpus item. `tokens` is always `preprocess(text)` under the config the
/// corpus was loaded with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: usize,
    pub url: String,
    pub title: String,
    pub text: String,
    pub tokens: Vec<String>,
}

impl Document {
    pub fn new(doc_id: usize, url: String, title: String, text: String, config: &PreprocessConfig) -> Self {
        let tokens = preprocess(&text, config);
        Self {
            doc_id,
            url,
            title,
            text,
            tokens,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessConfig {
    stopwords: BTreeSet<String>,
    pub keep_intra_word_hyphens: bool,
    pub min_token_length: usize,
}

impl Default for PreprocessConfig {
    /// Bundled English stopwords, hyphens kept, no length filter.
    fn default() -> Self {
        Self::with_stopwords(parse_word_list(DEFAULT_STOPWORDS))
    }
}

impl PreprocessConfig {
    /// Stopword entries are lowercased on the way in.
    pub fn with_stopwords<I, S>(stopwords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            stopwords: stopwords
                .into_iter()
                .map(|s| s.as_ref().to_lowercase())
                .filter(|s| !s.is_empty())
                .collect(),
            keep_intra_word_hyphens: true,
            min_token_length: 1,
        }
    }

    /// No stopwords at all.
    pub fn without_stopwords() -> Self {
        Self::with_stopwords(std::iter::empty::<&str>())
    }

    /// Loads a stopword file: one token per line, `#` comment lines ignored.
    pub fn from_stopword_file(path: &Path) -> Result<Self, CorpusError> {
        let raw = std::fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
        Ok(Self::with_stopwords(parse_word_list(&raw)))
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }
}

/// Splits a line-oriented list file, dropping blank lines and `#` comments.
pub fn parse_word_list(raw: &str) -> Vec<String> {
    raw.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

// A character can sit inside a token only if its lowercase form is made of
// lowercase alphanumerics. Anything else (including letters whose lowercase
// mapping introduces combining marks) separates tokens.
fn push_word_char(c: char, out: &mut String) -> bool {
    if !c.is_alphanumeric() {
        return false;
    }
    let mut lower = c.to_lowercase();
    if lower.clone().all(|l| l.is_alphanumeric() && !l.is_uppercase()) {
        out.extend(&mut lower);
        true
    } else {
        false
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() && c.to_lowercase().all(|l| l.is_alphanumeric() && !l.is_uppercase())
}

/// Tokenizes, lowercases and filters `text`. Total: never fails.
pub fn preprocess(text: &str, config: &PreprocessConfig) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut chars = text.chars().peekable();

    let flush = |current: &mut String, tokens: &mut Vec<String>| {
        if !current.is_empty() {
            let token = std::mem::take(current);
            if token.chars().count() >= config.min_token_length && !config.is_stopword(&token) {
                tokens.push(token);
            }
        }
    };

    while let Some(c) = chars.next() {
        if push_word_char(c, &mut current) {
            continue;
        }
        if c == '-'
            && config.keep_intra_word_hyphens
            && !current.is_empty()
            && chars.peek().is_some_and(|&n| is_word_char(n))
        {
            current.push('-');
            continue;
        }
        flush(&mut current, &mut tokens);
    }
    flush(&mut current, &mut tokens);
    tokens
}

#[derive(Debug, Serialize)]
struct RecordOut<'a> {
    url: &'a str,
    title: &'a str,
    text: &'a str,
}

fn string_field(
    obj: &serde_json::Map<String, serde_json::Value>,
    field: &'static str,
    line: usize,
) -> Result<String, CorpusError> {
    match obj.get(field) {
        None => Err(CorpusError::MissingField { line, field }),
        Some(serde_json::Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(CorpusError::Malformed {
            line,
            message: format!("field {field} must be a string"),
        }),
    }
}

/// Reads a JSON-lines corpus file (`url`, `title`, `text` per line). Blank
/// lines are skipped; line numbers in errors are 1-based physical lines.
pub fn ingest_records(path: &Path, config: &PreprocessConfig) -> Result<Vec<Document>, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut docs = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        let obj = value.as_object().ok_or_else(|| CorpusError::Malformed {
            line: line_no,
            message: "expected a JSON object".to_owned(),
        })?;
        let url = string_field(obj, "url", line_no)?;
        let title = string_field(obj, "title", line_no)?;
        let text = string_field(obj, "text", line_no)?;
        docs.push(Document::new(docs.len(), url, title, text, config));
    }
    Ok(docs)
}

/// Writes documents back out in the record format read by [`ingest_records`].
pub fn write_records(docs: &[Document], path: &Path) -> Result<(), CorpusError> {
    let file = File::create(path).map_err(|e| CorpusError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for doc in docs {
        let rec = RecordOut {
            url: &doc.url,
            title: &doc.title,
            text: &doc.text,
        };
        let line = serde_json::to_string(&rec).expect("records always serialize");
        writeln!(out, "{line}").map_err(|e| CorpusError::io(path, e))?;
    }
    out.flush().map_err(|e| CorpusError::io(path, e))
}

/// Loads local HTML files as documents, in the given order. Files that are not
/// HTML are read as plain text.
pub fn ingest_html<P: AsRef<Path>>(
    files: &[(String, P)],
    config: &PreprocessConfig,
) -> Result<Vec<Document>, CorpusError> {
    files
        .iter()
        .enumerate()
        .map(|(doc_id, (url, path))| {
            let path = path.as_ref();
            let bytes = std::fs::read(path).map_err(|e| CorpusError::io(path, e))?;
            let HtmlText { title, text } = extract_html(&String::from_utf8_lossy(&bytes));
            Ok(Document::new(doc_id, url.clone(), title, text, config))
        })
        .collect()
}
