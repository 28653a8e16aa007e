//! Lexical retrieval with semi-automated query refinement.
//!
//! - [`corpus`]: document ingestion and tokenization.
//! - [`vectorindex`]: TF-IDF vectors and cosine top-k retrieval.
//! - [`refine`]: URL slug mining and query expansion.
//! - [`stats`]: paired t-test and the special functions behind it.
//! - [`harness`]: experiment runs with CSV, JSON and SVG output.

pub mod corpus;
pub mod harness;
pub mod refine;
pub mod stats;
pub mod vectorindex;

pub use corpus::{Document, PreprocessConfig};
pub use refine::{DomainTerm, RefinementConfig, RefinementRecord};
pub use stats::TTestResult;
pub use vectorindex::{Index, RankedHit, Retrieval, WeightingMode};
