use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, HeadlineMeans};
use crate::stats::{paired_t_test, summarize, StatsError, Summary, TTestResult};
use crate::vectorindex::WeightingMode;

/// Headline means further than this from the column means are flagged.
pub const HEADLINE_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub query_id: String,
    pub query_text: String,
    pub baseline_top_sim: f64,
    pub refined_top_sim: f64,
    pub refined_query_text: String,
    pub top_doc_urls: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSettings {
    pub weighting_mode: WeightingMode,
    pub k_top_docs: usize,
    pub m_terms: usize,
    pub max_iterations: usize,
    pub accept_only_improving: bool,
    pub seed: u64,
}

impl From<&ExperimentConfig> for ReportSettings {
    fn from(c: &ExperimentConfig) -> Self {
        Self {
            weighting_mode: c.weighting_mode,
            k_top_docs: c.refinement.k_top_docs,
            m_terms: c.refinement.m_terms,
            max_iterations: c.refinement.max_iterations,
            accept_only_improving: c.refinement.accept_only_improving,
            seed: c.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settings: Option<ReportSettings>,
    pub rows: Vec<ReportRow>,
    pub ttest: Option<TTestResult>,
    pub baseline_summary: Option<Summary>,
    pub refined_summary: Option<Summary>,
    pub notes: Vec<String>,
}

/// A score as printed in reports: five decimals, parsed back.
pub fn reported_score(score: f64) -> f64 {
    format!("{score:.5}").parse().expect("formatted float parses")
}

impl ExperimentReport {
    /// Aggregates scored rows. The t-test runs on the five-decimal values that
    /// the CSV carries, so re-testing the emitted CSV reproduces it exactly.
    pub fn from_rows(rows: Vec<ReportRow>, headline: Option<HeadlineMeans>) -> Self {
        let baseline: Vec<f64> = rows.iter().map(|r| reported_score(r.baseline_top_sim)).collect();
        let refined: Vec<f64> = rows.iter().map(|r| reported_score(r.refined_top_sim)).collect();
        let mut notes = Vec::new();

        let ttest = match paired_t_test(&baseline, &refined) {
            Ok(t) => {
                notes.push("paired t-test over scores rounded to 5 decimals (differences are baseline - refined)".to_owned());
                Some(t)
            }
            Err(StatsError::TooFewSamples(n)) => {
                notes.push(format!("t-test omitted: needs at least 2 queries, got {n}"));
                None
            }
            Err(e) => {
                notes.push(format!("t-test omitted: {e}"));
                None
            }
        };

        let baseline_summary = summarize(&baseline).ok();
        let refined_summary = summarize(&refined).ok();
        if let (Some(b), Some(r)) = (baseline_summary, refined_summary) {
            notes.push(format!("mean top similarity: baseline {:.5} -> refined {:.5}", b.mean, r.mean));
            if let Some(h) = headline {
                if (h.baseline - b.mean).abs() > HEADLINE_TOLERANCE || (h.refined - r.mean).abs() > HEADLINE_TOLERANCE {
                    notes.push(format!(
                        "headline means (approximately {:.2} -> {:.2}) are inconsistent with the per-query column means ({:.5} -> {:.5})",
                        h.baseline, h.refined, b.mean, r.mean
                    ));
                }
            }
        }

        Self {
            settings: None,
            rows,
            ttest,
            baseline_summary,
            refined_summary,
            notes,
        }
    }
}
