//! Experiment orchestration: run baseline and refined queries over a corpus,
//! aggregate per-query top similarities, test the paired difference, and write
//! `report.json`, `results.csv` and `figure.svg`.

mod config;
mod csv_out;
pub mod reference;
mod report;
mod svg;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::corpus::{ingest_records, CorpusError};
use crate::refine::{refine_all, RefineError};
use crate::stats::StatsError;
use crate::vectorindex::{Index, IndexError};

pub use config::{ExperimentConfig, HeadlineMeans};
pub use csv_out::{emit_csv, read_score_columns, render_csv, CSV_HEADER};
pub use report::{reported_score, ExperimentReport, ReportRow, ReportSettings};
pub use svg::{emit_svg_chart, render_svg_chart, CHART_HEIGHT, CHART_WIDTH};

pub const REPORT_FILE: &str = "report.json";
pub const CSV_FILE: &str = "results.csv";
pub const SVG_FILE: &str = "figure.svg";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Refine(#[from] RefineError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv {path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("chart needs at least one row")]
    EmptyChart,
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Builds the index once and refines every configured query in order.
pub fn run_all_queries(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    let docs = ingest_records(&config.corpus_path, &config.preprocess)?;
    let index = Index::build(&docs, config.weighting_mode)?;
    run_on_index(config, &index)
}

pub fn run_on_index(config: &ExperimentConfig, index: &Index) -> Result<ExperimentReport, HarnessError> {
    let records = refine_all(&config.queries, index, &config.preprocess, &config.refinement)?;
    let rows = records
        .iter()
        .enumerate()
        .map(|(i, rec)| ReportRow {
            query_id: format!("Q{}", i + 1),
            query_text: rec.original_query.clone(),
            baseline_top_sim: rec.baseline_top_similarity,
            refined_top_sim: rec.final_top_similarity(),
            refined_query_text: rec.final_query.clone(),
            top_doc_urls: rec.final_top_doc_urls().to_vec(),
        })
        .collect();
    let mut report = ExperimentReport::from_rows(rows, config.headline_means);
    report.settings = Some(ReportSettings::from(config));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentOutputs {
    pub report: PathBuf,
    pub csv: PathBuf,
    pub svg: PathBuf,
}

/// Writes the report JSON into `dir`.
pub fn emit_report_json(report: &ExperimentReport, path: &Path) -> Result<(), HarnessError> {
    let mut json = serde_json::to_string_pretty(report).expect("report always serializes");
    json.push('\n');
    std::fs::write(path, json).map_err(|e| HarnessError::io(path, e))
}

/// Full run: report, CSV and chart under `config.output_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(ExperimentReport, ExperimentOutputs), HarnessError> {
    let report = run_all_queries(config)?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let outputs = ExperimentOutputs {
        report: dir.join(REPORT_FILE),
        csv: dir.join(CSV_FILE),
        svg: dir.join(SVG_FILE),
    };
    emit_report_json(&report, &outputs.report)?;
    emit_csv(&report, &outputs.csv)?;
    emit_svg_chart(&report, &outputs.svg)?;
    Ok((report, outputs))
}
