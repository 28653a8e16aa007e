use std::path::Path;

use super::{ExperimentReport, HarnessError};

pub const CSV_HEADER: [&str; 5] = [
    "query_id",
    "query_text",
    "baseline_top_sim",
    "refined_top_sim",
    "refined_query_text",
];

/// RFC 4180 CSV, scores at five decimals.
pub fn render_csv(report: &ExperimentReport) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("in-memory write");
    for row in &report.rows {
        writer
            .write_record([
                row.query_id.as_str(),
                row.query_text.as_str(),
                &format!("{:.5}", row.baseline_top_sim),
                &format!("{:.5}", row.refined_top_sim),
                row.refined_query_text.as_str(),
            ])
            .expect("in-memory write");
    }
    let bytes = writer.into_inner().expect("in-memory flush");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

pub fn emit_csv(report: &ExperimentReport, path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, render_csv(report)).map_err(|e| HarnessError::io(path, e))
}

/// Reads two numeric columns, selected by header name.
pub fn read_score_columns(
    path: &Path,
    baseline_column: &str,
    refined_column: &str,
) -> Result<(Vec<f64>, Vec<f64>), HarnessError> {
    let fail = |message: String| HarnessError::Csv {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| fail(e.to_string()))?;
    let headers = reader.headers().map_err(|e| fail(e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| fail(format!("no column named {name}")))
    };
    let (bi, ri) = (column(baseline_column)?, column(refined_column)?);

    let (mut baseline, mut refined) = (Vec::new(), Vec::new());
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| fail(e.to_string()))?;
        let cell = |i: usize, name: &str| -> Result<f64, HarnessError> {
            let raw = record.get(i).unwrap_or("").trim();
            raw.parse()
                .map_err(|_| fail(format!("row {}: {name} value {raw:?} is not a number", row + 1)))
        };
        baseline.push(cell(bi, baseline_column)?);
        refined.push(cell(ri, refined_column)?);
    }
    Ok((baseline, refined))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{reference, ReportRow};

    #[test]
    fn reference_scores_print_at_table_precision() {
        let csv = render_csv(&reference::reference_report());
        let lines: Vec<&str> = csv.split("\r\n").collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert!(lines[1].starts_with("Q1,How can I prepare for an interview?,0.16888,0.24619,"));
        assert!(lines[5].contains(",0.34464,0.42653,"));
    }

    #[test]
    fn empty_report_is_header_only() {
        let report = ExperimentReport::from_rows(Vec::new(), None);
        assert_eq!(render_csv(&report), format!("{}\r\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn quotes_commas_and_quotes() {
        let row = ReportRow {
            query_id: "Q1".into(),
            query_text: "resume, cover letter".into(),
            baseline_top_sim: 0.1,
            refined_top_sim: 0.2,
            refined_query_text: "say \"hi\"".into(),
            top_doc_urls: vec![],
        };
        let csv = render_csv(&ExperimentReport::from_rows(vec![row], None));
        assert!(csv.contains("Q1,\"resume, cover letter\",0.10000,0.20000,\"say \"\"hi\"\"\"\r\n"));
    }

    #[test]
    fn reads_columns_back() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        emit_csv(&reference::reference_report(), &path).unwrap();
        let (b, r) = read_score_columns(&path, "baseline_top_sim", "refined_top_sim").unwrap();
        assert_eq!(b, reference::REFERENCE_BASELINE);
        assert_eq!(r, reference::REFERENCE_REFINED);
        assert!(read_score_columns(&path, "nope", "refined_top_sim").is_err());
        assert!(read_score_columns(&path, "query_text", "refined_top_sim").is_err());
    }
}
