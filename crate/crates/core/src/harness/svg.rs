//! Grouped bar chart of baseline vs refined top similarity, written as plain
//! SVG text. Element order and number formatting are fixed so the output is
//! byte-stable.

use std::fmt::Write as _;
use std::path::Path;

use super::{ExperimentReport, HarnessError};

pub const CHART_WIDTH: f64 = 800.0;
pub const CHART_HEIGHT: f64 = 500.0;

const LEFT: f64 = 70.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 60.0;
const BOTTOM: f64 = 70.0;
const BASELINE_FILL: &str = "#4c72b0";
const REFINED_FILL: &str = "#dd8452";

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

pub fn render_svg_chart(report: &ExperimentReport) -> Result<String, HarnessError> {
    if report.rows.is_empty() {
        return Err(HarnessError::EmptyChart);
    }
    let plot_w = CHART_WIDTH - LEFT - RIGHT;
    let plot_h = CHART_HEIGHT - TOP - BOTTOM;
    let axis_y = TOP + plot_h;
    let y_of = |v: f64| axis_y - unit(v) * plot_h;

    let mut s = String::new();
    // Writing into a String cannot fail.
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CHART_WIDTH:.0}" height="{CHART_HEIGHT:.0}" viewBox="0 0 {CHART_WIDTH:.0} {CHART_HEIGHT:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r##"<rect x="0" y="0" width="{CHART_WIDTH:.0}" height="{CHART_HEIGHT:.0}" fill="#ffffff"/>"##);
    let _ = writeln!(
        s,
        r#"<text class="title" x="{:.2}" y="30.00" text-anchor="middle" font-size="18">Baseline vs refined top similarity</text>"#,
        CHART_WIDTH / 2.0
    );

    s.push_str("<g class=\"grid\">\n");
    for i in 0..=10 {
        let v = f64::from(i) / 10.0;
        let y = y_of(v);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#d0d0d0" stroke-width="1"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text class="tick" x="{:.2}" y="{:.2}" text-anchor="end" font-size="12">{v:.1}</text>"#,
            LEFT - 8.0,
            y + 4.0
        );
    }
    s.push_str("</g>\n");

    let n = report.rows.len() as f64;
    let group_w = plot_w / n;
    let bar_w = (group_w * 0.32).min(60.0);
    let gap = group_w * 0.04;

    s.push_str("<g class=\"bars\">\n");
    for (i, row) in report.rows.iter().enumerate() {
        let center = LEFT + group_w * (i as f64 + 0.5);
        let id = escape(&row.query_id);
        for (series, score, x, fill) in [
            ("baseline", row.baseline_top_sim, center - gap / 2.0 - bar_w, BASELINE_FILL),
            ("refined", row.refined_top_sim, center + gap / 2.0, REFINED_FILL),
        ] {
            let y = y_of(score);
            let _ = writeln!(
                s,
                r#"<rect class="bar {series}" data-query="{id}" data-score="{score:.5}" x="{x:.2}" y="{y:.2}" width="{bar_w:.2}" height="{:.2}" fill="{fill}"/>"#,
                axis_y - y
            );
        }
        let _ = writeln!(
            s,
            r#"<text class="label" x="{center:.2}" y="{:.2}" text-anchor="middle" font-size="13">{id}</text>"#,
            axis_y + 20.0
        );
    }
    s.push_str("</g>\n");

    let _ = writeln!(
        s,
        r##"<line class="axis" x1="{LEFT:.2}" y1="{axis_y:.2}" x2="{:.2}" y2="{axis_y:.2}" stroke="#333333" stroke-width="1.5"/>"##,
        LEFT + plot_w
    );
    let _ = writeln!(
        s,
        r##"<line class="axis" x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{axis_y:.2}" stroke="#333333" stroke-width="1.5"/>"##
    );
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="20.00" y="{:.2}" text-anchor="middle" font-size="13" transform="rotate(-90 20.00 {:.2})">Top cosine similarity</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">Query</text>"#,
        LEFT + plot_w / 2.0,
        CHART_HEIGHT - 20.0
    );

    let legend_x = LEFT + plot_w - 170.0;
    s.push_str("<g class=\"legend\">\n");
    for (row, (name, fill)) in [("Baseline", BASELINE_FILL), ("Refined", REFINED_FILL)].iter().enumerate() {
        let y = TOP - 30.0 + row as f64 * 18.0;
        let _ = writeln!(
            s,
            r#"<rect x="{legend_x:.2}" y="{y:.2}" width="12.00" height="12.00" fill="{fill}"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12">{name}</text>"#,
            legend_x + 18.0,
            y + 10.0
        );
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

pub fn emit_svg_chart(report: &ExperimentReport, path: &Path) -> Result<(), HarnessError> {
    let svg = render_svg_chart(report)?;
    std::fs::write(path, svg).map_err(|e| HarnessError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::reference;

    fn bars(svg: &str, series: &str) -> Vec<f64> {
        let marker = format!("class=\"bar {series}\"");
        svg.lines()
            .filter(|l| l.contains(&marker))
            .map(|l| {
                let start = l.find("height=\"").unwrap() + 8;
                l[start..start + l[start..].find('"').unwrap()].parse().unwrap()
            })
            .collect()
    }

    #[test]
    fn reference_chart_geometry() {
        let svg = render_svg_chart(&reference::reference_report()).unwrap();
        let base = bars(&svg, "baseline");
        let refined = bars(&svg, "refined");
        assert_eq!(base.len() + refined.len(), 10);
        assert!(base.iter().zip(&refined).all(|(b, r)| r > b));
        assert_eq!(svg.matches("<line ").count(), 11 + 2);
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\""));
    }

    #[test]
    fn one_row_two_bars_and_stable_bytes() {
        let report = ExperimentReport::from_rows(reference::reference_rows().into_iter().take(1).collect(), None);
        let a = render_svg_chart(&report).unwrap();
        assert_eq!(a.matches("class=\"bar ").count(), 2);
        assert_eq!(a, render_svg_chart(&report).unwrap());
    }

    #[test]
    fn empty_report_rejected() {
        let report = ExperimentReport::from_rows(Vec::new(), None);
        assert!(matches!(render_svg_chart(&report), Err(HarnessError::EmptyChart)));
    }

    #[test]
    fn labels_are_escaped() {
        let mut rows = reference::reference_rows();
        rows.truncate(1);
        rows[0].query_id = "<Q&1>".into();
        let svg = render_svg_chart(&ExperimentReport::from_rows(rows, None)).unwrap();
        assert!(svg.contains("&lt;Q&amp;1&gt;"));
    }
}
