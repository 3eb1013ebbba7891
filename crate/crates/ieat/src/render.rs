//! Text output for battery results and reports.

use std::fmt::Write as _;
use std::str::FromStr;

use ieat_core::{HypothesisReport, PValueMethod, SpecificityReport, TestResult, ValenceSelection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    PlainTable,
    Csv,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain-table" => Ok(OutputFormat::PlainTable),
            "csv" => Ok(OutputFormat::Csv),
            "markdown" => Ok(OutputFormat::Markdown),
            other => Err(format!("unknown output format `{other}`")),
        }
    }
}

pub const RESULT_COLUMNS: [&str; 13] = [
    "name",
    "X",
    "Y",
    "A",
    "B",
    "n_t",
    "n_a",
    "d",
    "magnitude",
    "p",
    "p_method",
    "tie_policy",
    "ci_halfwidth",
];

/// `p` with six significant digits followed by the count it came from,
/// e.g. `0.0500000 (5/100)`.
pub fn format_p(result: &TestResult) -> String {
    let p = &result.p;
    format!("{} ({}/{})", significant(p.p, 6), p.numerator(), p.denominator())
}

fn significant(x: f64, digits: i32) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn result_row(r: &TestResult) -> Vec<String> {
    let n_a = if r.n_a == r.n_b {
        r.n_a.to_string()
    } else {
        format!("{}/{}", r.n_a, r.n_b)
    };
    let ci = match r.p.method {
        PValueMethod::MonteCarlo { ci_halfwidth, .. } => significant(ci_halfwidth, 3),
        PValueMethod::Exact { .. } => String::new(),
    };
    vec![
        r.name.clone(),
        r.x_category.clone(),
        r.y_category.clone(),
        r.a_category.clone(),
        r.b_category.clone(),
        r.n_t.to_string(),
        n_a,
        format!("{:.6}", r.d),
        r.magnitude.to_string(),
        format_p(r),
        r.p.method.name().to_string(),
        r.p.tie_policy.to_string(),
        ci,
    ]
}

pub fn render_results(results: &[TestResult], format: OutputFormat) -> String {
    let rows: Vec<Vec<String>> = results.iter().map(result_row).collect();
    render_table(&RESULT_COLUMNS, &rows, format)
}

pub fn render_specificity(report: &SpecificityReport, format: OutputFormat) -> String {
    let rows: Vec<Vec<String>> = report
        .thresholds
        .iter()
        .map(|(alpha, rate)| {
            let hits = (rate * report.trials as f64).round() as u64;
            vec![
                format!("{alpha}"),
                format!("{rate:.4}"),
                format!("{hits}/{}", report.trials),
                report.seed.to_string(),
            ]
        })
        .collect();
    render_table(
        &["alpha", "false_positive_rate", "false_positives", "seed"],
        &rows,
        format,
    )
}

pub fn render_valence(selection: &ValenceSelection, format: OutputFormat) -> String {
    let rows: Vec<Vec<String>> = selection
        .positive
        .iter()
        .zip(&selection.negative)
        .enumerate()
        .map(|(i, (pos, neg))| vec![(i + 1).to_string(), pos.clone(), neg.clone()])
        .collect();
    render_table(&["rank", "positive", "negative"], &rows, format)
}

pub fn render_hypotheses(report: &HypothesisReport) -> String {
    let mut out = String::new();
    for entry in &report.entries {
        let _ = writeln!(out, "{}: {}", entry.hypothesis, entry.verdict);
        let _ = writeln!(out, "  rule: {}", entry.rule);
        for finding in &entry.findings {
            let cited: Vec<String> = finding
                .cited
                .iter()
                .map(|c| format!("{} d={:.2} p={}", c.name, c.d, significant(c.p, 3)))
                .collect();
            let _ = writeln!(out, "  {} -> {}: {}", finding.family, finding.verdict, cited.join("; "));
        }
    }
    for note in &report.notes {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

fn render_table(header: &[&str], rows: &[Vec<String>], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header).expect("in-memory write");
            for row in rows {
                w.write_record(row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 input")
        }
        OutputFormat::Markdown => {
            let mut out = String::new();
            let line = |cells: &mut dyn Iterator<Item = String>| {
                let cells: Vec<String> = cells.collect();
                format!("| {} |\n", cells.join(" | "))
            };
            out += &line(&mut header.iter().map(|h| h.to_string()));
            out += &line(&mut header.iter().map(|_| "---".to_string()));
            for row in rows {
                out += &line(&mut row.iter().map(|c| c.replace('|', "\\|")));
            }
            out
        }
        OutputFormat::PlainTable => {
            let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
            for row in rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let mut out = String::new();
            let mut line = |cells: Vec<&str>| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect();
                out += padded.join("  ").trim_end();
                out.push('\n');
            };
            line(header.to_vec());
            for row in rows {
                line(row.iter().map(String::as_str).collect());
            }
            out
        }
    }
}
