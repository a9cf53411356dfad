//! Report rows and their Markdown / CSV renderings.
//!
//! Columns appear only when at least one row fills them, so a theory report
//! does not carry empty simulation columns.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalCols {
    pub mean: f64,
    pub bias: f64,
    pub mse: f64,
    pub mse_se: f64,
    pub pre: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactCols {
    pub expectation: f64,
    pub bias: f64,
    pub mse: f64,
    /// `(first-order MSE − exact MSE) / exact MSE`
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportRow {
    pub label: String,
    pub bias: Option<f64>,
    pub mse: Option<f64>,
    pub pre: Option<f64>,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
    pub beats_usual: Option<bool>,
    pub beats_regression: Option<bool>,
    pub reference_pre: Option<f64>,
    pub within_tolerance: Option<bool>,
    pub empirical: Option<EmpiricalCols>,
    pub exact: Option<ExactCols>,
}

impl ReportRow {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub title: String,
    pub notes: Vec<String>,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Style {
    Human,
    Machine,
}

fn num(v: f64, style: Style) -> String {
    match style {
        Style::Machine => format!("{v}"),
        Style::Human => {
            if v == 0.0 {
                "0".to_string()
            } else if v.abs() >= 1e-4 && v.abs() < 1e4 {
                format!("{v:.7}")
            } else {
                format!("{v:.6e}")
            }
        }
    }
}

fn pre_cell(v: f64, style: Style) -> String {
    match style {
        Style::Machine => format!("{v}"),
        Style::Human => format!("{v:.3}"),
    }
}

type Column = (&'static str, fn(&ReportRow, Style) -> Option<String>);

fn opt<T>(v: Option<T>, f: impl FnOnce(T) -> String) -> Option<String> {
    v.map(f)
}

fn columns() -> Vec<Column> {
    vec![
        ("bias", |r, s| opt(r.bias, |v| num(v, s))),
        ("mse", |r, s| opt(r.mse, |v| num(v, s))),
        ("pre", |r, s| opt(r.pre, |v| pre_cell(v, s))),
        ("q1", |r, s| opt(r.q1, |v| num(v, s))),
        ("q2", |r, s| opt(r.q2, |v| num(v, s))),
        ("beats_usual", |r, _| r.beats_usual.map(|b| b.to_string())),
        ("beats_regression", |r, _| {
            r.beats_regression.map(|b| b.to_string())
        }),
        ("reference_pre", |r, s| {
            opt(r.reference_pre, |v| pre_cell(v, s))
        }),
        ("within_1pct", |r, _| {
            r.within_tolerance.map(|b| b.to_string())
        }),
        ("emp_mean", |r, s| r.empirical.map(|e| num(e.mean, s))),
        ("emp_bias", |r, s| r.empirical.map(|e| num(e.bias, s))),
        ("emp_mse", |r, s| r.empirical.map(|e| num(e.mse, s))),
        ("emp_mse_se", |r, s| r.empirical.map(|e| num(e.mse_se, s))),
        ("emp_pre", |r, s| {
            r.empirical.and_then(|e| e.pre).map(|v| pre_cell(v, s))
        }),
        ("exact_mean", |r, s| r.exact.map(|e| num(e.expectation, s))),
        ("exact_bias", |r, s| r.exact.map(|e| num(e.bias, s))),
        ("exact_mse", |r, s| r.exact.map(|e| num(e.mse, s))),
        ("rel_gap", |r, s| {
            r.exact.and_then(|e| e.gap).map(|v| num(v, s))
        }),
    ]
}

impl Report {
    fn table(&self, style: Style) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let cols: Vec<Column> = columns()
            .into_iter()
            .filter(|(_, get)| self.rows.iter().any(|r| get(r, style).is_some()))
            .collect();
        let mut header = vec!["estimator"];
        header.extend(cols.iter().map(|(name, _)| *name));
        let body = self
            .rows
            .iter()
            .map(|r| {
                let mut cells = vec![r.label.clone()];
                cells.extend(cols.iter().map(|(_, get)| {
                    get(r, style).unwrap_or_else(|| {
                        if style == Style::Human {
                            "-".into()
                        } else {
                            String::new()
                        }
                    })
                }));
                cells
            })
            .collect();
        (header, body)
    }

    pub fn to_markdown(&self) -> String {
        let (header, body) = self.table(Style::Human);
        let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
        for row in &body {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        if !self.title.is_empty() {
            let _ = writeln!(out, "## {}\n", self.title);
        }
        let line = |cells: Vec<String>| -> String {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:<w$}"))
                .collect();
            format!("| {} |\n", padded.join(" | "))
        };
        out.push_str(&line(header.iter().map(|h| h.to_string()).collect()));
        out.push_str(&format!(
            "|{}|\n",
            widths
                .iter()
                .map(|&w| "-".repeat(w + 2))
                .collect::<Vec<_>>()
                .join("|")
        ));
        for row in body {
            out.push_str(&line(row));
        }
        if !self.notes.is_empty() {
            out.push('\n');
            for note in &self.notes {
                let _ = writeln!(out, "- {note}");
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let (header, body) = self.table(Style::Machine);
        let mut wtr = csv::Writer::from_writer(Vec::new());
        // writing into a Vec cannot fail
        wtr.write_record(&header).expect("in-memory csv");
        for row in body {
            wtr.write_record(&row).expect("in-memory csv");
        }
        String::from_utf8(wtr.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
    }

    pub fn row(&self, label: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}
