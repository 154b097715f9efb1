//! Plain-text and CSV rendering of command reports.

use std::fmt::Write as _;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
}

/// A titled table of pre-formatted cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(title: impl Into<String>, header: impl IntoIterator<Item = S>) -> Self {
        Table { title: title.into(), header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) -> &mut Self {
        self.rows.push(cells.into_iter().map(Into::into).collect());
        self
    }

    fn widths(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i < w.len() {
                    w[i] = w[i].max(cell.chars().count());
                }
            }
        }
        w
    }

    fn text(&self, out: &mut String) {
        let widths = self.widths();
        let _ = writeln!(out, "{}", self.title);
        let line = |out: &mut String, cells: &[String]| {
            let mut s = String::new();
            for (i, cell) in cells.iter().enumerate() {
                let pad = widths[i].saturating_sub(cell.chars().count());
                if i == 0 {
                    s.push_str(cell);
                    s.push_str(&" ".repeat(pad));
                } else {
                    s.push_str("  ");
                    s.push_str(&" ".repeat(pad));
                    s.push_str(cell);
                }
            }
            let _ = writeln!(out, "{}", s.trim_end());
        };
        line(out, &self.header);
        for row in &self.rows {
            line(out, row);
        }
    }

    fn csv(&self, out: &mut String) {
        let _ = writeln!(out, "# {}", self.title);
        let mut w = csv_writer();
        w.write_record(&self.header).expect("in-memory csv");
        for row in &self.rows {
            w.write_record(row).expect("in-memory csv");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8"));
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().flexible(true).from_writer(Vec::new())
}

/// Tables printed one after another, separated by a blank line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub tables: Vec<Table>,
}

impl Report {
    pub fn push(&mut self, table: Table) {
        self.tables.push(table);
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            match format {
                Format::Text => t.text(&mut out),
                Format::Csv => t.csv(&mut out),
            }
        }
        out
    }
}

/// Measures: three decimals.
pub fn f3(v: f64) -> String {
    tidy(format!("{v:.3}"))
}

/// Probabilities and scores: four decimals.
pub fn f4(v: f64) -> String {
    tidy(format!("{v:.4}"))
}

/// Signed, three decimals (`+0.365`).
pub fn signed3(v: f64) -> String {
    tidy(format!("{v:+.3}"))
}

fn tidy(s: String) -> String {
    if s.trim_start_matches(['-', '+']).chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches(['-', '+']).to_string()
    } else {
        s
    }
}

/// p-values in scientific notation below 1e-4.
pub fn p_value(p: f64) -> String {
    if p == 0.0 {
        "0".into()
    } else if p < 1e-4 {
        format!("{p:.2e}")
    } else {
        f4(p)
    }
}

pub fn or_na(v: Option<String>) -> String {
    v.unwrap_or_else(|| "n/a".into())
}
