//! CSV, gnuplot `.dat` and sorted-key JSON emission.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

/// Full-precision decimal (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Whitespace-separated columns with a commented header.
    pub fn to_dat(&self) -> String {
        let mut out = format!("# {}\n", self.columns.join(" "));
        for row in &self.rows {
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Column `name` parsed back to floats.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[i].parse().ok()).collect()
    }
}

/// Pretty JSON with object keys in sorted order.
pub fn to_sorted_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    // serde_json's default map is ordered by key
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn write_table(dir: &Path, stem: &str, table: &Table) -> io::Result<()> {
    fs::write(dir.join(format!("{stem}.csv")), table.to_csv())?;
    fs::write(dir.join(format!("{stem}.dat")), table.to_dat())
}

pub fn write_json<T: Serialize>(dir: &Path, stem: &str, value: &T) -> io::Result<()> {
    let text = to_sorted_json(value).map_err(io::Error::other)?;
    fs::write(dir.join(format!("{stem}.json")), text)
}
