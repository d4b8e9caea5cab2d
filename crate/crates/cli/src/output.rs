use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{Map, Value};

pub const COMMIT: &str = env!("QCOMM_COMMIT");

/// Rows of one experiment under a fixed header. The first two columns are
/// always the commit stamp and the experiment name.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub experiment: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(experiment: &str, columns: &[S]) -> Self {
        let mut header = vec!["commit".to_string(), "experiment".to_string()];
        header.extend(columns.iter().map(|c| c.as_ref().to_string()));
        Self {
            experiment: experiment.to_string(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, values: Vec<String>) {
        assert_eq!(values.len() + 2, self.header.len(), "row width for {}", self.experiment);
        let mut row = vec![COMMIT.to_string(), self.experiment.clone()];
        row.extend(values);
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for row in &self.rows {
            let obj: Map<String, Value> = self
                .header
                .iter()
                .zip(row)
                .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                .collect();
            serde_json::to_writer(&mut out, &obj)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Writes the CSV to `csv` (or stdout) and the optional JSON-lines mirror.
    pub fn emit(&self, csv: Option<&Path>, jsonl: Option<&Path>) -> Result<()> {
        match csv {
            Some(path) => {
                let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
                self.write_csv(BufWriter::new(f))?;
            }
            None => self.write_csv(io::stdout().lock())?,
        }
        if let Some(path) = jsonl {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(f);
            self.write_jsonl(&mut w)?;
            w.flush()?;
        }
        Ok(())
    }

    /// Aligned plain-text rendering without the stamp columns.
    pub fn summary(&self) -> String {
        let cols: Vec<usize> = (2..self.header.len()).collect();
        let width = |c: usize| {
            self.rows
                .iter()
                .map(|r| r[c].len())
                .chain(std::iter::once(self.header[c].len()))
                .max()
                .unwrap_or(0)
        };
        let widths: Vec<usize> = cols.iter().map(|&c| width(c)).collect();
        let line = |r: &[String]| {
            cols.iter()
                .zip(&widths)
                .map(|(&c, &w)| format!("{:>w$}", r[c]))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut out = line(&self.header);
        for r in &self.rows {
            out.push('\n');
            out.push_str(&line(r));
        }
        out
    }
}

pub fn fmt_f(v: f64) -> String {
    format!("{v:.6}")
}
