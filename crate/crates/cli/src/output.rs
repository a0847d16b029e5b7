//! Emission of command results as JSON, CSV or aligned text, to standard
//! output or to a file in the output directory.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Json,
    Csv,
    Text,
}

impl Emit {
    fn extension(self) -> &'static str {
        match self {
            Emit::Json => "json",
            Emit::Csv => "csv",
            Emit::Text => "txt",
        }
    }
}

/// Header plus rows, rendered as CSV or as an aligned text table.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
    }

    pub fn text(&self) -> String {
        let mut width: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for r in &self.rows {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = cells
                .iter()
                .zip(&width)
                .map(|(c, &w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ");
            s.truncate(s.trim_end().len());
            s.push('\n');
            s
        };
        let mut out = line(&self.header);
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }
}

pub fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

pub struct Sink {
    pub emit: Emit,
    pub out: Option<PathBuf>,
}

impl Sink {
    /// Writes `body` to `<out>/<stem>.<ext>` or to standard output.
    pub fn write(&self, stem: &str, body: &str) -> Result<(), CliError> {
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let path = dir.join(format!("{stem}.{}", self.emit.extension()));
                fs::write(&path, body)?;
                log::info!("wrote {}", path.display());
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(body.as_bytes())?;
                stdout.flush()?;
            }
        }
        Ok(())
    }

    /// Renders according to the emit format: JSON from `json`, CSV and text
    /// from `table`.
    pub fn emit<T: serde::Serialize>(&self, stem: &str, json: &T, table: &Table) -> Result<(), CliError> {
        let body = match self.emit {
            Emit::Json => serde_json::to_string_pretty(json)? + "\n",
            Emit::Csv => table.csv()?,
            Emit::Text => table.text(),
        };
        self.write(stem, &body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rendering() {
        let mut t = Table::new(&["level", "detail"]);
        t.push(vec!["0".into(), "a, b".into()]);
        t.push(vec!["10".into(), "-".into()]);
        assert_eq!(t.text(), "level  detail\n0      a, b\n10     -\n");
        assert_eq!(t.csv().unwrap(), "level,detail\n0,\"a, b\"\n10,-\n");
    }
}
