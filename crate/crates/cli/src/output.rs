use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::{config_hash, Format, RunConfig};
use crate::CliError;

pub const CSV_TAG: &str = "# dunklkit,v1";
pub const REPORT_SCHEMA: &str = "dunklkit-report/1";

/// A numeric table plus the provenance written alongside it.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub config_hash: String,
    pub config: Value,
    pub grids: Vec<String>,
    pub tolerances: Value,
    pub results: Value,
}

pub struct Emitter {
    pub command: String,
    pub hash: String,
    pub config: Value,
    pub grids: Vec<String>,
    dir: PathBuf,
    format: Format,
    tol: f64,
}

impl Emitter {
    pub fn new<T: Serialize>(command: &str, run: &RunConfig, params: &T) -> Self {
        Emitter {
            command: command.to_string(),
            hash: config_hash(command, run, params),
            config: serde_json::json!({ "run": run, "params": params }),
            grids: Vec::new(),
            dir: run.out.clone(),
            format: run.format,
            tol: run.tol,
        }
    }

    pub fn grid(&mut self, id: String) {
        if !self.grids.contains(&id) {
            self.grids.push(id);
        }
    }

    fn path(&self, ext: &str) -> PathBuf {
        self.dir.join(format!("{}.{}", self.command, ext))
    }

    fn metadata(&self) -> Vec<String> {
        let mut m = vec![
            CSV_TAG.to_string(),
            format!("# command: {}", self.command),
            format!("# config_hash: {}", self.hash),
            format!("# tol: {:e}", self.tol),
        ];
        for g in &self.grids {
            m.push(format!("# grid: {}", g));
        }
        m
    }

    /// Writes the table (CSV or JSON) and the report; returns the paths.
    pub fn emit(&self, table: &Table, results: Value) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(&self.dir).map_err(|e| CliError::Io(format!("{}: {}", self.dir.display(), e)))?;
        let mut paths = Vec::new();
        match self.format {
            Format::Csv => {
                let p = self.path("csv");
                write_csv(&p, &self.metadata(), table)?;
                paths.push(p);
            }
            Format::Json => {
                let p = self.path("values.json");
                let doc = serde_json::json!({
                    "schema": REPORT_SCHEMA,
                    "config_hash": self.hash,
                    "columns": table.columns,
                    "rows": table.rows,
                });
                write_text(&p, &serde_json::to_string_pretty(&doc).expect("table serializes"))?;
                paths.push(p);
            }
        }
        let report = Report {
            schema: REPORT_SCHEMA,
            command: self.command.clone(),
            config_hash: self.hash.clone(),
            config: self.config.clone(),
            grids: self.grids.clone(),
            tolerances: serde_json::json!({ "abs": self.tol, "rel": self.tol }),
            results,
        };
        let p = self.path("json");
        write_text(&p, &serde_json::to_string_pretty(&report).expect("report serializes"))?;
        paths.push(p);
        Ok(paths)
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {}", path.display(), e)))
}

/// Numbers use the shortest round-trip representation, so equal inputs give
/// byte-identical files.
pub fn write_csv(path: &Path, metadata: &[String], table: &Table) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {}", path.display(), e));
    let mut f = std::io::BufWriter::new(fs::File::create(path).map_err(io)?);
    for m in metadata {
        writeln!(f, "{}", m).map_err(io)?;
    }
    writeln!(f, "{}", table.columns.join(",")).map_err(io)?;
    for r in &table.rows {
        let line: Vec<String> = r.iter().map(|v| format!("{:?}", v)).collect();
        writeln!(f, "{}", line.join(",")).map_err(io)?;
    }
    f.flush().map_err(io)
}
