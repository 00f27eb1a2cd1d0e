//! Column tables and their CSV/JSON emission.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use tempfile::NamedTempFile;
use tfim_quench::coherence::Rate;

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    U(usize),
    S(String),
    B(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::U(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

impl From<Rate> for Cell {
    fn from(r: Rate) -> Self {
        match r {
            Rate::Finite(v) => Cell::F(v),
            Rate::Divergent => Cell::S("divergent".into()),
        }
    }
}

/// Shortest round-trip decimal form; non-finite values as `nan`/`inf`/`-inf`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        serde_json::to_string(&v).expect("finite float")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(v) => fmt_f64(*v),
            Cell::U(v) => v.to_string(),
            Cell::B(v) => v.to_string(),
            Cell::S(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::S(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(v) if v.is_finite() => json!(v),
            Cell::F(v) => json!(fmt_f64(*v)),
            Cell::U(v) => json!(v),
            Cell::B(v) => json!(v),
            Cell::S(s) => json!(s),
        }
    }
}

pub struct Column {
    pub name: &'static str,
    pub description: &'static str,
    pub units: &'static str,
}

pub const fn col(name: &'static str, description: &'static str, units: &'static str) -> Column {
    Column { name, description, units }
}

pub struct Table {
    /// File-name suffix; empty for the main table.
    pub suffix: &'static str,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    /// Derived scalars reported alongside the rows.
    pub summary: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(suffix: &'static str, columns: Vec<Column>) -> Self {
        Self { suffix, columns, rows: Vec::new(), summary: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<Cell>) {
        self.summary.push((key.into(), value.into()));
    }

    pub fn to_csv(&self, cfg: &RunConfig) -> String {
        let mut s = String::new();
        s.push_str(&format!("# tfim-quench {} {}\n", env!("CARGO_PKG_VERSION"), cfg.command()));
        s.push_str(&format!("# config-hash: sha256:{}\n", cfg.hash()));
        s.push_str(&format!("# config: {}\n", cfg.to_json()));
        for (k, v) in &self.summary {
            s.push_str(&format!("# summary {k}: {}\n", v.csv()));
        }
        for c in &self.columns {
            s.push_str(&format!("# {}: {}, {}\n", c.name, c.description, c.units));
        }
        let header: Vec<&str> = self.columns.iter().map(|c| c.name).collect();
        s.push_str(&header.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self, cfg: &RunConfig) -> String {
        let columns: Vec<Value> = self
            .columns
            .iter()
            .map(|c| json!({ "name": c.name, "description": c.description, "units": c.units }))
            .collect();
        let summary: Map<String, Value> = self.summary.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        let mut data = Map::new();
        for (i, c) in self.columns.iter().enumerate() {
            data.insert(c.name.into(), Value::Array(self.rows.iter().map(|r| r[i].json()).collect()));
        }
        let doc = json!({
            "metadata": {
                "generator": format!("tfim-quench {}", env!("CARGO_PKG_VERSION")),
                "command": cfg.command(),
                "config_hash": format!("sha256:{}", cfg.hash()),
                "config": serde_json::to_value(cfg).expect("config serializes"),
                "columns": columns,
                "summary": summary,
            },
            "data": data,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, cfg: &RunConfig, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(cfg),
            Format::Json => self.to_json(cfg),
        }
    }
}

/// `out.csv` with suffix `events` becomes `out.events.csv`.
pub fn sidecar_path(out: &Path, suffix: &str) -> PathBuf {
    if suffix.is_empty() {
        return out.to_path_buf();
    }
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}.{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{suffix}"),
    };
    out.with_file_name(name)
}

/// Write every table next to `out`. All contents go to temporary files in the
/// target directory first and are renamed into place only once every write
/// succeeded, so a failed run leaves no partial output behind.
pub fn write_tables(tables: &[Table], cfg: &RunConfig, out: &Path, format: Format) -> Result<Vec<PathBuf>, CliError> {
    let dir = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let io = |what: &str, p: &Path, e: std::io::Error| CliError::Io(format!("{what} {}: {e}", p.display()));
    let mut staged = Vec::new();
    for t in tables {
        let path = sidecar_path(out, t.suffix);
        let mut tmp = NamedTempFile::new_in(&dir).map_err(|e| io("cannot create a file in", &dir, e))?;
        tmp.write_all(t.render(cfg, format).as_bytes()).map_err(|e| io("cannot write", &path, e))?;
        tmp.as_file().sync_all().map_err(|e| io("cannot flush", &path, e))?;
        staged.push((tmp, path));
    }
    let mut written = Vec::new();
    for (tmp, path) in staged {
        tmp.persist(&path).map_err(|e| io("cannot rename into", &path, e.error))?;
        written.push(path);
    }
    Ok(written)
}
