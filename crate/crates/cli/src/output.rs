//! Writers for CSV and JSON-lines results, and the run manifest.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::CliError;

/// Table and summary produced by one command.
#[derive(Clone, Debug, Default)]
pub struct RunResult {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Value,
    /// Set when the command ran but a check failed.
    pub failure: Option<String>,
    /// Extra CSV tables, written to `<out>.<name>.csv` when `--out` is set.
    pub side: Vec<SideTable>,
}

#[derive(Clone, Debug, Default)]
pub struct SideTable {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl RunResult {
    pub fn new(columns: &[&'static str]) -> Self {
        RunResult { columns: columns.to_vec(), summary: Value::Null, ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        v => v.to_string(),
    }
}

pub fn write_csv<W: Write>(w: W, hash: &str, result: &RunResult) -> Result<(), CliError> {
    write_table(w, hash, &result.columns, &result.rows)
}

fn write_table<W: Write>(mut w: W, hash: &str, columns: &[&str], rows: &[Vec<Value>]) -> Result<(), CliError> {
    writeln!(w, "# config_hash: {hash}")?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(columns)?;
    for row in rows {
        csv.write_record(row.iter().map(cell))?;
    }
    csv.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(mut w: W, cfg: &RunConfig, hash: &str, result: &RunResult) -> Result<(), CliError> {
    serde_json::to_writer(&mut w, &json!({ "config_hash": hash, "config": cfg }))?;
    writeln!(w)?;
    for row in &result.rows {
        let obj: Map<String, Value> = result.columns.iter().map(|c| c.to_string()).zip(row.iter().cloned()).collect();
        serde_json::to_writer(&mut w, &obj)?;
        writeln!(w)?;
    }
    serde_json::to_writer(&mut w, &json!({ "summary": result.summary }))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// `<out><suffix>`, e.g. `<out>.manifest.json`
pub fn sibling_path(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

/// Writes the result to stdout or `--out`, plus a manifest and any side
/// tables next to the output file. A one-line summary goes to stderr.
pub fn write(cfg: &RunConfig, result: &RunResult, elapsed_secs: f64) -> Result<(), CliError> {
    let hash = cfg.hash();
    let emit = |w: &mut dyn Write| match cfg.format {
        Format::Csv => write_csv(w, &hash, result),
        Format::Json => write_json(w, cfg, &hash, result),
    };
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            emit(&mut w)?;
            w.flush()?;
            let manifest = json!({
                "command": cfg.command,
                "config": cfg,
                "config_hash": hash,
                "seed": cfg.seed,
                "timestamp_unix": SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
                "elapsed_secs": elapsed_secs,
                "version": env!("CARGO_PKG_VERSION"),
                "summary": result.summary,
            });
            std::fs::write(sibling_path(path, ".manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
            for t in &result.side {
                let file = File::create(sibling_path(path, &format!(".{}.csv", t.name)))?;
                write_table(BufWriter::new(file), &hash, &t.columns, &t.rows)?;
            }
        }
        None => {
            let stdout = io::stdout();
            emit(&mut stdout.lock())?;
        }
    }
    eprintln!("{} rows in {elapsed_secs:.2}s; summary {}", result.rows.len(), result.summary);
    Ok(())
}
