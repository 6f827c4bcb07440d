use crate::config::RunConfig;
use crate::CliError;
use serde_json::{json, Value};
use std::fmt::Display;
use std::path::{Path, PathBuf};

pub const SCHEMA: &str = "qroutesim-schema v1";

/// Rows of one CSV table. Values are written with `Display`, so the bytes
/// depend only on the numbers.
pub struct Table {
    header: Vec<String>,
    notes: Vec<String>,
    rows: Vec<String>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), notes: Vec::new(), rows: Vec::new() }
    }

    /// Adopts an already rendered CSV body (header line first).
    pub fn from_csv(text: &str) -> Self {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("").split(',').map(str::to_string).collect();
        Table { header, notes: Vec::new(), rows: lines.map(str::to_string).collect() }
    }

    /// Extra `# key: value` line above the header.
    pub fn note(&mut self, key: &str, value: impl Display) {
        self.notes.push(format!("# {key}: {value}"));
    }

    pub fn row(&mut self, cells: &[&dyn Display]) {
        assert_eq!(cells.len(), self.header.len(), "row width");
        self.rows.push(cells.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","));
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn render(&self, subcommand: &str, cfg: &RunConfig) -> String {
        let mut out = format!("# {SCHEMA}\n# subcommand: {subcommand}\n");
        out += &format!("# config: {}\n", serde_json::to_string(cfg).expect("config serializes"));
        for n in &self.notes {
            out += n;
            out.push('\n');
        }
        out += &self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out += r;
            out.push('\n');
        }
        out
    }
}

/// Where results go: `--out`, then `QROUTESIM_OUT`, then `[output] dir`,
/// then `./qroutesim-out`.
pub fn output_dir(flag: Option<&Path>, cfg: &RunConfig) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os("QROUTESIM_OUT") {
        return PathBuf::from(p);
    }
    cfg.output.dir.as_deref().map_or_else(|| PathBuf::from("qroutesim-out"), PathBuf::from)
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes `<subcommand>.csv` and `<subcommand>.json` into `dir`; returns the
/// CSV path.
pub fn emit(dir: &Path, subcommand: &str, cfg: &RunConfig, table: &Table, summary: Value) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let csv = dir.join(format!("{subcommand}.csv"));
    write(&csv, &table.render(subcommand, cfg))?;
    let created = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let doc = json!({
        "schema": SCHEMA,
        "subcommand": subcommand,
        "seed": cfg.seed,
        "config": cfg,
        "summary": summary,
        "metadata": { "created_unix": created, "version": env!("CARGO_PKG_VERSION") },
    });
    let text = serde_json::to_string_pretty(&doc).expect("summary serializes") + "\n";
    write(&dir.join(format!("{subcommand}.json")), &text)?;
    Ok(csv)
}

/// Writes an extra artifact next to the CSV/JSON pair.
pub fn emit_extra(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    write(&dir.join(name), text)
}
