//! CSV tables with a `# ` comment header echoing the effective configuration.

use super::config::RunConfig;
use super::CliError;
use std::path::Path;

pub const CONFIG_MARKER: &str = "# config:";

/// A CSV table with named columns and preformatted cells.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip form; exponent notation outside `[1e-4, 1e16)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Parsed comment header of an output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub version: String,
    pub command: String,
    pub timestamp: String,
    pub seed: u64,
    /// `key: value` lines between the seed and the config echo.
    pub extra: Vec<(String, String)>,
    pub config: RunConfig,
}

pub fn render(
    command: &str,
    cfg: &RunConfig,
    extra: &[(String, String)],
    table: &Table,
) -> Result<String, CliError> {
    let mut s = String::new();
    s.push_str(&format!("# pcurv {}\n", env!("CARGO_PKG_VERSION")));
    s.push_str(&format!("# command: {command}\n"));
    s.push_str(&format!("# timestamp: {}\n", chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)));
    s.push_str(&format!("# seed: {}\n", cfg.seed));
    for (k, v) in extra {
        s.push_str(&format!("# {k}: {v}\n"));
    }
    s.push_str(CONFIG_MARKER);
    s.push('\n');
    for line in cfg.to_toml().lines() {
        s.push_str(if line.is_empty() { "#" } else { "# " });
        s.push_str(line);
        s.push('\n');
    }
    s.push_str(&body(table)?);
    Ok(s)
}

/// The CSV part alone: column line and rows.
pub fn body(table: &Table) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for r in &table.rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Splits an output file into its header and CSV body.
pub fn parse(text: &str) -> Result<(Header, String), CliError> {
    let bad = |m: &str| CliError::Usage(format!("malformed output header: {m}"));
    let mut lines = text.lines();
    let version = lines
        .next()
        .and_then(|l| l.strip_prefix("# pcurv "))
        .ok_or_else(|| bad("missing version line"))?
        .to_string();
    let mut field = |name: &str| {
        lines
            .next()
            .and_then(|l| l.strip_prefix(&format!("# {name}: ")))
            .map(str::to_string)
            .ok_or_else(|| bad(name))
    };
    let command = field("command")?;
    let timestamp = field("timestamp")?;
    let seed = field("seed")?.parse().map_err(|_| bad("seed"))?;
    let mut extra = Vec::new();
    loop {
        let l = lines.next().ok_or_else(|| bad("missing config echo"))?;
        if l == CONFIG_MARKER {
            break;
        }
        let (k, v) = l.strip_prefix("# ").and_then(|r| r.split_once(": ")).ok_or_else(|| bad(l))?;
        extra.push((k.to_string(), v.to_string()));
    }
    let mut toml_text = String::new();
    let mut rest = Vec::new();
    for l in lines {
        if rest.is_empty() && l.starts_with('#') {
            toml_text.push_str(l.strip_prefix("# ").unwrap_or(&l[1..]));
            toml_text.push('\n');
        } else {
            rest.push(l);
        }
    }
    let config = RunConfig::from_toml(&toml_text)?;
    let mut csv_body = rest.join("\n");
    if text.ends_with('\n') && !csv_body.is_empty() {
        csv_body.push('\n');
    }
    Ok((Header { version, command, timestamp, seed, extra, config }, csv_body))
}

/// Writes to `path`, or to standard output when absent.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes())?
        }
    }
    Ok(())
}
