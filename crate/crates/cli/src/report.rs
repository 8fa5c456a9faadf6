use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::input::DataFile;

pub const SCHEMA: &str = "unitchart.report/1";

/// Provenance block emitted with every report.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub tool_version: &'static str,
    /// SHA-256 over the input files (length-prefixed, in argument order).
    pub input_digest: String,
    /// Seconds since the epoch; `SOURCE_DATE_EPOCH` overrides the clock.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, config: &impl Serialize, inputs: &[&DataFile]) -> Self {
        RunManifest {
            command: command.to_owned(),
            config: serde_json::to_value(config).expect("config serializes"),
            tool_version: env!("CARGO_PKG_VERSION"),
            input_digest: digest(inputs),
            timestamp: timestamp(),
        }
    }
}

fn digest(inputs: &[&DataFile]) -> String {
    let mut h = Sha256::new();
    for f in inputs {
        h.update((f.bytes.len() as u64).to_le_bytes());
        h.update(&f.bytes);
    }
    h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn timestamp() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()) {
        return t;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub manifest: RunManifest,
    pub result: Value,
}

/// What a command hands back: the structured result and its text rendering.
pub struct Outcome {
    pub result: Value,
    pub table: String,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn new(result: &impl Serialize, table: String) -> Self {
        Outcome {
            result: serde_json::to_value(result).expect("result serializes"),
            table,
            warnings: Vec::new(),
        }
    }
}

/// Fixed-width text table.
pub struct TextTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl TextTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        TextTable { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) {
        self.rows.push(cells.into_iter().map(Into::into).collect());
    }

    pub fn render(&self) -> String {
        let cols = self.rows.iter().map(Vec::len).chain([self.header.len()]).max().unwrap_or(0);
        let mut width = vec![0; cols];
        for r in std::iter::once(&self.header).chain(&self.rows) {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        let mut line = |r: &[String]| {
            let cells: Vec<String> = r.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        };
        line(&self.header);
        line(&width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>());
        for r in &self.rows {
            line(r);
        }
        out
    }
}

pub fn f(x: f64, digits: usize) -> String {
    format!("{x:.digits$}")
}
