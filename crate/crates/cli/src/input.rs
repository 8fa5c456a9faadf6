use std::path::Path;

use crate::error::CliError;

/// A data file with its raw bytes, kept for the manifest digest.
pub struct DataFile {
    pub bytes: Vec<u8>,
    pub values: Vec<f64>,
}

/// Reads one numeric column. Blank lines and `#` comments are skipped; the
/// first content line may be a non-numeric header.
pub fn read_data(path: &Path) -> Result<DataFile, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    let values = parse_data(path, &bytes)?;
    Ok(DataFile { bytes, values })
}

pub fn parse_data(path: &Path, bytes: &[u8]) -> Result<Vec<f64>, CliError> {
    let err = |line: Option<usize>, message: String| CliError::Input { path: path.to_owned(), line, message };
    let text = std::str::from_utf8(bytes).map_err(|e| err(None, format!("not UTF-8 text ({e})")))?;
    let mut values = Vec::new();
    let mut seen_content = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        let first = !seen_content;
        seen_content = true;
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v < 1.0 => values.push(v),
            Ok(v) => return Err(err(Some(line), format!("value {v} is outside the open interval (0, 1)"))),
            Err(_) if first && s.chars().any(|c| c.is_alphabetic()) => {}
            Err(_) => return Err(err(Some(line), format!("'{s}' is not a number"))),
        }
    }
    if values.is_empty() {
        return Err(err(None, "no observations".into()));
    }
    Ok(values)
}
