use std::fs;
use std::path::Path;

use crate::commands::CliError;

/// Reads one positive observation per line. Blank lines and lines starting
/// with `#` are skipped.
pub fn read_sample(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    parse_sample(&text).map_err(|(line, msg)| CliError::input(format!("{}:{line}: {msg}", path.display())))
}

fn parse_sample(text: &str) -> Result<Vec<f64>, (usize, String)> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| (i + 1, format!("not a number: {line:?}")))?;
        if !(v.is_finite() && v > 0.0) {
            return Err((i + 1, format!("observation must be positive and finite, got {line}")));
        }
        values.push(v);
    }
    Ok(values)
}
