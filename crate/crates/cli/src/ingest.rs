//! Observation ingestion: a single-column CSV, UTF-8, LF or CRLF line
//! endings, with an optional header line.

use crate::report::CliError;
use std::path::Path;

pub fn read_csv(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) => values.push(v),
            // a non-numeric first line is a header
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(CliError::config(format!(
                    "{}: line {} is not a number: {line:?}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(CliError::config(format!(
            "{}: no observations found",
            path.display()
        )));
    }
    Ok(values)
}
