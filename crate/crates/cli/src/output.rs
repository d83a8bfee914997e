use std::env;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::CliError;

pub const OUTPUT_DIR_VAR: &str = "RELCONTRACT_OUTPUT_DIR";

pub fn resolve_path(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Some(dir) = env::var_os(OUTPUT_DIR_VAR).filter(|d| !d.is_empty()) {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

/// Writes `text` to `path` via a sibling temp file and rename, or to stdout.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes()).map_err(CliError::io)?;
        return out.flush().map_err(CliError::io);
    };
    let path = resolve_path(path);
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(CliError::io)?;
    let mut tmp = NamedTempFile::new_in(&dir).map_err(CliError::io)?;
    tmp.write_all(text.as_bytes()).map_err(CliError::io)?;
    tmp.as_file().sync_all().map_err(CliError::io)?;
    tmp.persist(&path).map_err(|e| CliError::io(e.error))?;
    Ok(())
}

/// Header comment plus column line for a versioned CSV schema.
pub fn csv_head(schema: &str, extra: &str, columns: &[&str]) -> String {
    let mut s = format!("# relcontract-{schema} v1");
    if !extra.is_empty() {
        s.push(' ');
        s.push_str(extra);
    }
    s.push('\n');
    s.push_str(&columns.join(","));
    s.push('\n');
    s
}
