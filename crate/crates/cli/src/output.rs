use std::fs;
use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

use crate::CliError;

/// Writes `contents` next to `path` and renames it into place, so readers
/// never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut file = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    file.write_all(contents.as_bytes()).map_err(|e| CliError::io(path, e))?;
    file.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    file.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
