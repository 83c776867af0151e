use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::CliError;

/// Writes every `(path, contents)` pair to a temporary sibling first and only
/// renames them into place once all of them were written.
fn parent_of(path: &Path) -> &Path {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

/// Fails early, before any long computation, when `path` cannot be created.
pub fn ensure_parent_dir(path: &Path) -> Result<(), CliError> {
    let dir = parent_of(path);
    match fs::metadata(dir) {
        Ok(m) if m.is_dir() => Ok(()),
        Ok(_) => Err(CliError::io(
            path,
            io::Error::new(io::ErrorKind::NotADirectory, "parent is not a directory"),
        )),
        Err(e) => Err(CliError::io(path, e)),
    }
}

pub fn write_atomically(files: &[(PathBuf, Vec<u8>)]) -> Result<(), CliError> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, contents) in files {
        let mut tmp = NamedTempFile::new_in(parent_of(path)).map_err(|e| CliError::io(path, e))?;
        tmp.write_all(contents)
            .and_then(|_| tmp.as_file().sync_all())
            .map_err(|e| CliError::io(path, e))?;
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    }
    Ok(())
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}
