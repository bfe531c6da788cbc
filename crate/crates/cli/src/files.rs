use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use framekit::io::{parse_document, Document};

use crate::report::InputRecord;
use crate::CliError;

#[derive(Debug, Clone)]
pub struct Loaded {
    pub path: PathBuf,
    pub document: Document,
    pub record: InputRecord,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = String::from_utf8_lossy(&bytes);
    let document = parse_document(&text).map_err(|e| CliError::from_parse(path, e))?;
    let record = InputRecord {
        path: path.display().to_string(),
        kind: document.kind().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    };
    Ok(Loaded {
        path: path.to_path_buf(),
        document,
        record,
    })
}

/// Write via a temporary file in the target directory, then rename over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
