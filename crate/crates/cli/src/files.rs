//! File loading and atomic output.

use std::io::Write;
use std::path::{Path, PathBuf};

use foonplan_core::document::{from_json, parse_subgraph, read_to_string};
use foonplan_core::legacy::parse_foon_text;
use foonplan_core::store::FoonDocument;
use foonplan_core::{Error, Subgraph, UniversalFoon};
use serde::de::DeserializeOwned;
use tempfile::NamedTempFile;

use crate::{CliError, Result};

pub fn read(path: &Path) -> Result<String> {
    Ok(read_to_string(path)?)
}

/// Reads a JSON document, naming the file in any error.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read(path)?;
    let parsed = from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(parsed.value)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "subgraph".into())
}

enum Loaded {
    Subgraph(Subgraph),
    Universal(Box<UniversalFoon>),
}

fn load_one(path: &Path) -> Result<Loaded> {
    let text = read(path)?;
    let context = |e: &dyn std::fmt::Display| CliError::Usage(format!("{}: {e}", path.display()));
    if path.extension().is_some_and(|e| e == "txt") {
        return Ok(Loaded::Subgraph(parse_foon_text(&stem(path), &text).map_err(|e| context(&e))?));
    }
    let probe: serde_json::Value = serde_json::from_str(&text).map_err(|e| context(&e))?;
    if probe.get("subgraphs").is_some() {
        let doc: FoonDocument = from_json(&text).map_err(|e| context(&e))?.value;
        let foon = UniversalFoon::from_document(doc).map_err(|e| context(&Error::from(e)))?;
        Ok(Loaded::Universal(Box::new(foon)))
    } else {
        Ok(Loaded::Subgraph(parse_subgraph(&text).map_err(|e| context(&e))?.value))
    }
}

/// Loads subgraph documents (JSON or legacy text) and universal FOON
/// documents, and merges them all.
pub fn load_foon(paths: &[PathBuf]) -> Result<UniversalFoon> {
    if paths.is_empty() {
        return Err(CliError::Usage("no FOON inputs given".into()));
    }
    let mut subgraphs = Vec::new();
    let mut universals = Vec::new();
    for p in paths {
        match load_one(p)? {
            Loaded::Subgraph(s) => subgraphs.push(s),
            Loaded::Universal(u) => universals.push(u),
        }
    }
    let mut foon = UniversalFoon::merge(&subgraphs)?;
    for u in &universals {
        foon = foon.union(u)?;
    }
    Ok(foon)
}

/// Writes every file or none: all contents go to temporary files in the
/// target directories first, then each is renamed into place.
pub fn write_all_atomic(outputs: &[(PathBuf, Vec<u8>)]) -> Result<()> {
    let io = |ctx: String, e: std::io::Error| CliError::Core(Error::io(ctx, e));
    let mut staged = Vec::with_capacity(outputs.len());
    for (path, bytes) in outputs {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
            _ => PathBuf::from("."),
        };
        std::fs::create_dir_all(&dir).map_err(|e| io(format!("creating {}", dir.display()), e))?;
        let mut tmp = NamedTempFile::new_in(&dir).map_err(|e| io(format!("staging {}", path.display()), e))?;
        tmp.write_all(bytes)
            .and_then(|_| tmp.as_file().sync_all())
            .map_err(|e| io(format!("writing {}", path.display()), e))?;
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        tmp.persist(path)
            .map_err(|e| io(format!("renaming into {}", path.display()), e.error))?;
    }
    Ok(())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    write_all_atomic(&[(path.to_path_buf(), bytes.to_vec())])
}
