//! File helpers: atomic writes and loaders with path context.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use theta_core::datagen::{load_labels, load_matrix};
use theta_core::DataMatrix;

/// Writes `contents` to a temporary file next to `path`, then renames it
/// into place so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(contents)
        .with_context(|| format!("writing {}", path.display()))?;
    tmp.persist(path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_matrix(path: &Path) -> Result<DataMatrix> {
    load_matrix(path).with_context(|| format!("loading data {}", path.display()))
}

pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    load_labels(path).with_context(|| format!("loading labels {}", path.display()))
}

/// Loads a label file and checks it has one entry per sample.
pub fn read_truth(path: &Path, n_samples: usize) -> Result<Vec<usize>> {
    let labels = read_labels(path)?;
    anyhow::ensure!(
        labels.len() == n_samples,
        "{} has {} labels but the data has {} samples",
        path.display(),
        labels.len(),
        n_samples
    );
    Ok(labels)
}
