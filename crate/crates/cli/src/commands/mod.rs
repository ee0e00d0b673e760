//! Subcommand implementations. Every stage reads only manifest inputs or
//! files written by earlier stages, so each command can be re-run in
//! isolation and identical inputs give byte-identical outputs.

pub mod ingest;
pub mod network;
pub mod noise;
pub mod overlap;
pub mod simulate;
pub mod stats;

use anyhow::Context;
use authornet::{build_area_list, parse_records, AreaAuthorList, FormatSpec};
use std::path::{Path, PathBuf};

use crate::manifest::{sanitize_file_stem, Manifest};

pub fn lists_dir(out: &Path) -> PathBuf {
    out.join("lists")
}

pub fn list_path(out: &Path, area: &str) -> PathBuf {
    lists_dir(out).join(format!("{}.txt", sanitize_file_stem(area)))
}

/// Reads one deduplicated area list back from its canonical file.
pub fn load_area_list(out: &Path, area: &str) -> anyhow::Result<AreaAuthorList> {
    let path = list_path(out, area);
    let bytes = std::fs::read(&path).with_context(|| {
        format!("cannot read {} — run `ingest` first", path.display())
    })?;
    let records = parse_records(&bytes, &FormatSpec::AuthorLines)?;
    Ok(build_area_list(&records, area)?.list)
}

/// Loads a whole domain, areas sorted by name for deterministic ordering.
pub fn load_domain_lists(manifest: &Manifest, out: &Path, domain: &str) -> anyhow::Result<Vec<AreaAuthorList>> {
    manifest
        .domain_areas(domain)?
        .iter()
        .map(|area| load_area_list(out, area))
        .collect()
}

pub fn write_output(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("cannot create {}", parent.display()))?;
    }
    std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Resolves a user-supplied auxiliary path: as given if it exists,
/// otherwise relative to the output directory.
pub fn resolve_aux_path(out: &Path, path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        path.to_path_buf()
    } else {
        out.join(path)
    }
}
