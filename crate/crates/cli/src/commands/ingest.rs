//! `ingest`: parse every declared input file into a deduplicated,
//! sorted author list per area, with an audit trail on stderr.

use anyhow::Context;
use authornet::{build_area_list, parse_records};
use std::path::Path;

use super::{list_path, write_output};
use crate::manifest::Manifest;

pub fn run(manifest: &Manifest, out: &Path) -> anyhow::Result<()> {
    for (area, entry) in &manifest.areas {
        let bytes = std::fs::read(&entry.file)
            .with_context(|| format!("cannot read input {}", entry.file.display()))?;
        let records = parse_records(&bytes, &entry.format)
            .with_context(|| format!("cannot parse {}", entry.file.display()))?;
        let outcome = build_area_list(&records, area)?;

        write_output(&list_path(out, area), outcome.list.to_author_lines().as_bytes())?;

        eprintln!(
            "ingest {area}: records={} raw_authors={} unique={} skipped={}",
            outcome.records,
            outcome.raw_authors,
            outcome.list.size(),
            outcome.skipped.len()
        );
        for raw in &outcome.skipped {
            eprintln!("ingest {area}: skipped {raw:?}");
        }
        if outcome.list.size() == 0 {
            eprintln!("ingest {area}: warning: empty author list");
        }
    }
    Ok(())
}
