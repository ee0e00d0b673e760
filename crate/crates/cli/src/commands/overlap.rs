//! `overlap`: the pairwise comparison matrix for one domain.

use authornet::overlap_matrix;
use std::path::Path;

use super::{load_domain_lists, write_output};
use crate::manifest::{sanitize_file_stem, Manifest};

pub fn run(manifest: &Manifest, out: &Path, domain: &str) -> anyhow::Result<()> {
    let lists = load_domain_lists(manifest, out, domain)?;
    let matrix = overlap_matrix(&lists)?;

    let stem = sanitize_file_stem(domain);
    write_output(&out.join("overlap").join(format!("{stem}.pairs.csv")), matrix.to_pairs_csv().as_bytes())?;
    write_output(&out.join("overlap").join(format!("{stem}.matrix.csv")), matrix.to_square_csv().as_bytes())?;

    eprintln!("overlap {domain}: areas={} pairs={}", matrix.areas.len(), matrix.cells.len());
    Ok(())
}

pub fn pairs_csv_path(out: &Path, domain: &str) -> std::path::PathBuf {
    out.join("overlap").join(format!("{}.pairs.csv", sanitize_file_stem(domain)))
}
