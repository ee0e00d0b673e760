//! `network`: noise-corrected relatedness graph for one domain.

use authornet::network::{build_graph_with, export_graph, GraphFormat, NoiseConvention};
use authornet::overlap::OverlapMatrix;
use std::path::Path;

use super::{overlap::pairs_csv_path, resolve_aux_path, write_output};
use crate::manifest::{sanitize_file_stem, Manifest};

#[allow(clippy::too_many_arguments)]
pub fn run(
    manifest: &Manifest,
    out: &Path,
    domain: &str,
    noise_path: &Path,
    threshold: f64,
    format: GraphFormat,
    convention: NoiseConvention,
) -> anyhow::Result<()> {
    manifest.domain_areas(domain)?;
    let pairs = pairs_csv_path(out, domain);
    let bytes = std::fs::read(&pairs)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e} — run `overlap` first", pairs.display()))?;
    let matrix = OverlapMatrix::from_pairs_csv(&bytes)?;
    let noise = super::noise::load_noise_model(&resolve_aux_path(out, noise_path))?;

    let graph = build_graph_with(&matrix, &noise, threshold, convention)?;
    let exported = export_graph(&graph, format)?;
    let path = out
        .join("network")
        .join(format!("{}.{}", sanitize_file_stem(domain), format.file_extension()));
    write_output(&path, &exported)?;

    let included = graph.edges.iter().filter(|e| e.included).count();
    eprintln!(
        "network {domain}: nodes={} edges={} included={} -> {}",
        graph.nodes.len(),
        graph.edges.len(),
        included,
        path.display()
    );
    Ok(())
}
