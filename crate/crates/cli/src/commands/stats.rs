//! `stats`: the comparative statistics report, from computed samples or
//! from a fixture of pre-computed summary values.

use anyhow::Context;
use authornet::overlap::OverlapMatrix;
use authornet::report::{report_from_fixture, report_from_samples, StatsReport, SummaryFixture};
use authornet::stats::within_sample;
use std::path::Path;

use super::{overlap::pairs_csv_path, resolve_aux_path, write_output};
use crate::manifest::{sanitize_file_stem, Manifest};

pub fn run_fixture(out: &Path, fixture_path: &Path) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(fixture_path)
        .with_context(|| format!("cannot read fixture {}", fixture_path.display()))?;
    let fixture: SummaryFixture = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a summary fixture", fixture_path.display()))?;
    let report = report_from_fixture(&fixture)?;
    let stem = fixture_path
        .file_stem()
        .and_then(|s| s.to_str())
        .map(sanitize_file_stem)
        .unwrap_or_else(|| "fixture".to_string());
    emit(out, &stem, &report)
}

pub fn run_pipeline(
    manifest: &Manifest,
    out: &Path,
    domains: &[String],
    noise_path: &Path,
) -> anyhow::Result<()> {
    // sanity: the domains must exist in the manifest even though the data
    // comes from staged files
    for domain in domains {
        manifest.domain_areas(domain)?;
    }
    let noise = super::noise::load_noise_model(&resolve_aux_path(out, noise_path))?;
    let samples = domains
        .iter()
        .map(|domain| {
            let path = pairs_csv_path(out, domain);
            let bytes = std::fs::read(&path).map_err(|e| {
                anyhow::anyhow!("cannot read {}: {e} — run `overlap` first", path.display())
            })?;
            let matrix = OverlapMatrix::from_pairs_csv(&bytes)?;
            Ok((domain.clone(), within_sample(&matrix)))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let report = report_from_samples(&samples, &noise)?;
    let stem = domains.iter().map(|d| sanitize_file_stem(d)).collect::<Vec<_>>().join("__");
    emit(out, &stem, &report)
}

fn emit(out: &Path, stem: &str, report: &StatsReport) -> anyhow::Result<()> {
    let json = serde_json::to_vec_pretty(report).expect("report serializes");
    write_output(&out.join("stats").join(format!("{stem}.json")), &json)?;
    let text = report.to_text();
    write_output(&out.join("stats").join(format!("{stem}.txt")), text.as_bytes())?;
    print!("{text}");
    Ok(())
}
