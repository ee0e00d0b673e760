//! `noise`: homonymy noise floor from the cross comparison of two
//! unrelated domains.

use authornet::stats::{histogram, NoiseModel};
use authornet::cross_noise_sample;
use std::path::Path;

use super::{load_domain_lists, write_output};
use crate::manifest::{sanitize_file_stem, Manifest};

pub fn run(
    manifest: &Manifest,
    out: &Path,
    domain_a: &str,
    domain_b: &str,
    bins: usize,
    range: Option<(f64, f64)>,
) -> anyhow::Result<()> {
    let lists_a = load_domain_lists(manifest, out, domain_a)?;
    let lists_b = load_domain_lists(manifest, out, domain_b)?;
    let sample = cross_noise_sample(&lists_a, &lists_b)?;
    let model = NoiseModel::from_sample(sample)?;

    let stem = format!("{}__vs__{}", sanitize_file_stem(domain_a), sanitize_file_stem(domain_b));
    let json = serde_json::to_vec_pretty(&model).expect("noise model serializes");
    write_output(&out.join("noise").join(format!("{stem}.json")), &json)?;

    let hist = histogram(&model.sample, bins, range)?;
    write_output(&out.join("noise").join(format!("{stem}.hist.csv")), hist.to_csv().as_bytes())?;

    eprintln!(
        "noise {domain_a} x {domain_b}: pairs={} median_p0={:e} mean_p0={:e}",
        model.sample.values.len(),
        model.median_p0,
        model.mean_p0
    );
    Ok(())
}

pub fn load_noise_model(path: &Path) -> anyhow::Result<NoiseModel> {
    let bytes = std::fs::read(path)
        .map_err(|e| anyhow::anyhow!("cannot read noise model {}: {e} — run `noise` first", path.display()))?;
    let model: NoiseModel = serde_json::from_slice(&bytes)
        .map_err(|e| anyhow::anyhow!("{} is not a noise model: {e}", path.display()))?;
    Ok(model)
}
