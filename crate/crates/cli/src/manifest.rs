//! Session manifest: the one file that names every input and output of a
//! reproducible run.

use anyhow::{bail, Context};
use authornet::FormatSpec;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaEntry {
    pub file: PathBuf,
    pub format: FormatSpec,
}

/// Declares the input file and format per area, groups areas into
/// domains, and fixes the seed and output directory. Relative paths are
/// resolved against the manifest's own directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default)]
    pub seed: u64,
    pub output_dir: PathBuf,
    pub areas: BTreeMap<String, AreaEntry>,
    #[serde(default)]
    pub domains: BTreeMap<String, Vec<String>>,
}

impl Manifest {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read manifest {}", path.display()))?;
        let mut manifest: Manifest = serde_json::from_str(&text)
            .with_context(|| format!("manifest {} is not valid", path.display()))?;
        manifest.validate()?;

        let base = path.parent().unwrap_or(Path::new("."));
        manifest.output_dir = resolve(base, &manifest.output_dir);
        for entry in manifest.areas.values_mut() {
            entry.file = resolve(base, &entry.file);
        }
        Ok(manifest)
    }

    fn validate(&self) -> anyhow::Result<()> {
        for name in self.areas.keys() {
            if name.trim().is_empty() {
                bail!("manifest declares an area with an empty name");
            }
        }
        for (domain, areas) in &self.domains {
            if areas.is_empty() {
                bail!("domain {domain:?} groups no areas");
            }
            for area in areas {
                if !self.areas.contains_key(area) {
                    bail!("domain {domain:?} references undeclared area {area:?}");
                }
            }
        }
        // distinct areas must not collide after filename sanitization
        let mut seen: BTreeMap<String, &String> = BTreeMap::new();
        for name in self.areas.keys() {
            if let Some(previous) = seen.insert(sanitize_file_stem(name), name) {
                bail!("area names {previous:?} and {name:?} map to the same list file name");
            }
        }
        Ok(())
    }

    pub fn domain_areas(&self, domain: &str) -> anyhow::Result<Vec<String>> {
        let mut areas = self
            .domains
            .get(domain)
            .with_context(|| format!("domain {domain:?} is not declared in the manifest"))?
            .clone();
        areas.sort();
        Ok(areas)
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Maps an area name onto a safe file stem.
pub fn sanitize_file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> String {
        r#"{
            "seed": 7,
            "output_dir": "out",
            "areas": {
                "first area": {"file": "a.txt", "format": "author-lines"},
                "second": {"file": "b.ris", "format": "ris"},
                "third": {"file": "c.csv", "format": {"csv": {"authors_column": "Authors", "separator": ";"}}}
            },
            "domains": {"main": ["first area", "second"], "other": ["third"]}
        }"#
        .to_string()
    }

    #[test]
    fn round_trips_losslessly() {
        let manifest: Manifest = serde_json::from_str(&minimal_json()).unwrap();
        let json = serde_json::to_string(&manifest).unwrap();
        let back: Manifest = serde_json::from_str(&json).unwrap();
        assert_eq!(manifest, back);
    }

    #[test]
    fn rejects_undeclared_domain_member() {
        let mut manifest: Manifest = serde_json::from_str(&minimal_json()).unwrap();
        manifest.domains.insert("bad".into(), vec!["missing".into()]);
        assert!(manifest.validate().is_err());
    }

    #[test]
    fn rejects_sanitization_collisions() {
        let mut manifest: Manifest = serde_json::from_str(&minimal_json()).unwrap();
        let entry = manifest.areas["second"].clone();
        manifest.areas.insert("first/area".into(), entry);
        assert!(manifest.validate().is_err());
    }

    #[test]
    fn sanitizes_names() {
        assert_eq!(sanitize_file_stem("social cybernetics"), "social_cybernetics");
        assert_eq!(sanitize_file_stem("a/b\\c:d"), "a_b_c_d");
        assert_eq!(sanitize_file_stem("plain-name_1.2"), "plain-name_1.2");
    }
}
