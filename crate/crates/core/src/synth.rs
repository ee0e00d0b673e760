//! Synthetic two-domain datasets with planted structure.
//!
//! The generator builds two domains whose base author pools are disjoint,
//! so any cross-domain overlap comes only from a controlled homonym
//! construction: a pool of collision names, each of which appears in any
//! area independently with a fixed rate. Within the first domain, chosen
//! area pairs share a planted fraction of authors. Pipelines run against
//! this data must recover the planted pairs as the strongest edges and
//! measure a noise floor consistent with the collision rate.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use std::collections::BTreeSet;

use crate::ingest::{AreaAuthorList, AuthorKey};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct SynthSpec {
    /// Areas per domain.
    pub areas_per_domain: usize,
    /// Unique base authors per area (before shared and collision names).
    pub base_authors: usize,
    /// Planted strong pairs in the first domain: `(area_i, area_j,
    /// shared_fraction)` with the shared author count equal to
    /// `floor(shared_fraction * base_authors)`.
    pub planted: Vec<(usize, usize, f64)>,
    /// Baseline relatedness inside each domain: every within-domain pair
    /// shares `floor(background_share * base_authors)` authors on top of
    /// any planted share, the way areas of one coherent field do.
    pub background_share: f64,
    /// Number of homonym collision names shared by both domains' pools.
    pub homonym_pool: usize,
    /// Probability that a collision name appears in any given area.
    pub homonym_rate: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            areas_per_domain: 10,
            base_authors: 200,
            planted: vec![(0, 1, 0.30), (2, 3, 0.25), (4, 5, 0.20)],
            background_share: 0.05,
            homonym_pool: 400,
            homonym_rate: 0.25,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub domain_a: Vec<AreaAuthorList>,
    pub domain_b: Vec<AreaAuthorList>,
    /// Area-name pairs planted as strongly related, strongest first.
    pub planted_pairs: Vec<(String, String)>,
}

fn key(prefix: &str, idx: usize) -> AuthorKey {
    AuthorKey::new(format!("{prefix}{idx:06}"), "q").expect("generated keys are valid")
}

/// Deterministically generates a dataset for `spec` under `seed`.
pub fn generate(spec: &SynthSpec, seed: u64) -> Result<SynthData> {
    if spec.areas_per_domain == 0 || spec.base_authors == 0 {
        return Err(Error::Config("generator needs at least one area and one author".into()));
    }
    if !(0.0..=1.0).contains(&spec.homonym_rate) {
        return Err(Error::Config(format!("homonym rate {} outside [0, 1]", spec.homonym_rate)));
    }
    for &(i, j, f) in &spec.planted {
        if i >= spec.areas_per_domain || j >= spec.areas_per_domain || i == j {
            return Err(Error::Config(format!("planted pair ({i}, {j}) is not a valid area pair")));
        }
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Config(format!("planted share {f} outside [0, 1]")));
        }
    }

    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut unique_counter = 0usize;

    let mut build_domain = |prefix: &str, planted: &[(usize, usize, f64)]| -> Result<Vec<AreaAuthorList>> {
        let mut sets: Vec<BTreeSet<AuthorKey>> = vec![BTreeSet::new(); spec.areas_per_domain];
        for set in sets.iter_mut() {
            for _ in 0..spec.base_authors {
                set.insert(key(prefix, unique_counter));
                unique_counter += 1;
            }
        }
        let mut shared_counter = 0usize;
        let mut share_between = |sets: &mut Vec<BTreeSet<AuthorKey>>, i: usize, j: usize, fraction: f64| {
            let shared = (fraction * spec.base_authors as f64).floor() as usize;
            for _ in 0..shared {
                let k = key(&format!("{prefix}shared"), shared_counter);
                shared_counter += 1;
                sets[i].insert(k.clone());
                sets[j].insert(k);
            }
        };
        for i in 0..spec.areas_per_domain {
            for j in (i + 1)..spec.areas_per_domain {
                share_between(&mut sets, i, j, spec.background_share);
            }
        }
        for &(i, j, fraction) in planted {
            share_between(&mut sets, i, j, fraction);
        }
        // collision names live in both domains and land in any area at the
        // same rate
        for h in 0..spec.homonym_pool {
            let k = key("hom", h);
            for set in sets.iter_mut() {
                if rng.random::<f64>() < spec.homonym_rate {
                    set.insert(k.clone());
                }
            }
        }
        sets.into_iter()
            .enumerate()
            .map(|(idx, set)| AreaAuthorList::new(format!("{prefix}{idx:02}"), set))
            .collect()
    };

    let domain_a = build_domain("alpha", &spec.planted)?;
    let domain_b = build_domain("beta", &[])?;

    let mut planted_sorted = spec.planted.clone();
    planted_sorted.sort_by(|a, b| b.2.total_cmp(&a.2));
    Ok(SynthData {
        domain_a,
        domain_b,
        planted_pairs: planted_sorted
            .into_iter()
            .map(|(i, j, _)| (format!("alpha{i:02}"), format!("alpha{j:02}")))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::overlap::{count_common, overlap_matrix};
    use crate::stats::{cross_noise_sample, summarize, NoiseModel};

    #[test]
    fn deterministic_for_a_seed() {
        let spec = SynthSpec::default();
        let a = generate(&spec, 7).unwrap();
        let b = generate(&spec, 7).unwrap();
        assert_eq!(a.domain_a, b.domain_a);
        assert_eq!(a.domain_b, b.domain_b);
        let c = generate(&spec, 8).unwrap();
        assert_ne!(a.domain_a, c.domain_a);
    }

    #[test]
    fn planted_shares_are_exact() {
        let spec = SynthSpec { homonym_pool: 0, background_share: 0.0, ..SynthSpec::default() };
        let data = generate(&spec, 1).unwrap();
        // with no homonyms and no background, overlap is exactly the
        // planted share
        assert_eq!(count_common(&data.domain_a[0], &data.domain_a[1]), 60);
        assert_eq!(count_common(&data.domain_a[2], &data.domain_a[3]), 50);
        assert_eq!(count_common(&data.domain_a[4], &data.domain_a[5]), 40);
        assert_eq!(count_common(&data.domain_a[0], &data.domain_a[2]), 0);
        // cross domain: totally disjoint
        for a in &data.domain_a {
            for b in &data.domain_b {
                assert_eq!(count_common(a, b), 0);
            }
        }
    }

    #[test]
    fn background_share_raises_every_pair() {
        let spec = SynthSpec { homonym_pool: 0, ..SynthSpec::default() };
        let data = generate(&spec, 1).unwrap();
        // background 0.05 * 200 = 10 on every pair, planted share on top
        assert_eq!(count_common(&data.domain_a[0], &data.domain_a[1]), 70);
        assert_eq!(count_common(&data.domain_a[0], &data.domain_a[2]), 10);
        assert_eq!(count_common(&data.domain_b[0], &data.domain_b[1]), 10);
    }

    #[test]
    fn zero_collision_construction_gives_all_zero_noise() {
        let spec = SynthSpec { homonym_pool: 0, background_share: 0.0, ..SynthSpec::default() };
        let data = generate(&spec, 3).unwrap();
        let sample = cross_noise_sample(&data.domain_a, &data.domain_b).unwrap();
        assert_eq!(sample.values.len(), 100);
        assert!(sample.values.iter().all(|v| *v == 0.0));
    }

    /// The generator knows its ground truth: with collision pool H and
    /// rate r, a cross pair shares Binomial(H, r^2) names in expectation.
    /// The sample median must sit inside the spread of independent
    /// replicates of the same construction.
    #[test]
    fn noise_median_tracks_collision_rate() {
        let spec = SynthSpec::default();
        let mut medians: Vec<f64> = (0..40)
            .map(|r| {
                let data = generate(&spec, 1000 + r).unwrap();
                let sample = cross_noise_sample(&data.domain_a, &data.domain_b).unwrap();
                summarize(&sample).unwrap().median
            })
            .collect();
        medians.sort_by(f64::total_cmp);
        let observed = medians[medians.len() / 2];
        // expected shared count per cross pair: 400 * 0.25^2 = 25 between
        // lists of roughly 300; p_hat ~ 1 - (1 - 25/n)^(1/m)
        assert!(observed > 1e-5, "observed median {observed}");
        assert!(observed < 1e-2, "observed median {observed}");
        assert!(medians.first().unwrap() > &0.0);
    }

    #[test]
    fn pipeline_recovers_planted_pairs_as_top_overlaps() {
        let data = generate(&SynthSpec::default(), 42).unwrap();
        let matrix = overlap_matrix(&data.domain_a).unwrap();
        let noise = NoiseModel::from_sample(cross_noise_sample(&data.domain_a, &data.domain_b).unwrap()).unwrap();
        let graph = crate::network::build_graph(&matrix, &noise, 0.0).unwrap();
        let mut edges = graph.edges.clone();
        edges.sort_by(|a, b| b.link_strength.total_cmp(&a.link_strength));
        let top: Vec<(String, String)> = edges[..3].iter().map(|e| (e.area_a.clone(), e.area_b.clone())).collect();
        assert_eq!(top, data.planted_pairs);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(generate(&SynthSpec { areas_per_domain: 0, ..SynthSpec::default() }, 0).is_err());
        assert!(generate(&SynthSpec { planted: vec![(0, 0, 0.1)], ..SynthSpec::default() }, 0).is_err());
        assert!(generate(&SynthSpec { planted: vec![(0, 99, 0.1)], ..SynthSpec::default() }, 0).is_err());
        assert!(generate(&SynthSpec { homonym_rate: 1.5, ..SynthSpec::default() }, 0).is_err());
    }
}
