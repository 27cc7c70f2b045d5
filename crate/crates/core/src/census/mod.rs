//! Monte Carlo census of realizable Gromov product structures.
//!
//! Each draw assigns independent integer weights in `[1, W]` to the edges of
//! the complete graph, closes them under shortest paths, extracts the
//! structure and files it under its canonical form. Draw `i` of a census with
//! seed `s` uses `ChaCha8Rng::seed_from_u64(s)` switched to stream `i`, so any
//! draw can be regenerated on its own and the result does not depend on how
//! the index range is split between workers.

mod reference;

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equivalence::canonical_form;
use crate::invariants::{fingerprint, InvariantFingerprint};
use crate::metric::{extract_structure, pair_count, pair_index, parse_metric, MetricFormat, MetricSpace};
use crate::rational::Rational;
use crate::structure::GromovStructure;

pub use reference::{
    check_tables, reference_structures, BijectionSummary, Erratum, Family, Finding, ReferenceStructure,
    RowReport, TableReport, REFERENCE_DATA_VERSION,
};

/// Version of the registry JSON layout.
pub const REGISTRY_SCHEMA_VERSION: u32 = 1;
/// Default upper end of the weight interval, `2^20`.
pub const DEFAULT_MAX_WEIGHT: u64 = 1 << 20;
/// Human-readable description of the sampling scheme, echoed in registries.
pub const RNG_DESCRIPTION: &str =
    "ChaCha8Rng::seed_from_u64(seed), set_stream(draw_index); weight = 1 + next_u64() mod max_weight, pairs in row-major upper-triangle order";

const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("invalid census configuration: {0}")]
    InvalidConfig(String),
    #[error("registries cover different point counts: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("no reference data for n = {0} (available: 4, 5, 6)")]
    UnsupportedN(usize),
    #[error("reference mismatch in row {row}, field {field}: expected {expected}, found {found}")]
    ReferenceMismatch { row: String, field: String, expected: String, found: String },
    #[error("malformed registry: {0}")]
    Registry(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n: usize,
    pub sample_budget: u64,
    pub seed: u64,
    /// Weights are drawn from `[1, max_weight]`.
    pub max_weight: u64,
    /// Draw index of the first sample; lets a budget be split across runs.
    #[serde(default)]
    pub start_index: u64,
}

impl SamplerConfig {
    pub fn new(n: usize, sample_budget: u64, seed: u64) -> Self {
        SamplerConfig { n, sample_budget, seed, max_weight: DEFAULT_MAX_WEIGHT, start_index: 0 }
    }

    pub fn validate(&self) -> Result<(), CensusError> {
        if self.n < 3 {
            return Err(CensusError::InvalidConfig(format!("n must be at least 3, got {}", self.n)));
        }
        if self.sample_budget == 0 {
            return Err(CensusError::InvalidConfig("sample budget must be at least 1".into()));
        }
        if self.max_weight < 2 {
            return Err(CensusError::InvalidConfig("max weight must be at least 2".into()));
        }
        // Closed distances are at most (n-1) * W; doubled products must fit in i64.
        let bound = (self.n as u128) * u128::from(self.max_weight) * 4;
        if bound > i64::MAX as u128 {
            return Err(CensusError::InvalidConfig("max weight too large for exact integer sampling".into()));
        }
        if self.start_index.checked_add(self.sample_budget).is_none() {
            return Err(CensusError::InvalidConfig("draw index range overflows".into()));
        }
        Ok(())
    }

    fn draws(&self) -> std::ops::Range<u64> {
        self.start_index..self.start_index + self.sample_budget
    }
}

/// Raw edge weights of draw `draw_index`, in packed pair order.
pub fn sample_weights(cfg: &SamplerConfig, draw_index: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(draw_index);
    (0..pair_count(cfg.n)).map(|_| 1 + rng.next_u64() % cfg.max_weight).collect()
}

/// Shortest-path closure over integers, packed pair order.
pub fn integer_closure(n: usize, weights: &[u64]) -> Vec<u64> {
    let mut dist = weights.to_vec();
    for via in 0..n {
        for i in 0..n {
            if i == via {
                continue;
            }
            let d_iv = dist[pair_index(n, i, via)];
            for j in i + 1..n {
                if j == via {
                    continue;
                }
                let through = d_iv + dist[pair_index(n, via, j)];
                let slot = &mut dist[pair_index(n, i, j)];
                if through < *slot {
                    *slot = through;
                }
            }
        }
    }
    dist
}

/// Structure of an integer metric, or `None` when some vertex has tied
/// minimal products. Agrees with [`extract_structure`] on every input.
pub fn integer_structure(n: usize, dist: &[u64]) -> Option<GromovStructure> {
    let d = |i: usize, j: usize| dist[pair_index(n, i, j)] as i64;
    let mut pairs = Vec::with_capacity(n);
    for apex in 0..n {
        let mut best = i64::MAX;
        let mut arg = (0, 0);
        let mut tied = false;
        for j in 0..n {
            if j == apex {
                continue;
            }
            for k in j + 1..n {
                if k == apex {
                    continue;
                }
                let doubled = d(apex, j) + d(apex, k) - d(j, k);
                if doubled < best {
                    best = doubled;
                    arg = (j, k);
                    tied = false;
                } else if doubled == best {
                    tied = true;
                }
            }
        }
        if tied {
            return None;
        }
        pairs.push(arg);
    }
    Some(GromovStructure::new(pairs).expect("minimal pairs form a valid structure"))
}

fn to_metric(n: usize, dist: &[u64]) -> MetricSpace {
    let dist = dist.iter().map(|&v| Rational::from_integer(v)).collect();
    MetricSpace::from_packed(n, dist).expect("shortest-path closure is a metric")
}

/// Metric of draw `draw_index`: sampled weights closed under shortest paths.
pub fn sample_metric(cfg: &SamplerConfig, draw_index: u64) -> MetricSpace {
    let weights = sample_weights(cfg, draw_index);
    to_metric(cfg.n, &integer_closure(cfg.n, &weights))
}

/// Where a class was first seen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub seed: u64,
    pub draw_index: u64,
    pub metric: MetricSpace,
}

impl Witness {
    fn key(&self) -> (u64, u64) {
        (self.seed, self.draw_index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRecord {
    pub canonical: GromovStructure,
    pub fingerprint: InvariantFingerprint,
    pub hits: u64,
    pub first_witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRegistry {
    pub n: usize,
    pub records: BTreeMap<GromovStructure, ClassRecord>,
    pub samples_drawn: u64,
    pub samples_nongeneric: u64,
}

impl ClassRegistry {
    pub fn empty(n: usize) -> Self {
        ClassRegistry { n, records: BTreeMap::new(), samples_drawn: 0, samples_nongeneric: 0 }
    }

    pub fn class_count(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn irreducible_count(&self) -> usize {
        self.records.values().filter(|r| r.fingerprint.irreducible).count()
    }

    pub fn reducible_count(&self) -> usize {
        self.class_count() - self.irreducible_count()
    }

    /// `drawn = nongeneric + Σ hits`.
    pub fn counters_consistent(&self) -> bool {
        let hits: u64 = self.records.values().map(|r| r.hits).sum();
        self.samples_drawn == self.samples_nongeneric + hits
    }

    /// Fraction of draws rejected for tied minimal products.
    pub fn nongeneric_rate(&self) -> f64 {
        if self.samples_drawn == 0 {
            0.0
        } else {
            self.samples_nongeneric as f64 / self.samples_drawn as f64
        }
    }

    /// One-line summary used by the command-line tool.
    pub fn summary_line(&self) -> String {
        format!(
            "n={} classes={} reducible={} irreducible={} nongeneric={}",
            self.n,
            self.class_count(),
            self.reducible_count(),
            self.irreducible_count(),
            self.samples_nongeneric
        )
    }

    fn record_hit(&mut self, canonical: &GromovStructure, witness: impl FnOnce() -> Witness) {
        if let Some(record) = self.records.get_mut(canonical) {
            record.hits += 1;
            return;
        }
        let record = ClassRecord {
            canonical: canonical.clone(),
            fingerprint: fingerprint(canonical),
            hits: 1,
            first_witness: witness(),
        };
        self.records.insert(canonical.clone(), record);
    }
}

/// Union by canonical key with summed counters; the witness with the smaller
/// `(seed, draw_index)` survives.
pub fn merge_registries(a: ClassRegistry, b: ClassRegistry) -> Result<ClassRegistry, CensusError> {
    if a.n != b.n {
        return Err(CensusError::SizeMismatch { left: a.n, right: b.n });
    }
    let mut out = a;
    out.samples_drawn += b.samples_drawn;
    out.samples_nongeneric += b.samples_nongeneric;
    for (key, record) in b.records {
        match out.records.get_mut(&key) {
            Some(existing) => {
                existing.hits += record.hits;
                if record.first_witness.key() < existing.first_witness.key() {
                    existing.first_witness = record.first_witness;
                }
            }
            None => {
                out.records.insert(key, record);
            }
        }
    }
    Ok(out)
}

type CanonicalCache = HashMap<GromovStructure, GromovStructure>;

fn census_range(cfg: &SamplerConfig, range: std::ops::Range<u64>, cache: &mut CanonicalCache) -> ClassRegistry {
    let n = cfg.n;
    let mut registry = ClassRegistry::empty(n);
    for draw in range {
        registry.samples_drawn += 1;
        let dist = integer_closure(n, &sample_weights(cfg, draw));
        let Some(structure) = integer_structure(n, &dist) else {
            registry.samples_nongeneric += 1;
            continue;
        };
        if !cache.contains_key(&structure) {
            let canonical = canonical_form(&structure)
                .map(|c| c.structure)
                .expect("census sizes stay within the canonical labeling limit");
            cache.insert(structure.clone(), canonical);
        }
        let canonical = &cache[&structure];
        registry.record_hit(canonical, || Witness { seed: cfg.seed, draw_index: draw, metric: to_metric(n, &dist) });
    }
    registry
}

/// Runs the census on `threads` workers (0 picks the rayon default). The
/// registry is identical for every worker count.
pub fn run_census(cfg: &SamplerConfig, threads: usize) -> Result<ClassRegistry, CensusError> {
    run_census_with_progress(cfg, threads, &|_, _| {})
}

/// As [`run_census`], calling `progress(done, total)` as blocks of draws
/// finish.
pub fn run_census_with_progress(
    cfg: &SamplerConfig,
    threads: usize,
    progress: &(dyn Fn(u64, u64) + Sync),
) -> Result<ClassRegistry, CensusError> {
    cfg.validate()?;
    if cfg.n > crate::equivalence::MAX_CANONICAL_N {
        return Err(CensusError::InvalidConfig(format!(
            "n = {} exceeds the canonical labeling limit {}",
            cfg.n,
            crate::equivalence::MAX_CANONICAL_N
        )));
    }
    let draws = cfg.draws();
    let chunks: Vec<std::ops::Range<u64>> = (draws.start..draws.end)
        .step_by(CHUNK as usize)
        .map(|start| start..(start + CHUNK).min(draws.end))
        .collect();
    let done = AtomicU64::new(0);
    let work = || {
        chunks
            .par_iter()
            .map_init(CanonicalCache::new, |cache, range| {
                let part = census_range(cfg, range.clone(), cache);
                let finished = done.fetch_add(range.end - range.start, Ordering::Relaxed) + range.end - range.start;
                progress(finished, cfg.sample_budget);
                part
            })
            .collect::<Vec<_>>()
    };
    let parts = if threads == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CensusError::InvalidConfig(format!("cannot start {threads} workers: {e}")))?
            .install(work)
    };
    let mut registry = ClassRegistry::empty(cfg.n);
    for part in parts {
        registry = merge_registries(registry, part)?;
    }
    Ok(registry)
}

/// Checks that every witness re-extracts to a structure whose canonical form
/// is the record's key. Returns the keys that fail.
pub fn verify_witnesses(registry: &ClassRegistry) -> Vec<GromovStructure> {
    registry
        .records
        .values()
        .filter(|record| {
            let ok = extract_structure(&record.first_witness.metric)
                .ok()
                .and_then(|e| canonical_form(&e.structure).ok())
                .is_some_and(|c| c.structure == record.canonical);
            !ok
        })
        .map(|r| r.canonical.clone())
        .collect()
}

#[derive(Serialize, Deserialize)]
struct RegistryFile {
    schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    config: Option<ConfigEcho>,
    n: usize,
    samples_drawn: u64,
    samples_nongeneric: u64,
    class_count: usize,
    reducible: usize,
    irreducible: usize,
    classes: Vec<ClassEntry>,
}

#[derive(Serialize, Deserialize)]
struct ConfigEcho {
    #[serde(flatten)]
    sampler: SamplerConfig,
    rng: String,
}

#[derive(Serialize, Deserialize)]
struct ClassEntry {
    canonical: String,
    triples: String,
    hits: u64,
    fingerprint: InvariantFingerprint,
    witness: WitnessEntry,
}

#[derive(Serialize, Deserialize)]
struct WitnessEntry {
    seed: u64,
    draw_index: u64,
    metric_csv_lower: String,
}

/// Registry JSON. Worker counts are deliberately not recorded, so runs that
/// differ only in parallelism serialize identically.
pub fn registry_to_json(registry: &ClassRegistry, cfg: Option<&SamplerConfig>) -> String {
    let file = RegistryFile {
        schema_version: REGISTRY_SCHEMA_VERSION,
        config: cfg.map(|c| ConfigEcho { sampler: c.clone(), rng: RNG_DESCRIPTION.to_string() }),
        n: registry.n,
        samples_drawn: registry.samples_drawn,
        samples_nongeneric: registry.samples_nongeneric,
        class_count: registry.class_count(),
        reducible: registry.reducible_count(),
        irreducible: registry.irreducible_count(),
        classes: registry
            .records
            .values()
            .map(|r| ClassEntry {
                canonical: r.canonical.to_text(),
                triples: r.canonical.triples_label(),
                hits: r.hits,
                fingerprint: r.fingerprint.clone(),
                witness: WitnessEntry {
                    seed: r.first_witness.seed,
                    draw_index: r.first_witness.draw_index,
                    metric_csv_lower: r.first_witness.metric.to_csv_lower(),
                },
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("registry serializes");
    text.push('\n');
    text
}

/// Parses a registry file, recomputing every fingerprint and rejecting
/// files whose stored data disagree with the recomputation.
pub fn registry_from_json(text: &str) -> Result<(ClassRegistry, Option<SamplerConfig>), CensusError> {
    let bad = |msg: String| CensusError::Registry(msg);
    let file: RegistryFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if file.schema_version != REGISTRY_SCHEMA_VERSION {
        return Err(bad(format!("unsupported schema version {}", file.schema_version)));
    }
    let mut registry = ClassRegistry::empty(file.n);
    registry.samples_drawn = file.samples_drawn;
    registry.samples_nongeneric = file.samples_nongeneric;
    for entry in file.classes {
        let canonical = GromovStructure::parse(&entry.canonical).map_err(|e| bad(e.to_string()))?;
        if canonical.n() != file.n {
            return Err(bad(format!("class {} has {} points, registry has {}", entry.triples, canonical.n(), file.n)));
        }
        let fp = fingerprint(&canonical);
        if fp != entry.fingerprint {
            return Err(bad(format!("stored fingerprint of {} does not match recomputation", entry.triples)));
        }
        let metric =
            parse_metric(&entry.witness.metric_csv_lower, MetricFormat::CsvLower).map_err(|e| bad(e.to_string()))?;
        if entry.hits == 0 {
            return Err(bad(format!("class {} has zero hits", entry.triples)));
        }
        let record = ClassRecord {
            canonical: canonical.clone(),
            fingerprint: fp,
            hits: entry.hits,
            first_witness: Witness { seed: entry.witness.seed, draw_index: entry.witness.draw_index, metric },
        };
        if registry.records.insert(canonical, record).is_some() {
            return Err(bad(format!("duplicate class {}", entry.triples)));
        }
    }
    if !registry.counters_consistent() {
        return Err(bad("sample counters do not add up".into()));
    }
    Ok((registry, file.config.map(|c| c.sampler)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::apsp_closure;

    #[test]
    fn single_relaxation() {
        let n = 3;
        // pairs (1,2), (1,3), (2,3)
        assert_eq!(integer_closure(n, &[5, 1, 1]), vec![2, 1, 1]);
    }

    #[test]
    fn draws_are_reproducible_and_independent() {
        let cfg = SamplerConfig::new(6, 10, 42);
        assert_eq!(sample_weights(&cfg, 3), sample_weights(&cfg, 3));
        assert_ne!(sample_weights(&cfg, 3), sample_weights(&cfg, 4));
        let other = SamplerConfig::new(6, 10, 43);
        assert_ne!(sample_weights(&cfg, 3), sample_weights(&other, 3));
        assert!(sample_weights(&cfg, 0).iter().all(|&w| (1..=DEFAULT_MAX_WEIGHT).contains(&w)));
    }

    #[test]
    fn equal_weights_are_rejected() {
        let dist = integer_closure(5, &[7; 10]);
        assert_eq!(integer_structure(5, &dist), None);
        assert!(extract_structure(&to_metric(5, &dist)).is_err());
    }

    #[test]
    fn integer_path_agrees_with_exact_path() {
        for n in 4..=7 {
            let cfg = SamplerConfig { max_weight: 12, ..SamplerConfig::new(n, 1, 9) };
            for draw in 0..300 {
                let weights = sample_weights(&cfg, draw);
                let rational: Vec<Rational> = weights.iter().map(|&w| Rational::from_integer(w)).collect();
                let exact = apsp_closure(n, &rational).unwrap();
                let dist = integer_closure(n, &weights);
                assert_eq!(to_metric(n, &dist), exact);
                let fast = integer_structure(n, &dist);
                let slow = extract_structure(&exact).ok().map(|e| e.structure);
                assert_eq!(fast, slow, "n={n} draw={draw}");
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(SamplerConfig::new(2, 1, 0).validate().is_err());
        assert!(SamplerConfig::new(4, 0, 0).validate().is_err());
        assert!(SamplerConfig { max_weight: 1, ..SamplerConfig::new(4, 1, 0) }.validate().is_err());
        assert!(SamplerConfig::new(4, 1, 0).validate().is_ok());
    }

    #[test]
    fn small_census_counters_and_witnesses() {
        let cfg = SamplerConfig::new(5, 3000, 7);
        let reg = run_census(&cfg, 2).unwrap();
        assert!(reg.counters_consistent());
        assert_eq!(reg.samples_drawn, 3000);
        assert!(verify_witnesses(&reg).is_empty());
        for record in reg.records.values() {
            assert_eq!(canonical_form(&record.canonical).unwrap().structure, record.canonical);
        }
    }

    #[test]
    fn merge_identity_and_commutativity() {
        let a = run_census(&SamplerConfig::new(5, 2000, 1), 1).unwrap();
        let b = run_census(&SamplerConfig::new(5, 2000, 2), 1).unwrap();
        assert_eq!(merge_registries(a.clone(), ClassRegistry::empty(5)).unwrap(), a);
        assert_eq!(
            merge_registries(a.clone(), b.clone()).unwrap(),
            merge_registries(b, a).unwrap()
        );
        assert!(matches!(
            merge_registries(ClassRegistry::empty(4), ClassRegistry::empty(5)),
            Err(CensusError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn split_budget_matches_full_run() {
        let full = run_census(&SamplerConfig::new(5, 40_000, 3), 1).unwrap();
        let first = run_census(&SamplerConfig::new(5, 20_000, 3), 1).unwrap();
        let second =
            run_census(&SamplerConfig { start_index: 20_000, ..SamplerConfig::new(5, 20_000, 3) }, 1).unwrap();
        assert_eq!(merge_registries(second, first).unwrap(), full);
    }

    #[test]
    fn registry_json_round_trip() {
        let cfg = SamplerConfig::new(5, 5000, 11);
        let reg = run_census(&cfg, 1).unwrap();
        let text = registry_to_json(&reg, Some(&cfg));
        let (back, echoed) = registry_from_json(&text).unwrap();
        assert_eq!(back, reg);
        assert_eq!(echoed, Some(cfg));
        let tampered = text.replacen("\"hits\": ", "\"hits\": 1", 1);
        assert!(registry_from_json(&tampered).is_err());
    }
}
